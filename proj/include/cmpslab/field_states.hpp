#pragma once

// Physical field states on a few cells: the brute-force truncated-Fock oracle
// for a cMPS, coherent field states, and the direct-sum constructions that
// show D = 1 coherent cMPS span the Fock space.

#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

#include "cmpslab/cmps_core.hpp"
#include "cmpslab/coherent_path.hpp"
#include "cmpslab/errors.hpp"
#include "cmpslab/field_types.hpp"
#include "cmpslab/linalg.hpp"

namespace cmpslab {

inline constexpr double kMaxOracleBudget = 1e7;

namespace detail {

inline std::vector<double> inverse_sqrt_factorials(std::size_t cutoff) {
  std::vector<double> out(cutoff + 1);
  double fact = 1.0;
  for (std::size_t n = 0; n <= cutoff; ++n) {
    if (n > 0) fact *= static_cast<double>(n);
    out[n] = 1.0 / std::sqrt(fact);
  }
  return out;
}

inline double fock_size(std::size_t cells, std::size_t cutoff) {
  double size = 1.0;
  for (std::size_t k = 0; k < cells; ++k) size *= static_cast<double>(cutoff + 1);
  return size;
}

}  // namespace detail

/// Product over cells of single-mode coherent states with amplitude
/// sqrt(eps) Phi(x_k), each truncated at n_max and not renormalised.
inline TruncatedFock coherent_field_state(const FieldGrid& phi, std::size_t n_max) {
  phi.validate();
  if (detail::fock_size(phi.size(), n_max) > kMaxStateVectorSize) {
    throw ResourceError("coherent_field_state: (n_max+1)^N exceeds the guard of 1e6");
  }
  const double eps = phi.spacing();
  const auto inv_fact = detail::inverse_sqrt_factorials(n_max);
  TruncatedFock out = fock_vacuum(phi.size(), eps, n_max);
  const auto local = static_cast<Eigen::Index>(n_max + 1);
  ComplexVector amps = ComplexVector::Ones(1);
  for (const Complex& value : phi.values) {
    const Complex alpha = std::sqrt(eps) * value;
    if (std::norm(alpha) > static_cast<double>(n_max) / 4.0) out.truncation_warning = true;
    ComplexVector mode(local);
    Complex p = std::exp(-0.5 * std::norm(alpha));
    for (Eigen::Index n = 0; n < local; ++n) {
      mode(n) = p * inv_fact[static_cast<std::size_t>(n)];
      p *= alpha;
    }
    amps = kron(amps, mode);
  }
  out.amplitudes = amps;
  return out;
}

/// D = 1 cMPS with K = 0, R = Phi on each grid cell and unit boundaries.
inline Cmps cmps_from_coherent(const FieldGrid& phi) {
  phi.validate();
  std::vector<Segment> segs;
  const double h = phi.spacing();
  for (std::size_t k = 0; k < phi.size(); ++k) {
    const double to = k + 1 == phi.size() ? phi.length : static_cast<double>(k + 1) * h;
    segs.push_back({static_cast<double>(k) * h, to, ComplexMatrix::Zero(1, 1), ComplexMatrix::Constant(1, 1, phi.values[k])});
  }
  return Cmps(phi.length, std::move(segs), ComplexRowVector::Ones(1), ComplexVector::Ones(1));
}

/// c1 |x1> + c2 |x2> as a cMPS of bond dimension D1 + D2.
inline Cmps cmps_superpose(Complex c1, const Cmps& x1, Complex c2, const Cmps& x2) {
  if (x1.has_trace_left() || x2.has_trace_left()) {
    throw UnsupportedError("cmps_superpose: both inputs need a vector left boundary");
  }
  if (std::abs(x1.length() - x2.length()) > 1e-12 * std::max(1.0, x1.length())) {
    throw InputError("cmps_superpose: intervals differ");
  }
  std::vector<double> cuts;
  for (const auto& s : x1.segments()) cuts.push_back(s.to);
  for (const auto& s : x2.segments()) cuts.push_back(s.to);
  const Cmps a = refine(x1, cuts);
  const Cmps b = refine(x2, cuts);
  if (a.segments().size() != b.segments().size()) throw InputError("cmps_superpose: segmentations do not align");

  std::vector<Segment> segs;
  for (std::size_t k = 0; k < a.segments().size(); ++k) {
    const auto& sa = a.segments()[k];
    const auto& sb = b.segments()[k];
    segs.push_back({sa.from, sa.to, direct_sum(sa.K, sb.K), direct_sum(sa.R, sb.R)});
  }
  const ComplexRowVector left = direct_sum(ComplexRowVector(c1 * a.left_vector()), ComplexRowVector(c2 * b.left_vector()));
  return Cmps(a.length(), std::move(segs), left, direct_sum(a.right(), b.right()));
}

/// Reference state of a cMPS on cells of width eps: the exact one-cell
/// propagator exp(-i eps F) on (auxiliary) (x) (cell mode truncated at n_max),
/// applied cell by cell to |wR> (x) |vacuum>, then projected on <wL|.
inline TruncatedFock exact_state_from_cmps(const Cmps& c, double eps, std::size_t n_max) {
  if (c.has_trace_left()) throw UnsupportedError("exact_state_from_cmps: needs a vector left boundary");
  const std::size_t cells = cell_count(c, eps);
  const auto d = static_cast<double>(c.bond_dim());
  if (d * d * detail::fock_size(cells, n_max) > kMaxOracleBudget) {
    throw ResourceError("exact_state_from_cmps: D^2 (n_max+1)^N exceeds the guard of 1e7");
  }
  const auto D = c.bond_dim();
  const auto m = static_cast<Eigen::Index>(n_max + 1);

  // state(r, s): auxiliary index r, occupation string s of the cells so far.
  ComplexMatrix state = c.right();
  for (std::size_t k = 0; k < cells; ++k) {
    const auto& seg = c.segment_at((static_cast<double>(k) + 0.5) * eps);
    const ComplexMatrix prop = matrix_exponential(-kI * eps * single_particle_generator(seg.K, seg.R, n_max, eps));
    ComplexMatrix next = ComplexMatrix::Zero(D, state.cols() * m);
    for (Eigen::Index r = 0; r < D; ++r) {
      for (Eigen::Index j = 0; j < m; ++j) {
        for (Eigen::Index col = 0; col < D; ++col) {
          const Complex w = prop(r * m + j, col * m);
          if (w == Complex{}) continue;
          for (Eigen::Index s = 0; s < state.cols(); ++s) next(r, s * m + j) += w * state(col, s);
        }
      }
    }
    state = std::move(next);
  }
  TruncatedFock out = fock_vacuum(cells, eps, n_max);
  out.amplitudes = (c.left_vector() * state).transpose();
  return out;
}

/// The one-particle state int f(x) psi^dag(x) |Omega> on cells of width eps:
/// amplitude sqrt(eps) f(x_k) on the string with a single boson in cell k.
inline TruncatedFock one_particle_state(const FieldGrid& f, double eps, std::size_t n_max) {
  f.validate();
  if (n_max < 1) throw InputError("one_particle_state: n_max must be at least 1");
  const double ratio = f.spacing() / eps;
  const double rounded = std::round(ratio);
  if (rounded < 1.0 || std::abs(ratio - rounded) > 1e-9 * ratio) {
    throw InputError("one_particle_state: eps must divide the grid spacing");
  }
  const auto per_sample = static_cast<std::size_t>(rounded);
  const std::size_t cells = f.size() * per_sample;
  if (detail::fock_size(cells, n_max) > kMaxStateVectorSize) {
    throw ResourceError("one_particle_state: (n_max+1)^N exceeds the guard of 1e6");
  }
  TruncatedFock out = fock_vacuum(cells, eps, n_max);
  out.amplitudes.setZero();
  for (std::size_t k = 0; k < cells; ++k) {
    std::vector<std::size_t> occ(cells, 0);
    occ[k] = 1;
    out.amplitudes(static_cast<Eigen::Index>(string_to_index(occ, n_max + 1))) =
        std::sqrt(eps) * f.values[k / per_sample];
  }
  return out;
}

/// Central difference (|alpha f> - |-alpha f>) / (2 alpha) of coherent cMPS,
/// which tends to int f psi^dag |Omega> as alpha -> 0.
inline Cmps approximate_one_particle(const FieldGrid& f, double alpha) {
  f.validate();
  if (!(alpha > 0.0 && alpha <= 0.5)) throw InputError("approximate_one_particle: alpha must be in (0, 0.5]");
  if (std::abs(f.norm_squared() - 1.0) > 1e-10) {
    throw InputError("approximate_one_particle: f must be normalised on the grid");
  }
  FieldGrid plus = f;
  FieldGrid minus = f;
  for (std::size_t k = 0; k < f.size(); ++k) {
    plus.values[k] = alpha * f.values[k];
    minus.values[k] = -alpha * f.values[k];
  }
  return cmps_superpose(1.0 / (2.0 * alpha), cmps_from_coherent(plus), -1.0 / (2.0 * alpha), cmps_from_coherent(minus));
}

/// 1 - |<ref|candidate>| / |ref|, with the candidate taken at its raw norm so
/// that a deficit in its weight counts against it.
inline double raw_overlap_infidelity(const TruncatedFock& ref, const TruncatedFock& candidate) {
  const double norm = std::sqrt(ref.norm_squared());
  if (!(norm > 0.0)) throw UndefinedValueError("raw_overlap_infidelity: zero-norm reference");
  return 1.0 - std::abs(fock_inner(ref, candidate)) / norm;
}

}  // namespace cmpslab
