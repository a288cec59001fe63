#pragma once

// Coherent states of the auxiliary system and the coherent-state path integral
// of a cMPS.
//
// The auxiliary D-level system is identified with the one-particle sector of D
// bosonic modes b_j. The generator
//
//   F = sum_jk K_jk b_j^dag b_k (x) 1 + i R_jk b_j^dag b_k (x) psi^dag - i conj(R_kj) b_j^dag b_k (x) psi
//
// conserves N_B = sum_j b_j^dag b_j, so inserting coherent-state resolutions of
// the identity between cell propagators turns <wL|U(l,0)|wR> into an integral
// over auxiliary paths phi(s) weighted by exp(iS), each path imprinting a
// coherent field with amplitude sqrt(eps) * phi^dag R phi on the cells.

#include <cmath>
#include <cstddef>
#include <numbers>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "cmpslab/cmps_core.hpp"
#include "cmpslab/errors.hpp"
#include "cmpslab/field_types.hpp"
#include "cmpslab/linalg.hpp"

namespace cmpslab {

/// Label phi of the product coherent state exp[sum_k phi_k b_k^dag - conj(phi_k) b_k] |Omega>.
struct CoherentPoint {
  ComplexVector amplitudes;
};

/// Auxiliary path sampled at s_0 < s_1 < ... with uniform spacing.
struct AuxPath {
  std::vector<ComplexVector> slices;
  double spacing = 0.0;

  void validate() const {
    if (slices.size() < 2) throw InputError("AuxPath: at least two slices are required");
    if (!(spacing > 0.0)) throw InputError("AuxPath: spacing must be positive");
    for (const auto& s : slices) {
      if (s.size() != slices.front().size()) throw DimensionError("AuxPath: slices differ in dimension");
      if (!s.allFinite()) throw InputError("AuxPath: non-finite amplitude");
    }
  }
};

/// <a|b> = exp[-1/2 sum_k (|a_k|^2 + |b_k|^2 - 2 conj(a_k) b_k)]
inline Complex coherent_overlap(const CoherentPoint& a, const CoherentPoint& b) {
  if (a.amplitudes.size() != b.amplitudes.size()) throw DimensionError("coherent_overlap: dimensions differ");
  const Complex cross = a.amplitudes.dot(b.amplitudes);
  return std::exp(-0.5 * (a.amplitudes.squaredNorm() + b.amplitudes.squaredNorm()) + cross);
}

// ---------------------------------------------------------------------------
// Gauss-Hermite quadrature

/// Nodes and weights for int f(x) exp(-x^2) dx.
struct GaussHermiteRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

namespace detail {

/// Orthonormal Hermite functions p_0..p_n at x (weight exp(-x^2)).
inline void hermite_orthonormal(std::size_t n, double x, double& pn, double& pn1, double& sum_sq) {
  double prev = 0.0;
  double cur = std::pow(std::numbers::pi, -0.25);
  sum_sq = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    sum_sq += cur * cur;
    const double kd = static_cast<double>(k);
    const double next = x * std::sqrt(2.0 / (kd + 1.0)) * cur - std::sqrt(kd / (kd + 1.0)) * prev;
    prev = cur;
    cur = next;
  }
  pn = cur;
  pn1 = prev;
}

}  // namespace detail

/// Golub-Welsch start, Newton-polished nodes, Christoffel weights.
inline GaussHermiteRule gauss_hermite(std::size_t order) {
  if (order == 0) throw InputError("gauss_hermite: order must be positive");
  const auto n = static_cast<Eigen::Index>(order);
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd sub(std::max<Eigen::Index>(n - 1, 0));
  for (Eigen::Index k = 1; k < n; ++k) sub(k - 1) = std::sqrt(static_cast<double>(k) / 2.0);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);

  GaussHermiteRule rule;
  for (Eigen::Index i = 0; i < n; ++i) {
    double x = solver.eigenvalues()(i);
    double pn = 0, pn1 = 0, sum_sq = 0;
    for (int it = 0; it < 4; ++it) {
      detail::hermite_orthonormal(order, x, pn, pn1, sum_sq);
      x -= pn / (std::sqrt(2.0 * static_cast<double>(order)) * pn1);
    }
    detail::hermite_orthonormal(order, x, pn, pn1, sum_sq);
    rule.nodes.push_back(x);
    rule.weights.push_back(1.0 / sum_sq);
  }
  return rule;
}

// ---------------------------------------------------------------------------
// Resolution of the identity

/// Max |(1/pi^D) int prod_k d^2 phi_k |phi><phi| - 1| over the Fock states with
/// at most `fock_cutoff` bosons per mode, using Gauss-Hermite quadrature in
/// (Re phi_k, Im phi_k).
inline double identity_resolution_check(std::size_t modes, std::size_t fock_cutoff, std::size_t quad_order) {
  if (modes != 1 && modes != 2) throw InputError("identity_resolution_check: D must be 1 or 2");
  if (fock_cutoff > 6) throw InputError("identity_resolution_check: fock_cutoff must be at most 6");
  if (quad_order == 0 || quad_order > 40) throw InputError("identity_resolution_check: quad_order must be in [1, 40]");
  const double budget = std::pow(static_cast<double>(quad_order), 2.0 * static_cast<double>(modes));
  if (budget > 1e7) throw ResourceError("identity_resolution_check: quadrature budget exceeds 1e7 nodes");

  const auto rule = gauss_hermite(quad_order);
  const std::size_t local = fock_cutoff + 1;
  const std::size_t dim = modes == 1 ? local : local * local;
  std::vector<double> inv_sqrt_fact(local);
  double fact = 1.0;
  for (std::size_t n = 0; n < local; ++n) {
    if (n > 0) fact *= static_cast<double>(n);
    inv_sqrt_fact[n] = 1.0 / std::sqrt(fact);
  }

  // <n|phi> without the Gaussian factor, per mode.
  auto mode_vector = [&](Complex phi) {
    ComplexVector v(static_cast<Eigen::Index>(local));
    Complex p = 1.0;
    for (std::size_t n = 0; n < local; ++n) {
      v(static_cast<Eigen::Index>(n)) = p * inv_sqrt_fact[n];
      p *= phi;
    }
    return v;
  };

  std::vector<std::pair<Complex, double>> points;
  for (std::size_t a = 0; a < quad_order; ++a) {
    for (std::size_t b = 0; b < quad_order; ++b) {
      points.emplace_back(Complex(rule.nodes[a], rule.nodes[b]), rule.weights[a] * rule.weights[b] / std::numbers::pi);
    }
  }

  ComplexMatrix acc = ComplexMatrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  if (modes == 1) {
    for (const auto& [phi, w] : points) {
      const ComplexVector v = mode_vector(phi);
      acc.noalias() += w * v * v.adjoint();
    }
  } else {
    for (const auto& [phi1, w1] : points) {
      const ComplexVector v1 = mode_vector(phi1);
      for (const auto& [phi2, w2] : points) {
        const ComplexVector v = kron(v1, mode_vector(phi2));
        acc.noalias() += (w1 * w2) * v * v.adjoint();
      }
    }
  }
  return (acc - identity(static_cast<Eigen::Index>(dim))).cwiseAbs().maxCoeff();
}

// ---------------------------------------------------------------------------
// Second-quantised auxiliary system

namespace detail {

/// Lowering operator of mode j on D modes, each truncated at `cutoff`
/// (mode 0 most significant).
inline ComplexMatrix mode_lowering(std::size_t modes, std::size_t j, std::size_t cutoff) {
  const ComplexMatrix a = lowering_operator(cutoff);
  const ComplexMatrix id = identity(a.rows());
  ComplexMatrix out = identity(1);
  for (std::size_t k = 0; k < modes; ++k) out = kron(out, k == j ? a : id);
  return out;
}

inline std::size_t aux_dim(std::size_t modes, std::size_t cutoff) {
  std::size_t dim = 1;
  for (std::size_t k = 0; k < modes; ++k) dim *= cutoff + 1;
  return dim;
}

}  // namespace detail

/// F on (auxiliary Fock space, D modes truncated at `aux_cutoff`) (x) (one
/// physical cell truncated at `cell_cutoff`), with psi = a / sqrt(eps).
inline ComplexMatrix embed_generator(const ComplexMatrix& K, const ComplexMatrix& R, std::size_t aux_cutoff,
                                     std::size_t cell_cutoff = 1, double eps = 1.0) {
  require_square(K, "embed_generator");
  if (R.rows() != K.rows() || R.cols() != K.cols()) throw DimensionError("embed_generator: K and R differ in size");
  if (!is_hermitian(K)) throw InputError("embed_generator: K is not Hermitian");
  if (aux_cutoff < 1) throw InputError("embed_generator: auxiliary cutoff must be at least 1");
  if (!(eps > 0.0)) throw InputError("embed_generator: eps must be positive");
  const auto modes = static_cast<std::size_t>(K.rows());
  const ComplexMatrix cell_a = lowering_operator(cell_cutoff) / std::sqrt(eps);
  const ComplexMatrix cell_id = identity(cell_a.rows());
  const auto dim = static_cast<Eigen::Index>(detail::aux_dim(modes, aux_cutoff));

  std::vector<ComplexMatrix> b;
  for (std::size_t j = 0; j < modes; ++j) b.push_back(detail::mode_lowering(modes, j, aux_cutoff));

  ComplexMatrix f = ComplexMatrix::Zero(dim * cell_a.rows(), dim * cell_a.rows());
  for (std::size_t j = 0; j < modes; ++j) {
    for (std::size_t k = 0; k < modes; ++k) {
      const auto jj = static_cast<Eigen::Index>(j);
      const auto kk = static_cast<Eigen::Index>(k);
      const ComplexMatrix hop = b[j].adjoint() * b[k];
      if (K(jj, kk) != Complex{}) f += K(jj, kk) * kron(hop, cell_id);
      if (R(jj, kk) != Complex{}) f += kI * R(jj, kk) * kron(hop, cell_a.adjoint());
      if (R(kk, jj) != Complex{}) f -= kI * std::conj(R(kk, jj)) * kron(hop, cell_a);
    }
  }
  return f;
}

/// N_B (x) 1 on the same space as embed_generator.
inline ComplexMatrix aux_number_operator(std::size_t modes, std::size_t aux_cutoff, std::size_t cell_cutoff = 1) {
  const auto dim = static_cast<Eigen::Index>(detail::aux_dim(modes, aux_cutoff));
  ComplexMatrix n = ComplexMatrix::Zero(dim, dim);
  for (std::size_t j = 0; j < modes; ++j) {
    const ComplexMatrix b = detail::mode_lowering(modes, j, aux_cutoff);
    n += b.adjoint() * b;
  }
  return kron(n, identity(static_cast<Eigen::Index>(cell_cutoff + 1)));
}

/// Block of an operator on (aux Fock) (x) cell restricted to the one-particle
/// auxiliary states b_j^dag|Omega>, returned on C^D (x) cell.
inline ComplexMatrix single_particle_block(const ComplexMatrix& op, std::size_t modes, std::size_t aux_cutoff,
                                           std::size_t cell_cutoff = 1) {
  const auto cell = static_cast<Eigen::Index>(cell_cutoff + 1);
  std::vector<Eigen::Index> aux_index(modes);
  for (std::size_t j = 0; j < modes; ++j) {
    std::vector<std::size_t> occ(modes, 0);
    occ[j] = 1;
    aux_index[j] = static_cast<Eigen::Index>(string_to_index(occ, aux_cutoff + 1));
  }
  const auto d = static_cast<Eigen::Index>(modes);
  ComplexMatrix out(d * cell, d * cell);
  for (Eigen::Index j = 0; j < d; ++j) {
    for (Eigen::Index k = 0; k < d; ++k) {
      out.block(j * cell, k * cell, cell, cell) =
          op.block(aux_index[static_cast<std::size_t>(j)] * cell, aux_index[static_cast<std::size_t>(k)] * cell, cell, cell);
    }
  }
  return out;
}

/// F on the one-particle sector directly: K (x) 1 + i R (x) psi^dag - i R^dag (x) psi.
inline ComplexMatrix single_particle_generator(const ComplexMatrix& K, const ComplexMatrix& R, std::size_t cell_cutoff,
                                               double eps) {
  const ComplexMatrix a = lowering_operator(cell_cutoff) / std::sqrt(eps);
  return kron(K, identity(a.rows())) + kI * kron(R, a.adjoint()) - kI * kron(R.adjoint(), a);
}

// ---------------------------------------------------------------------------
// Discrete action

/// S = sum_k [ i phi_{k+1}^dag (phi_{k+1} - phi_k) - eps phi_{k+1}^dag K phi_k ],
/// the later slice always on the bra side, as produced by expanding
/// <phi_{k+1}| 1 - i eps F |phi_k>.
inline Complex action_eval(const AuxPath& path, const ComplexMatrix& K) {
  path.validate();
  if (K.rows() != path.slices.front().size() || K.cols() != K.rows()) {
    throw DimensionError("action_eval: K does not match the path dimension");
  }
  Complex s{};
  for (std::size_t k = 0; k + 1 < path.slices.size(); ++k) {
    const ComplexVector& next = path.slices[k + 1];
    const ComplexVector& cur = path.slices[k];
    s += kI * next.dot(next - cur) - path.spacing * next.dot(K * cur);
  }
  return s;
}

/// Phi(s_k) = phi^dag(s_k) R phi(s_k) per slice.
inline std::vector<Complex> phi_field(const AuxPath& path, const ComplexMatrix& R) {
  if (path.slices.empty()) return {};
  if (R.rows() != path.slices.front().size() || R.cols() != R.rows()) {
    throw DimensionError("phi_field: R does not match the path dimension");
  }
  std::vector<Complex> out;
  out.reserve(path.slices.size());
  for (const auto& phi : path.slices) out.push_back(phi.dot(R * phi));
  return out;
}

// ---------------------------------------------------------------------------
// Path integral for D = 1

/// Physical state of a D = 1 cMPS on N cells from the discretised
/// coherent-state path integral.
///
/// The integration variables are the auxiliary labels phi_1..phi_N at the cell
/// ends s_1..s_N; the first slice is pinned to phi_0 = wR, whose one-particle
/// component is exactly the right boundary once the factor e^{-|wR|^2/2} is
/// removed (F conserves N_B, so no other sector reaches <wL|). The integrand is
///
///   exp(iS) * (wL . phi_N) * prod_k exp(-eps/2 phi_k^* R^dag R phi_{k-1}) exp(sqrt(eps) Phi_k a_k^dag) |0>_k,
///
/// with S from action_eval, Phi_k = phi_k^* R phi_{k-1}, and the Gaussian part of
/// exp(iS) taken as the Gauss-Hermite weight in (Re phi_k, Im phi_k).
inline TruncatedFock path_integral_state(const Cmps& c, std::size_t slices, std::size_t quad_order,
                                         std::size_t fock_cutoff) {
  if (c.bond_dim() != 1) throw UnsupportedError("path_integral_state: only D = 1 is supported");
  if (c.has_trace_left()) throw UnsupportedError("path_integral_state: needs a vector left boundary");
  if (slices < 1 || slices > 3) throw InputError("path_integral_state: slice count must be in [1, 3]");
  if (quad_order == 0) throw InputError("path_integral_state: quad_order must be positive");
  const double budget = std::pow(static_cast<double>(quad_order), 2.0 * static_cast<double>(slices));
  if (budget > 1e7) throw ResourceError("path_integral_state: quadrature budget exceeds 1e7 nodes");

  const std::size_t cells = slices;
  const double eps = c.length() / static_cast<double>(cells);
  if (cell_count(c, eps) != cells) throw InputError("path_integral_state: segments are not commensurate with the slices");

  std::vector<Complex> K(cells), R(cells);
  for (std::size_t k = 0; k < cells; ++k) {
    const auto& seg = c.segment_at((static_cast<double>(k) + 0.5) * eps);
    K[k] = seg.K(0, 0);
    R[k] = seg.R(0, 0);
  }
  const Complex left = c.left_vector()(0);
  const Complex right = c.right()(0);

  const auto rule = gauss_hermite(quad_order);
  struct Node {
    Complex phi;
    double weight;
  };
  std::vector<Node> nodes;
  for (std::size_t a = 0; a < quad_order; ++a) {
    for (std::size_t b = 0; b < quad_order; ++b) {
      nodes.push_back({Complex(rule.nodes[a], rule.nodes[b]), rule.weights[a] * rule.weights[b] / std::numbers::pi});
    }
  }

  const std::size_t local = fock_cutoff + 1;
  std::vector<double> inv_sqrt_fact(local);
  double fact = 1.0;
  for (std::size_t n = 0; n < local; ++n) {
    if (n > 0) fact *= static_cast<double>(n);
    inv_sqrt_fact[n] = 1.0 / std::sqrt(fact);
  }

  TruncatedFock out = fock_vacuum(cells, eps, fock_cutoff);
  out.amplitudes.setZero();
  ComplexVector term(out.amplitudes.size());
  std::vector<std::size_t> pick(cells, 0);
  std::vector<Complex> phi(cells + 1);
  phi[0] = right;
  const double sqrt_eps = std::sqrt(eps);

  while (true) {
    double weight = 1.0;
    for (std::size_t k = 0; k < cells; ++k) {
      phi[k + 1] = nodes[pick[k]].phi;
      weight *= nodes[pick[k]].weight;
    }
    // exp(iS) with the Gaussian weight exp(-sum_k |phi_k|^2) divided out.
    Complex exponent{};
    for (std::size_t k = 1; k <= cells; ++k) {
      const Complex pair = std::conj(phi[k]) * phi[k - 1];
      exponent += pair - kI * eps * K[k - 1] * pair - 0.5 * eps * std::norm(R[k - 1]) * pair;
    }
    const Complex scalar = weight * std::exp(exponent) * left * phi[cells];

    // Product of per-cell coherent amplitudes, cell 1 most significant.
    term.setZero();
    term(0) = scalar;
    Eigen::Index filled = 1;
    for (std::size_t k = 1; k <= cells; ++k) {
      const Complex z = sqrt_eps * std::conj(phi[k]) * R[k - 1] * phi[k - 1];
      for (Eigen::Index idx = filled - 1; idx >= 0; --idx) {
        const Complex base = term(idx);
        Complex p = 1.0;
        for (std::size_t n = 0; n < local; ++n) {
          term(idx * static_cast<Eigen::Index>(local) + static_cast<Eigen::Index>(n)) = base * p * inv_sqrt_fact[n];
          p *= z;
        }
      }
      filled *= static_cast<Eigen::Index>(local);
    }
    out.amplitudes += term;

    std::size_t pos = cells;
    bool done = true;
    while (pos > 0) {
      --pos;
      if (++pick[pos] < nodes.size()) {
        done = false;
        break;
      }
      pick[pos] = 0;
    }
    if (done) break;
  }
  return out;
}

}  // namespace cmpslab
