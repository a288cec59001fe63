#pragma once

// Exact physical states on a few cells and sampled field configurations.

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "cmpslab/errors.hpp"
#include "cmpslab/lattice_mps.hpp"
#include "cmpslab/linalg.hpp"

namespace cmpslab {

/// State of N cells of width eps with at most `occupation_cutoff` bosons per
/// cell. Amplitudes are indexed by occupation strings, cell 1 most significant.
/// Truncated states are never renormalised.
struct TruncatedFock {
  std::size_t cell_count = 0;
  double cell_width = 0.0;
  std::size_t occupation_cutoff = 0;
  ComplexVector amplitudes;
  bool truncation_warning = false;

  std::size_t local_dim() const { return occupation_cutoff + 1; }
  double norm_squared() const { return amplitudes.squaredNorm(); }

  std::vector<std::size_t> occupations(std::size_t index) const {
    return index_to_string(index, local_dim(), cell_count);
  }

  void validate() const {
    double expected = 1.0;
    for (std::size_t k = 0; k < cell_count; ++k) expected *= static_cast<double>(local_dim());
    if (static_cast<double>(amplitudes.size()) != expected) {
      throw DimensionError("TruncatedFock: amplitude vector length does not match (n_max+1)^N");
    }
  }
};

inline TruncatedFock fock_vacuum(std::size_t cells, double width, std::size_t cutoff) {
  TruncatedFock out{cells, width, cutoff, ComplexVector::Zero(1), false};
  std::size_t size = 1;
  for (std::size_t k = 0; k < cells; ++k) size *= cutoff + 1;
  out.amplitudes = ComplexVector::Zero(static_cast<Eigen::Index>(size));
  out.amplitudes(0) = 1.0;
  return out;
}

/// The same state written with a larger per-cell cutoff.
inline TruncatedFock raise_cutoff(const TruncatedFock& s, std::size_t cutoff) {
  if (cutoff < s.occupation_cutoff) throw InputError("raise_cutoff: cannot lower the cutoff");
  TruncatedFock out = fock_vacuum(s.cell_count, s.cell_width, cutoff);
  out.amplitudes.setZero();
  out.truncation_warning = s.truncation_warning;
  for (Eigen::Index i = 0; i < s.amplitudes.size(); ++i) {
    const auto occ = s.occupations(static_cast<std::size_t>(i));
    out.amplitudes(static_cast<Eigen::Index>(string_to_index(occ, cutoff + 1))) = s.amplitudes(i);
  }
  return out;
}

inline void require_same_layout(const TruncatedFock& a, const TruncatedFock& b, const char* what) {
  if (a.cell_count != b.cell_count || a.occupation_cutoff != b.occupation_cutoff) {
    throw InputError(std::string(what) + ": states have different cell counts or cutoffs");
  }
}

/// <a|b>
inline Complex fock_inner(const TruncatedFock& a, const TruncatedFock& b) {
  require_same_layout(a, b, "fock_inner");
  return a.amplitudes.dot(b.amplitudes);
}

/// |<a|b>|^2 / (<a|a> <b|b>)
inline double fidelity(const TruncatedFock& a, const TruncatedFock& b) {
  const double na = a.norm_squared();
  const double nb = b.norm_squared();
  if (!(na > 0.0) || !(nb > 0.0)) throw UndefinedValueError("fidelity: zero-norm state");
  return std::norm(fock_inner(a, b)) / (na * nb);
}

/// <n_cell> / (eps <psi|psi>)
inline double fock_density(const TruncatedFock& s, std::size_t cell) {
  if (cell >= s.cell_count) throw InputError("fock_density: cell index out of range");
  const double norm = s.norm_squared();
  if (!(norm > 0.0)) throw UndefinedValueError("fock_density: zero-norm state");
  double total = 0.0;
  for (Eigen::Index i = 0; i < s.amplitudes.size(); ++i) {
    const auto occ = s.occupations(static_cast<std::size_t>(i));
    total += static_cast<double>(occ[cell]) * std::norm(s.amplitudes(i));
  }
  return total / (s.cell_width * norm);
}

/// <a_i^dag a_j> / (eps <psi|psi>)
inline Complex fock_hopping(const TruncatedFock& s, std::size_t i, std::size_t j) {
  if (i >= s.cell_count || j >= s.cell_count) throw InputError("fock_hopping: cell index out of range");
  if (i == j) return fock_density(s, i);
  const double norm = s.norm_squared();
  if (!(norm > 0.0)) throw UndefinedValueError("fock_hopping: zero-norm state");
  Complex total{};
  for (Eigen::Index idx = 0; idx < s.amplitudes.size(); ++idx) {
    auto occ = s.occupations(static_cast<std::size_t>(idx));
    if (occ[j] == 0 || occ[i] == s.occupation_cutoff) continue;
    const double factor = std::sqrt(static_cast<double>(occ[j]) * static_cast<double>(occ[i] + 1));
    const Complex ket = s.amplitudes(idx);
    --occ[j];
    ++occ[i];
    const Complex bra = s.amplitudes(static_cast<Eigen::Index>(string_to_index(occ, s.local_dim())));
    total += std::conj(bra) * factor * ket;
  }
  return total / (s.cell_width * norm);
}

/// Uniform grid of n cells on [0, l]; values[i] sits at the cell centre
/// (i + 1/2) l / n and stands for the constant value on that cell.
struct FieldGrid {
  double length = 0.0;
  std::vector<Complex> values;

  std::size_t size() const { return values.size(); }
  double spacing() const { return length / static_cast<double>(values.size()); }
  double position(std::size_t i) const { return (static_cast<double>(i) + 0.5) * spacing(); }

  void validate() const {
    if (!(length > 0.0) || !std::isfinite(length)) throw InputError("FieldGrid: length must be positive");
    if (values.empty()) throw InputError("FieldGrid: at least one sample is required");
    for (const auto& v : values) {
      if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) throw InputError("FieldGrid: non-finite value");
    }
  }

  /// Riemann sum of |Phi|^2 over the cells.
  double norm_squared() const {
    double total = 0.0;
    for (const auto& v : values) total += std::norm(v);
    return total * spacing();
  }
};

}  // namespace cmpslab
