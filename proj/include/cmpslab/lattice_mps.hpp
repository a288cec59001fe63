#pragma once

// Open-boundary matrix product states on a finite chain:
//
//   |psi> = sum_j <wL| A^{j_1} A^{j_2} ... A^{j_n} |wR> |j_1 j_2 ... j_n>
//
// Physical strings are ordered lexicographically with site 1 the most
// significant digit.

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "cmpslab/errors.hpp"
#include "cmpslab/linalg.hpp"

namespace cmpslab {

/// The d matrices A^{0..d-1} of one site, all D_{k-1} x D_k.
using SiteTensor = std::vector<ComplexMatrix>;

inline constexpr double kMaxPathCount = 1e7;
inline constexpr double kMaxStateVectorSize = 1e6;

class Mps {
 public:
  Mps(std::vector<SiteTensor> sites, ComplexRowVector left, ComplexVector right)
      : sites_(std::move(sites)), left_(std::move(left)), right_(std::move(right)) {
    validate();
  }

  std::size_t site_count() const { return sites_.size(); }
  std::size_t phys_dim() const { return sites_.empty() ? 0 : sites_.front().size(); }
  const std::vector<SiteTensor>& sites() const { return sites_; }
  const SiteTensor& site(std::size_t k) const { return sites_.at(k); }
  const ComplexRowVector& left() const { return left_; }
  const ComplexVector& right() const { return right_; }

  /// D_0, D_1, ..., D_n.
  std::vector<Eigen::Index> bond_dims() const {
    std::vector<Eigen::Index> dims{left_.size()};
    for (const auto& s : sites_) dims.push_back(s.front().cols());
    return dims;
  }

 private:
  void validate() const {
    if (sites_.empty()) throw InputError("Mps: at least one site is required");
    const std::size_t d = sites_.front().size();
    if (d == 0) throw InputError("Mps: physical dimension must be positive");
    Eigen::Index bond = left_.size();
    for (std::size_t k = 0; k < sites_.size(); ++k) {
      const auto& s = sites_[k];
      if (s.size() != d) {
        throw DimensionError("Mps: site " + std::to_string(k) + " has " + std::to_string(s.size()) +
                             " slices, expected " + std::to_string(d));
      }
      const Eigen::Index cols = s.front().cols();
      for (const auto& a : s) {
        if (a.rows() != bond || a.cols() != cols) {
          throw DimensionError("Mps: bond dimensions do not chain at site " + std::to_string(k));
        }
      }
      bond = cols;
    }
    if (right_.size() != bond) throw DimensionError("Mps: right boundary does not match last bond");
  }

  std::vector<SiteTensor> sites_;
  ComplexRowVector left_;
  ComplexVector right_;
};

namespace detail {

inline void check_string(const Mps& m, std::span<const std::size_t> j) {
  if (j.size() != m.site_count()) {
    throw InputError("occupation string has length " + std::to_string(j.size()) + ", expected " +
                     std::to_string(m.site_count()));
  }
  for (std::size_t k = 0; k < j.size(); ++k) {
    if (j[k] >= m.phys_dim()) {
      throw InputError("physical index " + std::to_string(j[k]) + " out of range at site " +
                       std::to_string(k));
    }
  }
}

inline double checked_power(std::size_t base, std::size_t exponent) {
  double total = 1.0;
  for (std::size_t k = 0; k < exponent; ++k) total *= static_cast<double>(base);
  return total;
}

}  // namespace detail

/// Digits of `index` in base `base`, most significant first.
inline std::vector<std::size_t> index_to_string(std::size_t index, std::size_t base, std::size_t length) {
  std::vector<std::size_t> digits(length);
  for (std::size_t k = length; k-- > 0;) {
    digits[k] = index % base;
    index /= base;
  }
  return digits;
}

inline std::size_t string_to_index(std::span<const std::size_t> digits, std::size_t base) {
  std::size_t index = 0;
  for (std::size_t d : digits) index = index * base + d;
  return index;
}

/// <wL| A^{j_1} ... A^{j_n} |wR> by sequential vector-matrix products.
inline Complex amplitude(const Mps& m, std::span<const std::size_t> j) {
  detail::check_string(m, j);
  ComplexRowVector v = m.left();
  for (std::size_t k = 0; k < j.size(); ++k) v = v * m.site(k)[j[k]];
  return (v * m.right())(0, 0);
}

/// Same amplitude as an explicit sum over every auxiliary index assignment
/// (alpha_0, ..., alpha_n). Each path contributes the product of its tensor
/// entries; this is exp(iS) with S = sum -i log A written without the logarithm,
/// so vanishing entries are plain zero factors.
inline Complex path_sum_amplitude(const Mps& m, std::span<const std::size_t> j) {
  detail::check_string(m, j);
  const auto dims = m.bond_dims();
  double paths = 1.0;
  for (auto d : dims) paths *= static_cast<double>(d);
  if (paths > kMaxPathCount) {
    throw ResourceError("path_sum_amplitude: " + std::to_string(paths) + " paths exceed the guard of 1e7");
  }

  const std::size_t n = m.site_count();
  std::vector<Eigen::Index> alpha(n + 1, 0);
  Complex total{0.0, 0.0};
  while (true) {
    Complex weight = m.left()(alpha[0]);
    for (std::size_t k = 0; k < n; ++k) weight *= m.site(k)[j[k]](alpha[k], alpha[k + 1]);
    weight *= m.right()(alpha[n]);
    total += weight;

    std::size_t pos = n + 1;
    while (pos > 0) {
      --pos;
      if (++alpha[pos] < dims[pos]) break;
      alpha[pos] = 0;
      if (pos == 0) return total;
    }
  }
}

/// All d^n amplitudes in lexicographic order.
inline ComplexVector state_vector(const Mps& m) {
  const std::size_t d = m.phys_dim();
  const std::size_t n = m.site_count();
  const double size = detail::checked_power(d, n);
  if (size > kMaxStateVectorSize) {
    throw ResourceError("state_vector: d^n = " + std::to_string(size) + " exceeds the guard of 1e6");
  }
  // Grow a (strings x bond) block site by site; appending a site makes it the
  // least significant digit.
  ComplexMatrix block = m.left();
  for (std::size_t k = 0; k < n; ++k) {
    const auto& s = m.site(k);
    ComplexMatrix next(block.rows() * static_cast<Eigen::Index>(d), s.front().cols());
    for (Eigen::Index r = 0; r < block.rows(); ++r) {
      for (std::size_t j = 0; j < d; ++j) {
        next.row(r * static_cast<Eigen::Index>(d) + static_cast<Eigen::Index>(j)) = block.row(r) * s[j];
      }
    }
    block = std::move(next);
  }
  return block * m.right();
}

inline void require_compatible(const Mps& a, const Mps& b, const char* what) {
  if (a.site_count() != b.site_count() || a.phys_dim() != b.phys_dim()) {
    throw InputError(std::string(what) + ": site counts or physical dimensions differ");
  }
}

/// <a|b> by left-to-right contraction of the doubled chain.
inline Complex inner(const Mps& a, const Mps& b) {
  require_compatible(a, b, "inner");
  ComplexMatrix env = a.left().adjoint() * b.left();
  for (std::size_t k = 0; k < a.site_count(); ++k) {
    ComplexMatrix next = ComplexMatrix::Zero(a.site(k).front().cols(), b.site(k).front().cols());
    for (std::size_t j = 0; j < a.phys_dim(); ++j) next += a.site(k)[j].adjoint() * env * b.site(k)[j];
    env = std::move(next);
  }
  return (a.right().adjoint() * env * b.right())(0, 0);
}

/// <a| O_1 (x) O_2 (x) ... |b> where `ops` maps a site to its d x d operator
/// (identity elsewhere). O[j', j] = <j'|O|j>.
inline Complex matrix_element(const Mps& a, const std::map<std::size_t, ComplexMatrix>& ops, const Mps& b) {
  require_compatible(a, b, "matrix_element");
  const std::size_t d = a.phys_dim();
  for (const auto& [site, op] : ops) {
    if (site >= a.site_count()) throw InputError("matrix_element: site index out of range");
    if (op.rows() != static_cast<Eigen::Index>(d) || op.cols() != static_cast<Eigen::Index>(d)) {
      throw DimensionError("matrix_element: operator does not match the physical dimension");
    }
  }
  ComplexMatrix env = a.left().adjoint() * b.left();
  for (std::size_t k = 0; k < a.site_count(); ++k) {
    ComplexMatrix next = ComplexMatrix::Zero(a.site(k).front().cols(), b.site(k).front().cols());
    const auto it = ops.find(k);
    if (it == ops.end()) {
      for (std::size_t j = 0; j < d; ++j) next += a.site(k)[j].adjoint() * env * b.site(k)[j];
    } else {
      const ComplexMatrix& op = it->second;
      for (std::size_t jb = 0; jb < d; ++jb) {
        for (std::size_t jk = 0; jk < d; ++jk) {
          const Complex w = op(static_cast<Eigen::Index>(jb), static_cast<Eigen::Index>(jk));
          if (w == Complex{}) continue;
          next += w * (a.site(k)[jb].adjoint() * env * b.site(k)[jk]);
        }
      }
    }
    env = std::move(next);
  }
  return (a.right().adjoint() * env * b.right())(0, 0);
}

/// sum_j conj(A^j) (x) A^j acting on column-stacked vec(rho) as rho -> sum_j A^j rho A^j^dagger.
inline ComplexMatrix doubled_transfer(const SiteTensor& slices) {
  ComplexMatrix t = ComplexMatrix::Zero(slices.front().rows() * slices.front().rows(),
                                        slices.front().cols() * slices.front().cols());
  for (const auto& a : slices) t += kron(a.conjugate(), a);
  return t;
}

}  // namespace cmpslab
