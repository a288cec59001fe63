#pragma once

// Dense complex linear algebra shared by all modules.

#include <complex>
#include <cstddef>
#include <string>

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

#include "cmpslab/errors.hpp"

namespace cmpslab {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using ComplexRowVector = Eigen::RowVectorXcd;

inline constexpr Complex kI{0.0, 1.0};
inline constexpr double kHermitianTolerance = 1e-12;

inline bool is_square(const ComplexMatrix& m) { return m.rows() == m.cols(); }

inline bool is_hermitian(const ComplexMatrix& m, double tol = kHermitianTolerance) {
  if (!is_square(m)) return false;
  if (m.size() == 0) return true;
  return (m - m.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

inline void require_square(const ComplexMatrix& m, const char* what) {
  if (!is_square(m)) {
    throw DimensionError(std::string(what) + ": expected a square matrix, got " +
                         std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
  }
}

/// exp(M) by Pade scaling-and-squaring.
inline ComplexMatrix matrix_exponential(const ComplexMatrix& m) {
  require_square(m, "matrix_exponential");
  if (m.size() == 0) return m;
  return m.exp();
}

/// (A (x) B)[i*rows(B) + k, j*cols(B) + l] = A[i,j] * B[k,l]
inline ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  return Eigen::kroneckerProduct(a, b).eval();
}

/// Block-diagonal A (+) B.
inline ComplexMatrix direct_sum(const ComplexMatrix& a, const ComplexMatrix& b) {
  require_square(a, "direct_sum");
  require_square(b, "direct_sum");
  const Eigen::Index n = a.rows() + b.rows();
  ComplexMatrix out = ComplexMatrix::Zero(n, n);
  out.topLeftCorner(a.rows(), a.cols()) = a;
  out.bottomRightCorner(b.rows(), b.cols()) = b;
  return out;
}

inline ComplexVector direct_sum(const ComplexVector& a, const ComplexVector& b) {
  ComplexVector out(a.size() + b.size());
  out << a, b;
  return out;
}

inline ComplexRowVector direct_sum(const ComplexRowVector& a, const ComplexRowVector& b) {
  ComplexRowVector out(a.size() + b.size());
  out << a, b;
  return out;
}

inline ComplexMatrix identity(Eigen::Index n) { return ComplexMatrix::Identity(n, n); }

/// Truncated bosonic lowering operator on {|0>,...,|cutoff>}.
inline ComplexMatrix lowering_operator(std::size_t cutoff) {
  const auto n = static_cast<Eigen::Index>(cutoff + 1);
  ComplexMatrix a = ComplexMatrix::Zero(n, n);
  for (Eigen::Index k = 1; k < n; ++k) a(k - 1, k) = std::sqrt(static_cast<double>(k));
  return a;
}

/// Column-stacking vectorisation, matching Eigen's storage order.
inline ComplexVector vectorize(const ComplexMatrix& m) {
  return Eigen::Map<const ComplexVector>(m.data(), m.size());
}

inline ComplexMatrix unvectorize(const ComplexVector& v, Eigen::Index rows) {
  return Eigen::Map<const ComplexMatrix>(v.data(), rows, v.size() / rows);
}

}  // namespace cmpslab
