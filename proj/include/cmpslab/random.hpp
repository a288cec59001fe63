#pragma once

// Seeded random instances for verification runs.

#include <cstdint>
#include <random>
#include <vector>

#include "cmpslab/cmps_core.hpp"
#include "cmpslab/lattice_mps.hpp"
#include "cmpslab/linalg.hpp"

namespace cmpslab {

class InstanceGenerator {
 public:
  explicit InstanceGenerator(std::uint64_t seed) : engine_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(engine_); }
  std::size_t integer(std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(engine_);
  }
  Complex complex(double scale = 1.0) { return {uniform(-scale, scale), uniform(-scale, scale)}; }

  ComplexMatrix matrix(Eigen::Index rows, Eigen::Index cols, double scale = 1.0) {
    ComplexMatrix m(rows, cols);
    for (Eigen::Index c = 0; c < cols; ++c) {
      for (Eigen::Index r = 0; r < rows; ++r) m(r, c) = complex(scale);
    }
    return m;
  }

  ComplexMatrix hermitian(Eigen::Index d, double scale = 1.0) {
    const ComplexMatrix m = matrix(d, d, scale);
    return 0.5 * (m + m.adjoint());
  }

  /// Haar-distributed unitary from the QR decomposition of a Gaussian matrix.
  ComplexMatrix unitary(Eigen::Index d) {
    std::normal_distribution<double> normal;
    ComplexMatrix z(d, d);
    for (Eigen::Index c = 0; c < d; ++c) {
      for (Eigen::Index r = 0; r < d; ++r) z(r, c) = Complex(normal(engine_), normal(engine_));
    }
    Eigen::HouseholderQR<ComplexMatrix> qr(z);
    ComplexMatrix q = qr.householderQ();
    const ComplexMatrix rmat = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Eigen::Index k = 0; k < d; ++k) q.col(k) *= rmat(k, k) / std::abs(rmat(k, k));
    return q;
  }

  /// Open chain with n sites, bond dimensions in [1, max_bond], physical dimension d.
  Mps mps(std::size_t n, std::size_t max_bond, std::size_t d) {
    std::vector<Eigen::Index> bonds;
    for (std::size_t k = 0; k <= n; ++k) bonds.push_back(static_cast<Eigen::Index>(integer(1, max_bond)));
    std::vector<SiteTensor> sites;
    for (std::size_t k = 0; k < n; ++k) {
      SiteTensor s;
      for (std::size_t j = 0; j < d; ++j) s.push_back(matrix(bonds[k], bonds[k + 1]));
      sites.push_back(std::move(s));
    }
    return Mps(std::move(sites), matrix(1, bonds.front()), matrix(bonds.back(), 1));
  }

  /// cMPS of bond dimension D on [0, l] with `pieces` equal segments.
  Cmps cmps(Eigen::Index D, double length, std::size_t pieces, bool trace_left = false, double scale = 1.0) {
    std::vector<Segment> segs;
    for (std::size_t k = 0; k < pieces; ++k) {
      const double from = length * static_cast<double>(k) / static_cast<double>(pieces);
      const double to = k + 1 == pieces ? length : length * static_cast<double>(k + 1) / static_cast<double>(pieces);
      segs.push_back({from, to, hermitian(D, scale), matrix(D, D, scale)});
    }
    LeftBoundary left = TraceBoundary{};
    if (!trace_left) left = ComplexRowVector(matrix(1, D));
    return Cmps(length, std::move(segs), std::move(left), matrix(D, 1));
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace cmpslab
