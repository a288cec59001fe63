#include <gtest/gtest.h>

#include "test_support.hpp"

using namespace cmpslab;
using testing_support::dense_oracle;
using testing_support::max_abs;
using testing_support::Rng;

namespace {

Mps identity_chain(std::size_t n, Eigen::Index D, std::size_t d) {
  SiteTensor site(d, identity(D) / static_cast<double>(d));
  return Mps(std::vector<SiteTensor>(n, site), ComplexRowVector::Unit(D, 0), ComplexVector::Unit(D, 0));
}

}  // namespace

TEST(Amplitude, IdentityTensors) {
  const Mps m = identity_chain(3, 2, 3);
  for (std::size_t idx = 0; idx < 27; ++idx) {
    EXPECT_NEAR(std::abs(amplitude(m, index_to_string(idx, 3, 3)) - 1.0 / 27.0), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(path_sum_amplitude(m, index_to_string(idx, 3, 3)) - 1.0 / 27.0), 0.0, 1e-15);
  }
}

TEST(Amplitude, AnnihilatingSlice) {
  Rng rng(1);
  std::vector<SiteTensor> sites;
  for (int k = 0; k < 3; ++k) sites.push_back({rng.matrix(2, 2), ComplexMatrix::Zero(2, 2)});
  const Mps m(sites, rng.matrix(1, 2), rng.matrix(2, 1));
  const std::vector<std::size_t> j{0, 1, 0};
  EXPECT_EQ(amplitude(m, j), Complex{});
  EXPECT_EQ(path_sum_amplitude(m, j), Complex{});
}

TEST(Amplitude, MatchesNestedLoopContraction) {
  Rng rng(2);
  std::vector<SiteTensor> sites;
  for (int k = 0; k < 3; ++k) sites.push_back({rng.matrix(2, 2), rng.matrix(2, 2)});
  const Mps m(sites, rng.matrix(1, 2), rng.matrix(2, 1));
  for (std::size_t idx = 0; idx < 8; ++idx) {
    const auto j = index_to_string(idx, 2, 3);
    Complex oracle{};
    for (int a0 = 0; a0 < 2; ++a0)
      for (int a1 = 0; a1 < 2; ++a1)
        for (int a2 = 0; a2 < 2; ++a2)
          for (int a3 = 0; a3 < 2; ++a3)
            oracle += m.left()(a0) * m.site(0)[j[0]](a0, a1) * m.site(1)[j[1]](a1, a2) * m.site(2)[j[2]](a2, a3) *
                      m.right()(a3);
    EXPECT_LE(std::abs(amplitude(m, j) - oracle), 1e-13);
  }
}

TEST(Amplitude, RejectsBadStrings) {
  const Mps m = identity_chain(2, 2, 2);
  EXPECT_THROW(amplitude(m, std::vector<std::size_t>{0, 2}), InputError);
  EXPECT_THROW(amplitude(m, std::vector<std::size_t>{0}), InputError);
}

TEST(PathSum, SinglePathForScalarBonds) {
  Rng rng(3);
  const Mps m = rng.mps(4, 1, 2);
  const std::vector<std::size_t> j{1, 0, 1, 1};
  Complex product = m.left()(0) * m.right()(0);
  for (std::size_t k = 0; k < 4; ++k) product *= m.site(k)[j[k]](0, 0);
  EXPECT_LE(std::abs(path_sum_amplitude(m, j) - product), 1e-14);
}

TEST(PathSum, AgreesWithAmplitudeAndOracle) {
  Rng rng(4);
  for (int inst = 0; inst < 50; ++inst) {
    const Mps m = rng.mps(rng.pick(1, 4), rng.pick(1, 3), rng.pick(1, 3));
    const ComplexVector oracle = dense_oracle(m);
    const ComplexVector dense = state_vector(m);
    for (Eigen::Index idx = 0; idx < oracle.size(); ++idx) {
      const auto j = index_to_string(static_cast<std::size_t>(idx), m.phys_dim(), m.site_count());
      const Complex a = amplitude(m, j);
      const Complex p = path_sum_amplitude(m, j);
      EXPECT_LE(std::abs(a - p), 1e-11);
      EXPECT_LE(std::abs(a - oracle(idx)), 1e-11);
      EXPECT_LE(std::abs(dense(idx) - oracle(idx)), 1e-11);
    }
  }
}

TEST(PathSum, GuardTrips) {
  std::vector<SiteTensor> sites(6, SiteTensor{ComplexMatrix::Zero(20, 20)});
  const Mps m(sites, ComplexRowVector::Zero(20), ComplexVector::Zero(20));
  EXPECT_THROW(path_sum_amplitude(m, std::vector<std::size_t>(6, 0)), ResourceError);
}

TEST(StateVector, SingleSite) {
  Rng rng(5);
  const Mps m = rng.mps(1, 3, 3);
  const ComplexVector v = state_vector(m);
  for (std::size_t j = 0; j < 3; ++j) {
    EXPECT_LE(std::abs(v(static_cast<Eigen::Index>(j)) - (m.left() * m.site(0)[j] * m.right())(0, 0)), 1e-14);
  }
}

TEST(StateVector, ProductState) {
  Rng rng(6);
  const Mps m = rng.mps(3, 1, 2);
  ComplexVector expected = ComplexVector::Constant(1, m.left()(0) * m.right()(0));
  for (std::size_t k = 0; k < 3; ++k) {
    ComplexVector local(2);
    for (std::size_t j = 0; j < 2; ++j) local(static_cast<Eigen::Index>(j)) = m.site(k)[j](0, 0);
    expected = kron(expected, local);
  }
  EXPECT_LE(max_abs(state_vector(m) - expected), 1e-14);
}

TEST(StateVector, GuardTrips) {
  std::vector<SiteTensor> sites(7, SiteTensor(8, ComplexMatrix::Zero(1, 1)));
  EXPECT_THROW(state_vector(Mps(sites, ComplexRowVector::Ones(1), ComplexVector::Ones(1))), ResourceError);
}

TEST(Inner, NormMatchesStateVector) {
  Rng rng(7);
  for (int rep = 0; rep < 10; ++rep) {
    const Mps m = rng.mps(4, 3, 2);
    const Complex n = inner(m, m);
    EXPECT_GE(n.real(), 0.0);
    EXPECT_LE(std::abs(n.imag()), 1e-11 * n.real());
    EXPECT_LE(std::abs(n - state_vector(m).squaredNorm()), 1e-11 * std::max(1.0, n.real()));
  }
}

TEST(Inner, PairMatchesDot) {
  Rng rng(8);
  for (int rep = 0; rep < 10; ++rep) {
    const Mps a = rng.mps(3, 3, 2), b = rng.mps(3, 2, 2);
    const Complex dot = state_vector(a).dot(state_vector(b));
    EXPECT_LE(std::abs(inner(a, b) - dot), 1e-11 * std::max(1.0, std::abs(dot)));
  }
}

TEST(Inner, OrthogonalProducts) {
  std::vector<SiteTensor> up(2, SiteTensor{ComplexMatrix::Ones(1, 1), ComplexMatrix::Zero(1, 1)});
  std::vector<SiteTensor> down(2, SiteTensor{ComplexMatrix::Zero(1, 1), ComplexMatrix::Ones(1, 1)});
  const Mps a(up, ComplexRowVector::Ones(1), ComplexVector::Ones(1));
  const Mps b(down, ComplexRowVector::Ones(1), ComplexVector::Ones(1));
  EXPECT_EQ(inner(a, b), Complex{});
}

TEST(Inner, CauchySchwarz) {
  Rng rng(9);
  for (int rep = 0; rep < 30; ++rep) {
    const Mps a = rng.mps(3, 3, 3), b = rng.mps(3, 3, 3);
    EXPECT_LE(std::norm(inner(a, b)), inner(a, a).real() * inner(b, b).real() * (1 + 1e-12));
  }
}

TEST(Inner, ShapeMismatch) {
  Rng rng(10);
  EXPECT_THROW(inner(rng.mps(2, 2, 2), rng.mps(3, 2, 2)), InputError);
  EXPECT_THROW(inner(rng.mps(2, 2, 2), rng.mps(2, 2, 3)), InputError);
}

TEST(Mps, RejectsBrokenChains) {
  EXPECT_THROW(Mps({SiteTensor{ComplexMatrix::Zero(2, 2)}}, ComplexRowVector::Zero(3), ComplexVector::Zero(2)),
               DimensionError);
  EXPECT_THROW(Mps({SiteTensor{ComplexMatrix::Zero(2, 2)}, SiteTensor{ComplexMatrix::Zero(3, 2)}},
                   ComplexRowVector::Zero(2), ComplexVector::Zero(2)),
               DimensionError);
}

TEST(Gauge, BondInsertionLeavesAmplitudes) {
  Rng rng(11);
  for (int rep = 0; rep < 10; ++rep) {
    const Mps m = rng.mps(4, 3, 2);
    const std::size_t bond = rng.pick(0, 2);
    const auto D = m.site(bond).front().cols();
    const ComplexMatrix g = rng.matrix(D, D) + 2.0 * identity(D);
    const ComplexMatrix ginv = g.inverse();
    std::vector<SiteTensor> sites = m.sites();
    for (auto& a : sites[bond]) a = a * g;
    for (auto& a : sites[bond + 1]) a = ginv * a;
    const Mps gauged(sites, m.left(), m.right());
    EXPECT_LE(max_abs(state_vector(gauged) - state_vector(m)), 1e-10);
  }
}

TEST(MatrixElement, MatchesDenseOperators) {
  Rng rng(12);
  const Mps a = rng.mps(3, 2, 3), b = rng.mps(3, 3, 3);
  const ComplexMatrix o1 = rng.matrix(3, 3), o2 = rng.matrix(3, 3);
  const ComplexMatrix op = testing_support::embed_site(o1, 0, 3, 3) * testing_support::embed_site(o2, 2, 3, 3);
  const Complex dense = state_vector(a).dot(op * state_vector(b));
  EXPECT_LE(std::abs(matrix_element(a, {{0, o1}, {2, o2}}, b) - dense), 1e-11 * std::max(1.0, std::abs(dense)));
}

TEST(Strings, RoundTrip) {
  for (std::size_t idx = 0; idx < 81; ++idx) EXPECT_EQ(string_to_index(index_to_string(idx, 3, 4), 3), idx);
  EXPECT_EQ(index_to_string(5, 2, 3), (std::vector<std::size_t>{1, 0, 1}));
}
