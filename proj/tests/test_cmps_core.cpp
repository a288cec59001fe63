#include <gtest/gtest.h>

#include "test_support.hpp"

using namespace cmpslab;
using testing_support::max_abs;
using testing_support::Rng;

namespace {

Cmps coherent_uniform(double length, Complex phi) {
  return make_uniform_cmps(length, ComplexMatrix::Zero(1, 1), ComplexMatrix::Constant(1, 1, phi),
                           ComplexRowVector::Ones(1), ComplexVector::Ones(1));
}

Complex lattice_norm(const Cmps& c, double eps) {
  const Mps m = discretize(c, eps);
  return inner(m, m);
}

}  // namespace

TEST(Cmps, ValidatesSegments) {
  const ComplexMatrix z = ComplexMatrix::Zero(1, 1);
  const ComplexRowVector one_row = ComplexRowVector::Ones(1);
  const ComplexVector one = ComplexVector::Ones(1);
  EXPECT_THROW(Cmps(1.0, {Segment{0.0, 0.4, z, z}, Segment{0.5, 1.0, z, z}}, one_row, one), InputError);
  EXPECT_THROW(Cmps(1.0, {Segment{0.0, 0.9, z, z}}, one_row, one), InputError);
  ComplexMatrix k(2, 2);
  k << 0.0, 1.0, 0.0, 0.0;
  EXPECT_THROW(make_uniform_cmps(1.0, k, ComplexMatrix::Zero(2, 2), TraceBoundary{}, ComplexVector::Ones(2)), InputError);
  EXPECT_THROW(make_uniform_cmps(1.0, z, ComplexMatrix::Zero(2, 2), TraceBoundary{}, one), DimensionError);
  EXPECT_THROW(make_uniform_cmps(1.0, z, z, one_row, ComplexVector::Zero(1)), InputError);
}

TEST(Cmps, RightBoundaryNormalisedWithoutChangingAmplitudes) {
  Rng rng(1);
  const ComplexMatrix K = rng.hermitian(2), R = rng.matrix(2, 2);
  const ComplexRowVector left = rng.matrix(1, 2);
  const ComplexVector right = rng.matrix(2, 1);
  const Cmps c = make_uniform_cmps(1.0, K, R, left, right);
  EXPECT_NEAR(c.right().norm(), 1.0, 1e-15);
  // Same amplitudes as a chain built directly from the unnormalised boundaries.
  const Mps direct({cell_operators(K, R, 0.25, CellScheme::first_order), cell_operators(K, R, 0.25, CellScheme::first_order),
                    cell_operators(K, R, 0.25, CellScheme::first_order), cell_operators(K, R, 0.25, CellScheme::first_order)},
                   left, right);
  const Mps via = discretize(c, 0.25);
  for (std::size_t idx = 0; idx < 16; ++idx) {
    auto j = index_to_string(idx, 2, 4);
    auto reversed = j;
    std::reverse(reversed.begin(), reversed.end());
    EXPECT_LE(std::abs(amplitude(via, j) - amplitude(direct, reversed)), 1e-13);
  }
}

TEST(Cmps, SegmentLookup) {
  Rng rng(2);
  const Cmps c = rng.cmps(2, 1.0, 4);
  EXPECT_EQ(c.segment_index(0.0), 0u);
  EXPECT_EQ(c.segment_index(0.25), 1u);
  EXPECT_EQ(c.segment_index(1.0), 3u);
  EXPECT_THROW(c.segment_index(1.5), InputError);
  EXPECT_THROW(c.segment_index(-0.1), InputError);
}

TEST(Discretize, EmptyFieldIsVacuum) {
  Rng rng(3);
  const ComplexRowVector left = rng.matrix(1, 2);
  const Cmps c = make_uniform_cmps(1.0, ComplexMatrix::Zero(2, 2), ComplexMatrix::Zero(2, 2), left, rng.matrix(2, 1));
  const Mps m = discretize(c, 0.25);
  for (const auto& site : m.sites()) {
    EXPECT_LE(max_abs(site[0] - identity(2)), 0.0);
    EXPECT_LE(max_abs(site[1]), 0.0);
  }
  const ComplexVector v = state_vector(m);
  EXPECT_LE(std::abs(v(0) - (c.left_vector() * c.right())(0, 0)), 1e-15);
  EXPECT_LE(v.tail(v.size() - 1).norm(), 0.0);
}

TEST(Discretize, ScalarRecipe) {
  const Complex phi(0.7, -0.4);
  const double eps = 0.125;
  const Mps m = discretize(coherent_uniform(1.0, phi), eps);
  EXPECT_LE(std::abs(m.site(0)[0](0, 0) - (1.0 - 0.5 * eps * std::norm(phi))), 1e-15);
  EXPECT_LE(std::abs(m.site(0)[1](0, 0) - std::sqrt(eps) * phi), 1e-15);
}

TEST(Discretize, ExactSchemeMatchesOracle) {
  Rng rng(4);
  for (int rep = 0; rep < 3; ++rep) {
    const Cmps c = rng.cmps(2, 1.2, 3);
    const double eps = 0.2;
    const ComplexVector v = state_vector(discretize(c, eps, CellScheme::exact_propagator, 1));
    const auto oracle = exact_state_from_cmps(c, eps, 1);
    EXPECT_LE(max_abs(v - oracle.amplitudes), 1e-12);
  }
}

TEST(Discretize, FirstOrderAgreesWithOracleToSecondOrder) {
  Rng rng(5);
  const Cmps c = rng.cmps(2, 0.5, 1);
  // Per-cell disagreement is O(eps^2); the total over N = l/eps cells is O(eps).
  std::vector<double> err;
  for (double eps : {0.125, 0.0625}) {
    const ComplexVector v = state_vector(discretize(c, eps));
    err.push_back((v - exact_state_from_cmps(c, eps, 1).amplitudes).norm());
  }
  EXPECT_GT(err[0] / err[1], 1.6);
}

TEST(Discretize, Errors) {
  Rng rng(6);
  const Cmps c = rng.cmps(2, 1.0, 2);
  EXPECT_THROW(discretize(c, 0.3), InputError);
  EXPECT_THROW(discretize(c, -0.1), InputError);
  EXPECT_THROW(discretize(rng.cmps(2, 1.0, 1, true), 0.25), UnsupportedError);
  EXPECT_THROW(discretize(c, 1e-5), ResourceError);
}

TEST(TransferGenerator, ZeroAndTracePreserving) {
  EXPECT_LE(max_abs(transfer_generator(ComplexMatrix::Zero(3, 3), ComplexMatrix::Zero(3, 3))), 0.0);
  Rng rng(7);
  for (int rep = 0; rep < 20; ++rep) {
    const ComplexMatrix L = transfer_generator(rng.hermitian(3), rng.matrix(3, 3));
    const ComplexMatrix drho = unvectorize(L * vectorize(rng.matrix(3, 3)), 3);
    EXPECT_LE(std::abs(drho.trace()), 1e-13);
  }
  EXPECT_THROW(transfer_generator(rng.matrix(2, 2), rng.matrix(2, 2)), InputError);
}

TEST(TransferGenerator, MatchesLindbladFormula) {
  Rng rng(8);
  const ComplexMatrix K = rng.hermitian(3), R = rng.matrix(3, 3), rho = rng.matrix(3, 3);
  const ComplexMatrix expected =
      -kI * (K * rho - rho * K) + R * rho * R.adjoint() - 0.5 * (R.adjoint() * R * rho + rho * R.adjoint() * R);
  EXPECT_LE(max_abs(unvectorize(transfer_generator(K, R) * vectorize(rho), 3) - expected), 1e-13);
}

TEST(TransferGenerator, LatticeTransferConvergesFirstOrder) {
  Rng rng(9);
  const ComplexMatrix K = rng.hermitian(2), R = rng.matrix(2, 2);
  const double l = 1.0;
  const ComplexMatrix exact = matrix_exponential(transfer_generator(K, R) * l);
  std::vector<double> err;
  for (int n : {16, 32, 64}) {
    const double eps = l / n;
    ComplexMatrix t = identity(4);
    const ComplexMatrix cell = doubled_transfer(cell_operators(K, R, eps, CellScheme::first_order));
    for (int k = 0; k < n; ++k) t = cell * t;
    err.push_back(max_abs(t - exact));
  }
  EXPECT_NEAR(err[0] / err[1], 2.0, 0.2);
  EXPECT_NEAR(err[1] / err[2], 2.0, 0.1);
}

TEST(NormSquared, TraceBoundaryIsOne) {
  Rng rng(10);
  for (int rep = 0; rep < 10; ++rep) EXPECT_NEAR(norm_squared(rng.cmps(3, 1.5, 3, true)), 1.0, 1e-10);
}

TEST(NormSquared, CoherentIsOne) { EXPECT_NEAR(norm_squared(coherent_uniform(2.0, {0.8, 0.3})), 1.0, 1e-12); }

TEST(NormSquared, MatchesRichardsonExtrapolatedLattice) {
  Rng rng(11);
  for (int rep = 0; rep < 3; ++rep) {
    const Cmps c = rng.cmps(2, 1.0, 1, false, 0.5);
    // Error expands in integer powers of eps; eliminate the first two terms.
    const double a = lattice_norm(c, 1.0 / 32).real(), b = lattice_norm(c, 1.0 / 64).real(),
                 d = lattice_norm(c, 1.0 / 128).real();
    const double extrapolated = (8.0 * d - 6.0 * b + a) / 3.0;
    EXPECT_NEAR(norm_squared(c), extrapolated, 1e-6 * std::max(1.0, extrapolated));
  }
}

TEST(Density, ZeroAndCoherent) {
  const Cmps empty = make_uniform_cmps(1.0, ComplexMatrix::Identity(2, 2), ComplexMatrix::Zero(2, 2),
                                       ComplexRowVector::Ones(2), ComplexVector::Ones(2));
  for (double n : density_profile(empty, {0.0, 0.3, 1.0})) EXPECT_EQ(n, 0.0);
  const Cmps c(1.0,
               {Segment{0.0, 0.5, ComplexMatrix::Zero(1, 1), ComplexMatrix::Constant(1, 1, Complex(0.6, 0.2))},
                Segment{0.5, 1.0, ComplexMatrix::Zero(1, 1), ComplexMatrix::Constant(1, 1, Complex(-1.1, 0.0))}},
               ComplexRowVector::Ones(1), ComplexVector::Ones(1));
  const auto d = density_profile(c, {0.1, 0.49, 0.5, 0.9});
  EXPECT_NEAR(d[0], 0.4, 1e-12);
  EXPECT_NEAR(d[1], 0.4, 1e-12);
  EXPECT_NEAR(d[2], 1.21, 1e-12);
  EXPECT_NEAR(d[3], 1.21, 1e-12);
  EXPECT_THROW(density_profile(c, {1.01}), InputError);
}

TEST(Density, DiscreteLevelMatchesOracle) {
  Rng rng(12);
  for (int rep = 0; rep < 4; ++rep) {
    const Cmps c = rng.cmps(2, 1.0, 2);
    const double eps = 0.25;
    const auto oracle = exact_state_from_cmps(c, eps, 1);
    for (std::size_t k = 0; k < 4; ++k) {
      const double x = (static_cast<double>(k) + 0.5) * eps;
      const Complex lattice = lattice_value(c, eps, Observable::density(x), CellScheme::exact_propagator, 1);
      EXPECT_NEAR(lattice.real(), fock_density(oracle, k), 1e-10);
      EXPECT_NEAR(lattice.imag(), 0.0, 1e-12);
    }
    EXPECT_NEAR(lattice_value(c, eps, Observable::norm(), CellScheme::exact_propagator, 1).real(),
                oracle.norm_squared(), 1e-10 * oracle.norm_squared());
  }
}

TEST(TwoPoint, ZeroAndCoherent) {
  const Cmps empty = make_uniform_cmps(1.0, ComplexMatrix::Identity(2, 2), ComplexMatrix::Zero(2, 2),
                                       ComplexRowVector::Ones(2), ComplexVector::Ones(2));
  EXPECT_EQ(two_point(empty, 0.2, 0.7), Complex{});
  const Complex a(0.6, 0.2), b(-0.3, 0.9);
  const Cmps c(1.0,
               {Segment{0.0, 0.5, ComplexMatrix::Zero(1, 1), ComplexMatrix::Constant(1, 1, a)},
                Segment{0.5, 1.0, ComplexMatrix::Zero(1, 1), ComplexMatrix::Constant(1, 1, b)}},
               ComplexRowVector::Ones(1), ComplexVector::Ones(1));
  EXPECT_LE(std::abs(two_point(c, 0.2, 0.7) - std::conj(a) * b), 1e-12);
  EXPECT_LE(std::abs(two_point(c, 0.1, 0.3) - std::norm(a)), 1e-12);
  EXPECT_THROW(two_point(c, 0.7, 0.2), InputError);
  EXPECT_THROW(two_point(c, 0.5, 0.5), InputError);
}

TEST(TwoPoint, DiscreteLevelMatchesOracle) {
  Rng rng(13);
  for (int rep = 0; rep < 3; ++rep) {
    const Cmps c = rng.cmps(2, 1.0, 2);
    const double eps = 0.25;
    const auto oracle = exact_state_from_cmps(c, eps, 1);
    for (std::size_t i = 0; i < 4; ++i) {
      for (std::size_t j = i + 1; j < 4; ++j) {
        const double x = (static_cast<double>(i) + 0.5) * eps, y = (static_cast<double>(j) + 0.5) * eps;
        const Complex lattice = lattice_value(c, eps, Observable::two_point(x, y), CellScheme::exact_propagator, 1);
        EXPECT_LE(std::abs(lattice - fock_hopping(oracle, i, j)), 1e-10);
      }
    }
  }
}

TEST(TwoPoint, ContinuumLimitOfLattice) {
  Rng rng(14);
  const Cmps c = rng.cmps(2, 1.0, 1, false, 0.7);
  const Complex ref = two_point(c, 0.25, 0.75);
  std::vector<double> err;
  for (double eps : {1.0 / 16, 1.0 / 32, 1.0 / 64}) {
    err.push_back(std::abs(lattice_value(c, eps, Observable::two_point(0.25, 0.75)) - ref));
  }
  EXPECT_LT(err[2], err[0]);
  EXPECT_NEAR(std::log2(err[1] / err[2]), 1.0, 0.25);
}

TEST(Lindblad, TraceAndPositivityAlongEvolution) {
  Rng rng(15);
  for (int rep = 0; rep < 5; ++rep) {
    const Cmps c = rng.cmps(3, 2.0, 4, true);
    std::vector<double> points;
    for (int k = 0; k < 100; ++k) points.push_back(2.0 * k / 99.0);
    for (const auto& rho : density_matrix_trajectory(c, points)) {
      EXPECT_NEAR(rho.trace(), 1.0, 1e-10);
      EXPECT_GE(rho.min_eigenvalue(), -1e-10);
      EXPECT_LE(rho.hermiticity_defect(), 1e-10);
    }
  }
}

TEST(Convergence, EmptyFieldIsExact) {
  const Cmps c = make_uniform_cmps(1.0, ComplexMatrix::Zero(2, 2), ComplexMatrix::Zero(2, 2),
                                   ComplexRowVector::Ones(2), ComplexVector::Ones(2));
  const auto t = convergence_study(c, Observable::norm(), {0.25, 0.125, 0.0625});
  EXPECT_TRUE(t.exact);
}

TEST(Convergence, CoherentNormHalvesError) {
  const auto t = convergence_study(coherent_uniform(1.0, {0.9, 0.0}), Observable::norm(), {1.0 / 16, 1.0 / 32, 1.0 / 64});
  ASSERT_FALSE(t.exact);
  for (std::size_t k = 1; k < t.rows.size(); ++k) EXPECT_NEAR(t.rows[k - 1].error / t.rows[k].error, 2.0, 0.1);
}

TEST(Convergence, RandomDensityOrder) {
  Rng rng(16);
  const Cmps c = rng.cmps(2, 1.0, 1, false, 0.7);
  const auto t = convergence_study(c, Observable::density(0.5), {1.0 / 16, 1.0 / 32, 1.0 / 64, 1.0 / 128});
  EXPECT_TRUE(t.orders_within(0.8, 1.2));
}

TEST(Convergence, Errors) {
  Rng rng(17);
  const Cmps c = rng.cmps(2, 1.0, 1);
  EXPECT_THROW(convergence_study(c, Observable::norm(), {0.5, 0.25}), InputError);
  EXPECT_THROW(convergence_study(c, Observable::norm(), {0.25, 0.5, 0.125}), InputError);
}

TEST(Gauge, ObservablesInvariant) {
  Rng rng(18);
  for (int rep = 0; rep < 10; ++rep) {
    const Cmps c = rng.cmps(3, 1.0, 2, rep % 3 == 0);
    const Cmps g = gauge_transform(c, rng.unitary(3));
    EXPECT_NEAR(norm_squared(g), norm_squared(c), 1e-10 * std::max(1.0, norm_squared(c)));
    const auto dc = density_profile(c, {0.1, 0.5, 0.9});
    const auto dg = density_profile(g, {0.1, 0.5, 0.9});
    for (int k = 0; k < 3; ++k) EXPECT_NEAR(dg[k], dc[k], 1e-10 * std::max(1.0, std::abs(dc[k])));
    EXPECT_LE(std::abs(two_point(g, 0.2, 0.8) - two_point(c, 0.2, 0.8)), 1e-10);
  }
  EXPECT_THROW(gauge_transform(rng.cmps(2, 1.0, 1), 2.0 * identity(2)), InputError);
}

TEST(Refine, LeavesObservablesUnchanged) {
  Rng rng(19);
  const Cmps c = rng.cmps(2, 1.0, 2);
  const Cmps r = refine(c, {0.25, 0.75, 0.5});
  EXPECT_EQ(r.segments().size(), 4u);
  EXPECT_NEAR(norm_squared(r), norm_squared(c), 1e-12 * norm_squared(c));
  EXPECT_NEAR(density_profile(r, {0.3}).front(), density_profile(c, {0.3}).front(), 1e-12);
}

TEST(Ensemble, TraceBoundaryLatticeNormApproachesOne) {
  Rng rng(20);
  const Cmps c = rng.cmps(2, 1.0, 1, true, 0.5);
  const auto e = discretize_ensemble(c, 1.0 / 64);
  EXPECT_EQ(e.size(), 2u);
  EXPECT_NEAR(ensemble_expectation(e, {}).real(), 1.0, 0.05);
}
