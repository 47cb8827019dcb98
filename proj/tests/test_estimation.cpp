#include <gtest/gtest.h>

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <numbers>

#include "qgames/estimation.hpp"
#include "test_util.hpp"

namespace qgames {
namespace {

using testing::max_abs_diff;

constexpr double kPi = std::numbers::pi;

// exp(-i theta J_y) for spin two_j/2 in the basis m = j, j-1, ..., -j.
Matrix rotation_y(int two_j, double theta) {
  const Eigen::Index dim = two_j + 1;
  const double j = two_j / 2.0;
  Matrix raise = Matrix::Zero(dim, dim);
  for (Eigen::Index k = 1; k < dim; ++k) {
    const double m = j - static_cast<double>(k);
    raise(k - 1, k) = std::sqrt(j * (j + 1) - m * (m + 1));
  }
  const Matrix jy = (raise - Matrix(raise.adjoint())) / cplx(0.0, 2.0);
  const Matrix gen = cplx(0.0, -theta) * jy;
  return gen.exp();
}

Direction random_direction(std::mt19937_64& gen) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  return Direction(std::acos(1.0 - 2.0 * u(gen)), 2.0 * kPi * u(gen));
}

TEST(WignerD, SpinHalfIsCosine) {
  for (double theta : {0.0, 0.3, 1.1, 2.0, kPi}) {
    EXPECT_NEAR(wigner_d_top(1, 1, theta), std::cos(theta / 2), 1e-15);
    EXPECT_NEAR(wigner_d_top(1, 1, theta), rotation_y(1, theta)(0, 0).real(), 1e-12);
  }
}

TEST(WignerD, IdentityRotation) {
  for (int two_j = 0; two_j <= 6; ++two_j) {
    for (int two_m = -two_j; two_m <= two_j; two_m += 2) {
      EXPECT_EQ(wigner_d_top(two_j, two_m, 0.0), two_m == two_j ? 1.0 : 0.0);
    }
  }
}

TEST(WignerD, MatchesMatrixExponentialOracle) {
  auto gen = RandomStream(61).engine();
  std::uniform_real_distribution<double> angle(0.0, kPi);
  for (int two_j = 1; two_j <= 8; ++two_j) {
    for (int trial = 0; trial < 5; ++trial) {
      const double theta = trial == 0 ? kPi / 2 : angle(gen);
      const Matrix r = rotation_y(two_j, theta);
      for (int two_m = two_j, row = 0; two_m >= -two_j; two_m -= 2, ++row) {
        EXPECT_NEAR(wigner_d_top(two_j, two_m, theta), r(row, 0).real(), 1e-12);
        EXPECT_NEAR(r(row, 0).imag(), 0.0, 1e-12);
      }
    }
  }
}

TEST(WignerD, InvalidIndices) {
  EXPECT_THROW(wigner_d_top(2, 1, 0.1), IndexError);
  EXPECT_THROW(wigner_d_top(2, 4, 0.1), IndexError);
  EXPECT_THROW(wigner_d_top(-1, 1, 0.1), IndexError);
}

TEST(Direction, Validation) {
  EXPECT_THROW(Direction(-0.1, 0.0), ShapeError);
  EXPECT_THROW(Direction(4.0, 0.0), ShapeError);
  const Direction d(1.0, 7.0);
  EXPECT_GE(d.psi_phase, 0.0);
  EXPECT_LT(d.psi_phase, 2 * kPi);
  const Direction o = Direction(0.4, 1.0).opposite();
  EXPECT_NEAR(std::abs(coherent_qubit(o).amplitudes().dot(coherent_qubit(Direction(0.4, 1.0)).amplitudes())),
              0.0, 1e-15);
}

TEST(MeasurementVector, NorthPole) {
  const auto v1 = measurement_vector(1, Direction(0.0, 0.0));
  EXPECT_EQ(v1.amplitudes()(0), cplx(1.0));
  EXPECT_EQ(v1.amplitudes()(1), cplx(0.0));
  const auto v2 = measurement_vector(2, Direction(0.0, 1.3));
  EXPECT_NEAR(std::abs(v2.amplitudes()(0)), 1.0, 1e-15);
  EXPECT_NEAR(v2.amplitudes().tail(2).norm(), 0.0, 1e-15);
}

TEST(MeasurementVector, MatchesCompressedTensorPower) {
  auto gen = RandomStream(62).engine();
  for (std::size_t n = 1; n <= 5; ++n) {
    const SymBasis basis(2, n);
    for (int i = 0; i < 20; ++i) {
      const Direction dir = random_direction(gen);
      const Vector expected = basis.compress(tensor_power(coherent_qubit(dir), n).amplitudes());
      EXPECT_LE((measurement_vector(n, dir).amplitudes() - expected).norm(), 1e-12);
    }
  }
}

TEST(BuildPovm, AntipodalPairIsProjective) {
  const auto dirs = default_directions(1);
  ASSERT_EQ(dirs.size(), 2u);
  const Povm p = build_povm(1, dirs);
  ASSERT_EQ(p.size(), 2u);
  EXPECT_LE(p.residual(), 1e-15);
  Matrix p0 = Matrix::Zero(2, 2), p1 = Matrix::Zero(2, 2);
  p0(0, 0) = 1.0;
  p1(1, 1) = 1.0;
  EXPECT_LE(max_abs_diff(p.effects()[0], p0), 1e-15);
  EXPECT_LE(max_abs_diff(p.effects()[1], p1), 1e-15);
  const auto w = solve_design_weights(1, dirs);
  EXPECT_NEAR(w.weights(0), 1.0, 1e-15);
  EXPECT_NEAR(w.weights(1), 1.0, 1e-15);
}

TEST(BuildPovm, DefaultDirectionsSolve) {
  for (std::size_t n = 1; n <= 5; ++n) {
    const auto dirs = default_directions(n);
    if (n >= 2) {
      EXPECT_EQ(dirs.size(), (n + 1) * (n + 1));
    }
    for (std::size_t a = 0; a < dirs.size(); ++a) {
      for (std::size_t b = a + 1; b < dirs.size(); ++b) {
        EXPECT_FALSE(dirs[a].theta == dirs[b].theta && dirs[a].psi_phase == dirs[b].psi_phase);
      }
    }
    const auto w = solve_design_weights(n, dirs);
    EXPECT_LE(w.residual, 1e-8);
    EXPECT_GE(w.weights.minCoeff(), 0.0);
    const Povm p = build_povm(n, dirs);
    EXPECT_LE(p.residual(), 1e-8);
  }
}

TEST(BuildPovm, TooFewDirections) {
  EXPECT_THROW(build_povm(1, {Direction(0.0, 0.0)}), IncompletePovm);
  // Enough directions, but all on one hemisphere point: rank deficient.
  EXPECT_THROW(build_povm(2, {Direction(0.1, 0.0), Direction(0.1, 0.0), Direction(0.1, 0.0)}),
               IncompletePovm);
}

TEST(Povm, ConstructorChecks) {
  Matrix half = Matrix::Identity(2, 2) / 2.0;
  EXPECT_THROW(Povm(1, {half}, {PureState::basis(2, 0)}), IncompletePovm);
  Matrix neg = Matrix::Zero(2, 2);
  neg(0, 0) = 2.0;
  neg(1, 1) = -1.0;
  Matrix comp = Matrix::Identity(2, 2) - neg;
  EXPECT_THROW(Povm(1, {neg, comp}, {PureState::basis(2, 0), PureState::basis(2, 1)}), InvalidState);
  EXPECT_THROW(Povm(1, {Matrix(Matrix::Identity(2, 2))}, {}), ShapeError);
  EXPECT_THROW(Povm(1, {Matrix(Matrix::Identity(3, 3))}, {PureState::basis(2, 0)}), ShapeError);
}

TEST(Respond, Examples) {
  const Povm p = build_povm(1, default_directions(1));
  EXPECT_LE(max_abs_diff(respond(p, PureState::basis(2, 0)).matrix(),
                         DensityOperator(PureState::basis(2, 0)).matrix()),
            1e-15);
  Vector plus(2);
  plus << 1.0, 1.0;
  EXPECT_LE(max_abs_diff(respond(p, PureState::normalized(plus)).matrix(), Matrix::Identity(2, 2) / 2.0),
            1e-15);
  EXPECT_THROW(respond(p, PureState::basis(3, 0)), ShapeError);
}

TEST(Respond, AlwaysValidDensityOperator) {
  auto gen = RandomStream(63).engine();
  int cases = 0;
  for (std::size_t n = 1; n <= 4; ++n) {
    const Povm p = build_povm(n, default_directions(n));
    for (int i = 0; i < 30; ++i) {
      const Matrix s = respond(p, haar_random_state(2, gen)).matrix();
      EXPECT_LE(hermiticity_defect(s), 1e-12);
      EXPECT_NEAR(s.trace().real(), 1.0, 1e-12);
      EXPECT_GE(min_eigenvalue(s), -1e-10);
      ++cases;
    }
  }
  EXPECT_GE(cases, 100);
}

TEST(Respond, PayoffMatchesSampledPlay) {
  // Sample outcome r, then the referee's SWAP test against guess r.
  const Povm p = build_povm(2, default_directions(2));
  Vector v(2);
  v << cplx(0.8, 0.0), cplx(0.36, 0.48);
  const PureState psi = PureState::normalized(v);
  const DensityOperator target(psi);
  const auto probs = outcome_probabilities(p, psi);
  std::discrete_distribution<std::size_t> pick(probs.begin(), probs.end());
  auto gen = RandomStream(64).engine();
  constexpr int kRounds = 100000;
  double sum = 0, sum2 = 0;
  for (int i = 0; i < kRounds; ++i) {
    const std::size_t r = pick(gen);
    const double x = sample_outcome(target, DensityOperator(p.guesses()[r]), gen);
    sum += x;
    sum2 += x * x;
  }
  const double mean = sum / kRounds;
  const double se = std::sqrt((sum2 / kRounds - mean * mean) / kRounds);
  EXPECT_LE(std::abs(mean - state_payoff(p, psi)), 3 * se);
}

TEST(MeanFidelity, Examples) {
  const Povm p1 = build_povm(1, default_directions(1));
  EXPECT_NEAR(mean_fidelity(p1), 2.0 / 3.0, 1e-10);
  EXPECT_NEAR(mean_fidelity(build_povm(3, default_directions(3))), 0.8, 1e-9);
  const Povm flipped = p1.with_guesses({PureState::basis(2, 1), PureState::basis(2, 0)});
  EXPECT_NEAR(mean_fidelity(flipped), 1.0 / 3.0, 1e-10);
}

TEST(MeanFidelity, FlippedGuessMatchesMonteCarloHaar) {
  const Povm p1 = build_povm(1, default_directions(1));
  const Povm flipped = p1.with_guesses({PureState::basis(2, 1), PureState::basis(2, 0)});
  auto gen = RandomStream(65).engine();
  constexpr int kSamples = 100000;
  double s = 0, s2 = 0;
  for (int i = 0; i < kSamples; ++i) {
    const double f = state_payoff(flipped, haar_random_state(2, gen));
    s += f;
    s2 += f * f;
  }
  const double mean = s / kSamples;
  const double se = std::sqrt((s2 / kSamples - mean * mean) / kSamples);
  EXPECT_LE(std::abs(mean - 1.0 / 3.0), 3 * se);
}

TEST(MeanFidelity, ValueOverDefaultSets) {
  for (std::size_t n = 1; n <= 5; ++n) {
    const double target = double(n + 1) / double(n + 2);
    const Povm built = build_povm(n, default_directions(n));
    EXPECT_NEAR(mean_fidelity(built), target, 1e-9) << n;
    const Povm opt = optimal_povm(n);
    EXPECT_LE(opt.residual(), 1e-8);
    EXPECT_NEAR(mean_fidelity(opt), target, 1e-9) << n;
  }
}

// Aligned-guess POVMs with exact completeness attain (N+1)/(N+2), whatever
// the directions.
TEST(MeanFidelity, AlignedGuessIdentityOnRandomDirectionSets) {
  auto gen = RandomStream(66).engine();
  int cases = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 1 + static_cast<std::size_t>(trial % 4);
    std::vector<Direction> dirs;
    // With only ~2 (N+1)^2 random points the identity often falls outside
    // the cone of coherent projectors and no nonnegative weights exist.
    const std::size_t count = 8 * (n + 1) * (n + 1);
    for (std::size_t i = 0; i < count; ++i) dirs.push_back(random_direction(gen));
    const Povm p = build_povm(n, dirs);
    for (const auto& e : p.effects()) EXPECT_GE(min_eigenvalue(e), -1e-10);
    const double target = double(n + 1) / double(n + 2);
    EXPECT_LE(std::abs(mean_fidelity(p) - target), std::max(10 * p.residual(), 1e-12));
    ++cases;
  }
  EXPECT_EQ(cases, 100);
}

TEST(Universality, OptimalPovmPayoffIsStateIndependent) {
  auto gen = RandomStream(67).engine();
  for (std::size_t n = 1; n <= 5; ++n) {
    const Povm p = optimal_povm(n);
    std::vector<double> f;
    for (int i = 0; i < 100; ++i) f.push_back(state_payoff(p, haar_random_state(2, gen)));
    const double mean = std::accumulate(f.begin(), f.end(), 0.0) / f.size();
    double var = 0;
    for (double x : f) var += (x - mean) * (x - mean);
    EXPECT_LE(std::sqrt(var / f.size()), 1e-9) << n;
    EXPECT_NEAR(mean, double(n + 1) / double(n + 2), 1e-9);
  }
}

}  // namespace
}  // namespace qgames
