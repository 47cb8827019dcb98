#include <gtest/gtest.h>

#include "qgames/harness.hpp"
#include "test_util.hpp"

namespace qgames {
namespace {

GameSpec spec_of(GameKind kind, std::size_t d, std::size_t n, std::size_t m, std::size_t samples = 100000) {
  GameSpec s;
  s.kind = kind;
  s.d = d;
  s.n = n;
  s.m = m;
  s.samples = samples;
  return s;
}

TEST(GameSpec, ValidationAndValues) {
  EXPECT_THROW(spec_of(GameKind::kEstimation, 3, 1, 1).validate(), InvalidArity);
  EXPECT_THROW(spec_of(GameKind::kCloning, 2, 2, 1).validate(), InvalidArity);
  EXPECT_THROW(spec_of(GameKind::kCloning, 2, 1, 2, 0).validate(), InvalidArity);
  EXPECT_NEAR(spec_of(GameKind::kEstimation, 2, 3, 0).theoretical_value(), 0.8, 1e-15);
  EXPECT_NEAR(spec_of(GameKind::kCloning, 2, 1, 2).theoretical_value(), 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(spec_of(GameKind::kOneParticle, 2, 1, 2).theoretical_value(), 5.0 / 6.0, 1e-15);
  EXPECT_EQ(to_string(GameKind::kOneParticle), "one_particle");
}

TEST(PlayerTwoStates, NestedAndDistinct) {
  const auto a = nested_bloch_directions(8);
  const auto b = nested_bloch_directions(16);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].theta, b[i].theta);
    EXPECT_EQ(a[i].psi_phase, b[i].psi_phase);
  }
  EXPECT_EQ(icosahedron_directions().size(), 12u);
  const auto haar = player_two_states(3, 5, 11);
  EXPECT_EQ(haar.size(), 5u);
  EXPECT_EQ(haar[0].dim(), 3u);
}

TEST(DiscretizeEstimation, OptimalRowIsConstant) {
  const Povm p = optimal_povm(1);
  const auto states = states_from(icosahedron_directions());
  const MatrixGame g = discretize_estimation_game(1, {p}, states);
  for (Eigen::Index j = 0; j < g.cols(); ++j) EXPECT_NEAR(g.payoff()(0, j), 2.0 / 3.0, 1e-10);
}

TEST(DiscretizeEstimation, FlippedGuessesLoseOnOwnDirections) {
  const auto dirs = default_directions(1);
  const Povm p = build_povm(1, dirs);
  const Povm flipped = p.with_guesses({PureState::basis(2, 1), PureState::basis(2, 0)});
  const MatrixGame g = discretize_estimation_game(1, {flipped}, states_from(dirs));
  for (Eigen::Index j = 0; j < g.cols(); ++j) EXPECT_LT(g.payoff()(0, j), 2.0 / 3.0);
  EXPECT_THROW(discretize_estimation_game(2, {p}, states_from(dirs)), ShapeError);
  EXPECT_THROW(discretize_estimation_game(1, {}, states_from(dirs)), ShapeError);
}

TEST(DiscretizeCloning, RowsAndOneByOne) {
  const auto states = player_two_states(2, 20, 1);
  const MatrixGame g = discretize_cloning_game(2, 1, 2, {optimal_cloner(2, 1, 2), identity_embedding(2, 1, 2)}, states);
  for (Eigen::Index j = 0; j < g.cols(); ++j) {
    EXPECT_NEAR(g.payoff()(0, j), 2.0 / 3.0, 1e-10);
    EXPECT_NEAR(g.payoff()(1, j), 0.5, 1e-10);
  }
  const MatrixGame one = discretize_cloning_game(2, 1, 2, {optimal_cloner(2, 1, 2)}, {states[0]});
  EXPECT_NEAR(solve(one).value, one.payoff()(0, 0), 1e-15);
  EXPECT_THROW(discretize_cloning_game(2, 1, 3, {optimal_cloner(2, 1, 2)}, states), ShapeError);
}

TEST(DiscretizeCloning, EntriesEqualExpectedPayoff) {
  auto gen = RandomStream(81).engine();
  const Channel ch = from_isometry(2, 1, 2, haar_random_isometry(16, 2, gen), 4);
  const auto states = player_two_states(2, 10, 0);
  const MatrixGame g = discretize_cloning_game(2, 1, 2, {ch}, states);
  const MatrixGame h = discretize_one_particle_game(2, 1, 2, {ch}, states);
  for (std::size_t j = 0; j < states.size(); ++j) {
    const DensityOperator out = apply(ch, DensityOperator(states[j]));
    const DensityOperator target(tensor_power(states[j], 2));
    EXPECT_NEAR(g.payoff()(0, static_cast<Eigen::Index>(j)), expected_payoff(target, out), 1e-12);
    for (std::size_t k = 1; k <= 2; ++k) {
      const Matrix r = single_clone_output(ch, states[j], k);
      EXPECT_NEAR(h.payoff()(0, static_cast<Eigen::Index>(j * 2 + k - 1)),
                  expected_payoff(DensityOperator(states[j]), DensityOperator((r + r.adjoint()) / 2.0)), 1e-12);
    }
  }
}

TEST(Sandwich, EstimationIcosahedron) {
  const auto spec = spec_of(GameKind::kEstimation, 2, 1, 0);
  const auto rep = sandwich_report(spec, {optimal_povm(1)}, states_from(icosahedron_directions()), {12});
  EXPECT_TRUE(rep.passed());
  EXPECT_NEAR(rep.levels[0].value, 2.0 / 3.0, 1e-9);
}

TEST(Sandwich, CloningHaarStates) {
  const auto spec = spec_of(GameKind::kCloning, 2, 1, 2);
  const RandomStream root(5);
  std::vector<PureState> states;
  for (std::size_t i = 0; i < 20; ++i) states.push_back(haar_random_state(2, root.substream(i)));
  const auto rep = sandwich_report(spec, {optimal_cloner(2, 1, 2), identity_embedding(2, 1, 2)}, states, {20});
  EXPECT_TRUE(rep.passed());
  EXPECT_NEAR(rep.levels[0].value, 2.0 / 3.0, 1e-9);
}

TEST(Sandwich, NestedRefinementIsMonotone) {
  const std::vector<std::size_t> sizes = {4, 8, 16};
  {
    const auto spec = spec_of(GameKind::kEstimation, 2, 1, 0);
    const Povm p = optimal_povm(1);
    const Povm flipped = build_povm(1, default_directions(1))
                             .with_guesses({PureState::basis(2, 1), PureState::basis(2, 0)});
    const Povm other = build_povm(1, {Direction(std::numbers::pi / 2, 0.0), Direction(std::numbers::pi / 2, std::numbers::pi)});
    const auto rep = sandwich_report(spec, {p, flipped, other}, player_two_states(2, 16, 0), sizes);
    EXPECT_TRUE(rep.passed());
  }
  {
    const auto spec = spec_of(GameKind::kCloning, 2, 1, 2);
    const auto rep = sandwich_report(spec, {optimal_cloner(2, 1, 2), identity_embedding(2, 1, 2),
                                            depolarizing_output(2, 1, 2)},
                                     player_two_states(2, 16, 0), sizes);
    EXPECT_TRUE(rep.passed());
    for (std::size_t i = 1; i < rep.levels.size(); ++i) {
      EXPECT_LE(rep.levels[i].value, rep.levels[i - 1].value + 1e-9);
    }
  }
  {
    const auto spec = spec_of(GameKind::kOneParticle, 2, 1, 2);
    const auto rep = sandwich_report(spec, {optimal_cloner(2, 1, 2), identity_embedding(2, 1, 2)},
                                     player_two_states(2, 16, 0), sizes);
    EXPECT_TRUE(rep.passed());
  }
  EXPECT_THROW(sandwich_report(spec_of(GameKind::kCloning, 2, 1, 2), {optimal_cloner(2, 1, 2)},
                               player_two_states(2, 4, 0), {8}),
               ShapeError);
}

TEST(Perturbations, ClonerNeverBeatsValue) {
  const Channel base = optimal_cloner(2, 1, 2);
  const auto perts = cloning_perturbations(base, 200, 17);
  ASSERT_EQ(perts.size(), 200u);
  const auto rep = perturb_best_response_check(base, perts, 1e-9);
  EXPECT_TRUE(rep.passed());
  EXPECT_LE(rep.max_value, 2.0 / 3.0 + 1e-9);
  const auto self = perturb_best_response_check(base, {{"self", base}}, 1e-9);
  EXPECT_NEAR(self.max_value, self.base_value, 1e-15);
  const auto dep = perturb_best_response_check(base, {{"depolarizing", depolarizing_output(2, 1, 2)}}, 1e-9);
  EXPECT_NEAR(dep.max_value, 1.0 / 4.0, 1e-12);
  EXPECT_TRUE(dep.passed());
}

TEST(Perturbations, EstimatorNeverBeatsValue) {
  const Povm base = optimal_povm(1);
  const auto perts = estimation_perturbations(base, 200, 19);
  ASSERT_EQ(perts.size(), 200u);
  const auto rep = perturb_best_response_check(base, perts, 1e-9);
  EXPECT_TRUE(rep.passed());
  EXPECT_LE(rep.max_value, 2.0 / 3.0 + 1e-9);
}

TEST(MonteCarlo, EstimationMatchesExact) {
  const auto spec = spec_of(GameKind::kEstimation, 2, 1, 0);
  const auto rec = monte_carlo_play(spec, optimal_povm(1), 2024);
  EXPECT_EQ(rec.rounds, 100000u);
  EXPECT_NEAR(rec.exact_payoff, 2.0 / 3.0, 1e-12);
  EXPECT_TRUE(rec.within(3.0)) << rec.z_score;
}

TEST(MonteCarlo, CloningMatchesExact) {
  const auto spec = spec_of(GameKind::kCloning, 2, 1, 2);
  const auto rec = monte_carlo_play(spec, optimal_cloner(2, 1, 2), 2025);
  EXPECT_NEAR(rec.exact_payoff, 2.0 / 3.0, 1e-12);
  EXPECT_TRUE(rec.within(3.0)) << rec.z_score;
}

TEST(MonteCarlo, DeterministicAcrossThreadCounts) {
  const auto spec = spec_of(GameKind::kCloning, 2, 1, 2, 5000);
  const auto a = monte_carlo_play(spec, optimal_cloner(2, 1, 2), 7, 1);
  const auto b = monte_carlo_play(spec, optimal_cloner(2, 1, 2), 7, 3);
  const auto c = monte_carlo_play(spec, optimal_cloner(2, 1, 2), 7, 1);
  EXPECT_EQ(a.mean_payoff, b.mean_payoff);
  EXPECT_EQ(a.mean_payoff, c.mean_payoff);
  EXPECT_EQ(a.stderr_, b.stderr_);
}

TEST(MonteCarlo, ZScoresAcrossSeeds) {
  const auto spec = spec_of(GameKind::kOneParticle, 2, 1, 2, 2000);
  const Channel ch = optimal_cloner(2, 1, 2);
  int within = 0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) within += monte_carlo_play(spec, ch, seed, 1).within(3.0);
  EXPECT_GE(within, 99);
}

TEST(MonteCarlo, StrategyMismatch) {
  EXPECT_THROW(monte_carlo_play(spec_of(GameKind::kCloning, 2, 1, 3, 10), optimal_cloner(2, 1, 2), 1),
               ShapeError);
  EXPECT_THROW(monte_carlo_play(spec_of(GameKind::kEstimation, 2, 1, 0, 10), optimal_cloner(2, 1, 2), 1),
               ShapeError);
}

TEST(AsymBoundScan, OneToTwo) {
  ScanOptions opts;
  opts.seed = 3;
  const auto rep = asym_bound_scan(2, 1, 2, opts);
  EXPECT_TRUE(rep.passed());
  EXPECT_NEAR(rep.bound, 5.0 / 3.0, 1e-15);
  EXPECT_LE(rep.max_sum_fidelity, 5.0 / 3.0 + 1e-9);
  EXPECT_NEAR(rep.max_sum_fidelity, 5.0 / 3.0, 1e-10);
  ASSERT_FALSE(rep.records.empty());
  EXPECT_EQ(rep.records[0].descriptor, "optimal_cloner");
  EXPECT_NEAR(rep.records[0].sum, 5.0 / 3.0, 1e-10);
  EXPECT_EQ(rep.records[1].descriptor, "identity_embedding");
  EXPECT_NEAR(rep.records[1].sum, 1.5, 1e-12);
  EXPECT_EQ(rep.records.size(), 2u + 1000u + 9u);
}

TEST(AsymBoundScan, AsymmetryFamilyEndpoints) {
  const auto left = score_channel(asymmetry_family(2, 0.0), "t0");
  EXPECT_NEAR(left.clone_fidelities[0], 1.0, 1e-12);
  EXPECT_NEAR(left.clone_fidelities[1], 0.5, 1e-12);
  const auto right = score_channel(asymmetry_family(2, 1.0), "t1");
  EXPECT_NEAR(right.clone_fidelities[0], 0.5, 1e-12);
  EXPECT_NEAR(right.clone_fidelities[1], 1.0, 1e-12);
  EXPECT_NEAR(score_channel(asymmetry_family(2, 0.5), "sym").sum, 5.0 / 3.0, 1e-12);
  EXPECT_THROW(asymmetry_family(2, 1.5), InvalidState);
}

TEST(AsymBoundScan, OtherArities) {
  ScanOptions opts;
  opts.n_random = 30;
  opts.seed = 4;
  for (auto [d, n, m] : {std::tuple{3, 1, 2}, std::tuple{2, 1, 3}, std::tuple{2, 2, 3}}) {
    opts.ancilla_dim = 4;
    const auto rep = asym_bound_scan(d, n, m, opts);
    EXPECT_TRUE(rep.passed()) << d << n << m;
    EXPECT_NEAR(rep.records[0].sum, rep.bound, 1e-10);
  }
}

TEST(AsymBoundScan, NonTracePreservingChannelRejectedBeforeScan) {
  std::vector<Matrix> kraus = optimal_cloner(2, 1, 2).kraus();
  kraus[0] *= 1.2;
  EXPECT_THROW(Channel(2, 1, 2, kraus), NotTracePreserving);
}

}  // namespace
}  // namespace qgames
