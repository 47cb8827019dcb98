#pragma once

// Experiments tying the quantum strategies to the game theory: finite
// discretizations of the games, minmax sandwich reports, perturbation checks,
// Monte Carlo play of the full protocol, and the asymmetric cloning scan.
//
// Analytic reports use the fidelity F. Monte Carlo plays the literal +-1
// stakes; a round passes with probability p = (1 + F)/2, so the mean stake
// is 2p - 1 = F and the two are directly comparable.

#include <cmath>
#include <numbers>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include "qgames/cloning.hpp"
#include "qgames/estimation.hpp"
#include "qgames/swap_payoff.hpp"
#include "qgames/zerosum.hpp"

namespace qgames {

enum class GameKind { kEstimation, kCloning, kOneParticle };

inline std::string to_string(GameKind k) {
  switch (k) {
    case GameKind::kEstimation: return "estimation";
    case GameKind::kCloning: return "cloning";
    case GameKind::kOneParticle: return "one_particle";
  }
  return "unknown";
}

struct GameSpec {
  GameKind kind = GameKind::kCloning;
  std::size_t d = 2;
  std::size_t n = 1;
  std::size_t m = 2;
  std::size_t samples = 100000;
  std::uint64_t seed = 0;

  void validate() const {
    if (kind == GameKind::kEstimation && d != 2) throw InvalidArity("estimation games are for qubits (d = 2)");
    if (d < 1 || n < 1) throw InvalidArity("need d >= 1 and N >= 1");
    if (kind != GameKind::kEstimation && m < n) throw InvalidArity("need M >= N");
    if (samples < 1) throw InvalidArity("need at least one sample");
  }

  /// Theoretical game value in fidelity units.
  double theoretical_value() const {
    validate();
    switch (kind) {
      case GameKind::kEstimation: return static_cast<double>(n + 1) / static_cast<double>(n + 2);
      case GameKind::kCloning: return value_formulas(d, n, m).global_value;
      case GameKind::kOneParticle: return value_formulas(d, n, m).single_value;
    }
    return 0.0;
  }
};

/// A player I strategy: a channel for the cloning games, a POVM for estimation.
using PlayerIStrategy = std::variant<Channel, Povm>;

// ---------------------------------------------------------------------------
// player II state sets

/// The 12 vertices of an icosahedron as Bloch directions.
inline std::vector<Direction> icosahedron_directions() {
  const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
  const double raw[12][3] = {{0, 1, phi},  {0, -1, phi},  {0, 1, -phi},  {0, -1, -phi},
                             {1, phi, 0},  {-1, phi, 0},  {1, -phi, 0},  {-1, -phi, 0},
                             {phi, 0, 1},  {-phi, 0, 1},  {phi, 0, -1},  {-phi, 0, -1}};
  std::vector<Direction> out;
  for (const auto& v : raw) {
    const double r = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
    out.emplace_back(std::acos(std::clamp(v[2] / r, -1.0, 1.0)), std::atan2(v[1], v[0]));
  }
  return out;
}

/// Prefix-nested low-discrepancy Bloch sequence: every prefix is well spread,
/// so prefixes of increasing length refine each other.
inline std::vector<Direction> nested_bloch_directions(std::size_t count) {
  const double golden = (std::sqrt(5.0) - 1.0) / 2.0;
  constexpr double kPlastic = 0.7548776662466927;  // 1/rho, rho the plastic number
  std::vector<Direction> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double u = std::fmod(0.5 + static_cast<double>(i) * kPlastic, 1.0);
    const double v = std::fmod(0.5 + static_cast<double>(i) * golden, 1.0);
    out.emplace_back(std::acos(1.0 - 2.0 * u), 2.0 * std::numbers::pi * v);
  }
  return out;
}

inline std::vector<PureState> states_from(const std::vector<Direction>& dirs) {
  std::vector<PureState> out;
  out.reserve(dirs.size());
  for (const auto& dir : dirs) out.push_back(coherent_qubit(dir));
  return out;
}

/// Nested player II state set: deterministic Bloch sequence for qubits, a
/// fixed Haar stream otherwise. Prefixes of the returned list are nested.
inline std::vector<PureState> player_two_states(std::size_t d, std::size_t count, std::uint64_t seed) {
  if (d == 2) return states_from(nested_bloch_directions(count));
  std::vector<PureState> out;
  const RandomStream root(seed);
  for (std::size_t i = 0; i < count; ++i) out.push_back(haar_random_state(d, root.substream(i)));
  return out;
}

// ---------------------------------------------------------------------------
// discretized games

inline MatrixGame discretize_estimation_game(std::size_t n, const std::vector<Povm>& povms,
                                             const std::vector<PureState>& states) {
  if (povms.empty() || states.empty()) throw ShapeError("discretized game needs strategies for both players");
  RealMatrix a(static_cast<Eigen::Index>(povms.size()), static_cast<Eigen::Index>(states.size()));
  for (std::size_t i = 0; i < povms.size(); ++i) {
    if (povms[i].n() != n) throw ShapeError("POVM copy count does not match N");
    for (std::size_t j = 0; j < states.size(); ++j) {
      a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = state_payoff(povms[i], states[j]);
    }
  }
  return MatrixGame(std::move(a));
}

inline MatrixGame discretize_cloning_game(std::size_t d, std::size_t n, std::size_t m,
                                          const std::vector<Channel>& channels,
                                          const std::vector<PureState>& states) {
  if (channels.empty() || states.empty()) throw ShapeError("discretized game needs strategies for both players");
  RealMatrix a(static_cast<Eigen::Index>(channels.size()), static_cast<Eigen::Index>(states.size()));
  for (std::size_t i = 0; i < channels.size(); ++i) {
    const Channel& ch = channels[i];
    if (ch.d() != d || ch.n_in() != n || ch.n_out() != m) throw ShapeError("channel arity does not match the game");
    for (std::size_t j = 0; j < states.size(); ++j) {
      a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = global_fidelity(ch, states[j]);
    }
  }
  return MatrixGame(std::move(a));
}

/// One-particle test: player II's pure strategies are (state, clone index)
/// pairs, column j * M + (k - 1).
inline MatrixGame discretize_one_particle_game(std::size_t d, std::size_t n, std::size_t m,
                                               const std::vector<Channel>& channels,
                                               const std::vector<PureState>& states) {
  if (channels.empty() || states.empty()) throw ShapeError("discretized game needs strategies for both players");
  RealMatrix a(static_cast<Eigen::Index>(channels.size()), static_cast<Eigen::Index>(states.size() * m));
  for (std::size_t i = 0; i < channels.size(); ++i) {
    const Channel& ch = channels[i];
    if (ch.d() != d || ch.n_in() != n || ch.n_out() != m) throw ShapeError("channel arity does not match the game");
    for (std::size_t j = 0; j < states.size(); ++j) {
      for (std::size_t k = 1; k <= m; ++k) {
        a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j * m + k - 1)) =
            single_clone_fidelity(ch, states[j], k);
      }
    }
  }
  return MatrixGame(std::move(a));
}

inline MatrixGame discretize(const GameSpec& spec, const std::vector<PlayerIStrategy>& strategies,
                             const std::vector<PureState>& states) {
  spec.validate();
  if (spec.kind == GameKind::kEstimation) {
    std::vector<Povm> povms;
    for (const auto& s : strategies) povms.push_back(std::get<Povm>(s));
    return discretize_estimation_game(spec.n, povms, states);
  }
  std::vector<Channel> channels;
  for (const auto& s : strategies) channels.push_back(std::get<Channel>(s));
  if (spec.kind == GameKind::kCloning) return discretize_cloning_game(spec.d, spec.n, spec.m, channels, states);
  return discretize_one_particle_game(spec.d, spec.n, spec.m, channels, states);
}

// ---------------------------------------------------------------------------
// minmax sandwich

struct SandwichLevel {
  std::size_t states;
  double value;
  double exploitability;
};

struct SandwichReport {
  double theoretical_value = 0;
  double tol = 0;
  std::vector<SandwichLevel> levels;
  bool above_theory = true;  ///< every restricted value >= theory - tol
  bool monotone = true;      ///< non-increasing under refinement, within tol
  double final_gap = 0;      ///< last value minus theory
  bool converged = false;    ///< |final_gap| <= tol
  bool passed() const { return above_theory && monotone && converged; }
};

/// Solves the game restricted to `strategies` for player I and to each
/// nested prefix of `states` (lengths `sizes`, increasing) for player II.
/// Restricting only the minimizer cannot push player I's guaranteed payoff
/// below the true value, and refining the minimizer's set can only lower it.
inline SandwichReport sandwich_report(const GameSpec& spec, const std::vector<PlayerIStrategy>& strategies,
                                      const std::vector<PureState>& states,
                                      const std::vector<std::size_t>& sizes, double tol = 1e-9) {
  if (strategies.empty() || states.empty() || sizes.empty()) {
    throw ShapeError("sandwich_report needs non-empty strategy sets");
  }
  SandwichReport rep;
  rep.theoretical_value = spec.theoretical_value();
  rep.tol = tol;
  const MatrixGame full = discretize(spec, strategies, states);
  const Eigen::Index per_state = spec.kind == GameKind::kOneParticle ? static_cast<Eigen::Index>(spec.m) : 1;
  for (std::size_t size : sizes) {
    if (size < 1 || size > states.size()) throw ShapeError("sandwich level larger than the state set");
    const MatrixGame g(full.payoff().leftCols(static_cast<Eigen::Index>(size) * per_state));
    const EquilibriumPair eq = solve(g, {.tol = tol / 10});
    rep.levels.push_back({size, eq.value, eq.exploitability});
  }
  for (std::size_t i = 0; i < rep.levels.size(); ++i) {
    if (rep.levels[i].value < rep.theoretical_value - tol) rep.above_theory = false;
    if (i > 0 && rep.levels[i].value > rep.levels[i - 1].value + tol) rep.monotone = false;
  }
  rep.final_gap = rep.levels.back().value - rep.theoretical_value;
  rep.converged = std::abs(rep.final_gap) <= tol;
  return rep;
}

// ---------------------------------------------------------------------------
// perturbation checks

struct PerturbedValue {
  std::string family;
  double value;
};

struct PerturbationReport {
  double base_value = 0;
  double max_value = 0;
  std::string worst_family;
  std::size_t count = 0;
  std::size_t violations = 0;  ///< perturbations exceeding base_value + tol
  double tol = 0;
  bool passed() const { return violations == 0; }
};

inline PerturbationReport summarize_perturbations(double base_value, const std::vector<PerturbedValue>& values,
                                                  double tol) {
  PerturbationReport rep;
  rep.base_value = base_value;
  rep.max_value = -std::numeric_limits<double>::infinity();
  rep.tol = tol;
  rep.count = values.size();
  for (const auto& v : values) {
    if (v.value > rep.max_value) {
      rep.max_value = v.value;
      rep.worst_family = v.family;
    }
    if (v.value > base_value + tol) ++rep.violations;
  }
  return rep;
}

struct ChannelPerturbation {
  std::string family;
  Channel channel;
};

/// Cloner perturbations cycling through four families: small output unitary
/// rotations, Haar-random output unitaries, mixing with the fully depolarizing
/// output, and mixing with a random Stinespring channel.
inline std::vector<ChannelPerturbation> cloning_perturbations(const Channel& base, std::size_t count,
                                                              std::uint64_t seed) {
  std::vector<ChannelPerturbation> out;
  out.reserve(count);
  const RandomStream root(seed);
  const Channel depol = depolarizing_output(base.d(), base.n_in(), base.n_out());
  const auto dim = static_cast<Eigen::Index>(base.out_dim());
  for (std::size_t i = 0; i < count; ++i) {
    auto gen = root.substream(i).engine();
    std::uniform_real_distribution<double> u(0.0, 1.0);
    switch (i % 4) {
      case 0: {
        Matrix h(dim, dim);
        for (Eigen::Index c = 0; c < dim; ++c) h.col(c) = complex_gaussian_vector(base.out_dim(), gen);
        h = (h + h.adjoint()) / 2.0;
        const double eps = 0.2 * u(gen);
        Eigen::SelfAdjointEigenSolver<Matrix> es(h);
        const Eigen::VectorXcd phases =
            (es.eigenvalues().cast<cplx>() * cplx(0.0, eps)).array().exp().matrix();
        const Matrix unitary = es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
        out.push_back({"small_output_unitary", then_unitary(base, unitary)});
        break;
      }
      case 1:
        out.push_back({"haar_output_unitary", then_unitary(base, haar_random_unitary(base.out_dim(), gen))});
        break;
      case 2: {
        const double p = u(gen);
        const Channel parts[] = {base, depol};
        const double w[] = {1.0 - p, p};
        out.push_back({"depolarizing_mix", mix(parts, w)});
        break;
      }
      default: {
        const std::size_t anc = base.out_dim();
        const Channel random = from_isometry(base.d(), base.n_in(), base.n_out(),
                                             haar_random_isometry(base.out_dim() * anc, base.in_dim(), gen), anc);
        const double p = u(gen);
        const Channel parts[] = {base, random};
        const double w[] = {1.0 - p, p};
        out.push_back({"random_channel_mix", mix(parts, w)});
        break;
      }
    }
  }
  return out;
}

inline PerturbationReport perturb_best_response_check(const Channel& base,
                                                      const std::vector<ChannelPerturbation>& perturbations,
                                                      double tol = 1e-9) {
  std::vector<PerturbedValue> values;
  values.reserve(perturbations.size());
  for (const auto& p : perturbations) values.push_back({p.family, haar_avg_global_fidelity(p.channel)});
  return summarize_perturbations(haar_avg_global_fidelity(base), values, tol);
}

/// A measure-and-resend strategy with arbitrary (possibly mixed) resend states.
struct EstimatorPerturbation {
  std::string family;
  Povm povm;
  std::vector<Matrix> outputs;
};

inline Matrix rotation_unitary(const Direction& axis, double angle) {
  // exp(-i angle n.sigma / 2)
  const double nx = std::sin(axis.theta) * std::cos(axis.psi_phase);
  const double ny = std::sin(axis.theta) * std::sin(axis.psi_phase);
  const double nz = std::cos(axis.theta);
  const double c = std::cos(angle / 2);
  const double s = std::sin(angle / 2);
  Matrix u(2, 2);
  u << cplx(c, -s * nz), cplx(-s * ny, -s * nx), cplx(s * ny, -s * nx), cplx(c, s * nz);
  return u;
}

/// Estimator perturbations cycling through: misaligned guesses (each guess
/// rotated about a random axis), a common output unitary, depolarized
/// outputs, and a different (completeness-only) measurement.
inline std::vector<EstimatorPerturbation> estimation_perturbations(const Povm& base, std::size_t count,
                                                                   std::uint64_t seed) {
  std::vector<EstimatorPerturbation> out;
  out.reserve(count);
  const RandomStream root(seed);
  auto guesses_of = [](const Povm& p) {
    std::vector<Matrix> g;
    for (const auto& s : p.guesses()) g.push_back(s.projector());
    return g;
  };
  auto random_direction = [](auto& gen) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    return Direction(std::acos(1.0 - 2.0 * u(gen)), 2.0 * std::numbers::pi * u(gen));
  };
  for (std::size_t i = 0; i < count; ++i) {
    auto gen = root.substream(i).engine();
    std::uniform_real_distribution<double> u(0.0, 1.0);
    switch (i % 4) {
      case 0: {
        std::vector<Matrix> outputs;
        const double angle = 0.5 * u(gen);
        for (const auto& g : base.guesses()) {
          const Matrix rot = rotation_unitary(random_direction(gen), angle);
          outputs.push_back(rot * g.projector() * rot.adjoint());
        }
        out.push_back({"guess_misalignment", base, std::move(outputs)});
        break;
      }
      case 1: {
        const Matrix w = haar_random_unitary(2, gen);
        std::vector<Matrix> outputs;
        for (const auto& g : base.guesses()) outputs.push_back(w * g.projector() * w.adjoint());
        out.push_back({"output_unitary", base, std::move(outputs)});
        break;
      }
      case 2: {
        const double p = u(gen);
        std::vector<Matrix> outputs;
        for (const auto& g : base.guesses()) {
          outputs.push_back((1.0 - p) * g.projector() + p * Matrix::Identity(2, 2) / 2.0);
        }
        out.push_back({"depolarized_output", base, std::move(outputs)});
        break;
      }
      default: {
        // A randomly rotated direction set with twice the minimal count.
        const Matrix rot = rotation_unitary(random_direction(gen), 2.0 * std::numbers::pi * u(gen));
        std::vector<Direction> dirs;
        for (const auto& dir : default_directions(base.n() + 1)) {
          const Vector v = rot * coherent_qubit(dir).amplitudes();
          const double theta = 2.0 * std::atan2(std::abs(v(1)), std::abs(v(0)));
          dirs.emplace_back(std::clamp(theta, 0.0, std::numbers::pi), std::arg(v(1)) - std::arg(v(0)));
        }
        const Povm povm = build_povm(base.n(), dirs);
        out.push_back({"rotated_measurement", povm, guesses_of(povm)});
        break;
      }
    }
  }
  return out;
}

inline PerturbationReport perturb_best_response_check(const Povm& base,
                                                      const std::vector<EstimatorPerturbation>& perturbations,
                                                      double tol = 1e-9) {
  std::vector<PerturbedValue> values;
  values.reserve(perturbations.size());
  for (const auto& p : perturbations) values.push_back({p.family, mean_fidelity(p.povm, p.outputs)});
  return summarize_perturbations(mean_fidelity(base), values, tol);
}

// ---------------------------------------------------------------------------
// Monte Carlo play

struct MonteCarloRecord {
  std::size_t rounds = 0;
  double mean_payoff = 0;   ///< empirical mean of the +-1 stakes
  double stderr_ = 0;       ///< standard error of mean_payoff
  double exact_fidelity = 0;  ///< exact Haar-averaged fidelity F
  double pass_probability = 0;  ///< (1 + F) / 2
  double exact_payoff = 0;    ///< 2 pass_probability - 1, equal to F
  double z_score = 0;

  bool within(double sigmas) const { return std::abs(z_score) <= sigmas; }
};

namespace detail {

// Exact Haar-averaged fidelity of a strategy in a given game.
inline double exact_fidelity(const GameSpec& spec, const PlayerIStrategy& strategy) {
  if (spec.kind == GameKind::kEstimation) return mean_fidelity(std::get<Povm>(strategy));
  const Channel& ch = std::get<Channel>(strategy);
  if (spec.kind == GameKind::kCloning) return haar_avg_global_fidelity(ch);
  double sum = 0.0;
  for (std::size_t k = 1; k <= ch.n_out(); ++k) sum += single_clone_haar_fidelity(ch, k);
  return sum / static_cast<double>(ch.n_out());
}

// One refereed round driven entirely by `stream`.
inline int play_round(const GameSpec& spec, const PlayerIStrategy& strategy, const RandomStream& stream) {
  auto gen = stream.engine();
  const PureState psi = haar_random_state(spec.d, gen);
  switch (spec.kind) {
    case GameKind::kEstimation: {
      const DensityOperator sigma = respond(std::get<Povm>(strategy), psi);
      return sample_outcome(DensityOperator(psi), sigma, gen);
    }
    case GameKind::kCloning: {
      const Channel& ch = std::get<Channel>(strategy);
      const DensityOperator sigma = apply(ch, DensityOperator(tensor_power(psi, ch.n_in())));
      return sample_outcome(DensityOperator(tensor_power(psi, ch.n_out())), sigma, gen);
    }
    case GameKind::kOneParticle: {
      const Channel& ch = std::get<Channel>(strategy);
      std::uniform_int_distribution<std::size_t> pick(1, ch.n_out());
      const std::size_t k = pick(gen);
      const Matrix reduced = single_clone_output(ch, psi, k);
      return sample_outcome(DensityOperator(psi), DensityOperator((reduced + reduced.adjoint()) / 2.0), gen);
    }
  }
  return 0;
}

inline void check_strategy(const GameSpec& spec, const PlayerIStrategy& strategy) {
  if (spec.kind == GameKind::kEstimation) {
    const Povm* p = std::get_if<Povm>(&strategy);
    if (p == nullptr || p->n() != spec.n) throw ShapeError("estimation game needs an N-copy POVM");
    return;
  }
  const Channel* ch = std::get_if<Channel>(&strategy);
  if (ch == nullptr || ch->d() != spec.d || ch->n_in() != spec.n || ch->n_out() != spec.m) {
    throw ShapeError("cloning game needs a channel of matching arity");
  }
}

}  // namespace detail

/// Plays spec.samples rounds of the full protocol. Round r draws everything
/// from substream r of `seed`, so the record is identical for any `threads`.
inline MonteCarloRecord monte_carlo_play(const GameSpec& spec, const PlayerIStrategy& strategy,
                                         std::uint64_t seed, unsigned threads = 0) {
  spec.validate();
  detail::check_strategy(spec, strategy);
  const std::size_t rounds = spec.samples;
  std::vector<int> outcomes(rounds, 0);
  const RandomStream root(seed);
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, rounds));
  auto work = [&](std::size_t begin, std::size_t end) {
    for (std::size_t r = begin; r < end; ++r) outcomes[r] = detail::play_round(spec, strategy, root.substream(r));
  };
  if (threads <= 1) {
    work(0, rounds);
  } else {
    std::vector<std::jthread> pool;
    const std::size_t chunk = (rounds + threads - 1) / threads;
    for (unsigned t = 0; t < threads; ++t) {
      const std::size_t begin = t * chunk;
      const std::size_t end = std::min(rounds, begin + chunk);
      if (begin < end) pool.emplace_back(work, begin, end);
    }
  }
  MonteCarloRecord rec;
  rec.rounds = rounds;
  long long sum = 0;
  for (int o : outcomes) sum += o;
  rec.mean_payoff = static_cast<double>(sum) / static_cast<double>(rounds);
  // Outcomes are +-1, so the sample variance is a function of the mean.
  const double var = rounds > 1 ? (1.0 - rec.mean_payoff * rec.mean_payoff) * static_cast<double>(rounds) /
                                      static_cast<double>(rounds - 1)
                                : 0.0;
  rec.stderr_ = std::sqrt(var / static_cast<double>(rounds));
  rec.exact_fidelity = detail::exact_fidelity(spec, strategy);
  rec.pass_probability = (1.0 + rec.exact_fidelity) / 2.0;
  rec.exact_payoff = 2.0 * rec.pass_probability - 1.0;
  rec.z_score = rec.stderr_ > 0 ? (rec.mean_payoff - rec.exact_payoff) / rec.stderr_
                                : (rec.mean_payoff == rec.exact_payoff ? 0.0 : std::numeric_limits<double>::infinity());
  return rec;
}

// ---------------------------------------------------------------------------
// asymmetric cloning bound

struct ScanRecord {
  std::string descriptor;
  std::vector<double> clone_fidelities;
  double sum;
};

struct ScanReport {
  double max_sum_fidelity = -std::numeric_limits<double>::infinity();
  double bound = 0;
  std::string argmax;
  std::size_t violations = 0;  ///< records exceeding bound + tol
  double tol = 0;
  std::vector<ScanRecord> records;
  bool passed() const { return violations == 0; }
};

inline ScanRecord score_channel(const Channel& ch, std::string descriptor) {
  ScanRecord rec{std::move(descriptor), {}, 0.0};
  for (std::size_t k = 1; k <= ch.n_out(); ++k) {
    rec.clone_fidelities.push_back(single_clone_haar_fidelity(ch, k));
    rec.sum += rec.clone_fidelities.back();
  }
  return rec;
}

/// Swaps the two output clones of a 1 -> 2 channel.
inline Channel swap_outputs(const Channel& ch) {
  if (ch.n_out() != 2) throw InvalidArity("swap_outputs needs two output clones");
  return then_unitary(ch, transposition_operator(ch.d(), 2, 0, 1));
}

/// Interpolates "identity on clone 1, maximally mixed clone 2" (t = 0)
/// through the symmetric cloner (t = 1/2) to the mirror image (t = 1).
inline Channel asymmetry_family(std::size_t d, double t) {
  if (t < 0 || t > 1) throw InvalidState("asymmetry parameter must lie in [0, 1]");
  const Channel left = identity_embedding(d, 1, 2);
  const Channel sym = optimal_cloner(d, 1, 2);
  if (t <= 0.5) {
    const Channel parts[] = {left, sym};
    const double w[] = {1.0 - 2.0 * t, 2.0 * t};
    return mix(parts, w);
  }
  const Channel parts[] = {sym, swap_outputs(left)};
  const double w[] = {2.0 - 2.0 * t, 2.0 * t - 1.0};
  return mix(parts, w);
}

struct ScanOptions {
  std::size_t n_random = 1000;
  std::vector<double> grid = {0.0, 0.125, 0.25, 0.375, 0.5, 0.625, 0.75, 0.875, 1.0};
  std::uint64_t seed = 0;
  std::size_t ancilla_dim = 0;  ///< 0 selects d^M
  double tol = 1e-9;
  bool keep_records = true;
};

/// Scores sum_k F_k for the optimal cloner, the identity embedding, random
/// Stinespring channels, and (for 1 -> 2) the asymmetry family. `extra`
/// channels are scored too; they were completeness-checked at construction.
inline ScanReport asym_bound_scan(std::size_t d, std::size_t n, std::size_t m, const ScanOptions& opts,
                                  const std::vector<Channel>& extra = {}) {
  ScanReport rep;
  rep.bound = value_formulas(d, n, m).asym_bound;
  rep.tol = opts.tol;
  const std::size_t anc = opts.ancilla_dim ? opts.ancilla_dim : checked_power(d, m);
  auto add = [&](ScanRecord rec) {
    if (rec.sum > rep.max_sum_fidelity) {
      rep.max_sum_fidelity = rec.sum;
      rep.argmax = rec.descriptor;
    }
    if (rec.sum > rep.bound + opts.tol) ++rep.violations;
    if (opts.keep_records) rep.records.push_back(std::move(rec));
  };
  add(score_channel(optimal_cloner(d, n, m), "optimal_cloner"));
  add(score_channel(identity_embedding(d, n, m), "identity_embedding"));
  const RandomStream root(opts.seed);
  const std::size_t in_dim = checked_power(d, n);
  const std::size_t out_dim = checked_power(d, m);
  for (std::size_t i = 0; i < opts.n_random; ++i) {
    auto gen = root.substream(i).engine();
    const Channel ch = from_isometry(d, n, m, haar_random_isometry(out_dim * anc, in_dim, gen), anc);
    add(score_channel(ch, "random_isometry_" + std::to_string(i)));
  }
  if (n == 1 && m == 2) {
    for (double t : opts.grid) {
      char buf[48];
      std::snprintf(buf, sizeof buf, "asymmetry_t=%.6g", t);
      add(score_channel(asymmetry_family(d, t), buf));
    }
  }
  for (std::size_t i = 0; i < extra.size(); ++i) add(score_channel(extra[i], "extra_" + std::to_string(i)));
  return rep;
}

}  // namespace qgames
