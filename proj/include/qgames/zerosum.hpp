#pragma once

// Finite two-player zero-sum games. Rows are player I's pure strategies,
// columns player II's; entries are player I's payoff and player II receives
// the negation.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "qgames/core.hpp"

namespace qgames {

class MatrixGame {
 public:
  explicit MatrixGame(RealMatrix payoff) : a_(std::move(payoff)) {
    if (a_.rows() < 1 || a_.cols() < 1) throw ShapeError("game needs at least one row and column");
    if (!a_.allFinite()) throw ShapeError("game payoffs must be finite");
  }

  const RealMatrix& payoff() const { return a_; }
  Eigen::Index rows() const { return a_.rows(); }
  Eigen::Index cols() const { return a_.cols(); }

  /// Player I's payoff matrix for the game with the roles swapped.
  MatrixGame swapped() const { return MatrixGame(-a_.transpose()); }

 private:
  RealMatrix a_;
};

class MixedStrategy {
 public:
  explicit MixedStrategy(RealVector probs) : p_(std::move(probs)) {
    if (p_.size() < 1) throw ShapeError("strategy needs at least one entry");
    if ((p_.array() < 0).any()) throw InvalidState("strategy has a negative probability");
    if (std::abs(p_.sum() - 1.0) > 1e-12) throw InvalidState("strategy does not sum to 1");
  }

  /// Clips negatives and rescales to a probability vector.
  static MixedStrategy from_weights(const RealVector& w) {
    RealVector p = w.cwiseMax(0.0);
    const double s = p.sum();
    if (!(s > 0)) throw InvalidState("strategy weights sum to zero");
    return MixedStrategy(p / s);
  }

  static MixedStrategy pure(Eigen::Index size, Eigen::Index index) {
    RealVector p = RealVector::Zero(size);
    p(index) = 1.0;
    return MixedStrategy(std::move(p));
  }

  static MixedStrategy uniform(Eigen::Index size) {
    return MixedStrategy(RealVector::Constant(size, 1.0 / static_cast<double>(size)));
  }

  const RealVector& probs() const { return p_; }
  Eigen::Index size() const { return p_.size(); }

  double total_variation(const MixedStrategy& other) const {
    if (other.size() != size()) throw ShapeError("total_variation: size mismatch");
    return 0.5 * (p_ - other.p_).cwiseAbs().sum();
  }

 private:
  RealVector p_;
};

struct EquilibriumPair {
  MixedStrategy x;  // player I
  MixedStrategy y;  // player II
  double value;
  double exploitability;
};

enum class Side { kI, kII };

namespace detail {
inline void check_shapes(const MatrixGame& g, const MixedStrategy& x, const MixedStrategy& y) {
  if (x.size() != g.rows() || y.size() != g.cols()) throw ShapeError("strategy/game shape mismatch");
}
}  // namespace detail

inline double payoff(const MatrixGame& g, const MixedStrategy& x, const MixedStrategy& y) {
  detail::check_shapes(g, x, y);
  return x.probs().dot(g.payoff() * y.probs());
}

/// max_i (A y)_i - min_j (x^T A)_j: the combined gain available to the two
/// players from unilateral deviation. Zero exactly at equilibrium.
inline double exploitability(const MatrixGame& g, const MixedStrategy& x, const MixedStrategy& y) {
  detail::check_shapes(g, x, y);
  const double best_row = (g.payoff() * y.probs()).maxCoeff();
  const double best_col = (x.probs().transpose() * g.payoff()).minCoeff();
  return std::max(0.0, best_row - best_col);
}

/// Pure best reply for `side` against `opponent`; ties go to the lowest index.
inline Eigen::Index best_response(const MatrixGame& g, const MixedStrategy& opponent, Side side) {
  constexpr double kTie = 1e-12;
  if (side == Side::kI) {
    if (opponent.size() != g.cols()) throw ShapeError("best_response: opponent shape mismatch");
    const RealVector gains = g.payoff() * opponent.probs();
    Eigen::Index best = 0;
    for (Eigen::Index i = 1; i < gains.size(); ++i) {
      if (gains(i) > gains(best) + kTie) best = i;
    }
    return best;
  }
  if (opponent.size() != g.rows()) throw ShapeError("best_response: opponent shape mismatch");
  const RealVector losses = g.payoff().transpose() * opponent.probs();
  Eigen::Index best = 0;
  for (Eigen::Index j = 1; j < losses.size(); ++j) {
    if (losses(j) < losses(best) - kTie) best = j;
  }
  return best;
}

struct SolveOptions {
  double tol = 1e-6;
  long max_iterations = 1'000'000;
  /// Nonzero seeds start regret matching from random regrets, which can
  /// select different equilibria of degenerate games.
  std::uint64_t seed = 0;
};

namespace detail {

inline EquilibriumPair make_pair(const MatrixGame& g, MixedStrategy x, MixedStrategy y) {
  const double v = payoff(g, x, y);
  const double e = exploitability(g, x, y);
  return {std::move(x), std::move(y), v, e};
}

inline std::vector<std::vector<Eigen::Index>> subsets_of_size(Eigen::Index n, Eigen::Index k) {
  std::vector<std::vector<Eigen::Index>> out;
  std::vector<Eigen::Index> cur;
  auto rec = [&](auto&& self, Eigen::Index start) -> void {
    if (static_cast<Eigen::Index>(cur.size()) == k) {
      out.push_back(cur);
      return;
    }
    for (Eigen::Index i = start; i < n; ++i) {
      cur.push_back(i);
      self(self, i + 1);
      cur.pop_back();
    }
  };
  rec(rec, 0);
  return out;
}

// Solves for weights w on `support` (of `m`'s rows) making every column in
// `against` pay the same value: [m_S^T  -1; 1^T 0] [w; v] = [0; 1].
inline std::optional<RealVector> indifference(const RealMatrix& m,
                                              const std::vector<Eigen::Index>& support,
                                              const std::vector<Eigen::Index>& against) {
  const auto k = static_cast<Eigen::Index>(support.size());
  RealMatrix sys = RealMatrix::Zero(k + 1, k + 1);
  RealVector rhs = RealVector::Zero(k + 1);
  for (Eigen::Index c = 0; c < k; ++c) {
    for (Eigen::Index s = 0; s < k; ++s) sys(c, s) = m(support[s], against[c]);
    sys(c, k) = -1.0;
  }
  sys.row(k).head(k).setOnes();
  rhs(k) = 1.0;
  Eigen::FullPivLU<RealMatrix> lu(sys);
  if (!lu.isInvertible()) return std::nullopt;
  const RealVector sol = lu.solve(rhs);
  RealVector w = RealVector::Zero(m.rows());
  for (Eigen::Index s = 0; s < k; ++s) {
    if (sol(s) < -1e-12) return std::nullopt;
    w(support[s]) = std::max(sol(s), 0.0);
  }
  return w;
}

// Support enumeration over equal-size supports; every game has an extreme
// equilibrium of this form with a nonsingular kernel.
inline std::optional<EquilibriumPair> solve_small(const MatrixGame& g) {
  const RealMatrix& a = g.payoff();
  const Eigen::Index kmax = std::min(a.rows(), a.cols());
  for (Eigen::Index k = 1; k <= kmax; ++k) {
    for (const auto& rows : subsets_of_size(a.rows(), k)) {
      for (const auto& cols : subsets_of_size(a.cols(), k)) {
        const auto x = indifference(a, rows, cols);
        if (!x) continue;
        const auto y = indifference(RealMatrix(a.transpose()), cols, rows);
        if (!y) continue;
        auto pair = make_pair(g, MixedStrategy::from_weights(*x), MixedStrategy::from_weights(*y));
        if (pair.exploitability <= 1e-12) return pair;
      }
    }
  }
  return std::nullopt;
}

// Smallest correction to `w0` (restricted to `support`) that makes every
// column in `against` pay the same: rows of `m` are the strategies being
// mixed. Returns nullopt if the corrected weights leave the simplex.
inline std::optional<RealVector> indifferent_near(const RealMatrix& m, const RealVector& w0,
                                                  const std::vector<Eigen::Index>& support,
                                                  const std::vector<Eigen::Index>& against) {
  const auto k = static_cast<Eigen::Index>(support.size());
  const auto c = static_cast<Eigen::Index>(against.size());
  RealMatrix sys = RealMatrix::Zero(c + 1, k + 1);
  RealVector z0(k + 1);
  for (Eigen::Index s = 0; s < k; ++s) z0(s) = w0(support[s]);
  z0.head(k) /= z0.head(k).sum();
  double v0 = 0.0;
  for (Eigen::Index j = 0; j < c; ++j) {
    for (Eigen::Index s = 0; s < k; ++s) sys(j, s) = m(support[s], against[j]);
    sys(j, k) = -1.0;
    v0 += sys.row(j).head(k).dot(z0.head(k));
  }
  z0(k) = v0 / static_cast<double>(c);
  sys.row(c).head(k).setOnes();
  RealVector rhs = RealVector::Zero(c + 1);
  rhs(c) = 1.0;
  const RealVector z = z0 + sys.completeOrthogonalDecomposition().solve(rhs - sys * z0);
  if ((sys * z - rhs).cwiseAbs().maxCoeff() > 1e-10) return std::nullopt;
  RealVector w = RealVector::Zero(m.rows());
  for (Eigen::Index s = 0; s < k; ++s) {
    if (z(s) < -1e-12) return std::nullopt;
    w(support[s]) = std::max(z(s), 0.0);
  }
  return w;
}

// Regret matching converges slowly near the end. Once the averages have
// settled, guess the supports and solve the indifference conditions on them.
inline std::optional<EquilibriumPair> polish(const MatrixGame& g, const RealVector& x, const RealVector& y,
                                             double tol) {
  const RealMatrix& a = g.payoff();
  const RealMatrix at = a.transpose();
  for (double cut : {1e-2, 1e-3, 1e-4, 1e-5}) {
    std::vector<Eigen::Index> sx, sy;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      if (x(i) > cut * x.maxCoeff()) sx.push_back(i);
    }
    for (Eigen::Index j = 0; j < y.size(); ++j) {
      if (y(j) > cut * y.maxCoeff()) sy.push_back(j);
    }
    const auto px = indifferent_near(a, x, sx, sy);
    const auto py = indifferent_near(at, y, sy, sx);
    if (!px || !py) continue;
    auto pair = make_pair(g, MixedStrategy::from_weights(*px), MixedStrategy::from_weights(*py));
    if (pair.exploitability <= tol) return pair;
  }
  return std::nullopt;
}

}  // namespace detail

/// Approximate equilibrium with exploitability <= tol. Games with at most
/// three rows and three columns are solved exactly by support enumeration;
/// larger games use alternating regret matching+ with linearly weighted
/// averages, polished on the guessed supports once they settle.
inline EquilibriumPair solve(const MatrixGame& g, const SolveOptions& opts = {}) {
  if (!(opts.tol > 0)) throw InvalidState("solve needs tol > 0");
  const RealMatrix& a = g.payoff();
  const Eigen::Index rows = a.rows();
  const Eigen::Index cols = a.cols();

  if (rows == 1) {
    const auto x = MixedStrategy::pure(1, 0);
    return detail::make_pair(g, x, MixedStrategy::pure(cols, best_response(g, x, Side::kII)));
  }
  if (cols == 1) {
    const auto y = MixedStrategy::pure(1, 0);
    return detail::make_pair(g, MixedStrategy::pure(rows, best_response(g, y, Side::kI)), y);
  }
  if (rows <= 3 && cols <= 3 && opts.seed == 0) {
    if (auto exact = detail::solve_small(g)) return *exact;
  }

  RealVector rx = RealVector::Zero(rows);
  RealVector ry = RealVector::Zero(cols);
  if (opts.seed != 0) {
    std::mt19937_64 gen(mix64(opts.seed));
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (Eigen::Index i = 0; i < rows; ++i) rx(i) = u(gen);
    for (Eigen::Index j = 0; j < cols; ++j) ry(j) = u(gen);
  }
  auto current = [](const RealVector& r) {
    const double s = r.sum();
    return s > 0 ? RealVector(r / s) : RealVector(RealVector::Constant(r.size(), 1.0 / r.size()));
  };
  RealVector sx = RealVector::Zero(rows);
  RealVector sy = RealVector::Zero(cols);
  double achieved = std::numeric_limits<double>::infinity();
  long next_check = 16;
  for (long t = 1; t <= opts.max_iterations; ++t) {
    const RealVector x = current(rx);
    const RealVector u_rows = a * current(ry);
    rx = (rx.array() + (u_rows.array() - x.dot(u_rows))).cwiseMax(0.0);
    const RealVector xn = current(rx);
    sx += static_cast<double>(t) * xn;

    const RealVector y = current(ry);
    const RealVector u_cols = -(xn.transpose() * a).transpose();
    ry = (ry.array() + (u_cols.array() - y.dot(u_cols))).cwiseMax(0.0);
    sy += static_cast<double>(t) * current(ry);

    if (t == next_check || t == opts.max_iterations) {
      next_check += std::max<long>(16, t / 8);
      auto pair = detail::make_pair(g, MixedStrategy::from_weights(sx), MixedStrategy::from_weights(sy));
      achieved = pair.exploitability;
      if (achieved <= opts.tol) return pair;
      if (achieved <= 1e-2) {
        if (auto polished = detail::polish(g, pair.x.probs(), pair.y.probs(), opts.tol)) return *polished;
      }
    }
  }
  throw NonConvergence("regret matching stopped after " + std::to_string(opts.max_iterations) +
                       " iterations with exploitability " + std::to_string(achieved));
}

// ---------------------------------------------------------------------------
// symmetrization over a finite group acting on player II's strategies

/// A finite group given by its action on columns: `column_perms[g][c]` is the
/// column f'f for group element g = f' and column f = c, and `row_map[g][e]`
/// is the row e_{f'} satisfying P(e_{f'}, f) = P(e, f'f).
struct GroupAction {
  std::vector<std::vector<Eigen::Index>> column_perms;
  std::vector<std::vector<Eigen::Index>> row_map;
};

namespace detail {

inline void check_group(const MatrixGame& g, const GroupAction& act) {
  const auto n = static_cast<std::size_t>(g.cols());
  if (act.column_perms.empty() || act.row_map.size() != act.column_perms.size()) {
    throw NotAGroup("group action needs one row map per element");
  }
  for (const auto& p : act.column_perms) {
    if (p.size() != n) throw NotAGroup("column permutation has the wrong length");
    std::vector<bool> seen(n, false);
    for (auto c : p) {
      if (c < 0 || static_cast<std::size_t>(c) >= n || seen[static_cast<std::size_t>(c)]) {
        throw NotAGroup("column map is not a permutation");
      }
      seen[static_cast<std::size_t>(c)] = true;
    }
  }
  for (const auto& r : act.row_map) {
    if (r.size() != static_cast<std::size_t>(g.rows())) throw NotAGroup("row map has the wrong length");
    for (auto e : r) {
      if (e < 0 || e >= g.rows()) throw NotAGroup("row map out of range");
    }
  }
  auto contains = [&](const std::vector<Eigen::Index>& p) {
    return std::find(act.column_perms.begin(), act.column_perms.end(), p) != act.column_perms.end();
  };
  std::vector<Eigen::Index> id(n);
  std::iota(id.begin(), id.end(), Eigen::Index{0});
  if (!contains(id)) throw NotAGroup("group lacks the identity");
  std::vector<Eigen::Index> comp(n);
  for (const auto& p : act.column_perms) {
    for (const auto& q : act.column_perms) {
      for (std::size_t c = 0; c < n; ++c) comp[c] = p[static_cast<std::size_t>(q[c])];
      if (!contains(comp)) throw NotAGroup("group is not closed under composition");
    }
  }
}

}  // namespace detail

/// Averages player I's strategy `base` (default: the pure best reply to the
/// uniform column mixture) over the group. The result pays the same against
/// every column in each orbit of the action.
inline MixedStrategy symmetrize(const MatrixGame& g, const GroupAction& act,
                                const std::optional<MixedStrategy>& base = std::nullopt) {
  detail::check_group(g, act);
  const RealMatrix& a = g.payoff();
  for (std::size_t k = 0; k < act.column_perms.size(); ++k) {
    for (Eigen::Index e = 0; e < a.rows(); ++e) {
      const Eigen::Index moved = act.row_map[k][static_cast<std::size_t>(e)];
      for (Eigen::Index c = 0; c < a.cols(); ++c) {
        const double lhs = a(moved, c);
        const double rhs = a(e, act.column_perms[k][static_cast<std::size_t>(c)]);
        if (std::abs(lhs - rhs) > 1e-12) {
          throw CovarianceViolation("payoff identity fails for element " + std::to_string(k) +
                                    ", row " + std::to_string(e) + ", column " + std::to_string(c));
        }
      }
    }
  }
  const MixedStrategy start =
      base ? *base
           : MixedStrategy::pure(a.rows(), best_response(g, MixedStrategy::uniform(a.cols()), Side::kI));
  if (start.size() != a.rows()) throw ShapeError("symmetrize: base strategy shape mismatch");
  RealVector avg = RealVector::Zero(a.rows());
  for (const auto& rows : act.row_map) {
    for (Eigen::Index e = 0; e < a.rows(); ++e) avg(rows[static_cast<std::size_t>(e)]) += start.probs()(e);
  }
  return MixedStrategy::from_weights(avg);
}

/// Cyclic group Z_n acting on the columns of a circulant game
/// A[e][c] = r[(c - e) mod n] by shifts; rows shift the opposite way.
inline GroupAction cyclic_action(Eigen::Index n) {
  GroupAction act;
  for (Eigen::Index k = 0; k < n; ++k) {
    std::vector<Eigen::Index> cols(static_cast<std::size_t>(n));
    std::vector<Eigen::Index> rows(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
      cols[static_cast<std::size_t>(i)] = (i + k) % n;
      rows[static_cast<std::size_t>(i)] = ((i - k) % n + n) % n;
    }
    act.column_perms.push_back(std::move(cols));
    act.row_map.push_back(std::move(rows));
  }
  return act;
}

/// Rock-paper-scissors: rows and columns ordered rock, paper, scissors.
inline MatrixGame rock_paper_scissors() {
  RealMatrix a(3, 3);
  a << 0, -1, 1,
       1, 0, -1,
      -1, 1, 0;
  return MatrixGame(a);
}

// ---------------------------------------------------------------------------
// equilibrium interchange

struct InterchangeReport {
  static constexpr double kSlackFactor = 10.0;
  bool passed = false;
  double exploitability_11 = 0;
  double exploitability_22 = 0;
  double exploitability_12 = 0;  ///< (x1, y2)
  double exploitability_21 = 0;  ///< (x2, y1)
  double value_spread = 0;       ///< max - min of the four payoffs
  double tol = 0;
  std::vector<std::string> failures;
};

/// Checks that the cross pairs of two equilibria are equilibria with the same
/// value, allowing kSlackFactor * tol.
inline InterchangeReport interchange_check(const MatrixGame& g, const EquilibriumPair& p1,
                                           const EquilibriumPair& p2, double tol) {
  InterchangeReport rep;
  rep.tol = tol;
  const double slack = InterchangeReport::kSlackFactor * tol;
  rep.exploitability_11 = exploitability(g, p1.x, p1.y);
  rep.exploitability_22 = exploitability(g, p2.x, p2.y);
  rep.exploitability_12 = exploitability(g, p1.x, p2.y);
  rep.exploitability_21 = exploitability(g, p2.x, p1.y);
  const double v[] = {payoff(g, p1.x, p1.y), payoff(g, p2.x, p2.y), payoff(g, p1.x, p2.y),
                      payoff(g, p2.x, p1.y)};
  rep.value_spread = *std::max_element(std::begin(v), std::end(v)) - *std::min_element(std::begin(v), std::end(v));
  if (rep.exploitability_11 > tol) rep.failures.push_back("first pair is not an equilibrium");
  if (rep.exploitability_22 > tol) rep.failures.push_back("second pair is not an equilibrium");
  if (rep.exploitability_12 > slack) rep.failures.push_back("(x1, y2) is not an equilibrium");
  if (rep.exploitability_21 > slack) rep.failures.push_back("(x2, y1) is not an equilibrium");
  if (rep.value_spread > slack) rep.failures.push_back("equilibrium values disagree");
  rep.passed = rep.failures.empty();
  return rep;
}

}  // namespace qgames
