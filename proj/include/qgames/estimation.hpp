#pragma once

// Qubit state estimation: measure psi^{⊗N} with a covariant POVM built from
// spin-coherent measurement vectors, then resend the coherent state aligned
// with the outcome direction.
//
// Why aligned guesses with exact completeness reach (N+1)/(N+2): let the
// effects be E_r = c_r |Phi_r><Phi_r| with Phi_r = phi_r^{⊗N} and guesses
// phi_r. Then
//   F = sum_r tr[(E_r ⊗ phi_r phi_r^†) s_{N+1}] / d[N+1]
//     = sum_r c_r tr[(phi_r phi_r^†)^{⊗(N+1)} s_{N+1}] / (N+2)
//     = sum_r c_r / (N+2)                        (s fixes product states)
//     = tr[1_sym] / (N+2) = (N+1)/(N+2)          (completeness, trace).

#include <cmath>
#include <numbers>
#include <span>
#include <vector>

#include "qgames/core.hpp"
#include "qgames/nnls.hpp"
#include "qgames/swap_payoff.hpp"
#include "qgames/symmetric_space.hpp"

namespace qgames {

/// A point on the Bloch sphere: polar angle theta in [0, pi], azimuth
/// psi_phase in [0, 2pi).
struct Direction {
  double theta = 0.0;
  double psi_phase = 0.0;

  Direction() = default;
  Direction(double theta_, double psi_phase_) : theta(theta_), psi_phase(psi_phase_) {
    constexpr double kTwoPi = 2.0 * std::numbers::pi;
    if (!(theta >= 0.0 && theta <= std::numbers::pi)) {
      throw ShapeError("direction theta outside [0, pi]");
    }
    psi_phase = std::fmod(psi_phase, kTwoPi);
    if (psi_phase < 0) psi_phase += kTwoPi;
  }

  /// Antipodal direction.
  Direction opposite() const {
    return Direction(std::numbers::pi - theta, psi_phase + std::numbers::pi);
  }
};

inline double binomial(std::size_t n, std::size_t k) {
  if (k > n) return 0.0;
  double r = 1.0;
  for (std::size_t i = 1; i <= k; ++i) r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
  return r;
}

/// Column m' = j of the spin-j rotation exp(-i theta J_y), i.e.
/// d^j_{m,j}(theta) = sqrt(binom(2j, j+m)) cos(theta/2)^{j+m} sin(theta/2)^{j-m}.
/// Indices are doubled so half-integer spins stay integral.
inline double wigner_d_top(int two_j, int two_m, double theta) {
  if (two_j < 0 || two_m < -two_j || two_m > two_j || (two_j - two_m) % 2 != 0) {
    throw IndexError("wigner_d_top: invalid (2j, 2m) = (" + std::to_string(two_j) + ", " +
                     std::to_string(two_m) + ")");
  }
  const auto up = static_cast<std::size_t>((two_j + two_m) / 2);
  const auto down = static_cast<std::size_t>((two_j - two_m) / 2);
  return std::sqrt(binomial(static_cast<std::size_t>(two_j), up)) *
         std::pow(std::cos(theta / 2), static_cast<double>(up)) *
         std::pow(std::sin(theta / 2), static_cast<double>(down));
}

/// exp(-i psi J_z) exp(-i theta J_y)|0>, the qubit pointing along `dir`.
inline PureState coherent_qubit(const Direction& dir) {
  Vector v(2);
  v(0) = std::polar(std::cos(dir.theta / 2), -dir.psi_phase / 2);
  v(1) = std::polar(std::sin(dir.theta / 2), dir.psi_phase / 2);
  return PureState::normalized(v);
}

/// sum_m e^{-i psi m} d^{N/2}_{m,N/2}(theta) |m> in the (N+1)-dim symmetric
/// basis (column k <-> m = N/2 - k). Equals coherent_qubit(dir)^{⊗N} there.
inline PureState measurement_vector(std::size_t n, const Direction& dir) {
  if (n < 1) throw InvalidArity("measurement_vector needs N >= 1");
  const int two_j = static_cast<int>(n);
  Vector v(static_cast<Eigen::Index>(n + 1));
  for (std::size_t k = 0; k <= n; ++k) {
    const int two_m = two_j - 2 * static_cast<int>(k);
    const double m = two_m / 2.0;
    v(static_cast<Eigen::Index>(k)) =
        std::polar(wigner_d_top(two_j, two_m, dir.theta), -dir.psi_phase * m);
  }
  return PureState::normalized(v);
}

/// POVM on the N-copy symmetric subspace with a guess state per outcome.
class Povm {
 public:
  static constexpr double kCompletenessTol = 1e-8;
  static constexpr double kPsdTol = 1e-10;

  Povm(std::size_t n, std::vector<Matrix> effects, std::vector<PureState> guesses,
       double completeness_tol = kCompletenessTol)
      : n_(n), effects_(std::move(effects)), guesses_(std::move(guesses)) {
    if (n < 1) throw InvalidArity("POVM needs N >= 1");
    if (effects_.empty() || effects_.size() != guesses_.size()) {
      throw ShapeError("POVM needs one guess per effect");
    }
    const auto dim = static_cast<Eigen::Index>(n + 1);
    for (std::size_t r = 0; r < effects_.size(); ++r) {
      if (effects_[r].rows() != dim || effects_[r].cols() != dim) {
        throw ShapeError("POVM effect has the wrong dimension");
      }
      if (guesses_[r].dim() != 2) throw ShapeError("POVM guesses must be qubits");
      if (hermiticity_defect(effects_[r]) > 1e-12 || min_eigenvalue(effects_[r]) < -kPsdTol) {
        throw InvalidState("POVM effect " + std::to_string(r) + " is not PSD");
      }
    }
    residual_ = completeness_residual();
    if (residual_ > completeness_tol) {
      throw IncompletePovm("POVM completeness residual " + std::to_string(residual_) +
                           " exceeds tolerance");
    }
  }

  std::size_t n() const { return n_; }
  std::size_t size() const { return effects_.size(); }
  const std::vector<Matrix>& effects() const { return effects_; }
  const std::vector<PureState>& guesses() const { return guesses_; }
  /// Frobenius norm of sum_r E_r - 1 on the symmetric subspace.
  double residual() const { return residual_; }

  double completeness_residual() const {
    const auto dim = static_cast<Eigen::Index>(n_ + 1);
    Matrix sum = Matrix::Zero(dim, dim);
    for (const auto& e : effects_) sum += e;
    return (sum - Matrix::Identity(dim, dim)).norm();
  }

  /// Same measurement, different resend states.
  Povm with_guesses(std::vector<PureState> guesses) const {
    return Povm(n_, effects_, std::move(guesses), std::max(kCompletenessTol, residual_));
  }

 private:
  std::size_t n_;
  std::vector<Matrix> effects_;
  std::vector<PureState> guesses_;
  double residual_ = 0.0;
};

/// Antipodal pair for N = 1, otherwise (N+1)^2 Fibonacci-sphere points.
inline std::vector<Direction> default_directions(std::size_t n) {
  if (n < 1) throw InvalidArity("default_directions needs N >= 1");
  if (n == 1) return {Direction(0.0, 0.0), Direction(std::numbers::pi, 0.0)};
  const std::size_t count = (n + 1) * (n + 1);
  const double golden_angle = std::numbers::pi * (3.0 - std::sqrt(5.0));
  std::vector<Direction> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double z = 1.0 - (2.0 * static_cast<double>(i) + 1.0) / static_cast<double>(count);
    out.emplace_back(std::acos(z), golden_angle * static_cast<double>(i));
  }
  return out;
}

struct DesignWeights {
  RealVector weights;  ///< c_r >= 0, one per direction
  double residual;     ///< Frobenius norm of sum_r c_r |Phi_r><Phi_r| - 1
};

/// Nonnegative least-squares weights for sum_r c_r |Phi_r><Phi_r| = 1 on the
/// n-copy symmetric subspace.
inline DesignWeights solve_design_weights(std::size_t n, const std::vector<Direction>& directions) {
  const auto dim = static_cast<Eigen::Index>(n + 1);
  // Real linear system over the real and imaginary parts of every entry.
  const Eigen::Index rows = 2 * dim * dim;
  Eigen::MatrixXd a(rows, static_cast<Eigen::Index>(directions.size()));
  for (std::size_t r = 0; r < directions.size(); ++r) {
    const Matrix proj = measurement_vector(n, directions[r]).projector();
    const Eigen::Map<const Vector> flat(proj.data(), dim * dim);
    a.col(static_cast<Eigen::Index>(r)) << flat.real(), flat.imag();
  }
  Eigen::VectorXd b = Eigen::VectorXd::Zero(rows);
  for (Eigen::Index i = 0; i < dim; ++i) b(i * dim + i) = 1.0;
  NnlsResult sol = nnls(a, b);
  return {std::move(sol.x), sol.residual_norm};
}

namespace detail {

inline Povm povm_from_weights(std::size_t n, const std::vector<Direction>& directions,
                              const RealVector& weights, double tol) {
  std::vector<Matrix> effects;
  std::vector<PureState> guesses;
  for (std::size_t r = 0; r < directions.size(); ++r) {
    const double c = weights(static_cast<Eigen::Index>(r));
    if (c <= 0) continue;
    effects.push_back(c * measurement_vector(n, directions[r]).projector());
    guesses.push_back(coherent_qubit(directions[r]));
  }
  if (effects.empty()) throw IncompletePovm("no direction received positive weight");
  return Povm(n, std::move(effects), std::move(guesses), tol);
}

}  // namespace detail

/// Solves sum_r c_r |Phi_r><Phi_r| = 1 for c_r >= 0 by nonnegative least
/// squares; effects c_r |Phi_r><Phi_r| with guesses along each direction.
/// Outcomes with zero weight are dropped.
inline Povm build_povm(std::size_t n, const std::vector<Direction>& directions,
                       double tol = Povm::kCompletenessTol) {
  if (n < 1) throw InvalidArity("build_povm needs N >= 1");
  if (directions.size() < n + 1) {
    throw IncompletePovm("build_povm: " + std::to_string(directions.size()) +
                         " directions cannot span the symmetric subspace; use at least " +
                         std::to_string(n + 1) + " (more directions help)");
  }
  const DesignWeights w = solve_design_weights(n, directions);
  if (w.residual > tol) {
    throw IncompletePovm("build_povm: completeness residual " + std::to_string(w.residual) +
                         " exceeds tolerance; try more (or better spread) directions");
  }
  return detail::povm_from_weights(n, directions, w.weights, tol);
}

/// Covariant (universal) estimator. Weights w_r make the directions a
/// weighted design of order N+1: sum_r w_r |Phi'_r><Phi'_r| = 1 on the
/// (N+1)-copy symmetric subspace. Tracing out one copy turns this into
/// completeness at order N up to the factor (N+2)/(N+1), so the effects with
/// c_r = w_r (N+1)/(N+2) form a POVM whose aligned-guess payoff is
/// (N+1)/(N+2) against every pure state, not only on Haar average.
inline Povm optimal_povm(std::size_t n, double tol = Povm::kCompletenessTol) {
  if (n < 1) throw InvalidArity("optimal_povm needs N >= 1");
  const auto directions = default_directions(n + 1);
  const DesignWeights w = solve_design_weights(n + 1, directions);
  if (w.residual > tol) {
    throw IncompletePovm("optimal_povm: design residual " + std::to_string(w.residual) +
                         " exceeds tolerance");
  }
  const double scale = static_cast<double>(n + 1) / static_cast<double>(n + 2);
  return detail::povm_from_weights(n, directions, scale * w.weights, tol);
}

/// Outcome probabilities tr[E_r Sym(psi^{⊗N})].
inline std::vector<double> outcome_probabilities(const Povm& povm, const PureState& psi) {
  if (psi.dim() != 2) throw ShapeError("estimation inputs are qubits");
  const SymBasis basis(2, povm.n());
  const Vector v = basis.compress(tensor_power(psi, povm.n()).amplitudes());
  std::vector<double> p;
  p.reserve(povm.size());
  for (const auto& e : povm.effects()) p.push_back((v.adjoint() * e * v)(0, 0).real());
  return p;
}

/// The state resent to the referee: sum_r p_r |phi_r><phi_r|. The p_r are
/// renormalized so the completeness residual cannot leak into the trace.
inline DensityOperator respond(const Povm& povm, const PureState& psi) {
  const auto p = outcome_probabilities(povm, psi);
  double total = 0.0;
  Matrix sigma = Matrix::Zero(2, 2);
  for (std::size_t r = 0; r < p.size(); ++r) {
    const double pr = std::max(p[r], 0.0);
    sigma += pr * povm.guesses()[r].projector();
    total += pr;
  }
  sigma /= total;
  sigma = (sigma + sigma.adjoint()) / 2.0;
  return DensityOperator(sigma);
}

/// Expected referee payoff against a fixed pure state.
inline double state_payoff(const Povm& povm, const PureState& psi) {
  return expected_payoff(DensityOperator(psi), respond(povm, psi));
}

/// Exact Haar average sum_r tr[(E_r ⊗ sigma_r) s_{N+1}] / d[N+1] for
/// arbitrary resend states sigma_r (one qubit density matrix per outcome).
inline double mean_fidelity(const Povm& povm, std::span<const Matrix> outputs) {
  if (outputs.size() != povm.size()) throw ShapeError("mean_fidelity: one output per outcome");
  const std::size_t n = povm.n();
  const SymBasis in_basis(2, n);
  const SymBasis out_basis(2, n + 1);
  double total = 0.0;
  for (std::size_t r = 0; r < povm.size(); ++r) {
    if (outputs[r].rows() != 2 || outputs[r].cols() != 2) throw ShapeError("outputs are qubit states");
    const Matrix joint = kron(in_basis.embed(povm.effects()[r]), outputs[r]);
    total += out_basis.compress(joint).trace().real();
  }
  return total / static_cast<double>(dim_sym(2, n + 1));
}

/// Exact Haar-averaged fidelity of the measure-and-resend strategy.
inline double mean_fidelity(const Povm& povm) {
  std::vector<Matrix> outputs;
  outputs.reserve(povm.size());
  for (const auto& g : povm.guesses()) outputs.push_back(g.projector());
  return mean_fidelity(povm, outputs);
}

}  // namespace qgames
