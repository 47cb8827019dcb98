#pragma once

// Quantum channels (H^{⊗N} -> H^{⊗M}) as Kraus lists with a cached Choi
// matrix, the optimal universal cloner, and exact Haar-averaged fidelities.
//
// Haar averages use the Choi matrix J = sum_ij |i><j| ⊗ T(|i><j|) (input
// factors first). For phi = psi^{⊗N} and Psi = psi^{⊗M},
//
//   <Psi| T(phi phi^†) |Psi> = tr[ J ((phi phi^†)^T ⊗ Psi Psi^†) ],
//
// and the Haar integral of psi^{⊗(N+M)} is s_{N+M} / d[N+M], so the average
// global fidelity is tr[ J Γ_in(s_{N+M}) ] / d[N+M] with Γ_in the partial
// transpose over the N input factors. Single-clone fidelities use the same
// identity at order N+1 on the reduced Choi matrix.

#include <cmath>
#include <numeric>
#include <vector>

#include "qgames/core.hpp"
#include "qgames/symmetric_space.hpp"

namespace qgames {

class Channel {
 public:
  /// Declared input domain. Completeness is checked on this domain only.
  enum class Domain { kFull, kSymmetric };

  static constexpr double kCompletenessTol = 1e-10;

  Channel(std::size_t d, std::size_t n_in, std::size_t n_out, std::vector<Matrix> kraus,
          Domain domain = Domain::kFull, std::size_t cap = kDefaultSizeCap)
      : d_(d), n_in_(n_in), n_out_(n_out), domain_(domain), kraus_(std::move(kraus)) {
    if (d < 1 || n_in < 1 || n_out < 1) throw InvalidArity("channel needs d, n_in, n_out >= 1");
    if (kraus_.empty()) throw ShapeError("channel needs at least one Kraus operator");
    in_dim_ = checked_power(d, n_in, cap);
    out_dim_ = checked_power(d, n_out, cap);
    checked_power(d, n_in + n_out, cap);
    for (const auto& k : kraus_) {
      if (static_cast<std::size_t>(k.rows()) != out_dim_ ||
          static_cast<std::size_t>(k.cols()) != in_dim_) {
        throw ShapeError("Kraus operator has the wrong shape");
      }
    }
    const double defect = completeness_defect();
    if (defect > kCompletenessTol) {
      throw NotTracePreserving("Kraus completeness defect " + std::to_string(defect) +
                               " on the declared domain");
    }
    build_choi();
  }

  std::size_t d() const { return d_; }
  std::size_t n_in() const { return n_in_; }
  std::size_t n_out() const { return n_out_; }
  std::size_t in_dim() const { return in_dim_; }
  std::size_t out_dim() const { return out_dim_; }
  Domain domain() const { return domain_; }
  const std::vector<Matrix>& kraus() const { return kraus_; }
  const Matrix& choi() const { return choi_; }

  /// Max-entry deviation of sum K^†K from the identity on the domain.
  double completeness_defect() const {
    Matrix sum = Matrix::Zero(static_cast<Eigen::Index>(in_dim_), static_cast<Eigen::Index>(in_dim_));
    for (const auto& k : kraus_) sum.noalias() += k.adjoint() * k;
    if (domain_ == Domain::kSymmetric) {
      const SymBasis basis(d_, n_in_);
      const Matrix restricted = basis.compress(sum);
      return (restricted - Matrix::Identity(restricted.rows(), restricted.cols())).cwiseAbs().maxCoeff();
    }
    return (sum - Matrix::Identity(sum.rows(), sum.cols())).cwiseAbs().maxCoeff();
  }

 private:
  void build_choi() {
    const auto n = static_cast<Eigen::Index>(in_dim_ * out_dim_);
    choi_ = Matrix::Zero(n, n);
    Vector v(n);
    for (const auto& k : kraus_) {
      for (Eigen::Index i = 0; i < k.cols(); ++i) {
        v.segment(i * k.rows(), k.rows()) = k.col(i);
      }
      choi_.noalias() += v * v.adjoint();
    }
  }

  std::size_t d_;
  std::size_t n_in_;
  std::size_t n_out_;
  Domain domain_;
  std::vector<Matrix> kraus_;
  std::size_t in_dim_ = 0;
  std::size_t out_dim_ = 0;
  Matrix choi_;
};

/// sum_k K rho K^† on an arbitrary operator.
inline Matrix apply_kraus(const Channel& ch, const Matrix& x) {
  if (static_cast<std::size_t>(x.rows()) != ch.in_dim() || x.rows() != x.cols()) {
    throw ShapeError("channel input has the wrong dimension");
  }
  Matrix out = Matrix::Zero(static_cast<Eigen::Index>(ch.out_dim()),
                            static_cast<Eigen::Index>(ch.out_dim()));
  for (const auto& k : ch.kraus()) out.noalias() += k * x * k.adjoint();
  return out;
}

/// The same map evaluated from the Choi matrix.
inline Matrix apply_choi(const Channel& ch, const Matrix& x) {
  if (static_cast<std::size_t>(x.rows()) != ch.in_dim() || x.rows() != x.cols()) {
    throw ShapeError("channel input has the wrong dimension");
  }
  const auto din = static_cast<Eigen::Index>(ch.in_dim());
  const auto dout = static_cast<Eigen::Index>(ch.out_dim());
  Matrix out = Matrix::Zero(dout, dout);
  for (Eigen::Index i = 0; i < din; ++i) {
    for (Eigen::Index j = 0; j < din; ++j) {
      if (x(i, j) == cplx(0.0)) continue;
      out += x(i, j) * ch.choi().block(i * dout, j * dout, dout, dout);
    }
  }
  return out;
}

inline DensityOperator apply(const Channel& ch, const DensityOperator& rho) {
  if (rho.dim() != ch.in_dim()) throw ShapeError("channel input has the wrong dimension");
  if (ch.domain() == Channel::Domain::kSymmetric && ch.n_in() > 1) {
    const Matrix s = sym_projector(ch.d(), ch.n_in());
    if ((s * rho.matrix() * s - rho.matrix()).cwiseAbs().maxCoeff() > 1e-10) {
      throw InvalidState("input lies outside the channel's symmetric domain");
    }
  }
  return DensityOperator(apply_kraus(ch, rho.matrix()));
}

// ---------------------------------------------------------------------------
// constructions

/// rho -> (d[N]/d[M]) s_M (rho ⊗ 1^{⊗(M-N)}) s_M, one Kraus operator per
/// computational basis vector of the (M-N)-fold ancilla.
inline Channel optimal_cloner(std::size_t d, std::size_t n, std::size_t m,
                              std::size_t cap = kDefaultSizeCap) {
  if (n < 1) throw InvalidArity("cloner needs N >= 1");
  if (m < n) throw InvalidArity("cloner needs M >= N");
  checked_power(d, n + m, cap);
  const Matrix s = sym_projector(d, m, cap);
  const std::size_t in_dim = checked_power(d, n, cap);
  const std::size_t anc = checked_power(d, m - n, cap);
  const double scale = std::sqrt(static_cast<double>(dim_sym(d, n)) /
                                 static_cast<double>(dim_sym(d, m)));
  std::vector<Matrix> kraus;
  kraus.reserve(anc);
  for (std::size_t e = 0; e < anc; ++e) {
    Matrix k(s.rows(), static_cast<Eigen::Index>(in_dim));
    for (std::size_t a = 0; a < in_dim; ++a) {
      k.col(static_cast<Eigen::Index>(a)) = scale * s.col(static_cast<Eigen::Index>(a * anc + e));
    }
    kraus.push_back(std::move(k));
  }
  return Channel(d, n, m, std::move(kraus), Channel::Domain::kSymmetric, cap);
}

/// rho -> rho ⊗ (1/d)^{⊗(M-N)}.
inline Channel identity_embedding(std::size_t d, std::size_t n, std::size_t m,
                                  std::size_t cap = kDefaultSizeCap) {
  if (m < n) throw InvalidArity("embedding needs M >= N");
  const std::size_t in_dim = checked_power(d, n, cap);
  const std::size_t anc = checked_power(d, m - n, cap);
  std::vector<Matrix> kraus;
  for (std::size_t e = 0; e < anc; ++e) {
    Matrix k = Matrix::Zero(static_cast<Eigen::Index>(in_dim * anc),
                            static_cast<Eigen::Index>(in_dim));
    for (std::size_t a = 0; a < in_dim; ++a) {
      k(static_cast<Eigen::Index>(a * anc + e), static_cast<Eigen::Index>(a)) =
          1.0 / std::sqrt(static_cast<double>(anc));
    }
    kraus.push_back(std::move(k));
  }
  return Channel(d, n, m, std::move(kraus), Channel::Domain::kFull, cap);
}

/// rho -> tr(rho) 1/d^M.
inline Channel depolarizing_output(std::size_t d, std::size_t n, std::size_t m,
                                   std::size_t cap = kDefaultSizeCap) {
  const std::size_t in_dim = checked_power(d, n, cap);
  const std::size_t out_dim = checked_power(d, m, cap);
  std::vector<Matrix> kraus;
  kraus.reserve(in_dim * out_dim);
  for (std::size_t a = 0; a < out_dim; ++a) {
    for (std::size_t b = 0; b < in_dim; ++b) {
      Matrix k = Matrix::Zero(static_cast<Eigen::Index>(out_dim), static_cast<Eigen::Index>(in_dim));
      k(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) =
          1.0 / std::sqrt(static_cast<double>(out_dim));
      kraus.push_back(std::move(k));
    }
  }
  return Channel(d, n, m, std::move(kraus), Channel::Domain::kFull, cap);
}

/// Convex combination of channels with the same arity. The domain is
/// symmetric if any component's is.
inline Channel mix(std::span<const Channel> channels, std::span<const double> weights) {
  if (channels.empty() || channels.size() != weights.size()) {
    throw ShapeError("mix: channel and weight lists must be non-empty and equal length");
  }
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  if (std::abs(total - 1.0) > 1e-12) throw InvalidState("mix: weights must sum to 1");
  std::vector<Matrix> kraus;
  auto domain = Channel::Domain::kFull;
  const Channel& first = channels.front();
  for (std::size_t i = 0; i < channels.size(); ++i) {
    const Channel& c = channels[i];
    if (c.d() != first.d() || c.n_in() != first.n_in() || c.n_out() != first.n_out()) {
      throw ShapeError("mix: channels have different arities");
    }
    if (weights[i] < 0) throw InvalidState("mix: negative weight");
    if (c.domain() == Channel::Domain::kSymmetric) domain = Channel::Domain::kSymmetric;
    if (weights[i] == 0) continue;
    for (const auto& k : c.kraus()) kraus.push_back(std::sqrt(weights[i]) * k);
  }
  return Channel(first.d(), first.n_in(), first.n_out(), std::move(kraus), domain);
}

/// Post-composes a unitary on the output space.
inline Channel then_unitary(const Channel& ch, const Matrix& u) {
  if (static_cast<std::size_t>(u.rows()) != ch.out_dim() || u.rows() != u.cols()) {
    throw ShapeError("output unitary has the wrong dimension");
  }
  std::vector<Matrix> kraus;
  kraus.reserve(ch.kraus().size());
  for (const auto& k : ch.kraus()) kraus.push_back(u * k);
  return Channel(ch.d(), ch.n_in(), ch.n_out(), std::move(kraus), ch.domain());
}

/// Stinespring form: `isometry` maps C^{d^N} into C^{d^M} ⊗ C^{ancilla_dim}
/// (ancilla index fastest); the ancilla is traced out.
inline Channel from_isometry(std::size_t d, std::size_t n, std::size_t m, const Matrix& isometry,
                             std::size_t ancilla_dim, std::size_t cap = kDefaultSizeCap) {
  const std::size_t in_dim = checked_power(d, n, cap);
  const std::size_t out_dim = checked_power(d, m, cap);
  if (static_cast<std::size_t>(isometry.rows()) != out_dim * ancilla_dim ||
      static_cast<std::size_t>(isometry.cols()) != in_dim) {
    throw ShapeError("isometry has the wrong shape");
  }
  std::vector<Matrix> kraus;
  kraus.reserve(ancilla_dim);
  for (std::size_t a = 0; a < ancilla_dim; ++a) {
    Matrix k(static_cast<Eigen::Index>(out_dim), static_cast<Eigen::Index>(in_dim));
    for (std::size_t o = 0; o < out_dim; ++o) {
      k.row(static_cast<Eigen::Index>(o)) = isometry.row(static_cast<Eigen::Index>(o * ancilla_dim + a));
    }
    kraus.push_back(std::move(k));
  }
  return Channel(d, n, m, std::move(kraus), Channel::Domain::kFull, cap);
}

// ---------------------------------------------------------------------------
// fidelities

inline double global_fidelity(const Channel& ch, const PureState& psi) {
  if (psi.dim() != ch.d()) throw ShapeError("global_fidelity: state has the wrong dimension");
  const Vector in = tensor_power(psi, ch.n_in()).amplitudes();
  const Vector out = tensor_power(psi, ch.n_out()).amplitudes();
  const Matrix sigma = apply_kraus(ch, in * in.adjoint());
  return (out.adjoint() * sigma * out)(0, 0).real();
}

/// Reduced output state of clone k (1-based) for input psi^{⊗N}.
inline Matrix single_clone_output(const Channel& ch, const PureState& psi, std::size_t k) {
  if (k < 1 || k > ch.n_out()) throw IndexError("clone index out of range");
  if (psi.dim() != ch.d()) throw ShapeError("single_clone_output: state has the wrong dimension");
  const Vector in = tensor_power(psi, ch.n_in()).amplitudes();
  const Matrix sigma = apply_kraus(ch, in * in.adjoint());
  const std::vector<std::size_t> dims(ch.n_out(), ch.d());
  const std::size_t keep[] = {k - 1};
  return partial_trace(sigma, dims, keep);
}

inline double single_clone_fidelity(const Channel& ch, const PureState& psi, std::size_t k) {
  const Matrix reduced = single_clone_output(ch, psi, k);
  return (psi.amplitudes().adjoint() * reduced * psi.amplitudes())(0, 0).real();
}

namespace detail {

// tr[J Γ_in(s_{n_in + n_out})] / d[n_in + n_out] for a Choi matrix J on
// n_in input factors followed by n_out output factors.
inline double haar_avg_from_choi(const Matrix& choi, std::size_t d, std::size_t n_in,
                                 std::size_t n_out, std::size_t cap) {
  const std::size_t total = n_in + n_out;
  const std::vector<std::size_t> dims(total, d);
  std::vector<std::size_t> inputs(n_in);
  std::iota(inputs.begin(), inputs.end(), std::size_t{0});
  const Matrix moment = partial_transpose(haar_moment(d, total, cap), dims, inputs);
  return trace_of_product(choi, moment).real();
}

}  // namespace detail

inline double haar_avg_global_fidelity(const Channel& ch, std::size_t cap = kDefaultSizeCap) {
  return detail::haar_avg_from_choi(ch.choi(), ch.d(), ch.n_in(), ch.n_out(), cap);
}

/// Choi matrix of psi^{⊗N} -> (clone k of the output), k 1-based.
inline Matrix reduced_choi(const Channel& ch, std::size_t k) {
  if (k < 1 || k > ch.n_out()) throw IndexError("clone index out of range");
  const std::vector<std::size_t> dims(ch.n_in() + ch.n_out(), ch.d());
  std::vector<std::size_t> keep(ch.n_in());
  std::iota(keep.begin(), keep.end(), std::size_t{0});
  keep.push_back(ch.n_in() + k - 1);
  return partial_trace(ch.choi(), dims, keep);
}

inline double single_clone_haar_fidelity(const Channel& ch, std::size_t k,
                                         std::size_t cap = kDefaultSizeCap) {
  return detail::haar_avg_from_choi(reduced_choi(ch, k), ch.d(), ch.n_in(), 1, cap);
}

struct ValueFormulas {
  double global_value;  ///< d[N]/d[M]
  double single_value;  ///< (N(d+M)+M-N)/((d+N)M)
  double asym_bound;    ///< (N(d+M)+M-N)/(d+N)
};

inline ValueFormulas value_formulas(std::size_t d, std::size_t n, std::size_t m) {
  if (n < 1 || m < n) throw InvalidArity("value formulas need 1 <= N <= M");
  const std::size_t num = n * (d + m) + m - n;
  const std::size_t den = d + n;
  return {static_cast<double>(dim_sym(d, n)) / static_cast<double>(dim_sym(d, m)),
          static_cast<double>(num) / static_cast<double>(den * m),
          static_cast<double>(num) / static_cast<double>(den)};
}

}  // namespace qgames
