#pragma once

// Dense complex linear algebra for pure states and density operators:
// tensor powers, partial traces and transposes, overlaps, and seeded
// Haar-random sampling.

#include <Eigen/Dense>

#include <algorithm>
#include <complex>
#include <cstdint>
#include <numeric>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "qgames/errors.hpp"

namespace qgames {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

inline constexpr std::size_t kDefaultSizeCap = 4096;

namespace tol {
inline constexpr double kNorm = 1e-12;
inline constexpr double kHermitian = 1e-12;
inline constexpr double kTrace = 1e-12;
inline constexpr double kPsd = 1e-10;
}  // namespace tol

/// base^exp, throwing SizeCapExceeded once the result passes `cap`.
inline std::size_t checked_power(std::size_t base, std::size_t exp,
                                 std::size_t cap = kDefaultSizeCap) {
  std::size_t result = 1;
  for (std::size_t i = 0; i < exp; ++i) {
    result *= base;
    if (result > cap) {
      throw SizeCapExceeded("dimension " + std::to_string(base) + "^" +
                            std::to_string(exp) + " exceeds size cap " +
                            std::to_string(cap));
    }
  }
  return result;
}

inline double hermiticity_defect(const Matrix& m) {
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

/// Smallest eigenvalue of the Hermitian part of `m`.
inline double min_eigenvalue(const Matrix& m) {
  const Matrix h = (m + m.adjoint()) / 2.0;
  Eigen::SelfAdjointEigenSolver<Matrix> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

inline Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

inline Vector kron(const Vector& a, const Vector& b) {
  Vector out(a.size() * b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    out.segment(i * b.size(), b.size()) = a(i) * b;
  }
  return out;
}

/// k-fold Kronecker power of a square matrix.
inline Matrix kron_power(const Matrix& a, std::size_t k,
                         std::size_t cap = kDefaultSizeCap) {
  checked_power(static_cast<std::size_t>(a.rows()), k, cap);
  Matrix out = Matrix::Identity(1, 1);
  for (std::size_t i = 0; i < k; ++i) out = kron(out, a);
  return out;
}

class PureState {
 public:
  explicit PureState(Vector amplitudes) : amp_(std::move(amplitudes)) {
    if (amp_.size() == 0) throw ShapeError("pure state must have dim >= 1");
    if (std::abs(amp_.norm() - 1.0) > tol::kNorm) {
      throw InvalidState("pure state norm " + std::to_string(amp_.norm()) +
                         " differs from 1");
    }
  }

  /// Rescales `v` to unit norm.
  static PureState normalized(const Vector& v) { return PureState(v / v.norm()); }

  static PureState basis(std::size_t dim, std::size_t index) {
    if (index >= dim) throw IndexError("basis index out of range");
    Vector v = Vector::Zero(static_cast<Eigen::Index>(dim));
    v(static_cast<Eigen::Index>(index)) = 1.0;
    return PureState(std::move(v));
  }

  std::size_t dim() const { return static_cast<std::size_t>(amp_.size()); }
  const Vector& amplitudes() const { return amp_; }
  Matrix projector() const { return amp_ * amp_.adjoint(); }

 private:
  Vector amp_;
};

class DensityOperator {
 public:
  /// Validates Hermiticity, unit trace and positivity.
  explicit DensityOperator(Matrix m) : m_(std::move(m)) {
    if (m_.rows() == 0 || m_.rows() != m_.cols()) {
      throw ShapeError("density operator must be square and non-empty");
    }
    const double herm = hermiticity_defect(m_);
    if (herm > tol::kHermitian) {
      throw InvalidState("density operator not Hermitian (defect " +
                         std::to_string(herm) + ")");
    }
    const double tr_err = std::abs(m_.trace() - cplx(1.0));
    if (tr_err > tol::kTrace) {
      throw InvalidState("density operator trace differs from 1 by " +
                         std::to_string(tr_err));
    }
    const double lo = min_eigenvalue(m_);
    if (lo < -tol::kPsd) {
      throw InvalidState("density operator has eigenvalue " + std::to_string(lo));
    }
  }

  explicit DensityOperator(const PureState& s) : m_(s.projector()) {}

  static DensityOperator maximally_mixed(std::size_t dim) {
    const auto n = static_cast<Eigen::Index>(dim);
    return DensityOperator(Matrix(Matrix::Identity(n, n) / static_cast<double>(dim)));
  }

  std::size_t dim() const { return static_cast<std::size_t>(m_.rows()); }
  const Matrix& matrix() const { return m_; }

 private:
  Matrix m_;
};

inline PureState tensor_power(const PureState& s, std::size_t k,
                              std::size_t cap = kDefaultSizeCap) {
  if (k < 1) throw InvalidArity("tensor_power needs k >= 1");
  checked_power(s.dim(), k, cap);
  Vector out = s.amplitudes();
  for (std::size_t i = 1; i < k; ++i) out = kron(out, s.amplitudes());
  return PureState::normalized(out);
}

inline DensityOperator tensor_product(const DensityOperator& a,
                                      const DensityOperator& b) {
  return DensityOperator(kron(a.matrix(), b.matrix()));
}

namespace detail {

inline std::size_t dims_product(std::span<const std::size_t> dims) {
  return std::accumulate(dims.begin(), dims.end(), std::size_t{1},
                         std::multiplies<>{});
}

// Row-major strides of a multi-index over `dims` (last factor fastest).
inline std::vector<std::size_t> strides_of(std::span<const std::size_t> dims) {
  std::vector<std::size_t> s(dims.size(), 1);
  for (std::size_t i = dims.size(); i-- > 1;) s[i - 1] = s[i] * dims[i];
  return s;
}

// Offsets into the full index space of every multi-index restricted to
// `factors` (others held at zero), enumerated in row-major order.
inline std::vector<std::size_t> offsets_over(std::span<const std::size_t> dims,
                                             const std::vector<std::size_t>& factors) {
  const auto strides = strides_of(dims);
  std::vector<std::size_t> out{0};
  for (std::size_t f : factors) {
    std::vector<std::size_t> next;
    next.reserve(out.size() * dims[f]);
    for (std::size_t base : out) {
      for (std::size_t v = 0; v < dims[f]; ++v) next.push_back(base + v * strides[f]);
    }
    out = std::move(next);
  }
  return out;
}

}  // namespace detail

/// Partial trace of an operator on a tensor product space. `keep` lists the
/// retained factors; they appear in the result in increasing order.
inline Matrix partial_trace(const Matrix& m, std::span<const std::size_t> factor_dims,
                            std::span<const std::size_t> keep) {
  const std::size_t total = detail::dims_product(factor_dims);
  if (m.rows() != m.cols() || static_cast<std::size_t>(m.rows()) != total) {
    throw ShapeError("partial_trace: factor dims do not match operator dimension");
  }
  if (keep.empty()) throw ShapeError("partial_trace: keep set is empty");
  std::vector<std::size_t> kept(keep.begin(), keep.end());
  std::sort(kept.begin(), kept.end());
  if (std::adjacent_find(kept.begin(), kept.end()) != kept.end() ||
      kept.back() >= factor_dims.size()) {
    throw ShapeError("partial_trace: invalid keep index");
  }
  std::vector<std::size_t> traced;
  for (std::size_t f = 0; f < factor_dims.size(); ++f) {
    if (!std::binary_search(kept.begin(), kept.end(), f)) traced.push_back(f);
  }
  const auto keep_off = detail::offsets_over(factor_dims, kept);
  const auto trace_off = detail::offsets_over(factor_dims, traced);
  const auto n = static_cast<Eigen::Index>(keep_off.size());
  Matrix out = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      cplx acc = 0.0;
      for (std::size_t t : trace_off) {
        acc += m(static_cast<Eigen::Index>(keep_off[i] + t),
                 static_cast<Eigen::Index>(keep_off[j] + t));
      }
      out(i, j) = acc;
    }
  }
  return out;
}

inline DensityOperator partial_trace(const DensityOperator& rho,
                                     std::span<const std::size_t> factor_dims,
                                     std::span<const std::size_t> keep) {
  return DensityOperator(partial_trace(rho.matrix(), factor_dims, keep));
}

/// Transposes the listed tensor factors of `m`, leaving the others alone.
inline Matrix partial_transpose(const Matrix& m, std::span<const std::size_t> factor_dims,
                                std::span<const std::size_t> transposed) {
  const std::size_t total = detail::dims_product(factor_dims);
  if (m.rows() != m.cols() || static_cast<std::size_t>(m.rows()) != total) {
    throw ShapeError("partial_transpose: factor dims do not match operator dimension");
  }
  const auto strides = detail::strides_of(factor_dims);
  Matrix out(m.rows(), m.cols());
  for (std::size_t r = 0; r < total; ++r) {
    for (std::size_t c = 0; c < total; ++c) {
      std::size_t r2 = r;
      std::size_t c2 = c;
      for (std::size_t f : transposed) {
        if (f >= factor_dims.size()) throw ShapeError("partial_transpose: bad factor");
        const std::size_t dr = (r / strides[f]) % factor_dims[f];
        const std::size_t dc = (c / strides[f]) % factor_dims[f];
        r2 = r2 - dr * strides[f] + dc * strides[f];
        c2 = c2 - dc * strides[f] + dr * strides[f];
      }
      out(static_cast<Eigen::Index>(r2), static_cast<Eigen::Index>(c2)) =
          m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
    }
  }
  return out;
}

/// tr(A B) for square matrices of equal size, without forming the product.
inline cplx trace_of_product(const Matrix& a, const Matrix& b) {
  return (a.transpose().array() * b.array()).sum();
}

/// tr(rho sigma).
inline double overlap(const DensityOperator& rho, const DensityOperator& sigma) {
  if (rho.dim() != sigma.dim()) throw ShapeError("overlap: dimension mismatch");
  return trace_of_product(rho.matrix(), sigma.matrix()).real();
}

// ---------------------------------------------------------------------------
// randomness

/// SplitMix64 finalizer.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// A reproducible random stream named by (seed, counter). Streams are never
/// shared mutably: each consumer builds its own engine, and independent
/// substreams are derived with `substream`.
class RandomStream {
 public:
  using Engine = std::mt19937_64;

  constexpr RandomStream(std::uint64_t seed, std::uint64_t counter = 0)
      : seed_(seed), counter_(counter) {}

  std::uint64_t seed() const { return seed_; }
  std::uint64_t counter() const { return counter_; }

  Engine engine() const { return Engine(mix64(seed_ ^ mix64(counter_))); }

  /// The `index`-th child stream; children of distinct streams do not collide
  /// except with hash-collision probability.
  RandomStream substream(std::uint64_t index) const {
    return RandomStream(mix64(seed_ + 0x632be59bd9b4e019ULL * mix64(counter_)), index);
  }

 private:
  std::uint64_t seed_;
  std::uint64_t counter_;
};

template <class Urbg>
Vector complex_gaussian_vector(std::size_t n, Urbg& gen) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector v(static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double re = normal(gen);
    const double im = normal(gen);
    v(i) = cplx(re, im);
  }
  return v;
}

/// Haar-distributed pure state: a normalized standard complex Gaussian vector.
template <class Urbg>
PureState haar_random_state(std::size_t d, Urbg& gen) {
  if (d < 1) throw ShapeError("haar_random_state needs d >= 1");
  return PureState::normalized(complex_gaussian_vector(d, gen));
}

inline PureState haar_random_state(std::size_t d, const RandomStream& stream) {
  auto gen = stream.engine();
  return haar_random_state(d, gen);
}

/// Haar-distributed isometry C^cols -> C^rows (QR of a Ginibre matrix with
/// the R-diagonal phases divided out).
template <class Urbg>
Matrix haar_random_isometry(std::size_t rows, std::size_t cols, Urbg& gen) {
  if (cols > rows) throw ShapeError("isometry needs cols <= rows");
  Matrix g(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (Eigen::Index j = 0; j < g.cols(); ++j) g.col(j) = complex_gaussian_vector(rows, gen);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ() * Matrix::Identity(g.rows(), g.cols());
  const Matrix r = qr.matrixQR().topRows(g.cols()).triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < g.cols(); ++j) {
    const cplx diag = r(j, j);
    if (std::abs(diag) > 0) q.col(j) *= diag / std::abs(diag);
  }
  return q;
}

template <class Urbg>
Matrix haar_random_unitary(std::size_t n, Urbg& gen) {
  return haar_random_isometry(n, n, gen);
}

}  // namespace qgames
