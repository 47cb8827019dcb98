#pragma once

// Symmetric (Bose) subspace of (C^d)^{⊗n}: dimensions, occupation-number
// basis, projectors, and exact Haar moments.

#include <map>
#include <vector>

#include "qgames/core.hpp"

namespace qgames {

/// binomial(d + n - 1, n), the dimension of the symmetric subspace.
inline std::size_t dim_sym(std::size_t d, std::size_t n) {
  if (d < 1) throw ShapeError("dim_sym needs d >= 1");
  // Running product stays integral: after step i it equals binom(d-1+i, i).
  std::size_t result = 1;
  for (std::size_t i = 1; i <= n; ++i) result = result * (d - 1 + i) / i;
  return result;
}

/// Occupation vectors (n_0, ..., n_{d-1}) summing to n, in lexicographic order
/// descending in n_0, then n_1, and so on.
inline std::vector<std::vector<std::size_t>> occupation_vectors(std::size_t d,
                                                                std::size_t n) {
  std::vector<std::vector<std::size_t>> out;
  std::vector<std::size_t> cur(d, 0);
  auto rec = [&](auto&& self, std::size_t pos, std::size_t left) -> void {
    if (pos + 1 == d) {
      cur[pos] = left;
      out.push_back(cur);
      return;
    }
    for (std::size_t k = left + 1; k-- > 0;) {
      cur[pos] = k;
      self(self, pos + 1, left - k);
    }
  };
  rec(rec, 0, n);
  return out;
}

/// Orthonormal basis of the symmetric subspace as a d^n x d[n] isometry. For
/// d = 2, column k holds the Dicke state with k excitations, i.e. the spin
/// state |n/2, m> with m = n/2 - k.
class SymBasis {
 public:
  SymBasis(std::size_t d, std::size_t n, std::size_t cap = kDefaultSizeCap)
      : d_(d), n_(n), occupations_(occupation_vectors(d, n)) {
    const std::size_t full = checked_power(d, n, cap);
    std::map<std::vector<std::size_t>, std::size_t> column_of;
    for (std::size_t c = 0; c < occupations_.size(); ++c) column_of[occupations_[c]] = c;

    std::vector<std::size_t> counts(occupations_.size(), 0);
    std::vector<std::size_t> column_for_index(full);
    std::vector<std::size_t> occ(d);
    for (std::size_t idx = 0; idx < full; ++idx) {
      std::fill(occ.begin(), occ.end(), 0);
      for (std::size_t rest = idx, f = 0; f < n; ++f, rest /= d) ++occ[rest % d];
      const std::size_t c = column_of.at(occ);
      column_for_index[idx] = c;
      ++counts[c];
    }
    isometry_ = Matrix::Zero(static_cast<Eigen::Index>(full),
                             static_cast<Eigen::Index>(occupations_.size()));
    for (std::size_t idx = 0; idx < full; ++idx) {
      const std::size_t c = column_for_index[idx];
      isometry_(static_cast<Eigen::Index>(idx), static_cast<Eigen::Index>(c)) =
          1.0 / std::sqrt(static_cast<double>(counts[c]));
    }
  }

  std::size_t d() const { return d_; }
  std::size_t n() const { return n_; }
  std::size_t dim() const { return occupations_.size(); }
  const Matrix& isometry() const { return isometry_; }
  const std::vector<std::vector<std::size_t>>& occupations() const { return occupations_; }

  /// Coordinates of a full-space vector in this basis.
  Vector compress(const Vector& v) const { return isometry_.adjoint() * v; }
  Matrix compress(const Matrix& m) const { return isometry_.adjoint() * m * isometry_; }
  Vector embed(const Vector& v) const { return isometry_ * v; }
  Matrix embed(const Matrix& m) const { return isometry_ * m * isometry_.adjoint(); }

 private:
  std::size_t d_;
  std::size_t n_;
  std::vector<std::vector<std::size_t>> occupations_;
  Matrix isometry_;
};

/// Orthogonal projector s_n onto the symmetric subspace.
inline Matrix sym_projector(std::size_t d, std::size_t n, std::size_t cap = kDefaultSizeCap) {
  const SymBasis basis(d, n, cap);
  return basis.isometry() * basis.isometry().adjoint();
}

/// Integral of (|psi><psi|)^{⊗n} over the Haar measure, s_n / d[n].
inline Matrix haar_moment(std::size_t d, std::size_t n, std::size_t cap = kDefaultSizeCap) {
  return sym_projector(d, n, cap) / static_cast<double>(dim_sym(d, n));
}

/// Operator that swaps tensor factors i and j of (C^d)^{⊗n}.
inline Matrix transposition_operator(std::size_t d, std::size_t n, std::size_t i,
                                     std::size_t j, std::size_t cap = kDefaultSizeCap) {
  if (i >= n || j >= n) throw IndexError("transposition factor out of range");
  const std::size_t full = checked_power(d, n, cap);
  std::vector<std::size_t> dims(n, d);
  const auto strides = detail::strides_of(dims);
  Matrix p = Matrix::Zero(static_cast<Eigen::Index>(full), static_cast<Eigen::Index>(full));
  for (std::size_t idx = 0; idx < full; ++idx) {
    const std::size_t a = (idx / strides[i]) % d;
    const std::size_t b = (idx / strides[j]) % d;
    const std::size_t swapped = idx - a * strides[i] - b * strides[j] + b * strides[i] + a * strides[j];
    p(static_cast<Eigen::Index>(swapped), static_cast<Eigen::Index>(idx)) = 1.0;
  }
  return p;
}

}  // namespace qgames
