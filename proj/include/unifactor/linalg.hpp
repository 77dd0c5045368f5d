#pragma once

// Dense symmetric positive-definite kernels: Cholesky, SPD inverse,
// Sherman-Morrison inverse of a diagonal-plus-rank-one matrix, and
// quadratic forms. No pivoting; inputs are expected at correlation scale.

#include <cmath>
#include <cstddef>
#include <span>

#include "unifactor/errors.hpp"
#include "unifactor/matrix.hpp"

namespace unifactor {

/// Smallest accepted pivot (diagonal of the running Schur complement).
inline constexpr double kMinPivot = 1e-10;

template <class T>
class SpdFactorization {
 public:
  /// Factors `m` = L L^T. Only the lower triangle of `m` is read.
  explicit SpdFactorization(const DenseMatrix<T>& m, T min_pivot = T(kMinPivot))
      : lower_(m.rows(), m.cols()) {
    if (!m.square()) throw InvalidMatrix("cholesky: matrix is not square");
    const std::size_t n = m.rows();
    T scale{1};
    for (T v : m.data()) scale = std::max(scale, std::abs(v));
    if (max_asymmetry(m) > T(1e-12) * scale)
      throw InvalidMatrix("cholesky: matrix is not symmetric");

    for (std::size_t j = 0; j < n; ++j) {
      auto lj = lower_.row(j);
      T d = m(j, j);
      for (std::size_t k = 0; k < j; ++k) d -= lj[k] * lj[k];
      if (!(d > min_pivot)) throw NotPositiveDefinite(j, static_cast<double>(d));
      const T ljj = std::sqrt(d);
      lj[j] = ljj;
      for (std::size_t i = j + 1; i < n; ++i) {
        auto li = lower_.row(i);
        T s = m(i, j);
        for (std::size_t k = 0; k < j; ++k) s -= li[k] * lj[k];
        li[j] = s / ljj;
      }
    }
  }

  std::size_t dim() const noexcept { return lower_.rows(); }
  const DenseMatrix<T>& lower() const noexcept { return lower_; }

  /// L L^T, for round-trip checks.
  DenseMatrix<T> reconstruct() const { return multiply(lower_, transpose(lower_)); }

  /// Solves M x = b by forward and back substitution.
  std::vector<T> solve(std::span<const T> b) const {
    const std::size_t n = dim();
    if (b.size() != n) throw InvalidArgument("solve: dimension mismatch");
    std::vector<T> x(b.begin(), b.end());
    for (std::size_t i = 0; i < n; ++i) {
      auto li = lower_.row(i);
      for (std::size_t k = 0; k < i; ++k) x[i] -= li[k] * x[k];
      x[i] /= li[i];
    }
    for (std::size_t i = n; i-- > 0;) {
      for (std::size_t k = i + 1; k < n; ++k) x[i] -= lower_(k, i) * x[k];
      x[i] /= lower_(i, i);
    }
    return x;
  }

  /// M^{-1} = L^{-T} L^{-1}. Both triangles are written from one product,
  /// so the result is exactly symmetric.
  DenseMatrix<T> inverse() const {
    const std::size_t n = dim();
    // W = L^{-1}, lower triangular, built row by row:
    // W(i, :) = -(sum_{k<i} L(i,k) W(k, :)) / L(i,i), W(i,i) = 1 / L(i,i).
    DenseMatrix<T> w(n, n);
    for (std::size_t i = 0; i < n; ++i) {
      auto li = lower_.row(i);
      auto wi = w.row(i);
      for (std::size_t k = 0; k < i; ++k) {
        const T lik = li[k];
        if (lik == T{0}) continue;
        auto wk = w.row(k);
        for (std::size_t c = 0; c <= k; ++c) wi[c] -= lik * wk[c];
      }
      const T inv_d = T{1} / li[i];
      for (std::size_t c = 0; c < i; ++c) wi[c] *= inv_d;
      wi[i] = inv_d;
    }
    DenseMatrix<T> inv(n, n);
    for (std::size_t k = 0; k < n; ++k) {
      auto wk = w.row(k);
      for (std::size_t i = 0; i <= k; ++i) {
        const T wki = wk[i];
        if (wki == T{0}) continue;
        auto out = inv.row(i);
        for (std::size_t j = 0; j <= i; ++j) out[j] += wki * wk[j];
      }
    }
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < i; ++j) inv(j, i) = inv(i, j);
    return inv;
  }

 private:
  DenseMatrix<T> lower_;
};

template <class T>
SpdFactorization<T> cholesky(const DenseMatrix<T>& m, T min_pivot = T(kMinPivot)) {
  return SpdFactorization<T>(m, min_pivot);
}

template <class T>
DenseMatrix<T> spd_inverse(const DenseMatrix<T>& m) {
  return cholesky(m).inverse();
}

/// (diag(a) + z z^T)^{-1} = A^{-1} - A^{-1} z z^T A^{-1} / (1 + z^T A^{-1} z).
/// Materializes the full matrix; use the partialcorr quadratic form when only
/// z^T (...)^{-1} z is needed.
template <class T>
DenseMatrix<T> sherman_morrison_inverse(std::span<const T> a, std::span<const T> z) {
  if (a.size() != z.size()) throw InvalidArgument("sherman_morrison_inverse: size mismatch");
  const std::size_t n = a.size();
  std::vector<T> u(n);  // A^{-1} z
  T s{0};
  for (std::size_t i = 0; i < n; ++i) {
    if (!(a[i] > T{0})) throw InvalidArgument("sherman_morrison_inverse: non-positive diagonal");
    u[i] = z[i] / a[i];
    s += z[i] * u[i];
  }
  const T scale = T{1} / (T{1} + s);
  DenseMatrix<T> inv(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) inv(i, j) = -u[i] * u[j] * scale;
    inv(i, i) += T{1} / a[i];
  }
  return inv;
}

template <class T>
T quadratic_form(std::span<const T> z, const DenseMatrix<T>& m) {
  if (m.rows() != z.size() || m.cols() != z.size())
    throw InvalidArgument("quadratic_form: dimension mismatch");
  T total{0};
  for (std::size_t i = 0; i < z.size(); ++i) {
    T row{0};
    auto mi = m.row(i);
    for (std::size_t j = 0; j < z.size(); ++j) row += mi[j] * z[j];
    total += z[i] * row;
  }
  return total;
}

}  // namespace unifactor
