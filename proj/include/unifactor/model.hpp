#pragma once

// Unidimensional factor model with standardized loadings:
//   y_i = lambda_i * eta + eps_i,  var(eta) = 1,  var(y_i) = 1,
// so the implied correlation matrix is lambda lambda^T + diag(1 - lambda^2).

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "unifactor/errors.hpp"
#include "unifactor/linalg.hpp"
#include "unifactor/matrix.hpp"

namespace unifactor {

/// Exclusion band around 0 and +-1 for an accepted loading.
inline constexpr double kLoadingEpsilon = 1e-8;
inline constexpr double kSymmetryTolerance = 1e-12;
inline constexpr double kUnitDiagonalTolerance = 1e-12;

/// Problems with each element of `raw`, empty if all are valid loadings.
inline std::vector<LoadingIssue> loading_issues(std::span<const double> raw) {
  std::vector<LoadingIssue> issues;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    const double v = raw[i];
    if (!std::isfinite(v)) {
      issues.push_back({i, v, LoadingIssue::Kind::non_finite});
    } else if (std::abs(v) <= kLoadingEpsilon) {
      issues.push_back({i, v, LoadingIssue::Kind::zero});
    } else if (std::abs(v) >= 1.0 - kLoadingEpsilon) {
      issues.push_back({i, v, LoadingIssue::Kind::unit});
    }
  }
  return issues;
}

/// Throws InvalidLoadings unless every element is a valid loading.
/// Used for sub-vectors (conditioning sets), which may have any length.
inline void require_valid_loadings(std::span<const double> raw) {
  if (auto issues = loading_issues(raw); !issues.empty()) throw InvalidLoadings(std::move(issues));
}

/// Standardized loadings of a unidimensional model, p >= 2, every entry in
/// (-1, 0) U (0, 1) with a kLoadingEpsilon margin.
class LoadingVector {
 public:
  explicit LoadingVector(std::vector<double> values) : values_(std::move(values)) {
    require_valid_loadings(values_);
    if (values_.size() < 2) throw InvalidLoadings({});
  }

  std::size_t size() const noexcept { return values_.size(); }
  double operator[](std::size_t i) const noexcept { return values_[i]; }
  std::span<const double> values() const noexcept { return values_; }

  /// Loadings at `idx`, in that order.
  std::vector<double> select(std::span<const std::size_t> idx) const {
    std::vector<double> out;
    out.reserve(idx.size());
    for (auto k : idx) out.push_back(values_.at(k));
    return out;
  }

  /// Every loading except those at positions i and j.
  std::vector<double> without(std::size_t i, std::size_t j) const {
    std::vector<double> out;
    out.reserve(values_.size());
    for (std::size_t k = 0; k < values_.size(); ++k)
      if (k != i && k != j) out.push_back(values_[k]);
    return out;
  }

  LoadingVector negated() const {
    std::vector<double> v(values_);
    for (auto& x : v) x = -x;
    return LoadingVector(std::move(v));
  }

 private:
  std::vector<double> values_;
};

inline LoadingVector validate_loadings(std::vector<double> raw) {
  return LoadingVector(std::move(raw));
}

/// a_ii = 1 - lambda_i^2, the residual variances.
class ResidualDiagonal {
 public:
  explicit ResidualDiagonal(std::span<const double> loadings) {
    values_.reserve(loadings.size());
    // (1 - l)(1 + l) keeps relative accuracy when |l| is close to 1.
    for (double l : loadings) values_.push_back((1.0 - l) * (1.0 + l));
  }

  std::size_t size() const noexcept { return values_.size(); }
  double operator[](std::size_t i) const noexcept { return values_[i]; }
  std::span<const double> values() const noexcept { return values_; }

 private:
  std::vector<double> values_;
};

inline ResidualDiagonal residual_diagonal(const LoadingVector& lambda) {
  return ResidualDiagonal(lambda.values());
}

/// Symmetric, unit-diagonal, positive-definite matrix. Validated on construction.
class CorrelationMatrix {
 public:
  explicit CorrelationMatrix(Matrix m) : m_(std::move(m)) {
    if (!m_.square() || m_.rows() == 0) throw InvalidMatrix("correlation matrix must be square");
    for (double v : m_.data())
      if (!std::isfinite(v)) throw InvalidMatrix("correlation matrix has non-finite entries");
    if (max_asymmetry(m_) > kSymmetryTolerance)
      throw InvalidMatrix("correlation matrix is not symmetric");
    for (std::size_t i = 0; i < m_.rows(); ++i)
      if (std::abs(m_(i, i) - 1.0) > kUnitDiagonalTolerance)
        throw InvalidMatrix("correlation matrix diagonal entry " + std::to_string(i) +
                            " is not 1");
    (void)cholesky(m_);
  }

  /// Rescales a covariance matrix by the outer product of its standard deviations.
  static CorrelationMatrix from_covariance(const Matrix& cov) {
    if (!cov.square()) throw InvalidMatrix("covariance matrix must be square");
    const std::size_t p = cov.rows();
    std::vector<double> sd(p);
    for (std::size_t i = 0; i < p; ++i) {
      if (!(cov(i, i) > 0.0))
        throw InvalidMatrix("covariance diagonal entry " + std::to_string(i) +
                            " is not positive");
      sd[i] = std::sqrt(cov(i, i));
    }
    Matrix r(p, p);
    for (std::size_t i = 0; i < p; ++i)
      for (std::size_t j = 0; j < p; ++j) r(i, j) = i == j ? 1.0 : cov(i, j) / (sd[i] * sd[j]);
    return CorrelationMatrix(std::move(r));
  }

  std::size_t size() const noexcept { return m_.rows(); }
  double operator()(std::size_t i, std::size_t j) const noexcept { return m_(i, j); }
  const Matrix& matrix() const noexcept { return m_; }

 private:
  Matrix m_;
};

inline CorrelationMatrix implied_correlation(const LoadingVector& lambda) {
  const std::size_t p = lambda.size();
  Matrix m(p, p);
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = 0; j < p; ++j) m(i, j) = i == j ? 1.0 : lambda[i] * lambda[j];
  return CorrelationMatrix(std::move(m));
}

/// Sherman-Morrison inverse of zz^T + A for a residual diagonal A.
inline Matrix sherman_morrison_inverse(const ResidualDiagonal& a, std::span<const double> z) {
  return sherman_morrison_inverse<double>(a.values(), z);
}

}  // namespace unifactor
