#pragma once

// Partial correlations by four routes:
//   triplet      three-variable formula from pairwise correlations
//   schur        standardized Schur complement Sigma_YY - Sigma_YZ Sigma_ZZ^{-1} Sigma_ZY
//   precision    -P_ij / sqrt(P_ii P_jj) with P = R^{-1} (conditions on all others)
//   closed_form  loadings only, through the scalar K = S / (1 + S), S = sum z_i^2 / a_ii
// On a unidimensional model all routes agree.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "unifactor/errors.hpp"
#include "unifactor/linalg.hpp"
#include "unifactor/model.hpp"

namespace unifactor {

enum class Route { triplet, schur, precision, closed_form };

inline std::string_view to_string(Route r) {
  switch (r) {
    case Route::triplet: return "triplet";
    case Route::schur: return "schur";
    case Route::precision: return "precision";
    case Route::closed_form: return "closed_form";
  }
  return "?";
}

inline std::optional<Route> parse_route(std::string_view s) {
  for (Route r : {Route::triplet, Route::schur, Route::precision, Route::closed_form})
    if (to_string(r) == s) return r;
  return std::nullopt;
}

struct PartialCorrResult {
  std::size_t i = 0;
  std::size_t j = 1;
  std::vector<std::size_t> conditioning;
  double zero_order = 0.0;
  double partial = 0.0;
  Route route = Route::schur;
  std::optional<double> k_value;

  /// Positive when the partial correlation is closer to zero.
  double margin() const noexcept { return std::abs(zero_order) - std::abs(partial); }
};

struct KStatistic {
  double value = 0.0;
  /// z_i^2 / a_ii per conditioning indicator.
  std::vector<double> terms;

  double sum() const noexcept {
    double s = 0.0;
    for (double t : terms) s += t;
    return s;
  }
};

inline constexpr double kTripletMinDenominator = 1e-20;

inline double partial_corr_triplet(double rho_ij, double rho_iz, double rho_jz) {
  for (double r : {rho_ij, rho_iz, rho_jz})
    if (!(std::abs(r) <= 1.0)) throw InvalidArgument("triplet: correlation outside [-1, 1]");
  const double den = (1.0 - rho_iz * rho_iz) * (1.0 - rho_jz * rho_jz);
  if (!(den > kTripletMinDenominator))
    throw DegenerateDenominator("triplet: conditioning correlation is +-1");
  return (rho_ij - rho_iz * rho_jz) / std::sqrt(den);
}

namespace detail {

inline void check_pair(std::size_t p, std::size_t i, std::size_t j) {
  if (i >= p || j >= p) throw InvalidArgument("pair index out of range");
  if (i == j) throw InvalidArgument("pair indices must differ");
}

inline void check_conditioning(std::size_t p, std::size_t i, std::size_t j,
                               std::span<const std::size_t> z) {
  check_pair(p, i, j);
  std::vector<std::size_t> sorted(z.begin(), z.end());
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw InvalidArgument("conditioning set has duplicate indices");
  for (auto k : sorted) {
    if (k >= p) throw InvalidArgument("conditioning index out of range");
    if (k == i || k == j) throw InvalidArgument("conditioning set overlaps the pair");
  }
}

}  // namespace detail

/// Indices 0..p-1 except i and j, ascending.
inline std::vector<std::size_t> all_except(std::size_t p, std::size_t i, std::size_t j) {
  std::vector<std::size_t> z;
  z.reserve(p);
  for (std::size_t k = 0; k < p; ++k)
    if (k != i && k != j) z.push_back(k);
  return z;
}

/// 2x2 partial covariance of (y_i, y_j) given the variables in `z`.
inline Matrix schur_partial_cov(const CorrelationMatrix& r, std::size_t i, std::size_t j,
                                std::span<const std::size_t> z) {
  detail::check_conditioning(r.size(), i, j, z);
  Matrix c{{r(i, i), r(i, j)}, {r(j, i), r(j, j)}};
  if (z.empty()) return c;

  const auto fac = cholesky(submatrix(r.matrix(), z, z));
  std::vector<double> zi(z.size()), zj(z.size());
  for (std::size_t k = 0; k < z.size(); ++k) {
    zi[k] = r(z[k], i);
    zj[k] = r(z[k], j);
  }
  const auto xi = fac.solve(zi);  // Sigma_ZZ^{-1} Sigma_Z,i
  const auto xj = fac.solve(zj);
  double ii = 0.0, ij = 0.0, jj = 0.0;
  for (std::size_t k = 0; k < z.size(); ++k) {
    ii += zi[k] * xi[k];
    ij += zi[k] * xj[k];
    jj += zj[k] * xj[k];
  }
  c(0, 0) -= ii;
  c(1, 1) -= jj;
  c(0, 1) -= ij;
  c(1, 0) = c(0, 1);
  return c;
}

inline double standardize_partial_cov(const Matrix& c) {
  if (c.rows() != 2 || c.cols() != 2) throw InvalidArgument("expected a 2x2 matrix");
  if (!(c(0, 0) > 0.0) || !(c(1, 1) > 0.0))
    throw InvalidMatrix("partial covariance has a non-positive diagonal");
  return c(0, 1) / std::sqrt(c(0, 0) * c(1, 1));
}

inline PartialCorrResult partial_corr_schur(const CorrelationMatrix& r, std::size_t i,
                                            std::size_t j, std::span<const std::size_t> z) {
  PartialCorrResult out;
  out.i = i;
  out.j = j;
  out.conditioning.assign(z.begin(), z.end());
  out.partial = standardize_partial_cov(schur_partial_cov(r, i, j, z));
  out.zero_order = r(i, j);
  out.route = Route::schur;
  return out;
}

/// -P / sqrt(diag(P) diag(P)^T) for P = R^{-1}; diagonal left at 1.
inline Matrix precision_partial_correlations(const CorrelationMatrix& r) {
  const Matrix prec = spd_inverse(r.matrix());
  const std::size_t p = r.size();
  std::vector<double> inv_sd(p);
  for (std::size_t k = 0; k < p; ++k) inv_sd[k] = 1.0 / std::sqrt(prec(k, k));
  Matrix out(p, p);
  for (std::size_t a = 0; a < p; ++a)
    for (std::size_t b = 0; b < p; ++b)
      out(a, b) = a == b ? 1.0 : -prec(a, b) * inv_sd[a] * inv_sd[b];
  return out;
}

inline double partial_corr_precision(const CorrelationMatrix& r, std::size_t i, std::size_t j) {
  detail::check_pair(r.size(), i, j);
  const Matrix prec = spd_inverse(r.matrix());
  return -prec(i, j) / std::sqrt(prec(i, i) * prec(j, j));
}

inline KStatistic k_statistic(std::span<const double> z) {
  if (z.empty()) throw InvalidArgument("k_statistic: empty conditioning vector");
  require_valid_loadings(z);
  KStatistic k;
  k.terms.reserve(z.size());
  double s = 0.0;
  for (double zi : z) {
    const double t = zi * zi / ((1.0 - zi) * (1.0 + zi));
    k.terms.push_back(t);
    s += t;
  }
  k.value = s / (1.0 + s);
  return k;
}

/// z^T (z z^T + A)^{-1} z in O(p), without forming any matrix.
inline double quadratic_form_k(std::span<const double> z) { return k_statistic(z).value; }

/// Closed form from loadings. The pair is reported as (0, 1) and z as
/// indices 2.. as if the loadings were laid out [lam_i, lam_j, z...].
/// An empty z gives K = 0 and partial == zero_order.
inline PartialCorrResult partial_corr_closed_form(double lam_i, double lam_j,
                                                  std::span<const double> z) {
  const double pair[] = {lam_i, lam_j};
  require_valid_loadings(pair);
  const double k = z.empty() ? 0.0 : k_statistic(z).value;

  PartialCorrResult out;
  out.i = 0;
  out.j = 1;
  for (std::size_t n = 0; n < z.size(); ++n) out.conditioning.push_back(n + 2);
  out.zero_order = lam_i * lam_j;
  out.partial = lam_i * lam_j * (1.0 - k) /
                std::sqrt((1.0 - lam_i * lam_i * k) * (1.0 - lam_j * lam_j * k));
  out.route = Route::closed_form;
  out.k_value = k;
  return out;
}

inline PartialCorrResult partial_corr_closed_form(const LoadingVector& lambda, std::size_t i,
                                                  std::size_t j, std::span<const std::size_t> z) {
  detail::check_conditioning(lambda.size(), i, j, z);
  auto out = partial_corr_closed_form(lambda[i], lambda[j], lambda.select(z));
  out.i = i;
  out.j = j;
  out.conditioning.assign(z.begin(), z.end());
  return out;
}

/// Conditions on every loading other than i and j.
inline PartialCorrResult partial_corr_closed_form(const LoadingVector& lambda, std::size_t i,
                                                  std::size_t j) {
  const auto z = all_except(lambda.size(), i, j);
  return partial_corr_closed_form(lambda, i, j, z);
}

}  // namespace unifactor
