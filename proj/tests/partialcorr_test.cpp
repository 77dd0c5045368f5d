#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "test_support.hpp"
#include "unifactor/partialcorr.hpp"

namespace uf = unifactor;
using uf::Matrix;

namespace {

const Matrix kNonTransitive{{1, 0.3, 0.3}, {0.3, 1, -0.3}, {0.3, -0.3, 1}};

uf::CorrelationMatrix implied(std::vector<double> l) {
  return uf::implied_correlation(uf::validate_loadings(std::move(l)));
}

}  // namespace

TEST(Triplet, Examples) {
  EXPECT_NEAR(uf::partial_corr_triplet(0.25, 0.25, 0.25), 0.2, 1e-15);
  EXPECT_EQ(uf::partial_corr_triplet(0.37, 0.0, 0.0), 0.37);
  EXPECT_NEAR(uf::partial_corr_triplet(0.3, 0.3, -0.3), 0.39 / 0.91, 1e-15);
  EXPECT_NEAR(uf::partial_corr_triplet(0.3, 0.3, -0.3), 0.428571, 1e-6);
}

TEST(Triplet, DegenerateDenominator) {
  EXPECT_THROW(uf::partial_corr_triplet(0.3, 1.0, 0.2), uf::DegenerateDenominator);
  EXPECT_THROW(uf::partial_corr_triplet(0.3, 0.2, -1.0), uf::DegenerateDenominator);
  EXPECT_THROW(uf::partial_corr_triplet(1.3, 0.2, 0.2), uf::InvalidArgument);
}

TEST(Schur, Examples) {
  const auto r = implied({0.5, 0.5, 0.5});
  const std::vector<std::size_t> none;
  EXPECT_EQ(uf::schur_partial_cov(r, 0, 1, none), (Matrix{{1, 0.25}, {0.25, 1}}));

  const std::vector<std::size_t> z2{2};
  const Matrix c = uf::schur_partial_cov(r, 0, 1, z2);
  EXPECT_LE(uf::max_abs_diff(c, Matrix{{0.9375, 0.1875}, {0.1875, 0.9375}}), 1e-15);

  const uf::CorrelationMatrix id(Matrix::identity(5));
  const std::vector<std::size_t> z{0, 4, 2};
  EXPECT_EQ(uf::schur_partial_cov(id, 1, 3, z), Matrix::identity(2));
}

TEST(Schur, ArgumentChecks) {
  const auto r = implied({0.5, 0.5, 0.5, 0.5});
  const std::vector<std::size_t> overlap{0, 2};
  const std::vector<std::size_t> dup{2, 2};
  const std::vector<std::size_t> oob{7};
  const std::vector<std::size_t> ok{2};
  EXPECT_THROW(uf::schur_partial_cov(r, 0, 1, overlap), uf::InvalidArgument);
  EXPECT_THROW(uf::schur_partial_cov(r, 0, 1, dup), uf::InvalidArgument);
  EXPECT_THROW(uf::schur_partial_cov(r, 0, 1, oob), uf::InvalidArgument);
  EXPECT_THROW(uf::schur_partial_cov(r, 1, 1, ok), uf::InvalidArgument);
  EXPECT_THROW(uf::schur_partial_cov(r, 0, 9, ok), uf::InvalidArgument);
}

TEST(Standardize, Examples) {
  EXPECT_NEAR(uf::standardize_partial_cov(Matrix{{0.9375, 0.1875}, {0.1875, 0.9375}}), 0.2, 1e-15);
  EXPECT_EQ(uf::standardize_partial_cov(Matrix::identity(2)), 0.0);
  EXPECT_EQ(uf::standardize_partial_cov(Matrix{{4, 1}, {1, 1}}), 0.5);
  EXPECT_THROW(uf::standardize_partial_cov(Matrix{{0, 1}, {1, 1}}), uf::InvalidMatrix);
}

TEST(Precision, Examples) {
  const uf::CorrelationMatrix id(Matrix::identity(4));
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j)
      if (i != j) EXPECT_EQ(uf::partial_corr_precision(id, i, j), -0.0);
  EXPECT_NEAR(uf::partial_corr_precision(implied({0.5, 0.5, 0.5}), 0, 1), 0.2, 1e-15);
  const uf::CorrelationMatrix nt(kNonTransitive);
  EXPECT_NEAR(uf::partial_corr_precision(nt, 0, 1), uf::partial_corr_triplet(0.3, 0.3, -0.3),
              1e-15);
}

TEST(KStatistic, Examples) {
  const double z1[] = {0.5};
  const auto k1 = uf::k_statistic(z1);
  EXPECT_NEAR(k1.value, 0.25, 1e-16);
  ASSERT_EQ(k1.terms.size(), 1u);
  EXPECT_NEAR(k1.terms[0], 1.0 / 3.0, 1e-16);

  const double z9[] = {0.9};
  EXPECT_NEAR(uf::k_statistic(z9).value, 0.81, 1e-15);

  const double z2[] = {0.5, 0.5};
  const auto k2 = uf::k_statistic(z2);
  EXPECT_NEAR(k2.sum(), 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(k2.value, 0.4, 1e-15);
}

TEST(KStatistic, RejectsInvalid) {
  const double bad[] = {0.5, 0.0};
  EXPECT_THROW(uf::k_statistic(bad), uf::InvalidLoadings);
  EXPECT_THROW(uf::k_statistic(std::span<const double>{}), uf::InvalidArgument);
}

TEST(QuadraticFormK, MatchesDense) {
  const double z1[] = {0.5};
  EXPECT_NEAR(uf::quadratic_form_k(z1), 0.25, 1e-16);
  const double z2[] = {0.5, 0.5};
  EXPECT_NEAR(uf::quadratic_form_k(z2),
              uf::quadratic_form<double>(z2, uf::spd_inverse(Matrix{{1, 0.25}, {0.25, 1}})),
              1e-15);

  // 100 equal loadings: S = 100 * 0.09 / 0.91, K = S / (1 + S).
  const std::vector<double> z(100, 0.3);
  EXPECT_NEAR(uf::quadratic_form_k(z), 0.90817356205852674, 1e-14);
  Matrix dense(100, 100);
  for (std::size_t i = 0; i < 100; ++i)
    for (std::size_t j = 0; j < 100; ++j) dense(i, j) = i == j ? 1.0 : 0.09;
  EXPECT_NEAR(uf::quadratic_form_k(z),
              uf::quadratic_form<double>(z, uf::testing::gauss_jordan_inverse(dense)), 1e-12);
}

TEST(ClosedForm, Examples) {
  const double z[] = {0.5};
  const auto a = uf::partial_corr_closed_form(0.5, 0.5, z);
  EXPECT_EQ(a.zero_order, 0.25);
  EXPECT_NEAR(a.partial, 0.2, 1e-15);
  ASSERT_TRUE(a.k_value.has_value());
  EXPECT_NEAR(*a.k_value, 0.25, 1e-16);
  EXPECT_EQ(a.route, uf::Route::closed_form);

  const auto b = uf::partial_corr_closed_form(0.5, -0.5, z);
  EXPECT_EQ(b.zero_order, -0.25);
  EXPECT_NEAR(b.partial, -0.2, 1e-15);

  // K = 0.895027624309392..., partial verified against the precision route
  // on the 4x4 implied matrix and a 40-digit evaluation: 0.0239351670873000.
  const double z99[] = {0.9, 0.9};
  const auto c = uf::partial_corr_closed_form(0.3, 0.6, z99);
  EXPECT_NEAR(*c.k_value, 0.89502762430939227, 1e-15);
  EXPECT_NEAR(c.partial, 0.023935167087300028, 1e-15);
  EXPECT_NEAR(uf::partial_corr_precision(implied({0.3, 0.6, 0.9, 0.9}), 0, 1), c.partial, 1e-14);
}

TEST(ClosedForm, EmptyConditioningIsZeroOrder) {
  const auto r = uf::partial_corr_closed_form(0.4, -0.7, std::span<const double>{});
  EXPECT_EQ(*r.k_value, 0.0);
  EXPECT_EQ(r.partial, r.zero_order);
  EXPECT_TRUE(r.conditioning.empty());
}

TEST(ClosedForm, IndexedOverloads) {
  const auto l = uf::validate_loadings({0.3, 0.6, 0.9, 0.9});
  const auto all = uf::partial_corr_closed_form(l, 1, 0);
  EXPECT_EQ(all.i, 1u);
  EXPECT_EQ(all.j, 0u);
  EXPECT_EQ(all.conditioning, (std::vector<std::size_t>{2, 3}));
  EXPECT_NEAR(all.partial, 0.023935167087300028, 1e-15);
  const std::vector<std::size_t> z{3};
  const auto one = uf::partial_corr_closed_form(l, 0, 1, z);
  EXPECT_NEAR(one.partial, uf::partial_corr_triplet(0.18, 0.27, 0.54), 1e-15);
}

TEST(RouteProperties, RandomModels) {
  std::mt19937_64 gen(21);
  std::uniform_int_distribution<std::size_t> pd(3, 12);
  for (int rep = 0; rep < 400; ++rep) {
    const auto l = uf::validate_loadings(uf::testing::random_loadings(gen, pd(gen)));
    const auto r = uf::implied_correlation(l);
    const Matrix pc = uf::precision_partial_correlations(r);
    const std::size_t p = l.size();
    for (std::size_t i = 0; i < p; ++i)
      for (std::size_t j = i + 1; j < p; ++j) {
        const auto z = uf::all_except(p, i, j);
        const double schur = uf::partial_corr_schur(r, i, j, z).partial;
        const double prec = uf::partial_corr_precision(r, i, j);
        const auto cf = uf::partial_corr_closed_form(l, i, j);
        EXPECT_NEAR(schur, prec, 1e-10);
        EXPECT_NEAR(schur, cf.partial, 1e-10);
        EXPECT_NEAR(pc(i, j), prec, 1e-14);
        if (p == 3)
          EXPECT_NEAR(uf::testing::triplet_oracle(r(i, j), r(i, z[0]), r(j, z[0])), cf.partial,
                      1e-12);
        // Attenuation with sign preservation.
        EXPECT_GT(cf.margin(), 1e-12);
        EXPECT_GT(std::abs(cf.zero_order) - std::abs(prec), 1e-12);
        EXPECT_EQ(std::signbit(cf.partial), std::signbit(cf.zero_order));
        EXPECT_GT(*cf.k_value, 0.0);
        EXPECT_LT(*cf.k_value, 1.0);
      }
  }
}

TEST(RouteProperties, MonotoneInConditioningSet) {
  std::mt19937_64 gen(22);
  for (int rep = 0; rep < 300; ++rep) {
    const std::size_t p = 4 + rep % 9;
    const auto l = uf::validate_loadings(uf::testing::random_loadings(gen, p));
    const auto r = uf::implied_correlation(l);
    std::vector<std::size_t> rest = uf::all_except(p, 0, 1);
    std::shuffle(rest.begin(), rest.end(), gen);
    double prev = std::abs(l[0] * l[1]);
    for (std::size_t m = 1; m <= rest.size(); ++m) {
      std::span<const std::size_t> z(rest.data(), m);
      const double cf = std::abs(uf::partial_corr_closed_form(l, 0, 1, z).partial);
      const double sc = std::abs(uf::partial_corr_schur(r, 0, 1, z).partial);
      EXPECT_NEAR(cf, sc, 1e-10);
      EXPECT_LE(cf, prev + 1e-12);
      prev = cf;
    }
  }
}

TEST(RouteProperties, KBoundAndSingleReduction) {
  std::mt19937_64 gen(23);
  std::uniform_int_distribution<std::size_t> len(1, 50);
  for (int rep = 0; rep < 2000; ++rep) {
    const auto z = uf::testing::random_loadings(gen, len(gen));
    const double k = uf::k_statistic(z).value;
    EXPECT_GT(k, 0.0);
    EXPECT_LT(k, 1.0);
    if (z.size() == 1) EXPECT_NEAR(k, z[0] * z[0], 1e-15);
  }
}

TEST(RouteNames, RoundTrip) {
  for (auto r : {uf::Route::triplet, uf::Route::schur, uf::Route::precision, uf::Route::closed_form})
    EXPECT_EQ(uf::parse_route(uf::to_string(r)), r);
  EXPECT_FALSE(uf::parse_route("lu").has_value());
}
