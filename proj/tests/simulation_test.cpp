#include <gtest/gtest.h>

#include <cmath>

#include "unifactor/report_json.hpp"
#include "unifactor/simulation.hpp"

namespace uf = unifactor;

namespace {

uf::SimConfig small_config() {
  uf::SimConfig c;
  c.p = 5;
  c.n = 2000;
  c.replications = 6;
  c.loading_lo = 0.3;
  c.loading_hi = 0.9;
  c.sign_mixing = true;
  c.seed = 42;
  return c;
}

}  // namespace

TEST(Rng, SameSeedSameStream) {
  uf::Rng a(5), b(5);
  for (int k = 0; k < 100; ++k) EXPECT_EQ(a.normal(), b.normal());
  auto s1 = uf::Rng::for_stream(5, 3);
  auto s2 = uf::Rng::for_stream(5, 4);
  EXPECT_NE(s1.uniform(), s2.uniform());
}

TEST(Rng, NormalMoments) {
  uf::Rng rng(9);
  const int n = 400000;
  double s = 0, s2 = 0;
  for (int k = 0; k < n; ++k) {
    const double x = rng.normal();
    s += x;
    s2 += x * x;
  }
  EXPECT_NEAR(s / n, 0.0, 0.01);
  EXPECT_NEAR(s2 / n, 1.0, 0.01);
}

TEST(SampleLoadings, DegenerateRange) {
  auto c = small_config();
  c.p = 3;
  c.loading_lo = c.loading_hi = 0.5;
  c.sign_mixing = false;
  uf::Rng rng(1);
  const auto l = uf::sample_loadings(c, rng);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(l[i], 0.5);
}

TEST(SampleLoadings, DeterministicAndValid) {
  auto c = small_config();
  c.p = 50;
  uf::Rng a(42), b(42);
  const auto la = uf::sample_loadings(c, a);
  const auto lb = uf::sample_loadings(c, b);
  bool any_negative = false;
  for (std::size_t i = 0; i < c.p; ++i) {
    EXPECT_EQ(la[i], lb[i]);
    EXPECT_GE(std::abs(la[i]), c.loading_lo);
    EXPECT_LE(std::abs(la[i]), c.loading_hi);
    any_negative |= la[i] < 0;
  }
  EXPECT_TRUE(any_negative);
  EXPECT_NO_THROW(uf::validate_loadings({la.values().begin(), la.values().end()}));
}

TEST(SampleDataset, SingleRow) {
  uf::Rng rng(3);
  const auto d = uf::sample_dataset(uf::validate_loadings({0.5, 0.6, 0.7}), 1, rng);
  ASSERT_EQ(d.rows(), 1u);
  ASSERT_EQ(d.cols(), 3u);
  for (double v : d.data()) EXPECT_TRUE(std::isfinite(v));
}

TEST(SampleDataset, LargeSampleMatchesModel) {
  const auto l = uf::validate_loadings({0.6, -0.7, 0.8, 0.5, 0.9});
  uf::Rng rng(77);
  const auto d = uf::sample_dataset(l, 1000000, rng);
  for (std::size_t c = 0; c < l.size(); ++c) {
    double s = 0, s2 = 0;
    for (std::size_t r = 0; r < d.rows(); ++r) {
      s += d(r, c);
      s2 += d(r, c) * d(r, c);
    }
    const double mean = s / d.rows();
    EXPECT_NEAR(s2 / d.rows() - mean * mean, 1.0, 0.01);
  }
  const auto r = uf::sample_correlation(d);
  for (std::size_t i = 0; i < l.size(); ++i)
    for (std::size_t j = i + 1; j < l.size(); ++j) EXPECT_NEAR(r(i, j), l[i] * l[j], 0.005);
  EXPECT_TRUE(uf::attenuation_check(r, 1e-3).pass());
}

TEST(SampleCorrelation, Errors) {
  uf::Matrix constant{{1, 2}, {1, 3}, {1, 5}};
  try {
    uf::sample_correlation(constant);
    FAIL();
  } catch (const uf::InvalidMatrix& e) {
    EXPECT_NE(std::string(e.what()).find("column 0"), std::string::npos);
  }
  uf::Matrix twins{{1, 1, 0.3}, {2, 2, -1}, {4, 4, 2}, {3, 3, 0}};
  EXPECT_THROW(uf::sample_correlation(twins), uf::NotPositiveDefinite);
}

TEST(SampleCorrelation, KnownValue) {
  uf::Matrix d{{1, 2}, {2, 4}, {3, 5}};
  // Hand computation: centered x = (-1, 0, 1), y = (-5/3, 1/3, 4/3):
  // r = 3 / sqrt(2 * 14/3) = 0.98198050606196585
  EXPECT_NEAR(uf::sample_correlation(d)(0, 1), 0.98198050606196585, 1e-15);
}

TEST(SimConfig, Validation) {
  auto c = small_config();
  c.replications = 0;
  EXPECT_THROW(c.validate(), uf::InvalidArgument);
  EXPECT_THROW(uf::monte_carlo_attenuation(c), uf::InvalidArgument);
  c = small_config();
  c.p = 2;
  EXPECT_THROW(c.validate(), uf::InvalidArgument);
  c = small_config();
  c.n = c.p;
  EXPECT_THROW(c.validate(), uf::InvalidArgument);
  c = small_config();
  c.loading_hi = 1.0;
  EXPECT_THROW(c.validate(), uf::InvalidArgument);
  c = small_config();
  c.loading_lo = 0.0;
  EXPECT_THROW(c.validate(), uf::InvalidArgument);
}

TEST(MonteCarlo, DeterministicAcrossThreadCounts) {
  const auto c = small_config();
  const auto a = uf::monte_carlo_attenuation(c, 1);
  const auto b = uf::monte_carlo_attenuation(c, 1);
  const auto t = uf::monte_carlo_attenuation(c, 4);
  const auto ja = uf::to_json(a).dump();
  EXPECT_EQ(ja, uf::to_json(b).dump());
  EXPECT_EQ(ja, uf::to_json(t).dump());
}

TEST(MonteCarlo, CountsAreConsistent) {
  const auto s = uf::monte_carlo_attenuation(small_config());
  ASSERT_EQ(s.replications.size(), 6u);
  EXPECT_EQ(s.failed_replications, 0u);
  EXPECT_EQ(s.pairs_tested + s.degenerate, 6u * 10u);
  EXPECT_GE(s.violation_rate, 0.0);
  EXPECT_LE(s.violation_rate, 1.0);
  std::size_t v = 0;
  for (const auto& r : s.replications) v += r.violations;
  EXPECT_EQ(v, s.violations);
}

TEST(Bench, SmallPAgreesAndRejectsTooSmall) {
  const auto rows = uf::bench_k_vs_inverse({3, 10, 100}, 1);
  ASSERT_EQ(rows.size(), 3u);
  for (const auto& r : rows) {
    EXPECT_LE(r.disagreement, 1e-8);
    EXPECT_GT(r.dense_seconds, 0.0);
    EXPECT_GT(r.closed_seconds, 0.0);
  }
  EXPECT_THROW(uf::bench_k_vs_inverse({2}, 1), uf::InvalidArgument);
  EXPECT_THROW(uf::bench_k_vs_inverse({10}, 0), uf::InvalidArgument);
}
