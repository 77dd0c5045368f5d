#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "unifactor/diagnostics.hpp"
#include "unifactor/errors.hpp"
#include "unifactor/model.hpp"
#include "unifactor/partialcorr.hpp"
#include "unifactor/random.hpp"

namespace unifactor {

/// Sample pairs with |rho| below this are degenerate and excluded from violation counts.
inline constexpr double kSampleDegenerateThreshold = 1e-6;

struct SimConfig {
  std::size_t p = 5;
  std::size_t n = 1000;
  std::size_t replications = 1;
  double loading_lo = 0.3;
  double loading_hi = 0.9;
  bool sign_mixing = false;
  std::uint64_t seed = 0;

  void validate() const {
    if (p < 3) throw InvalidArgument("simulation: p must be at least 3");
    if (n < p + 1) throw InvalidArgument("simulation: n must be at least p + 1");
    if (replications < 1) throw InvalidArgument("simulation: replications must be at least 1");
    if (!(loading_lo > kLoadingEpsilon && loading_lo <= loading_hi &&
          loading_hi < 1.0 - kLoadingEpsilon))
      throw InvalidArgument("simulation: loading range must satisfy 0 < lo <= hi < 1");
  }
};

inline LoadingVector sample_loadings(const SimConfig& cfg, Rng& rng) {
  std::vector<double> v(cfg.p);
  for (auto& x : v) {
    x = rng.uniform(cfg.loading_lo, cfg.loading_hi);
    if (cfg.sign_mixing && rng.coin()) x = -x;
  }
  return LoadingVector(std::move(v));
}

/// n rows of y = lambda * eta + eps, eta ~ N(0, 1), eps_i ~ N(0, 1 - lambda_i^2).
inline Matrix sample_dataset(const LoadingVector& lambda, std::size_t n, Rng& rng) {
  const std::size_t p = lambda.size();
  const ResidualDiagonal a = residual_diagonal(lambda);
  std::vector<double> sd(p);
  for (std::size_t i = 0; i < p; ++i) sd[i] = std::sqrt(a[i]);
  Matrix data(n, p);
  for (std::size_t r = 0; r < n; ++r) {
    const double eta = rng.normal();
    auto row = data.row(r);
    for (std::size_t i = 0; i < p; ++i) row[i] = lambda[i] * eta + sd[i] * rng.normal();
  }
  return data;
}

/// Product-moment correlation of the columns of `data`.
inline CorrelationMatrix sample_correlation(const Matrix& data) {
  const std::size_t n = data.rows();
  const std::size_t p = data.cols();
  if (n < 2) throw InvalidArgument("sample_correlation: need at least 2 rows");
  std::vector<double> mean(p, 0.0);
  for (std::size_t r = 0; r < n; ++r) {
    auto row = data.row(r);
    for (std::size_t i = 0; i < p; ++i) mean[i] += row[i];
  }
  for (auto& m : mean) m /= static_cast<double>(n);

  Matrix cross(p, p);
  std::vector<double> centered(p);
  for (std::size_t r = 0; r < n; ++r) {
    auto row = data.row(r);
    for (std::size_t i = 0; i < p; ++i) centered[i] = row[i] - mean[i];
    for (std::size_t i = 0; i < p; ++i) {
      auto out = cross.row(i);
      for (std::size_t j = i; j < p; ++j) out[j] += centered[i] * centered[j];
    }
  }
  for (std::size_t i = 0; i < p; ++i)
    if (!(cross(i, i) > 0.0))
      throw InvalidMatrix("sample_correlation: column " + std::to_string(i) +
                          " has zero variance");

  Matrix r(p, p);
  for (std::size_t i = 0; i < p; ++i) {
    r(i, i) = 1.0;
    for (std::size_t j = i + 1; j < p; ++j) {
      r(i, j) = cross(i, j) / std::sqrt(cross(i, i) * cross(j, j));
      r(j, i) = r(i, j);
    }
  }
  return CorrelationMatrix(std::move(r));
}

struct ReplicationResult {
  std::vector<double> loadings;
  std::size_t pairs = 0;
  std::size_t violations = 0;
  std::size_t degenerate = 0;
  double min_margin = 0.0;
  double mean_margin = 0.0;
  /// max |sample rho_ij - lambda_i lambda_j|
  double max_abs_deviation = 0.0;
  /// Set when the sample correlation could not be formed or checked.
  std::optional<std::string> error;
};

struct MonteCarloSummary {
  SimConfig config;
  std::vector<ReplicationResult> replications;
  std::size_t failed_replications = 0;
  std::size_t pairs_tested = 0;  // non-degenerate pairs over successful replications
  std::size_t violations = 0;
  std::size_t degenerate = 0;
  double violation_rate = 0.0;
  double min_margin = 0.0;
  double mean_margin = 0.0;
  double max_abs_deviation = 0.0;
};

inline ReplicationResult run_replication(const SimConfig& cfg, std::size_t index) {
  Rng rng = Rng::for_stream(cfg.seed, index);
  const LoadingVector lambda = sample_loadings(cfg, rng);
  ReplicationResult res;
  res.loadings.assign(lambda.values().begin(), lambda.values().end());
  try {
    const Matrix data = sample_dataset(lambda, cfg.n, rng);
    const CorrelationMatrix r = sample_correlation(data);
    const auto rep = attenuation_check(r, 0.0, kSampleDegenerateThreshold);
    res.pairs = rep.pairs.size();
    res.violations = rep.violations;
    res.degenerate = rep.degenerate;
    res.min_margin = std::numeric_limits<double>::infinity();
    double total = 0.0;
    for (const auto& pr : rep.pairs) {
      res.min_margin = std::min(res.min_margin, pr.margin);
      total += pr.margin;
      res.max_abs_deviation =
          std::max(res.max_abs_deviation, std::abs(pr.zero_order - lambda[pr.i] * lambda[pr.j]));
    }
    res.mean_margin = total / static_cast<double>(rep.pairs.size());
  } catch (const Error& e) {
    res.error = e.what();
  }
  return res;
}

/// Replications run on up to `threads` workers (0 = hardware concurrency).
/// Each replication has its own random substream and results are combined in
/// replication order, so the summary does not depend on scheduling.
inline MonteCarloSummary monte_carlo_attenuation(const SimConfig& cfg, unsigned threads = 1) {
  cfg.validate();
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, cfg.replications));

  MonteCarloSummary out;
  out.config = cfg;
  out.replications.resize(cfg.replications);
  {
    std::vector<std::jthread> workers;
    for (unsigned w = 0; w < threads; ++w) {
      workers.emplace_back([&, w] {
        for (std::size_t k = w; k < cfg.replications; k += threads)
          out.replications[k] = run_replication(cfg, k);
      });
    }
  }

  double margin_total = 0.0;
  std::size_t margin_count = 0;
  out.min_margin = std::numeric_limits<double>::infinity();
  for (const auto& rep : out.replications) {
    if (rep.error) {
      ++out.failed_replications;
      continue;
    }
    out.pairs_tested += rep.pairs - rep.degenerate;
    out.violations += rep.violations;
    out.degenerate += rep.degenerate;
    out.min_margin = std::min(out.min_margin, rep.min_margin);
    margin_total += rep.mean_margin * static_cast<double>(rep.pairs);
    margin_count += rep.pairs;
    out.max_abs_deviation = std::max(out.max_abs_deviation, rep.max_abs_deviation);
  }
  if (margin_count == 0) out.min_margin = 0.0;
  out.mean_margin = margin_count ? margin_total / static_cast<double>(margin_count) : 0.0;
  out.violation_rate =
      out.pairs_tested ? static_cast<double>(out.violations) / static_cast<double>(out.pairs_tested)
                       : 0.0;
  return out;
}

// ---------------------------------------------------------------------------
// Closed form vs dense inversion timing.

inline constexpr double kBenchAgreement = 1e-8;

struct BenchRow {
  std::size_t p = 0;
  std::size_t repetitions = 0;
  double dense_seconds = 0.0;   // per call, best of repetitions
  double closed_seconds = 0.0;  // per call, best of repetitions
  double speedup = 0.0;         // dense / closed
  double disagreement = 0.0;    // |dense - closed| on the timed pair
};

namespace detail {

template <class F>
double best_seconds_per_call(F&& f, std::size_t repetitions, double min_batch_seconds) {
  using clock = std::chrono::steady_clock;
  // Grow the batch until a single batch is long enough to time reliably.
  std::size_t batch = 1;
  for (;;) {
    const auto t0 = clock::now();
    for (std::size_t k = 0; k < batch; ++k) f();
    const double dt = std::chrono::duration<double>(clock::now() - t0).count();
    if (dt >= min_batch_seconds || batch >= (std::size_t{1} << 24)) break;
    batch *= 4;
  }
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t r = 0; r < repetitions; ++r) {
    const auto t0 = clock::now();
    for (std::size_t k = 0; k < batch; ++k) f();
    best = std::min(best,
                    std::chrono::duration<double>(clock::now() - t0).count() /
                        static_cast<double>(batch));
  }
  return best;
}

}  // namespace detail

/// Thrown when the two routes disagree, in which case no timing is reported.
class BenchDisagreement : public Error {
 public:
  using Error::Error;
};

/// Times the partial correlation of pair (0, 1) given all other variables:
/// precision route on the implied matrix vs closed form on the loadings.
inline std::vector<BenchRow> bench_k_vs_inverse(const std::vector<std::size_t>& p_list,
                                                std::size_t repetitions,
                                                std::uint64_t seed = 2024) {
  for (auto p : p_list)
    if (p < 3) throw InvalidArgument("bench: every p must be at least 3");
  if (repetitions < 1) throw InvalidArgument("bench: repetitions must be at least 1");

  std::vector<BenchRow> rows;
  for (std::size_t idx = 0; idx < p_list.size(); ++idx) {
    SimConfig cfg;
    cfg.p = p_list[idx];
    cfg.loading_lo = 0.05;
    cfg.loading_hi = 0.95;
    cfg.sign_mixing = true;
    Rng rng = Rng::for_stream(seed, idx);
    const LoadingVector lambda = sample_loadings(cfg, rng);
    const CorrelationMatrix r = implied_correlation(lambda);

    const double dense = partial_corr_precision(r, 0, 1);
    const double closed = partial_corr_closed_form(lambda, 0, 1).partial;
    BenchRow row;
    row.p = cfg.p;
    row.repetitions = repetitions;
    row.disagreement = std::abs(dense - closed);
    if (!(row.disagreement <= kBenchAgreement))
      throw BenchDisagreement("bench: routes disagree at p = " + std::to_string(cfg.p));

    volatile double sink = 0.0;
    row.dense_seconds = detail::best_seconds_per_call(
        [&] { sink = sink + partial_corr_precision(r, 0, 1); }, repetitions, 0.02);
    row.closed_seconds = detail::best_seconds_per_call(
        [&] { sink = sink + partial_corr_closed_form(lambda, 0, 1).partial; }, repetitions, 0.02);
    row.speedup = row.dense_seconds / row.closed_seconds;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace unifactor
