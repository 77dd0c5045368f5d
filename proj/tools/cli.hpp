#pragma once

// Command-line front end. Exit codes: 0 success / consistent, 1 violation
// found, 2 input or usage error. Indices are zero-based.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "unifactor/csv.hpp"
#include "unifactor/diagnostics.hpp"
#include "unifactor/model.hpp"
#include "unifactor/partialcorr.hpp"
#include "unifactor/report_json.hpp"
#include "unifactor/simulation.hpp"

namespace unifactor::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitViolation = 1;
inline constexpr int kExitUsage = 2;

namespace detail {

inline std::vector<double> parse_number_list(const std::string& text) {
  std::vector<double> out;
  for (auto field : csv::split(text)) {
    auto v = csv::parse_number(field);
    if (!v) throw InvalidArgument("not a number: '" + std::string(csv::trim(field)) + "'");
    out.push_back(*v);
  }
  return out;
}

inline std::vector<std::size_t> parse_index_list(const std::string& text) {
  std::vector<std::size_t> out;
  for (auto field : csv::split(text)) {
    auto v = csv::parse_number(field);
    if (!v || *v < 0 || *v != static_cast<double>(static_cast<std::size_t>(*v)))
      throw InvalidArgument("not an index: '" + std::string(csv::trim(field)) + "'");
    out.push_back(static_cast<std::size_t>(*v));
  }
  return out;
}

inline LoadingVector load_loadings(const std::string& list, const std::string& file) {
  if (!list.empty() && !file.empty())
    throw InvalidArgument("give either --lambda or --loadings-file, not both");
  if (!list.empty()) return validate_loadings(parse_number_list(list));
  if (!file.empty()) return validate_loadings(csv::read_vector_file(file));
  throw InvalidArgument("loadings required (--lambda or --loadings-file)");
}

inline CorrelationMatrix load_matrix(const std::string& path, bool covariance) {
  Matrix m = csv::read_matrix_file(path);
  return covariance ? CorrelationMatrix::from_covariance(m) : CorrelationMatrix(std::move(m));
}

inline std::string fmt(double v) { return csv::format_number(v); }

struct PcorOptions {
  std::string matrix;
  std::string lambda;
  std::string loadings_file;
  std::size_t i = 0;
  std::size_t j = 1;
  std::string given = "all";
  std::string route = "schur";
  bool covariance = false;
};

inline int run_pcor(const PcorOptions& o, std::ostream& out) {
  const bool from_loadings = !o.lambda.empty() || !o.loadings_file.empty();
  if (from_loadings == !o.matrix.empty())
    throw InvalidArgument("pcor needs exactly one of: a matrix file, --lambda, --loadings-file");
  const auto route = parse_route(o.route);
  if (!route) throw InvalidArgument("unknown route '" + o.route + "'");

  std::optional<LoadingVector> lambda;
  std::optional<CorrelationMatrix> r;
  if (from_loadings) {
    lambda = load_loadings(o.lambda, o.loadings_file);
    r = implied_correlation(*lambda);
  } else {
    r = load_matrix(o.matrix, o.covariance);
  }
  const std::size_t p = r->size();
  unifactor::detail::check_pair(p, o.i, o.j);
  const bool given_all = o.given == "all";
  const auto z = given_all ? all_except(p, o.i, o.j) : parse_index_list(o.given);
  unifactor::detail::check_conditioning(p, o.i, o.j, z);

  PartialCorrResult res;
  switch (*route) {
    case Route::precision:
      if (z.size() != p - 2)
        throw InvalidArgument("precision route conditions on all remaining variables; use "
                              "--given all or the schur route");
      res.i = o.i;
      res.j = o.j;
      res.conditioning = z;
      res.zero_order = (*r)(o.i, o.j);
      res.partial = partial_corr_precision(*r, o.i, o.j);
      res.route = Route::precision;
      break;
    case Route::schur:
      res = partial_corr_schur(*r, o.i, o.j, z);
      break;
    case Route::triplet:
      if (z.size() != 1) throw InvalidArgument("triplet route needs exactly one conditioning variable");
      res.i = o.i;
      res.j = o.j;
      res.conditioning = z;
      res.zero_order = (*r)(o.i, o.j);
      res.partial = partial_corr_triplet((*r)(o.i, o.j), (*r)(o.i, z[0]), (*r)(o.j, z[0]));
      res.route = Route::triplet;
      break;
    case Route::closed_form:
      if (!lambda) throw InvalidArgument("closed_form route needs loadings (--lambda or --loadings-file)");
      res = partial_corr_closed_form(*lambda, o.i, o.j, z);
      break;
  }

  out << "route: " << to_string(res.route) << '\n';
  out << "i: " << res.i << '\n' << "j: " << res.j << '\n';
  out << "given:";
  if (res.conditioning.empty()) out << " none";
  for (std::size_t k = 0; k < res.conditioning.size(); ++k)
    out << (k ? "," : " ") << res.conditioning[k];
  out << '\n';
  out << "zero_order: " << fmt(res.zero_order) << '\n';
  out << "partial: " << fmt(res.partial) << '\n';
  out << "margin: " << fmt(res.margin()) << '\n';
  if (res.k_value) out << "K: " << fmt(*res.k_value) << '\n';
  return kExitOk;
}

inline void print_summary_text(std::ostream& out, const MonteCarloSummary& s) {
  char buf[256];
  out << "replication  violations  degenerate     min_margin    mean_margin  max_abs_dev\n";
  for (std::size_t k = 0; k < s.replications.size(); ++k) {
    const auto& r = s.replications[k];
    if (r.error) {
      std::snprintf(buf, sizeof buf, "%11zu  error: %s\n", k, r.error->c_str());
    } else {
      std::snprintf(buf, sizeof buf, "%11zu  %10zu  %10zu  %13.6e  %13.6e  %11.3e\n", k,
                    r.violations, r.degenerate, r.min_margin, r.mean_margin,
                    r.max_abs_deviation);
    }
    out << buf;
  }
  std::snprintf(buf, sizeof buf,
                "violation rate %.6g (%zu of %zu pairs), degenerate %zu, failed replications %zu\n",
                s.violation_rate, s.violations, s.pairs_tested, s.degenerate,
                s.failed_replications);
  out << buf;
}

inline void print_bench_text(std::ostream& out, const std::vector<BenchRow>& rows) {
  char buf[256];
  out << "     p   dense [s/call]  closed [s/call]      speedup  |difference|\n";
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%6zu  %15.6e  %15.6e  %11.1f  %12.3e\n", r.p, r.dense_seconds,
                  r.closed_seconds, r.speedup, r.disagreement);
    out << buf;
  }
}

}  // namespace detail

/// Runs the CLI on `args` (args[0] is the program name).
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Partial correlations and unidimensionality screens for one-factor models"};
  app.require_subcommand(1);

  // implied
  std::string im_lambda, im_file;
  auto* implied = app.add_subcommand("implied", "Print the model-implied correlation matrix as CSV");
  implied->add_option("--lambda", im_lambda, "Comma-separated loadings, e.g. --lambda=0.5,-0.3");
  implied->add_option("--loadings-file", im_file, "File of loadings (CSV, one row or one per line)");

  // pcor
  detail::PcorOptions pc;
  auto* pcor = app.add_subcommand("pcor", "Zero-order and partial correlation of one pair");
  pcor->add_option("matrix", pc.matrix, "Correlation matrix CSV");
  pcor->add_option("--lambda", pc.lambda, "Use the matrix implied by these loadings");
  pcor->add_option("--loadings-file", pc.loadings_file, "Loadings file");
  pcor->add_option("--i", pc.i, "First index (zero-based)")->required();
  pcor->add_option("--j", pc.j, "Second index (zero-based)")->required();
  pcor->add_option("--given", pc.given, "'all' or comma-separated conditioning indices")->capture_default_str();
  pcor->add_option("--route", pc.route, "triplet | schur | precision | closed_form")->capture_default_str();
  pcor->add_flag("--covariance", pc.covariance, "Input is a covariance matrix");

  // check
  std::string ck_matrix;
  double ck_tol = kDefaultEmpiricalTolerance;
  double ck_tol_tet = kDefaultEmpiricalTolerance;
  bool ck_cov = false;
  auto* check = app.add_subcommand("check", "Screen a correlation matrix; JSON report on stdout");
  check->add_option("matrix", ck_matrix, "Correlation matrix CSV")->required();
  check->add_option("--tol", ck_tol, "Attenuation tolerance")->capture_default_str();
  check->add_option("--tol-tetrad", ck_tol_tet, "Tetrad tolerance")->capture_default_str();
  check->add_flag("--covariance", ck_cov, "Input is a covariance matrix");

  // simulate
  std::string sim_config;
  unsigned sim_threads = 1;
  std::string sim_format = "json";
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo attenuation study from a JSON config");
  simulate->add_option("config", sim_config, "Config JSON file")->required();
  simulate->add_option("--threads", sim_threads, "Worker threads (0 = all cores)")->capture_default_str();
  simulate->add_option("--format", sim_format, "json | text")->capture_default_str();

  // bench
  std::string bench_p = "10,100,1000";
  std::size_t bench_reps = 3;
  std::uint64_t bench_seed = 2024;
  std::string bench_format = "text";
  auto* bench = app.add_subcommand("bench", "Time closed form against dense inversion");
  bench->add_option("--p-list", bench_p, "Comma-separated numbers of variables")->capture_default_str();
  bench->add_option("--reps", bench_reps, "Timed repetitions per p")->capture_default_str();
  bench->add_option("--seed", bench_seed, "Seed for the loadings")->capture_default_str();
  bench->add_option("--format", bench_format, "text | json")->capture_default_str();

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*implied) {
      const auto lambda = detail::load_loadings(im_lambda, im_file);
      csv::write_matrix(out, implied_correlation(lambda).matrix());
      return kExitOk;
    }
    if (*pcor) return detail::run_pcor(pc, out);
    if (*check) {
      const auto r = detail::load_matrix(ck_matrix, ck_cov);
      const auto rep = unidimensionality_screen(r, ck_tol, ck_tol_tet);
      out << to_json(rep).dump(2) << '\n';
      return rep.verdict == Verdict::consistent ? kExitOk : kExitViolation;
    }
    if (*simulate) {
      std::ifstream in(sim_config);
      if (!in) throw InvalidArgument("cannot open " + sim_config);
      nlohmann::json j;
      try {
        j = nlohmann::json::parse(in);
      } catch (const nlohmann::json::exception& e) {
        throw InvalidArgument(std::string("config: ") + e.what());
      }
      const auto summary = monte_carlo_attenuation(sim_config_from_json(j), sim_threads);
      if (sim_format == "text")
        detail::print_summary_text(out, summary);
      else if (sim_format == "json")
        out << to_json(summary).dump(2) << '\n';
      else
        throw InvalidArgument("unknown format '" + sim_format + "'");
      return kExitOk;
    }
    if (*bench) {
      std::vector<std::size_t> ps;
      for (double v : detail::parse_number_list(bench_p)) {
        if (!(v >= 3) || v != static_cast<double>(static_cast<std::size_t>(v)))
          throw InvalidArgument("bench: every p must be an integer >= 3");
        ps.push_back(static_cast<std::size_t>(v));
      }
      if (bench_format != "text" && bench_format != "json")
        throw InvalidArgument("unknown format '" + bench_format + "'");
      std::vector<BenchRow> rows;
      try {
        rows = bench_k_vs_inverse(ps, bench_reps, bench_seed);
      } catch (const BenchDisagreement& e) {
        err << "error: " << e.what() << '\n';
        return kExitViolation;
      }
      if (bench_format == "text")
        detail::print_bench_text(out, rows);
      else
        out << to_json(rows).dump(2) << '\n';
      return kExitOk;
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace unifactor::cli
