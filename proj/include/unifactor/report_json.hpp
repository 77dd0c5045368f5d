#pragma once

// JSON encodings of the report types. Field order is fixed (ordered_json).
//
// Screening report:
//   { "verdict": "consistent" | "inconsistent" | "untestable",
//     "tolerance": { "attenuation": x, "tetrad": y },
//     "p": n,
//     "pairs":   [ { "i", "j", "zero_order", "partial", "margin", "status" } ],
//     "tetrads": [ { "indices": [i,j,k,l], "tau": [t1,t2,t3], "vanishing": [b,b,b] } ],
//     "summary": { "attenuation_violations", "degenerate_pairs",
//                  "tetrads_applicable", "tetrads_sampled", "tetrads_total",
//                  "tetrads_evaluated", "non_vanishing_quadruples" },
//     "note": "..." }

#include "json.hpp"

#include "unifactor/diagnostics.hpp"
#include "unifactor/simulation.hpp"

namespace unifactor {

using ordered_json = nlohmann::ordered_json;

inline ordered_json pairs_to_json(const AttenuationReport& rep) {
  ordered_json arr = ordered_json::array();
  for (const auto& pr : rep.pairs) {
    arr.push_back({{"i", pr.i},
                   {"j", pr.j},
                   {"zero_order", pr.zero_order},
                   {"partial", pr.partial},
                   {"margin", pr.margin},
                   {"status", to_string(pr.status)}});
  }
  return arr;
}

inline ordered_json tetrads_to_json(const TetradReport& rep) {
  ordered_json arr = ordered_json::array();
  for (const auto& q : rep.quadruples) {
    arr.push_back({{"indices", q.idx}, {"tau", q.tau}, {"vanishing", q.vanishing}});
  }
  return arr;
}

inline ordered_json to_json(const ScreenReport& rep) {
  ordered_json j;
  j["verdict"] = to_string(rep.verdict);
  j["tolerance"] = {{"attenuation", rep.attenuation.tolerance},
                    {"tetrad", rep.tetrads.tolerance}};
  j["p"] = rep.attenuation.variables;
  j["pairs"] = pairs_to_json(rep.attenuation);
  j["tetrads"] = tetrads_to_json(rep.tetrads);
  j["summary"] = {{"attenuation_violations", rep.attenuation.violations},
                  {"degenerate_pairs", rep.attenuation.degenerate},
                  {"tetrads_applicable", rep.tetrads.applicable},
                  {"tetrads_sampled", rep.tetrads.sampled},
                  {"tetrads_total", rep.tetrads.total_quadruples},
                  {"tetrads_evaluated", rep.tetrads.quadruples.size()},
                  {"non_vanishing_quadruples", rep.tetrads.non_vanishing}};
  j["note"] = kScreenCaveat;
  return j;
}

inline ordered_json to_json(const SimConfig& c) {
  return {{"p", c.p},
          {"n", c.n},
          {"replications", c.replications},
          {"loading_range", {c.loading_lo, c.loading_hi}},
          {"sign_mixing", c.sign_mixing},
          {"seed", c.seed}};
}

/// Missing keys keep their defaults; unknown keys are rejected.
inline SimConfig sim_config_from_json(const nlohmann::json& j) {
  SimConfig c;
  if (!j.is_object()) throw InvalidArgument("simulation config must be a JSON object");
  auto as_count = [](const nlohmann::json& v, const char* key) -> std::size_t {
    if (!v.is_number_integer() || v.get<long long>() < 0)
      throw InvalidArgument(std::string("config: ") + key + " must be a non-negative integer");
    return v.get<std::size_t>();
  };
  for (const auto& [key, v] : j.items()) {
    if (key == "p") {
      c.p = as_count(v, "p");
    } else if (key == "n") {
      c.n = as_count(v, "n");
    } else if (key == "replications") {
      c.replications = as_count(v, "replications");
    } else if (key == "loading_range") {
      if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
        throw InvalidArgument("config: loading_range must be [lo, hi]");
      c.loading_lo = v[0].get<double>();
      c.loading_hi = v[1].get<double>();
    } else if (key == "sign_mixing") {
      if (!v.is_boolean()) throw InvalidArgument("config: sign_mixing must be a boolean");
      c.sign_mixing = v.get<bool>();
    } else if (key == "seed") {
      if (!v.is_number_integer()) throw InvalidArgument("config: seed must be an integer");
      c.seed = v.is_number_unsigned() ? v.get<std::uint64_t>()
                                      : static_cast<std::uint64_t>(v.get<std::int64_t>());
    } else {
      throw InvalidArgument("config: unknown key '" + key + "'");
    }
  }
  c.validate();
  return c;
}

inline ordered_json to_json(const MonteCarloSummary& s) {
  ordered_json reps = ordered_json::array();
  for (std::size_t k = 0; k < s.replications.size(); ++k) {
    const auto& r = s.replications[k];
    ordered_json e = {{"replication", k}, {"loadings", r.loadings}};
    if (r.error) {
      e["error"] = *r.error;
    } else {
      e["pairs"] = r.pairs;
      e["violations"] = r.violations;
      e["degenerate"] = r.degenerate;
      e["min_margin"] = r.min_margin;
      e["mean_margin"] = r.mean_margin;
      e["max_abs_deviation"] = r.max_abs_deviation;
    }
    reps.push_back(std::move(e));
  }
  return {{"config", to_json(s.config)},
          {"violation_rate", s.violation_rate},
          {"violations", s.violations},
          {"pairs_tested", s.pairs_tested},
          {"degenerate_pairs", s.degenerate},
          {"failed_replications", s.failed_replications},
          {"min_margin", s.min_margin},
          {"mean_margin", s.mean_margin},
          {"max_abs_deviation", s.max_abs_deviation},
          {"replications", std::move(reps)}};
}

inline ordered_json to_json(const std::vector<BenchRow>& rows) {
  ordered_json arr = ordered_json::array();
  for (const auto& r : rows) {
    arr.push_back({{"p", r.p},
                   {"repetitions", r.repetitions},
                   {"dense_seconds", r.dense_seconds},
                   {"closed_form_seconds", r.closed_seconds},
                   {"speedup", r.speedup},
                   {"disagreement", r.disagreement},
                   {"agreement_gate", kBenchAgreement}});
  }
  return arr;
}

}  // namespace unifactor
