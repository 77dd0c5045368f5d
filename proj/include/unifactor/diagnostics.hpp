#pragma once

// Necessary-condition screens for a one-factor correlation structure:
//  * attenuation: every partial correlation given all other variables is
//    strictly closer to zero than the matching zero-order correlation;
//  * vanishing tetrads: every tetrad of every 4-subset is zero.
// Passing both does not prove unidimensionality.

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

#include "unifactor/errors.hpp"
#include "unifactor/model.hpp"
#include "unifactor/partialcorr.hpp"

namespace unifactor {

inline constexpr double kDefaultEmpiricalTolerance = 1e-8;
inline constexpr double kDefaultModelTolerance = 1e-12;
/// Above this many variables, tetrads are evaluated on a deterministic subsample.
inline constexpr std::size_t kExhaustiveTetradMaxP = 20;
/// C(20, 4).
inline constexpr std::uint64_t kTetradSampleSize = 4845;

enum class PairStatus { pass, violation, degenerate };

inline std::string_view to_string(PairStatus s) {
  switch (s) {
    case PairStatus::pass: return "pass";
    case PairStatus::violation: return "violation";
    case PairStatus::degenerate: return "degenerate";
  }
  return "?";
}

struct PairRecord {
  std::size_t i = 0;
  std::size_t j = 0;
  double zero_order = 0.0;
  double partial = 0.0;
  double margin = 0.0;  // |zero_order| - |partial|
  PairStatus status = PairStatus::pass;

  bool pass() const noexcept { return status == PairStatus::pass; }
};

struct AttenuationReport {
  std::size_t variables = 0;
  std::vector<PairRecord> pairs;  // sorted by (i, j)
  double tolerance = 0.0;
  double degenerate_threshold = 0.0;
  std::size_t violations = 0;
  std::size_t degenerate = 0;

  bool pass() const noexcept { return violations == 0 && degenerate == 0; }
};

/// A pair passes iff margin > tol. A failing pair with |zero_order| at or
/// below `degenerate_threshold` is reported as degenerate instead of a
/// violation, since strict attenuation of a zero correlation cannot hold.
inline AttenuationReport attenuation_check(const CorrelationMatrix& r, double tol,
                                           double degenerate_threshold) {
  const std::size_t p = r.size();
  if (p < 3) throw InvalidArgument("attenuation check needs at least 3 variables");
  if (!(tol >= 0.0)) throw InvalidArgument("tolerance must be non-negative");

  const Matrix pc = precision_partial_correlations(r);
  AttenuationReport rep;
  rep.variables = p;
  rep.tolerance = tol;
  rep.degenerate_threshold = degenerate_threshold;
  rep.pairs.reserve(p * (p - 1) / 2);
  for (std::size_t i = 0; i < p; ++i) {
    for (std::size_t j = i + 1; j < p; ++j) {
      PairRecord rec{i, j, r(i, j), pc(i, j), 0.0, PairStatus::pass};
      rec.margin = std::abs(rec.zero_order) - std::abs(rec.partial);
      if (!(rec.margin > tol)) {
        if (std::abs(rec.zero_order) <= degenerate_threshold) {
          rec.status = PairStatus::degenerate;
          ++rep.degenerate;
        } else {
          rec.status = PairStatus::violation;
          ++rep.violations;
        }
      }
      rep.pairs.push_back(rec);
    }
  }
  return rep;
}

inline AttenuationReport attenuation_check(const CorrelationMatrix& r, double tol) {
  return attenuation_check(r, tol, tol);
}

struct TetradRecord {
  std::array<std::size_t, 4> idx{};
  /// s_ij s_kl - s_ik s_jl, s_ij s_kl - s_il s_jk, s_ik s_jl - s_il s_jk
  std::array<double, 3> tau{};
  std::array<bool, 3> vanishing{};

  bool all_vanish() const noexcept { return vanishing[0] && vanishing[1] && vanishing[2]; }
};

struct TetradReport {
  bool applicable = false;
  bool sampled = false;
  std::uint64_t total_quadruples = 0;
  double tolerance = 0.0;
  std::size_t non_vanishing = 0;  // quadruples with at least one non-vanishing tetrad
  std::vector<TetradRecord> quadruples;  // sorted by index tuple

  bool pass() const noexcept { return non_vanishing == 0; }
};

inline std::array<double, 3> tetrads(const Matrix& s, std::size_t i, std::size_t j,
                                     std::size_t k, std::size_t l) {
  const double a = s(i, j) * s(k, l);
  const double b = s(i, k) * s(j, l);
  const double c = s(i, l) * s(j, k);
  return {a - b, a - c, b - c};
}

/// n choose k; exact while the result and intermediates fit in 64 bits.
inline std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  std::uint64_t r = 1;
  for (std::uint64_t t = 1; t <= k; ++t) r = r * (n - k + t) / t;
  return r;
}

/// The `rank`-th 4-subset of {0..p-1} in lexicographic order.
inline std::array<std::size_t, 4> unrank_quadruple(std::size_t p, std::uint64_t rank) {
  std::array<std::size_t, 4> out{};
  std::size_t next = 0;
  for (std::size_t pos = 0; pos < 4; ++pos) {
    for (std::size_t v = next;; ++v) {
      const std::uint64_t block = binomial(p - 1 - v, 3 - pos);
      if (rank < block) {
        out[pos] = v;
        next = v + 1;
        break;
      }
      rank -= block;
    }
  }
  return out;
}

inline TetradReport tetrad_check(const CorrelationMatrix& r, double tol) {
  if (!(tol >= 0.0)) throw InvalidArgument("tolerance must be non-negative");
  TetradReport rep;
  rep.tolerance = tol;
  const std::size_t p = r.size();
  if (p < 4) return rep;
  rep.applicable = true;
  rep.total_quadruples = binomial(p, 4);

  auto visit = [&](std::size_t i, std::size_t j, std::size_t k, std::size_t l) {
    TetradRecord rec;
    rec.idx = {i, j, k, l};
    rec.tau = tetrads(r.matrix(), i, j, k, l);
    for (int t = 0; t < 3; ++t) rec.vanishing[t] = std::abs(rec.tau[t]) <= tol;
    if (!rec.all_vanish()) ++rep.non_vanishing;
    rep.quadruples.push_back(rec);
  };

  if (p <= kExhaustiveTetradMaxP) {
    rep.quadruples.reserve(rep.total_quadruples);
    for (std::size_t i = 0; i < p; ++i)
      for (std::size_t j = i + 1; j < p; ++j)
        for (std::size_t k = j + 1; k < p; ++k)
          for (std::size_t l = k + 1; l < p; ++l) visit(i, j, k, l);
  } else {
    // Evenly spaced lexicographic ranks; ascending ranks keep the output sorted.
    rep.sampled = true;
    const std::uint64_t m = kTetradSampleSize;
    rep.quadruples.reserve(m);
    for (std::uint64_t s = 0; s < m; ++s) {
      const auto rank = static_cast<std::uint64_t>(
          static_cast<unsigned __int128>(s) * rep.total_quadruples / m);
      const auto q = unrank_quadruple(p, rank);
      visit(q[0], q[1], q[2], q[3]);
    }
  }
  return rep;
}

enum class Verdict { consistent, inconsistent, untestable };

inline std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::consistent: return "consistent";
    case Verdict::inconsistent: return "inconsistent";
    case Verdict::untestable: return "untestable";
  }
  return "?";
}

inline constexpr std::string_view kScreenCaveat =
    "attenuation and vanishing tetrads are necessary, not sufficient, conditions for a "
    "unidimensional factor model";

struct ScreenReport {
  Verdict verdict = Verdict::consistent;
  AttenuationReport attenuation;
  TetradReport tetrads;
};

/// "inconsistent" on any attenuation violation or non-vanishing tetrad;
/// "untestable" when the only failures are degenerate (near-zero) pairs.
inline ScreenReport unidimensionality_screen(const CorrelationMatrix& r, double tol_att,
                                             double tol_tet) {
  ScreenReport rep;
  rep.attenuation = attenuation_check(r, tol_att);
  rep.tetrads = tetrad_check(r, tol_tet);
  if (rep.attenuation.violations > 0 || !rep.tetrads.pass())
    rep.verdict = Verdict::inconsistent;
  else if (rep.attenuation.degenerate > 0)
    rep.verdict = Verdict::untestable;
  else
    rep.verdict = Verdict::consistent;
  return rep;
}

}  // namespace unifactor
