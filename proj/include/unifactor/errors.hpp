#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace unifactor {

/// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// One loading that falls outside (-1, 0) U (0, 1).
struct LoadingIssue {
  enum class Kind { zero, unit, non_finite };
  std::size_t index;
  double value;
  Kind kind;
};

inline const char* to_string(LoadingIssue::Kind k) {
  switch (k) {
    case LoadingIssue::Kind::zero: return "zero loading";
    case LoadingIssue::Kind::unit: return "|loading| >= 1";
    case LoadingIssue::Kind::non_finite: return "non-finite loading";
  }
  return "?";
}

class InvalidLoadings : public Error {
 public:
  explicit InvalidLoadings(std::vector<LoadingIssue> issues)
      : Error(describe(issues)), issues_(std::move(issues)) {}

  const std::vector<LoadingIssue>& issues() const noexcept { return issues_; }

 private:
  static std::string describe(const std::vector<LoadingIssue>& issues) {
    std::string msg = "invalid loadings:";
    if (issues.empty()) return msg + " need at least 2 loadings";
    for (const auto& is : issues) {
      msg += " [index " + std::to_string(is.index) + ": " + to_string(is.kind) + ", value " +
             std::to_string(is.value) + "]";
    }
    return msg;
  }

  std::vector<LoadingIssue> issues_;
};

class NotPositiveDefinite : public Error {
 public:
  NotPositiveDefinite(std::size_t pivot_index, double pivot)
      : Error("matrix is not positive definite: pivot " + std::to_string(pivot_index) +
              " is " + std::to_string(pivot)),
        pivot_index_(pivot_index),
        pivot_(pivot) {}

  std::size_t pivot_index() const noexcept { return pivot_index_; }
  double pivot() const noexcept { return pivot_; }

 private:
  std::size_t pivot_index_;
  double pivot_;
};

/// A conditioning correlation of +-1 makes the three-variable formula undefined.
class DegenerateDenominator : public Error {
 public:
  using Error::Error;
};

class InvalidMatrix : public Error {
 public:
  using Error::Error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

}  // namespace unifactor
