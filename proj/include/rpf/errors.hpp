#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace rpf {

/// Base for every error the library raises on purpose.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent input data (CLI exit code 2).
class InputError : public Error {
 public:
  using Error::Error;
};

/// A configured search, enumeration or size budget was exhausted (exit code 3).
class BudgetExceeded : public Error {
 public:
  using Error::Error;
};

/// An internal invariant failed; this always indicates a bug (exit code 4).
class InternalError : public Error {
 public:
  using Error::Error;
};

/// Structured pass/fail result shared by all validators.
struct ValidationReport {
  std::vector<std::string> violations;

  bool ok() const { return violations.empty(); }
  void fail(std::string what) { violations.push_back(std::move(what)); }
  void merge(const ValidationReport& other) {
    violations.insert(violations.end(), other.violations.begin(), other.violations.end());
  }
};

}  // namespace rpf
