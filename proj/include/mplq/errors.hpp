#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace mplq {

// Invalid generator/solver settings.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Out-of-domain argument to a numeric routine (e.g. non-positive speed).
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A state or matrix whose dimensions do not match the task pool.
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Malformed instance/solution document.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NothingToSolveError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class UndefinedRateError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Brute force refused because the search space is larger than the limit.
class OracleRefused : public std::runtime_error {
 public:
  OracleRefused(long double cardinality, std::uint64_t limit);

  long double cardinality() const { return cardinality_; }
  std::uint64_t limit() const { return limit_; }

 private:
  long double cardinality_;
  std::uint64_t limit_;
};

}  // namespace mplq
