#pragma once

#include <stdexcept>
#include <string>

namespace fsic {

// Series or quadrature failed to settle below the requested tolerance.
struct NonConvergent : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DimensionMismatch : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct GridMismatch : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct InvalidInterval : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Interval bounds crossed at the evaluation point (lower > upper).
struct EmptyInterval : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A stochastic integrand asked for increments at or beyond its own node.
struct AdaptednessViolation : std::logic_error {
  using std::logic_error::logic_error;
};

struct MissingConstant : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct ParseError : std::runtime_error {
  ParseError(int line_number, const std::string& what)
      : std::runtime_error("line " + std::to_string(line_number) + ": " + what),
        line(line_number) {}
  int line;
};

struct ValidationError : std::runtime_error {
  ValidationError(std::string key_name, const std::string& what)
      : std::runtime_error(key_name + ": " + what), key(std::move(key_name)) {}
  std::string key;
};

}  // namespace fsic
