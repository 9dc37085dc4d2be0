#pragma once

#include <stdexcept>
#include <string>

namespace uctc {

// Shape/size mismatch between operands (wrong matrix dimensions, bad index
// length, inconsistent subsystem factorization).
struct DimensionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Input violates a value-level contract (non-unitary gate matrix, invalid
// basis rule, malformed query).
struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Request exceeds a configured size cap (dense width, brute-force bound).
struct ResourceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Text-format error; carries the 1-based line number.
struct ParseError : std::runtime_error {
  ParseError(const std::string& message, int line_number)
      : std::runtime_error(message + " (line " + std::to_string(line_number) + ")"),
        line(line_number) {}
  int line;
};

}  // namespace uctc
