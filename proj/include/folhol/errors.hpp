#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace folhol {

/// Base class for all errors thrown by the library.
struct error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Mismatched chart dimension, variable count or ambient rank.
struct dimension_error : error {
  using error::error;
};

/// Numerical integration left its bounding box or exceeded the step budget.
struct divergence_error : error {
  divergence_error(const std::string& msg, std::vector<double> last)
      : error(msg), last_state(std::move(last)) {}
  std::vector<double> last_state;
};

/// DSL syntax or semantic error with source position.
struct parse_error : error {
  parse_error(const std::string& msg, int line_, int col_)
      : error(msg + " (line " + std::to_string(line_) + ", col " + std::to_string(col_) + ")"),
        line(line_), col(col_) {}
  int line;
  int col;
};

} // namespace folhol
