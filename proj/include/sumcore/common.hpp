#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace sumcore {

using NodeId = std::uint32_t;
using LayerId = std::uint32_t;
using Degree = std::uint32_t;

// Sorted, duplicate-free list of dense node ids.
using NodeSet = std::vector<NodeId>;

// Base class for every error the library reports.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed input file or config; carries the 1-based line when known.
struct ParseError : Error {
  ParseError(const std::string& what, std::size_t line = 0)
      : Error(line ? "line " + std::to_string(line) + ": " + what : what), line(line) {}
  std::size_t line;
};

// Caller passed arguments that violate a precondition.
struct InvalidArgument : Error {
  using Error::Error;
};

// An exhaustive search or decomposition exceeded its configured budget.
struct BudgetExceeded : Error {
  using Error::Error;
};

// Absolute tolerance for comparisons between real-valued summaries and thresholds.
inline constexpr double kTolerance = 1e-9;

// Real summaries are bucketed on a 1e-9 grid so that "equal summary value" is exact.
using QKey = std::int64_t;

inline QKey quantize(double x) {
  constexpr double lim = static_cast<double>(std::numeric_limits<QKey>::max() / 4);
  double scaled = x * 1e9;
  if (scaled > lim) scaled = lim;
  if (scaled < -lim) scaled = -lim;
  return static_cast<QKey>(std::llround(scaled));
}

inline double dequantize(QKey k) { return static_cast<double>(k) * 1e-9; }

inline std::vector<QKey> quantize(const std::vector<double>& xs) {
  std::vector<QKey> out;
  out.reserve(xs.size());
  for (double x : xs) out.push_back(quantize(x));
  return out;
}

}  // namespace sumcore
