#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <stdexcept>
#include <string>

namespace gluenn {

using Real = double;

// Base class for all library errors.
struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Non-finite intermediate inside a network/loss evaluation.
struct AutodiffError : Error {
  using Error::Error;
};

// Integrator failure (step underflow, step budget exhausted, Newton stall).
struct OdeError : Error {
  using Error::Error;
};

// Config parse/validation failure; `path` is the offending field.
struct ConfigError : Error {
  std::string path;
  ConfigError(std::string field_path, const std::string& msg)
      : Error(field_path + ": " + msg), path(std::move(field_path)) {}
};

// Training aborted on a non-finite loss or gradient.
struct TrainError : Error {
  int step = -1;
  TrainError(int at_step, const std::string& msg)
      : Error("step " + std::to_string(at_step) + ": " + msg), step(at_step) {}
};

// 17 significant digits: lossless decimal rendering of IEEE doubles,
// used for every CSV/JSON payload so reruns are byte-identical.
inline std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline bool is_finite(double v) { return std::isfinite(v); }

}  // namespace gluenn
