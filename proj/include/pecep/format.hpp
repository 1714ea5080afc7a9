#pragma once

#include <cstdio>
#include <string>

namespace pecep {

// Floats are rendered with 9 significant digits in every emitted report.
inline std::string format_g9(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

// The same value a CSV consumer would parse back from format_g9 output.
// Used when mirroring CSV content into JSON so both carry identical numbers.
inline double round_g9(double v) {
  return std::strtod(format_g9(v).c_str(), nullptr);
}

}  // namespace pecep
