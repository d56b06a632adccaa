#pragma once

#include <cmath>
#include <cstdio>
#include <string>

namespace igb {

/// Shortest-roundtrip-safe text for a double ("%.17g"); "nan"/"inf" for
/// non-finite values. Output is locale-independent for CSV determinism.
inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace igb
