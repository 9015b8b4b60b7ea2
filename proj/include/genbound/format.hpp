#pragma once

#include <cmath>
#include <cstdio>
#include <string>

namespace genbound {

// Fixed 9-decimal formatting, no locale. Used everywhere a number crosses a
// process boundary (stdout, CSV, batch files) so reruns are byte-identical.
inline std::string format_fixed9(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.9f", v);
  return buf;
}

}  // namespace genbound
