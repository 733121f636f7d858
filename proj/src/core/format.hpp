#pragma once

#include <charconv>
#include <cmath>
#include <string>

namespace quasispec {

/// Shortest round-trip form; non-finite values become "inf", "-inf", "na".
inline std::string format_double(double x) {
  if (std::isnan(x)) return "na";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

}  // namespace quasispec
