#pragma once

#include <charconv>
#include <cstdio>
#include <string>

namespace katolab {

/// Shortest decimal that parses back to the same double.
inline std::string shortest(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

/// printf %.17g, the fixed-width round-trip form used in reports.
inline std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace katolab
