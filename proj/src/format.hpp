#pragma once

#include <charconv>
#include <string>

namespace netflow::detail {

/// Shortest round-trip decimal form.
inline std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace netflow::detail
