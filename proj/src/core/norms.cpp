#include "locop/norms.hpp"

#include <cctype>
#include <charconv>
#include <cstdio>

#include "locop/errors.hpp"

namespace locop {

double parse_norm_index(const std::string& text) {
  std::string t;
  for (char ch : text) {
    if (ch != ' ') t.push_back(char(std::tolower(static_cast<unsigned char>(ch))));
  }
  if (t == "inf" || t == "infinity" || t == "∞") return kInf;
  double p = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), p);
  require(ec == std::errc() && ptr == t.data() + t.size() && !t.empty(), "invalid norm index '" + text + "'");
  require(p >= 1.0, "norm index must lie in [1, inf], got '" + text + "'");
  return p;
}

std::string format_norm_index(double p) {
  if (std::isinf(p)) return "inf";
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, p);
  return std::string(buf, ptr);
}

}  // namespace locop
