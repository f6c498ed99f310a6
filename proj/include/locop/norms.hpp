#pragma once

#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace locop {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// ℓᵖ norm for p in [1, ∞]; p == kInf selects the max norm.
inline double lp_norm(std::span<const double> v, double p) {
  if (std::isinf(p)) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
  }
  if (p == 1.0) {
    double s = 0.0;
    for (double x : v) s += std::abs(x);
    return s;
  }
  if (p == 2.0) {
    // scaled to avoid overflow on large entries
    double scale = 0.0;
    for (double x : v) scale = std::max(scale, std::abs(x));
    if (scale == 0.0) return 0.0;
    double s = 0.0;
    for (double x : v) {
      const double y = x / scale;
      s += y * y;
    }
    return scale * std::sqrt(s);
  }
  double scale = 0.0;
  for (double x : v) scale = std::max(scale, std::abs(x));
  if (scale == 0.0) return 0.0;
  double s = 0.0;
  for (double x : v) s += std::pow(std::abs(x) / scale, p);
  return scale * std::pow(s, 1.0 / p);
}

// Parses "1", "2", "2.5", "inf" (also "infinity", "∞"). Throws PreconditionError
// for p < 1 or garbage.
double parse_norm_index(const std::string& text);

// Inverse of parse_norm_index, used in reports ("inf" for ∞).
std::string format_norm_index(double p);

}  // namespace locop
