#include "locop/dyadic.hpp"

#include <algorithm>
#include <cmath>

#include "locop/errors.hpp"
#include "locop/norms.hpp"

namespace locop {

double DyadicFunction::cell_width() const { return std::ldexp(1.0, -level); }
double DyadicFunction::lo() const { return double(first) * cell_width(); }
double DyadicFunction::hi() const { return double(first + long(values.size())) * cell_width(); }

double DyadicFunction::operator()(double x) const {
  const double k = std::floor(std::ldexp(x, level));
  const long i = long(k) - first;
  if (i < 0 || i >= long(values.size())) return 0.0;
  return values[std::size_t(i)];
}

double DyadicFunction::lp_norm(double p) const {
  require(p >= 1.0, "lp_norm: p must lie in [1, inf]");
  const double v = locop::lp_norm(values, p);
  return std::isinf(p) ? v : v * std::pow(cell_width(), 1.0 / p);
}

DyadicFunction project_Pn(const Profile1D& f, int n, double lo, double hi) {
  require(n >= 0, "project_Pn: level must be nonnegative");
  require(hi > lo, "project_Pn: empty window");
  DyadicFunction out;
  out.level = n;
  out.first = long(std::floor(std::ldexp(lo, n)));
  const long last = long(std::ceil(std::ldexp(hi, n)));
  const double h = out.cell_width();
  out.values.resize(std::size_t(last - out.first));
  for (long k = out.first; k < last; ++k) {
    const double a = double(k) * h;
    out.values[std::size_t(k - out.first)] = f.integral(a, a + h) / h;
  }
  return out;
}

DyadicFunction refine(const DyadicFunction& f, int level) {
  require(level >= f.level, "refine: target level below source level");
  const long factor = 1L << (level - f.level);
  DyadicFunction out;
  out.level = level;
  out.first = f.first * factor;
  out.values.reserve(f.values.size() * std::size_t(factor));
  for (double v : f.values) out.values.insert(out.values.end(), std::size_t(factor), v);
  return out;
}

DyadicFunction project_Pn(const DyadicFunction& f, int n) {
  require(n >= 0, "project_Pn: level must be nonnegative");
  if (n >= f.level) return refine(f, n);
  const long factor = 1L << (f.level - n);
  DyadicFunction out;
  out.level = n;
  out.first = long(std::floor(double(f.first) / double(factor)));
  const long last = long(std::ceil(double(f.first + long(f.values.size())) / double(factor)));
  out.values.assign(std::size_t(last - out.first), 0.0);
  for (std::size_t i = 0; i < f.values.size(); ++i) {
    const long fine = f.first + long(i);
    const long coarse = long(std::floor(double(fine) / double(factor)));
    out.values[std::size_t(coarse - out.first)] += f.values[i];
  }
  for (auto& v : out.values) v /= double(factor);
  return out;
}

DyadicFunction dyadic_expansion(int n, long first, std::vector<double> coefficients) {
  require(n >= 0, "dyadic_expansion: level must be nonnegative");
  return DyadicFunction{n, first, std::move(coefficients)};
}

double lp_distance(const DyadicFunction& f, const DyadicFunction& g, double p) {
  const int level = std::max(f.level, g.level);
  const DyadicFunction a = refine(f, level), b = refine(g, level);
  const long first = std::min(a.first, b.first);
  const long last = std::max(a.first + long(a.values.size()), b.first + long(b.values.size()));
  std::vector<double> diff(std::size_t(last - first), 0.0);
  for (std::size_t i = 0; i < a.values.size(); ++i) diff[std::size_t(a.first - first) + i] += a.values[i];
  for (std::size_t i = 0; i < b.values.size(); ++i) diff[std::size_t(b.first - first) + i] -= b.values[i];
  return DyadicFunction{level, first, std::move(diff)}.lp_norm(p);
}

}  // namespace locop
