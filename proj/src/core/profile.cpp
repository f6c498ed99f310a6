#include "locop/profile.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unsupported/Eigen/Polynomials>

#include "locop/errors.hpp"
#include "locop/norms.hpp"

namespace locop {

namespace {

double horner(const std::vector<double>& c, double t) {
  double v = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) v = v * t + *it;
  return v;
}

std::vector<double> trimmed(std::vector<double> c) {
  while (!c.empty() && c.back() == 0.0) c.pop_back();
  return c;
}

// Real roots of the polynomial Σ c_k t^k.
std::vector<double> real_roots(std::vector<double> c) {
  c = trimmed(std::move(c));
  std::vector<double> out;
  if (c.size() <= 1) return out;
  if (c.size() == 2) {
    out.push_back(-c[0] / c[1]);
    return out;
  }
  if (c.size() == 3) {
    const double a = c[2], b = c[1], d = c[0];
    const double disc = b * b - 4.0 * a * d;
    if (disc < 0.0) return out;
    const double q = -0.5 * (b + std::copysign(std::sqrt(disc), b));
    if (q != 0.0) out.push_back(d / q);
    out.push_back(q / a);
    return out;
  }
  Eigen::VectorXd coeffs(Eigen::Index(c.size()));
  for (std::size_t i = 0; i < c.size(); ++i) coeffs(Eigen::Index(i)) = c[i];
  Eigen::PolynomialSolver<double, Eigen::Dynamic> solver(coeffs);
  for (Eigen::Index i = 0; i < solver.roots().size(); ++i) {
    const auto r = solver.roots()(i);
    if (std::abs(r.imag()) <= 1e-9 * std::max(1.0, std::abs(r.real()))) out.push_back(r.real());
  }
  return out;
}

std::vector<double> derivative(const std::vector<double>& c) {
  std::vector<double> d;
  for (std::size_t k = 1; k < c.size(); ++k) d.push_back(double(k) * c[k]);
  return d;
}

double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * double(n - k + i) / double(i);
  return r;
}

constexpr double kGlNodes[8] = {-0.9602898564975363, -0.7966664774136267, -0.5255324099163290,
                                -0.1834346424956498, 0.1834346424956498,  0.5255324099163290,
                                0.7966664774136267,  0.9602898564975363};
constexpr double kGlWeights[8] = {0.1012285362903763, 0.2223810344533745, 0.3137066458778873,
                                  0.3626837833783620, 0.3626837833783620, 0.3137066458778873,
                                  0.2223810344533745, 0.1012285362903763};

std::pair<double, double> gl8(const std::function<double(double)>& f, double a, double b) {
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  // symmetric pairing keeps mirrored integrands bitwise equal
  double s = 0.0, s_abs = 0.0;
  for (int i = 0; i < 4; ++i) {
    const double v = f(mid + half * kGlNodes[i]);
    const double w = f(mid + half * kGlNodes[7 - i]);
    s += kGlWeights[i] * (v + w);
    s_abs += kGlWeights[i] * (std::abs(v) + std::abs(w));
  }
  return {s * half, s_abs * half};
}

double gl_adaptive(const std::function<double(double)>& f, double a, double b, double whole, double eps,
                   int depth) {
  const double m = 0.5 * (a + b);
  const auto [l, la] = gl8(f, a, m);
  const auto [r, ra] = gl8(f, m, b);
  const double halves = l + r;
  if (std::abs(halves - whole) <= eps || std::abs(halves - whole) < 1e-300) return halves;
  if (depth >= 50 || m <= a || m >= b) throw_numerical("adaptive quadrature did not converge");
  return gl_adaptive(f, a, m, l, eps, depth + 1) + gl_adaptive(f, m, b, r, eps, depth + 1);
}

}  // namespace

double gauss_legendre(const std::function<double(double)>& f, double a, double b, double tol) {
  if (!(b > a)) return 0.0;
  const auto [whole, whole_abs] = gl8(f, a, b);
  return gl_adaptive(f, a, b, whole, tol * whole_abs, 0);
}

Profile1D Profile1D::piecewise(std::vector<double> breaks, std::vector<std::vector<double>> coeffs) {
  require(breaks.size() >= 2, "piecewise profile needs at least two breakpoints");
  require(coeffs.size() + 1 == breaks.size(), "piecewise profile: need one coefficient list per piece");
  for (std::size_t i = 0; i < breaks.size(); ++i) {
    require(std::isfinite(breaks[i]), "piecewise profile: breakpoints must be finite");
    if (i > 0) require(breaks[i] > breaks[i - 1], "piecewise profile: breakpoints must be strictly ascending");
  }
  for (const auto& c : coeffs) {
    for (double v : c) require(std::isfinite(v), "piecewise profile: coefficients must be finite");
  }
  Profile1D p;
  p.kind_ = Kind::pp;
  p.breaks_ = std::move(breaks);
  p.coeffs_ = std::move(coeffs);
  return p;
}

Profile1D Profile1D::gaussian(double sigma, double amplitude, double center) {
  require(sigma > 0.0 && std::isfinite(sigma), "gaussian profile: sigma must be positive");
  require(std::isfinite(amplitude) && std::isfinite(center), "gaussian profile: parameters must be finite");
  Profile1D p;
  p.kind_ = Kind::gaussian;
  p.param_ = sigma;
  p.amplitude_ = amplitude;
  p.center_ = center;
  return p;
}

Profile1D Profile1D::exponential(double rate, double amplitude, double center) {
  require(rate > 0.0 && std::isfinite(rate), "exponential profile: rate must be positive");
  require(std::isfinite(amplitude) && std::isfinite(center), "exponential profile: parameters must be finite");
  Profile1D p;
  p.kind_ = Kind::exponential;
  p.param_ = rate;
  p.amplitude_ = amplitude;
  p.center_ = center;
  return p;
}

Profile1D Profile1D::bspline(int order, double shift) {
  require(order >= 1 && order <= 12, "bspline order must lie in [1, 12]");
  const int m = order;
  double fact = 1.0;
  for (int i = 2; i < m; ++i) fact *= double(i);
  std::vector<double> breaks;
  std::vector<std::vector<double>> coeffs;
  for (int i = 0; i <= m; ++i) breaks.push_back(shift + double(i));
  for (int i = 0; i < m; ++i) {
    // N_m(x) = 1/(m−1)! Σ_j (−1)^j C(m,j) (x − j)_+^{m−1}, with x = i + t
    std::vector<double> c(std::size_t(m), 0.0);
    for (int j = 0; j <= i; ++j) {
      const double w = ((j % 2) ? -1.0 : 1.0) * binomial(m, j) / fact;
      const double base = double(i - j);
      for (int k = 0; k < m; ++k) {
        c[std::size_t(k)] += w * binomial(m - 1, k) * std::pow(base, double(m - 1 - k));
      }
    }
    coeffs.push_back(std::move(c));
  }
  return piecewise(std::move(breaks), std::move(coeffs));
}

Profile1D Profile1D::indicator(double a, double b, double value) {
  require(b > a, "indicator profile needs a < b");
  return piecewise({a, b}, {{value}});
}

double Profile1D::operator()(double x) const {
  switch (kind_) {
    case Kind::pp: {
      if (x < breaks_.front() || x >= breaks_.back()) return 0.0;
      const auto it = std::upper_bound(breaks_.begin(), breaks_.end(), x);
      const std::size_t i = std::size_t(it - breaks_.begin()) - 1;
      return horner(coeffs_[i], x - breaks_[i]);
    }
    case Kind::gaussian: {
      const double u = (x - center_) / param_;
      return amplitude_ * std::exp(-u * u);
    }
    case Kind::exponential:
      return amplitude_ * std::exp(-param_ * std::abs(x - center_));
  }
  return 0.0;
}

Profile1D Profile1D::translated(double tau) const {
  Profile1D p = *this;
  if (kind_ == Kind::pp) {
    for (auto& b : p.breaks_) b += tau;
  } else {
    p.center_ += tau;
  }
  return p;
}

Profile1D Profile1D::scaled(double t) const {
  Profile1D p = *this;
  if (kind_ == Kind::pp) {
    for (auto& c : p.coeffs_) {
      for (auto& v : c) v *= t;
    }
  } else {
    p.amplitude_ *= t;
  }
  return p;
}

Profile1D Profile1D::reflected() const {
  Profile1D p = *this;
  if (kind_ != Kind::pp) {
    p.center_ = -center_;
    return p;
  }
  const std::size_t n = coeffs_.size();
  p.breaks_.assign(breaks_.rbegin(), breaks_.rend());
  for (auto& b : p.breaks_) b = -b;
  p.coeffs_.assign(n, {});
  for (std::size_t i = 0; i < n; ++i) {
    // q(z) = c(w − z) with w the piece width
    const auto& c = coeffs_[i];
    const double w = breaks_[i + 1] - breaks_[i];
    std::vector<double> q(c.size(), 0.0);
    for (std::size_t k = 0; k < c.size(); ++k) {
      for (std::size_t j = 0; j <= k; ++j) {
        q[j] += c[k] * binomial(int(k), int(j)) * std::pow(w, double(k - j)) * ((j % 2) ? -1.0 : 1.0);
      }
    }
    p.coeffs_[n - 1 - i] = std::move(q);
  }
  return p;
}

std::pair<double, double> Profile1D::support(double tol) const {
  if (kind_ == Kind::pp) return {breaks_.front(), breaks_.back()};
  const double a = std::abs(amplitude_);
  if (a <= tol) return {center_, center_};
  const double r = kind_ == Kind::gaussian ? param_ * std::sqrt(std::log(a / tol)) : std::log(a / tol) / param_;
  return {center_ - r, center_ + r};
}

namespace {

struct RangeAcc {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  void add(double v) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
};

}  // namespace

std::pair<double, double> Profile1D::range(double a, double b) const {
  require(b >= a, "range: empty interval");
  RangeAcc acc;
  if (kind_ != Kind::pp) {
    const auto shape = [&](double x) { return (*this)(x); };
    const double peak = shape(std::clamp(center_, a, b));
    acc.add(peak);
    acc.add(shape(a));
    acc.add(shape(b));
    return {acc.lo, acc.hi};
  }
  acc.add((*this)(a));
  acc.add((*this)(b));
  for (std::size_t i = 0; i + 1 < breaks_.size(); ++i) {
    const double p0 = breaks_[i], p1 = breaks_[i + 1];
    if (p0 > b || p1 <= a) continue;
    const double u = std::max(p0, a), v = std::min(p1, b);
    const auto& c = coeffs_[i];
    acc.add(horner(c, u - p0));
    acc.add(horner(c, v - p0));  // left limit when v == p1
    for (double t : real_roots(derivative(c))) {
      const double x = p0 + t;
      if (x > u && x < v) acc.add(horner(c, t));
    }
  }
  return {acc.lo, acc.hi};
}

double Profile1D::sup_abs(double a, double b) const {
  const auto [lo, hi] = range(a, b);
  return std::max(std::abs(lo), std::abs(hi));
}

std::vector<double> Profile1D::smooth_cuts(double a, double b) const {
  std::vector<double> cuts{a};
  if (kind_ == Kind::pp) {
    for (double x : breaks_) {
      if (x > a && x < b) cuts.push_back(x);
    }
  } else if (center_ > a && center_ < b) {
    cuts.push_back(center_);
  }
  cuts.push_back(b);
  return cuts;
}

double Profile1D::integral(double a, double b) const {
  if (!(b > a)) return 0.0;
  switch (kind_) {
    case Kind::pp: {
      double s = 0.0;
      for (std::size_t i = 0; i + 1 < breaks_.size(); ++i) {
        const double p0 = breaks_[i], p1 = breaks_[i + 1];
        const double u = std::max(p0, a), v = std::min(p1, b);
        if (v <= u) continue;
        const auto& c = coeffs_[i];
        double fu = 0.0, fv = 0.0;
        for (std::size_t k = c.size(); k-- > 0;) {
          fu = fu * (u - p0) + c[k] / double(k + 1);
          fv = fv * (v - p0) + c[k] / double(k + 1);
        }
        s += fv * (v - p0) - fu * (u - p0);
      }
      return s;
    }
    case Kind::gaussian: {
      const double s = param_;
      return amplitude_ * s * std::sqrt(M_PI) / 2.0 * (std::erf((b - center_) / s) - std::erf((a - center_) / s));
    }
    case Kind::exponential: {
      // antiderivative of e^{−r|u|}: sign(u)(1 − e^{−r|u|})/r
      const auto prim = [&](double x) {
        const double u = x - center_;
        return std::copysign(-std::expm1(-param_ * std::abs(u)), u) / param_;
      };
      return amplitude_ * (prim(b) - prim(a));
    }
  }
  return 0.0;
}

double Profile1D::integral(double a, double b, const std::function<double(double)>& weight) const {
  if (!(b > a)) return 0.0;
  const auto cuts = smooth_cuts(a, b);
  const auto integrand = [&](double x) { return (*this)(x) * weight(x); };
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    if (kind_ == Kind::pp) {
      const double lo = std::max(cuts[i], breaks_.front()), hi = std::min(cuts[i + 1], breaks_.back());
      if (hi > lo) s += gauss_legendre(integrand, lo, hi);
    } else {
      s += gauss_legendre(integrand, cuts[i], cuts[i + 1]);
    }
  }
  return s;
}

double Profile1D::lp_norm(double p) const {
  require(p >= 1.0, "lp_norm: p must lie in [1, inf]");
  if (std::isinf(p)) {
    if (kind_ != Kind::pp) return std::abs(amplitude_);
    return sup_abs(breaks_.front(), breaks_.back());
  }
  switch (kind_) {
    case Kind::gaussian:
      return std::abs(amplitude_) * std::pow(param_ * std::sqrt(M_PI / p), 1.0 / p);
    case Kind::exponential:
      return std::abs(amplitude_) * std::pow(2.0 / (p * param_), 1.0 / p);
    case Kind::pp:
      break;
  }
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < breaks_.size(); ++i) {
    const auto& c = coeffs_[i];
    const double w = breaks_[i + 1] - breaks_[i];
    std::vector<double> cuts{0.0};
    for (double t : real_roots(c)) {
      if (t > 0.0 && t < w) cuts.push_back(t);
    }
    cuts.push_back(w);
    std::sort(cuts.begin(), cuts.end());
    const auto f = [&](double t) { return std::pow(std::abs(horner(c, t)), p); };
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) s += gauss_legendre(f, cuts[k], cuts[k + 1]);
  }
  return std::pow(s, 1.0 / p);
}

namespace {

// Half-open cell sup: sup over [k, k+1) (left limit at k+1 included).
double cell_sup(const Profile1D& f, long k) {
  const double a = double(k), b = double(k + 1);
  if (f.kind() != Profile1D::Kind::pp) return f.sup_abs(a, b);
  double s = std::abs(f(a));
  const auto& br = f.breaks();
  for (std::size_t i = 0; i + 1 < br.size(); ++i) {
    const double p0 = br[i], p1 = br[i + 1];
    if (p0 >= b || p1 <= a) continue;
    const auto& c = f.coeffs()[i];
    const double u = std::max(p0, a), v = std::min(p1, b);
    s = std::max(s, std::abs(horner(c, u - p0)));
    s = std::max(s, std::abs(horner(c, v - p0)));
    for (double t : real_roots(derivative(c))) {
      const double x = p0 + t;
      if (x > u && x < v) s = std::max(s, std::abs(horner(c, t)));
    }
  }
  return s;
}

}  // namespace

AmalgamNorm amalgam_norm(const Profile1D& f) {
  AmalgamNorm out;
  if (f.kind() == Profile1D::Kind::pp) {
    out.first_cell = long(std::floor(f.breaks().front()));
    out.last_cell = long(std::ceil(f.breaks().back())) - 1;
    for (long k = out.first_cell; k <= out.last_cell; ++k) out.value += cell_sup(f, k);
    return out;
  }
  constexpr double kCellFloor = 1e-14;
  const long k0 = long(std::floor(f.center()));
  double sum = cell_sup(f, k0);
  out.first_cell = out.last_cell = k0;
  for (int dir : {-1, 1}) {
    double prev = cell_sup(f, k0), last = prev;
    long k = k0;
    for (;;) {
      k += dir;
      last = cell_sup(f, k);
      if (last < kCellFloor) break;
      sum += last;
      prev = last;
      if (dir < 0) out.first_cell = k;
      else out.last_cell = k;
    }
    // log-concave profiles: successive cell ratios do not increase
    const double q = prev > 0.0 ? last / prev : 0.0;
    out.tail_bound += q < 1.0 ? last / (1.0 - q) : std::numeric_limits<double>::infinity();
  }
  out.value = sum;
  return out;
}

double sampled_amalgam_norm(const std::function<double(double)>& f, double lo, double hi, int per_cell) {
  require(per_cell > 0, "sampled_amalgam_norm: need at least one probe per cell");
  double s = 0.0;
  for (long k = long(std::floor(lo)); double(k) < hi; ++k) {
    double m = 0.0;
    for (int i = 0; i < per_cell; ++i) m = std::max(m, std::abs(f(double(k) + double(i) / per_cell)));
    s += m;
  }
  return s;
}

double modulus_of_continuity(const Profile1D& f, double delta, double x) {
  require(delta > 0.0 && delta < 1.0, "modulus_of_continuity: delta must lie in (0, 1)");
  const auto [lo, hi] = f.range(x - delta, x + delta);
  const double fx = f(x);
  return std::max(hi - fx, fx - lo);
}

}  // namespace locop
