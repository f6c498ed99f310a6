#include "locop/kernelop.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>

#include "locop/errors.hpp"
#include "locop/norms.hpp"
#include "locop/parallel.hpp"

namespace locop {

namespace {

void check_common(const Profile1D& envelope, double alpha, double d) {
  (void)envelope;
  require(alpha > 0.0 && alpha <= 1.0, "kernel: alpha must lie in (0, 1]");
  require(d >= 0.0 && std::isfinite(d), "kernel: D must be finite and nonnegative");
}

double overlap(double a0, double a1, double b0, double b1) { return std::max(0.0, std::min(a1, b1) - std::max(a0, b0)); }

}  // namespace

KernelOperator KernelOperator::convolution(Profile1D g, Profile1D envelope, double alpha, double d) {
  check_common(envelope, alpha, d);
  KernelOperator k;
  k.rule_ = Rule::convolution;
  k.first_ = std::move(g);
  k.envelope_ = std::move(envelope);
  k.alpha_ = alpha;
  k.d_ = d;
  return k;
}

KernelOperator KernelOperator::separable(Profile1D u, Profile1D v, Profile1D envelope, double alpha, double d) {
  check_common(envelope, alpha, d);
  KernelOperator k;
  k.rule_ = Rule::separable;
  k.first_ = std::move(u);
  k.second_ = std::move(v);
  k.envelope_ = std::move(envelope);
  k.alpha_ = alpha;
  k.d_ = d;
  return k;
}

KernelOperator KernelOperator::table(int level, long x_first, long y_first, Eigen::MatrixXd values,
                                     Profile1D envelope, double alpha, double d) {
  check_common(envelope, alpha, d);
  require(level >= 0 && level <= 24, "table kernel: level must lie in [0, 24]");
  require(values.size() > 0, "table kernel: empty value table");
  require(values.allFinite(), "table kernel: values must be finite");
  KernelOperator k;
  k.rule_ = Rule::table;
  k.level_ = level;
  k.x_first_ = x_first;
  k.y_first_ = y_first;
  k.values_ = std::move(values);
  k.envelope_ = std::move(envelope);
  k.alpha_ = alpha;
  k.d_ = d;
  return k;
}

double KernelOperator::operator()(double x, double y) const {
  switch (rule_) {
    case Rule::convolution: return first_(x - y);
    case Rule::separable: return first_(x) * second_(y);
    case Rule::table: {
      const long i = long(std::floor(std::ldexp(x, level_))) - x_first_;
      const long j = long(std::floor(std::ldexp(y, level_))) - y_first_;
      if (i < 0 || j < 0 || i >= values_.rows() || j >= values_.cols()) return 0.0;
      return values_(i, j);
    }
  }
  return 0.0;
}

KernelOperator KernelOperator::transposed() const {
  KernelOperator k = *this;
  k.envelope_ = envelope_.reflected();
  switch (rule_) {
    case Rule::convolution:
      k.first_ = first_.reflected();
      break;
    case Rule::separable:
      std::swap(k.first_, k.second_);
      break;
    case Rule::table:
      k.values_ = values_.transpose();
      std::swap(k.x_first_, k.y_first_);
      break;
  }
  return k;
}

double KernelOperator::cell_integral(double s0, double t0, double h) const {
  switch (rule_) {
    case Rule::convolution: {
      // ∫∫ g(s − t) = ∫ g(u)·(h − |u − Δ|)₊ du, split at Δ
      const double delta = s0 - t0;
      const double lo = delta - h, hi = delta + h;
      const double rising = first_.integral(lo, delta, [lo](double u) { return u - lo; });
      const double falling = first_.integral(delta, hi, [hi](double u) { return hi - u; });
      return rising + falling;
    }
    case Rule::separable:
      return first_.integral(s0, s0 + h) * second_.integral(t0, t0 + h);
    case Rule::table: {
      const double w = std::ldexp(1.0, -level_);
      const long i0 = std::max(0L, long(std::floor(s0 / w)) - x_first_);
      const long i1 = std::min(long(values_.rows()), long(std::ceil((s0 + h) / w)) - x_first_);
      const long j0 = std::max(0L, long(std::floor(t0 / w)) - y_first_);
      const long j1 = std::min(long(values_.cols()), long(std::ceil((t0 + h) / w)) - y_first_);
      double s = 0.0;
      for (long i = i0; i < i1; ++i) {
        const double ox = overlap(s0, s0 + h, double(i + x_first_) * w, double(i + x_first_ + 1) * w);
        if (ox == 0.0) continue;
        for (long j = j0; j < j1; ++j) {
          const double oy = overlap(t0, t0 + h, double(j + y_first_) * w, double(j + y_first_ + 1) * w);
          s += values_(i, j) * ox * oy;
        }
      }
      return s;
    }
  }
  return 0.0;
}

double KernelOperator::row_integral(double x, double t0, double t1) const {
  switch (rule_) {
    case Rule::convolution: return first_.integral(x - t1, x - t0);
    case Rule::separable: return first_(x) * second_.integral(t0, t1);
    case Rule::table: {
      const double w = std::ldexp(1.0, -level_);
      const long i = long(std::floor(x / w)) - x_first_;
      if (i < 0 || i >= values_.rows()) return 0.0;
      double s = 0.0;
      for (long j = 0; j < values_.cols(); ++j) {
        s += values_(i, j) * overlap(t0, t1, double(j + y_first_) * w, double(j + y_first_ + 1) * w);
      }
      return s;
    }
  }
  return 0.0;
}

std::pair<double, double> KernelOperator::offset_support(double tol) const {
  if (rule_ != Rule::convolution) return {-kInf, kInf};
  const double peak = first_.lp_norm(kInf);
  if (peak == 0.0) return {0.0, 0.0};
  return first_.support(tol * peak);
}

double KernelOperator::padding() const {
  const double peak = envelope_.lp_norm(kInf);
  if (peak == 0.0) return 0.0;
  const auto [lo, hi] = envelope_.support(1e-10 * peak);
  return std::max(std::abs(lo), std::abs(hi));
}

namespace {

std::vector<double> delta_grid() {
  std::vector<double> d;
  for (int k = 1; k <= 10; ++k) d.push_back(std::ldexp(1.0, -k));
  return d;
}

// Region of y probes for non-convolution kernels.
std::pair<double, double> y_region(const KernelOperator& op) {
  if (op.rule() == KernelOperator::Rule::separable) {
    const auto [a, b] = op.u().support();
    return {a - 1.0, b + 1.0};
  }
  const double w = std::ldexp(1.0, -op.table_level());
  return {double(op.x_first()) * w - 1.0, double(op.x_first() + op.values().rows()) * w + 1.0};
}

std::pair<double, double> u_region(const KernelOperator& op) {
  const auto [e0, e1] = op.envelope().support(1e-17 * std::max(1e-300, op.envelope().lp_norm(kInf)));
  double lo = e0, hi = e1;
  if (op.rule() == KernelOperator::Rule::convolution) {
    const auto [g0, g1] = op.g().support();
    lo = std::min(lo, -g1);
    hi = std::max(hi, -g0);
  } else if (op.rule() == KernelOperator::Rule::separable) {
    const auto [a, b] = op.u().support();
    const auto [c, d] = op.v().support();
    lo = std::min(lo, c - b);
    hi = std::max(hi, d - a);
  } else {
    const double w = std::ldexp(1.0, -op.table_level());
    lo = std::min(lo, double(op.y_first()) * w - double(op.x_first() + op.values().rows()) * w);
    hi = std::max(hi, double(op.y_first() + op.values().cols()) * w - double(op.x_first()) * w);
  }
  return {lo - 1.0, hi + 1.0};
}

}  // namespace

KernelCheck check_kernel(const KernelOperator& op, int per_cell) {
  require(per_cell > 0, "check_kernel: need a positive probe density");
  KernelCheck out;
  const auto [ulo, uhi] = u_region(op);
  const Profile1D& h = op.envelope();
  const bool conv = op.rule() == KernelOperator::Rule::convolution;
  std::vector<double> ys;
  if (!conv) {
    const auto [y0, y1] = y_region(op);
    const std::size_t ny = std::size_t(std::ceil((y1 - y0) * per_cell)) + 1;
    for (std::size_t i = 0; i < ny; ++i) ys.push_back(y0 + (y1 - y0) * double(i) / double(ny - 1));
  }
  const auto envelope_at = [&](double u) {
    if (conv) return std::abs(op.g()(-u));
    double m = 0.0;
    for (double y : ys) m = std::max(m, std::abs(op(y, u + y)));
    return m;
  };
  if (conv) {
    out.envelope_amalgam = amalgam_norm(op.g().reflected()).value;
  } else {
    out.envelope_amalgam = sampled_amalgam_norm(envelope_at, ulo, uhi, per_cell);
  }
  out.envelope_excess = -kInf;
  for (long k = long(std::floor(ulo)); double(k) < uhi; ++k) {
    for (int i = 0; i < per_cell; ++i) {
      const double u = double(k) + double(i) / per_cell;
      out.envelope_excess = std::max(out.envelope_excess, envelope_at(u) - h(u));
    }
  }
  out.envelope_ok = out.envelope_excess <= 1e-12 && out.envelope_amalgam <= op.d() * (1.0 + 1e-12);

  for (double delta : delta_grid()) {
    const auto modulus_at = [&](double u) {
      if (conv) {
        const auto [lo, hi] = op.g().range(-u - 2.0 * delta, -u + 2.0 * delta);
        const double c = op.g()(-u);
        return std::max(hi - c, c - lo);
      }
      double m = 0.0;
      constexpr int kSteps = 4;
      for (double y : ys) {
        const double base = op(y, u + y);
        for (int a = -kSteps; a <= kSteps; ++a) {
          for (int b = -kSteps; b <= kSteps; ++b) {
            const double z1 = delta * a / kSteps, z2 = delta * b / kSteps;
            m = std::max(m, std::abs(op(y + z1, u + y + z2) - base));
          }
        }
      }
      return m;
    };
    const double w1 = sampled_amalgam_norm(modulus_at, ulo, uhi, per_cell);
    out.modulus.emplace_back(delta, w1);
    if (w1 > op.d() * std::pow(delta, op.alpha()) * (1.0 + 1e-9) + 1e-15) out.modulus_ok = false;
  }
  return out;
}

void require_kernel(const KernelOperator& op, int per_cell) {
  const auto c = check_kernel(op, per_cell);
  require(c.envelope_excess <= 1e-12, "kernel exceeds its envelope (excess " + std::to_string(c.envelope_excess) + ")");
  require(c.envelope_amalgam <= op.d() * (1.0 + 1e-12),
          "kernel envelope amalgam norm " + std::to_string(c.envelope_amalgam) + " exceeds D");
  for (const auto& [delta, w] : c.modulus) {
    require(w <= op.d() * std::pow(delta, op.alpha()) * (1.0 + 1e-9) + 1e-15,
            "kernel modulus exceeds D*delta^alpha at delta = " + std::to_string(delta));
  }
}

KernelSamples apply_kernel(const KernelOperator& op, const DyadicFunction& f, std::span<const double> points,
                           double r) {
  require(r >= 1.0, "apply_kernel: r must lie in [1, inf]");
  KernelSamples out;
  out.x.assign(points.begin(), points.end());
  out.values.assign(points.size(), 0.0);
  const double w = f.cell_width();
  parallel_for(points.size(), [&](std::size_t i) {
    double s = 0.0;
    for (std::size_t j = 0; j < f.values.size(); ++j) {
      if (f.values[j] == 0.0) continue;
      const double t0 = double(f.first + long(j)) * w;
      s += f.values[j] * op.row_integral(points[i], t0, t0 + w);
    }
    out.values[i] = s;
  });
  if (points.size() >= 2) {
    const double step = points[1] - points[0];
    double norm = lp_norm(out.values, r);
    if (!std::isinf(r)) norm *= std::pow(step, 1.0 / r);
    const double base = amalgam_norm(op.envelope()).value * f.lp_norm(r);
    out.schur_ratio = base > 0.0 ? norm / base : 0.0;
  }
  return out;
}

namespace {

struct CellRange {
  long first;
  long count;
};

CellRange cells(int n, double lo, double hi) {
  require(n >= 0 && n <= 24, "kernel discretization: level must lie in [0, 24]");
  require(hi > lo, "kernel discretization: empty window");
  const long a = long(std::floor(std::ldexp(lo, n)));
  const long b = long(std::ceil(std::ldexp(hi, n)));
  return {a, b - a};
}

// 2^{2n}·cell_integral at offsets m·2^{−n}, m in [mlo, mhi].
struct Taps {
  long mlo = 0;
  std::vector<double> values;
};

Taps convolution_taps(const KernelOperator& op, int n, long max_offset) {
  const double h = std::ldexp(1.0, -n);
  const double scale = std::ldexp(1.0, 2 * n);
  const auto [s0, s1] = op.offset_support();
  Taps t;
  if (s0 == 0.0 && s1 == 0.0 && op.g().lp_norm(kInf) == 0.0) return t;
  t.mlo = std::max(-max_offset, long(std::floor(s0 / h)) - 1);
  const long mhi = std::min(max_offset, long(std::ceil(s1 / h)) + 1);
  if (mhi < t.mlo) return t;
  t.values.assign(std::size_t(mhi - t.mlo + 1), 0.0);
  parallel_for(t.values.size(), [&](std::size_t q) {
    const double delta = double(t.mlo + long(q)) * h;
    t.values[q] = scale * op.cell_integral(delta, 0.0, h);
  });
  return t;
}

std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

// y[i] = Σ_j taps[i − j] c[j] for i in [0, c.size()).
std::vector<double> toeplitz_apply(const Taps& taps, const std::vector<double>& c) {
  const std::size_t n = c.size();
  std::vector<double> y(n, 0.0);
  if (taps.values.empty() || n == 0) return y;
  const std::size_t l = taps.values.size();
  std::size_t size = 1;
  while (size < n + l) size <<= 1;
  const std::size_t bins = size / 2 + 1;
  double* a = fftw_alloc_real(size);
  double* b = fftw_alloc_real(size);
  fftw_complex* fa = fftw_alloc_complex(bins);
  fftw_complex* fb = fftw_alloc_complex(bins);
  fftw_plan pa, pb, inv;
  {
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    pa = fftw_plan_dft_r2c_1d(int(size), a, fa, FFTW_ESTIMATE);
    pb = fftw_plan_dft_r2c_1d(int(size), b, fb, FFTW_ESTIMATE);
    inv = fftw_plan_dft_c2r_1d(int(size), fa, a, FFTW_ESTIMATE);
  }
  std::fill(a, a + size, 0.0);
  std::fill(b, b + size, 0.0);
  std::copy(taps.values.begin(), taps.values.end(), a);
  std::copy(c.begin(), c.end(), b);
  fftw_execute(pa);
  fftw_execute(pb);
  for (std::size_t k = 0; k < bins; ++k) {
    const double re = fa[k][0] * fb[k][0] - fa[k][1] * fb[k][1];
    const double im = fa[k][0] * fb[k][1] + fa[k][1] * fb[k][0];
    fa[k][0] = re;
    fa[k][1] = im;
  }
  fftw_execute(inv);
  // z[s] = Σ_j taps[s − j] c[j] with taps offset by mlo: y[i] = z[i − mlo]
  for (std::size_t i = 0; i < n; ++i) {
    const long s = long(i) - taps.mlo;
    if (s >= 0 && std::size_t(s) < size) y[i] = a[s] / double(size);
  }
  {
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    fftw_destroy_plan(pa);
    fftw_destroy_plan(pb);
    fftw_destroy_plan(inv);
  }
  fftw_free(a);
  fftw_free(b);
  fftw_free(fa);
  fftw_free(fb);
  return y;
}

}  // namespace

LocalizedMatrix discretize_kernel(const KernelOperator& op, int n, double lo, double hi) {
  const CellRange cr = cells(n, lo, hi);
  const double h = std::ldexp(1.0, -n);
  const double scale = std::ldexp(1.0, 2 * n);
  auto set = std::make_shared<const IndexSet>(IndexSet::uniform_range(double(cr.first) * h, h, std::size_t(cr.count)));
  std::vector<std::vector<Entry>> rows(std::size_t(cr.count));
  if (op.rule() == KernelOperator::Rule::convolution) {
    const Taps taps = convolution_taps(op, n, cr.count - 1);
    const long mhi = taps.mlo + long(taps.values.size()) - 1;
    parallel_for(rows.size(), [&](std::size_t i) {
      for (long m = taps.mlo; m <= mhi; ++m) {
        const long j = long(i) - m;
        if (j < 0 || j >= cr.count) continue;
        const double v = taps.values[std::size_t(m - taps.mlo)];
        if (std::abs(v) >= LocalizedMatrix::kDropBelow) rows[i].push_back({i, std::size_t(j), v});
      }
      std::sort(rows[i].begin(), rows[i].end(), [](const Entry& a, const Entry& b) { return a.col < b.col; });
    });
  } else {
    parallel_for(rows.size(), [&](std::size_t i) {
      const double s0 = double(cr.first + long(i)) * h;
      for (long j = 0; j < cr.count; ++j) {
        const double v = scale * op.cell_integral(s0, double(cr.first + j) * h, h);
        if (std::abs(v) >= LocalizedMatrix::kDropBelow) rows[i].push_back({i, std::size_t(j), v});
      }
    });
  }
  std::vector<Entry> entries;
  for (auto& r : rows) entries.insert(entries.end(), r.begin(), r.end());
  return LocalizedMatrix(set, set, std::move(entries));
}

DyadicFunction apply_discretized(const KernelOperator& op, int n, double lo, double hi, const Profile1D& f) {
  const CellRange cr = cells(n, lo, hi);
  const double h = std::ldexp(1.0, -n);
  const DyadicFunction c = project_Pn(f, n, double(cr.first) * h, double(cr.first + cr.count) * h);
  DyadicFunction out{n, cr.first, {}};
  if (op.rule() == KernelOperator::Rule::convolution) {
    out.values = toeplitz_apply(convolution_taps(op, n, cr.count - 1), c.values);
  } else {
    out.values = discretize_kernel(op, n, lo, hi).multiply(c.values);
  }
  for (auto& v : out.values) v *= h;
  return out;
}

std::vector<Profile1D> default_probes(double lo, double hi) {
  const double c = 0.5 * (lo + hi);
  return {Profile1D::bspline(2, c - 1.0), Profile1D::bspline(3, c - 1.5), Profile1D::gaussian(0.5, 1.0, c)};
}

ErrorCurve discretization_error_curve(const KernelOperator& op, const std::vector<int>& ns,
                                      const std::vector<Profile1D>& probes, double r, double lo, double hi) {
  require(!probes.empty(), "discretization_error_curve: no probes");
  require(r >= 1.0, "discretization_error_curve: r must lie in [1, inf]");
  const double pad = op.padding();
  std::vector<double> norms;
  for (const auto& f : probes) {
    const double nf = f.lp_norm(r);
    require(nf > 0.0, "discretization_error_curve: probes must be nonzero");
    const auto [a, b] = f.support();
    require(a >= lo + pad && b <= hi - pad, "discretization_error_curve: probe support must keep the kernel padding inside the window");
    norms.push_back(nf);
  }
  std::vector<int> sorted = ns;
  std::sort(sorted.begin(), sorted.end());
  ErrorCurve curve;
  curve.points.resize(sorted.size());
  for (std::size_t k = 0; k < sorted.size(); ++k) {
    const int n = sorted[k];
    double worst = 0.0;
    for (std::size_t i = 0; i < probes.size(); ++i) {
      const DyadicFunction coarse = apply_discretized(op, n, lo, hi, probes[i]);
      const DyadicFunction fine = apply_discretized(op, n + 3, lo, hi, probes[i]);
      worst = std::max(worst, lp_distance(fine, coarse, r) / norms[i]);
    }
    curve.points[k] = {n, worst};
  }
  std::vector<double> xs, ys;
  for (const auto& p : curve.points) {
    if (p.ratio > 0.0) {
      xs.push_back(double(p.n));
      ys.push_back(std::log2(p.ratio));
    }
  }
  if (xs.size() >= 2) {
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      mx += xs[i];
      my += ys[i];
    }
    mx /= double(xs.size());
    my /= double(xs.size());
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      sxx += (xs[i] - mx) * (xs[i] - mx);
      sxy += (xs[i] - mx) * (ys[i] - my);
    }
    curve.slope = sxy / sxx;
  }
  return curve;
}

KernelStabilityReport perturbed_identity_stability(const KernelOperator& op, const std::vector<double>& ps,
                                                   const std::vector<int>& ns, const std::vector<double>& windows,
                                                   const StabilityOptions& opts, const TrendOptions& trend,
                                                   bool with_bias) {
  require(!ps.empty() && !ns.empty() && !windows.empty(), "perturbed_identity_stability: empty ladder");
  KernelStabilityReport report;
  report.check = check_kernel(op);
  require_kernel(op);
  std::vector<double> sp = ps, sw = windows;
  std::vector<int> sn = ns;
  std::sort(sp.begin(), sp.end());
  std::sort(sn.begin(), sn.end());
  std::sort(sw.begin(), sw.end());
  for (double w : sw) require(w > 0.0, "perturbed_identity_stability: window sizes must be positive");

  std::vector<std::optional<double>> bias(sn.size());
  if (with_bias && op.rule() == KernelOperator::Rule::convolution) {
    const double span = std::max(sw.back(), 2.0 * (op.padding() + 4.0));
    const auto curve = discretization_error_curve(op, sn, default_probes(0.0, span), 2.0, 0.0, span);
    for (std::size_t k = 0; k < sn.size(); ++k) bias[k] = curve.points[k].ratio;
  }

  const std::size_t nn = sn.size(), nw = sw.size();
  std::vector<std::optional<LocalizedMatrix>> mats(nn * nw);
  for (std::size_t t = 0; t < mats.size(); ++t) {
    const int n = sn[t / nw];
    mats[t] = discretize_kernel(op, n, 0.0, sw[t % nw]).scaled(std::ldexp(1.0, -n)).plus_identity(1.0);
  }
  const std::size_t per_p = nn * nw;
  report.rungs.resize(sp.size() * per_p);
  for (std::size_t t = 0; t < report.rungs.size(); ++t) {
    const double p = sp[t / per_p];
    const std::size_t ni = (t % per_p) / nw, wi = t % nw;
    KernelRung r;
    r.p = p;
    r.n = sn[ni];
    r.window = sw[wi];
    r.lower = lower_constant(*mats[ni * nw + wi], p, opts);
    r.upper = upper_constant(*mats[ni * nw + wi], p);
    r.bias = bias[ni];
    report.rungs[t] = r;
  }
  for (std::size_t pi = 0; pi < sp.size(); ++pi) {
    for (std::size_t ni = 0; ni < nn; ++ni) {
      std::vector<double> lows;
      for (std::size_t wi = 0; wi < nw; ++wi) lows.push_back(report.rungs[pi * per_p + ni * nw + wi].lower.value);
      report.trends.push_back({{sp[pi], sn[ni]}, classify_ladder(lows, trend)});
    }
  }
  return report;
}

std::vector<KernelTailPoint> kernel_truncation_tail(const KernelOperator& op, int n, std::span<const double> s_values,
                                                    double lo, double hi) {
  const LocalizedMatrix a = discretize_kernel(op, n, lo, hi);
  const auto tails = truncation_tail(a, s_values);
  const Profile1D& h = op.envelope();
  const double peak = h.lp_norm(kInf);
  std::vector<std::pair<long, double>> cell_sups;
  if (peak > 0.0) {
    const auto [e0, e1] = h.support(1e-300);
    for (long j = long(std::floor(e0)); double(j) < e1; ++j) cell_sups.push_back({j, h.sup_abs(double(j), double(j + 1))});
  }
  std::vector<KernelTailPoint> out;
  for (const auto& t : tails) {
    double b = 0.0;
    for (const auto& [j, s] : cell_sups) {
      if (double(std::abs(j)) >= t.s - 3.0) b += s;
    }
    out.push_back({t.s, t.tail, 3.0 * b});
  }
  return out;
}

}  // namespace locop
