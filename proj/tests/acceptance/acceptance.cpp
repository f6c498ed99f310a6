// One line per criterion: PASS/FAIL, id, measured values, wall time.
#include <Eigen/Dense>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "locop/corpus.hpp"
#include "locop/dyadic.hpp"
#include "locop/kernelop.hpp"
#include "locop/matalg.hpp"
#include "locop/norms.hpp"
#include "locop/stability.hpp"
#include "locop/synthesis.hpp"

using namespace locop;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

void expect(Outcome& o, bool cond, const std::string& what) {
  if (!cond) {
    o.pass = false;
    o.detail += " [failed: " + what + "]";
  }
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

LocalizedMatrix toeplitz(std::vector<double> seq, long n) { return corpus::toeplitz(FiniteSequence::centered(std::move(seq)), n); }

LocalizedMatrix section(const LocalizedMatrix& a, double w) {
  const double lo = a.rows().window().bounds[0].first;
  const Box b{{{lo, lo + w - 1e-9}}};
  return a.restrict_to(b, b);
}

Outcome c1() {
  Outcome o;
  const auto a = toeplitz({1, 3, 1}, 200);
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(200, 200);
  for (int i = 0; i < 200; ++i) {
    d(i, i) = 3.0;
    if (i + 1 < 200) d(i, i + 1) = d(i + 1, i) = 1.0;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(d, Eigen::EigenvaluesOnly);
  const double oracle = eig.eigenvalues().cwiseAbs().minCoeff();
  const double closed = 3.0 - 2.0 * std::cos(std::numbers::pi / 201.0);
  const auto l = lower_constant(a, 2.0);
  o.detail = "lower=" + fmt(l.value) + " eigen=" + fmt(oracle) + " closed=" + fmt(closed);
  expect(o, std::abs(l.value - closed) <= 1e-9 * closed, "closed form");
  expect(o, std::abs(l.value - oracle) <= 1e-9 * oracle, "eigensolver");
  expect(o, l.certified, "certified");
  return o;
}

Outcome c2() {
  Outcome o;
  const std::size_t grid = 1 << 16;
  auto oracle_min = [&](const std::vector<double>& a) {
    double m = 1e300;
    for (std::size_t k = 0; k < grid; ++k) {
      const double xi = 2.0 * std::numbers::pi * double(k) / double(grid);
      std::complex<double> s = 0.0;
      for (std::size_t j = 0; j < a.size(); ++j) s += a[j] * std::polar(1.0, -xi * (double(j) - 1.0));
      m = std::min(m, std::abs(s));
    }
    return m;
  };
  const auto bad = convolution_stability(FiniteSequence::centered({1, 2, 1}), grid);
  const auto good = convolution_stability(FiniteSequence::centered({1, 3, 1}), grid);
  o.detail = "(1,2,1) " + to_string(bad.verdict) + " [" + fmt(bad.certified_lower) + "," + fmt(bad.certified_upper) +
             "]; (1,3,1) [" + fmt(good.certified_lower) + "," + fmt(good.certified_upper) + "]";
  expect(o, bad.verdict == SymbolVerdict::unstable, "verdict unstable");
  expect(o, bad.certified_lower <= 0.0 && 0.0 <= bad.certified_upper + 1e-15, "interval contains 0");
  expect(o, oracle_min({1, 2, 1}) <= bad.certified_upper + 1e-14, "oracle below certified upper");
  expect(o, good.certified_lower >= 0.999 && good.certified_upper <= 1.0 + 1e-15, "certified min in [0.999, 1]");
  expect(o, std::abs(oracle_min({1, 3, 1}) - good.grid_min) <= 1e-12, "grid oracle");
  return o;
}

Outcome c3() {
  Outcome o;
  const auto a = toeplitz({1, 3, 1}, 101);
  const auto d = inverse_decay_profile(a, 25.0);
  const double target = (3.0 - std::sqrt(5.0)) / 2.0;
  // Oracle: dense LU inverse, rows 25..75, log-linear fit of the offset sups.
  const Eigen::MatrixXd inv = a.dense().partialPivLu().inverse();
  std::map<long, double> prof;
  for (int i = 25; i <= 75; ++i) {
    for (int j = 0; j < 101; ++j) {
      double& s = prof[long(j - i)];
      s = std::max(s, std::abs(inv(i, j)));
    }
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (const auto& [k, v] : prof) {
    if (v <= 1e-13) continue;
    const double x = std::abs(double(k)), y = std::log(v);
    sx += x, sy += y, sxx += x * x, sxy += x * y;
    ++n;
  }
  const double oracle = std::exp((n * sxy - sx * sy) / (n * sxx - sx * sx));
  o.detail = "rate=" + fmt(d.fit ? d.fit->rate : -1.0) + " oracle=" + fmt(oracle) + " target=" + fmt(target);
  expect(o, d.fit.has_value(), "fit present");
  if (d.fit) expect(o, std::abs(d.fit->rate - target) <= 0.01, "rate within 0.01");
  expect(o, std::abs(oracle - target) <= 0.01, "oracle within 0.01");
  return o;
}

Outcome c4() {
  Outcome o;
  const std::vector<double> windows{64, 128, 256};
  const std::vector<double> ps{1.0, 2.0, kInf};
  const auto t = toeplitz({1, 3, 1}, 256);
  const auto perm = corpus::row_permuted(t, 11);
  const auto br = corpus::banded_random(256, 2, 0.1, 7, 0.5);
  double gap = 1e300;
  const Eigen::MatrixXd bd = br.dense();
  for (int i = 0; i < 256; ++i) {
    const double off_r = bd.row(i).cwiseAbs().sum() - std::abs(bd(i, i));
    const double off_c = bd.col(i).cwiseAbs().sum() - std::abs(bd(i, i));
    gap = std::min(gap, std::abs(bd(i, i)) - std::max(off_r, off_c));
  }
  expect(o, gap >= 0.5 - 1e-12, "banded_random dominance gap");
  std::ostringstream out;
  out << "gap=" << fmt(gap);
  auto run = [&](const char* name, const LocalizedMatrix& m) {
    std::vector<LocalizedMatrix> ws;
    for (double w : windows) ws.push_back(section(m, w));
    return std::make_pair(std::string(name), equivalence_report(ws, windows, ps));
  };
  for (const auto& [name, rep] : {run("toeplitz131", t), run("permuted", perm), run("banded_random", br)}) {
    for (const auto& s : rep.per_p) {
      const double a = s.entries[1].lower.value, b = s.entries[2].lower.value;
      const double change = std::abs(b - a) / a;
      out << " " << name << "@" << format_norm_index(s.p) << "=" << fmt(b) << "(" << fmt(100.0 * change) << "%)";
      expect(o, change < 0.05 && b > 0.1, name + " p=" + format_norm_index(s.p) + " stabilizes");
      for (const auto& e : s.entries) expect(o, e.lower.value > 0.1, name + " exceeds 0.1");
    }
  }
  const auto [n121, dec] = run("toeplitz121", toeplitz({1, 2, 1}, 256));
  for (const auto& s : dec.per_p) {
    out << " toeplitz121@" << format_norm_index(s.p) << "=";
    for (std::size_t i = 0; i < s.entries.size(); ++i) {
      out << (i ? "/" : "") << fmt(s.entries[i].lower.value);
      if (i > 0) expect(o, s.entries[i].lower.value <= 0.7 * s.entries[i - 1].lower.value, "toeplitz121 decays 30%");
    }
    expect(o, s.trend == Trend::degenerating, "toeplitz121 flagged degenerating");
  }
  o.detail = out.str();
  return o;
}

std::vector<std::pair<std::string, LocalizedMatrix>> band_corpus() {
  return {{"toeplitz131", toeplitz({1, 3, 1}, 256)},
          {"toeplitz121", toeplitz({1, 2, 1}, 256)},
          {"permuted", corpus::row_permuted(toeplitz({1, 3, 1}, 256), 11)},
          {"banded_random", corpus::banded_random(256, 2, 0.1, 7, 0.5)},
          {"bspline_gram4", corpus::bspline_gram(4, 128)},
          {"gabor_gram", corpus::gabor_gram(1.0, 1.0, 16, 16)},
          {"slanted", corpus::slanted(64, 2, FiniteSequence{-1, {0.5, 1.0, 0.5}})}};
}

Outcome c5() {
  Outcome o;
  std::ostringstream out;
  std::size_t checks = 0;
  for (const auto& [name, a] : band_corpus()) {
    if (!(a.rows() == a.cols())) continue;
    const double s = std::floor(a.bandwidth()) + 1.0;
    const double norm = sjostrand_norm(a);
    double worst = 0.0;
    for (double n : {4.0, 8.0, 16.0, 32.0}) {
      std::vector<std::vector<double>> centers;
      const auto& win = a.rows().window().bounds;
      for (double f : {0.0, 0.25, 0.5, 1.0}) {
        std::vector<double> c;
        for (const auto& [lo, hi] : win) c.push_back(n * std::round((lo + f * (hi - lo)) / n));
        centers.push_back(c);
      }
      for (const auto& c : centers) {
        const auto comm = commutator_with_cutoff(a, CutoffOperator(c, n, a.rows_ptr()));
        // Oracle: offsets of the commutator entries rebuilt from ψ directly.
        std::map<std::vector<long>, double> prof;
        for (const auto& e : a.entries()) {
          const auto x = a.rows().point(e.row), y = a.cols().point(e.col);
          std::vector<double> u(x.size()), v(x.size());
          std::vector<long> k(x.size());
          double dist = 0.0;
          for (std::size_t i = 0; i < x.size(); ++i) {
            u[i] = (x[i] - c[i]) / n;
            v[i] = (y[i] - c[i]) / n;
            k[i] = std::lround(x[i] - y[i]);
            dist = std::max(dist, std::abs(x[i] - y[i]));
          }
          if (dist >= n) continue;
          double& slot = prof[k];
          slot = std::max(slot, std::abs(e.value * (cutoff_psi(v) - cutoff_psi(u))));
        }
        double oracle = 0.0;
        for (const auto& [k, v] : prof) oracle += v;
        const double got = sjostrand_norm(comm);
        expect(o, std::abs(got - oracle) <= 1e-12 * (1.0 + oracle), name + " commutator matches oracle");
        expect(o, got <= (s / n) * norm + 1e-12, name + " N=" + fmt(n) + " bound");
        worst = std::max(worst, got / ((s / n) * norm));
        ++checks;
      }
    }
    out << name << "(s=" << fmt(s) << ",max ratio=" << fmt(worst) << ") ";
  }
  out << "checks=" << checks;
  o.detail = out.str();
  return o;
}

Outcome c6() {
  Outcome o;
  std::ostringstream out;
  for (const auto& [name, a] : band_corpus()) {
    std::vector<double> ss;
    for (double s = 0.0; s <= std::ceil(a.bandwidth()) + 2.0; s += 0.5) ss.push_back(s);
    const auto tail = truncation_tail(a, ss);
    bool mono = true;
    for (std::size_t i = 1; i < tail.size(); ++i) mono = mono && tail[i].tail <= tail[i - 1].tail;
    expect(o, mono, name + " nonincreasing");
    expect(o, tail.back().tail == 0.0, name + " terminally zero");
    expect(o, tail.front().tail == sjostrand_norm(a), name + " starts at the full norm");
  }
  const double s3[] = {0.0, 1.0, 2.0};
  const auto t = truncation_tail(toeplitz({1, 3, 1}, 256), s3);
  out << "toeplitz131 tail=[" << fmt(t[0].tail) << "," << fmt(t[1].tail) << "," << fmt(t[2].tail) << "]";
  expect(o, t[0].tail == 5.0 && t[1].tail == 2.0 && t[2].tail == 0.0, "exact [5,2,0]");
  o.detail = out.str();
  return o;
}

Outcome c7() {
  Outcome o;
  const auto fam = corpus::bspline_family(2, 256);
  const auto rep = synthesis_stability(fam, {2.0}, {6}, {256.0});
  Eigen::MatrixXd gram(256, 256);
  const auto hat = Profile1D::bspline(2);
  for (int i = 0; i < 256; ++i) {
    for (int j = 0; j < 256; ++j) {
      const double lo = std::max(i, j), hi = std::min(i, j) + 2.0;
      gram(i, j) = hi > lo ? gauss_legendre([&](double x) { return hat(x - i) * hat(x - j); }, lo, hi) : 0.0;
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram, Eigen::EigenvaluesOnly);
  const double olo = std::sqrt(eig.eigenvalues().minCoeff()), ohi = std::sqrt(eig.eigenvalues().maxCoeff());
  const double lower = rep.rungs.at(0).lower.value, upper = rep.rungs.at(0).upper.value;
  o.detail = "lower=" + fmt(lower) + " upper=" + fmt(upper) + " gram=[" + fmt(olo) + "," + fmt(ohi) + "]";
  expect(o, std::abs(lower - std::sqrt(1.0 / 3.0)) <= 0.01 * std::sqrt(1.0 / 3.0), "lower within 1%");
  expect(o, std::abs(upper - 1.0) <= 0.01, "upper within 1%");
  expect(o, std::abs(lower - olo) <= 0.01 * olo && std::abs(upper - ohi) <= 0.01 * ohi, "Gram oracle within 1%");
  return o;
}

Outcome c8() {
  Outcome o;
  std::mt19937_64 rng(20240601);
  std::uniform_int_distribution<int> len(1, 60);
  std::normal_distribution<double> g;
  double worst = 0.0;
  int cases = 0;
  for (int t = 0; t < 100; ++t) {
    std::vector<double> a(std::size_t(len(rng)));
    for (double& x : a) x = g(rng);
    const long first = long(len(rng)) - 30;
    for (int n = 0; n <= 6; ++n) {
      const double h = std::ldexp(1.0, -n);
      std::vector<double> breaks;
      std::vector<std::vector<double>> coeffs;
      for (std::size_t k = 0; k <= a.size(); ++k) breaks.push_back(double(first + long(k)) * h);
      for (double x : a) coeffs.push_back({x});
      const auto f = Profile1D::piecewise(breaks, coeffs);
      const auto d = dyadic_expansion(n, first, a);
      for (double p : {1.0, 2.0, kInf}) {
        const double expect_v = (std::isinf(p) ? 1.0 : std::pow(2.0, -double(n) / p)) * lp_norm(a, p);
        const double oracle = std::isinf(p) ? f.sup_abs(breaks.front(), breaks.back()) : f.lp_norm(p);
        worst = std::max({worst, std::abs(d.lp_norm(p) - expect_v) / expect_v, std::abs(oracle - expect_v) / expect_v});
        ++cases;
      }
    }
  }
  o.detail = "cases=" + std::to_string(cases) + " max rel err=" + fmt(worst);
  expect(o, worst <= 1e-12, "identity to 1e-12");
  return o;
}

Outcome c9() {
  Outcome o;
  const auto op = corpus::gaussian_kernel(0.1, 1.0);
  const auto probes = default_probes(0.0, 64.0);
  const auto curve = discretization_error_curve(op, {3, 4, 5, 6, 7, 8}, probes, 2.0, 0.0, 64.0);
  // Oracle: least-squares slope of log2 ratio on n.
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& p : curve.points) {
    const double y = std::log2(p.ratio);
    sx += p.n, sy += y, sxx += double(p.n) * p.n, sxy += p.n * y;
  }
  const double m = double(curve.points.size());
  const double oracle = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  std::ostringstream out;
  out << "slope=" << fmt(curve.slope.value_or(0.0)) << " oracle=" << fmt(oracle) << " ratios=";
  for (const auto& p : curve.points) out << fmt(p.ratio) << " ";
  o.detail = out.str();
  expect(o, curve.slope.has_value(), "slope present");
  const double s = curve.slope.value_or(0.0);
  expect(o, s >= -1.2 && s <= -0.8, "slope in [-1.2, -0.8]");
  expect(o, std::abs(s - oracle) <= 1e-9, "slope oracle");
  return o;
}

Outcome c10() {
  Outcome o;
  const auto op = corpus::gaussian_kernel(0.1, 1.0);
  const std::vector<double> windows{16, 32, 64};
  const auto rep = perturbed_identity_stability(op, {2.0}, {3, 4}, windows, {}, {}, false);
  std::ostringstream out;
  for (const auto& r : rep.rungs) {
    out << "n" << r.n << "w" << fmt(r.window) << "=" << fmt(r.lower.value) << " ";
    expect(o, r.lower.value >= 0.82 && r.lower.value <= 1.18, "lower in [0.82, 1.18]");
    if (r.n == 3 && r.window == 32.0) {
      // Oracle: symmetric eigensolve of I + 2^{-n} A_n.
      const auto a = discretize_kernel(op, 3, 0.0, 32.0);
      const Eigen::MatrixXd m = Eigen::MatrixXd::Identity(long(a.num_rows()), long(a.num_cols())) + a.dense() / 8.0;
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m, Eigen::EigenvaluesOnly);
      const double oracle = eig.eigenvalues().cwiseAbs().minCoeff();
      expect(o, std::abs(oracle - r.lower.value) <= 1e-9, "eigensolve oracle");
    }
  }
  for (const auto& [key, t] : rep.trends) expect(o, t == Trend::stable, "stabilizing at n=" + std::to_string(key.second));
  double idem = 0.0, contraction = 0.0;
  for (const auto& f : default_probes(0.0, 64.0)) {
    for (int n : {0, 3, 5, 8}) {
      const auto p = project_Pn(f, n, 0.0, 64.0);
      idem = std::max(idem, lp_distance(p, project_Pn(p, n), kInf));
      for (double q : {1.0, 1.5, 2.0, 4.0, kInf}) contraction = std::max(contraction, p.lp_norm(q) - f.lp_norm(q));
    }
  }
  out << "idempotence=" << fmt(idem) << " max(|Pf|-|f|)=" << fmt(contraction);
  expect(o, idem <= 1e-12, "Pn idempotent");
  expect(o, contraction <= 1e-12, "Pn contractive");
  o.detail = out.str();
  return o;
}

Outcome c11() {
  Outcome o;
  std::vector<double> zc, ec;
  for (int k = 0; k <= 100; ++k) zc.push_back(k);
  for (int k = 0; k <= 100; k += 2) ec.push_back(k);
  const IndexSet z(1, Box{{{0.0, 100.0}}}, zc), twoz(1, Box{{{0.0, 100.0}}}, ec);
  const Box k{{{10.0, 90.0}}};
  auto brute = [&](const IndexSet& rows, const IndexSet& cols, const Box& box) {
    std::size_t nc = 0, nr = 0;
    for (double x : cols.coords()) nc += (x >= box.bounds[0].first && x <= box.bounds[0].second);
    for (double x : rows.coords()) {
      const double d = std::max({0.0, box.bounds[0].first - x, x - box.bounds[0].second});
      nr += d < 3.0;
    }
    return std::make_pair(nr, nc);
  };
  const auto fail = density_check(twoz, z, 3.0, {k});
  const auto [fr, fc] = brute(twoz, z, k);
  expect(o, !fail[0].pass, "2Z vs Z fails");
  expect(o, fail[0].rows_in_neighbourhood == fr && fail[0].cols_in_box == fc, "counts match brute force");
  std::vector<Box> boxes;
  for (int lo = 0; lo <= 95; lo += 5) {
    for (int w : {1, 5, 20}) boxes.push_back(Box{{{double(lo), double(std::min(100, lo + w))}}});
  }
  boxes.push_back(k);
  bool all = true;
  for (const auto& v : density_check(z, z, 3.0, boxes)) {
    const auto [r, c] = brute(z, z, v.box);
    all = all && v.pass;
    expect(o, v.rows_in_neighbourhood == r && v.cols_in_box == c, "equal-set counts");
  }
  expect(o, all, "equal sets pass on all boxes");
  o.detail = "2Z vs Z on [10,90]: " + std::to_string(fail[0].rows_in_neighbourhood) + " vs " +
             std::to_string(fail[0].cols_in_box) + "; equal sets pass on " + std::to_string(boxes.size()) + " boxes";
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double budget;  // seconds, 0 = none
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> all{
      {1, "Toeplitz(1,3,1) l2 lower constant", 1.0, c1},
      {2, "convolution symbol criterion", 1.0, c2},
      {3, "inverse off-diagonal decay rate", 1.0, c3},
      {4, "stability equivalence ladders", 30.0, c4},
      {5, "cutoff commutator bound", 5.0, c5},
      {6, "truncation tails", 0.0, c6},
      {7, "hat-function synthesis stability", 5.0, c7},
      {8, "dyadic norm identity", 0.0, c8},
      {9, "kernel discretization rate", 20.0, c9},
      {10, "perturbed identity stability", 0.0, c10},
      {11, "density necessary condition", 0.0, c11},
  };
  int failures = 0;
  for (const auto& c : all) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (c.budget > 0.0 && secs >= c.budget) {
      o.pass = false;
      o.detail += " [failed: runtime budget " + fmt(c.budget) + " s]";
    }
    failures += !o.pass;
    std::printf("%s %2d %s | %s | %.3f s\n", o.pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", int(all.size()) - failures, all.size());
  return failures == 0 ? 0 : 1;
}
