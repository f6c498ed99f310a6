#include "locop/stability.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>

#include "locop/errors.hpp"
#include "locop/lp.hpp"
#include "locop/norms.hpp"
#include "locop/parallel.hpp"
#include "locop/spectral.hpp"

namespace locop {

std::string to_string(Method m) {
  switch (m) {
    case Method::spectral: return "spectral";
    case Method::orthant_lp: return "orthant_lp";
    case Method::inverse_norm: return "inverse_norm";
    case Method::multistart: return "multistart";
    case Method::schur_bound: return "schur_bound";
    case Method::interpolation: return "interpolation";
  }
  return "unknown";
}

std::string to_string(Trend t) {
  switch (t) {
    case Trend::stable: return "stable";
    case Trend::degenerating: return "degenerating";
    case Trend::undetermined: return "undetermined";
  }
  return "unknown";
}

std::string to_string(SymbolVerdict v) {
  switch (v) {
    case SymbolVerdict::stable: return "stable";
    case SymbolVerdict::unstable: return "unstable";
    case SymbolVerdict::undetermined: return "undetermined";
  }
  return "unknown";
}

double induced_norm_1(const Eigen::MatrixXd& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().colwise().sum().maxCoeff();
}

double induced_norm_inf(const Eigen::MatrixXd& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().rowwise().sum().maxCoeff();
}

namespace {

bool is_one(double p) { return p == 1.0; }
bool is_two(double p) { return p == 2.0; }

void check_lower_preconditions(const LocalizedMatrix& a, double p) {
  require(p >= 1.0, "lower_constant: p must lie in [1, ∞]");
  require(a.num_cols() > 0 && a.num_rows() > 0, "lower_constant: dimension 0");
  require(a.num_rows() >= a.num_cols(), "lower_constant: matrix must be square or tall");
  require(a.nnz() > 0, "lower_constant: zero matrix");
}

double orthant_lower_l1(const Eigen::MatrixXd& a) {
  const Eigen::Index n = a.rows(), m = a.cols();
  double best = std::numeric_limits<double>::infinity();
  LinearProgram lp;
  lp.cost = Eigen::VectorXd::Zero(m + 2 * n);
  lp.cost.tail(2 * n).setOnes();
  lp.a_ub.resize(0, m + 2 * n);
  lp.b_ub.resize(0);
  lp.a_eq = Eigen::MatrixXd::Zero(n + 1, m + 2 * n);
  lp.a_eq.block(0, m, n, n) = -Eigen::MatrixXd::Identity(n, n);
  lp.a_eq.block(0, m + n, n, n) = Eigen::MatrixXd::Identity(n, n);
  lp.a_eq.row(n).head(m).setOnes();
  lp.b_eq = Eigen::VectorXd::Zero(n + 1);
  lp.b_eq(n) = 1.0;
  // c and −c share a value, so the first sign is fixed to +.
  const std::uint64_t patterns = std::uint64_t(1) << (m - 1);
  for (std::uint64_t mask = 0; mask < patterns; ++mask) {
    for (Eigen::Index j = 0; j < m; ++j) {
      const double sign = (j > 0 && ((mask >> (j - 1)) & 1U)) ? -1.0 : 1.0;
      lp.a_eq.block(0, j, n, 1) = sign * a.col(j);
    }
    const LpResult r = solve_lp(lp);
    if (r.status != LpStatus::optimal) throw_numerical("orthant LP failed on an ℓ¹ face");
    best = std::min(best, r.objective);
  }
  return std::max(best, 0.0);
}

double orthant_lower_linf(const Eigen::MatrixXd& a) {
  const Eigen::Index n = a.rows(), m = a.cols();
  const Eigen::VectorXd row_sums = a.rowwise().sum();
  double best = std::numeric_limits<double>::infinity();
  // variables: v (c = v − 1, v ∈ [0, 2]) then t
  LinearProgram lp;
  lp.cost = Eigen::VectorXd::Zero(m + 1);
  lp.cost(m) = 1.0;
  lp.a_ub = Eigen::MatrixXd::Zero(2 * n + m, m + 1);
  lp.b_ub = Eigen::VectorXd::Zero(2 * n + m);
  lp.a_ub.block(0, 0, n, m) = a;
  lp.a_ub.block(0, m, n, 1).setConstant(-1.0);
  lp.b_ub.head(n) = row_sums;
  lp.a_ub.block(n, 0, n, m) = -a;
  lp.a_ub.block(n, m, n, 1).setConstant(-1.0);
  lp.b_ub.segment(n, n) = -row_sums;
  lp.a_ub.block(2 * n, 0, m, m) = Eigen::MatrixXd::Identity(m, m);
  lp.b_ub.tail(m).setConstant(2.0);
  lp.a_eq = Eigen::MatrixXd::Zero(1, m + 1);
  lp.b_eq = Eigen::VectorXd::Constant(1, 2.0);
  // facets c_i = 1 (c_i = −1 mirrors them)
  for (Eigen::Index i = 0; i < m; ++i) {
    lp.a_eq.setZero();
    lp.a_eq(0, i) = 1.0;
    const LpResult r = solve_lp(lp);
    if (r.status != LpStatus::optimal) throw_numerical("orthant LP failed on an ℓ∞ facet");
    best = std::min(best, r.objective);
  }
  return std::max(best, 0.0);
}

}  // namespace

ConstantEstimate orthant_lower(const LocalizedMatrix& a, double p) {
  check_lower_preconditions(a, p);
  require(is_one(p) || std::isinf(p), "orthant_lower: p must be 1 or ∞");
  require(a.num_cols() <= 20, "orthant_lower: too many columns for face enumeration");
  const Eigen::MatrixXd m = a.dense();
  const double v = is_one(p) ? orthant_lower_l1(m) : orthant_lower_linf(m);
  return {v, true, Method::orthant_lp};
}

ConstantEstimate inverse_norm_lower(const LocalizedMatrix& a, double p) {
  check_lower_preconditions(a, p);
  require(is_one(p) || std::isinf(p), "inverse_norm_lower: p must be 1 or ∞");
  require(a.num_rows() == a.num_cols(), "inverse_norm_lower: matrix must be square");
  Eigen::MatrixXd inv;
  try {
    inv = dense_inverse(a);
  } catch (const NumericalError&) {
    return {0.0, true, Method::inverse_norm};
  }
  const double norm = is_one(p) ? induced_norm_1(inv) : induced_norm_inf(inv);
  return {1.0 / norm, true, Method::inverse_norm};
}

namespace {

// Gradient of ‖x‖_p (a subgradient for p ∈ {1, ∞}).
std::vector<double> norm_gradient(std::span<const double> x, double p) {
  std::vector<double> g(x.size(), 0.0);
  if (std::isinf(p)) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < x.size(); ++i) {
      if (std::abs(x[i]) > std::abs(x[best])) best = i;
    }
    if (!x.empty()) g[best] = x[best] >= 0.0 ? 1.0 : -1.0;
    return g;
  }
  if (is_one(p)) {
    for (std::size_t i = 0; i < x.size(); ++i) g[i] = x[i] > 0.0 ? 1.0 : (x[i] < 0.0 ? -1.0 : 0.0);
    return g;
  }
  const double norm = lp_norm(x, p);
  if (norm == 0.0) return g;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = std::abs(x[i]) / norm;
    g[i] = (x[i] >= 0.0 ? 1.0 : -1.0) * std::pow(r, p - 1.0);
  }
  return g;
}

double l2(std::span<const double> v) { return lp_norm(v, 2.0); }

}  // namespace

ConstantEstimate multistart_lower(const LocalizedMatrix& a, double p, const StabilityOptions& opts) {
  check_lower_preconditions(a, p);
  require(opts.seed.has_value(), "multistart estimator requires an explicit seed");
  require(opts.starts > 0, "multistart: need at least one start");
  const std::size_t n = a.num_cols();
  std::vector<double> per_start(std::size_t(opts.starts), std::numeric_limits<double>::infinity());
  parallel_for(std::size_t(opts.starts), [&](std::size_t s) {
    std::mt19937_64 rng(*opts.seed * 0x9E3779B97F4A7C15ULL + s);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> c(n);
    for (auto& x : c) x = normal(rng);
    const double c0 = lp_norm(c, p);
    for (auto& x : c) x /= c0;
    auto value = [&](const std::vector<double>& v) { return lp_norm(a.multiply(v), p); };
    double f = value(c);
    double step = 0.5;
    std::vector<double> trial(n);
    for (int it = 0; it < opts.max_iterations && step >= opts.min_step; ++it) {
      const auto y = a.multiply(c);
      const auto gy = norm_gradient(y, p);
      auto g = a.multiply_transpose(gy);
      const auto gc = norm_gradient(c, p);
      for (std::size_t i = 0; i < n; ++i) g[i] -= f * gc[i];
      const double gnorm = l2(g);
      if (gnorm == 0.0) break;
      const double cnorm = l2(c);
      for (std::size_t i = 0; i < n; ++i) trial[i] = c[i] - step * cnorm * g[i] / gnorm;
      const double tnorm = lp_norm(trial, p);
      if (tnorm == 0.0) {
        step *= 0.5;
        continue;
      }
      for (auto& x : trial) x /= tnorm;
      const double ft = value(trial);
      if (ft < f) {
        c.swap(trial);
        f = ft;
        step = std::min(1.0, step * 1.25);
      } else {
        step *= 0.5;
      }
    }
    per_start[s] = f;
  });
  return {*std::min_element(per_start.begin(), per_start.end()), false, Method::multistart};
}

ConstantEstimate lower_constant(const LocalizedMatrix& a, double p, const StabilityOptions& opts) {
  check_lower_preconditions(a, p);
  if (is_two(p)) return {smallest_singular_value(a).value, true, Method::spectral};
  if (is_one(p) || std::isinf(p)) {
    if (a.num_cols() <= opts.orthant_max_cols) return orthant_lower(a, p);
    if (a.num_rows() == a.num_cols() && a.num_cols() <= kDenseLimit) return inverse_norm_lower(a, p);
  }
  return multistart_lower(a, p, opts);
}

ConstantEstimate upper_constant(const LocalizedMatrix& a, double p) {
  require(p >= 1.0, "upper_constant: p must lie in [1, ∞]");
  require(a.num_rows() > 0 && a.num_cols() > 0, "upper_constant: dimension 0");
  require(a.nnz() > 0, "upper_constant: zero matrix");
  std::vector<double> col(a.num_cols(), 0.0), row(a.num_rows(), 0.0);
  for (const auto& e : a.entries()) {
    col[e.col] += std::abs(e.value);
    row[e.row] += std::abs(e.value);
  }
  const double n1 = *std::max_element(col.begin(), col.end());
  const double ninf = *std::max_element(row.begin(), row.end());
  if (is_one(p)) return {n1, true, Method::schur_bound};
  if (std::isinf(p)) return {ninf, true, Method::schur_bound};
  const double n2 = largest_singular_value(a).value;
  if (is_two(p)) return {n2, true, Method::spectral};
  const double inv_p = 1.0 / p;
  double bound = std::pow(n1, inv_p) * std::pow(ninf, 1.0 - inv_p);
  if (p < 2.0) {
    // 1/p = (1 − θ) + θ/2
    const double theta = 2.0 * (1.0 - inv_p);
    bound = std::min(bound, std::pow(n1, 1.0 - theta) * std::pow(n2, theta));
  } else {
    // 1/p = θ/2
    const double theta = 2.0 * inv_p;
    bound = std::min(bound, std::pow(n2, theta) * std::pow(ninf, 1.0 - theta));
  }
  return {bound, true, Method::interpolation};
}

Trend classify_ladder(const std::vector<double>& lower, const TrendOptions& opts) {
  if (lower.size() < 2) return Trend::undetermined;
  const std::size_t doublings = lower.size() - 1;
  const std::size_t check = std::min<std::size_t>(doublings, std::size_t(std::max(1, opts.decay_doublings)));
  bool decaying = true;
  for (std::size_t i = lower.size() - check; i < lower.size(); ++i) {
    const double prev = lower[i - 1], cur = lower[i];
    if (prev <= 0.0) continue;  // already singular
    if (cur > (1.0 - opts.decay_fraction) * prev) decaying = false;
  }
  if (decaying) return Trend::degenerating;
  const double prev = lower[lower.size() - 2], last = lower.back();
  if (prev > 0.0 && std::abs(last - prev) / prev < opts.stable_rel_change && last > opts.stable_threshold) {
    return Trend::stable;
  }
  return Trend::undetermined;
}

namespace {

std::map<std::vector<double>, std::size_t> point_lookup(const IndexSet& s) {
  std::map<std::vector<double>, std::size_t> m;
  for (std::size_t i = 0; i < s.size(); ++i) m.emplace(std::vector<double>(s.point(i).begin(), s.point(i).end()), i);
  return m;
}

std::vector<long> embed(const IndexSet& small, const std::map<std::vector<double>, std::size_t>& big) {
  std::vector<long> pos(small.size(), -1);
  for (std::size_t i = 0; i < small.size(); ++i) {
    const auto it = big.find(std::vector<double>(small.point(i).begin(), small.point(i).end()));
    if (it != big.end()) pos[i] = long(it->second);
  }
  return pos;
}

}  // namespace

void check_nested(const std::vector<LocalizedMatrix>& windows) {
  for (std::size_t w = 0; w + 1 < windows.size(); ++w) {
    const auto& small = windows[w];
    const auto& big = windows[w + 1];
    const auto rpos = embed(small.rows(), point_lookup(big.rows()));
    const auto cpos = embed(small.cols(), point_lookup(big.cols()));
    const std::string where = "windows not nested (window " + std::to_string(w) + " in " + std::to_string(w + 1) + ")";
    for (long r : rpos) require(r >= 0, where + ": row point missing");
    for (long c : cpos) require(c >= 0, where + ": column point missing");
    for (const auto& e : small.entries()) {
      require(big.at(std::size_t(rpos[e.row]), std::size_t(cpos[e.col])) == e.value, where + ": entries differ");
    }
    std::vector<long> rinv(big.num_rows(), -1), cinv(big.num_cols(), -1);
    for (std::size_t i = 0; i < rpos.size(); ++i) rinv[std::size_t(rpos[i])] = long(i);
    for (std::size_t j = 0; j < cpos.size(); ++j) cinv[std::size_t(cpos[j])] = long(j);
    for (const auto& e : big.entries()) {
      if (rinv[e.row] >= 0 && cinv[e.col] >= 0) {
        require(small.at(std::size_t(rinv[e.row]), std::size_t(cinv[e.col])) == e.value, where + ": entries differ");
      }
    }
  }
}

std::vector<std::size_t> interior_columns(const LocalizedMatrix& a, double margin) {
  std::vector<std::size_t> out;
  const auto& win = a.cols().window();
  for (std::size_t j = 0; j < a.num_cols(); ++j) {
    const auto q = a.cols().point(j);
    bool inside = true;
    for (std::size_t c = 0; c < q.size() && inside; ++c) {
      inside = q[c] - win.bounds[c].first >= margin && win.bounds[c].second - q[c] >= margin;
    }
    if (inside) out.push_back(j);
  }
  return out;
}

EquivalenceReport equivalence_report(const std::vector<LocalizedMatrix>& windows,
                                     const std::vector<double>& window_sizes,
                                     const std::vector<double>& ps,
                                     const EquivalenceOptions& opts) {
  require(!windows.empty(), "equivalence_report: no windows");
  require(windows.size() == window_sizes.size(), "equivalence_report: window sizes do not match matrices");
  require(!ps.empty(), "equivalence_report: no norm indices");
  for (std::size_t i = 1; i < window_sizes.size(); ++i) {
    require(window_sizes[i] > window_sizes[i - 1], "equivalence_report: window sizes must ascend");
  }
  check_nested(windows);
  std::vector<double> sorted_ps = ps;
  std::sort(sorted_ps.begin(), sorted_ps.end());
  sorted_ps.erase(std::unique(sorted_ps.begin(), sorted_ps.end()), sorted_ps.end());

  const std::size_t nw = windows.size();
  std::vector<LadderEntry> cells(sorted_ps.size() * nw);
  // Inner estimators run serially here; the (p, window) grid is the unit of
  // parallel work.
  parallel_for(cells.size(), [&](std::size_t idx) {
    const double p = sorted_ps[idx / nw];
    const auto& a = windows[idx % nw];
    LadderEntry e;
    e.window = window_sizes[idx % nw];
    e.lower = lower_constant(a, p, opts.stability);
    e.upper = upper_constant(a, p);
    if (opts.interior) {
      const auto cols = interior_columns(a, std::ceil(a.bandwidth()));
      if (!cols.empty() && cols.size() < a.num_cols()) {
        e.interior_lower = lower_constant(a.select_columns(cols), p, opts.stability);
      } else if (cols.size() == a.num_cols()) {
        e.interior_lower = e.lower;
      }
    }
    cells[idx] = e;
  });

  EquivalenceReport report;
  for (std::size_t pi = 0; pi < sorted_ps.size(); ++pi) {
    StabilityReport r;
    r.p = sorted_ps[pi];
    std::vector<double> lows;
    for (std::size_t w = 0; w < nw; ++w) {
      r.entries.push_back(cells[pi * nw + w]);
      lows.push_back(cells[pi * nw + w].lower.value);
    }
    r.trend = classify_ladder(lows, opts.trend);
    report.per_p.push_back(std::move(r));
  }
  bool any_stable = false, any_degenerate = false;
  for (const auto& r : report.per_p) {
    any_stable |= r.trend == Trend::stable;
    any_degenerate |= r.trend == Trend::degenerating;
    if (r.trend != report.per_p.front().trend) report.consistent = false;
  }
  report.counterexample_candidate = any_stable && any_degenerate;
  if (report.counterexample_candidate) {
    report.notes.push_back("one norm index stabilises while another degenerates: investigate");
  } else if (!report.consistent) {
    report.notes.push_back("verdicts differ across p without a stable/degenerating split; extend the window ladder");
  }
  if (std::any_of(sorted_ps.begin(), sorted_ps.end(), [](double p) { return std::isinf(p); })) {
    report.notes.push_back("p = inf is evaluated with the same estimators as finite p");
  }
  return report;
}

FiniteSequence FiniteSequence::centered(std::vector<double> values) {
  require(values.size() % 2 == 1, "centered sequence needs odd length");
  FiniteSequence s;
  s.first = -static_cast<long>(values.size() / 2);
  s.values = std::move(values);
  return s;
}

SymbolCertificate convolution_stability(const FiniteSequence& a, std::size_t grid_size, double tolerance) {
  require(!a.values.empty(), "convolution_stability: empty sequence");
  const std::size_t width = a.values.size();
  require(grid_size >= 4 * width, "convolution_stability: grid size must be at least 4x the support width");
  SymbolCertificate cert;
  for (std::size_t i = 0; i < width; ++i) {
    cert.lipschitz += std::abs(a.values[i]) * std::abs(double(a.first + long(i)));
  }
  const long g = long(grid_size);
  cert.spacing = 2.0 * M_PI / double(grid_size);
  cert.grid_min = std::numeric_limits<double>::infinity();
  for (long k = 0; k < g; ++k) {
    double re = 0.0, im = 0.0;
    for (std::size_t i = 0; i < width; ++i) {
      const long j = a.first + long(i);
      // e^{−ijξ_k} with the phase reduced mod the grid for exact angles
      long phase = (j * k) % g;
      if (phase < 0) phase += g;
      const double angle = 2.0 * M_PI * double(phase) / double(g);
      re += a.values[i] * std::cos(angle);
      im -= a.values[i] * std::sin(angle);
    }
    const double mag = std::hypot(re, im);
    if (mag < cert.grid_min) {
      cert.grid_min = mag;
      cert.argmin = double(k) * cert.spacing;
    }
  }
  cert.certified_upper = cert.grid_min;
  cert.certified_lower = cert.grid_min - cert.lipschitz * cert.spacing / 2.0;
  if (cert.certified_lower > 0.0) cert.verdict = SymbolVerdict::stable;
  else if (cert.grid_min < tolerance) cert.verdict = SymbolVerdict::unstable;
  else cert.verdict = SymbolVerdict::undetermined;
  return cert;
}

InverseDecay inverse_decay_profile(const LocalizedMatrix& a, double margin) {
  require(a.num_rows() == a.num_cols() && a.num_rows() > 0, "inverse_decay_profile: matrix must be square");
  require(margin >= 0.0, "inverse_decay_profile: margin must be nonnegative");
  InverseDecay out;
  const Eigen::MatrixXd inv = dense_inverse(a, &out.condition);
  if (!(out.condition < 1e12)) throw_numerical("inverse_decay_profile: window is ill-conditioned (cond >= 1e12)");
  // A⁻¹ maps sequences on the rows of A back to its columns.
  const LocalizedMatrix ainv = LocalizedMatrix::from_dense(a.cols_ptr(), a.rows_ptr(), inv);
  std::vector<bool> interior(ainv.num_rows(), false);
  const auto& win = ainv.rows().window();
  for (std::size_t i = 0; i < ainv.num_rows(); ++i) {
    const auto q = ainv.rows().point(i);
    bool inside = true;
    for (std::size_t c = 0; c < q.size() && inside; ++c) {
      inside = q[c] - win.bounds[c].first >= margin && win.bounds[c].second - q[c] >= margin;
    }
    interior[i] = inside;
  }
  std::vector<Entry> kept;
  for (const auto& e : ainv.entries()) {
    if (interior[e.row]) kept.push_back(e);
  }
  out.profile = offset_profile(LocalizedMatrix(ainv.rows_ptr(), ainv.cols_ptr(), std::move(kept)));

  std::vector<double> xs, ys;
  for (const auto& [k, v] : out.profile) {
    if (v > 1e-13) {
      long dist = 0;
      for (long c : k) dist = std::max(dist, std::abs(c));
      xs.push_back(double(dist));
      ys.push_back(std::log(v));
    }
  }
  const bool spread = !xs.empty() && *std::max_element(xs.begin(), xs.end()) > *std::min_element(xs.begin(), xs.end());
  if (xs.size() < 4 || !spread) {
    out.fit_error = "fewer than 4 usable offsets above 1e-13";
    return out;
  }
  const double n = double(xs.size());
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  DecayFit fit;
  const double slope = sxy / sxx;
  fit.log_c = my - slope * mx;
  fit.rate = std::exp(slope);
  double ss = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double r = ys[i] - (fit.log_c + slope * xs[i]);
    ss += r * r;
  }
  fit.residual = std::sqrt(ss / n);
  fit.used_offsets = xs.size();
  out.fit = fit;
  return out;
}

std::vector<DensityVerdict> density_check(const IndexSet& rows, const IndexSet& cols, double r0,
                                          const std::vector<Box>& boxes) {
  require(r0 > 0.0, "density_check: R0 must be positive");
  std::vector<DensityVerdict> out;
  out.reserve(boxes.size());
  for (const auto& k : boxes) {
    DensityVerdict v;
    v.box = k;
    if (!cols.empty()) require(k.dim() == cols.dim(), "density_check: box dimension mismatch");
    if (!rows.empty()) require(k.dim() == rows.dim(), "density_check: box dimension mismatch");
    for (std::size_t j = 0; j < cols.size(); ++j) v.cols_in_box += k.contains(cols.point(j)) ? 1 : 0;
    for (std::size_t i = 0; i < rows.size(); ++i) v.rows_in_neighbourhood += k.distance(rows.point(i)) < r0 ? 1 : 0;
    v.pass = v.rows_in_neighbourhood >= v.cols_in_box;
    out.push_back(std::move(v));
  }
  return out;
}

}  // namespace locop
