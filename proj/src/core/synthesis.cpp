#include "locop/synthesis.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "locop/errors.hpp"
#include "locop/norms.hpp"
#include "locop/parallel.hpp"

namespace locop {

double ModulusBound::operator()(double delta) const {
  if (form == Form::power) return c * std::pow(delta, alpha);
  for (const auto& [d, b] : table) {
    if (d >= delta) return b;
  }
  return std::numeric_limits<double>::infinity();
}

GeneratorFamily::GeneratorFamily(IndexSetPtr index, Rule rule, std::vector<Profile1D> profiles,
                                 Profile1D envelope, ModulusBound modulus)
    : index_(std::move(index)),
      rule_(rule),
      profiles_(std::move(profiles)),
      envelope_(std::move(envelope)),
      modulus_(std::move(modulus)) {
  require(index_ != nullptr, "generator family: missing index set");
  require(index_->dim() == 1, "generator family: only one-dimensional index sets are supported");
  require(!profiles_.empty() || index_->empty(), "generator family: no profiles");
  if (modulus_.form == ModulusBound::Form::power) {
    require(modulus_.c >= 0.0 && std::isfinite(modulus_.c), "modulus bound: C must be finite and nonnegative");
    require(modulus_.alpha >= 0.0 && modulus_.alpha <= 1.0, "modulus bound: alpha must lie in [0, 1]");
  } else {
    require(!modulus_.table.empty(), "modulus bound: empty table");
    for (std::size_t i = 1; i < modulus_.table.size(); ++i) {
      require(modulus_.table[i].first > modulus_.table[i - 1].first, "modulus table: deltas must ascend");
      require(modulus_.table[i].second >= modulus_.table[i - 1].second, "modulus table: bounds must not decrease");
    }
  }
  assignment_.resize(index_->size());
  if (rule_ == Rule::table) {
    require(profiles_.size() == index_->size(), "generator family: table rule needs one profile per index point");
    for (std::size_t i = 0; i < assignment_.size(); ++i) assignment_[i] = i;
  } else {
    for (std::size_t i = 0; i < assignment_.size(); ++i) assignment_[i] = i % profiles_.size();
  }
}

Profile1D GeneratorFamily::generator(std::size_t i) const {
  const Profile1D& p = profiles_[assignment_[i]];
  return rule_ == Rule::shift ? p.translated(index_->point(i)[0]) : p;
}

Profile1D GeneratorFamily::centered(std::size_t i) const {
  const Profile1D& p = profiles_[assignment_[i]];
  return rule_ == Rule::shift ? p : p.translated(-index_->point(i)[0]);
}

GeneratorFamily GeneratorFamily::restricted(const Box& box) const {
  auto [set, positions] = index_->restrict_to(box);
  GeneratorFamily out = *this;
  out.index_ = std::make_shared<const IndexSet>(std::move(set));
  out.assignment_.clear();
  if (rule_ == Rule::table) {
    out.profiles_.clear();
    for (std::size_t pos : positions) out.profiles_.push_back(profiles_[pos]);
    for (std::size_t i = 0; i < positions.size(); ++i) out.assignment_.push_back(i);
  } else {
    for (std::size_t pos : positions) out.assignment_.push_back(assignment_[pos]);
  }
  return out;
}

namespace {

std::vector<double> probe_points(const Profile1D& f, int per_cell) {
  const auto [s0, s1] = f.support();
  const double lo = s0 - 1.0, hi = s1 + 1.0;
  const std::size_t count =
      std::max<std::size_t>(1000, std::size_t(std::ceil((hi - lo) * double(per_cell))) + 1);
  std::vector<double> xs(count);
  for (std::size_t i = 0; i < count; ++i) xs[i] = lo + (hi - lo) * double(i) / double(count - 1);
  return xs;
}

std::vector<double> delta_grid() {
  std::vector<double> d;
  for (int k = 1; k <= 10; ++k) d.push_back(std::ldexp(1.0, -k));
  return d;
}

std::vector<Profile1D> distinct_centered(const GeneratorFamily& fam) {
  std::vector<Profile1D> out;
  if (fam.rule() == GeneratorFamily::Rule::shift) return fam.profiles();
  for (std::size_t i = 0; i < fam.index().size(); ++i) out.push_back(fam.centered(i));
  return out;
}

}  // namespace

HypothesisCheck check_hypotheses(const GeneratorFamily& fam, int per_cell) {
  require(per_cell > 0, "check_hypotheses: need a positive probe density");
  const auto gens = distinct_centered(fam);
  const auto deltas = delta_grid();
  const Profile1D& h = fam.envelope();
  std::vector<HypothesisCheck> parts(gens.size());
  parallel_for(gens.size(), [&](std::size_t g) {
    const auto xs = probe_points(gens[g], per_cell);
    HypothesisCheck c;
    c.probes = xs.size();
    c.envelope_excess = -std::numeric_limits<double>::infinity();
    c.modulus_excess = -std::numeric_limits<double>::infinity();
    for (double x : xs) {
      const double hx = h(x);
      c.envelope_excess = std::max(c.envelope_excess, std::abs(gens[g](x)) - hx);
      for (double d : deltas) {
        c.modulus_excess = std::max(c.modulus_excess, modulus_of_continuity(gens[g], d, x) - fam.modulus()(d) * hx);
      }
    }
    parts[g] = c;
  });
  HypothesisCheck out;
  out.envelope_excess = -std::numeric_limits<double>::infinity();
  out.modulus_excess = -std::numeric_limits<double>::infinity();
  out.probes = parts.empty() ? 0 : parts.front().probes;
  for (const auto& c : parts) {
    out.probes = std::min(out.probes, c.probes);
    out.envelope_excess = std::max(out.envelope_excess, c.envelope_excess);
    out.modulus_excess = std::max(out.modulus_excess, c.modulus_excess);
  }
  if (parts.empty()) out.envelope_excess = out.modulus_excess = 0.0;
  return out;
}

void require_hypotheses(const GeneratorFamily& fam, int per_cell) {
  const auto c = check_hypotheses(fam, per_cell);
  require(c.envelope_excess <= 1e-12,
          "generator family violates its envelope (excess " + std::to_string(c.envelope_excess) + ")");
  require(c.modulus_excess <= 1e-12,
          "generator family violates its modulus bound (excess " + std::to_string(c.modulus_excess) + ")");
}

ModulusBound calibrate_modulus(const std::vector<Profile1D>& centered_profiles, const Profile1D& envelope,
                               int per_cell) {
  const auto deltas = delta_grid();
  std::vector<double> worst(deltas.size(), 0.0);
  for (const auto& f : centered_profiles) {
    for (double x : probe_points(f, per_cell)) {
      const double hx = envelope(x);
      for (std::size_t k = 0; k < deltas.size(); ++k) {
        const double w = modulus_of_continuity(f, deltas[k], x);
        if (hx <= 0.0) {
          require(w <= 1e-15, "modulus calibration: generator oscillates where the envelope vanishes");
          continue;
        }
        worst[k] = std::max(worst[k], w / hx);
      }
    }
  }
  ModulusBound m;
  m.form = ModulusBound::Form::power;
  std::vector<double> lx, ly;
  for (std::size_t k = 0; k < deltas.size(); ++k) {
    if (worst[k] > 0.0) {
      lx.push_back(std::log(deltas[k]));
      ly.push_back(std::log(worst[k]));
    }
  }
  if (lx.empty()) {
    m.c = 0.0;
    return m;
  }
  double alpha = 0.0;
  if (lx.size() >= 2) {
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
      mx += lx[i];
      my += ly[i];
    }
    mx /= double(lx.size());
    my /= double(lx.size());
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
      sxx += (lx[i] - mx) * (lx[i] - mx);
      sxy += (lx[i] - mx) * (ly[i] - my);
    }
    alpha = std::clamp(sxy / sxx, 0.0, 1.0);
  }
  m.alpha = alpha;
  m.c = 0.0;
  for (std::size_t k = 0; k < deltas.size(); ++k) m.c = std::max(m.c, worst[k] / std::pow(deltas[k], alpha));
  m.c *= 1.0 + 1e-9;
  return m;
}

SynthesisSamples synthesize(const GeneratorFamily& fam, std::span<const double> c, const UniformGrid& grid) {
  require(c.size() == fam.index().size(), "synthesize: coefficient length does not match the index set");
  require(grid.step > 0.0, "synthesize: grid step must be positive");
  SynthesisSamples out;
  out.grid = grid;
  out.values.assign(grid.count, 0.0);
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (c[i] == 0.0) continue;
    const Profile1D phi = fam.generator(i);
    for (std::size_t k = 0; k < grid.count; ++k) out.values[k] += c[i] * phi(grid.x0 + double(k) * grid.step);
  }
  return out;
}

double synthesis_bound_ratio(const GeneratorFamily& fam, std::span<const double> c, const UniformGrid& grid,
                             double p) {
  const auto s = synthesize(fam, c, grid);
  double norm = lp_norm(s.values, p);
  if (!std::isinf(p)) norm *= std::pow(grid.step, 1.0 / p);
  const double r = double(separation_constant(fam.index()));
  const double rexp = std::isinf(p) ? 1.0 : 1.0 - 1.0 / p;
  const double base = std::pow(r, rexp) * amalgam_norm(fam.envelope()).value * lp_norm(c, p);
  return base > 0.0 ? norm / base : 0.0;
}

LocalizedMatrix discretize_synthesis(const GeneratorFamily& fam, int n0) {
  require(n0 >= 0 && n0 <= 24, "discretize_synthesis: n0 must lie in [0, 24]");
  const std::size_t m = fam.index().size();
  require(m > 0, "discretize_synthesis: empty index set");
  const double scale = std::ldexp(1.0, n0);
  const double h = 1.0 / scale;
  std::vector<std::pair<long, long>> cell_range(m);
  long kmin = std::numeric_limits<long>::max(), kmax = std::numeric_limits<long>::min();
  std::vector<Profile1D> gens;
  gens.reserve(m);
  for (std::size_t i = 0; i < m; ++i) {
    gens.push_back(fam.generator(i));
    const auto [s0, s1] = gens.back().support();
    const long a = long(std::floor(s0 * scale));
    const long b = std::max(a + 1, long(std::ceil(s1 * scale)));
    cell_range[i] = {a, b};
    kmin = std::min(kmin, a);
    kmax = std::max(kmax, b);
  }
  std::vector<std::vector<Entry>> cols(m);
  parallel_for(m, [&](std::size_t i) {
    for (long k = cell_range[i].first; k < cell_range[i].second; ++k) {
      const double a = double(k) * h;
      const double v = scale * gens[i].integral(a, a + h);
      if (std::abs(v) >= LocalizedMatrix::kDropBelow) cols[i].push_back({std::size_t(k - kmin), i, v});
    }
  });
  std::vector<Entry> entries;
  for (auto& c : cols) entries.insert(entries.end(), c.begin(), c.end());
  auto rows = std::make_shared<const IndexSet>(IndexSet::uniform_range(double(kmin) * h, h, std::size_t(kmax - kmin)));
  return LocalizedMatrix(std::move(rows), fam.index_ptr(), std::move(entries));
}

double refinement_defect(const GeneratorFamily& fam, int n0) {
  const LocalizedMatrix coarse = discretize_synthesis(fam, n0);
  const LocalizedMatrix fine = discretize_synthesis(fam, n0 + 1);
  const double sc = std::ldexp(1.0, n0), sf = std::ldexp(1.0, n0 + 1);
  std::map<std::pair<long, std::size_t>, double> averaged;
  for (const auto& e : fine.entries()) {
    const long k = std::lround(fine.rows().point(e.row)[0] * sf);
    const long parent = long(std::floor(double(k) / 2.0));
    averaged[{parent, e.col}] += 0.5 * e.value;
  }
  double defect = 0.0;
  for (const auto& e : coarse.entries()) {
    const long k = std::lround(coarse.rows().point(e.row)[0] * sc);
    auto it = averaged.find({k, e.col});
    const double v = it == averaged.end() ? 0.0 : it->second;
    defect = std::max(defect, std::abs(v - e.value));
    if (it != averaged.end()) averaged.erase(it);
  }
  for (const auto& [key, v] : averaged) defect = std::max(defect, std::abs(v));
  return defect;
}

SynthesisReport synthesis_stability(const GeneratorFamily& fam, const std::vector<double>& ps,
                                    const std::vector<int>& n0s, const std::vector<double>& windows,
                                    const StabilityOptions& opts) {
  require(!ps.empty() && !n0s.empty() && !windows.empty(), "synthesis_stability: empty ladder");
  SynthesisReport report;
  report.hypotheses = check_hypotheses(fam);
  require_hypotheses(fam);
  report.envelope_amalgam = amalgam_norm(fam.envelope()).value;
  report.separation = separation_constant(fam.index());

  std::vector<double> sorted_ps = ps;
  std::sort(sorted_ps.begin(), sorted_ps.end());
  std::vector<int> sorted_n0 = n0s;
  std::sort(sorted_n0.begin(), sorted_n0.end());
  std::vector<double> sorted_w = windows;
  std::sort(sorted_w.begin(), sorted_w.end());

  const double lo = fam.index().window().bounds[0].first;
  std::vector<GeneratorFamily> subs;
  for (double w : sorted_w) {
    require(w > 0.0, "synthesis_stability: window sizes must be positive");
    subs.push_back(fam.restricted(Box{{{lo, lo + w - 1e-9}}}));
  }
  const std::size_t nw = sorted_w.size(), nn = sorted_n0.size();
  std::vector<std::optional<LocalizedMatrix>> mats(nw * nn);
  parallel_for(mats.size(), [&](std::size_t t) { mats[t] = discretize_synthesis(subs[t / nn], sorted_n0[t % nn]); });

  const std::size_t per_p = nw * nn;
  std::vector<SynthesisRung> rungs(sorted_ps.size() * per_p);
  for (std::size_t t = 0; t < rungs.size(); ++t) {
    const double p = sorted_ps[t / per_p];
    const std::size_t wi = (t % per_p) / nn, ni = t % nn;
    const int n0 = sorted_n0[ni];
    const double factor = std::isinf(p) ? 1.0 : std::pow(2.0, -double(n0) / p);
    const LocalizedMatrix a = mats[wi * nn + ni]->scaled(factor);
    SynthesisRung r;
    r.p = p;
    r.n0 = n0;
    r.window = sorted_w[wi];
    r.lower = lower_constant(a, p, opts);
    r.upper = upper_constant(a, p);
    const double rexp = std::isinf(p) ? 1.0 : 1.0 - 1.0 / p;
    r.bias = fam.modulus()(std::ldexp(1.0, -n0)) * report.envelope_amalgam *
             std::pow(double(std::max<long>(1, report.separation)), rexp);
    if (ni > 0) r.change_from_previous_n0 = std::abs(r.lower.value - rungs[t - 1].lower.value);
    rungs[t] = r;
  }
  report.rungs = std::move(rungs);
  return report;
}

}  // namespace locop
