#include "locop/analysis.hpp"

#include <algorithm>
#include <cmath>

#include "locop/errors.hpp"
#include "locop/norms.hpp"

namespace locop {

namespace {

using io::json;

std::filesystem::path resolve(const std::filesystem::path& base, const json& config, const char* key) {
  const auto it = config.find(key);
  require(it != config.end() && it->is_string(), std::string("config: missing path field '") + key + "'");
  std::filesystem::path p = it->get<std::string>();
  return p.is_absolute() ? p : base / p;
}

std::vector<double> ps_of(const json& config, std::vector<double> fallback) {
  const auto it = config.find("p");
  if (it == config.end()) return fallback;
  std::vector<double> out;
  if (it->is_array()) {
    for (const auto& v : *it) out.push_back(io::norm_index_from_json(v));
  } else {
    out.push_back(io::norm_index_from_json(*it));
  }
  require(!out.empty(), "config: empty norm index list");
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<double> doubles_of(const json& config, const char* key, std::vector<double> fallback) {
  const auto it = config.find(key);
  if (it == config.end()) return fallback;
  std::vector<double> out;
  if (it->is_array()) {
    for (const auto& v : *it) {
      require(v.is_number(), std::string("config: '") + key + "' entries must be numbers");
      out.push_back(v.get<double>());
    }
  } else {
    require(it->is_number(), std::string("config: '") + key + "' must be a number or a list");
    out.push_back(it->get<double>());
  }
  return out;
}

std::vector<int> ints_of(const json& config, const char* key, std::vector<int> fallback) {
  std::vector<int> out;
  for (double v : doubles_of(config, key, {})) {
    require(std::floor(v) == v && v >= 0.0 && v <= 24.0, std::string("config: '") + key + "' entries must be integers in [0, 24]");
    out.push_back(int(v));
  }
  return out.empty() ? fallback : out;
}

double number_of(const json& config, const char* key, std::optional<double> fallback = std::nullopt) {
  const auto it = config.find(key);
  if (it == config.end()) {
    require(fallback.has_value(), std::string("config: missing numeric field '") + key + "'");
    return *fallback;
  }
  require(it->is_number(), std::string("config: '") + key + "' must be a number");
  return it->get<double>();
}

StabilityOptions stability_options(const json& config) {
  StabilityOptions o;
  const auto it = config.find("seed");
  if (it != config.end() && !it->is_null()) {
    require(it->is_number_unsigned() || (it->is_number_integer() && it->get<long long>() >= 0),
            "config: seed must be a nonnegative integer");
    o.seed = it->get<std::uint64_t>();
  }
  if (config.contains("starts")) o.starts = int(number_of(config, "starts"));
  return o;
}

json estimate_json(const ConstantEstimate& e) {
  return {{"value", e.value}, {"certified", e.certified}, {"method", to_string(e.method)}};
}

json profile_json(const OffsetProfile& p) {
  json out = json::array();
  for (const auto& [k, v] : p) out.push_back({{"k", k}, {"sup", v}});
  return out;
}

std::string csv_bool(bool b) { return b ? "true" : "false"; }

// Nested section of a matrix: points within [lo, lo + W) of each index window.
LocalizedMatrix section(const LocalizedMatrix& a, double w) {
  const auto box_for = [w](const IndexSet& s) {
    Box b;
    for (const auto& [lo, hi] : s.window().bounds) b.bounds.emplace_back(lo, lo + w - 1e-9);
    return b;
  };
  return a.restrict_to(box_for(a.rows()), box_for(a.cols()));
}

double extent(const LocalizedMatrix& a) {
  double e = 0.0;
  for (const auto& [lo, hi] : a.rows().window().bounds) e = std::max(e, hi - lo + 1.0);
  for (const auto& [lo, hi] : a.cols().window().bounds) e = std::max(e, hi - lo + 1.0);
  return e;
}

AnalysisOutput run_norms(const json& config, const std::filesystem::path& base) {
  const LocalizedMatrix a = io::matrix_from_json(io::read_json_file(resolve(base, config, "matrix")));
  const OffsetProfile profile = offset_profile(a);
  const double sjo = profile_sum(profile);
  const double schur = schur_norm(a);
  const long rr = separation_constant(a.rows()), rc = separation_constant(a.cols());
  json r = {{"analysis", "norms"},
            {"rows", a.num_rows()},
            {"cols", a.num_cols()},
            {"dim", a.rows().dim()},
            {"nnz", a.nnz()},
            {"separation", {{"rows", rr}, {"cols", rc}}},
            {"schur_norm", schur},
            {"sjostrand_norm", sjo},
            {"bandwidth", a.bandwidth()},
            {"offset_profile", profile_json(profile)}};
  const double base_bound = double(rr) * double(rc) * sjo;
  r["schur_vs_sjostrand"] = {{"bound", base_bound}, {"ok", schur <= base_bound * (1.0 + 1e-12) + 1e-12}};

  std::vector<double> s_values = doubles_of(config, "s_values", {});
  if (s_values.empty()) {
    const long top = long(std::ceil(a.bandwidth())) + 2;
    for (long s = 0; s <= top; ++s) s_values.push_back(double(s));
  }
  json tail = json::array();
  for (const auto& t : truncation_tail(a, s_values)) tail.push_back({{"s", t.s}, {"tail", t.tail}});
  r["truncation_tail"] = tail;

  if (config.contains("alpha")) {
    const double alpha = number_of(config, "alpha");
    const Weight w{number_of(config, "weight_exponent", 0.0)};
    r["slant"] = {{"alpha", alpha}, {"weight_exponent", w.exponent}, {"value", slant_norm(a, alpha, w)}};
  }

  const bool same_set = a.rows_ptr() == a.cols_ptr() || a.rows() == a.cols();
  if (same_set && a.rows().is_integer_lattice() && a.nnz() > 0) {
    const double s = std::floor(a.bandwidth()) + 1.0;
    json comm = json::array();
    for (double n : doubles_of(config, "N", {4, 8, 16, 32})) {
      require(n >= 1.0 && std::floor(n) == n, "config: cutoff scales N must be positive integers");
      const auto& win = a.rows().window();
      std::vector<double> center;
      for (const auto& [lo, hi] : win.bounds) center.push_back(n * std::round(0.5 * (lo + hi) / n));
      const CutoffOperator op(center, n, a.rows_ptr());
      const double norm = sjostrand_norm(commutator_with_cutoff(a, op));
      const double bound = (s / n) * sjo;
      comm.push_back({{"N", n}, {"center", center}, {"band", s}, {"norm", norm}, {"bound", bound},
                      {"ok", norm <= bound + 1e-12}});
    }
    r["commutator"] = comm;
  }
  return {r, io::offset_profile_csv(profile, a.rows().dim())};
}

AnalysisOutput run_stab(const json& config, const std::filesystem::path& base, const std::string& name) {
  const LocalizedMatrix a = io::matrix_from_json(io::read_json_file(resolve(base, config, "matrix")));
  const std::vector<double> ps = ps_of(config, {1.0, 2.0, kInf});
  if (name == "equiv") require(ps.size() >= 2, "equiv: need at least two norm indices");
  std::vector<double> windows = doubles_of(config, "windows", {extent(a)});
  std::sort(windows.begin(), windows.end());
  std::vector<LocalizedMatrix> sections;
  for (double w : windows) {
    require(w > 0.0, "config: windows must be positive");
    sections.push_back(section(a, w));
  }
  EquivalenceOptions opts;
  opts.stability = stability_options(config);
  opts.interior = config.value("interior", false);
  const EquivalenceReport rep = equivalence_report(sections, windows, ps, opts);

  json per_p = json::array();
  std::string csv = "window,p,lower,upper,certified\n";
  for (const auto& s : rep.per_p) {
    json entries = json::array();
    for (const auto& e : s.entries) {
      json ej = {{"window", e.window}, {"lower", estimate_json(e.lower)}, {"upper", estimate_json(e.upper)}};
      if (e.interior_lower) ej["interior_lower"] = estimate_json(*e.interior_lower);
      entries.push_back(std::move(ej));
      csv += io::format_double(e.window) + "," + format_norm_index(s.p) + "," + io::format_double(e.lower.value) + "," +
             io::format_double(e.upper.value) + "," + csv_bool(e.lower.certified && e.upper.certified) + "\n";
    }
    per_p.push_back({{"p", io::norm_index_json(s.p)}, {"trend", to_string(s.trend)}, {"entries", entries}});
  }
  json r = {{"analysis", name},
            {"windows", windows},
            {"per_p", per_p},
            {"consistent", rep.consistent},
            {"counterexample_candidate", rep.counterexample_candidate},
            {"notes", rep.notes}};
  if (opts.stability.seed) r["seed"] = *opts.stability.seed;
  return {r, csv};
}

AnalysisOutput run_conv(const json& config, const std::filesystem::path& base) {
  FiniteSequence seq;
  if (config.contains("values")) {
    const std::vector<double> v = doubles_of(config, "values", {});
    if (config.contains("first")) {
      seq.first = long(number_of(config, "first"));
      seq.values = v;
    } else {
      require(v.size() % 2 == 1, "conv: even-length sequences need an explicit 'first'");
      seq = FiniteSequence::centered(v);
    }
  } else {
    seq = io::sequence_from_csv(io::read_text_file(resolve(base, config, "sequence")));
  }
  const double grid = number_of(config, "grid", 65536.0);
  require(grid >= 1.0 && std::floor(grid) == grid, "conv: grid must be a positive integer");
  const SymbolCertificate c = convolution_stability(seq, std::size_t(grid), number_of(config, "tolerance", 1e-12));
  json r = {{"analysis", "conv"},
            {"first", seq.first},
            {"values", seq.values},
            {"grid", std::size_t(grid)},
            {"grid_min", c.grid_min},
            {"argmin", c.argmin},
            {"lipschitz", c.lipschitz},
            {"spacing", c.spacing},
            {"certified_interval", {c.certified_lower, c.certified_upper}},
            {"verdict", to_string(c.verdict)}};
  return {r, std::nullopt};
}

AnalysisOutput run_invdecay(const json& config, const std::filesystem::path& base) {
  const LocalizedMatrix a = io::matrix_from_json(io::read_json_file(resolve(base, config, "matrix")));
  const double margin = number_of(config, "margin", 0.0);
  const InverseDecay d = inverse_decay_profile(a, margin);
  json r = {{"analysis", "invdecay"},
            {"margin", margin},
            {"condition", d.condition},
            {"profile", profile_json(d.profile)}};
  if (d.fit) {
    r["fit"] = {{"rate", d.fit->rate}, {"log_c", d.fit->log_c}, {"residual", d.fit->residual},
                {"used_offsets", d.fit->used_offsets}};
  } else {
    r["fit"] = nullptr;
    r["fit_error"] = d.fit_error;
  }
  return {r, io::offset_profile_csv(d.profile, a.rows().dim())};
}

AnalysisOutput run_density(const json& config, const std::filesystem::path& base) {
  const IndexSet rows = io::index_set_from_json(io::read_json_file(resolve(base, config, "rows")));
  const IndexSet cols = io::index_set_from_json(io::read_json_file(resolve(base, config, "cols")));
  const double r0 = number_of(config, "r0");
  json boxes_json;
  if (config.contains("boxes") && config["boxes"].is_string()) {
    boxes_json = io::read_json_file(resolve(base, config, "boxes"));
  } else {
    require(config.contains("boxes"), "density: missing 'boxes'");
    boxes_json = config["boxes"];
  }
  require(boxes_json.is_array(), "density: boxes must be a list of boxes");
  std::vector<Box> boxes;
  for (const auto& b : boxes_json) boxes.push_back(io::box_from_json(b));
  const auto verdicts = density_check(rows, cols, r0, boxes);
  json list = json::array();
  bool all = true;
  for (const auto& v : verdicts) {
    all = all && v.pass;
    list.push_back({{"box", io::to_json(v.box)},
                    {"cols_in_box", v.cols_in_box},
                    {"rows_in_neighbourhood", v.rows_in_neighbourhood},
                    {"pass", v.pass}});
  }
  json r = {{"analysis", "density"}, {"r0", r0}, {"boxes", list}, {"all_pass", all}};
  return {r, std::nullopt};
}

AnalysisOutput run_synth(const json& config, const std::filesystem::path& base) {
  const GeneratorFamily fam = io::family_from_json(io::read_json_file(resolve(base, config, "family")));
  const std::vector<double> ps = ps_of(config, {2.0});
  const std::vector<int> n0s = ints_of(config, "n0", {4, 5, 6});
  const auto& win = fam.index().window().bounds[0];
  const std::vector<double> windows = doubles_of(config, "windows", {win.second - win.first + 1.0});
  const SynthesisReport rep = synthesis_stability(fam, ps, n0s, windows, stability_options(config));
  json rungs = json::array();
  std::string csv = "n0,window,p,lower,upper,certified\n";
  for (const auto& g : rep.rungs) {
    json rj = {{"p", io::norm_index_json(g.p)},
               {"n0", g.n0},
               {"window", g.window},
               {"lower", estimate_json(g.lower)},
               {"upper", estimate_json(g.upper)},
               {"bias", g.bias}};
    if (g.change_from_previous_n0) rj["change_from_previous_n0"] = *g.change_from_previous_n0;
    rungs.push_back(std::move(rj));
    csv += std::to_string(g.n0) + "," + io::format_double(g.window) + "," + format_norm_index(g.p) + "," +
           io::format_double(g.lower.value) + "," + io::format_double(g.upper.value) + "," +
           csv_bool(g.lower.certified && g.upper.certified) + "\n";
  }
  double defect = 0.0;
  const int nmax = *std::max_element(n0s.begin(), n0s.end());
  if (fam.index().size() <= 4096 && nmax <= 10) defect = refinement_defect(fam, nmax);
  json r = {{"analysis", "synth"},
            {"hypotheses",
             {{"probes", rep.hypotheses.probes},
              {"envelope_excess", rep.hypotheses.envelope_excess},
              {"modulus_excess", rep.hypotheses.modulus_excess},
              {"ok", rep.hypotheses.ok()}}},
            {"modulus", io::to_json(fam.modulus())},
            {"envelope_amalgam", rep.envelope_amalgam},
            {"separation", rep.separation},
            {"refinement_defect", defect},
            {"rungs", rungs}};
  return {r, csv};
}

AnalysisOutput run_kernel(const json& config, const std::filesystem::path& base) {
  const KernelOperator op = io::kernel_from_json(io::read_json_file(resolve(base, config, "kernel")));
  const std::vector<double> ps = ps_of(config, {2.0});
  std::vector<int> ns = ints_of(config, "n", {3, 4, 5, 6, 7, 8});
  std::sort(ns.begin(), ns.end());
  std::vector<double> windows = doubles_of(config, "windows", {64.0});
  std::sort(windows.begin(), windows.end());
  const double r_index = config.contains("r") ? io::norm_index_from_json(config["r"]) : 2.0;
  const double span = windows.back();

  const KernelCheck check = check_kernel(op);
  require_kernel(op);
  json modulus = json::array();
  for (const auto& [d, w] : check.modulus) modulus.push_back({{"delta", d}, {"norm", w}, {"bound", op.d() * std::pow(d, op.alpha())}});

  const auto probes = default_probes(0.0, span);
  const ErrorCurve curve = discretization_error_curve(op, ns, probes, r_index, 0.0, span);
  json points = json::array();
  std::string csv = "n,ratio\n";
  for (const auto& p : curve.points) {
    points.push_back({{"n", p.n}, {"ratio", p.ratio}});
    csv += std::to_string(p.n) + "," + io::format_double(p.ratio) + "\n";
  }

  // Stability rungs are kept to windows that dense estimators handle.
  const double max_cells = number_of(config, "max_cells", 2048.0);
  const std::vector<double> stab_windows = doubles_of(config, "stab_windows", windows);
  std::vector<int> stab_ns;
  json skipped = json::array();
  for (int n : ints_of(config, "stab_n", ns)) {
    const double cells = *std::max_element(stab_windows.begin(), stab_windows.end()) * std::ldexp(1.0, n);
    if (cells <= max_cells) stab_ns.push_back(n);
    else skipped.push_back({{"n", n}, {"reason", "window exceeds max_cells"}});
  }
  json stability = {{"rungs", json::array()}, {"trends", json::array()}, {"skipped", skipped}};
  if (!stab_ns.empty()) {
    const KernelStabilityReport rep =
        perturbed_identity_stability(op, ps, stab_ns, stab_windows, stability_options(config), {}, true);
    for (const auto& g : rep.rungs) {
      json gj = {{"p", io::norm_index_json(g.p)},
                 {"n", g.n},
                 {"window", g.window},
                 {"lower", estimate_json(g.lower)},
                 {"upper", estimate_json(g.upper)}};
      if (g.bias) gj["bias"] = *g.bias;
      stability["rungs"].push_back(std::move(gj));
    }
    for (const auto& [key, t] : rep.trends) {
      stability["trends"].push_back({{"p", io::norm_index_json(key.first)}, {"n", key.second}, {"trend", to_string(t)}});
    }
  }

  const int tail_n = ns.front();
  std::vector<double> s_values = doubles_of(config, "s_values", {0, 1, 2, 4, 6, 8, 12, 16});
  json tails = json::array();
  for (const auto& t : kernel_truncation_tail(op, tail_n, s_values, 0.0, span)) {
    tails.push_back({{"s", t.s}, {"tail", t.tail}, {"bound", t.bound}, {"ok", t.tail <= t.bound * (1.0 + 1e-12)}});
  }

  json r = {{"analysis", "kernel"},
            {"check",
             {{"envelope_amalgam", check.envelope_amalgam},
              {"envelope_excess", check.envelope_excess},
              {"D", op.d()},
              {"alpha", op.alpha()},
              {"modulus", modulus},
              {"ok", check.ok()}}},
            {"error_curve",
             {{"r", io::norm_index_json(r_index)}, {"window", {0.0, span}}, {"points", points},
              {"slope", curve.slope ? json(*curve.slope) : json(nullptr)}}},
            {"stability", stability},
            {"truncation_tail", {{"n", tail_n}, {"points", tails}}}};
  return {r, csv};
}

}  // namespace

AnalysisOutput run_analysis(const io::json& config, const std::filesystem::path& base_dir) {
  require(config.is_object(), "config must be a JSON object");
  const auto it = config.find("analysis");
  require(it != config.end() && it->is_string(), "config: missing 'analysis'");
  const std::string name = it->get<std::string>();
  try {
    if (name == "norms") return run_norms(config, base_dir);
    if (name == "stab" || name == "equiv") return run_stab(config, base_dir, name);
    if (name == "conv") return run_conv(config, base_dir);
    if (name == "invdecay") return run_invdecay(config, base_dir);
    if (name == "density") return run_density(config, base_dir);
    if (name == "synth") return run_synth(config, base_dir);
    if (name == "kernel") return run_kernel(config, base_dir);
  } catch (const io::json::exception& e) {
    throw_precondition(std::string("config: ") + e.what());
  }
  throw_precondition("unknown analysis '" + name + "'");
}

}  // namespace locop
