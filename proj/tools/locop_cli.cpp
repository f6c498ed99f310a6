#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "locop/locop.h"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Failure {
  int code;
  std::string message;
};

const char* kind_of(int code) {
  switch (code) {
    case LOCOP_ERR_PRECONDITION: return "precondition";
    case LOCOP_ERR_NUMERICAL: return "numerical";
    default: return "internal";
  }
}

int report_failure(const Failure& f) {
  json e = {{"error", {{"code", f.code}, {"kind", kind_of(f.code)}, {"message", f.message}}}};
  std::cerr << e.dump() << "\n";
  return f.code == LOCOP_ERR_INTERNAL ? 3 : f.code;
}

void check(locop_status s) {
  if (s != LOCOP_OK) throw Failure{int(s), locop_last_error()};
}

[[noreturn]] void usage_error(const std::string& msg) { throw Failure{LOCOP_ERR_PRECONDITION, msg}; }

std::vector<std::string> split(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double to_number(const std::string& s) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) usage_error("not a number: '" + s + "'");
  return v;
}

// "1,2,inf"
json norm_list(const std::string& s) {
  json out = json::array();
  for (const auto& item : split(s)) {
    std::string lower;
    for (char c : item) lower += char(std::tolower(static_cast<unsigned char>(c)));
    if (lower == "inf" || lower == "infinity" || item == "∞") out.push_back("inf");
    else out.push_back(to_number(item));
  }
  if (out.empty()) usage_error("empty norm index list");
  return out;
}

// "32,64,128" or "3..8"
json number_list(const std::string& s) {
  json out = json::array();
  for (const auto& item : split(s)) {
    const auto dots = item.find("..");
    if (dots == std::string::npos) {
      out.push_back(to_number(item));
      continue;
    }
    const double lo = to_number(item.substr(0, dots));
    const double hi = to_number(item.substr(dots + 2));
    if (lo != std::floor(lo) || hi != std::floor(hi) || hi < lo || hi - lo > 64) usage_error("bad range '" + item + "'");
    for (double v = lo; v <= hi; v += 1.0) out.push_back(v);
  }
  if (out.empty()) usage_error("empty list");
  return out;
}

std::string absolute(const std::string& p) { return fs::absolute(p).string(); }

void write(const fs::path& path, const std::string& data) { check(locop_write_file(path.c_str(), data.data(), data.size())); }

// JSON goes to --out (or stdout); the CSV curve goes beside it. An --out ending
// in .csv swaps the roles.
void emit(const std::string& out, const std::string& json_text, const char* csv) {
  if (out.empty()) {
    std::cout << json_text;
    return;
  }
  fs::path target(out);
  if (target.extension() == ".csv") {
    if (!csv) usage_error("this analysis has no CSV output");
    write(target, csv);
    write(fs::path(target).replace_extension(".json"), json_text);
    return;
  }
  write(target, json_text);
  if (csv) write(fs::path(target).replace_extension(".csv"), csv);
}

void run_config(const json& config, const fs::path& base, const std::string& out) {
  locop_report* r = nullptr;
  check(locop_run(config.dump().c_str(), base.c_str(), &r));
  try {
    emit(out, locop_report_json(r), locop_report_csv(r));
  } catch (...) {
    locop_report_free(r);
    throw;
  }
  locop_report_free(r);
}

struct Options {
  std::string out, matrix, p, windows, seed, seq, values, grid, margin, rows, cols, r0, boxes;
  std::string family, n0, kernel, n, r, request, config, alpha, weight_exponent, cutoffs, starts;
  bool interior = false;
};

void put_seed(json& c, const Options& o) {
  if (o.seed.empty()) return;
  std::uint64_t s = 0;
  const auto [ptr, ec] = std::from_chars(o.seed.data(), o.seed.data() + o.seed.size(), s);
  if (ec != std::errc() || ptr != o.seed.data() + o.seed.size()) usage_error("seed must be a nonnegative integer");
  c["seed"] = s;
}

json build_config(const std::string& name, const Options& o) {
  json c = {{"analysis", name}};
  if (!o.matrix.empty()) c["matrix"] = absolute(o.matrix);
  if (!o.p.empty()) c["p"] = norm_list(o.p);
  if (!o.windows.empty()) c["windows"] = number_list(o.windows);
  put_seed(c, o);
  if (!o.starts.empty()) c["starts"] = to_number(o.starts);
  if (o.interior) c["interior"] = true;
  if (!o.seq.empty()) c["sequence"] = absolute(o.seq);
  if (!o.values.empty()) c["values"] = number_list(o.values);
  if (!o.grid.empty()) c["grid"] = to_number(o.grid);
  if (!o.margin.empty()) c["margin"] = to_number(o.margin);
  if (!o.rows.empty()) c["rows"] = absolute(o.rows);
  if (!o.cols.empty()) c["cols"] = absolute(o.cols);
  if (!o.r0.empty()) c["r0"] = to_number(o.r0);
  if (!o.boxes.empty()) c["boxes"] = absolute(o.boxes);
  if (!o.family.empty()) c["family"] = absolute(o.family);
  if (!o.n0.empty()) c["n0"] = number_list(o.n0);
  if (!o.kernel.empty()) c["kernel"] = absolute(o.kernel);
  if (!o.n.empty()) c["n"] = number_list(o.n);
  if (!o.r.empty()) c["r"] = norm_list(o.r).at(0);
  if (!o.alpha.empty()) c["alpha"] = to_number(o.alpha);
  if (!o.weight_exponent.empty()) c["weight_exponent"] = to_number(o.weight_exponent);
  if (!o.cutoffs.empty()) c["N"] = number_list(o.cutoffs);
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Finite-window analysis of localized operators"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(locop_version()));
  Options o;

  auto out_opt = [&](CLI::App* s) { s->add_option("--out", o.out, "Report path (.json or .csv)"); };
  auto stab_opts = [&](CLI::App* s) {
    s->add_option("--matrix", o.matrix, "Matrix JSON")->required();
    s->add_option("--p", o.p, "Norm indices, e.g. 1,2,inf");
    s->add_option("--windows,--window", o.windows, "Window sizes, e.g. 32,64,128");
    s->add_option("--seed", o.seed, "Seed for multistart estimates");
    s->add_option("--starts", o.starts, "Multistart count");
    s->add_flag("--interior", o.interior, "Also report interior-row constants");
    out_opt(s);
  };

  auto* stab = app.add_subcommand("stab", "Lower/upper stability constants over a window ladder");
  stab_opts(stab);
  auto* equiv = app.add_subcommand("equiv", "Stability equivalence report across norm indices");
  stab_opts(equiv);

  auto* norms = app.add_subcommand("norms", "Schur, Sjostrand and slant norms, offset profile, tails");
  norms->add_option("--matrix", o.matrix, "Matrix JSON")->required();
  norms->add_option("--alpha", o.alpha, "Slant parameter");
  norms->add_option("--weight-exponent", o.weight_exponent, "Polynomial weight exponent");
  norms->add_option("--N", o.cutoffs, "Cutoff scales for the commutator check");
  out_opt(norms);

  auto* conv = app.add_subcommand("conv", "Symbol test for convolution stability");
  conv->add_option("--seq", o.seq, "Sequence CSV");
  conv->add_option("--values", o.values, "Centred sequence, e.g. 1,3,1");
  conv->add_option("--grid", o.grid, "Symbol grid size");
  out_opt(conv);

  auto* invdecay = app.add_subcommand("invdecay", "Off-diagonal decay of the inverse");
  invdecay->add_option("--matrix", o.matrix, "Matrix JSON")->required();
  invdecay->add_option("--margin", o.margin, "Boundary margin");
  out_opt(invdecay);

  auto* density = app.add_subcommand("density", "Necessary density condition on boxes");
  density->add_option("--rows", o.rows, "Row index set JSON")->required();
  density->add_option("--cols", o.cols, "Column index set JSON")->required();
  density->add_option("--r0", o.r0, "Neighbourhood radius")->required();
  density->add_option("--boxes", o.boxes, "Boxes JSON")->required();
  out_opt(density);

  auto* synth = app.add_subcommand("synth", "Stability of a synthesis operator via dyadic discretization");
  synth->add_option("--family", o.family, "Generator family JSON")->required();
  synth->add_option("--p", o.p, "Norm indices");
  synth->add_option("--n0", o.n0, "Dyadic levels, e.g. 4,5,6");
  synth->add_option("--windows,--window", o.windows, "Window sizes");
  synth->add_option("--seed", o.seed, "Seed for multistart estimates");
  out_opt(synth);

  auto* kernel = app.add_subcommand("kernel", "Discretization rate and stability of I + T");
  kernel->add_option("--kernel", o.kernel, "Kernel JSON")->required();
  kernel->add_option("--p", o.p, "Norm indices");
  kernel->add_option("--n", o.n, "Dyadic levels, e.g. 3..8");
  kernel->add_option("--windows,--window", o.windows, "Window lengths");
  kernel->add_option("--r", o.r, "Probe norm index");
  kernel->add_option("--seed", o.seed, "Seed for multistart estimates");
  out_opt(kernel);

  auto* gen = app.add_subcommand("gen", "Generate a test corpus");
  gen->add_option("--spec", o.request, "Corpus request JSON")->required();
  gen->add_option("--out", o.out, "Output directory")->required();

  auto* run = app.add_subcommand("run", "Run an analysis described by a config file");
  run->add_option("--config", o.config, "Config JSON")->required();
  out_opt(run);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return report_failure({LOCOP_ERR_PRECONDITION, e.what()});
  }

  try {
    CLI::App* sub = app.get_subcommands().front();
    const std::string name = sub->get_name();
    if (name == "gen") {
      std::ifstream in(o.request, std::ios::binary);
      if (!in) usage_error("input file not found: " + o.request);
      std::stringstream text;
      text << in.rdbuf();
      char* manifest = nullptr;
      check(locop_generate(text.str().c_str(), o.out.c_str(), &manifest));
      std::cout << manifest;
      locop_string_free(manifest);
      return 0;
    }
    if (name == "run") {
      std::ifstream in(o.config, std::ios::binary);
      if (!in) usage_error("input file not found: " + o.config);
      json config;
      try {
        config = json::parse(in);
      } catch (const json::exception& e) {
        usage_error(std::string("malformed config: ") + e.what());
      }
      const fs::path base = fs::absolute(o.config).parent_path();
      std::string out = o.out;
      if (out.empty() && config.is_object() && config.contains("out") && config["out"].is_string()) {
        fs::path p = config["out"].get<std::string>();
        out = (p.is_absolute() ? p : base / p).string();
      }
      run_config(config, base, out);
      return 0;
    }
    if (name == "conv" && o.seq.empty() && o.values.empty()) usage_error("conv: need --seq or --values");
    run_config(build_config(name, o), fs::current_path(), o.out);
    return 0;
  } catch (const Failure& f) {
    return report_failure(f);
  } catch (const std::exception& e) {
    return report_failure({LOCOP_ERR_INTERNAL, e.what()});
  }
}
