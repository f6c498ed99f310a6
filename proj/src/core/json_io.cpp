#include "locop/json_io.hpp"

#include <unistd.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "locop/errors.hpp"
#include "locop/norms.hpp"

namespace locop::io {

namespace {

const json& field(const json& j, const char* key, const char* what) {
  require(j.is_object(), std::string(what) + ": expected a JSON object");
  const auto it = j.find(key);
  require(it != j.end(), std::string(what) + ": missing field '" + key + "'");
  return *it;
}

double number(const json& j, const std::string& what) {
  require(j.is_number(), what + ": expected a number");
  return j.get<double>();
}

long integer(const json& j, const std::string& what) {
  require(j.is_number_integer() || (j.is_number() && std::floor(j.get<double>()) == j.get<double>()),
          what + ": expected an integer");
  return j.is_number_integer() ? j.get<long>() : long(j.get<double>());
}

std::vector<double> numbers(const json& j, const std::string& what) {
  require(j.is_array(), what + ": expected an array");
  std::vector<double> out;
  out.reserve(j.size());
  for (const auto& v : j) out.push_back(number(v, what));
  return out;
}

double number_or(const json& j, const char* key, double fallback, const std::string& what) {
  const auto it = j.find(key);
  return it == j.end() ? fallback : number(*it, what + "." + key);
}

}  // namespace

json to_json(const Box& b) {
  json out = json::array();
  for (const auto& [lo, hi] : b.bounds) out.push_back({lo, hi});
  return out;
}

Box box_from_json(const json& j) {
  require(j.is_array() && !j.empty(), "box: expected a list of [lo, hi] intervals");
  Box b;
  for (const auto& iv : j) {
    require(iv.is_array() && iv.size() == 2, "box: each interval must be [lo, hi]");
    const double lo = number(iv[0], "box"), hi = number(iv[1], "box");
    require(lo <= hi, "box: interval with lo > hi");
    b.bounds.emplace_back(lo, hi);
  }
  return b;
}

json to_json(const IndexSet& s) {
  json pts = json::array();
  for (std::size_t i = 0; i < s.size(); ++i) {
    json p = json::array();
    for (double v : s.point(i)) p.push_back(v);
    pts.push_back(std::move(p));
  }
  return {{"dim", s.dim()}, {"window", to_json(s.window())}, {"points", std::move(pts)}};
}

IndexSet index_set_from_json(const json& j) {
  const long dim = integer(field(j, "dim", "IndexSet"), "IndexSet.dim");
  require(dim > 0, "IndexSet.dim must be positive");
  Box window = box_from_json(field(j, "window", "IndexSet"));
  const json& pts = field(j, "points", "IndexSet");
  require(pts.is_array(), "IndexSet.points: expected an array");
  std::vector<double> coords;
  coords.reserve(pts.size() * std::size_t(dim));
  for (const auto& p : pts) {
    const auto xs = numbers(p, "IndexSet.points");
    require(xs.size() == std::size_t(dim), "IndexSet.points: point dimension does not match dim");
    coords.insert(coords.end(), xs.begin(), xs.end());
  }
  return IndexSet(std::size_t(dim), std::move(window), std::move(coords));
}

json to_json(const LocalizedMatrix& a) {
  json entries = json::array();
  for (const auto& e : a.entries()) entries.push_back({e.row, e.col, e.value});
  return {{"rows", to_json(a.rows())}, {"cols", to_json(a.cols())}, {"entries", std::move(entries)}};
}

LocalizedMatrix matrix_from_json(const json& j) {
  auto rows = std::make_shared<const IndexSet>(index_set_from_json(field(j, "rows", "matrix")));
  auto cols = std::make_shared<const IndexSet>(index_set_from_json(field(j, "cols", "matrix")));
  const json& es = field(j, "entries", "matrix");
  require(es.is_array(), "matrix.entries: expected an array");
  std::vector<Entry> entries;
  entries.reserve(es.size());
  for (const auto& e : es) {
    require(e.is_array() && e.size() == 3, "matrix.entries: each entry must be [i, j, value]");
    const long r = integer(e[0], "matrix.entries"), c = integer(e[1], "matrix.entries");
    require(r >= 0 && c >= 0, "matrix.entries: negative index");
    entries.push_back({std::size_t(r), std::size_t(c), number(e[2], "matrix.entries")});
  }
  // Matching row and column point lists share one set.
  if (*rows == *cols) cols = rows;
  return LocalizedMatrix(std::move(rows), std::move(cols), std::move(entries));
}

json to_json(const Profile1D& p) {
  switch (p.kind()) {
    case Profile1D::Kind::pp:
      return {{"kind", "pp"}, {"breaks", p.breaks()}, {"coeffs", p.coeffs()}};
    case Profile1D::Kind::gaussian:
      return {{"kind", "gaussian"}, {"sigma", p.sigma()}, {"amplitude", p.amplitude()}, {"center", p.center()}};
    case Profile1D::Kind::exponential:
      return {{"kind", "exponential"}, {"rate", p.rate()}, {"amplitude", p.amplitude()}, {"center", p.center()}};
  }
  return {};
}

Profile1D profile_from_json(const json& j) {
  const json& kind = field(j, "kind", "profile");
  require(kind.is_string(), "profile.kind: expected a string");
  const std::string k = kind.get<std::string>();
  if (k == "pp") {
    const auto breaks = numbers(field(j, "breaks", "profile"), "profile.breaks");
    const json& cs = field(j, "coeffs", "profile");
    require(cs.is_array(), "profile.coeffs: expected an array of arrays");
    std::vector<std::vector<double>> coeffs;
    for (const auto& c : cs) coeffs.push_back(numbers(c, "profile.coeffs"));
    return Profile1D::piecewise(breaks, std::move(coeffs));
  }
  if (k == "gaussian") {
    return Profile1D::gaussian(number(field(j, "sigma", "profile"), "profile.sigma"),
                               number_or(j, "amplitude", 1.0, "profile"), number_or(j, "center", 0.0, "profile"));
  }
  if (k == "exponential") {
    return Profile1D::exponential(number(field(j, "rate", "profile"), "profile.rate"),
                                  number_or(j, "amplitude", 1.0, "profile"), number_or(j, "center", 0.0, "profile"));
  }
  if (k == "bspline") {
    const Profile1D b = Profile1D::bspline(int(integer(field(j, "order", "profile"), "profile.order")),
                                           number_or(j, "shift", 0.0, "profile"));
    return b.scaled(number_or(j, "amplitude", 1.0, "profile"));
  }
  if (k == "indicator") {
    return Profile1D::indicator(number(field(j, "a", "profile"), "profile.a"),
                                number(field(j, "b", "profile"), "profile.b"), number_or(j, "value", 1.0, "profile"));
  }
  throw_precondition("profile.kind: unknown kind '" + k + "'");
}

json to_json(const ModulusBound& m) {
  if (m.form == ModulusBound::Form::power) return {{"form", "power"}, {"C", m.c}, {"alpha", m.alpha}};
  json deltas = json::array(), bounds = json::array();
  for (const auto& [d, b] : m.table) {
    deltas.push_back(d);
    bounds.push_back(b);
  }
  return {{"form", "table"}, {"deltas", deltas}, {"bounds", bounds}};
}

json to_json(const GeneratorFamily& f) {
  json profiles = json::array();
  for (const auto& p : f.profiles()) profiles.push_back(to_json(p));
  const char* rule = f.rule() == GeneratorFamily::Rule::shift ? "shift" : "table";
  return {{"index", to_json(f.index())},
          {"rule", {{"kind", rule}, {"profiles", profiles}}},
          {"envelope", to_json(f.envelope())},
          {"modulus", to_json(f.modulus())}};
}

GeneratorFamily family_from_json(const json& j) {
  auto index = std::make_shared<const IndexSet>(index_set_from_json(field(j, "index", "family")));
  const json& rule = field(j, "rule", "family");
  const std::string kind = field(rule, "kind", "family.rule").get<std::string>();
  require(kind == "shift" || kind == "table", "family.rule.kind must be 'shift' or 'table'");
  const json& ps = field(rule, "profiles", "family.rule");
  require(ps.is_array() && !ps.empty(), "family.rule.profiles: expected a nonempty array");
  std::vector<Profile1D> profiles;
  for (const auto& p : ps) profiles.push_back(profile_from_json(p));
  Profile1D envelope = profile_from_json(field(j, "envelope", "family"));
  const json& mj = field(j, "modulus", "family");
  const std::string form = field(mj, "form", "family.modulus").get<std::string>();
  ModulusBound m;
  const auto rule_kind = kind == "shift" ? GeneratorFamily::Rule::shift : GeneratorFamily::Rule::table;
  if (form == "power") {
    m.c = number(field(mj, "C", "family.modulus"), "family.modulus.C");
    m.alpha = number(field(mj, "alpha", "family.modulus"), "family.modulus.alpha");
  } else if (form == "table") {
    m.form = ModulusBound::Form::table;
    const auto d = numbers(field(mj, "deltas", "family.modulus"), "family.modulus.deltas");
    const auto b = numbers(field(mj, "bounds", "family.modulus"), "family.modulus.bounds");
    require(d.size() == b.size(), "family.modulus: deltas and bounds differ in length");
    for (std::size_t i = 0; i < d.size(); ++i) m.table.emplace_back(d[i], b[i]);
  } else if (form == "auto") {
    // calibrate on the family's distinct centred generators
    const GeneratorFamily probe(index, rule_kind, profiles, envelope, ModulusBound{});
    std::vector<Profile1D> centered;
    if (rule_kind == GeneratorFamily::Rule::shift) centered = profiles;
    else
      for (std::size_t i = 0; i < index->size(); ++i) centered.push_back(probe.centered(i));
    m = calibrate_modulus(centered, envelope);
  } else {
    throw_precondition("family.modulus.form must be 'power', 'table' or 'auto'");
  }
  return GeneratorFamily(std::move(index), rule_kind, std::move(profiles), std::move(envelope), std::move(m));
}

json to_json(const KernelOperator& k) {
  json rule;
  switch (k.rule()) {
    case KernelOperator::Rule::convolution:
      rule = {{"kind", "convolution"}, {"g", to_json(k.g())}};
      break;
    case KernelOperator::Rule::separable:
      rule = {{"kind", "separable"}, {"u", to_json(k.u())}, {"v", to_json(k.v())}};
      break;
    case KernelOperator::Rule::table: {
      json values = json::array();
      for (Eigen::Index i = 0; i < k.values().rows(); ++i) {
        json row = json::array();
        for (Eigen::Index c = 0; c < k.values().cols(); ++c) row.push_back(k.values()(i, c));
        values.push_back(std::move(row));
      }
      rule = {{"kind", "table"},
              {"level", k.table_level()},
              {"x_first", k.x_first()},
              {"y_first", k.y_first()},
              {"values", std::move(values)}};
      break;
    }
  }
  return {{"rule", rule}, {"envelope", to_json(k.envelope())}, {"alpha", k.alpha()}, {"D", k.d()}};
}

KernelOperator kernel_from_json(const json& j) {
  const json& rule = field(j, "rule", "kernel");
  const std::string kind = field(rule, "kind", "kernel.rule").get<std::string>();
  Profile1D envelope = profile_from_json(field(j, "envelope", "kernel"));
  const double alpha = number(field(j, "alpha", "kernel"), "kernel.alpha");
  const double d = number(field(j, "D", "kernel"), "kernel.D");
  if (kind == "convolution") {
    return KernelOperator::convolution(profile_from_json(field(rule, "g", "kernel.rule")), std::move(envelope), alpha, d);
  }
  if (kind == "separable") {
    return KernelOperator::separable(profile_from_json(field(rule, "u", "kernel.rule")),
                                     profile_from_json(field(rule, "v", "kernel.rule")), std::move(envelope), alpha, d);
  }
  if (kind == "table") {
    const json& vs = field(rule, "values", "kernel.rule");
    require(vs.is_array() && !vs.empty(), "kernel.rule.values: expected a nonempty array of rows");
    const std::size_t cols = vs[0].size();
    Eigen::MatrixXd m(Eigen::Index(vs.size()), Eigen::Index(cols));
    for (std::size_t i = 0; i < vs.size(); ++i) {
      const auto row = numbers(vs[i], "kernel.rule.values");
      require(row.size() == cols, "kernel.rule.values: ragged rows");
      for (std::size_t c = 0; c < cols; ++c) m(Eigen::Index(i), Eigen::Index(c)) = row[c];
    }
    return KernelOperator::table(int(integer(field(rule, "level", "kernel.rule"), "kernel.rule.level")),
                                 integer(field(rule, "x_first", "kernel.rule"), "kernel.rule.x_first"),
                                 integer(field(rule, "y_first", "kernel.rule"), "kernel.rule.y_first"), std::move(m),
                                 std::move(envelope), alpha, d);
  }
  throw_precondition("kernel.rule.kind must be 'convolution', 'separable' or 'table'");
}

json norm_index_json(double p) {
  if (std::isinf(p)) return "inf";
  return p;
}

double norm_index_from_json(const json& j) {
  if (j.is_string()) return parse_norm_index(j.get<std::string>());
  require(j.is_number(), "norm index: expected a number or \"inf\"");
  const double p = j.get<double>();
  require(p >= 1.0, "norm index must lie in [1, inf]");
  return p;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  (void)ec;
  return std::string(buf, ptr);
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

std::string read_text_file(const std::filesystem::path& path) {
  std::error_code ec;
  require(std::filesystem::is_regular_file(path, ec), "input file not found: " + path.string());
  std::ifstream in(path, std::ios::binary);
  require(bool(in), "cannot open input file: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json read_json_file(const std::filesystem::path& path) {
  const std::string text = read_text_file(path);
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw_precondition("invalid JSON in " + path.string() + ": " + e.what());
  }
}

void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    require(bool(out), "cannot write " + tmp.string());
    out << contents;
    out.flush();
    require(bool(out), "write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

std::string offset_profile_csv(const OffsetProfile& profile, std::size_t dim) {
  std::string out;
  for (std::size_t c = 0; c < dim; ++c) out += "k_" + std::to_string(c + 1) + ",";
  out += "sup_value\n";
  for (const auto& [k, v] : profile) {
    for (long x : k) out += std::to_string(x) + ",";
    out += format_double(v) + "\n";
  }
  return out;
}

FiniteSequence sequence_from_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto start = line.find_first_not_of(" \t");
    if (start == std::string::npos || line[start] == '#') continue;
    std::vector<std::string> fields;
    std::stringstream ls(line);
    std::string f;
    while (std::getline(ls, f, ',')) {
      const auto a = f.find_first_not_of(" \t"), b = f.find_last_not_of(" \t");
      if (a != std::string::npos) fields.push_back(f.substr(a, b - a + 1));
    }
    if (!fields.empty()) rows.push_back(std::move(fields));
  }
  const auto parse = [](const std::string& s) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    require(ec == std::errc() && ptr == s.data() + s.size(), "sequence CSV: invalid number '" + s + "'");
    return v;
  };
  // a non-numeric first row is a header
  if (!rows.empty()) {
    double v = 0.0;
    const auto& s = rows.front().front();
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) rows.erase(rows.begin());
  }
  require(!rows.empty(), "sequence CSV: no values");
  const bool pairs = rows.size() > 1 && std::all_of(rows.begin(), rows.end(), [](const auto& r) { return r.size() == 2; });
  FiniteSequence seq;
  if (pairs) {
    seq.first = long(parse(rows.front()[0]));
    for (std::size_t i = 0; i < rows.size(); ++i) {
      require(long(parse(rows[i][0])) == seq.first + long(i), "sequence CSV: indices must be consecutive");
      seq.values.push_back(parse(rows[i][1]));
    }
    return seq;
  }
  std::vector<double> values;
  for (const auto& r : rows) {
    for (const auto& f : r) values.push_back(parse(f));
  }
  if (values.size() % 2 == 1) return FiniteSequence::centered(std::move(values));
  seq.values = std::move(values);
  return seq;
}

}  // namespace locop::io
