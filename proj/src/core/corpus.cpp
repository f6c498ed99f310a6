#include "locop/corpus.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "locop/errors.hpp"

namespace locop::corpus {

namespace {

IndexSetPtr range_set(long size) {
  require(size > 0, "corpus: window size must be positive");
  return std::make_shared<const IndexSet>(IndexSet::integer_range(0, size - 1));
}

}  // namespace

LocalizedMatrix toeplitz(const FiniteSequence& a, long size) {
  require(!a.values.empty(), "toeplitz: empty sequence");
  auto set = range_set(size);
  std::vector<Entry> entries;
  for (long i = 0; i < size; ++i) {
    for (std::size_t q = 0; q < a.values.size(); ++q) {
      const long j = i - (a.first + long(q));
      if (j >= 0 && j < size && a.values[q] != 0.0) entries.push_back({std::size_t(i), std::size_t(j), a.values[q]});
    }
  }
  return LocalizedMatrix(set, set, std::move(entries));
}

LocalizedMatrix banded_random(long size, int band, double scale, std::uint64_t seed, double gap) {
  require(band >= 0, "banded_random: band must be nonnegative");
  require(scale >= 0.0 && gap > 0.0, "banded_random: need scale >= 0 and gap > 0");
  auto set = range_set(size);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-scale, scale);
  const double diag = gap + 2.0 * double(band) * scale;
  std::vector<Entry> entries;
  for (long i = 0; i < size; ++i) {
    for (long k = -band; k <= band; ++k) {
      if (k == 0) {
        entries.push_back({std::size_t(i), std::size_t(i), diag});
        continue;
      }
      const double v = unif(rng);
      const long j = i + k;
      if (j >= 0 && j < size) entries.push_back({std::size_t(i), std::size_t(j), v});
    }
  }
  return LocalizedMatrix(set, set, std::move(entries));
}

LocalizedMatrix slanted(long rows, long alpha, const FiniteSequence& b) {
  require(alpha >= 1, "slanted: alpha must be a positive integer");
  require(!b.values.empty(), "slanted: empty sequence");
  const long last = b.first + long(b.values.size()) - 1;
  const long ncols = alpha * (rows - 1) + std::max(0L, last) + 1;
  auto r = range_set(rows);
  auto c = range_set(ncols);
  std::vector<Entry> entries;
  for (long j = 0; j < rows; ++j) {
    for (std::size_t q = 0; q < b.values.size(); ++q) {
      const long col = alpha * j + b.first + long(q);
      if (col >= 0 && col < ncols && b.values[q] != 0.0) entries.push_back({std::size_t(j), std::size_t(col), b.values[q]});
    }
  }
  return LocalizedMatrix(r, c, std::move(entries));
}

LocalizedMatrix gabor_gram(double a, double b, long k_count, long m_count, double radius) {
  require(a > 0.0 && b > 0.0, "gabor_gram: lattice constants must be positive");
  require(k_count > 0 && m_count > 0, "gabor_gram: counts must be positive");
  std::vector<double> coords;
  for (long k = 0; k < k_count; ++k) {
    for (long m = 0; m < m_count; ++m) {
      coords.push_back(a * double(k));
      coords.push_back(b * double(m));
    }
  }
  Box window{{{0.0, a * double(k_count - 1)}, {0.0, b * double(m_count - 1)}}};
  auto set = std::make_shared<const IndexSet>(2, std::move(window), std::move(coords));
  std::vector<Entry> entries;
  const std::size_t n = set->size();
  for (std::size_t i = 0; i < n; ++i) {
    const auto z = set->point(i);
    for (std::size_t j = 0; j < n; ++j) {
      const auto w = set->point(j);
      const double dx = z[0] - w[0], dxi = z[1] - w[1];
      const double dist2 = dx * dx + dxi * dxi;
      if (dist2 > radius * radius) continue;
      const double v = std::exp(-M_PI * dist2 / 2.0) * std::cos(M_PI * dxi * (z[0] + w[0]));
      entries.push_back({i, j, v});
    }
  }
  return LocalizedMatrix(set, set, std::move(entries));
}

LocalizedMatrix bspline_gram(int order, long size) {
  require(order >= 1 && order <= 6, "bspline_gram: order must lie in [1, 6]");
  const Profile1D n2m = Profile1D::bspline(2 * order);
  std::vector<double> values;
  for (long k = -(order - 1); k <= order - 1; ++k) values.push_back(n2m(double(order + k)));
  return toeplitz(FiniteSequence::centered(std::move(values)), size);
}

LocalizedMatrix row_permuted(const LocalizedMatrix& a, std::uint64_t seed) {
  std::vector<std::size_t> rows(a.num_rows()), cols(a.num_cols());
  std::iota(rows.begin(), rows.end(), 0);
  std::iota(cols.begin(), cols.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(rows.begin(), rows.end(), rng);
  return a.permuted(rows, cols);
}

KernelOperator gaussian_kernel(double theta, double sigma) {
  require(sigma > 0.0, "gaussian_kernel: sigma must be positive");
  require(theta != 0.0, "gaussian_kernel: theta must be nonzero");
  const Profile1D g = Profile1D::gaussian(sigma, theta);
  const Profile1D h = Profile1D::gaussian(sigma, std::abs(theta));
  const KernelOperator probe = KernelOperator::convolution(g, h, 1.0, 1e300);
  const KernelCheck c = check_kernel(probe);
  double d = c.envelope_amalgam;
  for (const auto& [delta, w] : c.modulus) d = std::max(d, w / delta);
  return KernelOperator::convolution(g, h, 1.0, d * (1.0 + 1e-6));
}

GeneratorFamily bspline_family(int order, long size) {
  require(order >= 1 && order <= 8, "bspline_family: order must lie in [1, 8]");
  const Profile1D phi = Profile1D::bspline(order);
  const double peak = phi.sup_abs(0.0, double(order));
  const Profile1D envelope = Profile1D::indicator(-1.0, double(order) + 1.0, peak);
  const ModulusBound m = calibrate_modulus({phi}, envelope);
  return GeneratorFamily(range_set(size), GeneratorFamily::Rule::shift, {phi}, envelope, m);
}

std::string sha256_hex(const std::string& data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  if (ctx == nullptr || EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx, data.data(), data.size()) != 1 || EVP_DigestFinal_ex(ctx, digest, &len) != 1) {
    EVP_MD_CTX_free(ctx);
    throw_numerical("sha256 digest failed");
  }
  EVP_MD_CTX_free(ctx);
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 15]);
  }
  return out;
}

namespace {

using io::json;

double num(const json& item, const char* key, const std::string& family) {
  const auto it = item.find(key);
  require(it != item.end() && it->is_number(), family + ": missing numeric field '" + key + "'");
  return it->get<double>();
}

double num_or(const json& item, const char* key, double fallback) {
  const auto it = item.find(key);
  if (it == item.end()) return fallback;
  require(it->is_number(), std::string("field '") + key + "' must be a number");
  return it->get<double>();
}

std::uint64_t seed_of(const json& item, const std::string& family) {
  const auto it = item.find("seed");
  require(it != item.end(), family + ": a seed is mandatory");
  require(it->is_number_unsigned() || (it->is_number_integer() && it->get<long long>() >= 0),
          family + ": seed must be a nonnegative integer");
  return it->get<std::uint64_t>();
}

FiniteSequence sequence_of(const json& item, const std::string& family) {
  const auto it = item.find("sequence");
  require(it != item.end() && it->is_array() && !it->empty(), family + ": missing 'sequence'");
  std::vector<double> v;
  for (const auto& x : *it) {
    require(x.is_number(), family + ": sequence entries must be numbers");
    v.push_back(x.get<double>());
  }
  if (item.contains("first")) {
    FiniteSequence s;
    s.first = long(num(item, "first", family));
    s.values = std::move(v);
    return s;
  }
  require(v.size() % 2 == 1, family + ": even-length sequences need an explicit 'first' offset");
  return FiniteSequence::centered(std::move(v));
}

std::vector<long> windows_of(const json& item) {
  std::vector<long> out;
  const auto it = item.find("windows");
  if (it == item.end()) return {128};
  require(it->is_array() && !it->empty(), "'windows' must be a nonempty array");
  for (const auto& w : *it) {
    require(w.is_number_integer() && w.get<long>() > 0, "'windows' entries must be positive integers");
    out.push_back(w.get<long>());
  }
  return out;
}

std::string format_number_tag(double v) {
  std::string s = io::format_double(v);
  std::replace(s.begin(), s.end(), '.', 'p');
  std::replace(s.begin(), s.end(), '-', 'm');
  return s;
}

}  // namespace

json generate(const json& request, const std::filesystem::path& out_dir) {
  require(request.is_object(), "corpus request must be a JSON object");
  std::vector<json> items;
  if (request.contains("items")) {
    require(request["items"].is_array(), "corpus request: 'items' must be an array");
    for (const auto& it : request["items"]) items.push_back(it);
  } else {
    items.push_back(request);
  }
  // Build everything before writing anything, so a bad item leaves no files.
  std::vector<std::pair<std::string, std::string>> files;
  json listing = json::array();
  for (const auto& item : items) {
    require(item.is_object() && item.contains("family") && item["family"].is_string(),
            "corpus item: missing 'family'");
    const std::string family = item["family"].get<std::string>();
    const std::string name = item.value("name", family);
    const auto add = [&](const std::string& file, const json& body, const json& meta) {
      files.emplace_back(file, io::dump(body));
      json m = meta;
      m["path"] = file;
      m["family"] = family;
      listing.push_back(std::move(m));
    };
    if (family == "toeplitz") {
      const FiniteSequence a = sequence_of(item, family);
      for (long w : windows_of(item)) add(name + "_w" + std::to_string(w) + ".json", io::to_json(toeplitz(a, w)), {{"window", w}});
    } else if (family == "banded_random") {
      const std::uint64_t seed = seed_of(item, family);
      const int band = int(num(item, "band", family));
      const double scale = num_or(item, "scale", 0.1), gap = num_or(item, "gap", 0.5);
      for (long w : windows_of(item)) {
        add(name + "_w" + std::to_string(w) + ".json", io::to_json(banded_random(w, band, scale, seed, gap)),
            {{"window", w}, {"seed", seed}});
      }
    } else if (family == "slanted") {
      const long alpha = long(num(item, "alpha", family));
      const FiniteSequence b = item.contains("sequence") ? sequence_of(item, family) : FiniteSequence{0, {1.0}};
      for (long w : windows_of(item)) add(name + "_w" + std::to_string(w) + ".json", io::to_json(slanted(w, alpha, b)), {{"window", w}});
    } else if (family == "gabor_gram") {
      const double a = num(item, "a", family), b = num(item, "b", family);
      const double radius = num_or(item, "radius", 5.0);
      for (long w : windows_of(item)) {
        const long m = long(num_or(item, "m_count", double(w)));
        add(name + "_w" + std::to_string(w) + ".json", io::to_json(gabor_gram(a, b, w, m, radius)), {{"window", w}});
      }
    } else if (family == "bspline_gram") {
      const int order = int(num(item, "order", family));
      for (long w : windows_of(item)) add(name + "_w" + std::to_string(w) + ".json", io::to_json(bspline_gram(order, w)), {{"window", w}});
    } else if (family == "bspline_family") {
      const int order = int(num(item, "order", family));
      for (long w : windows_of(item)) {
        const GeneratorFamily f = bspline_family(order, w);
        require_hypotheses(f);
        add(name + "_w" + std::to_string(w) + ".json", io::to_json(f), {{"window", w}});
      }
    } else if (family == "gaussian_kernel") {
      const double theta = num(item, "theta", family), sigma = num_or(item, "sigma", 1.0);
      const KernelOperator k = gaussian_kernel(theta, sigma);
      require_kernel(k);
      add(name + "_t" + format_number_tag(theta) + "_s" + format_number_tag(sigma) + ".json", io::to_json(k), json::object());
    } else {
      throw_precondition("corpus item: unknown family '" + family + "'");
    }
  }
  std::filesystem::create_directories(out_dir);
  for (std::size_t i = 0; i < files.size(); ++i) {
    io::write_file_atomic(out_dir / files[i].first, files[i].second);
    listing[i]["sha256"] = sha256_hex(files[i].second);
    listing[i]["bytes"] = files[i].second.size();
  }
  json manifest = {{"files", listing}};
  io::write_file_atomic(out_dir / "manifest.json", io::dump(manifest));
  return manifest;
}

}  // namespace locop::corpus
