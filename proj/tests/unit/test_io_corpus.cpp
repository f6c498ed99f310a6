#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "locop/analysis.hpp"
#include "locop/corpus.hpp"
#include "locop/errors.hpp"
#include "locop/json_io.hpp"
#include "locop/norms.hpp"

using namespace locop;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("locop_unit_" + name + "_" + std::to_string(::getpid()));
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST_CASE("norm index text") {
  CHECK(parse_norm_index("2") == 2.0);
  CHECK(std::isinf(parse_norm_index("inf")));
  CHECK(std::isinf(parse_norm_index("Infinity")));
  CHECK_THROWS_AS(parse_norm_index("0.5"), PreconditionError);
  CHECK_THROWS_AS(parse_norm_index("x"), PreconditionError);
  CHECK(format_norm_index(kInf) == "inf");
  CHECK(format_norm_index(1.5) == "1.5");
  CHECK(io::format_double(0.1) == "0.1");
}

TEST_CASE("matrix round trip") {
  const auto a = corpus::banded_random(20, 2, 0.1, 9);
  const auto b = io::matrix_from_json(io::json::parse(io::dump(io::to_json(a))));
  CHECK(b.nnz() == a.nnz());
  CHECK((a.dense() - b.dense()).cwiseAbs().maxCoeff() == 0.0);
  CHECK_THROWS_AS(io::matrix_from_json(io::json{{"rows", 1}}), PreconditionError);
}

TEST_CASE("profile, family and kernel round trips") {
  for (const auto& p : {Profile1D::bspline(3, 1.0), Profile1D::gaussian(0.5, 2.0, 1.0), Profile1D::exponential(1.5)}) {
    const auto q = io::profile_from_json(io::to_json(p));
    for (double x : {-1.3, 0.2, 1.7, 2.9}) CHECK(q(x) == p(x));
  }
  const auto fam = corpus::bspline_family(2, 16);
  const auto fam2 = io::family_from_json(io::to_json(fam));
  CHECK(fam2.index().size() == 16);
  CHECK(fam2.modulus().c == fam.modulus().c);
  const auto k = corpus::gaussian_kernel(0.1, 1.0);
  const auto k2 = io::kernel_from_json(io::to_json(k));
  CHECK(k2(0.3, 1.1) == k(0.3, 1.1));
  CHECK(k(0.0, 0.0) == doctest::Approx(0.1).epsilon(1e-15));
  CHECK(k(1.0, 0.0) == doctest::Approx(0.1 * std::exp(-1.0)).epsilon(1e-15));
}

TEST_CASE("sequence CSV") {
  const auto a = io::sequence_from_csv("1\n3\n1\n");
  CHECK(a.first == -1);
  CHECK(a.values == std::vector<double>{1, 3, 1});
  const auto b = io::sequence_from_csv("j,value\n-2,0.5\n-1,0\n0,1\n");
  CHECK(b.first == -2);
  CHECK(b.values == std::vector<double>{0.5, 0.0, 1.0});
  CHECK_THROWS_AS(io::sequence_from_csv("j,value\n-2,0.5\n0,1\n"), PreconditionError);
}

TEST_CASE("corpus families") {
  CHECK(corpus::toeplitz(FiniteSequence::centered({1, 3, 1}), 128).nnz() == 3 * 128 - 2);
  CHECK(slant_norm(corpus::slanted(20, 2, FiniteSequence{0, {1.0}}), 2.0, Weight{}) == 1.0);
  const auto big = corpus::banded_random(64, 2, 0.1, 7);
  const auto small = corpus::banded_random(32, 2, 0.1, 7);
  for (const auto& e : small.entries()) CHECK(big.at(e.row, e.col) == e.value);
  const auto g = corpus::gabor_gram(1.0, 1.0, 6, 6);
  CHECK(g.rows().dim() == 2);
  CHECK((g.dense() - g.dense().transpose()).cwiseAbs().maxCoeff() <= 1e-15);
  const auto bs = corpus::bspline_gram(2, 10);
  CHECK(bs.at(3, 3) == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
  CHECK(bs.at(3, 4) == doctest::Approx(1.0 / 6.0).epsilon(1e-14));
  CHECK(corpus::sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("generation is deterministic") {
  const io::json request = {{"items",
                          {{{"family", "banded_random"}, {"band", 2}, {"seed", 7}, {"windows", {32, 64}}},
                           {{"family", "toeplitz"}, {"sequence", {1, 3, 1}}, {"windows", {128}}}}}};
  const auto d1 = scratch("gen1");
  const auto d2 = scratch("gen2");
  const auto m1 = corpus::generate(request, d1);
  const auto m2 = corpus::generate(request, d2);
  CHECK(m1 == m2);
  for (const auto& f : m1["files"]) {
    CHECK(slurp(d1 / f["path"].get<std::string>()) == slurp(d2 / f["path"].get<std::string>()));
    CHECK(corpus::sha256_hex(slurp(d1 / f["path"].get<std::string>())) == f["sha256"]);
  }
  const io::json unseeded = {{"family", "banded_random"}, {"band", 2}, {"windows", {16}}};
  CHECK_THROWS_AS(corpus::generate(unseeded, scratch("gen3")), PreconditionError);
  fs::remove_all(d1);
  fs::remove_all(d2);
}

TEST_CASE("analyses from configs") {
  const auto dir = scratch("run");
  io::write_file_atomic(dir / "m.json", io::dump(io::to_json(corpus::toeplitz(FiniteSequence::centered({1, 3, 1}), 128))));
  const auto eq = run_analysis({{"analysis", "equiv"}, {"matrix", "m.json"}, {"p", {1, 2, "inf"}}, {"windows", {32, 64, 128}}}, dir);
  for (const auto& s : eq.report["per_p"]) {
    for (const auto& e : s["entries"]) CHECK(e["lower"]["value"].get<double>() >= 0.99);
  }
  REQUIRE(eq.csv.has_value());
  CHECK(eq.csv->rfind("window,p,lower,upper,certified\n", 0) == 0);
  const auto conv = run_analysis({{"analysis", "conv"}, {"values", {1, 2, 1}}}, dir);
  CHECK(conv.report["verdict"] == "unstable");
  CHECK_THROWS_AS(run_analysis({{"analysis", "norms"}, {"matrix", "missing.json"}}, dir), PreconditionError);
  CHECK_THROWS_AS(run_analysis({{"analysis", "nope"}}, dir), PreconditionError);
  fs::remove_all(dir);
}
