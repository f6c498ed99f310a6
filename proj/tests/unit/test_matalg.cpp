#include <cmath>
#include <vector>

#include "doctest.h"
#include "helpers.hpp"
#include "locop/errors.hpp"
#include "locop/lattice.hpp"
#include "locop/matalg.hpp"

using namespace locop;
using testing::range;
using testing::toeplitz;

TEST_CASE("schur norm") {
  auto s = range(0, 4);
  CHECK(schur_norm(LocalizedMatrix::identity(s)) == 1.0);
  auto two = range(0, 1);
  LocalizedMatrix a(two, two, {{0, 0, 1.0}, {0, 1, 2.0}, {1, 1, 1.0}});
  CHECK(schur_norm(a) == 3.0);
  CHECK(schur_norm(LocalizedMatrix::zero(s, s)) == 0.0);
}

TEST_CASE("sjostrand norm") {
  for (long n : {2L, 5L, 40L}) CHECK(sjostrand_norm(toeplitz({1, 3, 1}, n)) == 5.0);
  CHECK(sjostrand_norm(LocalizedMatrix::identity(range(0, 9))) == 1.0);
  auto s = range(0, 3);
  LocalizedMatrix d(s, s, {{0, 0, 0.5}, {1, 1, -4.0}, {2, 2, 2.0}, {3, 3, 1.0}});
  CHECK(sjostrand_norm(d) == 4.0);
}

TEST_CASE("slant norm") {
  CHECK(slant_norm(toeplitz({1, 3, 1}, 30), 1.0, Weight{}) == 5.0);
  auto rows = range(0, 9);
  auto cols = range(0, 18);
  std::vector<Entry> e;
  for (std::size_t j = 0; j < 10; ++j) e.push_back({j, 2 * j, 1.0});
  CHECK(slant_norm(LocalizedMatrix(rows, cols, e), 2.0, Weight{}) == 1.0);
  CHECK(slant_norm(LocalizedMatrix::zero(rows, cols), 2.0, Weight{}) == 0.0);
}

TEST_CASE("truncation") {
  const auto t = toeplitz({1, 3, 1}, 20);
  const auto d = truncate(t, 1.0);
  CHECK(d.nnz() == 20);
  for (const auto& e : d.entries()) {
    CHECK(e.row == e.col);
    CHECK(e.value == 3.0);
  }
  CHECK(truncate(t, 0.0).nnz() == 0);
  CHECK(truncate(t, 2.5).nnz() == t.nnz());
}

TEST_CASE("truncation tail") {
  const double s3[] = {0.0, 1.0, 2.0};
  const auto tail = truncation_tail(toeplitz({1, 3, 1}, 50), s3);
  REQUIRE(tail.size() == 3);
  CHECK(tail[0].tail == 5.0);
  CHECK(tail[1].tail == 2.0);
  CHECK(tail[2].tail == 0.0);

  auto s = range(0, 9);
  const double s2[] = {1.0, 2.0};
  for (const auto& t : truncation_tail(LocalizedMatrix(s, s, {{0, 0, 2.0}, {5, 5, 1.0}}), s2)) CHECK(t.tail == 0.0);

  std::vector<double> geo(81);
  for (int k = -40; k <= 40; ++k) geo[std::size_t(k + 40)] = std::ldexp(1.0, -std::abs(k));
  const double ss[] = {1.0, 2.0, 5.0, 10.0};
  for (const auto& t : truncation_tail(toeplitz(geo, 200), ss)) {
    CHECK(t.tail == doctest::Approx(std::pow(2.0, 2.0 - t.s)).epsilon(1e-9));
  }
}

TEST_CASE("apply with bound record") {
  auto s = range(0, 19);
  std::vector<double> c(20);
  for (int i = 0; i < 20; ++i) c[std::size_t(i)] = std::sin(0.3 * i);
  const auto id = apply(LocalizedMatrix::identity(s), c, 2.0);
  CHECK(id.values == c);
  CHECK(id.bound.ratio == doctest::Approx(1.0).epsilon(1e-15));

  const std::vector<double> ones(20, 1.0);
  const auto t = apply(toeplitz({1, 3, 1}, 20), ones, 1.0);
  for (std::size_t i = 1; i + 1 < 20; ++i) CHECK(t.values[i] == 5.0);
  CHECK(t.bound.ratio <= 1.0);

  const auto z = apply(LocalizedMatrix::zero(s, s), c, 3.0);
  for (double v : z.values) CHECK(v == 0.0);
}

TEST_CASE("commutator with cutoff") {
  auto s = range(0, 63);
  std::vector<Entry> e;
  for (std::size_t i = 0; i < 64; ++i) e.push_back({i, i, 1.0 + 0.1 * double(i)});
  const LocalizedMatrix diag(s, s, e);
  CutoffOperator op({32.0}, 4.0, s);
  for (const auto& x : commutator_with_cutoff(diag, op).entries()) CHECK(x.value == 0.0);

  const auto t = toeplitz({1, 3, 1}, 256);
  for (double n : {2.0, 4.0, 8.0, 16.0, 32.0, 64.0}) {
    CutoffOperator cut({128.0}, n, t.rows_ptr());
    const auto c = commutator_with_cutoff(t, cut);
    for (const auto& x : c.entries()) {
      const double pr[] = {(t.rows().point(x.row)[0] - 128.0) / n};
      const double pc[] = {(t.cols().point(x.col)[0] - 128.0) / n};
      CHECK(x.value == doctest::Approx(t.at(x.row, x.col) * (cutoff_psi(pc) - cutoff_psi(pr))).epsilon(1e-15));
    }
    CHECK(sjostrand_norm(c) <= 2.0 / n * 5.0 + 1e-12);
  }
  CHECK_THROWS_AS(CutoffOperator({3.0}, 4.0, t.rows_ptr()), PreconditionError);
  CutoffOperator other({0.0}, 4.0, range(0, 3));
  CHECK_THROWS_AS(commutator_with_cutoff(t, other), PreconditionError);
}

TEST_CASE("schur norm is dominated by the separated Sjostrand norm") {
  auto rows = std::make_shared<const IndexSet>(IndexSet::uniform_range(0.0, 0.5, 40));
  std::vector<Entry> e;
  for (std::size_t i = 0; i < 40; ++i) {
    for (std::size_t j = 0; j < 40; ++j) {
      const double d = std::abs(double(i) - double(j)) * 0.5;
      if (d < 3.0) e.push_back({i, j, std::exp(-d) * (1.0 + 0.01 * double(i))});
    }
  }
  const LocalizedMatrix a(rows, rows, e);
  const double r = double(separation_constant(*rows));
  CHECK(schur_norm(a) <= r * r * sjostrand_norm(a) + 1e-12);
}
