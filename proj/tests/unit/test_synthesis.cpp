#include <Eigen/Dense>
#include <cmath>
#include <memory>
#include <vector>

#include "doctest.h"
#include "locop/errors.hpp"
#include "locop/norms.hpp"
#include "locop/synthesis.hpp"

using namespace locop;

namespace {

IndexSetPtr integers(long lo, long hi) { return std::make_shared<const IndexSet>(IndexSet::integer_range(lo, hi)); }

GeneratorFamily shifts(const Profile1D& phi, const Profile1D& env, long n, double c = 1.0, double alpha = 1.0) {
  return GeneratorFamily(integers(0, n - 1), GeneratorFamily::Rule::shift, {phi}, env,
                         ModulusBound{ModulusBound::Form::power, c, alpha, {}});
}

GeneratorFamily hats(long n) { return shifts(Profile1D::bspline(2), Profile1D::indicator(-1.0, 3.0), n); }

GeneratorFamily boxes(long n) {
  return shifts(Profile1D::indicator(0.0, 1.0), Profile1D::indicator(-1.0, 2.0), n, 1.0, 0.0);
}

}  // namespace

TEST_CASE("synthesis samples") {
  const auto fam = hats(10);
  const UniformGrid grid{-1.0, 0.125, 100};
  std::vector<double> delta(10, 0.0);
  delta[4] = 1.0;
  const auto s = synthesize(fam, delta, grid);
  for (std::size_t k = 0; k < grid.count; ++k) {
    const double x = grid.x0 + double(k) * grid.step;
    CHECK(s.values[k] == doctest::Approx(Profile1D::bspline(2, 4.0)(x)).epsilon(1e-15));
  }
  const auto ones = synthesize(fam, std::vector<double>(10, 1.0), UniformGrid{1.0, 0.05, 161});
  for (double v : ones.values) CHECK(v == doctest::Approx(1.0).epsilon(1e-14));
  for (double v : synthesize(fam, std::vector<double>(10, 0.0), grid).values) CHECK(v == 0.0);
  CHECK(synthesis_bound_ratio(fam, std::vector<double>(10, 1.0), grid, 2.0) <= 1.0);
}

TEST_CASE("hypotheses") {
  CHECK(check_hypotheses(hats(16)).ok());
  CHECK(check_hypotheses(boxes(16)).ok());
  const auto bad = shifts(Profile1D::piecewise({0.0, 0.5, 1.0}, {{1.0}, {1.3}}), Profile1D::indicator(-1.0, 2.0), 8);
  CHECK_FALSE(check_hypotheses(bad).ok());
  CHECK_THROWS_AS(require_hypotheses(bad), PreconditionError);
  CHECK_THROWS_AS(synthesis_stability(bad, {2.0}, {3}, {8.0}), PreconditionError);
  const auto narrow = shifts(Profile1D::bspline(2), Profile1D::indicator(0.0, 2.0), 8);
  CHECK_FALSE(check_hypotheses(narrow).ok());
  const auto calibrated = calibrate_modulus({Profile1D::bspline(2)}, Profile1D::indicator(-1.0, 3.0));
  CHECK(calibrated.alpha == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(calibrated(0.25) >= 0.25);
}

TEST_CASE("discretized synthesis matrices") {
  const auto a = discretize_synthesis(boxes(12), 0);
  CHECK(a.num_rows() == 12);
  CHECK(a.nnz() == 12);
  for (const auto& e : a.entries()) {
    CHECK(a.rows().point(e.row)[0] == a.cols().point(e.col)[0]);
    CHECK(e.value == doctest::Approx(1.0).epsilon(1e-15));
  }
  const auto h = discretize_synthesis(hats(12), 0);
  std::vector<int> per_col(12, 0);
  for (const auto& e : h.entries()) {
    ++per_col[e.col];
    CHECK(e.value == doctest::Approx(0.5).epsilon(1e-15));
  }
  for (int c : per_col) CHECK(c == 2);

  const auto fine = discretize_synthesis(hats(12), 3);
  std::vector<double> c(12);
  for (std::size_t i = 0; i < 12; ++i) c[i] = std::cos(0.7 * double(i));
  const auto y = fine.multiply(c);
  std::vector<double> c3 = c;
  for (double& v : c3) v *= -2.5;
  const auto y3 = fine.multiply(c3);
  for (std::size_t i = 0; i < y.size(); ++i) CHECK(y3[i] == doctest::Approx(-2.5 * y[i]).epsilon(1e-14));
  CHECK(refinement_defect(hats(12), 3) <= 1e-14);
}

TEST_CASE("orthonormal boxes are isometric") {
  StabilityOptions opts;
  opts.seed = 3;
  const auto rep = synthesis_stability(boxes(32), {1.0, 2.0, kInf}, {0, 2, 4}, {8.0, 16.0}, opts);
  for (const auto& r : rep.rungs) {
    CHECK(r.lower.value == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(r.upper.value == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("hat shifts match the Gram section") {
  const auto rep = synthesis_stability(hats(256), {2.0}, {6}, {256.0});
  REQUIRE(rep.rungs.size() == 1);
  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(256, 256);
  for (int i = 0; i < 256; ++i) {
    gram(i, i) = 2.0 / 3.0;
    if (i + 1 < 256) gram(i, i + 1) = gram(i + 1, i) = 1.0 / 6.0;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram);
  const double lo = std::sqrt(eig.eigenvalues().minCoeff());
  const double hi = std::sqrt(eig.eigenvalues().maxCoeff());
  CHECK(std::abs(rep.rungs[0].lower.value - lo) / lo < 0.01);
  CHECK(std::abs(rep.rungs[0].upper.value - hi) / hi < 0.01);
  CHECK(std::abs(rep.rungs[0].lower.value - std::sqrt(1.0 / 3.0)) < 0.01 * std::sqrt(1.0 / 3.0));
}
