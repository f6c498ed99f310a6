#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "locop/errors.hpp"
#include "locop/kernelop.hpp"
#include "locop/norms.hpp"

using namespace locop;

namespace {

KernelOperator zero_kernel() {
  return KernelOperator::convolution(Profile1D::indicator(-0.5, 0.5, 0.0), Profile1D::indicator(-1.0, 1.0), 1.0, 1.0);
}

KernelOperator box_convolution() {
  return KernelOperator::convolution(Profile1D::indicator(0.0, 1.0), Profile1D::indicator(0.0, 1.0), 1.0, 1.0);
}

KernelOperator gaussian(double theta) {
  const auto g = Profile1D::gaussian(1.0, theta);
  return KernelOperator::convolution(g, Profile1D::gaussian(1.0, std::abs(theta)), 1.0, 10.0 * std::abs(theta));
}

}  // namespace

TEST_CASE("kernel application") {
  const auto f = dyadic_expansion(0, 0, {1.0});
  std::vector<double> xs;
  for (int i = 0; i <= 24; ++i) xs.push_back(-0.5 + 0.125 * i);
  const auto zero = apply_kernel(zero_kernel(), f, xs);
  for (double v : zero.values) CHECK(v == 0.0);
  const auto hat = apply_kernel(box_convolution(), f, xs);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double x = xs[i];
    const double expect = x <= 0.0 || x >= 2.0 ? 0.0 : (x < 1.0 ? x : 2.0 - x);
    CHECK(hat.values[i] == doctest::Approx(expect).epsilon(1e-14));
  }
  const auto none = apply_kernel(box_convolution(), dyadic_expansion(2, 0, {0.0, 0.0}), xs);
  for (double v : none.values) CHECK(v == 0.0);
  CHECK(hat.schur_ratio <= 1.0);
}

TEST_CASE("kernel discretization entries") {
  const auto ind = Profile1D::indicator(0.0, 1.0);
  const auto sep = KernelOperator::separable(ind, ind, Profile1D::indicator(-1.0, 1.0), 1.0, 2.0);
  const auto a0 = discretize_kernel(sep, 0, 0.0, 1.0);
  REQUIRE(a0.nnz() == 1);
  CHECK(a0.entries()[0].value == doctest::Approx(1.0).epsilon(1e-15));

  const auto k = KernelOperator::separable(Profile1D::indicator(0.0, 1.0, 0.75), ind, Profile1D::indicator(-1.0, 1.0, 0.75), 1.0, 1.5);
  const auto a3 = discretize_kernel(k, 3, 0.0, 1.0);
  CHECK(a3.nnz() == 64);
  for (const auto& e : a3.entries()) CHECK(e.value == doctest::Approx(0.75).epsilon(1e-14));

  for (const auto& e : discretize_kernel(zero_kernel(), 2, 0.0, 4.0).entries()) CHECK(e.value == 0.0);
}

TEST_CASE("transpose and Toeplitz application agree with dense products") {
  const auto op = gaussian(0.1);
  const auto a = discretize_kernel(op, 3, 0.0, 8.0);
  const auto at = discretize_kernel(op.transposed(), 3, 0.0, 8.0);
  CHECK((a.dense().transpose() - at.dense()).cwiseAbs().maxCoeff() == 0.0);
  const auto f = Profile1D::bspline(2, 3.0);
  const auto pf = project_Pn(f, 3, 0.0, 8.0);
  const auto fast = apply_discretized(op, 3, 0.0, 8.0, f);
  const auto slow = a.multiply(pf.values);
  REQUIRE(fast.values.size() == slow.size());
  for (std::size_t i = 0; i < slow.size(); ++i) CHECK(fast.values[i] == doctest::Approx(slow[i] / 8.0).epsilon(1e-10).scale(1e-3));
}

TEST_CASE("kernel hypotheses") {
  CHECK(check_kernel(gaussian(0.1)).ok());
  const auto bad = KernelOperator::convolution(Profile1D::gaussian(1.0, 0.2), Profile1D::gaussian(1.0, 0.1), 1.0, 1.0);
  CHECK_FALSE(check_kernel(bad).ok());
  CHECK_THROWS_AS(require_kernel(bad), PreconditionError);
}

TEST_CASE("error curve") {
  const auto probes = default_probes(0.0, 16.0);
  const auto z = discretization_error_curve(zero_kernel(), {2, 3}, probes, 2.0, 0.0, 16.0);
  for (const auto& p : z.points) CHECK(p.ratio == 0.0);

  Eigen::MatrixXd v(16, 16);
  for (int i = 0; i < 16; ++i) {
    for (int j = 0; j < 16; ++j) v(i, j) = std::exp(-0.3 * std::abs(i - j)) * (1.0 + 0.05 * i);
  }
  const auto table = KernelOperator::table(2, 0, 0, v, Profile1D::indicator(-4.0, 4.0, 1.1), 1.0, 2.2);
  const auto t = discretization_error_curve(table, {2, 3}, default_probes(-8.0, 12.0), 2.0, -8.0, 12.0);
  for (const auto& p : t.points) CHECK(p.ratio <= 1e-13);

  const auto g = discretization_error_curve(gaussian(0.1), {3, 4, 5, 6}, default_probes(0.0, 24.0), 2.0, 0.0, 24.0);
  REQUIRE(g.slope.has_value());
  CHECK(*g.slope >= -1.2);
  CHECK(*g.slope <= -0.8);
}

TEST_CASE("perturbed identity") {
  const auto z = perturbed_identity_stability(zero_kernel(), {1.0, 2.0, kInf}, {2}, {8.0, 16.0}, {}, {}, false);
  for (const auto& r : z.rungs) CHECK(r.lower.value == doctest::Approx(1.0).epsilon(1e-12));

  const auto g = perturbed_identity_stability(gaussian(0.1), {2.0}, {3}, {16.0, 32.0, 64.0}, {}, {}, false);
  for (const auto& r : g.rungs) {
    CHECK(r.lower.value >= 1.0 - 0.1 * std::sqrt(std::numbers::pi));
    CHECK(r.lower.value <= 1.0 + 0.1 * std::sqrt(std::numbers::pi));
  }
  REQUIRE(g.trends.size() == 1);
  CHECK(g.trends[0].second == Trend::stable);

  const double c = -1.0 / std::sqrt(std::numbers::pi);
  const auto singular = KernelOperator::convolution(Profile1D::gaussian(1.0, c), Profile1D::gaussian(1.0, -c), 1.0, -10.0 * c);
  const auto s = perturbed_identity_stability(singular, {2.0}, {2}, {8.0, 16.0, 32.0, 64.0}, {}, {}, false);
  REQUIRE(s.trends.size() == 1);
  CHECK(s.trends[0].second == Trend::degenerating);
  CHECK(s.rungs.back().lower.value < 0.01);
}

TEST_CASE("kernel truncation tail") {
  const double ss[] = {0.0, 1.0, 2.0, 3.0, 4.0, 6.0};
  const auto a = discretize_kernel(box_convolution(), 2, 0.0, 8.0);
  const auto tb = kernel_truncation_tail(box_convolution(), 2, ss, 0.0, 8.0);
  CHECK(tb[0].tail == doctest::Approx(sjostrand_norm(a)).epsilon(1e-15));
  for (const auto& t : tb) {
    if (t.s > 2.0) CHECK(t.tail == 0.0);
  }
  for (const auto& t : kernel_truncation_tail(gaussian(0.1), 3, ss, 0.0, 16.0)) CHECK(t.tail <= t.bound);
}
