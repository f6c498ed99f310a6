#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "locop/dyadic.hpp"
#include "locop/matalg.hpp"
#include "locop/profile.hpp"
#include "locop/stability.hpp"

namespace locop {

// Kernel K_T(x, y) of Tf(x) = ∫ K_T(x, y) f(y) dy on ℝ.
//   convolution  K(x, y) = g(x − y)
//   separable    K(x, y) = u(x)·v(y)
//   table        K(x, y) = values(i, j) on dyadic cells of the given level,
//                i = ⌊2^level x⌋ − x_first, j = ⌊2^level y⌋ − y_first
class KernelOperator {
 public:
  enum class Rule { convolution, separable, table };

  static KernelOperator convolution(Profile1D g, Profile1D envelope, double alpha, double d);
  static KernelOperator separable(Profile1D u, Profile1D v, Profile1D envelope, double alpha, double d);
  static KernelOperator table(int level, long x_first, long y_first, Eigen::MatrixXd values, Profile1D envelope,
                              double alpha, double d);

  Rule rule() const { return rule_; }
  const Profile1D& g() const { return first_; }
  const Profile1D& u() const { return first_; }
  const Profile1D& v() const { return second_; }
  int table_level() const { return level_; }
  long x_first() const { return x_first_; }
  long y_first() const { return y_first_; }
  const Eigen::MatrixXd& values() const { return values_; }
  const Profile1D& envelope() const { return envelope_; }
  double alpha() const { return alpha_; }
  double d() const { return d_; }

  double operator()(double x, double y) const;
  KernelOperator transposed() const;

  // ∫_{[s0,s0+h)} ∫_{[t0,t0+h)} K(s, t) dt ds.
  double cell_integral(double s0, double t0, double h) const;
  // ∫_{[t0,t1)} K(x, t) dt.
  double row_integral(double x, double t0, double t1) const;

  // Offsets u with |K(y, u + y)| possibly above tol·scale.
  std::pair<double, double> offset_support(double tol = 1e-16) const;
  // Radius outside which the envelope stays below 1e-10 of its peak.
  double padding() const;

 private:
  Rule rule_ = Rule::convolution;
  Profile1D first_;
  Profile1D second_;
  int level_ = 0;
  long x_first_ = 0;
  long y_first_ = 0;
  Eigen::MatrixXd values_;
  Profile1D envelope_;
  double alpha_ = 1.0;
  double d_ = 0.0;
};

struct KernelCheck {
  double envelope_amalgam = 0.0;  // ‖sup_y |K(y, · + y)|‖_{𝒲₁}
  double envelope_excess = 0.0;   // max(sup_y |K(y, u + y)| − h(u)) on probes
  std::vector<std::pair<double, double>> modulus;  // (δ, ‖sup_y ω_δ(K)(y, · + y)‖_{𝒲₁})
  bool envelope_ok = true;
  bool modulus_ok = true;
  bool ok() const { return envelope_ok && modulus_ok; }
};

// Checks both hypotheses with constant D and exponent α on the δ-grid
// {2^{−1}, …, 2^{−10}}.
KernelCheck check_kernel(const KernelOperator& op, int per_cell = 64);
// Throws PreconditionError when check_kernel fails.
void require_kernel(const KernelOperator& op, int per_cell = 64);

struct KernelSamples {
  std::vector<double> x;
  std::vector<double> values;
  double truncation_bound = 0.0;  // finite sums are exact, so 0
  double schur_ratio = 0.0;       // ‖Tf‖_r (on the samples) / (‖h‖_{𝒲₁}‖f‖_r)
};

// Tf at the given points for piecewise-constant f.
KernelSamples apply_kernel(const KernelOperator& op, const DyadicFunction& f, std::span<const double> points,
                           double r = 2.0);

// Aₙ on the cells 2^{−n}ℤ ∩ [lo, hi), entries 2^{2n}·cell_integral.
LocalizedMatrix discretize_kernel(const KernelOperator& op, int n, double lo, double hi);

// Coefficients of Tₙ f = PₙTPₙ f on the level-n cells of [lo, hi).
DyadicFunction apply_discretized(const KernelOperator& op, int n, double lo, double hi, const Profile1D& f);

struct ErrorPoint {
  int n = 0;
  double ratio = 0.0;  // max over probes of ‖(T_{n+3} − Tₙ)f‖_r / ‖f‖_r
};

struct ErrorCurve {
  std::vector<ErrorPoint> points;
  std::optional<double> slope;  // log₂-linear fit of ratio against n
};

// Probes must sit at least padding() inside [lo, hi).
ErrorCurve discretization_error_curve(const KernelOperator& op, const std::vector<int>& ns,
                                      const std::vector<Profile1D>& probes, double r, double lo, double hi);

// Default smooth probes for a window: a hat, a quadratic B-spline and a
// Gaussian bump at the centre.
std::vector<Profile1D> default_probes(double lo, double hi);

struct KernelRung {
  double p = 2.0;
  int n = 0;
  double window = 0.0;
  ConstantEstimate lower;
  ConstantEstimate upper;
  std::optional<double> bias;  // measured discretization ratio at this n
};

struct KernelStabilityReport {
  KernelCheck check;
  std::vector<KernelRung> rungs;  // sorted by (p, n, window)
  std::vector<std::pair<std::pair<double, int>, Trend>> trends;  // per (p, n) across windows
};

// I + 2^{−n}Aₙ on [0, W) for each window W; function and coefficient norms
// differ by the same 2^{−n/p} factor on both sides, so the constants coincide.
KernelStabilityReport perturbed_identity_stability(const KernelOperator& op, const std::vector<double>& ps,
                                                   const std::vector<int>& ns, const std::vector<double>& windows,
                                                   const StabilityOptions& opts = {},
                                                   const TrendOptions& trend = {}, bool with_bias = true);

struct KernelTailPoint {
  double s = 0.0;
  double tail = 0.0;
  double bound = 0.0;  // 3 Σ_{|j| ≥ s − 3} sup_{[j, j+1)} |h|
};

std::vector<KernelTailPoint> kernel_truncation_tail(const KernelOperator& op, int n, std::span<const double> s_values,
                                                    double lo, double hi);

}  // namespace locop
