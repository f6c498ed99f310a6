#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace locop {

// Univariate building block for generators, envelopes and convolution kernels.
//
// pp:          piecewise polynomial; piece i lives on [breaks[i], breaks[i+1])
//              with coefficients of (x − breaks[i])^0, ^1, ... ; zero outside.
// gaussian:    amplitude · exp(−((x − center)/sigma)²)
// exponential: amplitude · exp(−rate·|x − center|)
class Profile1D {
 public:
  enum class Kind { pp, gaussian, exponential };

  static Profile1D piecewise(std::vector<double> breaks, std::vector<std::vector<double>> coeffs);
  static Profile1D gaussian(double sigma, double amplitude = 1.0, double center = 0.0);
  static Profile1D exponential(double rate, double amplitude = 1.0, double center = 0.0);
  // Cardinal B-spline of the given order on [shift, shift + order] (order 1 is
  // the indicator of [0,1), order 2 the hat with peak 1 at 1).
  static Profile1D bspline(int order, double shift = 0.0);
  // Indicator of [a, b) times value.
  static Profile1D indicator(double a, double b, double value = 1.0);

  Kind kind() const { return kind_; }
  const std::vector<double>& breaks() const { return breaks_; }
  const std::vector<std::vector<double>>& coeffs() const { return coeffs_; }
  double sigma() const { return param_; }
  double rate() const { return param_; }
  double amplitude() const { return amplitude_; }
  double center() const { return center_; }

  double operator()(double x) const;

  // f(· − tau), scaled by t, reflected x ↦ f(−x).
  Profile1D translated(double tau) const;
  Profile1D scaled(double t) const;
  Profile1D reflected() const;

  // Interval outside which |f| ≤ tol (exact support for pp).
  std::pair<double, double> support(double tol = 1e-17) const;

  // Infimum and supremum of f over the closed interval [a, b], including
  // one-sided limits at jumps. Exact up to root finding.
  std::pair<double, double> range(double a, double b) const;
  double sup_abs(double a, double b) const;

  // ∫_a^b f, and ∫_a^b f·w for a smooth weight w (adaptive Gauss–Legendre on
  // each polynomial piece; a single 8-point rule is exact for pp with linear w
  // up to degree 14).
  double integral(double a, double b) const;
  double integral(double a, double b, const std::function<double(double)>& weight) const;

  // (∫ |f|^p)^{1/p} over the whole line; p = ∞ gives sup |f|.
  double lp_norm(double p) const;

 private:
  Kind kind_ = Kind::pp;
  std::vector<double> breaks_;
  std::vector<std::vector<double>> coeffs_;
  double param_ = 1.0;
  double amplitude_ = 1.0;
  double center_ = 0.0;

  // Points splitting [a, b] into smooth pieces (breaks, center).
  std::vector<double> smooth_cuts(double a, double b) const;
};

// Σ_k sup_{x∈[k,k+1)} |f(x)|.
struct AmalgamNorm {
  double value = 0.0;
  double tail_bound = 0.0;  // bound on the dropped cells (0 when exact)
  long first_cell = 0;
  long last_cell = 0;
};

AmalgamNorm amalgam_norm(const Profile1D& f);
// Amalgam norm of an arbitrary function from sampled per-cell suprema on
// [lo, hi) with `per_cell` probes per unit cell (a sampled estimate).
double sampled_amalgam_norm(const std::function<double(double)>& f, double lo, double hi, int per_cell);

// ω_δ(f)(x) = sup_{|y|≤δ} |f(x+y) − f(x)|; requires δ ∈ (0, 1).
double modulus_of_continuity(const Profile1D& f, double delta, double x);

// Adaptive Gauss–Legendre of a smooth integrand on [a, b].
double gauss_legendre(const std::function<double(double)>& f, double a, double b, double tol = 1e-14);

}  // namespace locop
