#pragma once

#include <vector>

#include "locop/profile.hpp"

namespace locop {

// Piecewise-constant function on the dyadic cells [(first + i)·2^{−level},
// (first + i + 1)·2^{−level}), zero elsewhere.
struct DyadicFunction {
  int level = 0;
  long first = 0;
  std::vector<double> values;

  double cell_width() const;
  double lo() const;
  double hi() const;
  double operator()(double x) const;
  // ‖f‖_p on ℝ (exact for piecewise constants).
  double lp_norm(double p) const;
};

// Cell averages of f at scale 2^{−n} over [lo, hi); lo and hi are snapped
// outward to the dyadic grid.
DyadicFunction project_Pn(const Profile1D& f, int n, double lo, double hi);
// Pₙ of a piecewise constant: averages pairs for n < level, copies cells for
// n ≥ level (refinement is exact).
DyadicFunction project_Pn(const DyadicFunction& f, int n);

// Same function written on the finer level (level must not decrease).
DyadicFunction refine(const DyadicFunction& f, int level);

// Σ a(k)·φ₀(2ⁿ(· − k 2^{−n})) viewed as a function; identical to
// DyadicFunction{n, first, a} but named for the norm identity.
DyadicFunction dyadic_expansion(int n, long first, std::vector<double> coefficients);

// ‖f − g‖_p for two dyadic functions (compared on the finer of the two levels).
double lp_distance(const DyadicFunction& f, const DyadicFunction& g, double p);

}  // namespace locop
