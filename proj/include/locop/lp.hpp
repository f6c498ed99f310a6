#pragma once

#include <Eigen/Dense>

namespace locop {

// min costᵀx  s.t.  A_ub x ≤ b_ub,  A_eq x = b_eq,  x ≥ 0.
// Either constraint block may be empty (zero rows, matching column count).
struct LinearProgram {
  Eigen::VectorXd cost;
  Eigen::MatrixXd a_ub;
  Eigen::VectorXd b_ub;
  Eigen::MatrixXd a_eq;
  Eigen::VectorXd b_eq;
};

enum class LpStatus { optimal, infeasible, unbounded };

struct LpResult {
  LpStatus status = LpStatus::infeasible;
  double objective = 0.0;
  Eigen::VectorXd x;
};

// Dense two-phase tableau simplex with a Harris ratio test and periodic
// reinversion; falls back to Bland's rule while degenerate steps stall.
// Intended for the small per-face programs of the exact ℓ¹/ℓ∞ lower-constant
// search, not for large sparse LPs.
LpResult solve_lp(const LinearProgram& lp);

}  // namespace locop
