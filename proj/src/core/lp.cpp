#include "locop/lp.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "locop/errors.hpp"

namespace locop {

namespace {

constexpr double kPivotTol = 1e-9;
constexpr double kCostTol = 1e-11;
constexpr double kFeasTol = 1e-11;
constexpr int kDegenerateLimit = 50;
constexpr int kRefreshEvery = 16;

struct Tableau {
  Eigen::MatrixXd a0;    // standard-form constraints, last column: rhs
  Eigen::VectorXd cost;  // per column of a0, rhs entry 0
  // rows 0..m-1: B⁻¹a0, row m: reduced costs, last column: rhs
  Eigen::MatrixXd t;
  std::vector<Eigen::Index> basis;
  int since_refresh = 0;

  Eigen::Index rows() const { return t.rows() - 1; }
  Eigen::Index cols() const { return t.cols() - 1; }

  void clamp_rhs() {
    for (Eigen::Index i = 0; i < rows(); ++i) {
      if (t(i, cols()) < 0.0 && t(i, cols()) > -kPivotTol) t(i, cols()) = 0.0;
    }
  }

  // Rebuilds the tableau from the original data for the current basis.
  void refresh() {
    const Eigen::Index m = rows();
    since_refresh = 0;
    if (m > 0) {
      Eigen::MatrixXd b(m, m);
      for (Eigen::Index i = 0; i < m; ++i) b.col(i) = a0.col(basis[std::size_t(i)]);
      const Eigen::FullPivLU<Eigen::MatrixXd> lu(b);
      if (!lu.isInvertible()) return;
      t.topRows(m) = lu.solve(a0);
      for (Eigen::Index i = 0; i < m; ++i) {
        const Eigen::Index c = basis[std::size_t(i)];
        t.col(c).head(m).setZero();
        t(i, c) = 1.0;
      }
    }
    t.row(m) = cost.transpose();
    for (Eigen::Index i = 0; i < m; ++i) {
      const double cb = cost(basis[std::size_t(i)]);
      if (cb != 0.0) t.row(m) -= cb * t.row(i);
    }
    clamp_rhs();
  }

  void pivot(Eigen::Index r, Eigen::Index c) {
    t.row(r) /= t(r, c);
    for (Eigen::Index i = 0; i < t.rows(); ++i) {
      if (i != r && t(i, c) != 0.0) t.row(i) -= t(i, c) * t.row(r);
    }
    basis[std::size_t(r)] = c;
    if (++since_refresh >= kRefreshEvery) {
      refresh();
    } else {
      clamp_rhs();
    }
  }

  // Dantzig pricing, switching to Bland's rule while degenerate pivots pile up.
  // Returns false when unbounded. Columns >= allowed are never entered.
  bool run(Eigen::Index allowed) {
    const Eigen::Index m = rows();
    const double scale = std::max(1.0, t.row(m).head(allowed).cwiseAbs().maxCoeff());
    int degenerate = 0;
    for (int iter = 0; iter < 100000; ++iter) {
      const bool bland = degenerate >= kDegenerateLimit;
      Eigen::Index enter = -1;
      double most = -kCostTol * scale;
      for (Eigen::Index j = 0; j < allowed; ++j) {
        if (t(m, j) < most) {
          enter = j;
          if (bland) break;
          most = t(m, j);
        }
      }
      if (enter < 0) return true;
      // Harris ratio test: bound the step with a feasibility slack, then take
      // the largest pivot among rows blocking within that bound.
      double bound = std::numeric_limits<double>::infinity();
      for (Eigen::Index i = 0; i < m; ++i) {
        const double a = t(i, enter);
        if (a > kPivotTol) bound = std::min(bound, (std::max(t(i, cols()), 0.0) + kFeasTol) / a);
      }
      if (!std::isfinite(bound)) return false;
      Eigen::Index leave = -1;
      double best = 0.0;
      for (Eigen::Index i = 0; i < m; ++i) {
        const double a = t(i, enter);
        if (a <= kPivotTol) continue;
        const double ratio = std::max(t(i, cols()), 0.0) / a;
        if (ratio > bound) continue;
        if (leave < 0 || (bland ? basis[std::size_t(i)] < basis[std::size_t(leave)] : a > t(leave, enter))) {
          leave = i;
          best = ratio;
        }
      }
      degenerate = best <= kFeasTol ? degenerate + 1 : 0;
      pivot(leave, enter);
    }
    throw_numerical("solve_lp: iteration limit reached");
  }
};

}  // namespace

LpResult solve_lp(const LinearProgram& lp) {
  const Eigen::Index n = lp.cost.size();
  const Eigen::Index mu = lp.a_ub.rows();
  const Eigen::Index me = lp.a_eq.rows();
  require(mu == 0 || lp.a_ub.cols() == n, "solve_lp: A_ub column mismatch");
  require(me == 0 || lp.a_eq.cols() == n, "solve_lp: A_eq column mismatch");
  require(lp.b_ub.size() == mu && lp.b_eq.size() == me, "solve_lp: rhs size mismatch");

  // Standard form: [A_ub I; A_eq 0] [x; s] = b, rows flipped so b ≥ 0, plus artificials.
  const Eigen::Index m = mu + me;
  const Eigen::Index ns = n + mu;   // structural + slack
  const Eigen::Index total = ns + m;
  Tableau tab;
  tab.a0 = Eigen::MatrixXd::Zero(m, total + 1);
  for (Eigen::Index i = 0; i < mu; ++i) {
    tab.a0.row(i).head(n) = lp.a_ub.row(i);
    tab.a0(i, n + i) = 1.0;
    tab.a0(i, total) = lp.b_ub(i);
  }
  for (Eigen::Index i = 0; i < me; ++i) {
    tab.a0.row(mu + i).head(n) = lp.a_eq.row(i);
    tab.a0(mu + i, total) = lp.b_eq(i);
  }
  for (Eigen::Index i = 0; i < m; ++i) {
    if (tab.a0(i, total) < 0.0) tab.a0.row(i) *= -1.0;
    tab.a0(i, ns + i) = 1.0;
  }
  tab.t = Eigen::MatrixXd::Zero(m + 1, total + 1);
  tab.basis.resize(std::size_t(m));
  for (Eigen::Index i = 0; i < m; ++i) tab.basis[std::size_t(i)] = ns + i;
  // Crash basis: unit columns (slacks included) replace artificials.
  for (Eigen::Index j = 0; j < ns; ++j) {
    const auto col = tab.a0.col(j);
    Eigen::Index r = -1;
    for (Eigen::Index i = 0; i < m; ++i) {
      if (col(i) == 0.0) continue;
      if (col(i) != 1.0 || r >= 0) {
        r = -2;
        break;
      }
      r = i;
    }
    if (r >= 0 && tab.basis[std::size_t(r)] >= ns) tab.basis[std::size_t(r)] = j;
  }

  // Phase 1: minimise the sum of artificials.
  tab.cost = Eigen::VectorXd::Zero(total + 1);
  tab.cost.segment(ns, m).setOnes();
  tab.refresh();
  tab.run(ns);
  tab.refresh();
  LpResult result;
  const double rhs_scale = std::max(1.0, tab.a0.col(total).cwiseAbs().maxCoeff());
  if (-tab.t(m, total) > 1e-9 * rhs_scale) {
    result.status = LpStatus::infeasible;
    return result;
  }
  // Drive zero-level artificials out of the basis where possible.
  for (Eigen::Index i = 0; i < m; ++i) {
    if (tab.basis[std::size_t(i)] < ns) continue;
    Eigen::Index j;
    if (tab.t.row(i).head(ns).cwiseAbs().maxCoeff(&j) > kPivotTol) tab.pivot(i, j);
  }

  // Phase 2.
  tab.cost.setZero();
  tab.cost.head(n) = lp.cost;
  tab.refresh();
  if (!tab.run(ns)) {
    result.status = LpStatus::unbounded;
    return result;
  }
  tab.refresh();
  result.status = LpStatus::optimal;
  result.x = Eigen::VectorXd::Zero(n);
  for (Eigen::Index i = 0; i < m; ++i) {
    const Eigen::Index b = tab.basis[std::size_t(i)];
    if (b < n) result.x(b) = std::max(tab.t(i, total), 0.0);
  }
  result.objective = lp.cost.dot(result.x);
  return result;
}

}  // namespace locop
