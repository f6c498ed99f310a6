#include "locop/matalg.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "locop/errors.hpp"
#include "locop/norms.hpp"

namespace locop {

LocalizedMatrix::LocalizedMatrix(IndexSetPtr rows, IndexSetPtr cols, std::vector<Entry> entries)
    : rows_(std::move(rows)), cols_(std::move(cols)) {
  require(rows_ && cols_, "LocalizedMatrix: null index set");
  const std::size_t m = rows_->size();
  const std::size_t n = cols_->size();
  entries_.reserve(entries.size());
  for (const auto& e : entries) {
    require(e.row < m && e.col < n, "LocalizedMatrix: entry (" + std::to_string(e.row) + ", " +
                                        std::to_string(e.col) + ") out of range");
    require(std::isfinite(e.value), "LocalizedMatrix: non-finite entry");
    if (std::abs(e.value) >= kDropBelow) entries_.push_back(e);
  }
  std::sort(entries_.begin(), entries_.end(), [](const Entry& a, const Entry& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  for (std::size_t i = 1; i < entries_.size(); ++i) {
    require(entries_[i].row != entries_[i - 1].row || entries_[i].col != entries_[i - 1].col,
            "LocalizedMatrix: duplicate entry (" + std::to_string(entries_[i].row) + ", " +
                std::to_string(entries_[i].col) + ")");
  }
  row_ptr_.assign(m + 1, 0);
  for (const auto& e : entries_) ++row_ptr_[e.row + 1];
  for (std::size_t i = 0; i < m; ++i) row_ptr_[i + 1] += row_ptr_[i];
}

LocalizedMatrix LocalizedMatrix::identity(IndexSetPtr set) {
  std::vector<Entry> e;
  e.reserve(set->size());
  for (std::size_t i = 0; i < set->size(); ++i) e.push_back({i, i, 1.0});
  return LocalizedMatrix(set, set, std::move(e));
}

LocalizedMatrix LocalizedMatrix::zero(IndexSetPtr rows, IndexSetPtr cols) {
  return LocalizedMatrix(std::move(rows), std::move(cols), {});
}

LocalizedMatrix LocalizedMatrix::from_dense(IndexSetPtr rows, IndexSetPtr cols, const Eigen::MatrixXd& m) {
  require(static_cast<std::size_t>(m.rows()) == rows->size() &&
              static_cast<std::size_t>(m.cols()) == cols->size(),
          "from_dense: shape mismatch");
  std::vector<Entry> e;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (m(i, j) != 0.0) e.push_back({std::size_t(i), std::size_t(j), m(i, j)});
    }
  }
  return LocalizedMatrix(std::move(rows), std::move(cols), std::move(e));
}

double LocalizedMatrix::at(std::size_t row, std::size_t col) const {
  const auto first = entries_.begin() + static_cast<long>(row_ptr_[row]);
  const auto last = entries_.begin() + static_cast<long>(row_ptr_[row + 1]);
  const auto it = std::lower_bound(first, last, col, [](const Entry& e, std::size_t c) { return e.col < c; });
  return (it != last && it->col == col) ? it->value : 0.0;
}

std::vector<double> LocalizedMatrix::multiply(std::span<const double> c) const {
  require(c.size() == num_cols(), "apply: sequence length " + std::to_string(c.size()) +
                                      " does not match column count " + std::to_string(num_cols()));
  std::vector<double> y(num_rows(), 0.0);
  for (std::size_t i = 0; i < num_rows(); ++i) {
    double s = 0.0;
    for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) s += entries_[k].value * c[entries_[k].col];
    y[i] = s;
  }
  return y;
}

std::vector<double> LocalizedMatrix::multiply_transpose(std::span<const double> c) const {
  require(c.size() == num_rows(), "apply_transpose: length mismatch");
  std::vector<double> y(num_cols(), 0.0);
  for (const auto& e : entries_) y[e.col] += e.value * c[e.row];
  return y;
}

LocalizedMatrix LocalizedMatrix::transpose() const {
  std::vector<Entry> e;
  e.reserve(entries_.size());
  for (const auto& x : entries_) e.push_back({x.col, x.row, x.value});
  return LocalizedMatrix(cols_, rows_, std::move(e));
}

LocalizedMatrix LocalizedMatrix::scaled(double t) const {
  std::vector<Entry> e = entries_;
  for (auto& x : e) x.value *= t;
  return LocalizedMatrix(rows_, cols_, std::move(e));
}

LocalizedMatrix LocalizedMatrix::plus_identity(double t) const {
  require(num_rows() == num_cols() && (rows_ == cols_ || *rows_ == *cols_),
          "plus_identity: matrix must be square over one index set");
  std::vector<Entry> e;
  e.reserve(entries_.size() + num_rows());
  for (std::size_t i = 0; i < num_rows(); ++i) {
    bool has_diag = false;
    for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
      Entry x = entries_[k];
      if (x.col == i) {
        x.value += t;
        has_diag = true;
      }
      e.push_back(x);
    }
    if (!has_diag) e.push_back({i, i, t});
  }
  return LocalizedMatrix(rows_, cols_, std::move(e));
}

Eigen::MatrixXd LocalizedMatrix::dense() const {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(Eigen::Index(num_rows()), Eigen::Index(num_cols()));
  for (const auto& e : entries_) m(Eigen::Index(e.row), Eigen::Index(e.col)) = e.value;
  return m;
}

namespace {

IndexSetPtr permute_set(const IndexSet& s, const std::vector<std::size_t>& perm) {
  require(perm.size() == s.size(), "permuted: permutation length mismatch");
  std::vector<bool> seen(perm.size(), false);
  std::vector<double> coords;
  coords.reserve(s.coords().size());
  for (std::size_t p : perm) {
    require(p < perm.size() && !seen[p], "permuted: not a permutation");
    seen[p] = true;
    coords.insert(coords.end(), s.point(p).begin(), s.point(p).end());
  }
  return std::make_shared<IndexSet>(s.dim(), s.window(), std::move(coords));
}

std::vector<std::size_t> inverse_perm(const std::vector<std::size_t>& perm) {
  std::vector<std::size_t> inv(perm.size());
  for (std::size_t i = 0; i < perm.size(); ++i) inv[perm[i]] = i;
  return inv;
}

}  // namespace

LocalizedMatrix LocalizedMatrix::permuted(const std::vector<std::size_t>& row_perm,
                                          const std::vector<std::size_t>& col_perm) const {
  auto rows = permute_set(*rows_, row_perm);
  auto cols = permute_set(*cols_, col_perm);
  const auto rinv = inverse_perm(row_perm);
  const auto cinv = inverse_perm(col_perm);
  std::vector<Entry> e;
  e.reserve(entries_.size());
  for (const auto& x : entries_) e.push_back({rinv[x.row], cinv[x.col], x.value});
  return LocalizedMatrix(rows, cols, std::move(e));
}

LocalizedMatrix LocalizedMatrix::restrict_to(const Box& row_box, const Box& col_box) const {
  auto [rset, rpos] = rows_->restrict_to(row_box);
  auto [cset, cpos] = cols_->restrict_to(col_box);
  std::vector<long> rmap(num_rows(), -1), cmap(num_cols(), -1);
  for (std::size_t i = 0; i < rpos.size(); ++i) rmap[rpos[i]] = long(i);
  for (std::size_t j = 0; j < cpos.size(); ++j) cmap[cpos[j]] = long(j);
  std::vector<Entry> e;
  for (const auto& x : entries_) {
    if (rmap[x.row] >= 0 && cmap[x.col] >= 0) e.push_back({std::size_t(rmap[x.row]), std::size_t(cmap[x.col]), x.value});
  }
  return LocalizedMatrix(std::make_shared<IndexSet>(std::move(rset)),
                         std::make_shared<IndexSet>(std::move(cset)), std::move(e));
}

LocalizedMatrix LocalizedMatrix::select_columns(const std::vector<std::size_t>& cols) const {
  std::vector<long> cmap(num_cols(), -1);
  std::vector<double> coords;
  for (std::size_t j = 0; j < cols.size(); ++j) {
    require(cols[j] < num_cols() && cmap[cols[j]] < 0, "select_columns: bad column list");
    cmap[cols[j]] = long(j);
    coords.insert(coords.end(), cols_->point(cols[j]).begin(), cols_->point(cols[j]).end());
  }
  auto cset = std::make_shared<IndexSet>(cols_->dim(), cols_->window(), std::move(coords));
  std::vector<Entry> e;
  for (const auto& x : entries_) {
    if (cmap[x.col] >= 0) e.push_back({x.row, std::size_t(cmap[x.col]), x.value});
  }
  return LocalizedMatrix(rows_, cset, std::move(e));
}

double LocalizedMatrix::bandwidth() const {
  double b = 0.0;
  for (const auto& e : entries_) {
    const auto p = rows_->point(e.row);
    const auto q = cols_->point(e.col);
    for (std::size_t c = 0; c < p.size(); ++c) b = std::max(b, std::abs(p[c] - q[c]));
  }
  return b;
}

LocalizedMatrix multiply(const LocalizedMatrix& a, const LocalizedMatrix& b) {
  require(a.num_cols() == b.num_rows() && a.cols() == b.rows(), "multiply: inner index sets differ");
  std::vector<Entry> out;
  std::vector<double> acc(b.num_cols(), 0.0);
  std::vector<bool> touched(b.num_cols(), false);
  std::vector<std::size_t> cols;
  const auto& be = b.entries();
  for (std::size_t i = 0; i < a.num_rows(); ++i) {
    cols.clear();
    for (std::size_t k = a.row_begin(i); k < a.row_begin(i + 1); ++k) {
      const auto& x = a.entries()[k];
      for (std::size_t l = b.row_begin(x.col); l < b.row_begin(x.col + 1); ++l) {
        const auto& y = be[l];
        if (!touched[y.col]) {
          touched[y.col] = true;
          cols.push_back(y.col);
        }
        acc[y.col] += x.value * y.value;
      }
    }
    std::sort(cols.begin(), cols.end());
    for (std::size_t c : cols) {
      if (acc[c] != 0.0) out.push_back({i, c, acc[c]});
      acc[c] = 0.0;
      touched[c] = false;
    }
  }
  return LocalizedMatrix(a.rows_ptr(), b.cols_ptr(), std::move(out));
}

double Weight::operator()(std::span<const long> k) const {
  double s = 0.0;
  for (long v : k) s += double(v) * double(v);
  return std::pow(1.0 + std::sqrt(s), exponent);
}

double schur_norm(const LocalizedMatrix& a) {
  std::vector<double> col_sums(a.num_cols(), 0.0);
  double best = 0.0;
  for (std::size_t i = 0; i < a.num_rows(); ++i) {
    double row = 0.0;
    for (std::size_t k = a.row_begin(i); k < a.row_begin(i + 1); ++k) {
      const auto& e = a.entries()[k];
      row += std::abs(e.value);
      col_sums[e.col] += std::abs(e.value);
    }
    best = std::max(best, row);
  }
  for (double c : col_sums) best = std::max(best, c);
  return best;
}

namespace {

Offset cell_of_difference(std::span<const double> p, std::span<const double> q, double alpha) {
  Offset k(p.size());
  for (std::size_t c = 0; c < p.size(); ++c) k[c] = static_cast<long>(std::floor(p[c] - alpha * q[c]));
  return k;
}

}  // namespace

OffsetProfile offset_profile(const LocalizedMatrix& a) {
  require(a.rows().dim() == a.cols().dim(), "offset_profile: row/column dimensions differ");
  OffsetProfile profile;
  for (const auto& e : a.entries()) {
    auto k = cell_of_difference(a.rows().point(e.row), a.cols().point(e.col), 1.0);
    double& slot = profile[std::move(k)];
    slot = std::max(slot, std::abs(e.value));
  }
  return profile;
}

double profile_sum(const OffsetProfile& profile) {
  double s = 0.0;
  for (const auto& [k, v] : profile) s += v;
  return s;
}

double sjostrand_norm(const LocalizedMatrix& a) { return profile_sum(offset_profile(a)); }

double slant_norm(const LocalizedMatrix& a, double alpha, const Weight& w) {
  require(alpha > 0.0, "slant_norm: alpha must be positive");
  require(w.exponent >= 0.0, "slant_norm: weight exponent must be nonnegative");
  require(a.rows().is_integer_lattice() && a.cols().is_integer_lattice(),
          "slant_norm: rows and columns must be integer lattices");
  require(a.rows().dim() == a.cols().dim(), "slant_norm: dimension mismatch");
  OffsetProfile profile;
  for (const auto& e : a.entries()) {
    // cell of j′ − αj: columns minus α·rows
    auto k = cell_of_difference(a.cols().point(e.col), a.rows().point(e.row), alpha);
    double& slot = profile[std::move(k)];
    slot = std::max(slot, std::abs(e.value));
  }
  double s = 0.0;
  for (const auto& [k, v] : profile) s += w(k) * v;
  return s;
}

namespace {

double sup_distance(std::span<const double> p, std::span<const double> q) {
  double d = 0.0;
  for (std::size_t c = 0; c < p.size(); ++c) d = std::max(d, std::abs(p[c] - q[c]));
  return d;
}

}  // namespace

LocalizedMatrix truncate(const LocalizedMatrix& a, double s) {
  require(s >= 0.0, "truncate: s must be nonnegative");
  std::vector<Entry> e;
  for (const auto& x : a.entries()) {
    if (sup_distance(a.rows().point(x.row), a.cols().point(x.col)) < s) e.push_back(x);
  }
  return LocalizedMatrix(a.rows_ptr(), a.cols_ptr(), std::move(e));
}

std::vector<TailPoint> truncation_tail(const LocalizedMatrix& a, std::span<const double> s_values) {
  for (std::size_t i = 1; i < s_values.size(); ++i) {
    require(s_values[i] >= s_values[i - 1], "truncation_tail: s values must be ascending");
  }
  std::vector<TailPoint> out;
  out.reserve(s_values.size());
  for (double s : s_values) {
    require(s >= 0.0, "truncation_tail: s must be nonnegative");
    std::vector<Entry> rest;
    for (const auto& x : a.entries()) {
      if (sup_distance(a.rows().point(x.row), a.cols().point(x.col)) >= s) rest.push_back(x);
    }
    out.push_back({s, sjostrand_norm(LocalizedMatrix(a.rows_ptr(), a.cols_ptr(), std::move(rest)))});
  }
  return out;
}

ApplyResult apply(const LocalizedMatrix& a, std::span<const double> c, double p) {
  require(p >= 1.0, "apply: p must be in [1, ∞]");
  ApplyResult r;
  r.values = a.multiply(c);
  r.bound.norm_ac = lp_norm(r.values, p);
  const double inv_p = std::isinf(p) ? 0.0 : 1.0 / p;
  const double rr = double(separation_constant(a.rows()));
  const double rc = double(separation_constant(a.cols()));
  r.bound.bound_base = std::pow(rr, inv_p) * std::pow(rc, 1.0 - inv_p) * sjostrand_norm(a) * lp_norm(c, p);
  r.bound.ratio = r.bound.bound_base > 0.0 ? r.bound.norm_ac / r.bound.bound_base : 0.0;
  return r;
}

LocalizedMatrix commutator_with_cutoff(const LocalizedMatrix& a, const CutoffOperator& op) {
  require(*op.target() == a.rows() || *op.target() == a.cols(),
          "commutator_with_cutoff: cutoff target matches neither rows nor columns");
  const auto left = cutoff_weights(a.rows(), op.center(), op.scale());
  const auto right = cutoff_weights(a.cols(), op.center(), op.scale());
  const LocalizedMatrix an = truncate(a, op.scale());
  std::vector<Entry> e;
  e.reserve(an.nnz());
  for (const auto& x : an.entries()) {
    e.push_back({x.row, x.col, x.value * (right[x.col] - left[x.row])});
  }
  return LocalizedMatrix(an.rows_ptr(), an.cols_ptr(), std::move(e));
}

}  // namespace locop
