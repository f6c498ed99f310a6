#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <map>
#include <span>
#include <vector>

#include "locop/lattice.hpp"

namespace locop {

struct Entry {
  std::size_t row;
  std::size_t col;
  double value;
};

// Integer cell index k ∈ ℤᵈ of the unit cube k + [0,1)ᵈ.
using Offset = std::vector<long>;

// k ↦ sup |a(λ,λ′)| over pairs with λ − λ′ ∈ k + [0,1)ᵈ. Ordered
// lexicographically, which fixes the summation order of every norm.
using OffsetProfile = std::map<Offset, double>;

// Sparse matrix indexed by two finite index sets. Entries are stored in
// row-major CSR order; |value| < 1e-300 is dropped on construction.
class LocalizedMatrix {
 public:
  static constexpr double kDropBelow = 1e-300;

  LocalizedMatrix(IndexSetPtr rows, IndexSetPtr cols, std::vector<Entry> entries);

  static LocalizedMatrix identity(IndexSetPtr set);
  static LocalizedMatrix zero(IndexSetPtr rows, IndexSetPtr cols);
  // Dense import, keeping nonzeros.
  static LocalizedMatrix from_dense(IndexSetPtr rows, IndexSetPtr cols, const Eigen::MatrixXd& m);

  const IndexSet& rows() const { return *rows_; }
  const IndexSet& cols() const { return *cols_; }
  const IndexSetPtr& rows_ptr() const { return rows_; }
  const IndexSetPtr& cols_ptr() const { return cols_; }
  std::size_t num_rows() const { return rows_->size(); }
  std::size_t num_cols() const { return cols_->size(); }
  std::size_t nnz() const { return entries_.size(); }

  // Entries in row-major order; row_begin(i)..row_begin(i+1) is row i.
  const std::vector<Entry>& entries() const { return entries_; }
  std::size_t row_begin(std::size_t i) const { return row_ptr_[i]; }
  double at(std::size_t row, std::size_t col) const;

  // y = A c, exact sparse product.
  std::vector<double> multiply(std::span<const double> c) const;
  // y = Aᵀ c.
  std::vector<double> multiply_transpose(std::span<const double> c) const;

  LocalizedMatrix transpose() const;
  LocalizedMatrix scaled(double t) const;
  // A + t·I (square with identical row/column sets).
  LocalizedMatrix plus_identity(double t = 1.0) const;
  Eigen::MatrixXd dense() const;

  // Simultaneous relabelling: row i of the result is row row_perm[i] of A,
  // column j is column col_perm[j]; the index sets are permuted alongside.
  LocalizedMatrix permuted(const std::vector<std::size_t>& row_perm,
                           const std::vector<std::size_t>& col_perm) const;
  // Sub-matrix on the rows and columns whose points lie in the given boxes.
  LocalizedMatrix restrict_to(const Box& row_box, const Box& col_box) const;
  // Keeps only the listed columns (in the given order).
  LocalizedMatrix select_columns(const std::vector<std::size_t>& cols) const;

  // Largest ‖λ − λ′‖∞ over stored entries (0 for an empty matrix).
  double bandwidth() const;

 private:
  IndexSetPtr rows_;
  IndexSetPtr cols_;
  std::vector<Entry> entries_;
  std::vector<std::size_t> row_ptr_;
};

LocalizedMatrix multiply(const LocalizedMatrix& a, const LocalizedMatrix& b);

// Polynomial weight w(x) = (1 + |x|)ˢ, |·| Euclidean.
struct Weight {
  double exponent = 0.0;
  double operator()(std::span<const long> k) const;
};

// max(max row abs sum, max column abs sum).
double schur_norm(const LocalizedMatrix& a);
OffsetProfile offset_profile(const LocalizedMatrix& a);
// Σ_k profile[k], summed in lexicographic order of k.
double profile_sum(const OffsetProfile& profile);
double sjostrand_norm(const LocalizedMatrix& a);
// Σ_k w(k) sup |a(j,j′)| over j′ − αj ∈ k + [0,1)ᵈ; both index sets must be
// integer lattices.
double slant_norm(const LocalizedMatrix& a, double alpha, const Weight& w);

// Keeps entries with ‖λ − λ′‖∞ < s (s may be +∞).
LocalizedMatrix truncate(const LocalizedMatrix& a, double s);

struct TailPoint {
  double s;
  double tail;  // ‖A − A_s‖_𝒞
};
// Requires ascending s_values.
std::vector<TailPoint> truncation_tail(const LocalizedMatrix& a, std::span<const double> s_values);

struct BoundCheck {
  double norm_ac;     // ‖Ac‖_p
  double bound_base;  // R(Λ)^{1/p} R(Λ′)^{1−1/p} ‖A‖_𝒞 ‖c‖_p
  double ratio;       // norm_ac / bound_base (0 when the base vanishes)
};

struct ApplyResult {
  std::vector<double> values;
  BoundCheck bound;
};

ApplyResult apply(const LocalizedMatrix& a, std::span<const double> c, double p);

// A_N Ψₙᴺ − Ψₙᴺ A_N with A_N = truncate(A, N); Ψ uses op's center and scale
// and is evaluated on the column set (right factor) and row set (left factor).
// op.target must equal the row or the column set of A.
LocalizedMatrix commutator_with_cutoff(const LocalizedMatrix& a, const CutoffOperator& op);

}  // namespace locop
