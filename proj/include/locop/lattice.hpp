#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <utility>
#include <vector>

namespace locop {

// Axis-aligned box, one closed interval [lo, hi] per coordinate.
struct Box {
  std::vector<std::pair<double, double>> bounds;

  std::size_t dim() const { return bounds.size(); }
  bool contains(std::span<const double> x) const;
  // Euclidean distance from x to the box (0 inside).
  double distance(std::span<const double> x) const;
};

// Finite window of a relatively-separated set Λ ⊂ ℝᵈ. Points are stored
// row-major in a flat buffer; immutable after construction.
class IndexSet {
 public:
  // Two points closer than this in every coordinate count as duplicates.
  static constexpr double kDistinctTolerance = 1e-12;

  IndexSet() = default;
  // Validates dimensions, window containment and distinctness.
  IndexSet(std::size_t dim, Box window, std::vector<double> coords);

  // {lo, lo+1, ..., hi} ⊂ ℤ, window [lo, hi].
  static IndexSet integer_range(long lo, long hi);
  // {lo, lo+step, ...} with count points, window [lo, lo+(count-1)·step].
  static IndexSet uniform_range(double lo, double step, std::size_t count);
  // Product of integer ranges [lo_i, hi_i], row-major order.
  static IndexSet integer_grid(const std::vector<std::pair<long, long>>& ranges);

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return dim_ == 0 ? 0 : coords_.size() / dim_; }
  bool empty() const { return size() == 0; }
  std::span<const double> point(std::size_t i) const {
    return {coords_.data() + i * dim_, dim_};
  }
  const std::vector<double>& coords() const { return coords_; }
  const Box& window() const { return window_; }

  // True when every coordinate of every point is an integer.
  bool is_integer_lattice() const;
  // Points inside `box`, in original order, with their original positions.
  std::pair<IndexSet, std::vector<std::size_t>> restrict_to(const Box& box) const;

  bool operator==(const IndexSet& other) const {
    return dim_ == other.dim_ && coords_ == other.coords_;
  }

 private:
  std::size_t dim_ = 1;
  Box window_;
  std::vector<double> coords_;
};

using IndexSetPtr = std::shared_ptr<const IndexSet>;

// R(Λ) = max_x #{λ : x ∈ λ + [0,1)ᵈ}, computed exactly by sweeping the
// lower-corner events of the shifted cubes. Empty set → 0.
long separation_constant(const IndexSet& s);

// ψ(x) = min(max(2 − ‖x‖∞, 0), 1).
double cutoff_psi(std::span<const double> x);

// Ψₙᴺ: diagonal weighting by ψ((λ − n)/N) on a fixed index set.
class CutoffOperator {
 public:
  CutoffOperator(std::vector<double> center, double scale, IndexSetPtr target);

  const std::vector<double>& center() const { return center_; }
  double scale() const { return scale_; }
  const IndexSetPtr& target() const { return target_; }
  const std::vector<double>& weights() const { return weights_; }

  // Entrywise product with the weights; throws on length mismatch.
  std::vector<double> apply(std::span<const double> c) const;

 private:
  std::vector<double> center_;
  double scale_;
  IndexSetPtr target_;
  std::vector<double> weights_;
};

// Weights of ψ((x − n)/N) evaluated on an arbitrary point set (no validation).
std::vector<double> cutoff_weights(const IndexSet& s, std::span<const double> center, double scale);

struct PartitionViolation {
  std::vector<double> x;
  double value;
};

struct PartitionReport {
  double min_value = 0.0;
  double max_value = 0.0;
  std::vector<PartitionViolation> violations;
  bool ok() const { return violations.empty(); }
};

// Checks 2ᵈ ≤ Σ_{n∈Nℤᵈ} ψ((x − n)/N)² ≤ 4ᵈ at each sample point
// (points given flat, row-major, dim coordinates each).
PartitionReport cutoff_partition_check(long scale, std::size_t dim, std::span<const double> samples);

}  // namespace locop
