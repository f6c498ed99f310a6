#include "locop/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "locop/errors.hpp"

namespace locop {

bool Box::contains(std::span<const double> x) const {
  if (x.size() != bounds.size()) return false;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] < bounds[i].first || x[i] > bounds[i].second) return false;
  }
  return true;
}

double Box::distance(std::span<const double> x) const {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double gap = 0.0;
    if (x[i] < bounds[i].first) gap = bounds[i].first - x[i];
    else if (x[i] > bounds[i].second) gap = x[i] - bounds[i].second;
    s += gap * gap;
  }
  return std::sqrt(s);
}

IndexSet::IndexSet(std::size_t dim, Box window, std::vector<double> coords)
    : dim_(dim), window_(std::move(window)), coords_(std::move(coords)) {
  require(dim_ > 0, "IndexSet: dimension must be positive");
  require(window_.dim() == dim_, "IndexSet: window dimension " + std::to_string(window_.dim()) +
                                     " does not match dim " + std::to_string(dim_));
  require(coords_.size() % dim_ == 0, "IndexSet: coordinate buffer not a multiple of dim");
  for (const auto& [lo, hi] : window_.bounds) {
    require(std::isfinite(lo) && std::isfinite(hi) && lo <= hi, "IndexSet: invalid window bounds");
  }
  const std::size_t n = size();
  for (std::size_t i = 0; i < n; ++i) {
    for (double v : point(i)) require(std::isfinite(v), "IndexSet: non-finite coordinate");
    require(window_.contains(point(i)),
            "IndexSet: point " + std::to_string(i) + " lies outside the window");
  }
  // Sort by first coordinate; duplicates must then sit in runs whose first
  // coordinates agree within tolerance.
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return point(a)[0] < point(b)[0]; });
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      const auto pa = point(order[a]);
      const auto pb = point(order[b]);
      if (pb[0] - pa[0] > kDistinctTolerance) break;
      bool same = true;
      for (std::size_t c = 0; c < dim_ && same; ++c) {
        same = std::abs(pa[c] - pb[c]) <= kDistinctTolerance;
      }
      require(!same, "IndexSet: points " + std::to_string(order[a]) + " and " +
                         std::to_string(order[b]) + " are not distinct");
    }
  }
}

IndexSet IndexSet::integer_range(long lo, long hi) {
  require(lo <= hi, "integer_range: lo > hi");
  std::vector<double> coords;
  coords.reserve(static_cast<std::size_t>(hi - lo + 1));
  for (long k = lo; k <= hi; ++k) coords.push_back(static_cast<double>(k));
  return IndexSet(1, Box{{{double(lo), double(hi)}}}, std::move(coords));
}

IndexSet IndexSet::uniform_range(double lo, double step, std::size_t count) {
  require(step > 0.0 && count > 0, "uniform_range: need step > 0 and count > 0");
  std::vector<double> coords(count);
  for (std::size_t k = 0; k < count; ++k) coords[k] = lo + static_cast<double>(k) * step;
  const double hi = coords.back();
  return IndexSet(1, Box{{{lo, hi}}}, std::move(coords));
}

IndexSet IndexSet::integer_grid(const std::vector<std::pair<long, long>>& ranges) {
  require(!ranges.empty(), "integer_grid: no ranges");
  Box window;
  std::size_t total = 1;
  for (const auto& [lo, hi] : ranges) {
    require(lo <= hi, "integer_grid: lo > hi");
    window.bounds.emplace_back(double(lo), double(hi));
    total *= static_cast<std::size_t>(hi - lo + 1);
  }
  const std::size_t d = ranges.size();
  std::vector<double> coords;
  coords.reserve(total * d);
  std::vector<long> cur(d);
  for (std::size_t c = 0; c < d; ++c) cur[c] = ranges[c].first;
  for (std::size_t i = 0; i < total; ++i) {
    for (std::size_t c = 0; c < d; ++c) coords.push_back(double(cur[c]));
    for (std::size_t c = d; c-- > 0;) {
      if (++cur[c] <= ranges[c].second) break;
      cur[c] = ranges[c].first;
    }
  }
  return IndexSet(d, std::move(window), std::move(coords));
}

bool IndexSet::is_integer_lattice() const {
  return std::all_of(coords_.begin(), coords_.end(),
                     [](double v) { return v == std::floor(v); });
}

std::pair<IndexSet, std::vector<std::size_t>> IndexSet::restrict_to(const Box& box) const {
  require(box.dim() == dim_, "restrict_to: box dimension mismatch");
  Box clipped;
  for (std::size_t c = 0; c < dim_; ++c) {
    const double lo = std::max(box.bounds[c].first, window_.bounds[c].first);
    const double hi = std::min(box.bounds[c].second, window_.bounds[c].second);
    require(lo <= hi, "restrict_to: box does not meet the window");
    clipped.bounds.emplace_back(lo, hi);
  }
  std::vector<double> coords;
  std::vector<std::size_t> positions;
  for (std::size_t i = 0; i < size(); ++i) {
    if (clipped.contains(point(i))) {
      coords.insert(coords.end(), point(i).begin(), point(i).end());
      positions.push_back(i);
    }
  }
  return {IndexSet(dim_, std::move(clipped), std::move(coords)), std::move(positions)};
}

namespace {

// Max number of points whose unit cubes cover a common x, restricted to the
// members of `subset` and coordinates c.. (earlier coordinates already fixed).
long max_cover(const IndexSet& s, std::vector<std::size_t> subset, std::size_t c, long best_so_far) {
  const std::size_t d = s.dim();
  std::sort(subset.begin(), subset.end(),
            [&](std::size_t a, std::size_t b) { return s.point(a)[c] < s.point(b)[c]; });
  long best = 0;
  std::size_t lo = 0;
  for (std::size_t hi = 0; hi < subset.size(); ++hi) {
    const double x = s.point(subset[hi])[c];
    // λ_c ≤ x < λ_c + 1
    while (s.point(subset[lo])[c] + 1.0 <= x) ++lo;
    // later members with the same coordinate also satisfy λ_c ≤ x
    std::size_t end = hi + 1;
    while (end < subset.size() && s.point(subset[end])[c] == x) ++end;
    const long width = static_cast<long>(end - lo);
    if (c + 1 == d) {
      best = std::max(best, width);
    } else if (width > std::max(best, best_so_far)) {
      std::vector<std::size_t> slab(subset.begin() + static_cast<long>(lo),
                                    subset.begin() + static_cast<long>(end));
      best = std::max(best, max_cover(s, std::move(slab), c + 1, std::max(best, best_so_far)));
    }
  }
  return best;
}

}  // namespace

long separation_constant(const IndexSet& s) {
  if (s.empty()) return 0;
  std::vector<std::size_t> all(s.size());
  std::iota(all.begin(), all.end(), 0);
  return max_cover(s, std::move(all), 0, 0);
}

double cutoff_psi(std::span<const double> x) {
  double norm = 0.0;
  for (double v : x) norm = std::max(norm, std::abs(v));
  return std::min(std::max(2.0 - norm, 0.0), 1.0);
}

std::vector<double> cutoff_weights(const IndexSet& s, std::span<const double> center, double scale) {
  require(center.size() == s.dim(), "cutoff: center dimension mismatch");
  require(scale > 0.0, "cutoff: scale must be positive");
  std::vector<double> w(s.size());
  std::vector<double> u(s.dim());
  for (std::size_t i = 0; i < s.size(); ++i) {
    const auto p = s.point(i);
    for (std::size_t c = 0; c < s.dim(); ++c) u[c] = (p[c] - center[c]) / scale;
    w[i] = cutoff_psi(u);
  }
  return w;
}

CutoffOperator::CutoffOperator(std::vector<double> center, double scale, IndexSetPtr target)
    : center_(std::move(center)), scale_(scale), target_(std::move(target)) {
  require(target_ != nullptr, "CutoffOperator: null target");
  require(scale_ >= 1.0 && scale_ == std::floor(scale_), "CutoffOperator: scale N must be a positive integer");
  for (double v : center_) {
    require(std::fmod(v, scale_) == 0.0, "CutoffOperator: center must lie in N·ℤᵈ");
  }
  weights_ = cutoff_weights(*target_, center_, scale_);
}

std::vector<double> CutoffOperator::apply(std::span<const double> c) const {
  require(c.size() == weights_.size(), "apply_cutoff: sequence length " + std::to_string(c.size()) +
                                           " does not match index set size " +
                                           std::to_string(weights_.size()));
  std::vector<double> out(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) out[i] = weights_[i] * c[i];
  return out;
}

PartitionReport cutoff_partition_check(long scale, std::size_t dim, std::span<const double> samples) {
  require(scale >= 1, "cutoff_partition_check: N must be positive");
  require(dim > 0 && samples.size() % dim == 0, "cutoff_partition_check: bad sample buffer");
  const double lower = std::pow(2.0, double(dim));
  const double upper = std::pow(4.0, double(dim));
  const double N = double(scale);
  PartitionReport report;
  report.min_value = std::numeric_limits<double>::infinity();
  report.max_value = -std::numeric_limits<double>::infinity();
  std::vector<long> lo(dim), cur(dim);
  std::vector<double> u(dim);
  for (std::size_t s = 0; s < samples.size() / dim; ++s) {
    const auto x = samples.subspan(s * dim, dim);
    // ψ((x − n)/N) vanishes unless ‖x − n‖∞ < 2N, so n/N ranges over a
    // window of at most 5 integers per axis.
    for (std::size_t c = 0; c < dim; ++c) {
      lo[c] = static_cast<long>(std::floor(x[c] / N)) - 2;
      cur[c] = lo[c];
    }
    double total = 0.0;
    while (true) {
      for (std::size_t c = 0; c < dim; ++c) u[c] = (x[c] - N * double(cur[c])) / N;
      const double w = cutoff_psi(u);
      total += w * w;
      std::size_t c = dim;
      while (c-- > 0) {
        if (++cur[c] <= lo[c] + 4) break;
        cur[c] = lo[c];
      }
      if (c == static_cast<std::size_t>(-1)) break;
    }
    report.min_value = std::min(report.min_value, total);
    report.max_value = std::max(report.max_value, total);
    if (total < lower || total > upper) {
      report.violations.push_back({std::vector<double>(x.begin(), x.end()), total});
    }
  }
  return report;
}

}  // namespace locop
