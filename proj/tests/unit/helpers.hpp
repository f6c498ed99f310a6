#pragma once

#include <memory>
#include <vector>

#include "locop/matalg.hpp"

namespace testing {

inline locop::IndexSetPtr range(long lo, long hi) {
  return std::make_shared<const locop::IndexSet>(locop::IndexSet::integer_range(lo, hi));
}

// a(i, j) = seq[i − j + center] on {0, …, n−1}.
inline locop::LocalizedMatrix toeplitz(const std::vector<double>& seq, long n) {
  const long c = long(seq.size()) / 2;
  std::vector<locop::Entry> e;
  for (long i = 0; i < n; ++i) {
    for (long j = 0; j < n; ++j) {
      const long k = i - j + c;
      if (k >= 0 && k < long(seq.size()) && seq[std::size_t(k)] != 0.0) e.push_back({std::size_t(i), std::size_t(j), seq[std::size_t(k)]});
    }
  }
  auto s = range(0, n - 1);
  return locop::LocalizedMatrix(s, s, std::move(e));
}

}  // namespace testing
