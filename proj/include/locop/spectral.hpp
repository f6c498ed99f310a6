#pragma once

#include <string>

#include "locop/matalg.hpp"

namespace locop {

// Which solver produced a singular-value estimate.
enum class SpectralRoute { symmetric_eigen, dense_svd, gram_eigen, lanczos };

std::string to_string(SpectralRoute r);

struct SingularValue {
  double value;
  SpectralRoute route;
};

// Largest square/tall dimension handled by dense factorizations; above it the
// sparse Lanczos path is used.
inline constexpr std::size_t kDenseLimit = 3000;

// σ_min (requires rows ≥ cols) and σ_max of the window matrix.
SingularValue smallest_singular_value(const LocalizedMatrix& a);
SingularValue largest_singular_value(const LocalizedMatrix& a);

// True when the matrix is square over one index set and a(i,j) == a(j,i).
bool is_symmetric(const LocalizedMatrix& a);

// Dense inverse of a square window; throws NumericalError if singular to
// working precision. `condition` receives the 2-norm condition number when
// non-null (computed by SVD, so only for moderate sizes).
Eigen::MatrixXd dense_inverse(const LocalizedMatrix& a, double* condition = nullptr);

}  // namespace locop
