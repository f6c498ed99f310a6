#include "locop/spectral.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <limits>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <functional>

#include "locop/errors.hpp"

namespace locop {

std::string to_string(SpectralRoute r) {
  switch (r) {
    case SpectralRoute::symmetric_eigen: return "symmetric_eigen";
    case SpectralRoute::dense_svd: return "dense_svd";
    case SpectralRoute::gram_eigen: return "gram_eigen";
    case SpectralRoute::lanczos: return "lanczos";
  }
  return "unknown";
}

bool is_symmetric(const LocalizedMatrix& a) {
  if (a.num_rows() != a.num_cols() || !(a.rows() == a.cols())) return false;
  for (const auto& e : a.entries()) {
    if (a.at(e.col, e.row) != e.value) return false;
  }
  return true;
}

namespace {

constexpr std::size_t kDenseSvdLimit = 800;

using SparseMat = Eigen::SparseMatrix<double>;

SparseMat to_sparse(const LocalizedMatrix& a) {
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(a.nnz());
  for (const auto& e : a.entries()) t.emplace_back(Eigen::Index(e.row), Eigen::Index(e.col), e.value);
  SparseMat m(Eigen::Index(a.num_rows()), Eigen::Index(a.num_cols()));
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

Eigen::VectorXd eigenvalues_symmetric(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw_numerical("symmetric eigensolve did not converge");
  return es.eigenvalues();
}

Eigen::VectorXd singular_values_dense(const Eigen::MatrixXd& m) {
  Eigen::BDCSVD<Eigen::MatrixXd> svd(m);
  if (svd.info() != Eigen::Success) throw_numerical("dense SVD did not converge");
  return svd.singularValues();
}

// Largest eigenvalue of a symmetric positive semidefinite operator by
// Lanczos with full reorthogonalisation.
double lanczos_largest(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& op, Eigen::Index n) {
  const Eigen::Index max_steps = std::min<Eigen::Index>(n, 300);
  Eigen::MatrixXd basis(n, max_steps + 1);
  Eigen::VectorXd alpha(max_steps), beta(max_steps);
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = 1.0 + 0.5 * std::sin(0.37 * double(i) + 0.1);
  v.normalize();
  basis.col(0) = v;
  double previous = 0.0;
  for (Eigen::Index k = 0; k < max_steps; ++k) {
    Eigen::VectorXd w = op(basis.col(k));
    alpha(k) = basis.col(k).dot(w);
    for (int pass = 0; pass < 2; ++pass) {
      w -= basis.leftCols(k + 1) * (basis.leftCols(k + 1).transpose() * w);
    }
    beta(k) = w.norm();
    Eigen::MatrixXd tri = Eigen::MatrixXd::Zero(k + 1, k + 1);
    for (Eigen::Index i = 0; i <= k; ++i) {
      tri(i, i) = alpha(i);
      if (i < k) tri(i, i + 1) = tri(i + 1, i) = beta(i);
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(tri);
    const Eigen::Index top = k;
    const double theta = es.eigenvalues()(top);
    const double residual = std::abs(beta(k) * es.eigenvectors()(k, top));
    if (residual <= 1e-13 * std::abs(theta) || beta(k) <= 1e-300 || k + 1 == n) return theta;
    if (k > 10 && std::abs(theta - previous) <= 1e-15 * std::abs(theta) && residual <= 1e-10 * std::abs(theta)) {
      return theta;
    }
    previous = theta;
    basis.col(k + 1) = w / beta(k);
  }
  throw_numerical("Lanczos iteration did not converge");
}

}  // namespace

SingularValue smallest_singular_value(const LocalizedMatrix& a) {
  const std::size_t m = a.num_rows(), n = a.num_cols();
  require(n > 0 && m > 0, "lower_constant: empty matrix");
  require(m >= n, "lower_constant: matrix must be square or tall");
  if (is_symmetric(a) && n <= kDenseLimit) {
    const Eigen::VectorXd ev = eigenvalues_symmetric(a.dense());
    return {ev.cwiseAbs().minCoeff(), SpectralRoute::symmetric_eigen};
  }
  if (m <= kDenseSvdLimit) {
    return {singular_values_dense(a.dense()).minCoeff(), SpectralRoute::dense_svd};
  }
  const SparseMat s = to_sparse(a);
  const SparseMat gram = SparseMat(s.transpose() * s);
  if (n <= kDenseLimit) {
    const Eigen::VectorXd ev = eigenvalues_symmetric(Eigen::MatrixXd(gram));
    return {std::sqrt(std::max(ev.minCoeff(), 0.0)), SpectralRoute::gram_eigen};
  }
  Eigen::SimplicialLDLT<SparseMat> ldlt(gram);
  if (ldlt.info() != Eigen::Success) throw_numerical("Gram factorisation failed (singular window?)");
  const double inv_top = lanczos_largest([&](const Eigen::VectorXd& x) { return Eigen::VectorXd(ldlt.solve(x)); },
                                         Eigen::Index(n));
  if (!(inv_top > 0.0)) throw_numerical("Lanczos on inverse Gram produced a nonpositive eigenvalue");
  return {1.0 / std::sqrt(inv_top), SpectralRoute::lanczos};
}

SingularValue largest_singular_value(const LocalizedMatrix& a) {
  const std::size_t m = a.num_rows(), n = a.num_cols();
  require(n > 0 && m > 0, "upper_constant: empty matrix");
  if (a.nnz() == 0) return {0.0, SpectralRoute::dense_svd};
  if (is_symmetric(a) && n <= kDenseLimit) {
    const Eigen::VectorXd ev = eigenvalues_symmetric(a.dense());
    return {ev.cwiseAbs().maxCoeff(), SpectralRoute::symmetric_eigen};
  }
  if (std::max(m, n) <= kDenseSvdLimit) {
    return {singular_values_dense(a.dense()).maxCoeff(), SpectralRoute::dense_svd};
  }
  const SparseMat s = to_sparse(a);
  const SparseMat gram = m >= n ? SparseMat(s.transpose() * s) : SparseMat(s * s.transpose());
  if (std::min(m, n) <= kDenseLimit) {
    const Eigen::VectorXd ev = eigenvalues_symmetric(Eigen::MatrixXd(gram));
    return {std::sqrt(std::max(ev.maxCoeff(), 0.0)), SpectralRoute::gram_eigen};
  }
  const double top = lanczos_largest([&](const Eigen::VectorXd& x) { return Eigen::VectorXd(gram * x); },
                                     gram.rows());
  return {std::sqrt(std::max(top, 0.0)), SpectralRoute::lanczos};
}

Eigen::MatrixXd dense_inverse(const LocalizedMatrix& a, double* condition) {
  require(a.num_rows() == a.num_cols() && a.num_rows() > 0, "dense_inverse: matrix must be square and nonempty");
  require(a.num_rows() <= kDenseLimit, "dense_inverse: window too large for dense inversion");
  const Eigen::MatrixXd m = a.dense();
  if (condition != nullptr) {
    const Eigen::VectorXd sv = singular_values_dense(m);
    *condition = sv.minCoeff() > 0.0 ? sv.maxCoeff() / sv.minCoeff() : std::numeric_limits<double>::infinity();
  }
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(m);
  const Eigen::VectorXd diag = lu.matrixLU().diagonal();
  if ((diag.array() == 0.0).any()) throw_numerical("dense_inverse: matrix is singular");
  return lu.inverse();
}

}  // namespace locop
