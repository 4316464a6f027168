#include "lrbp/linalg.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "lrbp/random.hpp"

namespace lrbp {

namespace {

// Flip column j of `vectors` (and `paired`, when given) so the entry with the
// largest magnitude is positive. First maximal index wins on ties.
void fix_column_signs(Matrix& vectors, Matrix* paired = nullptr) {
  for (Index j = 0; j < vectors.cols(); ++j) {
    Index at = 0;
    vectors.col(j).cwiseAbs().maxCoeff(&at);
    if (vectors(at, j) < 0.0) {
      vectors.col(j) = -vectors.col(j);
      if (paired) paired->col(j) = -paired->col(j);
    }
  }
}

}  // namespace

double relative_asymmetry(const Matrix& w) {
  if (w.rows() != w.cols()) throw DimensionError("asymmetry of a non-square matrix");
  const double denom = std::max(1.0, w.norm());
  return (w - w.transpose()).norm() / denom;
}

Matrix symmetric_outer(const Matrix& x) {
  Matrix out = Matrix::Zero(x.rows(), x.rows());
  out.selfadjointView<Eigen::Lower>().rankUpdate(x);
  out.triangularView<Eigen::StrictlyUpper>() = out.transpose();
  return out;
}

SymEigResult sym_eig(const Matrix& w) {
  if (w.rows() != w.cols()) throw DimensionError("sym_eig needs a square matrix");
  if (!is_finite(w)) throw DataError("sym_eig input has non-finite entries");

  // Input may carry numerical asymmetry up to the documented tolerance; the
  // decomposition always runs on the symmetric part.
  Matrix sym = 0.5 * (w + w.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> solver(sym);
  if (solver.info() != Eigen::Success) throw DataError("eigendecomposition did not converge");

  const Index n = w.rows();
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  const Vector& raw = solver.eigenvalues();
  std::stable_sort(order.begin(), order.end(),
                   [&](Index a, Index b) { return std::abs(raw[a]) > std::abs(raw[b]); });

  SymEigResult out;
  out.eigenvalues.resize(n);
  out.eigenvectors.resize(n, n);
  for (Index j = 0; j < n; ++j) {
    out.eigenvalues[j] = raw[order[static_cast<std::size_t>(j)]];
    out.eigenvectors.col(j) = solver.eigenvectors().col(order[static_cast<std::size_t>(j)]);
  }
  fix_column_signs(out.eigenvectors);
  return out;
}

double SvdResult::tail_energy(Index keep) const {
  double sum = 0.0;
  for (Index i = keep; i < singular_values.size(); ++i)
    sum += singular_values[i] * singular_values[i];
  return std::sqrt(sum);
}

SvdResult svd(const Matrix& a) {
  if (!is_finite(a)) throw DataError("svd input has non-finite entries");

  Eigen::BDCSVD<Matrix> solver(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  SvdResult out;
  out.u = solver.matrixU();
  out.singular_values = solver.singularValues();
  out.v = solver.matrixV();
  fix_column_signs(out.u, &out.v);
  return out;
}

PcaResult pca(const Matrix& samples, Index m) {
  if (samples.cols() < 1) throw ArgumentError("pca needs at least one sample");
  if (m < 1 || m > samples.rows()) throw DimensionError("pca component count out of range");
  if (!is_finite(samples)) throw DataError("pca input has non-finite entries");

  const Vector mean = samples.rowwise().mean();
  const Matrix centered = samples.colwise() - mean;
  // The scatter route keeps the decomposition at c x c no matter how many
  // samples are pooled, and yields a complete basis even at low rank.
  const SymEigResult eig = sym_eig(symmetric_outer(centered));

  PcaResult out;
  out.basis = eig.eigenvectors.leftCols(m);
  const Vector variances = eig.eigenvalues.cwiseMax(0.0);
  const double total = variances.sum();
  out.retained_variance = total > 0.0 ? variances.head(m).sum() / total : 1.0;
  return out;
}

Matrix random_orthonormal(Index rows, Index cols, Rng& rng) {
  if (cols > rows) throw DimensionError("cannot draw more orthonormal columns than rows");
  const Matrix g = gaussian_matrix(rows, cols, 1.0, rng);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ() * Matrix::Identity(rows, cols);
  return q;
}

}  // namespace lrbp
