#pragma once

#include "lrbp/types.hpp"

namespace lrbp {

/// Eigendecomposition of a symmetric matrix, eigenpairs sorted by descending
/// |eigenvalue|. Eigenvector signs are fixed so that the largest-magnitude
/// entry of each column is positive.
struct SymEigResult {
  Vector eigenvalues;
  Matrix eigenvectors;  // orthonormal columns, Q Lambda Q^T reconstructs the input
};

/// Thin SVD with nonnegative singular values in descending order and the same
/// deterministic sign convention applied to the left singular vectors.
struct SvdResult {
  Matrix u;
  Vector singular_values;
  Matrix v;

  /// sqrt(sum of sigma_i^2 for i >= keep): Frobenius error of the best
  /// rank-`keep` approximation.
  double tail_energy(Index keep) const;
};

struct PcaResult {
  Matrix basis;  // c x m, orthonormal columns
  double retained_variance = 0.0;
};

SymEigResult sym_eig(const Matrix& w);
SvdResult svd(const Matrix& a);

/// Principal directions of `samples` (one sample per column), computed on
/// mean-centered columns. Always returns a full orthonormal c x m basis even
/// when the sample scatter is rank-deficient.
PcaResult pca(const Matrix& samples, Index m);

/// X X^T with exactly symmetric output.
Matrix symmetric_outer(const Matrix& x);

double relative_asymmetry(const Matrix& w);

}  // namespace lrbp
