#pragma once

#include <cmath>

#include "lrbp/types.hpp"

namespace lrbp {

/// Sum of per-location outer products x_i x_i^T; symmetric PSD.
PooledBilinear bilinear_pool(const FeatureMap& fm);

/// Row-major flattening of the pooled matrix into a c^2 vector.
Vector vectorize(const PooledBilinear& b);
Vector vectorize(const Matrix& b);

/// Inverse of vectorize: reshape a length-c^2 vector back to c x c.
Matrix unvectorize(const Vector& z);

/// Entrywise x -> sign(x) * sqrt(|x|).
template <typename Derived>
typename Derived::PlainObject signed_sqrt(const Eigen::MatrixBase<Derived>& t) {
  return t.derived().unaryExpr([](double x) { return x < 0.0 ? -std::sqrt(-x) : std::sqrt(x); });
}

/// Scale to unit Euclidean norm; vectors with norm <= 1e-12 pass through.
Vector l2_normalize(const Vector& z);

/// P^T X applied to every location; the 1x1 convolution that takes channel
/// count from c to m while leaving the spatial layout alone.
FeatureMap project_features(const FeatureMap& fm, const Matrix& projection);

/// Map-level normalization: signed sqrt on the raw descriptors, no l2 step.
FeatureMap normalize_map(const FeatureMap& fm);

/// Bilinear-feature normalization: signed sqrt then l2 on vec(B).
Vector normalize_pooled(const PooledBilinear& b);

}  // namespace lrbp
