#include "lrbp/pooling.hpp"

#include <cmath>

#include "lrbp/linalg.hpp"

namespace lrbp {

PooledBilinear bilinear_pool(const FeatureMap& fm) {
  if (fm.locations() < 1) throw ArgumentError("cannot pool an empty feature map");
  if (!is_finite(fm.descriptors)) throw DataError("feature map has non-finite entries");
  PooledBilinear out;
  out.values = symmetric_outer(fm.descriptors);
  return out;
}

Vector vectorize(const Matrix& b) {
  const Index c = b.rows();
  Vector z(c * b.cols());
  for (Index i = 0; i < c; ++i)
    for (Index j = 0; j < b.cols(); ++j) z[i * b.cols() + j] = b(i, j);
  return z;
}

Vector vectorize(const PooledBilinear& b) { return vectorize(b.values); }

Matrix unvectorize(const Vector& z) {
  const auto c = static_cast<Index>(std::llround(std::sqrt(static_cast<double>(z.size()))));
  if (c * c != z.size()) throw DimensionError("vector length is not a perfect square");
  Matrix b(c, c);
  for (Index i = 0; i < c; ++i)
    for (Index j = 0; j < c; ++j) b(i, j) = z[i * c + j];
  return b;
}

Vector l2_normalize(const Vector& z) {
  constexpr double kEps = 1e-12;
  const double norm = z.norm();
  if (norm <= kEps) return z;
  return z / norm;
}

FeatureMap project_features(const FeatureMap& fm, const Matrix& projection) {
  if (projection.rows() != fm.channels())
    throw DimensionError("projection rows must match feature map channels");
  FeatureMap out;
  out.height = fm.height;
  out.width = fm.width;
  out.descriptors.noalias() = projection.transpose() * fm.descriptors;
  return out;
}

FeatureMap normalize_map(const FeatureMap& fm) {
  FeatureMap out = fm;
  out.descriptors = signed_sqrt(out.descriptors);
  return out;
}

Vector normalize_pooled(const PooledBilinear& b) {
  return l2_normalize(Vector(signed_sqrt(vectorize(b))));
}

}  // namespace lrbp
