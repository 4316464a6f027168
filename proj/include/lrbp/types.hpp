#pragma once

#include <Eigen/Core>
#include <utility>

#include "lrbp/errors.hpp"

namespace lrbp {

/// Dense column-major matrix of a given scalar. All numerics in this library
/// run in double precision; float shows up only at the storage boundary.
template <typename Scalar>
using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using Matrix = Mat<double>;
using Vector = Vec<double>;
using Index = Eigen::Index;

template <typename Derived>
bool is_finite(const Eigen::MatrixBase<Derived>& x) {
  return x.array().isFinite().all();
}

/// Grid of local descriptors: column i of `descriptors` is the c-dimensional
/// feature at spatial position i, indexed row-major over (height, width).
struct FeatureMap {
  Index height = 0;
  Index width = 0;
  Matrix descriptors;  // c x (height*width)

  Index channels() const { return descriptors.rows(); }
  Index locations() const { return descriptors.cols(); }
};

inline FeatureMap make_feature_map(Index height, Index width, Matrix descriptors) {
  if (height < 1 || width < 1) throw ArgumentError("feature map needs height, width >= 1");
  if (descriptors.cols() != height * width)
    throw DimensionError("descriptor count does not match height*width");
  if (descriptors.rows() < 1) throw DimensionError("feature map needs at least one channel");
  if (!is_finite(descriptors)) throw DataError("feature map has non-finite entries");
  return FeatureMap{height, width, std::move(descriptors)};
}

/// Second-order statistic X X^T of a feature map, with flags recording which
/// normalizations have been applied to it.
struct PooledBilinear {
  Matrix values;  // c x c, symmetric
  bool signed_sqrt_applied = false;
  bool l2_normalized = false;

  Index dim() const { return values.rows(); }
};

/// A feature map paired with a class label in [1, K].
struct LabeledExample {
  FeatureMap features;
  int label = 1;
};

}  // namespace lrbp
