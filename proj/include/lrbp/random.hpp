#pragma once

#include <random>

#include "lrbp/types.hpp"

namespace lrbp {

using Rng = std::mt19937_64;

inline Matrix gaussian_matrix(Index rows, Index cols, double stddev, Rng& rng) {
  std::normal_distribution<double> dist(0.0, stddev);
  Matrix out(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) out(i, j) = dist(rng);
  return out;
}

inline Matrix rademacher_matrix(Index rows, Index cols, Rng& rng) {
  std::bernoulli_distribution coin(0.5);
  Matrix out(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) out(i, j) = coin(rng) ? 1.0 : -1.0;
  return out;
}

/// Thin Q factor of a Gaussian draw: `cols` orthonormal columns in R^rows.
Matrix random_orthonormal(Index rows, Index cols, Rng& rng);

}  // namespace lrbp
