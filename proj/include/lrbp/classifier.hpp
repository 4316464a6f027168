#pragma once

#include <span>
#include <vector>

#include "lrbp/types.hpp"

namespace lrbp {

/// Trace-form bilinear classifier: score = tr(W^T B) + bias on a pooled
/// feature B. Equivalent to a linear classifier on vec(B).
struct FullBilinearClassifier {
  Matrix w;  // c x c
  double bias = 0.0;
};

/// Rank-constrained classifier W = U+ U+^T - U- U-^T. Freshly trained models
/// use the even r/2 + r/2 column split; spectral truncation may produce an
/// unequal split when the kept eigenvalue signs are unbalanced.
struct LowRankClassifier {
  Matrix u_plus;   // c x p
  Matrix u_minus;  // c x q
  double bias = 0.0;

  Index channels() const { return u_plus.rows(); }
  Index rank() const { return u_plus.cols() + u_minus.cols(); }
};

/// Binary training example with label +1 / -1.
struct MarginExample {
  FeatureMap features;
  int label = 1;
};

struct LowRankGradients {
  Matrix u_plus;
  Matrix u_minus;
  double bias = 0.0;
};

/// Per-rank-index statistics of the eigenvalue spectra of a classifier set.
struct SpectrumStats {
  Vector mean;
  Vector stddev;  // population standard deviation across classifiers
};

/// One-vs-rest classifier sets, one entry per class.
struct FullModel {
  std::vector<FullBilinearClassifier> classifiers;

  Index num_classes() const { return static_cast<Index>(classifiers.size()); }
};

struct LowRankModel {
  std::vector<LowRankClassifier> classifiers;

  Index num_classes() const { return static_cast<Index>(classifiers.size()); }
};

/// ||U+^T X||_F^2 - ||U-^T X||_F^2 + bias, evaluated without ever forming
/// X X^T. This is the norm-difference scoring path.
double score_frobenius(const LowRankClassifier& clf, const FeatureMap& fm);

/// tr(U+^T B U+) - tr(U-^T B U-) + bias on an explicitly pooled feature.
double score_via_pooled(const LowRankClassifier& clf, const PooledBilinear& pooled);

double score_full(const FullBilinearClassifier& clf, const PooledBilinear& pooled);

double hinge(const LowRankClassifier& clf, const MarginExample& example);

/// ||U+ U+^T||_F^2 + ||U- U-^T||_F^2 + ||U+^T U-||_F^2. The positive
/// cross-term penalizes overlap between the two factor subspaces.
double regularizer(const LowRankClassifier& clf);

/// Mean hinge over the batch plus (lambda/2) * regularizer.
double objective(const LowRankClassifier& clf, std::span<const MarginExample> batch,
                 double lambda);

/// Exact gradients of objective(). Data terms are accumulated as
/// X (X^T U) so the c x c pooled matrix is never materialized.
LowRankGradients gradients(const LowRankClassifier& clf, std::span<const MarginExample> batch,
                           double lambda);

/// Spectral truncation: keep the r eigenpairs of largest magnitude, routing
/// positive eigenvalues into U+ = psi*sqrt(lambda) and negative ones into U-.
LowRankClassifier truncate_to_lowrank(const FullBilinearClassifier& full, Index r);

/// U+ U+^T - U- U-^T as an explicit matrix.
Matrix implied_w(const LowRankClassifier& clf);

FullBilinearClassifier to_full(const LowRankClassifier& clf);

/// Mean and standard deviation, per rank index, of the descending-sorted
/// eigenvalues across a set of classifiers sharing one dimension.
SpectrumStats spectrum(std::span<const FullBilinearClassifier> classifiers);

}  // namespace lrbp
