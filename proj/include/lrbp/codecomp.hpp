#pragma once

#include <span>
#include <vector>

#include "lrbp/classifier.hpp"
#include "lrbp/types.hpp"

namespace lrbp {

/// Per-class factors living in the reduced m-dimensional space.
struct CompactClassifier {
  Matrix v_plus;   // m x p
  Matrix v_minus;  // m x q
  double bias = 0.0;

  Index rank() const { return v_plus.cols() + v_minus.cols(); }
};

/// Shared projection P (c x m) plus K compact classifiers. P has orthonormal
/// columns when produced by codecompose() or pca_init(); joint fine-tuning
/// treats it as a free parameter and does not restore orthonormality.
struct CoDecomposedModel {
  Matrix projection;  // c x m
  std::vector<CompactClassifier> classifiers;

  Index channels() const { return projection.rows(); }
  Index reduced_dim() const { return projection.cols(); }
  Index num_classes() const { return static_cast<Index>(classifiers.size()); }
};

struct ReconstructionError {
  double total = 0.0;
  Vector per_class;
};

struct CoDecompGradients {
  Matrix projection;
  std::vector<CompactClassifier> classifiers;
};

/// Factorize K stacked classifiers [U_1 ... U_K] into a shared orthonormal
/// P and per-class V_k = P^T U_k. The projection spans the top-m left
/// singular directions of the stack, which minimizes sum_k ||U_k - P V_k||^2.
CoDecomposedModel codecompose(std::span<const LowRankClassifier> classifiers, Index m);

/// Pool every local descriptor from the sample maps and return the top-m
/// principal directions; the recommended initialization for the projection.
Matrix pca_init(std::span<const FeatureMap> sample_maps, Index m);

ReconstructionError reconstruction_error(const CoDecomposedModel& model,
                                         std::span<const LowRankClassifier> originals);

/// Parameter reconstruction fidelity in dB: 10*log10(peak^2 / MSE) with peak
/// the largest-magnitude entry over all stacked originals. +infinity when the
/// reconstruction is exact.
double psnr(const CoDecomposedModel& model, std::span<const LowRankClassifier> originals);

/// Norm-difference score for class k computed from projected descriptors
/// P^T X, without pooling. Class indices are 0-based here; dataset labels
/// are 1-based, so class k scores label k+1.
double score_codecomposed(const CoDecomposedModel& model, const FeatureMap& fm, Index k);

/// (P^T X)(P^T X)^T: the reduced m x m pooled feature, shareable across all
/// K class scores for one image.
Matrix reduced_pool(const CoDecomposedModel& model, const FeatureMap& fm);

double score_from_reduced(const CoDecomposedModel& model, const Matrix& reduced, Index k);

/// All K scores for one image, via the reduced pooled feature.
Vector scores_codecomposed(const CoDecomposedModel& model, const FeatureMap& fm);

/// Factor regularizer of one compact classifier, applied in V-space.
double regularizer(const CompactClassifier& clf);

/// One-vs-rest objective: sum over classes of mean hinge, plus the factor
/// regularizer applied in V-space.
double codecomp_objective(const CoDecomposedModel& model, std::span<const LabeledExample> batch,
                          double lambda);

CoDecompGradients gradients_codecomposed(const CoDecomposedModel& model,
                                         std::span<const LabeledExample> batch, double lambda);

}  // namespace lrbp
