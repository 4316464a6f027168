#include "lrbp/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "lrbp/linalg.hpp"

namespace lrbp {

namespace {

double trace_quadratic(const Matrix& factor, const Matrix& pooled) {
  if (factor.cols() == 0) return 0.0;
  return factor.cwiseProduct(pooled * factor).sum();  // tr(U^T B U)
}

double projected_energy(const Matrix& factor, const Matrix& descriptors) {
  if (factor.cols() == 0) return 0.0;
  return (factor.transpose() * descriptors).squaredNorm();
}

}  // namespace

double score_frobenius(const LowRankClassifier& clf, const FeatureMap& fm) {
  if (fm.channels() != clf.channels())
    throw DimensionError("classifier and feature map disagree on channel count");
  return projected_energy(clf.u_plus, fm.descriptors) -
         projected_energy(clf.u_minus, fm.descriptors) + clf.bias;
}

double score_via_pooled(const LowRankClassifier& clf, const PooledBilinear& pooled) {
  if (pooled.dim() != clf.channels())
    throw DimensionError("classifier and pooled feature disagree on dimension");
  return trace_quadratic(clf.u_plus, pooled.values) -
         trace_quadratic(clf.u_minus, pooled.values) + clf.bias;
}

double score_full(const FullBilinearClassifier& clf, const PooledBilinear& pooled) {
  if (pooled.dim() != clf.w.rows() || clf.w.rows() != clf.w.cols())
    throw DimensionError("classifier and pooled feature disagree on dimension");
  return clf.w.cwiseProduct(pooled.values).sum() + clf.bias;
}

double hinge(const LowRankClassifier& clf, const MarginExample& example) {
  const double s = score_frobenius(clf, example.features);
  return std::max(0.0, 1.0 - example.label * s);
}

double regularizer(const LowRankClassifier& clf) {
  // ||U U^T||_F^2 == ||U^T U||_F^2, so everything stays at rank-sized Grams.
  const Matrix gram_pp = clf.u_plus.transpose() * clf.u_plus;
  const Matrix gram_mm = clf.u_minus.transpose() * clf.u_minus;
  const Matrix cross = clf.u_plus.transpose() * clf.u_minus;
  return gram_pp.squaredNorm() + gram_mm.squaredNorm() + cross.squaredNorm();
}

double objective(const LowRankClassifier& clf, std::span<const MarginExample> batch,
                 double lambda) {
  if (batch.empty()) throw ArgumentError("objective over an empty batch");
  double loss = 0.0;
  for (const MarginExample& example : batch) loss += hinge(clf, example);
  return loss / static_cast<double>(batch.size()) + 0.5 * lambda * regularizer(clf);
}

LowRankGradients gradients(const LowRankClassifier& clf, std::span<const MarginExample> batch,
                           double lambda) {
  if (batch.empty()) throw ArgumentError("gradients over an empty batch");

  LowRankGradients g;
  // d/dU of (lambda/2) * regularizer: the squared-Gram terms contribute
  // 2*lambda*U(U^T U), the cross-term lambda * (other)(other^T U).
  g.u_plus = 2.0 * lambda * (clf.u_plus * (clf.u_plus.transpose() * clf.u_plus)) +
             lambda * (clf.u_minus * (clf.u_minus.transpose() * clf.u_plus));
  g.u_minus = 2.0 * lambda * (clf.u_minus * (clf.u_minus.transpose() * clf.u_minus)) +
              lambda * (clf.u_plus * (clf.u_plus.transpose() * clf.u_minus));
  g.bias = 0.0;

  const double inv_n = 1.0 / static_cast<double>(batch.size());
  for (const MarginExample& example : batch) {
    const double margin = 1.0 - example.label * score_frobenius(clf, example.features);
    if (margin <= 0.0) continue;  // inactive hinge: zero subgradient branch
    const double y = static_cast<double>(example.label);
    const Matrix& x = example.features.descriptors;
    // d/dU+ of -y * ||U+^T X||^2 is -2y X (X^T U+); the score is quadratic
    // in each factor, hence the 2.
    if (clf.u_plus.cols() > 0)
      g.u_plus.noalias() -= (2.0 * y * inv_n) * (x * (x.transpose() * clf.u_plus));
    if (clf.u_minus.cols() > 0)
      g.u_minus.noalias() += (2.0 * y * inv_n) * (x * (x.transpose() * clf.u_minus));
    g.bias -= y * inv_n;
  }
  return g;
}

LowRankClassifier truncate_to_lowrank(const FullBilinearClassifier& full, Index r) {
  const Index c = full.w.rows();
  if (r < 1 || r > c) throw DimensionError("truncation rank out of range");

  const SymEigResult eig = sym_eig(full.w);  // already ordered by |lambda|
  std::vector<Index> plus;
  std::vector<Index> minus;
  for (Index i = 0; i < r; ++i) {
    (eig.eigenvalues[i] >= 0.0 ? plus : minus).push_back(i);
  }

  LowRankClassifier clf;
  clf.bias = full.bias;
  clf.u_plus.resize(c, static_cast<Index>(plus.size()));
  clf.u_minus.resize(c, static_cast<Index>(minus.size()));
  for (std::size_t j = 0; j < plus.size(); ++j)
    clf.u_plus.col(static_cast<Index>(j)) =
        eig.eigenvectors.col(plus[j]) * std::sqrt(eig.eigenvalues[plus[j]]);
  for (std::size_t j = 0; j < minus.size(); ++j)
    clf.u_minus.col(static_cast<Index>(j)) =
        eig.eigenvectors.col(minus[j]) * std::sqrt(-eig.eigenvalues[minus[j]]);
  return clf;
}

Matrix implied_w(const LowRankClassifier& clf) {
  const Index c = clf.channels();
  Matrix w = Matrix::Zero(c, c);
  if (clf.u_plus.cols() > 0) w = symmetric_outer(clf.u_plus);
  if (clf.u_minus.cols() > 0) w -= symmetric_outer(clf.u_minus);
  return w;
}

FullBilinearClassifier to_full(const LowRankClassifier& clf) {
  return FullBilinearClassifier{implied_w(clf), clf.bias};
}

SpectrumStats spectrum(std::span<const FullBilinearClassifier> classifiers) {
  if (classifiers.empty()) throw ArgumentError("spectrum of an empty classifier set");
  const Index c = classifiers.front().w.rows();

  Matrix all(c, static_cast<Index>(classifiers.size()));
  for (std::size_t k = 0; k < classifiers.size(); ++k) {
    if (classifiers[k].w.rows() != c || classifiers[k].w.cols() != c)
      throw DimensionError("spectrum needs classifiers of one shared dimension");
    Vector ev = sym_eig(classifiers[k].w).eigenvalues;
    std::sort(ev.begin(), ev.end(), std::greater<double>());
    all.col(static_cast<Index>(k)) = ev;
  }

  SpectrumStats stats;
  stats.mean = all.rowwise().mean();
  stats.stddev.resize(c);
  const double k_count = static_cast<double>(classifiers.size());
  for (Index i = 0; i < c; ++i) {
    const double centered = (all.row(i).array() - stats.mean[i]).square().sum();
    stats.stddev[i] = std::sqrt(centered / k_count);
  }
  return stats;
}

}  // namespace lrbp
