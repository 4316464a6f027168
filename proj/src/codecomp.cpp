#include "lrbp/codecomp.hpp"

#include <cmath>
#include <limits>

#include "lrbp/linalg.hpp"

namespace lrbp {

namespace {

void check_class_index(const CoDecomposedModel& model, Index k) {
  if (k < 0 || k >= model.num_classes()) throw ArgumentError("class index out of range");
}

}  // namespace

double regularizer(const CompactClassifier& clf) {
  const Matrix gram_pp = clf.v_plus.transpose() * clf.v_plus;
  const Matrix gram_mm = clf.v_minus.transpose() * clf.v_minus;
  const Matrix cross = clf.v_plus.transpose() * clf.v_minus;
  return gram_pp.squaredNorm() + gram_mm.squaredNorm() + cross.squaredNorm();
}

CoDecomposedModel codecompose(std::span<const LowRankClassifier> classifiers, Index m) {
  if (classifiers.empty()) throw ArgumentError("codecompose needs at least one classifier");
  const Index c = classifiers.front().channels();
  const Index r = classifiers.front().rank();
  if (m < 1 || m > c) throw DimensionError("reduced dimension out of range");

  Matrix stack(c, r * static_cast<Index>(classifiers.size()));
  Index col = 0;
  for (const LowRankClassifier& clf : classifiers) {
    if (clf.channels() != c || clf.rank() != r)
      throw DimensionError("codecompose needs classifiers sharing c and r");
    stack.middleCols(col, clf.u_plus.cols()) = clf.u_plus;
    col += clf.u_plus.cols();
    stack.middleCols(col, clf.u_minus.cols()) = clf.u_minus;
    col += clf.u_minus.cols();
  }

  // Top-m left singular directions of the stack, through the c x c Gram so a
  // complete orthonormal basis exists even when the stack is rank-deficient.
  const SymEigResult eig = sym_eig(symmetric_outer(stack));

  CoDecomposedModel model;
  model.projection = eig.eigenvectors.leftCols(m);
  model.classifiers.reserve(classifiers.size());
  for (const LowRankClassifier& clf : classifiers) {
    CompactClassifier compact;
    compact.v_plus.noalias() = model.projection.transpose() * clf.u_plus;
    compact.v_minus.noalias() = model.projection.transpose() * clf.u_minus;
    compact.bias = clf.bias;
    model.classifiers.push_back(std::move(compact));
  }
  return model;
}

Matrix pca_init(std::span<const FeatureMap> sample_maps, Index m) {
  if (sample_maps.empty()) throw ArgumentError("pca_init needs at least one feature map");
  const Index c = sample_maps.front().channels();
  Index total = 0;
  for (const FeatureMap& fm : sample_maps) {
    if (fm.channels() != c) throw DimensionError("pca_init needs maps sharing channel count");
    total += fm.locations();
  }

  Matrix pooled(c, total);
  Index col = 0;
  for (const FeatureMap& fm : sample_maps) {
    pooled.middleCols(col, fm.locations()) = fm.descriptors;
    col += fm.locations();
  }
  return pca(pooled, m).basis;
}

ReconstructionError reconstruction_error(const CoDecomposedModel& model,
                                         std::span<const LowRankClassifier> originals) {
  if (static_cast<Index>(originals.size()) != model.num_classes())
    throw DimensionError("model and originals disagree on class count");

  ReconstructionError err;
  err.per_class.resize(model.num_classes());
  for (Index k = 0; k < model.num_classes(); ++k) {
    const LowRankClassifier& u = originals[static_cast<std::size_t>(k)];
    const CompactClassifier& v = model.classifiers[static_cast<std::size_t>(k)];
    if (u.channels() != model.channels() || u.u_plus.cols() != v.v_plus.cols() ||
        u.u_minus.cols() != v.v_minus.cols())
      throw DimensionError("original and compact classifier shapes disagree");
    double e = (u.u_plus - model.projection * v.v_plus).squaredNorm();
    e += (u.u_minus - model.projection * v.v_minus).squaredNorm();
    err.per_class[k] = e;
    err.total += e;
  }
  return err;
}

double psnr(const CoDecomposedModel& model, std::span<const LowRankClassifier> originals) {
  const ReconstructionError err = reconstruction_error(model, originals);
  double peak = 0.0;
  Index entries = 0;
  for (const LowRankClassifier& u : originals) {
    if (u.u_plus.size() > 0) peak = std::max(peak, u.u_plus.cwiseAbs().maxCoeff());
    if (u.u_minus.size() > 0) peak = std::max(peak, u.u_minus.cwiseAbs().maxCoeff());
    entries += u.u_plus.size() + u.u_minus.size();
  }
  if (entries == 0) throw ArgumentError("psnr of an empty classifier set");
  const double mse = err.total / static_cast<double>(entries);
  if (mse == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(peak * peak / mse);
}

double score_codecomposed(const CoDecomposedModel& model, const FeatureMap& fm, Index k) {
  check_class_index(model, k);
  if (fm.channels() != model.channels())
    throw DimensionError("feature map channels do not match model");
  const CompactClassifier& clf = model.classifiers[static_cast<std::size_t>(k)];
  const Matrix projected = model.projection.transpose() * fm.descriptors;
  double s = clf.bias;
  if (clf.v_plus.cols() > 0) s += (clf.v_plus.transpose() * projected).squaredNorm();
  if (clf.v_minus.cols() > 0) s -= (clf.v_minus.transpose() * projected).squaredNorm();
  return s;
}

Matrix reduced_pool(const CoDecomposedModel& model, const FeatureMap& fm) {
  if (fm.channels() != model.channels())
    throw DimensionError("feature map channels do not match model");
  return symmetric_outer(Matrix(model.projection.transpose() * fm.descriptors));
}

double score_from_reduced(const CoDecomposedModel& model, const Matrix& reduced, Index k) {
  check_class_index(model, k);
  if (reduced.rows() != model.reduced_dim() || reduced.cols() != model.reduced_dim())
    throw DimensionError("reduced pooled feature has the wrong dimension");
  const CompactClassifier& clf = model.classifiers[static_cast<std::size_t>(k)];
  double s = clf.bias;
  if (clf.v_plus.cols() > 0) s += clf.v_plus.cwiseProduct(reduced * clf.v_plus).sum();
  if (clf.v_minus.cols() > 0) s -= clf.v_minus.cwiseProduct(reduced * clf.v_minus).sum();
  return s;
}

Vector scores_codecomposed(const CoDecomposedModel& model, const FeatureMap& fm) {
  const Matrix reduced = reduced_pool(model, fm);
  Vector scores(model.num_classes());
  for (Index k = 0; k < model.num_classes(); ++k)
    scores[k] = score_from_reduced(model, reduced, k);
  return scores;
}

double codecomp_objective(const CoDecomposedModel& model, std::span<const LabeledExample> batch,
                          double lambda) {
  if (batch.empty()) throw ArgumentError("objective over an empty batch");
  const Index num_classes = model.num_classes();

  double loss = 0.0;
  for (const LabeledExample& example : batch) {
    const Matrix projected = model.projection.transpose() * example.features.descriptors;
    for (Index k = 0; k < num_classes; ++k) {
      const CompactClassifier& clf = model.classifiers[static_cast<std::size_t>(k)];
      double s = clf.bias;
      if (clf.v_plus.cols() > 0) s += (clf.v_plus.transpose() * projected).squaredNorm();
      if (clf.v_minus.cols() > 0) s -= (clf.v_minus.transpose() * projected).squaredNorm();
      const double y = example.label == static_cast<int>(k) + 1 ? 1.0 : -1.0;
      loss += std::max(0.0, 1.0 - y * s);
    }
  }
  loss /= static_cast<double>(batch.size());

  double reg = 0.0;
  for (const CompactClassifier& clf : model.classifiers) reg += regularizer(clf);
  return loss + 0.5 * lambda * reg;
}

CoDecompGradients gradients_codecomposed(const CoDecomposedModel& model,
                                         std::span<const LabeledExample> batch, double lambda) {
  if (batch.empty()) throw ArgumentError("gradients over an empty batch");
  const Index num_classes = model.num_classes();
  const Index m = model.reduced_dim();

  CoDecompGradients g;
  g.projection = Matrix::Zero(model.channels(), m);
  g.classifiers.resize(model.classifiers.size());
  for (Index k = 0; k < num_classes; ++k) {
    const CompactClassifier& clf = model.classifiers[static_cast<std::size_t>(k)];
    CompactClassifier& gk = g.classifiers[static_cast<std::size_t>(k)];
    gk.v_plus = 2.0 * lambda * (clf.v_plus * (clf.v_plus.transpose() * clf.v_plus)) +
                lambda * (clf.v_minus * (clf.v_minus.transpose() * clf.v_plus));
    gk.v_minus = 2.0 * lambda * (clf.v_minus * (clf.v_minus.transpose() * clf.v_minus)) +
                 lambda * (clf.v_plus * (clf.v_plus.transpose() * clf.v_minus));
    gk.bias = 0.0;
  }

  const double inv_n = 1.0 / static_cast<double>(batch.size());
  for (const LabeledExample& example : batch) {
    const Matrix& x = example.features.descriptors;
    const Matrix projected = model.projection.transpose() * x;  // m x hw

    // Violating classes fold their V V^T terms into one m x m matrix so the
    // projection gradient needs a single pass over X per example.
    Matrix folded = Matrix::Zero(m, m);
    bool any_violation = false;
    for (Index k = 0; k < num_classes; ++k) {
      const CompactClassifier& clf = model.classifiers[static_cast<std::size_t>(k)];
      double s = clf.bias;
      if (clf.v_plus.cols() > 0) s += (clf.v_plus.transpose() * projected).squaredNorm();
      if (clf.v_minus.cols() > 0) s -= (clf.v_minus.transpose() * projected).squaredNorm();
      const double y = example.label == static_cast<int>(k) + 1 ? 1.0 : -1.0;
      if (1.0 - y * s <= 0.0) continue;

      const double coeff = -y * inv_n;
      CompactClassifier& gk = g.classifiers[static_cast<std::size_t>(k)];
      if (clf.v_plus.cols() > 0)
        gk.v_plus.noalias() += 2.0 * coeff * (projected * (projected.transpose() * clf.v_plus));
      if (clf.v_minus.cols() > 0)
        gk.v_minus.noalias() -= 2.0 * coeff * (projected * (projected.transpose() * clf.v_minus));
      gk.bias += coeff;

      if (clf.v_plus.cols() > 0)
        folded.selfadjointView<Eigen::Lower>().rankUpdate(clf.v_plus, coeff);
      if (clf.v_minus.cols() > 0)
        folded.selfadjointView<Eigen::Lower>().rankUpdate(clf.v_minus, -coeff);
      any_violation = true;
    }
    if (any_violation) {
      folded.triangularView<Eigen::StrictlyUpper>() = folded.transpose();
      g.projection.noalias() += 2.0 * (x * (projected.transpose() * folded));
    }
  }
  return g;
}

}  // namespace lrbp
