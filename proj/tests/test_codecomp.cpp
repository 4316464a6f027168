#include <doctest.h>

#include <Eigen/SVD>

#include "lrbp/codecomp.hpp"
#include "lrbp/linalg.hpp"
#include "lrbp/pooling.hpp"
#include "test_util.hpp"

using namespace lrbp;
using namespace lrbp::testing;

namespace {

std::vector<LowRankClassifier> random_classifier_set(Index k_count, Index c, Index rank, Rng& rng) {
  std::vector<LowRankClassifier> out;
  for (Index k = 0; k < k_count; ++k)
    out.push_back(LowRankClassifier{random_matrix(c, rank / 2, rng),
                                    random_matrix(c, rank / 2, rng),
                                    std::normal_distribution<double>()(rng)});
  return out;
}

Matrix stack_factors(std::span<const LowRankClassifier> classifiers) {
  const Index c = classifiers.front().channels();
  const Index r = classifiers.front().rank();
  Matrix stack(c, r * static_cast<Index>(classifiers.size()));
  Index col = 0;
  for (const auto& clf : classifiers) {
    stack.middleCols(col, clf.u_plus.cols()) = clf.u_plus;
    col += clf.u_plus.cols();
    stack.middleCols(col, clf.u_minus.cols()) = clf.u_minus;
    col += clf.u_minus.cols();
  }
  return stack;
}

}  // namespace

TEST_SUITE_BEGIN("codecomp");

TEST_CASE("single classifier with enough dimensions reconstructs exactly") {
  Rng rng(201);
  std::vector<LowRankClassifier> one = random_classifier_set(1, 10, 4, rng);
  const CoDecomposedModel model = codecompose(one, 4);
  CHECK(reconstruction_error(model, one).total < 1e-10);
}

TEST_CASE("codecompose beats random orthonormal subspaces") {
  Rng rng(203);
  const std::vector<LowRankClassifier> classifiers = random_classifier_set(5, 16, 4, rng);
  const Matrix stack = stack_factors(classifiers);
  const Index m = 8;
  const CoDecomposedModel model = codecompose(classifiers, m);
  const double optimal = reconstruction_error(model, classifiers).total;
  for (int draw = 0; draw < 200; ++draw) {
    const Matrix q = random_orthonormal(16, m, rng);
    const double other = stack.squaredNorm() - (q.transpose() * stack).squaredNorm();
    CHECK(optimal <= other + 1e-8);
  }
}

TEST_CASE("codecompose objective equals the singular value tail energy") {
  Rng rng(207);
  const std::vector<LowRankClassifier> classifiers = random_classifier_set(4, 12, 4, rng);
  const Matrix stack = stack_factors(classifiers);
  Eigen::JacobiSVD<Matrix> oracle(stack);
  for (Index m : {2, 4, 6, 10}) {
    const CoDecomposedModel model = codecompose(classifiers, m);
    double tail = 0.0;
    for (Index i = m; i < oracle.singularValues().size(); ++i)
      tail += oracle.singularValues()[i] * oracle.singularValues()[i];
    CHECK(std::abs(reconstruction_error(model, classifiers).total - tail) <
          1e-8 * std::max(1.0, tail));
  }
}

TEST_CASE("codecompose validates shapes") {
  Rng rng(209);
  std::vector<LowRankClassifier> classifiers = random_classifier_set(3, 8, 4, rng);
  CHECK_THROWS_AS(codecompose(classifiers, 9), DimensionError);
  classifiers[1].u_plus = random_matrix(8, 3, rng);
  CHECK_THROWS_AS(codecompose(classifiers, 4), DimensionError);
  classifiers.clear();
  CHECK_THROWS_AS(codecompose(classifiers, 2), ArgumentError);
}

TEST_CASE("pca_init spans an exact low-dimensional descriptor subspace") {
  Rng rng(211);
  const Index c = 9;
  const Matrix basis = random_orthonormal(c, 3, rng);
  std::vector<FeatureMap> maps;
  for (int i = 0; i < 6; ++i)
    maps.push_back(FeatureMap{2, 2, basis * random_matrix(3, 4, rng)});

  const Matrix p = pca_init(maps, 3);
  // descriptors are centered inside pca; projection must still reconstruct
  // every raw descriptor because the span contains the mean
  for (const FeatureMap& fm : maps)
    CHECK((fm.descriptors - p * (p.transpose() * fm.descriptors)).cwiseAbs().maxCoeff() < 1e-10);

  const Matrix full = pca_init(maps, c);
  CHECK((full.transpose() * full - Matrix::Identity(c, c)).norm() < 1e-8);
  CHECK_THROWS_AS(pca_init(std::span<const FeatureMap>{}, 2), ArgumentError);
}

TEST_CASE("reconstruction error accounting") {
  Rng rng(213);
  const std::vector<LowRankClassifier> classifiers = random_classifier_set(3, 10, 4, rng);
  CoDecomposedModel model = codecompose(classifiers, 5);

  // from-scratch double loop
  double expected = 0.0;
  for (std::size_t k = 0; k < classifiers.size(); ++k) {
    const Matrix u = stack_factors(std::span(&classifiers[k], 1));
    Matrix v(5, u.cols());
    v << model.classifiers[k].v_plus, model.classifiers[k].v_minus;
    const Matrix diff = u - model.projection * v;
    for (Index i = 0; i < diff.rows(); ++i)
      for (Index j = 0; j < diff.cols(); ++j) expected += diff(i, j) * diff(i, j);
  }
  const ReconstructionError err = reconstruction_error(model, classifiers);
  CHECK(rel_diff(err.total, expected) < 1e-12);
  CHECK(err.per_class.sum() == doctest::Approx(err.total).epsilon(1e-12));

  // perturbing one compact factor by delta adds exactly ||delta||^2 under an
  // orthonormal projection
  const Matrix delta = random_matrix(5, 2, rng, 0.3);
  CoDecomposedModel perturbed = model;
  perturbed.classifiers[1].v_plus += delta;
  const double base_class = err.per_class[1];
  const double moved_class = reconstruction_error(perturbed, classifiers).per_class[1];
  // ||u - P(v+d)||^2 = ||u - Pv||^2 - 2<u - Pv, Pd> + ||d||^2 and the cross
  // term vanishes because u - Pv is orthogonal to the span of P
  CHECK(rel_diff(moved_class - base_class, delta.squaredNorm()) < 1e-10);
}

TEST_CASE("psnr sentinels and monotonicity") {
  Rng rng(217);
  std::vector<LowRankClassifier> one = random_classifier_set(1, 8, 4, rng);

  // exact reconstruction by construction: identity projection, V = U
  CoDecomposedModel exact;
  exact.projection = Matrix::Identity(8, 8);
  exact.classifiers.push_back(
      CompactClassifier{one[0].u_plus, one[0].u_minus, one[0].bias});
  CHECK(std::isinf(psnr(exact, one)));

  // a full-rank codecomposition is exact up to rounding
  const CoDecomposedModel lossless = codecompose(one, 8);
  CHECK(psnr(lossless, one) > 200.0);

  // all-equal magnitudes with a zero reconstruction: MSE == peak^2 == 1
  std::vector<LowRankClassifier> flat{
      LowRankClassifier{Matrix::Ones(4, 1), Matrix::Ones(4, 1), 0.0}};
  CoDecomposedModel zeroed;
  zeroed.projection = Matrix::Identity(4, 2);
  zeroed.classifiers.push_back(CompactClassifier{Matrix::Zero(2, 1), Matrix::Zero(2, 1), 0.0});
  CHECK(psnr(zeroed, flat) == doctest::Approx(0.0).epsilon(1e-12));

  const std::vector<LowRankClassifier> classifiers = random_classifier_set(5, 12, 4, rng);
  double previous = -std::numeric_limits<double>::infinity();
  for (Index m = 2; m <= 12; m += 2) {
    const CoDecomposedModel model = codecompose(classifiers, m);
    const double value = psnr(model, classifiers);
    CHECK(value >= previous - 1e-9);
    previous = value;
  }
}

TEST_CASE("codecomposed scoring paths agree and identity projection is lossless") {
  Rng rng(219);
  const Index c = 10;
  const std::vector<LowRankClassifier> classifiers = random_classifier_set(4, c, 4, rng);

  const CoDecomposedModel identity_model = codecompose(classifiers, c);
  for (int trial = 0; trial < 20; ++trial) {
    const FeatureMap fm = random_map(2, 3, c, rng);
    for (Index k = 0; k < 4; ++k) {
      CHECK(rel_diff(score_codecomposed(identity_model, fm, k),
                     score_frobenius(classifiers[static_cast<std::size_t>(k)], fm)) < 1e-10);
    }
  }

  const CoDecomposedModel compact = codecompose(classifiers, 5);
  for (int trial = 0; trial < 200; ++trial) {
    const FeatureMap fm = random_map(1, 4, c, rng);
    const Matrix reduced = reduced_pool(compact, fm);
    for (Index k = 0; k < 4; ++k)
      CHECK(rel_diff(score_codecomposed(compact, fm, k), score_from_reduced(compact, reduced, k)) <
            1e-10);
  }

  const FeatureMap zero{1, 2, Matrix::Zero(c, 2)};
  for (Index k = 0; k < 4; ++k)
    CHECK(score_codecomposed(compact, zero, k) ==
          compact.classifiers[static_cast<std::size_t>(k)].bias);
}

TEST_CASE("codecomposed gradients vanish without violations or regularization") {
  Rng rng(223);
  const Index c = 6, m = 3;
  CoDecomposedModel model;
  model.projection = random_orthonormal(c, m, rng);
  model.classifiers.push_back(CompactClassifier{Matrix::Zero(m, 1), Matrix::Zero(m, 1), 5.0});
  model.classifiers.push_back(CompactClassifier{Matrix::Zero(m, 1), Matrix::Zero(m, 1), -5.0});

  std::vector<LabeledExample> batch{LabeledExample{random_map(1, 2, c, rng), 1}};
  const CoDecompGradients g = gradients_codecomposed(model, batch, 0.0);
  CHECK(g.projection.cwiseAbs().maxCoeff() == 0.0);
  for (const auto& gk : g.classifiers) {
    CHECK(gk.v_plus.cwiseAbs().maxCoeff() == 0.0);
    CHECK(gk.v_minus.cwiseAbs().maxCoeff() == 0.0);
    CHECK(gk.bias == 0.0);
  }
}

TEST_CASE("codecomposed gradients match central finite differences") {
  Rng rng(227);
  std::uniform_int_distribution<int> label(1, 3);
  int accepted = 0;
  while (accepted < 50) {
    const Index c = 8, m = 4, k_count = 3;
    CoDecomposedModel model;
    model.projection = random_matrix(c, m, rng, 0.5);
    for (Index k = 0; k < k_count; ++k)
      model.classifiers.push_back(
          CompactClassifier{random_matrix(m, 1, rng, 0.8), random_matrix(m, 1, rng, 0.8),
                            std::normal_distribution<double>(0.0, 0.5)(rng)});

    std::vector<LabeledExample> batch;
    for (int i = 0; i < 3; ++i)
      batch.push_back(LabeledExample{random_map(1, 3, c, rng, 0.7), label(rng)});
    const double lambda = std::uniform_real_distribution<double>(0.0, 0.6)(rng);

    bool near_kink = false;
    for (const LabeledExample& example : batch) {
      const Vector s = scores_codecomposed(model, example.features);
      for (Index k = 0; k < k_count; ++k) {
        const double y = example.label == static_cast<int>(k) + 1 ? 1.0 : -1.0;
        if (std::abs(1.0 - y * s[k]) < 1e-3) near_kink = true;
      }
    }
    if (near_kink) continue;
    ++accepted;

    const CoDecompGradients g = gradients_codecomposed(model, batch, lambda);
    const auto eval = [&] { return codecomp_objective(model, batch, lambda); };
    CHECK(block_rel_diff(fd_gradient(eval, model.projection, 1e-5), g.projection) < 1e-4);
    for (Index k = 0; k < k_count; ++k) {
      auto& clf = model.classifiers[static_cast<std::size_t>(k)];
      const auto& gk = g.classifiers[static_cast<std::size_t>(k)];
      CHECK(block_rel_diff(fd_gradient(eval, clf.v_plus, 1e-5), gk.v_plus) < 1e-4);
      CHECK(block_rel_diff(fd_gradient(eval, clf.v_minus, 1e-5), gk.v_minus) < 1e-4);
      const double fd_bias = fd_gradient(eval, clf.bias, 1e-5);
      CHECK(std::abs(fd_bias - gk.bias) < 1e-4 * std::max(1.0, std::abs(fd_bias)));
    }
  }
}

TEST_CASE("frozen projection reduces to per-class factored gradients") {
  Rng rng(229);
  const Index c = 8, m = 4, k_count = 3;
  CoDecomposedModel model;
  model.projection = random_orthonormal(c, m, rng);
  for (Index k = 0; k < k_count; ++k)
    model.classifiers.push_back(CompactClassifier{random_matrix(m, 1, rng),
                                                  random_matrix(m, 1, rng),
                                                  std::normal_distribution<double>()(rng)});

  std::vector<LabeledExample> batch;
  std::uniform_int_distribution<int> label(1, 3);
  for (int i = 0; i < 5; ++i) batch.push_back(LabeledExample{random_map(1, 3, c, rng), label(rng)});
  const double lambda = 0.3;
  const CoDecompGradients g = gradients_codecomposed(model, batch, lambda);

  for (Index k = 0; k < k_count; ++k) {
    const auto& clf = model.classifiers[static_cast<std::size_t>(k)];
    // same batch through the plain low-rank gradient on projected features
    LowRankClassifier as_lowrank{clf.v_plus, clf.v_minus, clf.bias};
    std::vector<MarginExample> projected;
    for (const LabeledExample& example : batch)
      projected.push_back(MarginExample{
          project_features(example.features, model.projection),
          example.label == static_cast<int>(k) + 1 ? 1 : -1});
    const LowRankGradients expected = gradients(as_lowrank, projected, lambda);
    const auto& gk = g.classifiers[static_cast<std::size_t>(k)];
    CHECK((gk.v_plus - expected.u_plus).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((gk.v_minus - expected.u_minus).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(std::abs(gk.bias - expected.bias) < 1e-12);
  }
}

TEST_CASE("orthogonal reparameterization leaves scores and objective unchanged") {
  Rng rng(233);
  const Index c = 9, m = 4, k_count = 3;
  const std::vector<LowRankClassifier> classifiers = random_classifier_set(k_count, c, 4, rng);
  const CoDecomposedModel model = codecompose(classifiers, m);

  const Matrix q = random_orthonormal(m, m, rng);
  CoDecomposedModel rotated = model;
  rotated.projection = model.projection * q;
  for (auto& clf : rotated.classifiers) {
    clf.v_plus = q.transpose() * clf.v_plus;
    clf.v_minus = q.transpose() * clf.v_minus;
  }

  std::vector<LabeledExample> batch;
  std::uniform_int_distribution<int> label(1, 3);
  for (int i = 0; i < 6; ++i) batch.push_back(LabeledExample{random_map(2, 2, c, rng), label(rng)});

  for (const LabeledExample& example : batch)
    for (Index k = 0; k < k_count; ++k)
      CHECK(rel_diff(score_codecomposed(model, example.features, k),
                     score_codecomposed(rotated, example.features, k)) < 1e-10);

  CHECK(rel_diff(codecomp_objective(model, batch, 0.4), codecomp_objective(rotated, batch, 0.4)) <
        1e-10);
  CHECK(rel_diff(reconstruction_error(model, classifiers).total,
                 reconstruction_error(rotated, classifiers).total) < 1e-10);
}

TEST_SUITE_END();
