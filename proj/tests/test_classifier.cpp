#include <doctest.h>

#include "lrbp/classifier.hpp"
#include "lrbp/linalg.hpp"
#include "lrbp/pooling.hpp"
#include "test_util.hpp"

using namespace lrbp;
using namespace lrbp::testing;

namespace {

LowRankClassifier random_classifier(Index c, Index rank, Rng& rng, double scale = 1.0) {
  return LowRankClassifier{random_matrix(c, rank / 2, rng, scale),
                           random_matrix(c, rank / 2, rng, scale),
                           std::normal_distribution<double>(0.0, scale)(rng)};
}

// From-scratch objective evaluation through the explicit W route, used as an
// independent oracle against the factored implementation.
double naive_objective(const LowRankClassifier& clf, const std::vector<MarginExample>& batch,
                       double lambda) {
  const Matrix w_plus = clf.u_plus * clf.u_plus.transpose();
  const Matrix w_minus = clf.u_minus * clf.u_minus.transpose();
  const Matrix w = w_plus - w_minus;
  double loss = 0.0;
  for (const MarginExample& example : batch) {
    const Matrix pooled = naive_pool(example.features);
    const double s = (w.transpose() * pooled).trace() + clf.bias;
    loss += std::max(0.0, 1.0 - example.label * s);
  }
  loss /= static_cast<double>(batch.size());
  const double reg = w_plus.squaredNorm() + w_minus.squaredNorm() +
                     (clf.u_plus.transpose() * clf.u_minus).squaredNorm();
  return loss + 0.5 * lambda * reg;
}

}  // namespace

TEST_SUITE_BEGIN("classifier");

TEST_CASE("frobenius score on axis factors") {
  LowRankClassifier clf{Vector::Unit(2, 0), Vector::Unit(2, 1), 0.0};
  Matrix x(2, 1);
  x << 3.0, 4.0;
  const FeatureMap fm{1, 1, x};
  CHECK(score_frobenius(clf, fm) == doctest::Approx(-7.0).epsilon(1e-12));

  CHECK(score_frobenius(clf, FeatureMap{1, 1, Matrix::Zero(2, 1)}) == 0.0);
  clf.bias = 2.5;
  CHECK(score_frobenius(clf, FeatureMap{1, 1, Matrix::Zero(2, 1)}) == 2.5);

  const LowRankClassifier swapped{clf.u_minus, clf.u_plus, 0.0};
  clf.bias = 0.0;
  CHECK(score_frobenius(swapped, fm) == doctest::Approx(7.0).epsilon(1e-12));
}

TEST_CASE("pooled-path score equals the frobenius path") {
  Rng rng(101);
  std::uniform_int_distribution<Index> cdist(2, 12), hwdist(1, 20), rdist(1, 4);
  for (int trial = 0; trial < 200; ++trial) {
    const Index c = cdist(rng);
    const LowRankClassifier clf = random_classifier(c, 2 * rdist(rng), rng);
    const FeatureMap fm = random_map(1, hwdist(rng), c, rng);
    const double direct = score_frobenius(clf, fm);
    const double pooled = score_via_pooled(clf, bilinear_pool(fm));
    CHECK(rel_diff(direct, pooled) < 1e-10);
  }
}

TEST_CASE("pooled-path score corner cases") {
  const Index c = 6;
  Rng rng(103);
  LowRankClassifier clf{random_orthonormal(c, 2, rng), Matrix::Zero(c, 2), 0.0};
  PooledBilinear zero{Matrix::Zero(c, c), false, false};
  clf.bias = -1.25;
  CHECK(score_via_pooled(clf, zero) == -1.25);

  clf.bias = 0.0;
  PooledBilinear eye{Matrix::Identity(c, c), false, false};
  CHECK(score_via_pooled(clf, eye) == doctest::Approx(2.0).epsilon(1e-12));  // r/2 columns
}

TEST_CASE("full score matches the vectorized inner product") {
  PooledBilinear eye3{Matrix::Identity(3, 3), false, false};
  CHECK(score_full(FullBilinearClassifier{Matrix::Identity(3, 3), 0.5}, eye3) ==
        doctest::Approx(3.5).epsilon(1e-12));

  Rng rng(107);
  for (int trial = 0; trial < 100; ++trial) {
    const Index c = 5;
    const FullBilinearClassifier clf{random_matrix(c, c, rng),
                                     std::normal_distribution<double>()(rng)};
    const PooledBilinear pooled = bilinear_pool(random_map(2, 3, c, rng));
    const double via_trace = score_full(clf, pooled);
    const double via_vec = vectorize(clf.w).dot(vectorize(pooled)) + clf.bias;
    CHECK(std::abs(via_trace - via_vec) < 1e-12 * std::max(1.0, std::abs(via_vec)));
  }
}

TEST_CASE("full score agrees with the factored parameterization") {
  Rng rng(109);
  for (int trial = 0; trial < 50; ++trial) {
    const Index c = 7;
    const LowRankClassifier clf = random_classifier(c, 4, rng);
    const PooledBilinear pooled = bilinear_pool(random_map(2, 2, c, rng));
    CHECK(rel_diff(score_full(to_full(clf), pooled), score_via_pooled(clf, pooled)) < 1e-10);
  }
}

TEST_CASE("hinge arithmetic") {
  LowRankClassifier clf{Vector::Unit(2, 0), Vector::Zero(2, 1), 0.0};
  Matrix x(2, 1);

  // score sqrt(2)^2 = 2 with label +1: satisfied
  x << std::sqrt(2.0), 0.0;
  CHECK(hinge(clf, MarginExample{FeatureMap{1, 1, x}, 1}) == 0.0);

  // score 0 with label +1: exactly on the scoring boundary
  x << 0.0, 1.0;
  CHECK(hinge(clf, MarginExample{FeatureMap{1, 1, x}, 1}) == 1.0);

  // score 0.5 with label -1: violated margin
  x << std::sqrt(0.5), 0.0;
  CHECK(hinge(clf, MarginExample{FeatureMap{1, 1, x}, -1}) == doctest::Approx(1.5).epsilon(1e-12));
}

TEST_CASE("regularizer values and the overlap penalty") {
  const Index c = 4;
  CHECK(regularizer(LowRankClassifier{Matrix::Zero(c, 1), Matrix::Zero(c, 1), 0.0}) == 0.0);
  CHECK(regularizer(LowRankClassifier{Vector::Unit(c, 0), Vector::Unit(c, 1), 0.0}) ==
        doctest::Approx(2.0).epsilon(1e-12));
  CHECK(regularizer(LowRankClassifier{Vector::Unit(c, 0), Vector::Unit(c, 0), 0.0}) ==
        doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("regularizer identity for the frobenius norm of W") {
  Rng rng(113);
  for (int trial = 0; trial < 100; ++trial) {
    const LowRankClassifier clf = random_classifier(6, 4, rng);
    const double w_norm = (clf.u_plus * clf.u_plus.transpose() -
                           clf.u_minus * clf.u_minus.transpose())
                              .squaredNorm();
    const double decomposed = (clf.u_plus * clf.u_plus.transpose()).squaredNorm() +
                              (clf.u_minus * clf.u_minus.transpose()).squaredNorm() -
                              2.0 * (clf.u_plus.transpose() * clf.u_minus).squaredNorm();
    CHECK(rel_diff(w_norm, decomposed) < 1e-10);
  }
}

TEST_CASE("objective corner cases and independent re-evaluation") {
  Rng rng(127);
  const Index c = 3;

  // all margins satisfied at lambda = 0
  LowRankClassifier strong{10.0 * Vector::Unit(c, 0), Matrix::Zero(c, 1), 0.0};
  Matrix x(c, 1);
  x << 1.0, 0.0, 0.0;
  std::vector<MarginExample> batch{MarginExample{FeatureMap{1, 1, x}, 1}};
  CHECK(objective(strong, batch, 0.0) == 0.0);

  // single example with hinge 1.5
  LowRankClassifier half{Vector::Unit(c, 0), Matrix::Zero(c, 1), 0.0};
  Matrix neg(c, 1);
  neg << std::sqrt(0.5), 0.0, 0.0;
  std::vector<MarginExample> one{MarginExample{FeatureMap{1, 1, neg}, -1}};
  CHECK(objective(half, one, 0.0) == doctest::Approx(1.5).epsilon(1e-12));

  for (int trial = 0; trial < 50; ++trial) {
    const LowRankClassifier clf = random_classifier(c, 4, rng, 0.7);
    std::vector<MarginExample> random_batch;
    std::uniform_int_distribution<int> label(0, 1);
    for (int i = 0; i < 4; ++i)
      random_batch.push_back(MarginExample{random_map(1, 3, c, rng), label(rng) ? 1 : -1});
    const double lambda = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    CHECK(rel_diff(objective(clf, random_batch, lambda),
                   naive_objective(clf, random_batch, lambda)) < 1e-12);
  }
  CHECK_THROWS_AS(objective(strong, std::span<const MarginExample>{}, 0.0), ArgumentError);
}

TEST_CASE("gradients vanish when every margin is satisfied at lambda zero") {
  const Index c = 3;
  LowRankClassifier strong{10.0 * Vector::Unit(c, 0), Matrix::Zero(c, 1), 0.0};
  Matrix x(c, 1);
  x << 1.0, 0.0, 0.0;
  std::vector<MarginExample> batch{MarginExample{FeatureMap{1, 1, x}, 1}};
  const LowRankGradients g = gradients(strong, batch, 0.0);
  CHECK(g.u_plus.cwiseAbs().maxCoeff() == 0.0);
  CHECK(g.u_minus.cwiseAbs().maxCoeff() == 0.0);
  CHECK(g.bias == 0.0);
}

TEST_CASE("regularizer-only gradient on orthogonal unit factors") {
  const Index c = 4;
  LowRankClassifier clf{Vector::Unit(c, 0), Vector::Unit(c, 1), 5.0};
  Matrix x = Matrix::Zero(c, 1);
  // bias 5 keeps the positive example far outside the margin
  std::vector<MarginExample> batch{MarginExample{FeatureMap{1, 1, x}, 1}};
  const LowRankGradients g = gradients(clf, batch, 0.5);
  CHECK((g.u_plus - Vector::Unit(c, 0)).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((g.u_minus - Vector::Unit(c, 1)).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(g.bias == 0.0);
}

TEST_CASE("gradients match central finite differences") {
  Rng rng(131);
  std::uniform_int_distribution<int> label(0, 1);
  int accepted = 0;
  while (accepted < 100) {
    const Index c = 5;
    LowRankClassifier clf = random_classifier(c, 4, rng, 0.6);
    std::vector<MarginExample> batch;
    for (int i = 0; i < 3; ++i)
      batch.push_back(MarginExample{random_map(1, 4, c, rng, 0.8), label(rng) ? 1 : -1});
    const double lambda = std::uniform_real_distribution<double>(0.0, 0.8)(rng);

    // skip draws near the hinge kink where the subgradient is one-sided
    bool near_kink = false;
    for (const MarginExample& example : batch)
      if (std::abs(1.0 - example.label * score_frobenius(clf, example.features)) < 1e-3)
        near_kink = true;
    if (near_kink) continue;
    ++accepted;

    const LowRankGradients g = gradients(clf, batch, lambda);
    const auto eval = [&] { return objective(clf, batch, lambda); };
    CHECK(block_rel_diff(fd_gradient(eval, clf.u_plus, 1e-5), g.u_plus) < 1e-4);
    CHECK(block_rel_diff(fd_gradient(eval, clf.u_minus, 1e-5), g.u_minus) < 1e-4);
    const double fd_bias = fd_gradient(eval, clf.bias, 1e-5);
    CHECK(std::abs(fd_bias - g.bias) < 1e-4 * std::max(1.0, std::abs(fd_bias)));
  }
}

TEST_CASE("truncation keeps the largest-magnitude eigenpairs") {
  Matrix w = Matrix::Zero(3, 3);
  w.diagonal() << 5.0, -3.0, 0.1;
  const LowRankClassifier clf = truncate_to_lowrank(FullBilinearClassifier{w, 0.75}, 2);
  CHECK(clf.bias == 0.75);
  Matrix plus_expected = Matrix::Zero(3, 3);
  plus_expected(0, 0) = 5.0;
  Matrix minus_expected = Matrix::Zero(3, 3);
  minus_expected(1, 1) = 3.0;
  CHECK((clf.u_plus * clf.u_plus.transpose() - plus_expected).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((clf.u_minus * clf.u_minus.transpose() - minus_expected).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("full-rank truncation reconstructs exactly") {
  Rng rng(137);
  const Matrix w = random_symmetric(8, rng);
  const LowRankClassifier clf = truncate_to_lowrank(FullBilinearClassifier{w, 0.0}, 8);
  CHECK((implied_w(clf) - w).norm() < 1e-8);
}

TEST_CASE("truncation error is non-increasing in rank") {
  Rng rng(139);
  const Index c = 10;
  const Matrix w = random_symmetric(c, rng);
  double previous = std::numeric_limits<double>::infinity();
  for (Index r = 2; r <= c; r += 2) {
    const LowRankClassifier clf = truncate_to_lowrank(FullBilinearClassifier{w, 0.0}, r);
    const double error = (implied_w(clf) - w).norm();
    CHECK(error <= previous + 1e-10);
    previous = error;
  }
  CHECK_THROWS_AS(truncate_to_lowrank(FullBilinearClassifier{w, 0.0}, c + 1), DimensionError);
}

TEST_CASE("spectrum statistics across a classifier set") {
  std::vector<FullBilinearClassifier> single{FullBilinearClassifier{Matrix::Identity(4, 4), 0.0}};
  const SpectrumStats lone = spectrum(single);
  CHECK(lone.stddev.cwiseAbs().maxCoeff() == 0.0);

  std::vector<FullBilinearClassifier> pair{
      FullBilinearClassifier{Matrix::Identity(2, 2), 0.0},
      FullBilinearClassifier{3.0 * Matrix::Identity(2, 2), 0.0}};
  const SpectrumStats stats = spectrum(pair);
  CHECK(stats.mean[0] == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(stats.mean[1] == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(stats.stddev[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(stats.stddev[1] == doctest::Approx(1.0).epsilon(1e-12));

  std::vector<FullBilinearClassifier> mixed{
      FullBilinearClassifier{Matrix::Identity(2, 2), 0.0},
      FullBilinearClassifier{Matrix::Identity(3, 3), 0.0}};
  CHECK_THROWS_AS(spectrum(mixed), DimensionError);
}

TEST_CASE("three-way path equivalence") {
  Rng rng(149);
  for (int trial = 0; trial < 60; ++trial) {
    std::uniform_int_distribution<Index> cdist(2, 10), hwdist(1, 12);
    const Index c = cdist(rng);
    const LowRankClassifier clf = random_classifier(c, 2, rng);
    const FeatureMap fm = random_map(1, hwdist(rng), c, rng);
    const PooledBilinear pooled = bilinear_pool(fm);
    const double a = score_frobenius(clf, fm);
    const double b = score_via_pooled(clf, pooled);
    const double d = score_full(to_full(clf), pooled);
    CHECK(rel_diff(a, b) < 1e-10);
    CHECK(rel_diff(b, d) < 1e-10);
  }
}

TEST_CASE("score dimension validation") {
  Rng rng(151);
  const LowRankClassifier clf = random_classifier(4, 2, rng);
  CHECK_THROWS_AS(score_frobenius(clf, random_map(1, 2, 5, rng)), DimensionError);
  CHECK_THROWS_AS(score_via_pooled(clf, PooledBilinear{Matrix::Zero(5, 5), false, false}),
                  DimensionError);
}

TEST_SUITE_END();
