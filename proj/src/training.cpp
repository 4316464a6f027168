#include "lrbp/training.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include "lrbp/bench.hpp"
#include "lrbp/linalg.hpp"
#include "lrbp/pooling.hpp"
#include "lrbp/random.hpp"

namespace lrbp {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point since) {
  return std::chrono::duration<double, std::milli>(Clock::now() - since).count();
}

void validate(const TrainConfig& cfg) {
  if (cfg.learning_rate <= 0.0) throw ArgumentError("learning rate must be positive");
  if (cfg.anneal_factor <= 0.0 || cfg.anneal_factor > 1.0)
    throw ArgumentError("anneal factor must be in (0, 1]");
  if (cfg.anneal_period < 1) throw ArgumentError("anneal period must be >= 1");
  if (cfg.momentum < 0.0 || cfg.momentum >= 1.0) throw ArgumentError("momentum must be in [0, 1)");
  if (cfg.batch_size < 1) throw ArgumentError("batch size must be >= 1");
  if (cfg.epochs < 1) throw ArgumentError("epoch count must be >= 1");
  if (cfg.weight_decay < 0.0) throw ArgumentError("weight decay must be nonnegative");
  if (cfg.kind != ModelKind::full) {
    if (cfg.rank < 2 || cfg.rank % 2 != 0) throw ArgumentError("rank must be even and >= 2");
  }
}

// Fisher-Yates driven directly by the raw generator so shuffles do not depend
// on standard-library distribution internals.
void deterministic_shuffle(std::vector<Index>& v, Rng& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng() % i);
    std::swap(v[i - 1], v[j]);
  }
}

double annealed_lr(const TrainConfig& cfg, int epoch) {
  return cfg.learning_rate * std::pow(cfg.anneal_factor, epoch / cfg.anneal_period);
}

int argmax_lowest(const Vector& scores) {
  int best = 0;
  for (Index i = 1; i < scores.size(); ++i)
    if (scores[i] > scores[best]) best = static_cast<int>(i);
  return best;
}

EvalResult tally(const std::vector<int>& predicted, const std::vector<int>& truth,
                 Index num_classes) {
  EvalResult out;
  out.confusion = Eigen::MatrixXi::Zero(num_classes, num_classes);
  for (std::size_t i = 0; i < predicted.size(); ++i)
    out.confusion(truth[i] - 1, predicted[i] - 1) += 1;
  out.per_class_accuracy.resize(num_classes);
  Index correct = 0;
  for (Index k = 0; k < num_classes; ++k) {
    const Index row_total = out.confusion.row(k).sum();
    out.per_class_accuracy[k] =
        row_total > 0 ? static_cast<double>(out.confusion(k, k)) / static_cast<double>(row_total)
                      : 0.0;
    correct += out.confusion(k, k);
  }
  out.accuracy = static_cast<double>(correct) / static_cast<double>(predicted.size());
  return out;
}

// Pooled c x c features for every sample, cached up front when they fit in a
// fixed byte budget and recomputed on demand otherwise.
class PooledCache {
 public:
  explicit PooledCache(const FeatureDataset& ds) : dataset_(ds) {
    const double bytes = static_cast<double>(ds.size()) * static_cast<double>(ds.channels) *
                         static_cast<double>(ds.channels) * sizeof(double);
    if (bytes <= 1.5e9) {
      cache_.reserve(static_cast<std::size_t>(ds.size()));
      for (const FeatureMap& fm : ds.samples) cache_.push_back(symmetric_outer(fm.descriptors));
    }
  }

  const Matrix& at(Index i, Matrix& scratch) const {
    if (!cache_.empty()) return cache_[static_cast<std::size_t>(i)];
    scratch = symmetric_outer(dataset_.samples[static_cast<std::size_t>(i)].descriptors);
    return scratch;
  }

 private:
  const FeatureDataset& dataset_;
  std::vector<Matrix> cache_;
};

std::vector<std::pair<Index, Index>> batch_ranges(Index n, Index batch) {
  std::vector<std::pair<Index, Index>> out;
  for (Index begin = 0; begin < n; begin += batch) out.emplace_back(begin, std::min(begin + batch, n));
  return out;
}

struct SplitView {
  std::vector<Index> train;
  std::vector<Index> test;
};

SplitView split_view(const FeatureDataset& ds) {
  SplitView view{ds.indices(Split::train), ds.indices(Split::test)};
  if (view.train.empty()) throw ArgumentError("training needs a nonempty train split");
  return view;
}

double label_sign(const FeatureDataset& ds, Index sample, Index k) {
  return ds.labels[static_cast<std::size_t>(sample)] == static_cast<int>(k) + 1 ? 1.0 : -1.0;
}

template <typename ScoresFn>
double accuracy_of(const FeatureDataset& ds, const std::vector<Index>& idx, ScoresFn&& scores) {
  if (idx.empty()) return std::numeric_limits<double>::quiet_NaN();
  Index correct = 0;
  for (Index i : idx) {
    const Vector s = scores(i);
    if (argmax_lowest(s) + 1 == ds.labels[static_cast<std::size_t>(i)]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(idx.size());
}

template <typename ScoresFn>
EvalResult eval_of(const FeatureDataset& ds, const std::vector<Index>& idx, ScoresFn&& scores) {
  std::vector<int> predicted;
  std::vector<int> truth;
  predicted.reserve(idx.size());
  truth.reserve(idx.size());
  for (Index i : idx) {
    predicted.push_back(argmax_lowest(scores(i)) + 1);
    truth.push_back(ds.labels[static_cast<std::size_t>(i)]);
  }
  return tally(predicted, truth, ds.num_classes);
}

TrainResult train_full_kind(const FeatureDataset& ds, const TrainConfig& cfg) {
  const Index c = ds.channels;
  const Index k_count = ds.num_classes;
  const double lambda = cfg.weight_decay;
  const SplitView view = split_view(ds);
  const PooledCache pooled(ds);

  FullModel model;
  model.classifiers.assign(static_cast<std::size_t>(k_count),
                           FullBilinearClassifier{Matrix::Zero(c, c), 0.0});
  std::vector<Matrix> vel_w(static_cast<std::size_t>(k_count), Matrix::Zero(c, c));
  std::vector<double> vel_b(static_cast<std::size_t>(k_count), 0.0);

  Matrix scratch;
  auto scores_of = [&](Index i) {
    const Matrix& b = pooled.at(i, scratch);
    Vector s(k_count);
    for (Index k = 0; k < k_count; ++k) {
      const auto& clf = model.classifiers[static_cast<std::size_t>(k)];
      s[k] = clf.w.cwiseProduct(b).sum() + clf.bias;
    }
    return s;
  };
  auto full_objective = [&]() {
    double loss = 0.0;
    for (Index i : view.train) {
      const Vector s = scores_of(i);
      for (Index k = 0; k < k_count; ++k)
        loss += std::max(0.0, 1.0 - label_sign(ds, i, k) * s[k]);
    }
    loss /= static_cast<double>(view.train.size());
    for (const auto& clf : model.classifiers) loss += 0.5 * lambda * clf.w.squaredNorm();
    return loss;
  };

  TrainReport report;
  report.initial_objective = full_objective();
  report.parameter_count = static_cast<std::size_t>(k_count) * (static_cast<std::size_t>(c * c) + 1);

  Rng rng(cfg.seed);
  std::vector<Index> order = view.train;
  Matrix grad_w(c, c);
  Matrix batch_scratch;

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    const auto started = Clock::now();
    const SgdConfig opt{annealed_lr(cfg, epoch), cfg.momentum, 0.0};
    deterministic_shuffle(order, rng);
    for (const auto& [begin, end] : batch_ranges(static_cast<Index>(order.size()), cfg.batch_size)) {
      const double inv_n = 1.0 / static_cast<double>(end - begin);
      for (Index k = 0; k < k_count; ++k) {
        auto& clf = model.classifiers[static_cast<std::size_t>(k)];
        grad_w = lambda * clf.w;
        double grad_b = 0.0;
        for (Index pos = begin; pos < end; ++pos) {
          const Index i = order[static_cast<std::size_t>(pos)];
          const Matrix& b = pooled.at(i, batch_scratch);
          const double y = label_sign(ds, i, k);
          const double s = clf.w.cwiseProduct(b).sum() + clf.bias;
          if (1.0 - y * s > 0.0) {
            grad_w.noalias() -= (y * inv_n) * b;
            grad_b -= y * inv_n;
          }
        }
        sgd_step(clf.w, grad_w, vel_w[static_cast<std::size_t>(k)], opt);
        sgd_step(clf.bias, grad_b, vel_b[static_cast<std::size_t>(k)], opt);
      }
    }
    report.epochs.push_back(EpochStats{epoch + 1, full_objective(),
                                       accuracy_of(ds, view.train, scores_of),
                                       accuracy_of(ds, view.test, scores_of),
                                       elapsed_ms(started)});
  }

  const auto& final_idx = view.test.empty() ? view.train : view.test;
  report.per_class_accuracy = eval_of(ds, final_idx, scores_of).per_class_accuracy;
  return TrainResult{Model{std::move(model)}, std::move(report)};
}

TrainResult train_lowrank_kind(const FeatureDataset& ds, const TrainConfig& cfg) {
  const Index c = ds.channels;
  const Index k_count = ds.num_classes;
  const Index half = cfg.rank / 2;
  const double lambda = cfg.weight_decay;
  const SplitView view = split_view(ds);

  Rng rng(cfg.seed);
  const double init_sd = 1.0 / std::sqrt(static_cast<double>(c * cfg.rank));
  LowRankModel model;
  std::vector<LowRankGradients> velocity;
  for (Index k = 0; k < k_count; ++k) {
    model.classifiers.push_back(LowRankClassifier{gaussian_matrix(c, half, init_sd, rng),
                                                  gaussian_matrix(c, half, init_sd, rng), 0.0});
    velocity.push_back(LowRankGradients{Matrix::Zero(c, half), Matrix::Zero(c, half), 0.0});
  }

  auto scores_of = [&](Index i) {
    const FeatureMap& fm = ds.samples[static_cast<std::size_t>(i)];
    Vector s(k_count);
    for (Index k = 0; k < k_count; ++k)
      s[k] = score_frobenius(model.classifiers[static_cast<std::size_t>(k)], fm);
    return s;
  };
  auto lowrank_objective = [&]() {
    double loss = 0.0;
    for (Index i : view.train) {
      const Vector s = scores_of(i);
      for (Index k = 0; k < k_count; ++k)
        loss += std::max(0.0, 1.0 - label_sign(ds, i, k) * s[k]);
    }
    loss /= static_cast<double>(view.train.size());
    for (const auto& clf : model.classifiers) loss += 0.5 * lambda * regularizer(clf);
    return loss;
  };

  TrainReport report;
  report.initial_objective = lowrank_objective();
  report.parameter_count =
      static_cast<std::size_t>(k_count) * (static_cast<std::size_t>(c * cfg.rank) + 1);

  std::vector<Index> order = view.train;
  std::vector<MarginExample> batch;

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    const auto started = Clock::now();
    const SgdConfig opt{annealed_lr(cfg, epoch), cfg.momentum, 0.0};
    deterministic_shuffle(order, rng);
    for (const auto& [begin, end] : batch_ranges(static_cast<Index>(order.size()), cfg.batch_size)) {
      batch.clear();
      for (Index pos = begin; pos < end; ++pos)
        batch.push_back(MarginExample{ds.samples[static_cast<std::size_t>(order[static_cast<std::size_t>(pos)])], 1});
      for (Index k = 0; k < k_count; ++k) {
        for (Index pos = begin; pos < end; ++pos)
          batch[static_cast<std::size_t>(pos - begin)].label =
              static_cast<int>(label_sign(ds, order[static_cast<std::size_t>(pos)], k));
        auto& clf = model.classifiers[static_cast<std::size_t>(k)];
        auto& vel = velocity[static_cast<std::size_t>(k)];
        const LowRankGradients g = gradients(clf, batch, lambda);
        sgd_step(clf.u_plus, g.u_plus, vel.u_plus, opt);
        sgd_step(clf.u_minus, g.u_minus, vel.u_minus, opt);
        sgd_step(clf.bias, g.bias, vel.bias, opt);
      }
    }
    report.epochs.push_back(EpochStats{epoch + 1, lowrank_objective(),
                                       accuracy_of(ds, view.train, scores_of),
                                       accuracy_of(ds, view.test, scores_of),
                                       elapsed_ms(started)});
  }

  const auto& final_idx = view.test.empty() ? view.train : view.test;
  report.per_class_accuracy = eval_of(ds, final_idx, scores_of).per_class_accuracy;
  return TrainResult{Model{std::move(model)}, std::move(report)};
}

TrainResult train_codecomp_kind(const FeatureDataset& ds, const TrainConfig& cfg) {
  const Index c = ds.channels;
  const Index k_count = ds.num_classes;
  const Index m = cfg.reduced_dim > 0 ? cfg.reduced_dim : std::max<Index>(1, c / 4);
  const Index half = cfg.rank / 2;
  const double lambda = cfg.weight_decay;
  if (m > c) throw DimensionError("reduced dimension exceeds channel count");
  const SplitView view = split_view(ds);

  // PCA initialization from a deterministic stride over the train split.
  constexpr Index kPcaCap = 256;
  std::vector<FeatureMap> sample_maps;
  const Index stride = std::max<Index>(1, static_cast<Index>(view.train.size()) / kPcaCap);
  for (std::size_t i = 0; i < view.train.size(); i += static_cast<std::size_t>(stride))
    sample_maps.push_back(ds.samples[static_cast<std::size_t>(view.train[i])]);

  CoDecomposedModel model;
  model.projection = pca_init(sample_maps, m);

  Rng rng(cfg.seed);
  const double init_sd = 1.0 / std::sqrt(static_cast<double>(m * cfg.rank));
  for (Index k = 0; k < k_count; ++k)
    model.classifiers.push_back(CompactClassifier{gaussian_matrix(m, half, init_sd, rng),
                                                  gaussian_matrix(m, half, init_sd, rng), 0.0});

  Matrix vel_p = Matrix::Zero(c, m);
  std::vector<CompactClassifier> vel(static_cast<std::size_t>(k_count),
                                     CompactClassifier{Matrix::Zero(m, half), Matrix::Zero(m, half), 0.0});

  auto scores_of = [&](Index i) {
    return scores_codecomposed(model, ds.samples[static_cast<std::size_t>(i)]);
  };
  auto codecomp_objective_all = [&]() {
    double loss = 0.0;
    for (Index i : view.train) {
      const Vector s = scores_of(i);
      for (Index k = 0; k < k_count; ++k)
        loss += std::max(0.0, 1.0 - label_sign(ds, i, k) * s[k]);
    }
    loss /= static_cast<double>(view.train.size());
    for (const auto& clf : model.classifiers) loss += 0.5 * lambda * regularizer(clf);
    return loss;
  };

  TrainReport report;
  report.initial_objective = codecomp_objective_all();
  report.parameter_count = static_cast<std::size_t>(c * m) +
                           static_cast<std::size_t>(k_count) *
                               (static_cast<std::size_t>(m * cfg.rank) + 1);

  std::vector<Index> order = view.train;
  std::vector<LabeledExample> batch;

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    const auto started = Clock::now();
    const SgdConfig factor_opt{annealed_lr(cfg, epoch), cfg.momentum, 0.0};
    // Optimizer-level decay acts on the projection only; the factors carry
    // the loss-level regularizer instead.
    const SgdConfig projection_opt{annealed_lr(cfg, epoch), cfg.momentum, cfg.weight_decay};
    const bool projection_frozen = epoch < cfg.warmup_epochs;
    deterministic_shuffle(order, rng);
    for (const auto& [begin, end] : batch_ranges(static_cast<Index>(order.size()), cfg.batch_size)) {
      batch.clear();
      for (Index pos = begin; pos < end; ++pos) {
        const Index i = order[static_cast<std::size_t>(pos)];
        batch.push_back(LabeledExample{ds.samples[static_cast<std::size_t>(i)],
                                       ds.labels[static_cast<std::size_t>(i)]});
      }
      const CoDecompGradients g = gradients_codecomposed(model, batch, lambda);
      if (!projection_frozen) sgd_step(model.projection, g.projection, vel_p, projection_opt);
      for (Index k = 0; k < k_count; ++k) {
        auto& clf = model.classifiers[static_cast<std::size_t>(k)];
        auto& v = vel[static_cast<std::size_t>(k)];
        const auto& gk = g.classifiers[static_cast<std::size_t>(k)];
        sgd_step(clf.v_plus, gk.v_plus, v.v_plus, factor_opt);
        sgd_step(clf.v_minus, gk.v_minus, v.v_minus, factor_opt);
        sgd_step(clf.bias, gk.bias, v.bias, factor_opt);
      }
    }
    report.epochs.push_back(EpochStats{epoch + 1, codecomp_objective_all(),
                                       accuracy_of(ds, view.train, scores_of),
                                       accuracy_of(ds, view.test, scores_of),
                                       elapsed_ms(started)});
  }

  const auto& final_idx = view.test.empty() ? view.train : view.test;
  report.per_class_accuracy = eval_of(ds, final_idx, scores_of).per_class_accuracy;
  return TrainResult{Model{std::move(model)}, std::move(report)};
}

}  // namespace

void sgd_step(Matrix& param, const Matrix& grad, Matrix& velocity, const SgdConfig& opt) {
  if (param.rows() != grad.rows() || param.cols() != grad.cols() ||
      param.rows() != velocity.rows() || param.cols() != velocity.cols())
    throw DimensionError("sgd_step shapes disagree");
  velocity = opt.momentum * velocity - opt.learning_rate * (grad + opt.weight_decay * param);
  param += velocity;
}

void sgd_step(double& param, double grad, double& velocity, const SgdConfig& opt) {
  velocity = opt.momentum * velocity - opt.learning_rate * (grad + opt.weight_decay * param);
  param += velocity;
}

Vector class_scores(const Model& model, const FeatureMap& fm) {
  return std::visit(
      [&](const auto& concrete) -> Vector {
        using T = std::decay_t<decltype(concrete)>;
        if constexpr (std::is_same_v<T, FullModel>) {
          const PooledBilinear pooled = bilinear_pool(fm);
          Vector s(concrete.num_classes());
          for (Index k = 0; k < concrete.num_classes(); ++k)
            s[k] = score_full(concrete.classifiers[static_cast<std::size_t>(k)], pooled);
          return s;
        } else if constexpr (std::is_same_v<T, LowRankModel>) {
          Vector s(concrete.num_classes());
          for (Index k = 0; k < concrete.num_classes(); ++k)
            s[k] = score_frobenius(concrete.classifiers[static_cast<std::size_t>(k)], fm);
          return s;
        } else {
          // Reduced pooling pays off once the m x m pooled feature is shared
          // across classes; below that, score straight from projections.
          if (fm.locations() > concrete.reduced_dim() || concrete.num_classes() > 1)
            return scores_codecomposed(concrete, fm);
          Vector s(concrete.num_classes());
          for (Index k = 0; k < concrete.num_classes(); ++k)
            s[k] = score_codecomposed(concrete, fm, k);
          return s;
        }
      },
      model);
}

EvalResult evaluate(const Model& model, const FeatureDataset& dataset, Split split) {
  const std::vector<Index> idx = dataset.indices(split);
  if (idx.empty()) throw ArgumentError("evaluation split is empty");
  return eval_of(dataset, idx, [&](Index i) {
    return class_scores(model, dataset.samples[static_cast<std::size_t>(i)]);
  });
}

TrainResult train(const FeatureDataset& ds, const TrainConfig& cfg) {
  validate(cfg);
  if (ds.num_classes < 2) throw ArgumentError("training needs at least two classes");
  if (ds.size() == 0) throw ArgumentError("training needs a nonempty dataset");
  for (const FeatureMap& fm : ds.samples)
    if (fm.channels() != ds.channels) throw DataError("sample channels disagree with dataset");
  for (int label : ds.labels)
    if (label < 1 || static_cast<Index>(label) > ds.num_classes)
      throw DataError("dataset label outside [1, K]");

  switch (cfg.kind) {
    case ModelKind::full:
      return train_full_kind(ds, cfg);
    case ModelKind::lowrank:
      return train_lowrank_kind(ds, cfg);
    case ModelKind::codecomposed:
      return train_codecomp_kind(ds, cfg);
  }
  throw ArgumentError("unknown model kind");
}

FullBilinearClassifier train_trace_svm(
    const std::vector<Matrix>& pooled, const std::vector<int>& labels, const TrainConfig& cfg,
    const std::function<void(const Matrix& w, double bias)>& observer) {
  if (pooled.empty() || pooled.size() != labels.size())
    throw ArgumentError("trace SVM needs matching pooled features and labels");
  const Index c = pooled.front().rows();
  const double lambda = cfg.weight_decay;

  FullBilinearClassifier clf{Matrix::Zero(c, c), 0.0};
  Matrix vel_w = Matrix::Zero(c, c);
  double vel_b = 0.0;

  Rng rng(cfg.seed);
  std::vector<Index> order(pooled.size());
  for (std::size_t i = 0; i < pooled.size(); ++i) order[i] = static_cast<Index>(i);
  Matrix grad_w(c, c);

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    const SgdConfig opt{annealed_lr(cfg, epoch), cfg.momentum, 0.0};
    deterministic_shuffle(order, rng);
    for (const auto& [begin, end] : batch_ranges(static_cast<Index>(order.size()), cfg.batch_size)) {
      const double inv_n = 1.0 / static_cast<double>(end - begin);
      grad_w = lambda * clf.w;
      double grad_b = 0.0;
      for (Index pos = begin; pos < end; ++pos) {
        const auto i = static_cast<std::size_t>(order[static_cast<std::size_t>(pos)]);
        const double y = labels[i];
        const double s = clf.w.cwiseProduct(pooled[i]).sum() + clf.bias;
        if (1.0 - y * s > 0.0) {
          grad_w.noalias() -= (y * inv_n) * pooled[i];
          grad_b -= y * inv_n;
        }
      }
      sgd_step(clf.w, grad_w, vel_w, opt);
      sgd_step(clf.bias, grad_b, vel_b, opt);
      if (observer) observer(clf.w, clf.bias);
    }
  }
  return clf;
}

std::size_t model_parameter_count(const Model& model) {
  return std::visit(
      [](const auto& concrete) -> std::size_t {
        using T = std::decay_t<decltype(concrete)>;
        std::size_t count = 0;
        if constexpr (std::is_same_v<T, FullModel>) {
          for (const auto& clf : concrete.classifiers)
            count += static_cast<std::size_t>(clf.w.size()) + 1;
        } else if constexpr (std::is_same_v<T, LowRankModel>) {
          for (const auto& clf : concrete.classifiers)
            count += static_cast<std::size_t>(clf.u_plus.size() + clf.u_minus.size()) + 1;
        } else {
          count = static_cast<std::size_t>(concrete.projection.size());
          for (const auto& clf : concrete.classifiers)
            count += static_cast<std::size_t>(clf.v_plus.size() + clf.v_minus.size()) + 1;
        }
        return count;
      },
      model);
}

std::vector<SweepRow> sweep(const FeatureDataset& ds, std::span<const Index> ranks,
                            std::span<const Index> ms, const TrainConfig& base) {
  if (ranks.empty() || ms.empty()) throw ArgumentError("sweep needs a nonempty grid");
  TrainConfig cfg = base;
  cfg.kind = ModelKind::full;
  const TrainResult trained = train(ds, cfg);
  const auto& full = std::get<FullModel>(trained.model);
  const Index c = ds.channels;
  const Index k_count = ds.num_classes;
  const Split eval_split = ds.count(Split::test) > 0 ? Split::test : Split::train;

  std::vector<SweepRow> rows;
  for (Index r : ranks) {
    LowRankModel truncated;
    std::string rank_note;
    if (r < 1 || r > c) {
      rank_note = "rank out of range";
    } else {
      for (const auto& clf : full.classifiers)
        truncated.classifiers.push_back(truncate_to_lowrank(clf, r));
    }
    for (Index m : ms) {
      SweepRow row;
      row.m = m;
      row.r = r;
      if (!rank_note.empty()) {
        row.ok = false;
        row.note = rank_note;
        rows.push_back(row);
        continue;
      }
      try {
        const CoDecomposedModel compact = codecompose(truncated.classifiers, m);
        row.accuracy = evaluate(Model{compact}, ds, eval_split).accuracy;
        row.psnr_db = psnr(compact, truncated.classifiers);
        row.param_bytes =
            param_count(Method::lrbp_ii, TableShape{.c = c, .k = k_count, .m = m, .r = r})
                .total_bytes;
      } catch (const Error& failure) {
        row.ok = false;
        row.note = failure.what();
      }
      rows.push_back(row);
    }
  }
  return rows;
}

void write_report_csv(const TrainReport& report, const TrainConfig& cfg,
                      const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  const char* kind = cfg.kind == ModelKind::full      ? "full"
                     : cfg.kind == ModelKind::lowrank ? "lowrank"
                                                      : "codecomp";
  out << "# model=" << kind << " rank=" << cfg.rank << " m=" << cfg.reduced_dim
      << " lr=" << cfg.learning_rate << " batch=" << cfg.batch_size
      << " momentum=" << cfg.momentum << " weight_decay=" << cfg.weight_decay
      << " anneal=" << cfg.anneal_factor << " anneal_every=" << cfg.anneal_period
      << " epochs=" << cfg.epochs << " warmup=" << cfg.warmup_epochs << " seed=" << cfg.seed
      << "\n";
  out << "# parameter_count=" << report.parameter_count
      << " initial_objective=" << report.initial_objective << "\n";
  out << "# per_class_accuracy=";
  for (Index k = 0; k < report.per_class_accuracy.size(); ++k)
    out << (k > 0 ? ";" : "") << report.per_class_accuracy[k];
  out << "\n";
  out << "epoch,objective,train_accuracy,test_accuracy,wall_ms\n";
  char line[256];
  for (const EpochStats& e : report.epochs) {
    std::snprintf(line, sizeof line, "%d,%.12g,%.12g,%.12g,%.6g\n", e.epoch, e.objective,
                  e.train_accuracy, e.test_accuracy, e.wall_ms);
    out << line;
  }
  if (!out) throw Error("write failed for " + path.string());
}

}  // namespace lrbp
