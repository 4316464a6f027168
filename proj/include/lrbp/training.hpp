#pragma once

#include <filesystem>
#include <functional>
#include <span>
#include <variant>
#include <vector>

#include "lrbp/classifier.hpp"
#include "lrbp/codecomp.hpp"
#include "lrbp/dataio.hpp"

namespace lrbp {

enum class ModelKind { full, lowrank, codecomposed };

struct TrainConfig {
  double learning_rate = 1e-3;
  double anneal_factor = 0.25;
  int anneal_period = 10;  // epochs between learning-rate drops
  double weight_decay = 5e-4;
  double momentum = 0.9;
  int batch_size = 12;
  int epochs = 30;
  int warmup_epochs = 5;  // codecomposed: projection frozen for this long
  std::uint64_t seed = 1;
  ModelKind kind = ModelKind::lowrank;
  Index rank = 8;         // lowrank / codecomposed
  Index reduced_dim = 0;  // codecomposed; 0 means c/4
};

struct EpochStats {
  int epoch = 0;
  double objective = 0.0;
  double train_accuracy = 0.0;
  double test_accuracy = 0.0;
  double wall_ms = 0.0;
};

struct TrainReport {
  double initial_objective = 0.0;
  std::vector<EpochStats> epochs;
  Vector per_class_accuracy;  // on the test split (train split when test is empty)
  std::size_t parameter_count = 0;
};

using Model = std::variant<FullModel, LowRankModel, CoDecomposedModel>;

struct TrainResult {
  Model model;
  TrainReport report;
};

struct SgdConfig {
  double learning_rate = 1e-3;
  double momentum = 0.9;
  double weight_decay = 0.0;  // optimizer-level decay, distinct from the loss regularizer
};

/// v <- momentum*v - lr*(g + wd*p); p <- p + v
void sgd_step(Matrix& param, const Matrix& grad, Matrix& velocity, const SgdConfig& opt);
void sgd_step(double& param, double grad, double& velocity, const SgdConfig& opt);

struct EvalResult {
  double accuracy = 0.0;
  Vector per_class_accuracy;
  Eigen::MatrixXi confusion;  // row = true class, column = predicted class
};

/// Scores for all K classes of one feature map.
Vector class_scores(const Model& model, const FeatureMap& fm);

/// Argmax prediction over class scores; ties go to the lowest class index.
EvalResult evaluate(const Model& model, const FeatureDataset& dataset, Split split);

/// One-vs-rest training of K classifiers with momentum SGD. Deterministic for
/// a fixed config: shuffling, initialization, and reductions are all driven by
/// cfg.seed in a fixed order. The loss regularizer takes lambda =
/// cfg.weight_decay; optimizer-level decay is used only for the shared
/// projection during co-decomposed fine-tuning, never on top of the loss term.
TrainResult train(const FeatureDataset& dataset, const TrainConfig& cfg);

/// Binary trace-form SVM on precomputed pooled features; zero-initialized.
/// `observer`, when set, sees (W, bias) after every parameter update.
FullBilinearClassifier train_trace_svm(
    const std::vector<Matrix>& pooled, const std::vector<int>& labels, const TrainConfig& cfg,
    const std::function<void(const Matrix& w, double bias)>& observer = {});

struct SweepRow {
  Index m = 0;
  Index r = 0;
  double accuracy = 0.0;
  double psnr_db = 0.0;
  std::size_t param_bytes = 0;
  bool ok = true;
  std::string note;
};

/// Train one full model, then walk the (rank, reduced-dim) grid: truncate the
/// classifiers to each rank, co-decompose to each m, and evaluate without any
/// fine-tuning. Failed cells are marked and do not stop the sweep.
std::vector<SweepRow> sweep(const FeatureDataset& dataset, std::span<const Index> ranks,
                            std::span<const Index> ms, const TrainConfig& base);

std::size_t model_parameter_count(const Model& model);

void write_report_csv(const TrainReport& report, const TrainConfig& cfg,
                      const std::filesystem::path& path);

}  // namespace lrbp
