#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <variant>
#include <vector>

#include "lrbp/classifier.hpp"
#include "lrbp/codecomp.hpp"
#include "lrbp/types.hpp"

namespace lrbp {

enum class Split : std::uint8_t { train = 0, test = 1 };

/// Labeled feature maps with a fixed train/test assignment. Labels live in
/// [1, K]; every map shares one (h, w, c) shape.
struct FeatureDataset {
  Index height = 0;
  Index width = 0;
  Index channels = 0;
  Index num_classes = 0;
  std::vector<FeatureMap> samples;
  std::vector<int> labels;
  std::vector<Split> splits;
  std::string provenance;

  Index size() const { return static_cast<Index>(samples.size()); }
  Index count(Split split) const;
  std::vector<Index> indices(Split split) const;
};

using StoredModel = std::variant<LowRankModel, CoDecomposedModel>;

/// Binary container: magic "LRBP", version u32, record type u32, little
/// endian throughout, float32 payloads. Writes go to a temp file that is
/// renamed into place, so interrupted saves never leave a loadable torso.
void save_dataset(const FeatureDataset& dataset, const std::filesystem::path& path);
FeatureDataset load_dataset(const std::filesystem::path& path);

void save_model(const LowRankModel& model, const std::filesystem::path& path);
void save_model(const CoDecomposedModel& model, const std::filesystem::path& path);
StoredModel load_model(const std::filesystem::path& path);
LowRankModel load_lowrank_model(const std::filesystem::path& path);
CoDecomposedModel load_codecomp_model(const std::filesystem::path& path);

struct SynthConfig {
  int classes = 2;
  int per_class = 500;  // per class, per split
  Index height = 6;
  Index width = 6;
  Index channels = 16;
  double alpha = 4.0;
  std::uint64_t seed = 1;
  bool relu = false;
};

/// Covariance-separated classes: every class draws descriptors with zero mean
/// and covariance I + alpha * Q_k Q_k^T for a class-specific random 2-plane
/// Q_k. Mean pooling carries no class signal; second-order pooling does.
FeatureDataset synth_covariance_dataset(const SynthConfig& config);

struct CsvLayout {
  Index height = 1;
  Index width = 1;
  Index channels = 1;
  Split assign_to = Split::train;
};

/// One sample per row: label, then c*h*w values in channel-major, row-major
/// spatial order.
FeatureDataset import_csv_features(const std::filesystem::path& path, const CsvLayout& layout);
void export_csv_features(const FeatureDataset& dataset, const std::filesystem::path& path);

}  // namespace lrbp
