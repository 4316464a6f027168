#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lrbp/types.hpp"

namespace lrbp {

enum class Method { full_bilinear, random_maclaurin, tensor_sketch, lrbp_i, lrbp_ii };

std::string_view method_name(Method method);
std::optional<Method> parse_method(std::string_view name);

/// Shape inputs for the analytic cost table. Fields default to zero; each
/// query validates that the fields its method needs were actually set.
struct TableShape {
  Index h = 0;
  Index w = 0;
  Index c = 0;
  Index k = 0;  // number of classes
  Index m = 0;  // reduced dimension
  Index r = 0;  // classifier rank
  Index d = 0;  // compact-baseline feature dimension

  Index hw() const { return h * w; }
};

/// Analytic memory/compute model of one method at one shape. Parameter bytes
/// assume 4-byte floats; FLOP counts charge 2 per multiply-add and keep only
/// the leading-order terms.
struct CostModel {
  Method method = Method::full_bilinear;
  Index feature_dim = 0;
  double feature_flops = 0.0;
  double classify_flops = 0.0;
  std::size_t feature_params = 0;
  std::size_t classifier_params = 0;
  std::size_t total_bytes = 0;

  std::size_t total_params() const { return feature_params + classifier_params; }
};

CostModel param_count(Method method, const TableShape& shape);
CostModel flop_estimate(Method method, const TableShape& shape);

/// phi(X) = sum_i (1/sqrt(d)) (W1 x_i) .* (W2 x_i) for +-1 projection
/// matrices W1, W2 of shape d x c. The expected dot product of two such
/// features is the squared dot product of the inputs.
Vector random_maclaurin_pool(const FeatureMap& fm, const Matrix& w1, const Matrix& w2);

/// L-shaped timing grid: channel counts swept at one fixed spatial size, and
/// spatial sizes swept at one fixed channel count.
struct BenchGrid {
  std::vector<Index> c_values;
  std::vector<Index> hw_values;
  Index c_fixed = 256;
  Index hw_fixed = 196;
  Index k = 8;
  Index m = 32;
  Index r = 8;
  Index d = 1024;
};

struct BenchRow {
  Method method = Method::full_bilinear;
  Index h = 1;
  Index w = 1;
  Index c = 0;
  Index k = 0;
  Index m = 0;
  Index r = 0;
  Index d = 0;
  double feature_ms = 0.0;
  double classify_ms = 0.0;
  // spread across repetitions, as median absolute deviation
  double feature_mad_ms = 0.0;
  double classify_mad_ms = 0.0;
  int reps = 0;
};

struct ScalingFit {
  Method method = Method::full_bilinear;
  std::string stage;     // "feature" or "classify"
  std::string variable;  // "c" or "hw"
  double exponent = 0.0;
};

struct BenchReport {
  std::vector<BenchRow> rows;
  std::vector<ScalingFit> fits;
  // Spatial size where the LRBP-I and LRBP-II classification costs cross,
  // log-interpolated from the hw sweep; NaN when the sweep does not bracket it.
  double crossover_hw = 0.0;
  std::vector<Method> skipped;

  const ScalingFit* find_fit(Method method, std::string_view stage, std::string_view variable) const;
};

/// Median-of-reps wall-clock timing of feature computation and classification
/// for each requested method over the grid. Single-threaded; workloads are
/// generated deterministically from the seed. Methods without an executable
/// implementation are reported in `skipped` rather than failing the run.
BenchReport time_benchmark(std::span<const Method> methods, const BenchGrid& grid, int reps,
                           std::uint64_t seed);

void write_bench_csv(const BenchReport& report, const std::filesystem::path& path);

}  // namespace lrbp
