#include "lrbp/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <map>

#include "lrbp/linalg.hpp"
#include "lrbp/random.hpp"

namespace lrbp {

namespace {

using Clock = std::chrono::steady_clock;

volatile double g_sink = 0.0;  // keeps timed kernels observable

void require(bool ok, const char* what) {
  if (!ok) throw ArgumentError(std::string("cost model: ") + what);
}

double median(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

struct Timing {
  double median_ms = 0.0;
  double mad_ms = 0.0;
};

// Median-of-reps timing with automatic inner repetition so each sample stays
// above timer noise. Spread is the median absolute deviation.
Timing robust_time_ms(const std::function<double()>& kernel, int reps) {
  constexpr double kFloorMs = 0.2;
  g_sink = g_sink + kernel();  // warm caches, pre-touch buffers
  const auto probe_start = Clock::now();
  g_sink = g_sink + kernel();
  const double probe_ms = std::chrono::duration<double, std::milli>(Clock::now() - probe_start).count();
  const int inner = probe_ms >= kFloorMs
                        ? 1
                        : static_cast<int>(std::ceil(kFloorMs / std::max(probe_ms, 1e-7)));

  std::vector<double> samples;
  samples.reserve(static_cast<std::size_t>(reps));
  for (int rep = 0; rep < reps; ++rep) {
    const auto start = Clock::now();
    for (int it = 0; it < inner; ++it) g_sink = g_sink + kernel();
    const double ms = std::chrono::duration<double, std::milli>(Clock::now() - start).count();
    samples.push_back(ms / inner);
  }

  Timing timing;
  timing.median_ms = median(samples);
  for (double& sample : samples) sample = std::abs(sample - timing.median_ms);
  timing.mad_ms = median(std::move(samples));
  return timing;
}

double fit_exponent(const std::vector<double>& xs, const std::vector<double>& ts) {
  const std::size_t n = xs.size();
  double sx = 0.0, st = 0.0, sxx = 0.0, sxt = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double lx = std::log(xs[i]);
    const double lt = std::log(ts[i]);
    sx += lx;
    st += lt;
    sxx += lx * lx;
    sxt += lx * lt;
  }
  const double denom = static_cast<double>(n) * sxx - sx * sx;
  return (static_cast<double>(n) * sxt - sx * st) / denom;
}

struct MethodKernels {
  std::function<double()> feature;
  std::function<double()> classify;
};

// Workload state for one (method, shape) cell; buffers preallocated so the
// timed region is pure compute.
class Workload {
 public:
  Workload(Method method, Index c, Index hw, const BenchGrid& grid, std::uint64_t seed)
      : method_(method), c_(c), hw_(hw), k_(grid.k), m_(grid.m), r_(grid.r), d_(grid.d) {
    Rng rng(seed);
    x_ = gaussian_matrix(c, hw, 1.0, rng);
    switch (method) {
      case Method::full_bilinear: {
        pooled_.resize(c, c);
        for (Index k = 0; k < k_; ++k) full_w_.push_back(gaussian_matrix(c, c, 1.0, rng));
        break;
      }
      case Method::random_maclaurin: {
        proj1_ = rademacher_matrix(d_, c, rng);
        proj2_ = rademacher_matrix(d_, c, rng);
        rm_classifiers_ = gaussian_matrix(k_, d_, 1.0, rng);
        phi_.resize(d_);
        tmp1_.resize(d_, hw);
        tmp2_.resize(d_, hw);
        break;
      }
      case Method::lrbp_i:
      case Method::lrbp_ii: {
        projection_ = gaussian_matrix(c, m_, 1.0, rng);
        projected_.resize(m_, hw);
        reduced_.resize(m_, m_);
        const Index half = r_ / 2;
        for (Index k = 0; k < k_; ++k) {
          v_plus_.push_back(gaussian_matrix(m_, half, 1.0, rng));
          v_minus_.push_back(gaussian_matrix(m_, half, 1.0, rng));
        }
        break;
      }
      case Method::tensor_sketch:
        break;
    }
  }

  MethodKernels kernels() {
    switch (method_) {
      case Method::full_bilinear:
        return {[this] {
                  pooled_.setZero();
                  pooled_.selfadjointView<Eigen::Lower>().rankUpdate(x_);
                  pooled_.triangularView<Eigen::StrictlyUpper>() = pooled_.transpose();
                  return pooled_(0, 0);
                },
                [this] {
                  double acc = 0.0;
                  for (const Matrix& w : full_w_) acc += w.cwiseProduct(pooled_).sum();
                  return acc;
                }};
      case Method::random_maclaurin:
        return {[this] {
                  tmp1_.noalias() = proj1_ * x_;
                  tmp2_.noalias() = proj2_ * x_;
                  phi_.noalias() =
                      tmp1_.cwiseProduct(tmp2_).rowwise().sum() / std::sqrt(static_cast<double>(d_));
                  return phi_[0];
                },
                [this] { return (rm_classifiers_ * phi_).sum(); }};
      case Method::lrbp_i:
        return {[this] {
                  projected_.noalias() = projection_.transpose() * x_;
                  return projected_(0, 0);
                },
                [this] {
                  double acc = 0.0;
                  for (Index k = 0; k < k_; ++k)
                    acc += (v_plus_[static_cast<std::size_t>(k)].transpose() * projected_).squaredNorm() -
                           (v_minus_[static_cast<std::size_t>(k)].transpose() * projected_).squaredNorm();
                  return acc;
                }};
      case Method::lrbp_ii:
        return {[this] {
                  projected_.noalias() = projection_.transpose() * x_;
                  reduced_.setZero();
                  reduced_.selfadjointView<Eigen::Lower>().rankUpdate(projected_);
                  reduced_.triangularView<Eigen::StrictlyUpper>() = reduced_.transpose();
                  return reduced_(0, 0);
                },
                [this] {
                  double acc = 0.0;
                  for (Index k = 0; k < k_; ++k) {
                    const Matrix& vp = v_plus_[static_cast<std::size_t>(k)];
                    const Matrix& vm = v_minus_[static_cast<std::size_t>(k)];
                    acc += vp.cwiseProduct(reduced_ * vp).sum() - vm.cwiseProduct(reduced_ * vm).sum();
                  }
                  return acc;
                }};
      case Method::tensor_sketch:
        break;
    }
    throw ArgumentError("method has no executable kernels");
  }

 private:
  Method method_;
  Index c_, hw_, k_, m_, r_, d_;
  Matrix x_;
  Matrix pooled_;
  std::vector<Matrix> full_w_;
  Matrix proj1_, proj2_, rm_classifiers_;
  Matrix tmp1_, tmp2_;
  Vector phi_;
  Matrix projection_, projected_, reduced_;
  std::vector<Matrix> v_plus_, v_minus_;
};

}  // namespace

std::string_view method_name(Method method) {
  switch (method) {
    case Method::full_bilinear: return "full_bilinear";
    case Method::random_maclaurin: return "random_maclaurin";
    case Method::tensor_sketch: return "tensor_sketch";
    case Method::lrbp_i: return "lrbp_I";
    case Method::lrbp_ii: return "lrbp_II";
  }
  return "unknown";
}

std::optional<Method> parse_method(std::string_view name) {
  for (Method method : {Method::full_bilinear, Method::random_maclaurin, Method::tensor_sketch,
                        Method::lrbp_i, Method::lrbp_ii})
    if (name == method_name(method)) return method;
  if (name == "full") return Method::full_bilinear;
  if (name == "rm") return Method::random_maclaurin;
  if (name == "ts") return Method::tensor_sketch;
  return std::nullopt;
}

CostModel param_count(Method method, const TableShape& s) {
  CostModel cost;
  cost.method = method;
  require(s.c > 0 && s.k > 0, "c and K are required");
  const auto c = static_cast<std::size_t>(s.c);
  const auto k = static_cast<std::size_t>(s.k);
  switch (method) {
    case Method::full_bilinear:
      cost.feature_dim = s.c * s.c;
      cost.feature_params = 0;
      cost.classifier_params = k * c * c;
      break;
    case Method::random_maclaurin:
      require(s.d > 0, "d is required for random_maclaurin");
      cost.feature_dim = s.d;
      cost.feature_params = 2 * c * static_cast<std::size_t>(s.d);
      cost.classifier_params = k * static_cast<std::size_t>(s.d);
      break;
    case Method::tensor_sketch:
      require(s.d > 0, "d is required for tensor_sketch");
      cost.feature_dim = s.d;
      cost.feature_params = 2 * c;
      cost.classifier_params = k * static_cast<std::size_t>(s.d);
      break;
    case Method::lrbp_i:
      require(s.m > 0 && s.r > 0, "m and r are required for lrbp");
      require(s.h > 0 && s.w > 0, "h and w are required for the lrbp_I feature dimension");
      cost.feature_dim = s.m * s.hw();
      cost.feature_params = c * static_cast<std::size_t>(s.m);
      cost.classifier_params = k * static_cast<std::size_t>(s.r) * static_cast<std::size_t>(s.m);
      break;
    case Method::lrbp_ii:
      require(s.m > 0 && s.r > 0, "m and r are required for lrbp");
      cost.feature_dim = s.m * s.m;
      cost.feature_params = c * static_cast<std::size_t>(s.m);
      cost.classifier_params = k * static_cast<std::size_t>(s.r) * static_cast<std::size_t>(s.m);
      break;
  }
  cost.total_bytes = 4 * cost.total_params();
  return cost;
}

CostModel flop_estimate(Method method, const TableShape& s) {
  require(s.h > 0 && s.w > 0, "h and w are required for flop counts");
  CostModel cost = param_count(method, s);
  const double hw = static_cast<double>(s.hw());
  const double c = static_cast<double>(s.c);
  const double k = static_cast<double>(s.k);
  const double m = static_cast<double>(s.m);
  const double r = static_cast<double>(s.r);
  const double d = static_cast<double>(s.d);
  switch (method) {
    case Method::full_bilinear:
      cost.feature_flops = 2.0 * hw * c * c;
      cost.classify_flops = 2.0 * k * c * c;
      break;
    case Method::random_maclaurin:
      cost.feature_flops = 4.0 * hw * c * d + hw * d;  // two projections plus the Hadamard product
      cost.classify_flops = 2.0 * k * d;
      break;
    case Method::tensor_sketch:
      cost.feature_flops = hw * (2.0 * c + 5.0 * d * std::log2(d));
      cost.classify_flops = 2.0 * k * d;
      break;
    case Method::lrbp_i:
      cost.feature_flops = 2.0 * hw * m * c;
      cost.classify_flops = 2.0 * k * r * m * hw;
      break;
    case Method::lrbp_ii:
      cost.feature_flops = 2.0 * hw * m * c + 2.0 * hw * m * m;
      cost.classify_flops = 2.0 * k * r * m * m;
      break;
  }
  return cost;
}

Vector random_maclaurin_pool(const FeatureMap& fm, const Matrix& w1, const Matrix& w2) {
  if (w1.rows() != w2.rows() || w1.cols() != w2.cols())
    throw DimensionError("projection matrices must share one shape");
  if (w1.cols() != fm.channels())
    throw DimensionError("projection columns must match feature map channels");
  const double scale = 1.0 / std::sqrt(static_cast<double>(w1.rows()));
  return scale * (w1 * fm.descriptors).cwiseProduct(w2 * fm.descriptors).rowwise().sum();
}

const ScalingFit* BenchReport::find_fit(Method method, std::string_view stage,
                                        std::string_view variable) const {
  for (const ScalingFit& fit : fits)
    if (fit.method == method && fit.stage == stage && fit.variable == variable) return &fit;
  return nullptr;
}

BenchReport time_benchmark(std::span<const Method> methods, const BenchGrid& grid, int reps,
                           std::uint64_t seed) {
  if (grid.c_values.empty() && grid.hw_values.empty())
    throw ArgumentError("benchmark grid is empty");
  if (reps < 5) throw ArgumentError("benchmark needs reps >= 5");

  BenchReport report;
  report.crossover_hw = std::numeric_limits<double>::quiet_NaN();

  struct SweepPoint {
    double value;
    double feature_ms;
    double classify_ms;
  };
  std::map<Method, std::vector<SweepPoint>> c_sweep;
  std::map<Method, std::vector<SweepPoint>> hw_sweep;
  std::map<std::pair<int, std::pair<Index, Index>>, bool> seen;

  auto run_cell = [&](Method method, Index c, Index hw, std::vector<SweepPoint>& sweep,
                      double swept_value) {
    Workload workload(method, c, hw, grid, seed);
    MethodKernels kernels = workload.kernels();
    const Timing feature = robust_time_ms(kernels.feature, reps);
    const Timing classify = robust_time_ms(kernels.classify, reps);
    sweep.push_back(SweepPoint{swept_value, feature.median_ms, classify.median_ms});
    const auto key = std::make_pair(static_cast<int>(method), std::make_pair(c, hw));
    if (!seen[key]) {
      seen[key] = true;
      report.rows.push_back(BenchRow{method, 1, hw, c, grid.k, grid.m, grid.r, grid.d,
                                     feature.median_ms, classify.median_ms, feature.mad_ms,
                                     classify.mad_ms, reps});
    }
  };

  for (Method method : methods) {
    if (method == Method::tensor_sketch) {
      report.skipped.push_back(method);  // analytic-only: no executable kernel
      continue;
    }
    for (Index c : grid.c_values)
      run_cell(method, c, grid.hw_fixed, c_sweep[method], static_cast<double>(c));
    for (Index hw : grid.hw_values)
      run_cell(method, grid.c_fixed, hw, hw_sweep[method], static_cast<double>(hw));
  }

  auto add_fits = [&](const std::map<Method, std::vector<SweepPoint>>& sweep,
                      const std::string& variable) {
    for (const auto& [method, points] : sweep) {
      if (points.size() < 2) continue;
      std::vector<double> xs, feature_ts, classify_ts;
      for (const SweepPoint& p : points) {
        xs.push_back(p.value);
        feature_ts.push_back(std::max(p.feature_ms, 1e-9));
        classify_ts.push_back(std::max(p.classify_ms, 1e-9));
      }
      report.fits.push_back(ScalingFit{method, "feature", variable, fit_exponent(xs, feature_ts)});
      report.fits.push_back(ScalingFit{method, "classify", variable, fit_exponent(xs, classify_ts)});
    }
  };
  add_fits(c_sweep, "c");
  add_fits(hw_sweep, "hw");

  // LRBP-I vs LRBP-II classification crossover over the hw sweep.
  const auto it_i = hw_sweep.find(Method::lrbp_i);
  const auto it_ii = hw_sweep.find(Method::lrbp_ii);
  if (it_i != hw_sweep.end() && it_ii != hw_sweep.end() &&
      it_i->second.size() == it_ii->second.size()) {
    const auto& a = it_i->second;
    const auto& b = it_ii->second;
    for (std::size_t i = 1; i < a.size(); ++i) {
      const double f_prev = std::log(a[i - 1].classify_ms / b[i - 1].classify_ms);
      const double f_here = std::log(a[i].classify_ms / b[i].classify_ms);
      if (f_prev == 0.0) {
        report.crossover_hw = a[i - 1].value;
        break;
      }
      if ((f_prev < 0.0) != (f_here < 0.0)) {
        const double lx_prev = std::log(a[i - 1].value);
        const double lx_here = std::log(a[i].value);
        const double t = f_prev / (f_prev - f_here);
        report.crossover_hw = std::exp(lx_prev + t * (lx_here - lx_prev));
        break;
      }
    }
  }
  return report;
}

void write_bench_csv(const BenchReport& report, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out << "method,h,w,c,K,m,r,d,feature_ms,classify_ms,reps\n";
  char line[256];
  for (const BenchRow& row : report.rows) {
    std::snprintf(line, sizeof line, "%s,%lld,%lld,%lld,%lld,%lld,%lld,%lld,%.6g,%.6g,%d\n",
                  std::string(method_name(row.method)).c_str(), static_cast<long long>(row.h),
                  static_cast<long long>(row.w), static_cast<long long>(row.c),
                  static_cast<long long>(row.k), static_cast<long long>(row.m),
                  static_cast<long long>(row.r), static_cast<long long>(row.d), row.feature_ms,
                  row.classify_ms, row.reps);
    out << line;
  }
  if (!out) throw Error("write failed for " + path.string());
}

}  // namespace lrbp
