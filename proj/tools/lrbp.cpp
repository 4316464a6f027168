// lrbp: synthetic benchmarks, training, compression, and cost-model tooling
// for low-rank bilinear pooling classifiers.

#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <string>
#include <vector>

#include "lrbp/bench.hpp"
#include "lrbp/dataio.hpp"
#include "lrbp/training.hpp"

namespace {

using nlohmann::json;

constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;
constexpr int kExitFormat = 4;
constexpr int kExitInvalid = 5;

constexpr const char* kExitCodeHelp =
    "Exit codes:\n"
    "  0  success\n"
    "  2  usage error (unknown flag, bad value, missing required option)\n"
    "  3  missing or unreadable/unwritable file\n"
    "  4  container format error (bad magic, version, or record type)\n"
    "  5  invalid data or arguments (dimension mismatch, schema mismatch)\n";

std::vector<lrbp::Index> parse_count_list(const std::string& text) {
  std::vector<lrbp::Index> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t comma = text.find(',', start);
    const std::string token = text.substr(start, comma - start);
    if (token.empty()) throw lrbp::ArgumentError("empty entry in list '" + text + "'");
    out.push_back(static_cast<lrbp::Index>(std::stoll(token)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

// "c=64..1024" -> doubling sequence 64, 128, ..., capped at the upper bound
std::vector<lrbp::Index> doubling_range(const std::string& spec, const std::string& key) {
  const std::string prefix = key + "=";
  if (spec.rfind(prefix, 0) != 0)
    throw lrbp::ArgumentError("grid token '" + spec + "' does not start with '" + prefix + "'");
  const std::string range = spec.substr(prefix.size());
  const std::size_t dots = range.find("..");
  if (dots == std::string::npos)
    throw lrbp::ArgumentError("grid token '" + spec + "' needs the form " + key + "=LO..HI");
  const long long lo = std::stoll(range.substr(0, dots));
  const long long hi = std::stoll(range.substr(dots + 2));
  if (lo < 1 || hi < lo) throw lrbp::ArgumentError("bad grid bounds in '" + spec + "'");
  std::vector<lrbp::Index> values;
  for (long long v = lo; v <= hi; v *= 2) values.push_back(static_cast<lrbp::Index>(v));
  return values;
}

lrbp::ModelKind parse_kind(const std::string& name) {
  if (name == "full") return lrbp::ModelKind::full;
  if (name == "lowrank") return lrbp::ModelKind::lowrank;
  if (name == "codecomp") return lrbp::ModelKind::codecomposed;
  throw lrbp::ArgumentError("unknown model kind '" + name + "' (full|lowrank|codecomp)");
}

lrbp::LowRankModel as_lowrank_set(const lrbp::FullModel& model) {
  lrbp::LowRankModel out;
  for (const auto& clf : model.classifiers)
    out.classifiers.push_back(lrbp::truncate_to_lowrank(clf, clf.w.rows()));
  return out;
}

lrbp::FullModel as_full_set(const lrbp::LowRankModel& model) {
  lrbp::FullModel out;
  for (const auto& clf : model.classifiers) out.classifiers.push_back(lrbp::to_full(clf));
  return out;
}

struct TrainFlags {
  std::string kind = "lowrank";
  lrbp::Index rank = 8;
  lrbp::Index m = 0;
  double lr = 1e-3;
  int batch = 12;
  double momentum = 0.9;
  double weight_decay = 5e-4;
  double anneal = 0.25;
  int anneal_every = 10;
  int epochs = 30;
  int warmup = 5;
  std::uint64_t seed = 1;

  lrbp::TrainConfig to_config() const {
    lrbp::TrainConfig cfg;
    cfg.kind = parse_kind(kind);
    cfg.rank = rank;
    cfg.reduced_dim = m;
    cfg.learning_rate = lr;
    cfg.batch_size = batch;
    cfg.momentum = momentum;
    cfg.weight_decay = weight_decay;
    cfg.anneal_factor = anneal;
    cfg.anneal_period = anneal_every;
    cfg.epochs = epochs;
    cfg.warmup_epochs = warmup;
    cfg.seed = seed;
    return cfg;
  }
};

void add_train_flags(CLI::App* cmd, TrainFlags& flags, bool with_kind) {
  if (with_kind)
    cmd->add_option("--model", flags.kind, "Model kind: full|lowrank|codecomp")
        ->default_val("lowrank");
  cmd->add_option("--rank", flags.rank, "Classifier rank r (even)")->default_val(8);
  cmd->add_option("--m", flags.m, "Reduced dimension for codecomp (0 = c/4)")->default_val(0);
  cmd->add_option("--lr", flags.lr, "Learning rate")->default_val(1e-3);
  cmd->add_option("--batch", flags.batch, "Batch size")->default_val(12);
  cmd->add_option("--momentum", flags.momentum, "SGD momentum")->default_val(0.9);
  cmd->add_option("--weight-decay", flags.weight_decay, "Loss regularizer weight lambda")
      ->default_val(5e-4);
  cmd->add_option("--anneal", flags.anneal, "Learning-rate anneal factor")->default_val(0.25);
  cmd->add_option("--anneal-every", flags.anneal_every, "Epochs between anneals")->default_val(10);
  cmd->add_option("--epochs", flags.epochs, "Total epochs")->default_val(30);
  cmd->add_option("--warmup", flags.warmup, "Classifier-only epochs before joint fine-tuning")
      ->default_val(5);
  cmd->add_option("--seed", flags.seed, "RNG seed")->default_val(1);
}

void save_trained(const lrbp::Model& model, const std::string& path) {
  if (const auto* full = std::get_if<lrbp::FullModel>(&model)) {
    lrbp::save_model(as_lowrank_set(*full), path);  // exact rank-c representation
  } else if (const auto* lowrank = std::get_if<lrbp::LowRankModel>(&model)) {
    lrbp::save_model(*lowrank, path);
  } else {
    lrbp::save_model(std::get<lrbp::CoDecomposedModel>(model), path);
  }
}

int cmd_synth(const lrbp::SynthConfig& config, const std::string& out) {
  const lrbp::FeatureDataset ds = lrbp::synth_covariance_dataset(config);
  lrbp::save_dataset(ds, out);
  std::printf("wrote %s: %lld samples, %lld classes, %lldx%lldx%lld\n", out.c_str(),
              static_cast<long long>(ds.size()), static_cast<long long>(ds.num_classes),
              static_cast<long long>(ds.height), static_cast<long long>(ds.width),
              static_cast<long long>(ds.channels));
  return 0;
}

int cmd_train(const std::string& data, const TrainFlags& flags, const std::string& out,
              const std::string& report_path) {
  const lrbp::FeatureDataset ds = lrbp::load_dataset(data);
  const lrbp::TrainConfig cfg = flags.to_config();
  const lrbp::TrainResult result = lrbp::train(ds, cfg);
  save_trained(result.model, out);
  if (!report_path.empty()) lrbp::write_report_csv(result.report, cfg, report_path);

  const lrbp::EpochStats& last = result.report.epochs.back();
  std::printf("trained %s on %s: objective %.6g train_acc %.4f test_acc %.4f -> %s\n",
              flags.kind.c_str(), data.c_str(), last.objective, last.train_accuracy,
              last.test_accuracy, out.c_str());
  return 0;
}

int cmd_eval(const std::string& data, const std::string& model_path, const std::string& out) {
  const lrbp::FeatureDataset ds = lrbp::load_dataset(data);
  const lrbp::StoredModel stored = lrbp::load_model(model_path);
  const lrbp::Model model = std::holds_alternative<lrbp::LowRankModel>(stored)
                                ? lrbp::Model{std::get<lrbp::LowRankModel>(stored)}
                                : lrbp::Model{std::get<lrbp::CoDecomposedModel>(stored)};

  const bool has_test = ds.count(lrbp::Split::test) > 0;
  const lrbp::Split split = has_test ? lrbp::Split::test : lrbp::Split::train;
  const lrbp::EvalResult result = lrbp::evaluate(model, ds, split);

  json metrics;
  metrics["accuracy"] = result.accuracy;
  metrics["per_class"] =
      std::vector<double>(result.per_class_accuracy.begin(), result.per_class_accuracy.end());
  std::vector<std::vector<int>> confusion;
  for (lrbp::Index i = 0; i < result.confusion.rows(); ++i)
    confusion.emplace_back(result.confusion.row(i).begin(), result.confusion.row(i).end());
  metrics["confusion"] = confusion;
  metrics["split"] = has_test ? "test" : "train";
  metrics["samples"] = ds.count(split);

  std::ofstream file(out);
  if (!file) throw lrbp::Error("cannot open " + out + " for writing");
  file << metrics.dump(2) << "\n";
  std::printf("accuracy %.4f on %s split -> %s\n", result.accuracy, has_test ? "test" : "train",
              out.c_str());
  return 0;
}

int cmd_truncate(const std::string& model_path, lrbp::Index rank, const std::string& out) {
  const lrbp::LowRankModel stored = lrbp::load_lowrank_model(model_path);
  lrbp::LowRankModel truncated;
  for (const auto& clf : stored.classifiers)
    truncated.classifiers.push_back(lrbp::truncate_to_lowrank(lrbp::to_full(clf), rank));
  lrbp::save_model(truncated, out);
  std::printf("truncated %lld classifiers to rank %lld -> %s\n",
              static_cast<long long>(stored.num_classes()), static_cast<long long>(rank),
              out.c_str());
  return 0;
}

int cmd_codecompose(const std::string& model_path, lrbp::Index m, const std::string& out) {
  const lrbp::LowRankModel stored = lrbp::load_lowrank_model(model_path);
  const lrbp::CoDecomposedModel compact = lrbp::codecompose(stored.classifiers, m);
  lrbp::save_model(compact, out);
  std::printf("codecomposed %lld classifiers into m=%lld (psnr %.2f dB) -> %s\n",
              static_cast<long long>(stored.num_classes()), static_cast<long long>(m),
              lrbp::psnr(compact, stored.classifiers), out.c_str());
  return 0;
}

int cmd_spectrum(const std::string& model_path, const std::string& out) {
  const lrbp::LowRankModel stored = lrbp::load_lowrank_model(model_path);
  const lrbp::FullModel full = as_full_set(stored);
  const lrbp::SpectrumStats stats = lrbp::spectrum(full.classifiers);

  std::ofstream file(out);
  if (!file) throw lrbp::Error("cannot open " + out + " for writing");
  file << "rank_index,mean_eig,std_eig\n";
  char line[128];
  for (lrbp::Index i = 0; i < stats.mean.size(); ++i) {
    std::snprintf(line, sizeof line, "%lld,%.12g,%.12g\n", static_cast<long long>(i + 1),
                  stats.mean[i], stats.stddev[i]);
    file << line;
  }
  std::printf("wrote eigenvalue spectrum over %lld ranks -> %s\n",
              static_cast<long long>(stats.mean.size()), out.c_str());
  return 0;
}

int cmd_sweep(const std::string& data, const std::string& ranks_text, const std::string& ms_text,
              const TrainFlags& flags, const std::string& out) {
  const lrbp::FeatureDataset ds = lrbp::load_dataset(data);
  const std::vector<lrbp::Index> ranks = parse_count_list(ranks_text);
  const std::vector<lrbp::Index> ms = parse_count_list(ms_text);
  const lrbp::TrainConfig cfg = flags.to_config();
  const std::vector<lrbp::SweepRow> rows = lrbp::sweep(ds, ranks, ms, cfg);

  std::ofstream file(out);
  if (!file) throw lrbp::Error("cannot open " + out + " for writing");
  file << "m,r,accuracy,psnr_db,param_bytes\n";
  char line[160];
  for (const lrbp::SweepRow& row : rows) {
    if (row.ok) {
      std::snprintf(line, sizeof line, "%lld,%lld,%.6g,%.6g,%zu\n", static_cast<long long>(row.m),
                    static_cast<long long>(row.r), row.accuracy, row.psnr_db, row.param_bytes);
    } else {
      std::snprintf(line, sizeof line, "%lld,%lld,nan,nan,0\n", static_cast<long long>(row.m),
                    static_cast<long long>(row.r));
      std::fprintf(stderr, "cell m=%lld r=%lld failed: %s\n", static_cast<long long>(row.m),
                   static_cast<long long>(row.r), row.note.c_str());
    }
    file << line;
  }
  std::printf("wrote %zu sweep rows -> %s\n", rows.size(), out.c_str());
  return 0;
}

void print_analytic_table(lrbp::Index c, lrbp::Index k) {
  // reference shapes: m=100, r=8; the compact-baseline literature quotes both
  // d = 10,000 and d = 8,192, so both are reported
  std::printf("analytic parameter totals (c=%lld, K=%lld, m=100, r=8):\n",
              static_cast<long long>(c), static_cast<long long>(k));
  for (lrbp::Index d : {static_cast<lrbp::Index>(10000), static_cast<lrbp::Index>(8192)}) {
    std::printf("  d=%lld:\n", static_cast<long long>(d));
    for (lrbp::Method method :
         {lrbp::Method::full_bilinear, lrbp::Method::random_maclaurin,
          lrbp::Method::tensor_sketch, lrbp::Method::lrbp_i, lrbp::Method::lrbp_ii}) {
      const lrbp::CostModel cost = lrbp::param_count(
          method, lrbp::TableShape{.h = 28, .w = 28, .c = c, .k = k, .m = 100, .r = 8, .d = d});
      std::printf("    %-17s %12zu params  %9.2f MiB\n",
                  std::string(lrbp::method_name(method)).c_str(), cost.total_params(),
                  static_cast<double>(cost.total_bytes) / (1024.0 * 1024.0));
    }
  }
}

int cmd_bench(const std::vector<std::string>& methods_text,
              const std::vector<std::string>& grid_text, int reps, std::uint64_t seed,
              lrbp::Index k, lrbp::Index m, lrbp::Index r, lrbp::Index d, lrbp::Index c_fixed,
              lrbp::Index hw_fixed, const std::string& out) {
  std::vector<std::string> names;
  for (const std::string& token : methods_text) {  // tokens may be comma-joined
    std::size_t start = 0;
    while (start <= token.size()) {
      const std::size_t comma = token.find(',', start);
      names.push_back(token.substr(start, comma - start));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
  }
  std::vector<lrbp::Method> methods;
  for (const std::string& name : names) {
    if (name == "all") {
      methods = {lrbp::Method::full_bilinear, lrbp::Method::random_maclaurin,
                 lrbp::Method::tensor_sketch, lrbp::Method::lrbp_i, lrbp::Method::lrbp_ii};
      break;
    }
    const auto parsed = lrbp::parse_method(name);
    if (!parsed) throw lrbp::ArgumentError("unknown method '" + name + "'");
    methods.push_back(*parsed);
  }

  lrbp::BenchGrid grid;
  grid.k = k;
  grid.m = m;
  grid.r = r;
  grid.d = d;
  grid.c_fixed = c_fixed;
  grid.hw_fixed = hw_fixed;
  for (const std::string& token : grid_text) {
    if (token.rfind("c=", 0) == 0)
      grid.c_values = doubling_range(token, "c");
    else if (token.rfind("hw=", 0) == 0)
      grid.hw_values = doubling_range(token, "hw");
    else
      throw lrbp::ArgumentError("grid token '" + token + "' must sweep c or hw");
  }

  const lrbp::BenchReport report = lrbp::time_benchmark(methods, grid, reps, seed);
  lrbp::write_bench_csv(report, out);

  for (const lrbp::Method skipped : report.skipped)
    std::printf("%s: analytic-only, timing skipped\n",
                std::string(lrbp::method_name(skipped)).c_str());
  for (const lrbp::ScalingFit& fit : report.fits)
    std::printf("fit: %-17s %-8s vs %-2s exponent %.2f\n",
                std::string(lrbp::method_name(fit.method)).c_str(), fit.stage.c_str(),
                fit.variable.c_str(), fit.exponent);
  if (std::isfinite(report.crossover_hw))
    std::printf("lrbp_I/lrbp_II classification crossover near hw = %.0f (m = %lld)\n",
                report.crossover_hw, static_cast<long long>(grid.m));
  double worst_mad = 0.0;
  for (const lrbp::BenchRow& row : report.rows)
    worst_mad = std::max({worst_mad, row.feature_mad_ms / std::max(row.feature_ms, 1e-12),
                          row.classify_mad_ms / std::max(row.classify_ms, 1e-12)});
  std::printf("timing spread: worst median-absolute-deviation %.1f%% of median\n",
              100.0 * worst_mad);
  print_analytic_table(512, 200);
  std::printf("wrote %zu timing rows -> %s\n", report.rows.size(), out.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"low-rank bilinear pooling: training, compression, and benchmarks"};
  app.require_subcommand(1);
  app.footer(kExitCodeHelp);
  // `--h` is a real option (feature map height), so help is long-form only
  app.set_help_flag("--help", "Print help and exit");

  auto* synth = app.add_subcommand("synth", "Generate a covariance-separated synthetic dataset");
  synth->set_help_flag("--help", "Print help and exit");
  lrbp::SynthConfig synth_config;
  std::string synth_out;
  std::uint64_t synth_seed = 1;
  long long synth_h = 6, synth_w = 6, synth_c = 16;
  synth->add_option("--classes", synth_config.classes, "Number of classes")->default_val(2);
  synth->add_option("--per-class", synth_config.per_class, "Samples per class per split")
      ->default_val(500);
  synth->add_option("--h", synth_h, "Feature map height")->default_val(6);
  synth->add_option("--w", synth_w, "Feature map width")->default_val(6);
  synth->add_option("--c", synth_c, "Feature channels")->default_val(16);
  synth->add_option("--alpha", synth_config.alpha, "Covariance separation strength")
      ->default_val(4.0);
  synth->add_option("--seed", synth_seed, "RNG seed")->default_val(1);
  synth->add_flag("--relu", synth_config.relu, "Rectify descriptors entrywise");
  synth->add_option("--out", synth_out, "Output dataset file")->required();

  auto* train_cmd = app.add_subcommand("train", "Train a classifier set");
  std::string train_data, train_out, train_report;
  TrainFlags train_flags;
  train_cmd->add_option("--data", train_data, "Dataset file")->required();
  add_train_flags(train_cmd, train_flags, true);
  train_cmd->add_option("--out", train_out, "Output model file")->required();
  train_cmd->add_option("--report", train_report, "Per-epoch training report CSV");

  auto* eval_cmd = app.add_subcommand("eval", "Evaluate a model on a dataset");
  std::string eval_data, eval_model, eval_out;
  eval_cmd->add_option("--data", eval_data, "Dataset file")->required();
  eval_cmd->add_option("--model", eval_model, "Model file")->required();
  eval_cmd->add_option("--out", eval_out, "Metrics JSON output")->required();

  auto* trunc_cmd = app.add_subcommand("truncate", "Spectrally truncate a stored model");
  std::string trunc_model, trunc_out;
  long long trunc_rank = 8;
  trunc_cmd->add_option("--model", trunc_model, "Model file (low-rank record)")->required();
  trunc_cmd->add_option("--rank", trunc_rank, "Target rank")->required();
  trunc_cmd->add_option("--out", trunc_out, "Output model file")->required();

  auto* codec_cmd = app.add_subcommand("codecompose", "Factor classifiers into P and V_k");
  std::string codec_model, codec_out;
  long long codec_m = 0;
  codec_cmd->add_option("--model", codec_model, "Model file (low-rank record)")->required();
  codec_cmd->add_option("--m", codec_m, "Shared subspace dimension")->required();
  codec_cmd->add_option("--out", codec_out, "Output model file")->required();

  auto* spec_cmd = app.add_subcommand("spectrum", "Eigenvalue spectrum statistics of a model");
  std::string spec_model, spec_out;
  spec_cmd->add_option("--model", spec_model, "Model file (low-rank record)")->required();
  spec_cmd->add_option("--out", spec_out, "Output CSV")->required();

  auto* sweep_cmd = app.add_subcommand("sweep", "Accuracy/psnr/size over a (rank, m) grid");
  std::string sweep_data, sweep_ranks = "2,4,8,16", sweep_ms = "16,32,64,100", sweep_out;
  TrainFlags sweep_flags;
  sweep_cmd->add_option("--data", sweep_data, "Dataset file")->required();
  sweep_cmd->add_option("--ranks", sweep_ranks, "Comma-separated ranks")->default_val("2,4,8,16");
  sweep_cmd->add_option("--ms", sweep_ms, "Comma-separated reduced dims")
      ->default_val("16,32,64,100");
  add_train_flags(sweep_cmd, sweep_flags, false);
  sweep_cmd->add_option("--out", sweep_out, "Output CSV")->required();

  auto* bench_cmd = app.add_subcommand("bench", "Wall-clock scaling benchmark and cost model");
  std::vector<std::string> bench_methods{"all"};
  std::vector<std::string> bench_grid{"c=64..1024", "hw=49..3136"};
  int bench_reps = 9;
  std::uint64_t bench_seed = 1;
  long long bench_k = 8, bench_m = 32, bench_r = 8, bench_d = 1024, bench_cfixed = 256,
            bench_hwfixed = 196;
  std::string bench_out;
  bench_cmd->add_option("--methods", bench_methods, "Method names or 'all'");
  bench_cmd->add_option("--grid", bench_grid, "Sweep specs like c=64..1024 hw=49..3136");
  bench_cmd->add_option("--reps", bench_reps, "Timing repetitions (median taken)")->default_val(9);
  bench_cmd->add_option("--seed", bench_seed, "Workload seed")->default_val(1);
  bench_cmd->add_option("--K", bench_k, "Classes in the timed workload")->default_val(8);
  bench_cmd->add_option("--m", bench_m, "Reduced dimension")->default_val(32);
  bench_cmd->add_option("--r", bench_r, "Classifier rank")->default_val(8);
  bench_cmd->add_option("--d", bench_d, "Compact-baseline feature dimension")->default_val(1024);
  bench_cmd->add_option("--c-fixed", bench_cfixed, "Channel count for the hw sweep")
      ->default_val(256);
  bench_cmd->add_option("--hw-fixed", bench_hwfixed, "Spatial size for the c sweep")
      ->default_val(196);
  bench_cmd->add_option("--out", bench_out, "Output CSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& help) {
    return app.exit(help);
  } catch (const CLI::ParseError& error) {
    std::cerr << "lrbp: usage error: " << error.what() << "\n";
    return kExitUsage;
  }

  try {
    if (*synth) {
      synth_config.height = synth_h;
      synth_config.width = synth_w;
      synth_config.channels = synth_c;
      synth_config.seed = synth_seed;
      return cmd_synth(synth_config, synth_out);
    }
    if (*train_cmd) return cmd_train(train_data, train_flags, train_out, train_report);
    if (*eval_cmd) return cmd_eval(eval_data, eval_model, eval_out);
    if (*trunc_cmd) return cmd_truncate(trunc_model, trunc_rank, trunc_out);
    if (*codec_cmd) return cmd_codecompose(codec_model, codec_m, codec_out);
    if (*spec_cmd) return cmd_spectrum(spec_model, spec_out);
    if (*sweep_cmd) return cmd_sweep(sweep_data, sweep_ranks, sweep_ms, sweep_flags, sweep_out);
    if (*bench_cmd)
      return cmd_bench(bench_methods, bench_grid, bench_reps, bench_seed, bench_k, bench_m,
                       bench_r, bench_d, bench_cfixed, bench_hwfixed, bench_out);
  } catch (const lrbp::FormatError& error) {
    std::cerr << "lrbp: format error: " << error.what() << "\n";
    return kExitFormat;
  } catch (const lrbp::CorruptionError& error) {
    std::cerr << "lrbp: corrupt file: " << error.what() << "\n";
    return kExitFormat;
  } catch (const lrbp::DimensionError& error) {
    std::cerr << "lrbp: dimension error: " << error.what() << "\n";
    return kExitInvalid;
  } catch (const lrbp::DataError& error) {
    std::cerr << "lrbp: data error: " << error.what() << "\n";
    return kExitInvalid;
  } catch (const lrbp::ArgumentError& error) {
    std::cerr << "lrbp: invalid argument: " << error.what() << "\n";
    return kExitInvalid;
  } catch (const lrbp::ParseError& error) {
    std::cerr << "lrbp: parse error: " << error.what() << "\n";
    return kExitInvalid;
  } catch (const lrbp::Error& error) {
    std::cerr << "lrbp: io error: " << error.what() << "\n";
    return kExitIo;
  } catch (const std::exception& error) {
    std::cerr << "lrbp: error: " << error.what() << "\n";
    return 1;
  }
  return 0;
}
