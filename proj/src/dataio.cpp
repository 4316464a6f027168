#include "lrbp/dataio.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "lrbp/random.hpp"

static_assert(std::endian::native == std::endian::little,
              "container format is little-endian; big-endian hosts are unsupported");

namespace lrbp {

namespace {

constexpr char kMagic[4] = {'L', 'R', 'B', 'P'};
constexpr std::uint32_t kVersion = 1;
constexpr std::uint32_t kRecordDataset = 1;
constexpr std::uint32_t kRecordLowRank = 2;
constexpr std::uint32_t kRecordCoDecomposed = 3;

class Writer {
 public:
  explicit Writer(const std::filesystem::path& path)
      : final_path_(path), temp_path_(path.string() + ".tmp"), out_(temp_path_, std::ios::binary) {
    if (!out_) throw Error("cannot open " + temp_path_.string() + " for writing");
  }

  void u32(std::uint32_t v) { raw(&v, sizeof v); }
  void u8(std::uint8_t v) { raw(&v, sizeof v); }
  void f32(float v) { raw(&v, sizeof v); }

  void matrix_f32(const Matrix& m) {
    for (Index j = 0; j < m.cols(); ++j)
      for (Index i = 0; i < m.rows(); ++i) f32(static_cast<float>(m(i, j)));
  }

  // Writes become visible under the final name only on a clean finish.
  void commit() {
    out_.flush();
    if (!out_) throw Error("write failed for " + temp_path_.string());
    out_.close();
    std::filesystem::rename(temp_path_, final_path_);
    committed_ = true;
  }

  ~Writer() {
    if (!committed_) {
      out_.close();
      std::error_code ec;
      std::filesystem::remove(temp_path_, ec);
    }
  }

 private:
  void raw(const void* p, std::size_t n) { out_.write(static_cast<const char*>(p), static_cast<std::streamsize>(n)); }

  std::filesystem::path final_path_;
  std::filesystem::path temp_path_;
  std::ofstream out_;
  bool committed_ = false;
};

class Reader {
 public:
  explicit Reader(const std::filesystem::path& path) : in_(path, std::ios::binary) {
    if (!in_) throw Error("cannot open " + path.string() + " for reading");
  }

  std::uint32_t u32() {
    std::uint32_t v;
    raw(&v, sizeof v);
    return v;
  }
  std::uint8_t u8() {
    std::uint8_t v;
    raw(&v, sizeof v);
    return v;
  }
  float f32() {
    float v;
    raw(&v, sizeof v);
    return v;
  }

  Matrix matrix_f32(Index rows, Index cols) {
    Matrix m(rows, cols);
    for (Index j = 0; j < cols; ++j)
      for (Index i = 0; i < rows; ++i) m(i, j) = static_cast<double>(f32());
    return m;
  }

  void expect_magic() {
    char got[4];
    raw(got, 4);
    if (!std::equal(got, got + 4, kMagic)) throw FormatError("bad magic; not a LRBP container");
  }

  std::uint64_t offset() const { return offset_; }

 private:
  void raw(void* p, std::size_t n) {
    in_.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
    if (in_.gcount() != static_cast<std::streamsize>(n))
      throw CorruptionError("truncated file", offset_ + static_cast<std::uint64_t>(in_.gcount()));
    offset_ += n;
  }

  std::ifstream in_;
  std::uint64_t offset_ = 0;
};

std::uint32_t open_record(Reader& reader, std::uint32_t expected_type, bool strict_type) {
  reader.expect_magic();
  const std::uint32_t version = reader.u32();
  if (version != kVersion)
    throw FormatError("unsupported container version " + std::to_string(version));
  const std::uint32_t type = reader.u32();
  if (strict_type && type != expected_type)
    throw FormatError("record type " + std::to_string(type) + " does not match requested kind");
  return type;
}

void write_header(Writer& writer, std::uint32_t record_type) {
  for (char ch : kMagic) writer.u8(static_cast<std::uint8_t>(ch));
  writer.u32(kVersion);
  writer.u32(record_type);
}

LowRankModel read_lowrank_body(Reader& reader) {
  const Index c = reader.u32();
  const Index r = reader.u32();
  const Index k_count = reader.u32();
  LowRankModel model;
  model.classifiers.reserve(static_cast<std::size_t>(k_count));
  for (Index k = 0; k < k_count; ++k) {
    const Index p = reader.u32();
    const Index q = reader.u32();
    if (p + q != r) throw CorruptionError("factor split does not sum to rank", reader.offset());
    LowRankClassifier clf;
    clf.u_plus = reader.matrix_f32(c, p);
    clf.u_minus = reader.matrix_f32(c, q);
    clf.bias = static_cast<double>(reader.f32());
    model.classifiers.push_back(std::move(clf));
  }
  return model;
}

CoDecomposedModel read_codecomp_body(Reader& reader) {
  const Index c = reader.u32();
  const Index m = reader.u32();
  const Index r = reader.u32();
  const Index k_count = reader.u32();
  CoDecomposedModel model;
  model.projection = reader.matrix_f32(c, m);
  model.classifiers.reserve(static_cast<std::size_t>(k_count));
  for (Index k = 0; k < k_count; ++k) {
    const Index p = reader.u32();
    const Index q = reader.u32();
    if (p + q != r) throw CorruptionError("factor split does not sum to rank", reader.offset());
    CompactClassifier clf;
    clf.v_plus = reader.matrix_f32(m, p);
    clf.v_minus = reader.matrix_f32(m, q);
    clf.bias = static_cast<double>(reader.f32());
    model.classifiers.push_back(std::move(clf));
  }
  return model;
}

}  // namespace

Index FeatureDataset::count(Split split) const {
  return static_cast<Index>(std::count(splits.begin(), splits.end(), split));
}

std::vector<Index> FeatureDataset::indices(Split split) const {
  std::vector<Index> out;
  for (Index i = 0; i < size(); ++i)
    if (splits[static_cast<std::size_t>(i)] == split) out.push_back(i);
  return out;
}

void save_dataset(const FeatureDataset& dataset, const std::filesystem::path& path) {
  const Index n = dataset.size();
  if (static_cast<Index>(dataset.labels.size()) != n ||
      static_cast<Index>(dataset.splits.size()) != n)
    throw DimensionError("dataset samples, labels, and splits disagree in length");

  Writer writer(path);
  write_header(writer, kRecordDataset);
  writer.u32(static_cast<std::uint32_t>(dataset.height));
  writer.u32(static_cast<std::uint32_t>(dataset.width));
  writer.u32(static_cast<std::uint32_t>(dataset.channels));
  writer.u32(static_cast<std::uint32_t>(n));
  writer.u32(static_cast<std::uint32_t>(dataset.num_classes));
  for (int label : dataset.labels) writer.u32(static_cast<std::uint32_t>(label));
  for (Split split : dataset.splits) writer.u8(static_cast<std::uint8_t>(split));
  for (const FeatureMap& fm : dataset.samples) {
    // channel-major, row-major spatial: rows of the descriptor matrix in order
    for (Index ch = 0; ch < fm.channels(); ++ch)
      for (Index loc = 0; loc < fm.locations(); ++loc)
        writer.f32(static_cast<float>(fm.descriptors(ch, loc)));
  }
  writer.commit();
}

FeatureDataset load_dataset(const std::filesystem::path& path) {
  Reader reader(path);
  open_record(reader, kRecordDataset, true);

  FeatureDataset dataset;
  dataset.height = reader.u32();
  dataset.width = reader.u32();
  dataset.channels = reader.u32();
  const Index n = reader.u32();
  dataset.num_classes = reader.u32();
  if (dataset.height < 1 || dataset.width < 1 || dataset.channels < 1 || dataset.num_classes < 1)
    throw CorruptionError("dataset header has zero dimensions", reader.offset());

  dataset.labels.resize(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) {
    const std::uint32_t label = reader.u32();
    if (label < 1 || static_cast<Index>(label) > dataset.num_classes)
      throw CorruptionError("label out of range", reader.offset());
    dataset.labels[static_cast<std::size_t>(i)] = static_cast<int>(label);
  }
  dataset.splits.resize(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) {
    const std::uint8_t flag = reader.u8();
    if (flag > 1) throw CorruptionError("split flag out of range", reader.offset());
    dataset.splits[static_cast<std::size_t>(i)] = static_cast<Split>(flag);
  }

  const Index hw = dataset.height * dataset.width;
  dataset.samples.reserve(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) {
    Matrix descriptors(dataset.channels, hw);
    for (Index ch = 0; ch < dataset.channels; ++ch)
      for (Index loc = 0; loc < hw; ++loc)
        descriptors(ch, loc) = static_cast<double>(reader.f32());
    if (!is_finite(descriptors)) throw DataError("dataset sample has non-finite entries");
    dataset.samples.push_back(FeatureMap{dataset.height, dataset.width, std::move(descriptors)});
  }
  dataset.provenance = path.string();
  return dataset;
}

void save_model(const LowRankModel& model, const std::filesystem::path& path) {
  if (model.classifiers.empty()) throw ArgumentError("cannot save an empty model");
  const Index c = model.classifiers.front().channels();
  const Index r = model.classifiers.front().rank();

  Writer writer(path);
  write_header(writer, kRecordLowRank);
  writer.u32(static_cast<std::uint32_t>(c));
  writer.u32(static_cast<std::uint32_t>(r));
  writer.u32(static_cast<std::uint32_t>(model.classifiers.size()));
  for (const LowRankClassifier& clf : model.classifiers) {
    if (clf.channels() != c || clf.rank() != r)
      throw DimensionError("model classifiers disagree on shape");
    writer.u32(static_cast<std::uint32_t>(clf.u_plus.cols()));
    writer.u32(static_cast<std::uint32_t>(clf.u_minus.cols()));
    writer.matrix_f32(clf.u_plus);
    writer.matrix_f32(clf.u_minus);
    writer.f32(static_cast<float>(clf.bias));
  }
  writer.commit();
}

void save_model(const CoDecomposedModel& model, const std::filesystem::path& path) {
  if (model.classifiers.empty()) throw ArgumentError("cannot save an empty model");
  const Index r = model.classifiers.front().rank();

  Writer writer(path);
  write_header(writer, kRecordCoDecomposed);
  writer.u32(static_cast<std::uint32_t>(model.channels()));
  writer.u32(static_cast<std::uint32_t>(model.reduced_dim()));
  writer.u32(static_cast<std::uint32_t>(r));
  writer.u32(static_cast<std::uint32_t>(model.classifiers.size()));
  writer.matrix_f32(model.projection);
  for (const CompactClassifier& clf : model.classifiers) {
    if (clf.rank() != r) throw DimensionError("model classifiers disagree on rank");
    writer.u32(static_cast<std::uint32_t>(clf.v_plus.cols()));
    writer.u32(static_cast<std::uint32_t>(clf.v_minus.cols()));
    writer.matrix_f32(clf.v_plus);
    writer.matrix_f32(clf.v_minus);
    writer.f32(static_cast<float>(clf.bias));
  }
  writer.commit();
}

StoredModel load_model(const std::filesystem::path& path) {
  Reader reader(path);
  const std::uint32_t type = open_record(reader, 0, false);
  if (type == kRecordLowRank) return read_lowrank_body(reader);
  if (type == kRecordCoDecomposed) return read_codecomp_body(reader);
  throw FormatError("record type " + std::to_string(type) + " is not a model");
}

LowRankModel load_lowrank_model(const std::filesystem::path& path) {
  Reader reader(path);
  open_record(reader, kRecordLowRank, true);
  return read_lowrank_body(reader);
}

CoDecomposedModel load_codecomp_model(const std::filesystem::path& path) {
  Reader reader(path);
  open_record(reader, kRecordCoDecomposed, true);
  return read_codecomp_body(reader);
}

FeatureDataset synth_covariance_dataset(const SynthConfig& config) {
  if (config.classes < 2) throw ArgumentError("synthetic dataset needs at least two classes");
  if (config.channels < 4) throw ArgumentError("synthetic dataset needs at least four channels");
  if (config.per_class < 1) throw ArgumentError("per-class sample count must be positive");
  if (config.height < 1 || config.width < 1) throw ArgumentError("spatial shape must be positive");
  if (config.alpha < 0.0) throw ArgumentError("alpha must be nonnegative");

  Rng rng(config.seed);
  const Index c = config.channels;
  const Index hw = config.height * config.width;
  const double plane_gain = std::sqrt(1.0 + config.alpha) - 1.0;

  std::vector<Matrix> planes;
  planes.reserve(static_cast<std::size_t>(config.classes));
  for (int k = 0; k < config.classes; ++k) planes.push_back(random_orthonormal(c, 2, rng));

  FeatureDataset dataset;
  dataset.height = config.height;
  dataset.width = config.width;
  dataset.channels = c;
  dataset.num_classes = config.classes;

  for (int k = 0; k < config.classes; ++k) {
    const Matrix& q = planes[static_cast<std::size_t>(k)];
    for (int which = 0; which < 2; ++which) {
      const Split split = which == 0 ? Split::train : Split::test;
      for (int i = 0; i < config.per_class; ++i) {
        Matrix x = gaussian_matrix(c, hw, 1.0, rng);
        // x ~ N(0, I + alpha q q^T): stretch the component inside the plane
        x.noalias() += plane_gain * (q * (q.transpose() * x));
        if (config.relu) x = x.cwiseMax(0.0);
        dataset.samples.push_back(FeatureMap{config.height, config.width, std::move(x)});
        dataset.labels.push_back(k + 1);
        dataset.splits.push_back(split);
      }
    }
  }

  std::ostringstream tag;
  tag << "synthetic seed=" << config.seed << " classes=" << config.classes
      << " per_class=" << config.per_class << " h=" << config.height << " w=" << config.width
      << " c=" << config.channels << " alpha=" << config.alpha << " relu=" << config.relu;
  dataset.provenance = tag.str();
  return dataset;
}

namespace {

double parse_cell(const std::string& cell, std::size_t line) {
  const char* begin = cell.data();
  const char* end = begin + cell.size();
  while (begin < end && std::isspace(static_cast<unsigned char>(*begin))) ++begin;
  while (end > begin && std::isspace(static_cast<unsigned char>(end[-1]))) --end;
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc{} || ptr != end)
    throw ParseError("'" + cell + "' is not numeric", line);
  if (!std::isfinite(value)) throw ParseError("'" + cell + "' is not finite", line);
  return value;
}

}  // namespace

FeatureDataset import_csv_features(const std::filesystem::path& path, const CsvLayout& layout) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string() + " for reading");
  const Index hw = layout.height * layout.width;
  const std::size_t expected = 1 + static_cast<std::size_t>(layout.channels * hw);

  FeatureDataset dataset;
  dataset.height = layout.height;
  dataset.width = layout.width;
  dataset.channels = layout.channels;

  std::string row;
  std::size_t line = 0;
  int max_label = 0;
  while (std::getline(in, row)) {
    ++line;
    if (row.empty()) continue;
    std::vector<std::string> cells;
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = row.find(',', start);
      cells.push_back(row.substr(start, comma - start));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (cells.size() != expected)
      throw ParseError("expected " + std::to_string(expected) + " values, got " +
                           std::to_string(cells.size()),
                       line);

    const double label_value = parse_cell(cells[0], line);
    const int label = static_cast<int>(label_value);
    if (label < 1 || static_cast<double>(label) != label_value)
      throw ParseError("label must be a positive integer", line);
    max_label = std::max(max_label, label);

    Matrix descriptors(layout.channels, hw);
    std::size_t cell = 1;
    for (Index ch = 0; ch < layout.channels; ++ch)
      for (Index loc = 0; loc < hw; ++loc)
        descriptors(ch, loc) = parse_cell(cells[cell++], line);
    dataset.samples.push_back(FeatureMap{layout.height, layout.width, std::move(descriptors)});
    dataset.labels.push_back(label);
    dataset.splits.push_back(layout.assign_to);
  }
  if (dataset.samples.empty()) throw ParseError("file holds no samples", line);
  dataset.num_classes = max_label;
  dataset.provenance = path.string();
  return dataset;
}

void export_csv_features(const FeatureDataset& dataset, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  char buffer[64];
  for (Index i = 0; i < dataset.size(); ++i) {
    out << dataset.labels[static_cast<std::size_t>(i)];
    const FeatureMap& fm = dataset.samples[static_cast<std::size_t>(i)];
    for (Index ch = 0; ch < fm.channels(); ++ch)
      for (Index loc = 0; loc < fm.locations(); ++loc) {
        // %.9g round-trips the float32 storage precision
        std::snprintf(buffer, sizeof buffer, "%.9g",
                      static_cast<double>(static_cast<float>(fm.descriptors(ch, loc))));
        out << ',' << buffer;
      }
    out << '\n';
  }
  if (!out) throw Error("write failed for " + path.string());
}

}  // namespace lrbp
