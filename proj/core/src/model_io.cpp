#include "cmqe/model_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include <nlohmann/json.hpp>
#include <zlib.h>

#include "cmqe/error.hpp"

namespace cmqe {
namespace {

using nlohmann::json;

constexpr std::string_view kMagic = "CMQEMODL";

class Writer {
 public:
  void bytes(std::string_view s) { out_.append(s); }

  template <typename T>
  void uint(T value) {
    for (std::size_t i = 0; i < sizeof(T); ++i) {
      out_.push_back(static_cast<char>((value >> (8 * i)) & 0xFF));
    }
  }

  void real(double value) { uint(std::bit_cast<std::uint64_t>(value)); }

  const std::string& data() const { return out_; }

 private:
  std::string out_;
};

class Reader {
 public:
  explicit Reader(std::string_view data) : data_(data) {}

  std::string_view bytes(std::size_t n) {
    need(n);
    auto s = data_.substr(pos_, n);
    pos_ += n;
    return s;
  }

  template <typename T>
  T uint() {
    need(sizeof(T));
    T value = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) {
      value |= static_cast<T>(static_cast<unsigned char>(data_[pos_ + i])) << (8 * i);
    }
    pos_ += sizeof(T);
    return value;
  }

  double real() { return std::bit_cast<double>(uint<std::uint64_t>()); }

  std::size_t remaining() const { return data_.size() - pos_; }

 private:
  void need(std::size_t n) const {
    if (data_.size() - pos_ < n) throw DataError("model file truncated");
  }

  std::string_view data_;
  std::size_t pos_ = 0;
};

std::uint32_t crc32_of(std::string_view bytes) {
  uLong crc = crc32(0L, Z_NULL, 0);
  // zlib takes uInt lengths; model files stay far below 4 GiB per chunk.
  std::size_t offset = 0;
  while (offset < bytes.size()) {
    const auto chunk = static_cast<uInt>(std::min<std::size_t>(bytes.size() - offset, 1u << 30));
    crc = crc32(crc, reinterpret_cast<const Bytef*>(bytes.data() + offset), chunk);
    offset += chunk;
  }
  return static_cast<std::uint32_t>(crc);
}

json config_to_json(const MlpConfig& c) {
  return json{{"input_dim", c.input_dim},
              {"hidden_dims", c.hidden_dims},
              {"learning_rate", c.learning_rate},
              {"lr_grid", c.lr_grid},
              {"search_hidden_dims", c.search_hidden_dims},
              {"batch_size", c.batch_size},
              {"max_epochs", c.max_epochs},
              {"adam_beta1", c.adam_beta1},
              {"adam_beta2", c.adam_beta2},
              {"adam_epsilon", c.adam_epsilon},
              {"lr_patience", c.lr_patience},
              {"lr_decay_factor", c.lr_decay_factor},
              {"improvement_tol", c.improvement_tol},
              {"seed", c.seed}};
}

MlpConfig config_from_json(const json& j) {
  MlpConfig c;
  c.input_dim = j.at("input_dim").get<std::size_t>();
  c.hidden_dims = j.at("hidden_dims").get<std::vector<std::size_t>>();
  c.learning_rate = j.at("learning_rate").get<double>();
  c.lr_grid = j.at("lr_grid").get<std::vector<double>>();
  c.search_hidden_dims = j.at("search_hidden_dims").get<bool>();
  c.batch_size = j.at("batch_size").get<std::size_t>();
  c.max_epochs = j.at("max_epochs").get<std::size_t>();
  c.adam_beta1 = j.at("adam_beta1").get<double>();
  c.adam_beta2 = j.at("adam_beta2").get<double>();
  c.adam_epsilon = j.at("adam_epsilon").get<double>();
  c.lr_patience = j.at("lr_patience").get<std::size_t>();
  c.lr_decay_factor = j.at("lr_decay_factor").get<double>();
  c.improvement_tol = j.at("improvement_tol").get<double>();
  c.seed = j.at("seed").get<std::uint64_t>();
  return c;
}

json layout_to_json(const FeatureLayout& layout) {
  json segments = json::array();
  for (auto s : kAllSegments) {
    const auto r = layout.range(s);
    segments.push_back({{"name", to_string(s)}, {"offset", r.offset}, {"length", r.length}});
  }
  return json{{"embedding_dim", layout.embedding_dim},
              {"dimension", layout.dimension()},
              {"segments", segments}};
}

FeatureLayout layout_from_json(const json& j) {
  FeatureLayout layout{j.at("embedding_dim").get<std::size_t>()};
  if (j.at("dimension").get<std::size_t>() != layout.dimension()) {
    throw DataError("model layout dimension is inconsistent with its embedding_dim");
  }
  const json& segments = j.at("segments");
  if (!segments.is_array() || segments.size() != kAllSegments.size()) {
    throw DataError("model layout segment table is malformed");
  }
  for (std::size_t i = 0; i < kAllSegments.size(); ++i) {
    const auto r = layout.range(kAllSegments[i]);
    const json& s = segments[i];
    if (s.at("name").get<std::string>() != to_string(kAllSegments[i]) ||
        s.at("offset").get<std::size_t>() != r.offset ||
        s.at("length").get<std::size_t>() != r.length) {
      throw DataError("model layout segment table does not match the feature layout");
    }
  }
  return layout;
}

}  // namespace

std::string serialize_model(const RegressionModel& model) {
  const auto& net = model.network;
  json shapes = json::array();
  for (const auto& l : net.layers) shapes.push_back({l.weights.rows(), l.weights.cols()});
  const json meta{{"task", to_string(model.task)},
                  {"seed", net.config.seed},
                  {"config", config_to_json(net.config)},
                  {"layout", layout_to_json(model.layout)},
                  {"layer_shapes", shapes},
                  {"parameter_count", net.parameter_count()}};
  const std::string meta_text = meta.dump();

  Writer w;
  w.bytes(kMagic);
  w.uint<std::uint32_t>(kModelFormatVersion);
  w.uint<std::uint64_t>(meta_text.size());
  w.bytes(meta_text);
  for (double m : model.scaler.mean) w.real(m);
  for (double s : model.scaler.stddev) w.real(s);
  for (const auto& l : net.layers) {
    for (Eigen::Index r = 0; r < l.weights.rows(); ++r) {
      for (Eigen::Index c = 0; c < l.weights.cols(); ++c) w.real(l.weights(r, c));
    }
    for (Eigen::Index r = 0; r < l.bias.size(); ++r) w.real(l.bias(r));
  }
  std::string out = w.data();
  Writer crc;
  crc.uint<std::uint32_t>(crc32_of(out));
  out += crc.data();
  return out;
}

RegressionModel deserialize_model(std::string_view bytes) {
  if (bytes.size() < kMagic.size() + 4 + 8 + 4) throw DataError("model file truncated");
  if (bytes.substr(0, kMagic.size()) != kMagic) throw DataError("not a cmqe model file");

  const std::string_view body = bytes.substr(0, bytes.size() - 4);
  Reader tail(bytes.substr(bytes.size() - 4));
  if (tail.uint<std::uint32_t>() != crc32_of(body)) {
    throw DataError("model file checksum mismatch (corrupt or truncated)");
  }

  Reader r(body);
  r.bytes(kMagic.size());
  const auto version = r.uint<std::uint32_t>();
  if (version != kModelFormatVersion) {
    throw DataError("unsupported model format version " + std::to_string(version));
  }
  const auto meta_len = r.uint<std::uint64_t>();
  if (meta_len > r.remaining()) throw DataError("model file truncated");

  RegressionModel model;
  std::vector<std::pair<Eigen::Index, Eigen::Index>> shapes;
  try {
    const json meta = json::parse(r.bytes(static_cast<std::size_t>(meta_len)));
    const auto task = parse_task(meta.at("task").get<std::string>());
    if (!task) throw DataError("model has an unknown task");
    model.task = *task;
    model.network.config = config_from_json(meta.at("config"));
    model.layout = layout_from_json(meta.at("layout"));
    for (const auto& s : meta.at("layer_shapes")) {
      shapes.emplace_back(s.at(0).get<Eigen::Index>(), s.at(1).get<Eigen::Index>());
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("model metadata is malformed: ") + e.what());
  }

  const auto& config = model.network.config;
  if (config.input_dim != model.layout.dimension()) {
    throw DataError("model input_dim " + std::to_string(config.input_dim) +
                    " does not match its feature layout dimension " +
                    std::to_string(model.layout.dimension()));
  }
  if (shapes.size() != config.hidden_dims.size() + 1) {
    throw DataError("model layer count does not match its configuration");
  }
  auto expected_in = static_cast<Eigen::Index>(config.input_dim);
  for (std::size_t l = 0; l < shapes.size(); ++l) {
    const auto expected_out =
        l < config.hidden_dims.size() ? static_cast<Eigen::Index>(config.hidden_dims[l]) : 1;
    if (shapes[l].first != expected_out || shapes[l].second != expected_in) {
      throw DataError("model layer " + std::to_string(l) + " shape does not match its configuration");
    }
    expected_in = expected_out;
  }

  std::size_t reals = 2 * kMetricFeatureCount;
  for (const auto& [rows, cols] : shapes) reals += static_cast<std::size_t>(rows * cols + rows);
  if (r.remaining() != reals * 8) throw DataError("model parameter block has the wrong size");

  for (auto& m : model.scaler.mean) m = r.real();
  for (auto& s : model.scaler.stddev) s = r.real();
  for (const auto& [rows, cols] : shapes) {
    DenseLayer layer{Eigen::MatrixXd(rows, cols), Eigen::VectorXd(rows)};
    for (Eigen::Index i = 0; i < rows; ++i) {
      for (Eigen::Index j = 0; j < cols; ++j) layer.weights(i, j) = r.real();
    }
    for (Eigen::Index i = 0; i < rows; ++i) layer.bias(i) = r.real();
    model.network.layers.push_back(std::move(layer));
  }
  if (!model.network.all_finite()) throw DataError("model holds non-finite parameters");
  return model;
}

void save_model(const RegressionModel& model, const std::filesystem::path& path) {
  const std::string bytes = serialize_model(model);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw DataError("failed writing '" + path.string() + "'");
}

RegressionModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return deserialize_model(bytes);
}

}  // namespace cmqe
