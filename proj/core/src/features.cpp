#include "cmqe/features.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "cmqe/error.hpp"
#include "jsonl.hpp"

namespace cmqe {
namespace {

using detail::json;

std::vector<double> read_vector(const json& record, const char* field, std::size_t expected_dim) {
  const json& v = detail::require(record, field);
  if (!v.is_array()) throw DataError(std::string("field '") + field + "' must be an array");
  if (v.size() != expected_dim) {
    throw DataError(std::string("field '") + field + "' has dimension " +
                    std::to_string(v.size()) + ", header says " + std::to_string(expected_dim));
  }
  std::vector<double> out;
  out.reserve(v.size());
  for (const auto& x : v) {
    if (!x.is_number()) throw DataError(std::string("field '") + field + "' must hold numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

void require_finite(double x, const char* field) {
  if (!std::isfinite(x)) throw DataError(std::string("field '") + field + "' is not finite");
}

FeatureRecord record_from_json(const json& j, std::size_t dim) {
  FeatureRecord r;
  r.id = detail::require_string(j, "id");
  r.embedding_english = read_vector(j, "embedding_english", dim);
  r.embedding_hindi = read_vector(j, "embedding_hindi", dim);
  r.embedding_synthetic = read_vector(j, "embedding_synthetic", dim);
  r.pll_synthetic = detail::require_number(j, "pll_synthetic");
  require_finite(r.pll_synthetic, "pll_synthetic");
  const json& human = detail::require(j, "pll_human");
  if (!human.is_array() || human.empty()) {
    throw DataError("field 'pll_human' must be a non-empty array");
  }
  for (const auto& x : human) {
    if (!x.is_number()) throw DataError("field 'pll_human' must hold numbers");
    r.pll_human.push_back(x.get<double>());
    require_finite(r.pll_human.back(), "pll_human");
  }
  return r;
}

}  // namespace

FeatureFile parse_features(std::istream& in, const std::string& source) {
  FeatureFile file;
  bool have_header = false;
  detail::IdRegistry ids;
  detail::for_each_line(in, source, [&](const json& j, std::size_t) {
    if (!have_header) {
      const long long version = detail::require_integer(j, "version");
      if (version != kFeaturesFormatVersion) {
        throw DataError("unsupported features version " + std::to_string(version));
      }
      const long long dim = detail::require_integer(j, "embedding_dim");
      if (dim <= 0) throw DataError("embedding_dim must be positive");
      file.version = static_cast<int>(version);
      file.embedding_dim = static_cast<std::size_t>(dim);
      have_header = true;
      return;
    }
    FeatureRecord r = record_from_json(j, file.embedding_dim);
    ids.add(r.id);
    file.records.push_back(std::move(r));
  });
  if (!have_header) throw DataError(source + ": missing header record");
  return file;
}

FeatureFile parse_features(const std::filesystem::path& path) {
  auto in = detail::open_input(path);
  return parse_features(in, path.string());
}

void write_features(std::ostream& out, const FeatureFile& file) {
  out << json{{"version", file.version}, {"embedding_dim", file.embedding_dim}}.dump() << '\n';
  for (const auto& r : file.records) {
    out << json{{"id", r.id},
                {"embedding_english", r.embedding_english},
                {"embedding_hindi", r.embedding_hindi},
                {"embedding_synthetic", r.embedding_synthetic},
                {"pll_synthetic", r.pll_synthetic},
                {"pll_human", r.pll_human}}
               .dump()
        << '\n';
  }
}

double pll_delta(const FeatureRecord& record) {
  if (record.pll_human.empty()) {
    throw DataError("record '" + record.id + "': pll_human is empty");
  }
  double sum = 0.0;
  for (double x : record.pll_human) sum += x;
  return record.pll_synthetic - sum / static_cast<double>(record.pll_human.size());
}

ScalerParams ScalerParams::identity() {
  ScalerParams p;
  p.stddev.fill(1.0);
  return p;
}

ScalerParams fit_scaler(std::span<const MetricVector> metric_vectors) {
  if (metric_vectors.empty()) throw DataError("cannot fit scaler on an empty set");
  ScalerParams p;
  const auto n = static_cast<double>(metric_vectors.size());
  for (const auto& mv : metric_vectors) {
    const auto f = mv.features();
    for (std::size_t i = 0; i < kMetricFeatureCount; ++i) p.mean[i] += f[i];
  }
  for (auto& m : p.mean) m /= n;
  std::array<double, kMetricFeatureCount> sq{};
  for (const auto& mv : metric_vectors) {
    const auto f = mv.features();
    for (std::size_t i = 0; i < kMetricFeatureCount; ++i) {
      const double d = f[i] - p.mean[i];
      sq[i] += d * d;
    }
  }
  for (std::size_t i = 0; i < kMetricFeatureCount; ++i) {
    const double sd = std::sqrt(sq[i] / n);
    p.stddev[i] = sd > 0.0 ? sd : 1.0;
  }
  return p;
}

std::array<double, kMetricFeatureCount> apply_scaler(const ScalerParams& params,
                                                     const MetricVector& mv) {
  auto f = mv.features();
  for (std::size_t i = 0; i < kMetricFeatureCount; ++i) {
    f[i] = (f[i] - params.mean[i]) / params.stddev[i];
  }
  return f;
}

std::string_view to_string(Segment segment) {
  switch (segment) {
    case Segment::Metrics: return "metrics";
    case Segment::PllDelta: return "pll_delta";
    case Segment::EmbeddingEnglish: return "embedding_english";
    case Segment::EmbeddingHindi: return "embedding_hindi";
    case Segment::EmbeddingSynthetic: return "embedding_synthetic";
  }
  return "unknown";
}

SegmentRange FeatureLayout::range(Segment segment) const {
  const std::size_t e = embedding_dim;
  const std::size_t base = kMetricFeatureCount + 1;
  switch (segment) {
    case Segment::Metrics: return {0, kMetricFeatureCount};
    case Segment::PllDelta: return {kMetricFeatureCount, 1};
    case Segment::EmbeddingEnglish: return {base, e};
    case Segment::EmbeddingHindi: return {base + e, e};
    case Segment::EmbeddingSynthetic: return {base + 2 * e, e};
  }
  return {};
}

std::span<const double> FeatureVector::segment(Segment s) const {
  const auto r = layout.range(s);
  return std::span<const double>(values).subspan(r.offset, r.length);
}

FeatureVector assemble_features(const MetricVector& mv, const FeatureRecord& fr,
                                const ScalerParams& params) {
  if (mv.id != fr.id) {
    throw DataError("id mismatch: metrics '" + mv.id + "' vs features '" + fr.id + "'");
  }
  const std::size_t e = fr.embedding_english.size();
  if (fr.embedding_hindi.size() != e || fr.embedding_synthetic.size() != e) {
    throw DataError("record '" + fr.id + "': embedding dimensions differ");
  }
  FeatureVector fv{fr.id, {}, FeatureLayout{e}};
  fv.values.reserve(fv.layout.dimension());
  const auto scaled = apply_scaler(params, mv);
  fv.values.insert(fv.values.end(), scaled.begin(), scaled.end());
  fv.values.push_back(pll_delta(fr));
  for (const auto* emb : {&fr.embedding_english, &fr.embedding_hindi, &fr.embedding_synthetic}) {
    fv.values.insert(fv.values.end(), emb->begin(), emb->end());
  }
  return fv;
}

}  // namespace cmqe
