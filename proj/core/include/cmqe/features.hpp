#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cmqe/metrics.hpp"

namespace cmqe {

inline constexpr int kFeaturesFormatVersion = 1;
inline constexpr std::size_t kDefaultEmbeddingDim = 768;

/// Precomputed language-model features for one instance.
struct FeatureRecord {
  std::string id;
  std::vector<double> embedding_english;
  std::vector<double> embedding_hindi;
  std::vector<double> embedding_synthetic;
  double pll_synthetic = 0.0;
  std::vector<double> pll_human;

  bool operator==(const FeatureRecord&) const = default;
};

struct FeatureFile {
  int version = kFeaturesFormatVersion;
  std::size_t embedding_dim = kDefaultEmbeddingDim;
  std::vector<FeatureRecord> records;
};

/// Reads a features file: a header record {version, embedding_dim} followed by
/// one FeatureRecord per line. Every embedding must have the header's
/// dimension, every PLL must be finite and pll_human must be non-empty.
FeatureFile parse_features(std::istream& in, const std::string& source = "<features>");
FeatureFile parse_features(const std::filesystem::path& path);
void write_features(std::ostream& out, const FeatureFile& file);

/// pll_synthetic - mean(pll_human). Throws DataError if pll_human is empty.
double pll_delta(const FeatureRecord& record);

/// Standard-score parameters for the metric features. Zero variances are
/// stored as 1 so constant features scale to 0.
struct ScalerParams {
  std::array<double, kMetricFeatureCount> mean{};
  std::array<double, kMetricFeatureCount> stddev{};

  static ScalerParams identity();
  bool operator==(const ScalerParams&) const = default;
};

ScalerParams fit_scaler(std::span<const MetricVector> metric_vectors);
std::array<double, kMetricFeatureCount> apply_scaler(const ScalerParams& params,
                                                     const MetricVector& mv);

enum class Segment { Metrics, PllDelta, EmbeddingEnglish, EmbeddingHindi, EmbeddingSynthetic };

inline constexpr std::array<Segment, 5> kAllSegments = {
    Segment::Metrics, Segment::PllDelta, Segment::EmbeddingEnglish, Segment::EmbeddingHindi,
    Segment::EmbeddingSynthetic};

std::string_view to_string(Segment segment);

struct SegmentRange {
  std::size_t offset = 0;
  std::size_t length = 0;
};

/// Layout of an assembled feature vector:
///   metrics(21) | pll_delta(1) | english(E) | hindi(E) | synthetic(E)
struct FeatureLayout {
  std::size_t embedding_dim = kDefaultEmbeddingDim;

  SegmentRange range(Segment segment) const;
  std::size_t dimension() const { return kMetricFeatureCount + 1 + 3 * embedding_dim; }
  bool operator==(const FeatureLayout&) const = default;
};

struct FeatureVector {
  std::string id;
  std::vector<double> values;
  FeatureLayout layout;

  std::span<const double> segment(Segment s) const;
};

FeatureVector assemble_features(const MetricVector& mv, const FeatureRecord& fr,
                                const ScalerParams& params);

}  // namespace cmqe
