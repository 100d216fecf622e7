#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "cmqe/types.hpp"

namespace cmqe {

/// A maximal run of same-language tokens once OTHER tokens are removed.
struct LanguageSpan {
  Lid lid = Lid::L1;
  std::size_t length = 0;

  bool operator==(const LanguageSpan&) const = default;
};

/// A metric value together with whether the metric was defined for the input.
/// Undefined metrics carry value 0.0.
struct Measured {
  double value = 0.0;
  bool valid = false;
};

std::vector<LanguageSpan> language_spans(const TaggedSentence& sentence);

/// Code-Mixing Index (sum(w) - max(w)) / (n - u) over per-language counts w,
/// total tokens n and OTHER tokens u. Undefined when n == u.
Measured cmi(const TaggedSentence& sentence);

/// Number of adjacent language changes, OTHER tokens ignored.
std::size_t switch_points(const TaggedSentence& sentence);

/// (sigma - mean) / (sigma + mean) over span lengths, population sigma.
/// Undefined when the sentence has no L1/L2 token.
Measured burstiness(const TaggedSentence& sentence);

/// (count_L1 - count_L2) / (count_L1 + count_L2) over tokens tagged `su`.
/// Undefined when no L1/L2 token carries that tag.
Measured symcom_su(const TaggedSentence& sentence, Pos su);

/// sum over tags of (count_tag / len) * |symcom_su(tag)|, where len counts the
/// tokens that are both L1/L2 and POS-tagged. Undefined when len == 0.
Measured symcom_sent(const TaggedSentence& sentence);

/// Number of metric features: cmi, switch points, burstiness, symcom_sent and
/// one symcom value per POS tag.
inline constexpr std::size_t kMetricFeatureCount = 4 + kPosCount;

struct MetricVector {
  std::string id;
  double cmi = 0.0;
  std::size_t switch_points = 0;
  double burstiness = 0.0;
  double symcom_sent = 0.0;
  std::array<double, kPosCount> symcom_su{};  // indexed by index_of(Pos)

  struct Validity {
    bool cmi = false;
    bool switch_points = false;
    bool burstiness = false;
    bool symcom_sent = false;
    std::array<bool, kPosCount> symcom_su{};

    bool operator==(const Validity&) const = default;
  } valid;

  /// Canonical feature order: cmi, switch_points, burstiness, symcom_sent,
  /// then symcom_su in kAllPos order. Invalid entries are 0.
  std::array<double, kMetricFeatureCount> features() const;

  bool operator==(const MetricVector&) const = default;
};

/// Feature names in canonical order ("cmi", ..., "symcom_NOUN", ...).
const std::array<std::string, kMetricFeatureCount>& metric_feature_names();

MetricVector metric_vector(const TaggedSentence& sentence);

}  // namespace cmqe
