#include "cmqe/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace cmqe {
namespace {

bool is_language(Lid lid) { return lid != Lid::Other; }

struct PosCounts {
  std::array<std::size_t, kPosCount> l1{};
  std::array<std::size_t, kPosCount> l2{};
};

PosCounts count_pos(const TaggedSentence& sentence) {
  PosCounts counts;
  for (const auto& tok : sentence.tokens) {
    if (!tok.pos || !is_language(tok.lid)) continue;
    auto& side = tok.lid == Lid::L1 ? counts.l1 : counts.l2;
    ++side[index_of(*tok.pos)];
  }
  return counts;
}

Measured symcom_from_counts(std::size_t l1, std::size_t l2) {
  const std::size_t total = l1 + l2;
  if (total == 0) return {};
  return {(static_cast<double>(l1) - static_cast<double>(l2)) / static_cast<double>(total), true};
}

double symcom_sent_from_counts(const PosCounts& counts, std::size_t len) {
  // Accumulate count * |symcom| and divide once, so a monolingual sentence
  // scores exactly 1.
  double sum = 0.0;
  for (std::size_t i = 0; i < kPosCount; ++i) {
    const std::size_t count = counts.l1[i] + counts.l2[i];
    if (count == 0) continue;
    sum += static_cast<double>(count) *
           std::abs(symcom_from_counts(counts.l1[i], counts.l2[i]).value);
  }
  return sum / static_cast<double>(len);
}

Measured burstiness_from_spans(const std::vector<LanguageSpan>& spans) {
  if (spans.empty()) return {};
  const auto n = static_cast<double>(spans.size());
  double mean = 0.0;
  for (const auto& s : spans) mean += static_cast<double>(s.length);
  mean /= n;
  double var = 0.0;
  for (const auto& s : spans) {
    const double d = static_cast<double>(s.length) - mean;
    var += d * d;
  }
  const double sigma = std::sqrt(var / n);
  // mean >= 1, so the denominator is positive.
  return {(sigma - mean) / (sigma + mean), true};
}

}  // namespace

std::vector<LanguageSpan> language_spans(const TaggedSentence& sentence) {
  std::vector<LanguageSpan> spans;
  for (const auto& tok : sentence.tokens) {
    if (!is_language(tok.lid)) continue;
    if (!spans.empty() && spans.back().lid == tok.lid) {
      ++spans.back().length;
    } else {
      spans.push_back({tok.lid, 1});
    }
  }
  return spans;
}

Measured cmi(const TaggedSentence& sentence) {
  std::size_t l1 = 0;
  std::size_t l2 = 0;
  for (const auto& tok : sentence.tokens) {
    if (tok.lid == Lid::L1) ++l1;
    if (tok.lid == Lid::L2) ++l2;
  }
  const std::size_t language_tokens = l1 + l2;  // n - u
  if (language_tokens == 0) return {};
  const std::size_t dominant = std::max(l1, l2);
  return {static_cast<double>(language_tokens - dominant) / static_cast<double>(language_tokens),
          true};
}

std::size_t switch_points(const TaggedSentence& sentence) {
  const auto spans = language_spans(sentence);
  return spans.empty() ? 0 : spans.size() - 1;
}

Measured burstiness(const TaggedSentence& sentence) {
  return burstiness_from_spans(language_spans(sentence));
}

Measured symcom_su(const TaggedSentence& sentence, Pos su) {
  const auto counts = count_pos(sentence);
  return symcom_from_counts(counts.l1[index_of(su)], counts.l2[index_of(su)]);
}

Measured symcom_sent(const TaggedSentence& sentence) {
  const auto counts = count_pos(sentence);
  const std::size_t len = std::accumulate(counts.l1.begin(), counts.l1.end(), std::size_t{0}) +
                          std::accumulate(counts.l2.begin(), counts.l2.end(), std::size_t{0});
  if (len == 0) return {};
  return {symcom_sent_from_counts(counts, len), true};
}

std::array<double, kMetricFeatureCount> MetricVector::features() const {
  std::array<double, kMetricFeatureCount> out{};
  out[0] = cmi;
  out[1] = static_cast<double>(switch_points);
  out[2] = burstiness;
  out[3] = symcom_sent;
  std::copy(symcom_su.begin(), symcom_su.end(), out.begin() + 4);
  return out;
}

const std::array<std::string, kMetricFeatureCount>& metric_feature_names() {
  static const auto names = [] {
    std::array<std::string, kMetricFeatureCount> n;
    n[0] = "cmi";
    n[1] = "switch_points";
    n[2] = "burstiness";
    n[3] = "symcom_sent";
    for (std::size_t i = 0; i < kPosCount; ++i) {
      n[4 + i] = "symcom_" + std::string(to_string(kAllPos[i]));
    }
    return n;
  }();
  return names;
}

MetricVector metric_vector(const TaggedSentence& sentence) {
  MetricVector mv;
  mv.id = sentence.id;

  const auto c = cmi(sentence);
  mv.cmi = c.value;
  mv.valid.cmi = c.valid;

  const auto spans = language_spans(sentence);
  mv.switch_points = spans.empty() ? 0 : spans.size() - 1;
  mv.valid.switch_points = !spans.empty();

  const auto b = burstiness_from_spans(spans);
  mv.burstiness = b.value;
  mv.valid.burstiness = b.valid;

  const auto counts = count_pos(sentence);
  std::size_t len = 0;
  for (std::size_t i = 0; i < kPosCount; ++i) {
    const auto s = symcom_from_counts(counts.l1[i], counts.l2[i]);
    mv.symcom_su[i] = s.value;
    mv.valid.symcom_su[i] = s.valid;
    len += counts.l1[i] + counts.l2[i];
  }
  mv.valid.symcom_sent = len > 0;
  mv.symcom_sent = len > 0 ? symcom_sent_from_counts(counts, len) : 0.0;
  return mv;
}

}  // namespace cmqe
