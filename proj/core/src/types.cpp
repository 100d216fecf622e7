#include "cmqe/types.hpp"

#include <cstdlib>

#include "cmqe/error.hpp"

namespace cmqe {
namespace {

constexpr std::array<std::string_view, kPosCount> kPosNames = {
    "ADJ",  "ADP",  "ADV",   "AUX",   "CCONJ", "DET", "INTJ", "NOUN", "NUM",
    "PART", "PRON", "PROPN", "PUNCT", "SCONJ", "SYM", "VERB", "X"};

// Tags a code-switching tagger emits for tokens that belong to neither language.
constexpr std::array<std::string_view, 8> kOtherAliases = {
    "OTHER", "other", "univ", "ne", "acro", "rest", "mixed", "undef"};

}  // namespace

std::string_view to_string(Lid lid) {
  switch (lid) {
    case Lid::L1: return "L1";
    case Lid::L2: return "L2";
    case Lid::Other: return "OTHER";
  }
  return "OTHER";
}

std::string_view to_string(Pos pos) { return kPosNames[index_of(pos)]; }

std::optional<Lid> parse_lid(std::string_view text) {
  if (text == "L1" || text == "hi") return Lid::L1;
  if (text == "L2" || text == "en") return Lid::L2;
  for (auto alias : kOtherAliases) {
    if (text == alias) return Lid::Other;
  }
  return std::nullopt;
}

std::optional<Pos> parse_pos(std::string_view text) {
  for (std::size_t i = 0; i < kPosCount; ++i) {
    if (kPosNames[i] == text) return kAllPos[i];
  }
  return std::nullopt;
}

std::string_view to_string(Task task) {
  return task == Task::Quality ? "quality" : "disagreement";
}

std::optional<Task> parse_task(std::string_view text) {
  if (text == "quality") return Task::Quality;
  if (text == "disagreement") return Task::Disagreement;
  return std::nullopt;
}

TaskTarget derive_targets(const DatasetRecord& record) {
  for (int rating : {record.rating_a, record.rating_b}) {
    if (rating < kMinRating || rating > kMaxRating) {
      throw DataError("record '" + record.id + "': rating " + std::to_string(rating) +
                      " outside [1,10]");
    }
  }
  const int sum = record.rating_a + record.rating_b;
  // Half-up rounding of sum/2 for positive sums: (sum + 1) / 2 in integers.
  return TaskTarget{record.id, (sum + 1) / 2, std::abs(record.rating_a - record.rating_b)};
}

}  // namespace cmqe
