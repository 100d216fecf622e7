#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace cmqe {

/// Token-level language label. L1 is Hindi and L2 English for HinGE data, but
/// nothing in the library depends on which is which.
enum class Lid : std::uint8_t { L1, L2, Other };

/// The 17 Universal Dependencies part-of-speech tags, in canonical order.
enum class Pos : std::uint8_t {
  ADJ, ADP, ADV, AUX, CCONJ, DET, INTJ, NOUN, NUM,
  PART, PRON, PROPN, PUNCT, SCONJ, SYM, VERB, X
};

inline constexpr std::size_t kPosCount = 17;

inline constexpr std::array<Pos, kPosCount> kAllPos = {
    Pos::ADJ,  Pos::ADP,  Pos::ADV,   Pos::AUX,   Pos::CCONJ, Pos::DET,
    Pos::INTJ, Pos::NOUN, Pos::NUM,   Pos::PART,  Pos::PRON,  Pos::PROPN,
    Pos::PUNCT, Pos::SCONJ, Pos::SYM, Pos::VERB, Pos::X};

constexpr std::size_t index_of(Pos pos) { return static_cast<std::size_t>(pos); }

std::string_view to_string(Lid lid);
std::string_view to_string(Pos pos);

/// Accepts the canonical names "L1", "L2", "OTHER" plus the raw tagger labels
/// "hi"/"en" and the catch-all tags (named entity, universal, acronym, ...)
/// that collapse to Other.
std::optional<Lid> parse_lid(std::string_view text);
std::optional<Pos> parse_pos(std::string_view text);

struct TaggedToken {
  std::string text;
  Lid lid = Lid::Other;
  std::optional<Pos> pos;

  bool operator==(const TaggedToken&) const = default;
};

struct TaggedSentence {
  std::string id;
  std::vector<TaggedToken> tokens;

  bool operator==(const TaggedSentence&) const = default;
};

inline constexpr int kMinRating = 1;
inline constexpr int kMaxRating = 10;

struct DatasetRecord {
  std::string id;
  std::string english;
  std::string hindi;
  std::vector<std::string> human_hinglish;
  std::string synthetic_hinglish;
  std::string generation_method;
  int rating_a = kMinRating;
  int rating_b = kMinRating;

  bool operator==(const DatasetRecord&) const = default;
};

enum class Task : std::uint8_t { Quality, Disagreement };

std::string_view to_string(Task task);
std::optional<Task> parse_task(std::string_view text);

/// Closed integer range of the task's target.
struct TargetRange {
  int lo;
  int hi;
};
constexpr TargetRange target_range(Task task) {
  return task == Task::Quality ? TargetRange{1, 10} : TargetRange{0, 9};
}

struct TaskTarget {
  std::string id;
  int quality = kMinRating;
  int disagreement = 0;

  int value(Task task) const { return task == Task::Quality ? quality : disagreement; }
  bool operator==(const TaskTarget&) const = default;
};

/// Quality is the half-up rounded mean of the two ratings, disagreement their
/// absolute difference. Throws DataError if either rating is out of range.
TaskTarget derive_targets(const DatasetRecord& record);

}  // namespace cmqe
