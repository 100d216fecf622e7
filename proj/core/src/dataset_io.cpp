#include "cmqe/dataset_io.hpp"

#include <algorithm>
#include <cctype>
#include <ostream>

#include "cmqe/error.hpp"
#include "jsonl.hpp"

namespace cmqe {
namespace {

using detail::json;

int parse_rating(const json& record, const char* field) {
  const long long value = detail::require_integer(record, field);
  if (value < kMinRating || value > kMaxRating) {
    throw DataError(std::string("field '") + field + "' = " + std::to_string(value) +
                    " outside [1,10]");
  }
  return static_cast<int>(value);
}

DatasetRecord dataset_from_json(const json& j) {
  DatasetRecord r;
  r.id = detail::require_string(j, "id");
  r.english = detail::require_string(j, "english");
  r.hindi = detail::require_string(j, "hindi");
  const json& human = detail::require(j, "human_hinglish");
  if (!human.is_array() || human.empty()) {
    throw DataError("field 'human_hinglish' must be a non-empty array of strings");
  }
  for (const auto& s : human) {
    if (!s.is_string()) throw DataError("field 'human_hinglish' must contain only strings");
    r.human_hinglish.push_back(s.get<std::string>());
  }
  r.synthetic_hinglish = detail::require_string(j, "synthetic_hinglish");
  r.generation_method = detail::require_string(j, "generation_method");
  r.rating_a = parse_rating(j, "rating_a");
  r.rating_b = parse_rating(j, "rating_b");
  return r;
}

json dataset_to_json(const DatasetRecord& r) {
  return json{{"id", r.id},
              {"english", r.english},
              {"hindi", r.hindi},
              {"human_hinglish", r.human_hinglish},
              {"synthetic_hinglish", r.synthetic_hinglish},
              {"generation_method", r.generation_method},
              {"rating_a", r.rating_a},
              {"rating_b", r.rating_b}};
}

bool has_whitespace(const std::string& s) {
  return std::any_of(s.begin(), s.end(),
                     [](unsigned char c) { return std::isspace(c) != 0; });
}

TaggedToken token_from_json(const json& j, std::size_t index) {
  const std::string where = "token " + std::to_string(index) + ": ";
  if (!j.is_object()) throw DataError(where + "token is not an object");
  TaggedToken t;
  t.text = detail::require_string(j, "text");
  if (t.text.empty()) throw DataError(where + "empty token text");
  if (has_whitespace(t.text)) throw DataError(where + "token text contains whitespace");

  const std::string lid = detail::require_string(j, "lid");
  auto parsed_lid = parse_lid(lid);
  if (!parsed_lid) throw DataError(where + "unknown LID label '" + lid + "'");
  t.lid = *parsed_lid;

  auto pos = j.find("pos");
  if (pos != j.end() && !pos->is_null()) {
    if (!pos->is_string()) throw DataError(where + "field 'pos' must be a string or null");
    const std::string tag = pos->get<std::string>();
    auto parsed_pos = parse_pos(tag);
    if (!parsed_pos) throw DataError(where + "unknown POS tag '" + tag + "'");
    t.pos = *parsed_pos;
  }
  return t;
}

json token_to_json(const TaggedToken& t) {
  json j{{"text", t.text}, {"lid", to_string(t.lid)}};
  j["pos"] = t.pos ? json(to_string(*t.pos)) : json(nullptr);
  return j;
}

}  // namespace

std::vector<DatasetRecord> parse_dataset(std::istream& in, const std::string& source) {
  std::vector<DatasetRecord> records;
  detail::IdRegistry ids;
  detail::for_each_line(in, source, [&](const json& j, std::size_t) {
    DatasetRecord r = dataset_from_json(j);
    ids.add(r.id);
    records.push_back(std::move(r));
  });
  return records;
}

std::vector<DatasetRecord> parse_dataset(const std::filesystem::path& path) {
  auto in = detail::open_input(path);
  return parse_dataset(in, path.string());
}

void write_dataset(std::ostream& out, std::span<const DatasetRecord> records) {
  for (const auto& r : records) out << dataset_to_json(r).dump() << '\n';
}

std::vector<TaggedSentence> parse_tagged(std::istream& in, const std::string& source) {
  std::vector<TaggedSentence> sentences;
  detail::IdRegistry ids;
  detail::for_each_line(in, source, [&](const json& j, std::size_t) {
    TaggedSentence s;
    s.id = detail::require_string(j, "id");
    const json& tokens = detail::require(j, "tokens");
    if (!tokens.is_array()) throw DataError("field 'tokens' must be an array");
    if (tokens.empty()) throw DataError("sentence '" + s.id + "' has an empty token list");
    s.tokens.reserve(tokens.size());
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      s.tokens.push_back(token_from_json(tokens[i], i));
    }
    ids.add(s.id);
    sentences.push_back(std::move(s));
  });
  return sentences;
}

std::vector<TaggedSentence> parse_tagged(const std::filesystem::path& path) {
  auto in = detail::open_input(path);
  return parse_tagged(in, path.string());
}

void write_tagged(std::ostream& out, std::span<const TaggedSentence> sentences) {
  for (const auto& s : sentences) {
    json tokens = json::array();
    for (const auto& t : s.tokens) tokens.push_back(token_to_json(t));
    out << json{{"id", s.id}, {"tokens", std::move(tokens)}}.dump() << '\n';
  }
}

}  // namespace cmqe
