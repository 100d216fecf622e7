#pragma once

#include <filesystem>
#include <fstream>
#include <istream>
#include <string>
#include <string_view>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "cmqe/error.hpp"

namespace cmqe::detail {

using nlohmann::json;

inline std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  return in;
}

inline bool is_blank(std::string_view line) {
  return line.find_first_not_of(" \t\r") == std::string_view::npos;
}

/// Calls fn(record, line_number) for each non-blank line. Any exception other
/// than DataError raised while handling a line is rethrown as a DataError
/// prefixed with the source and line.
template <typename Fn>
void for_each_line(std::istream& in, const std::string& source, Fn&& fn) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (is_blank(line)) continue;
    const std::string where = source + ":" + std::to_string(line_no) + ": ";
    json record;
    try {
      record = json::parse(line);
    } catch (const json::exception& e) {
      throw DataError(where + "malformed JSON (" + e.what() + ")");
    }
    if (!record.is_object()) throw DataError(where + "record is not a JSON object");
    try {
      fn(record, line_no);
    } catch (const DataError& e) {
      throw DataError(where + e.what());
    } catch (const json::exception& e) {
      throw DataError(where + e.what());
    }
  }
}

inline const json& require(const json& record, const char* field) {
  auto it = record.find(field);
  if (it == record.end()) throw DataError(std::string("missing field '") + field + "'");
  return *it;
}

inline std::string require_string(const json& record, const char* field) {
  const json& v = require(record, field);
  if (!v.is_string()) throw DataError(std::string("field '") + field + "' must be a string");
  return v.get<std::string>();
}

inline double require_number(const json& record, const char* field) {
  const json& v = require(record, field);
  if (!v.is_number()) throw DataError(std::string("field '") + field + "' must be a number");
  return v.get<double>();
}

inline long long require_integer(const json& record, const char* field) {
  const json& v = require(record, field);
  if (!v.is_number_integer()) {
    throw DataError(std::string("field '") + field + "' must be an integer");
  }
  return v.get<long long>();
}

class IdRegistry {
 public:
  void add(const std::string& id) {
    if (id.empty()) throw DataError("empty id");
    if (!seen_.insert(id).second) throw DataError("duplicate id '" + id + "'");
  }

 private:
  std::unordered_set<std::string> seen_;
};

}  // namespace cmqe::detail
