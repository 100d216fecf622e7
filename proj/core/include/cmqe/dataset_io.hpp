#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "cmqe/types.hpp"

namespace cmqe {

// Dataset and tagged-sentence files are newline-delimited JSON, one record per
// line. Blank lines are ignored. Every parse error is a DataError whose message
// starts with "<source>:<line>:".

std::vector<DatasetRecord> parse_dataset(std::istream& in, const std::string& source = "<dataset>");
std::vector<DatasetRecord> parse_dataset(const std::filesystem::path& path);
void write_dataset(std::ostream& out, std::span<const DatasetRecord> records);

std::vector<TaggedSentence> parse_tagged(std::istream& in, const std::string& source = "<tagged>");
std::vector<TaggedSentence> parse_tagged(const std::filesystem::path& path);
void write_tagged(std::ostream& out, std::span<const TaggedSentence> sentences);

}  // namespace cmqe
