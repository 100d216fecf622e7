#include "cmqe/dataset_io.hpp"

#include <gtest/gtest.h>

#include <functional>
#include <sstream>

#include "cmqe/error.hpp"
#include "generators.hpp"

namespace cmqe {
namespace {

std::string record_line(const std::string& id, int a, int b) {
  return R"({"id":")" + id +
         R"(","english":"the house","hindi":"ghar","human_hinglish":["ghar is big"],)"
         R"("synthetic_hinglish":"ghar is bada","generation_method":"WAC","rating_a":)" +
         std::to_string(a) + R"(,"rating_b":)" + std::to_string(b) + "}\n";
}

std::string error_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const DataError& e) {
    return e.what();
  }
  return "";
}

TEST(ParseDataset, ThreeRecordsInOrder) {
  std::istringstream in(record_line("a", 7, 8) + record_line("b", 5, 5) + "\n" +
                        record_line("c", 1, 10));
  const auto records = parse_dataset(in);
  ASSERT_EQ(records.size(), 3u);
  EXPECT_EQ(records[0].id, "a");
  EXPECT_EQ(records[1].id, "b");
  EXPECT_EQ(records[2].id, "c");
  EXPECT_EQ(records[2].rating_b, 10);
  EXPECT_EQ(records[0].human_hinglish, std::vector<std::string>{"ghar is big"});
}

TEST(ParseDataset, RatingOutOfRangeNamesFieldAndLine) {
  std::istringstream in(record_line("a", 7, 8) + record_line("b", 11, 5));
  const auto msg = error_of([&] { parse_dataset(in, "data.jsonl"); });
  EXPECT_NE(msg.find("data.jsonl:2:"), std::string::npos) << msg;
  EXPECT_NE(msg.find("rating_a"), std::string::npos) << msg;
}

TEST(ParseDataset, DuplicateId) {
  std::istringstream in(record_line("a", 7, 8) + record_line("a", 5, 5));
  const auto msg = error_of([&] { parse_dataset(in); });
  EXPECT_NE(msg.find("duplicate id 'a'"), std::string::npos) << msg;
}

TEST(ParseDataset, MalformedLineReportsLineNumber) {
  std::istringstream in(record_line("a", 7, 8) + "{not json\n");
  const auto msg = error_of([&] { parse_dataset(in, "d"); });
  EXPECT_NE(msg.find("d:2:"), std::string::npos) << msg;
}

TEST(ParseDataset, FieldTypeAndPresenceChecks) {
  std::istringstream missing(R"({"id":"a","english":"x"})");
  EXPECT_NE(error_of([&] { parse_dataset(missing); }).find("missing field 'hindi'"),
            std::string::npos);
  std::istringstream fractional(
      R"({"id":"a","english":"","hindi":"","human_hinglish":["h"],"synthetic_hinglish":"",)"
      R"("generation_method":"","rating_a":7.5,"rating_b":3})");
  EXPECT_NE(error_of([&] { parse_dataset(fractional); }).find("rating_a"), std::string::npos);
  std::istringstream no_humans(
      R"({"id":"a","english":"","hindi":"","human_hinglish":[],"synthetic_hinglish":"",)"
      R"("generation_method":"","rating_a":7,"rating_b":3})");
  EXPECT_NE(error_of([&] { parse_dataset(no_humans); }).find("human_hinglish"), std::string::npos);
}

TEST(ParseDataset, RoundTripProperty) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<DatasetRecord> records;
    std::uniform_int_distribution<int> count(0, 8);
    for (int i = count(rng); i > 0; --i) {
      records.push_back(testing::random_record(rng, "r" + std::to_string(i)));
    }
    std::stringstream buf;
    write_dataset(buf, records);
    EXPECT_EQ(parse_dataset(buf), records);
  }
}

TEST(ParseTagged, TwoTokenSentence) {
  std::istringstream in(
      R"({"id":"s1","tokens":[{"text":"ghar","lid":"L1","pos":"NOUN"},{"text":"is","lid":"L2","pos":"AUX"}]})");
  const auto sentences = parse_tagged(in);
  ASSERT_EQ(sentences.size(), 1u);
  const TaggedSentence expected{
      "s1", {{"ghar", Lid::L1, Pos::NOUN}, {"is", Lid::L2, Pos::AUX}}};
  EXPECT_EQ(sentences[0], expected);
}

TEST(ParseTagged, PosMayBeNullOrAbsent) {
  std::istringstream in(
      R"({"id":"s1","tokens":[{"text":"a","lid":"OTHER","pos":null},{"text":"b","lid":"ne"}]})");
  const auto s = parse_tagged(in).at(0);
  EXPECT_FALSE(s.tokens[0].pos.has_value());
  EXPECT_FALSE(s.tokens[1].pos.has_value());
  EXPECT_EQ(s.tokens[1].lid, Lid::Other);
}

TEST(ParseTagged, UnknownLid) {
  std::istringstream in(R"({"id":"s1","tokens":[{"text":"bonjour","lid":"FR","pos":null}]})");
  const auto msg = error_of([&] { parse_tagged(in, "t"); });
  EXPECT_NE(msg.find("unknown LID label"), std::string::npos) << msg;
  EXPECT_NE(msg.find("t:1:"), std::string::npos) << msg;
}

TEST(ParseTagged, UnknownPos) {
  std::istringstream in("\n" R"({"id":"s1","tokens":[{"text":"x","lid":"L1","pos":"NN"}]})");
  const auto msg = error_of([&] { parse_tagged(in, "t"); });
  EXPECT_NE(msg.find("unknown POS tag 'NN'"), std::string::npos) << msg;
  EXPECT_NE(msg.find("t:2:"), std::string::npos) << msg;
}

TEST(ParseTagged, StructuralErrors) {
  std::istringstream empty(R"({"id":"s1","tokens":[]})");
  EXPECT_NE(error_of([&] { parse_tagged(empty); }).find("empty token list"), std::string::npos);
  std::istringstream dup(R"({"id":"s","tokens":[{"text":"a","lid":"L1"}]})"
                         "\n"
                         R"({"id":"s","tokens":[{"text":"a","lid":"L1"}]})");
  EXPECT_NE(error_of([&] { parse_tagged(dup); }).find("duplicate id"), std::string::npos);
  std::istringstream spaced(R"({"id":"s","tokens":[{"text":"a b","lid":"L1"}]})");
  EXPECT_NE(error_of([&] { parse_tagged(spaced); }).find("whitespace"), std::string::npos);
  std::istringstream blank(R"({"id":"s","tokens":[{"text":"","lid":"L1"}]})");
  EXPECT_NE(error_of([&] { parse_tagged(blank); }).find("empty token text"), std::string::npos);
}

TEST(ParseTagged, RoundTripProperty) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<TaggedSentence> sentences;
    for (int i = 0; i < 6; ++i) {
      sentences.push_back(testing::random_sentence(rng, "s" + std::to_string(i)));
    }
    std::stringstream buf;
    write_tagged(buf, sentences);
    EXPECT_EQ(parse_tagged(buf), sentences);
  }
}

TEST(ParseFiles, MissingFile) {
  EXPECT_THROW(parse_dataset(std::filesystem::path("/nonexistent/x.jsonl")), DataError);
  EXPECT_THROW(parse_tagged(std::filesystem::path("/nonexistent/x.jsonl")), DataError);
}

TEST(ParseFiles, BundledFixture) {
  const std::filesystem::path dir = CMQE_FIXTURE_DIR;
  EXPECT_EQ(parse_dataset(dir / "dataset.jsonl").size(), 20u);
  EXPECT_EQ(parse_tagged(dir / "tagged.jsonl").size(), 20u);
}

}  // namespace
}  // namespace cmqe
