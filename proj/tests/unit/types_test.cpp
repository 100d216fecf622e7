#include "cmqe/types.hpp"

#include <gtest/gtest.h>

#include "cmqe/error.hpp"

namespace cmqe {
namespace {

DatasetRecord rated(int a, int b) {
  DatasetRecord r;
  r.id = "x";
  r.human_hinglish = {"h"};
  r.rating_a = a;
  r.rating_b = b;
  return r;
}

TEST(DeriveTargets, HalfUpRounding) {
  const auto t = derive_targets(rated(7, 8));
  EXPECT_EQ(t.quality, 8);
  EXPECT_EQ(t.disagreement, 1);
}

TEST(DeriveTargets, Agreement) {
  const auto t = derive_targets(rated(5, 5));
  EXPECT_EQ(t.quality, 5);
  EXPECT_EQ(t.disagreement, 0);
}

TEST(DeriveTargets, Extremes) {
  const auto t = derive_targets(rated(1, 10));
  EXPECT_EQ(t.quality, 6);
  EXPECT_EQ(t.disagreement, 9);
  EXPECT_EQ(t.id, "x");
}

TEST(DeriveTargets, AllRatingPairs) {
  for (int a = kMinRating; a <= kMaxRating; ++a) {
    for (int b = kMinRating; b <= kMaxRating; ++b) {
      const auto t = derive_targets(rated(a, b));
      const auto swapped = derive_targets(rated(b, a));
      EXPECT_EQ(t.quality, swapped.quality);
      EXPECT_EQ(t.disagreement, swapped.disagreement);
      EXPECT_GE(t.quality, 1);
      EXPECT_LE(t.quality, 10);
      EXPECT_GE(t.disagreement, 0);
      EXPECT_LE(t.disagreement, 9);
      // Half-up: the rounded mean is within 0.5 and ties go up.
      const double mean = (a + b) / 2.0;
      EXPECT_LE(std::abs(t.quality - mean), 0.5);
      if ((a + b) % 2 == 1) {
        EXPECT_GT(t.quality, mean);
      }
    }
  }
}

TEST(DeriveTargets, RejectsOutOfRange) {
  EXPECT_THROW(derive_targets(rated(0, 5)), DataError);
  EXPECT_THROW(derive_targets(rated(5, 11)), DataError);
}

TEST(Labels, LidNamesAndAliases) {
  EXPECT_EQ(parse_lid("L1"), Lid::L1);
  EXPECT_EQ(parse_lid("en"), Lid::L2);
  EXPECT_EQ(parse_lid("ne"), Lid::Other);
  EXPECT_EQ(parse_lid("univ"), Lid::Other);
  EXPECT_FALSE(parse_lid("FR").has_value());
  EXPECT_FALSE(parse_lid("l1").has_value());
  for (auto lid : {Lid::L1, Lid::L2, Lid::Other}) EXPECT_EQ(parse_lid(to_string(lid)), lid);
}

TEST(Labels, PosRoundTripAndRejection) {
  for (auto pos : kAllPos) EXPECT_EQ(parse_pos(to_string(pos)), pos);
  EXPECT_FALSE(parse_pos("NN").has_value());
  EXPECT_FALSE(parse_pos("noun").has_value());
  EXPECT_EQ(to_string(Pos::NOUN), "NOUN");
  EXPECT_EQ(index_of(Pos::X), kPosCount - 1);
}

TEST(Labels, TaskRanges) {
  EXPECT_EQ(parse_task("quality"), Task::Quality);
  EXPECT_EQ(parse_task("disagreement"), Task::Disagreement);
  EXPECT_FALSE(parse_task("Quality").has_value());
  EXPECT_EQ(target_range(Task::Quality).lo, 1);
  EXPECT_EQ(target_range(Task::Disagreement).hi, 9);
}

}  // namespace
}  // namespace cmqe
