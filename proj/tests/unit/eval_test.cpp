#include "cmqe/eval.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

#include "cmqe/error.hpp"
#include "naive_eval.hpp"

namespace cmqe {
namespace {

using IntVec = std::vector<int>;

TEST(RoundClip, Examples) {
  EXPECT_EQ(round_clip(7.5, Task::Quality), 8);
  EXPECT_EQ(round_clip(7.49, Task::Quality), 7);
  EXPECT_EQ(round_clip(12.3, Task::Quality), 10);
  EXPECT_EQ(round_clip(-3.0, Task::Quality), 1);
  EXPECT_EQ(round_clip(-0.4, Task::Disagreement), 0);
  EXPECT_EQ(round_clip(9.6, Task::Disagreement), 9);
  EXPECT_THROW(round_clip(std::numeric_limits<double>::quiet_NaN(), Task::Quality), NumericError);
  EXPECT_THROW(round_clip(std::numeric_limits<double>::infinity(), Task::Quality), NumericError);
}

TEST(RoundClip, RangeAndIdempotence) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> x(-50.0, 50.0);
  for (auto task : {Task::Quality, Task::Disagreement}) {
    const auto r = target_range(task);
    for (int i = 0; i < 1000; ++i) {
      const int v = round_clip(x(rng), task);
      EXPECT_GE(v, r.lo);
      EXPECT_LE(v, r.hi);
      EXPECT_EQ(round_clip(v, task), v);
    }
  }
}

TEST(F1, PerfectPrediction) {
  const IntVec g{1, 2, 3, 3, 5};
  for (auto avg : {F1Average::Macro, F1Average::Micro, F1Average::Weighted}) {
    EXPECT_EQ(f1_score(g, g, avg), 1.0);
  }
}

TEST(F1, BinaryPositiveClass) {
  // TP=1, FP=1, FN=1, TN=1 with positive class 1.
  const IntVec gold{1, 1, 0, 0};
  const IntVec pred{1, 0, 1, 0};
  // Both classes have P = R = 0.5, so every averaging gives 0.5.
  EXPECT_DOUBLE_EQ(f1_score(gold, pred, F1Average::Macro), 0.5);
  EXPECT_DOUBLE_EQ(f1_score(gold, pred, F1Average::Weighted), 0.5);
  EXPECT_DOUBLE_EQ(f1_score(gold, pred, F1Average::Micro), 0.5);
}

TEST(F1, MacroHandExample) {
  const IntVec gold{1, 1, 2};
  const IntVec pred{1, 2, 2};
  EXPECT_DOUBLE_EQ(f1_score(gold, pred, F1Average::Macro), 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(f1_score(gold, pred, F1Average::Weighted), 2.0 / 3.0);
}

TEST(F1, PredictedOnlyClassCountsForMacroNotWeighted) {
  const IntVec gold{1, 1, 1, 2};
  const IntVec pred{1, 1, 3, 2};
  // class 1: P=1, R=2/3 -> 0.8; class 2: 1; class 3: 0
  EXPECT_DOUBLE_EQ(f1_score(gold, pred, F1Average::Macro), (0.8 + 1.0 + 0.0) / 3.0);
  EXPECT_DOUBLE_EQ(f1_score(gold, pred, F1Average::Weighted), (0.8 * 3 + 1.0) / 4.0);
}

TEST(F1, LengthMismatch) {
  EXPECT_THROW(f1_score(IntVec{1, 2}, IntVec{1}), DataError);
  EXPECT_THROW(f1_score(IntVec{}, IntVec{}), DataError);
}

TEST(Kappa, Examples) {
  const IntVec g{1, 2, 3, 1};
  EXPECT_EQ(cohen_kappa(g, g).value, 1.0);
  // confusion [[2,1],[1,2]]
  const IntVec gold{0, 0, 0, 1, 1, 1};
  const IntVec pred{0, 0, 1, 0, 1, 1};
  const auto k = cohen_kappa(gold, pred);
  EXPECT_TRUE(k.valid);
  EXPECT_NEAR(k.value, 1.0 / 3.0, 1e-15);
}

TEST(Kappa, DegenerateExpectedAgreement) {
  const IntVec same{4, 4, 4};
  const auto k = cohen_kappa(same, same);
  EXPECT_FALSE(k.valid);
  EXPECT_EQ(k.value, 0.0);
  EXPECT_THROW(cohen_kappa(IntVec{1}, IntVec{1, 2}), DataError);
}

// Every gold/pred list over {0, 1} of length <= 4.
TEST(Kappa, ConstantPredictionOfAbsentClassIsNotPositive) {
  for (std::size_t n = 1; n <= 4; ++n) {
    for (unsigned mask = 0; mask < (1u << n); ++mask) {
      IntVec gold(n);
      for (std::size_t i = 0; i < n; ++i) gold[i] = static_cast<int>((mask >> i) & 1u);
      for (int c : {0, 1}) {
        if (std::find(gold.begin(), gold.end(), c) != gold.end()) continue;
        const IntVec pred(n, c);
        EXPECT_LE(cohen_kappa(gold, pred).value, 0.0);
      }
    }
  }
}

TEST(Mse, SharedVectors) {
  EXPECT_EQ(mean_squared_error(IntVec{3, 4}, IntVec{3, 4}), 0.0);
  EXPECT_EQ(mean_squared_error(IntVec{2, 2}, IntVec{1, 3}), 1.0);
  EXPECT_EQ(mean_squared_error(IntVec{5}, IntVec{8}), 9.0);
  EXPECT_THROW(mean_squared_error(IntVec{5}, IntVec{}), DataError);
}

// Enumerates every label list of length <= 5 over 3 classes.
template <typename Fn>
void for_all_label_lists(std::size_t max_len, Fn&& fn) {
  for (std::size_t n = 1; n <= max_len; ++n) {
    std::size_t total = 1;
    for (std::size_t i = 0; i < n; ++i) total *= 3;
    for (std::size_t code = 0; code < total; ++code) {
      IntVec v(n);
      std::size_t c = code;
      for (std::size_t i = 0; i < n; ++i) {
        v[i] = static_cast<int>(c % 3);
        c /= 3;
      }
      fn(v);
    }
  }
}

TEST(EvalOracle, ExhaustiveSmallListsLengthThree) {
  // Pairs of lists of equal length <= 3; the acceptance suite runs length 5.
  std::vector<IntVec> lists;
  for_all_label_lists(3, [&](const IntVec& v) { lists.push_back(v); });
  for (const auto& g : lists) {
    for (const auto& p : lists) {
      if (g.size() != p.size()) continue;
      EXPECT_NEAR(f1_score(g, p, F1Average::Macro), testing::naive::macro_f1(g, p), 1e-12);
      EXPECT_NEAR(f1_score(g, p, F1Average::Weighted), testing::naive::weighted_f1(g, p), 1e-12);
      EXPECT_NEAR(f1_score(g, p, F1Average::Micro), testing::naive::micro_f1(g, p), 1e-12);
      EXPECT_NEAR(cohen_kappa(g, p).value, testing::naive::kappa(g, p), 1e-12);
    }
  }
}

TEST(EvalProperties, PermutationAndRelabelingInvariance) {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> label(1, 6);
  for (int trial = 0; trial < 300; ++trial) {
    IntVec g(12);
    IntVec p(12);
    for (auto& x : g) x = label(rng);
    for (auto& x : p) x = label(rng);
    std::vector<std::size_t> perm(12);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::shuffle(perm.begin(), perm.end(), rng);
    IntVec gp;
    IntVec pp;
    IntVec gr;
    IntVec pr;
    for (auto i : perm) {
      gp.push_back(g[i]);
      pp.push_back(p[i]);
    }
    for (std::size_t i = 0; i < 12; ++i) {
      gr.push_back(100 - 7 * g[i]);  // injective relabeling
      pr.push_back(100 - 7 * p[i]);
    }
    for (auto avg : {F1Average::Macro, F1Average::Micro, F1Average::Weighted}) {
      EXPECT_NEAR(f1_score(g, p, avg), f1_score(gp, pp, avg), 1e-12);
      EXPECT_NEAR(f1_score(g, p, avg), f1_score(gr, pr, avg), 1e-12);
    }
    const auto k = cohen_kappa(g, p);
    EXPECT_NEAR(k.value, cohen_kappa(gp, pp).value, 1e-12);
    EXPECT_NEAR(k.value, cohen_kappa(gr, pr).value, 1e-12);
    EXPECT_LE(k.value, 1.0);
    EXPECT_EQ(k.value == 1.0, g == p) << trial;
  }
}

std::vector<TaskTarget> gold_targets(const IntVec& quality) {
  std::vector<TaskTarget> out;
  for (std::size_t i = 0; i < quality.size(); ++i) {
    out.push_back({"id" + std::to_string(i), quality[i], quality[i] % 10});
  }
  return out;
}

TEST(Evaluate, PerfectPredictions) {
  const auto gold = gold_targets({3, 7, 7, 10, 1});
  std::vector<Prediction> pred;
  for (const auto& g : gold) pred.push_back({g.id, static_cast<double>(g.quality), g.quality});
  const auto r = evaluate(gold, pred, Task::Quality);
  EXPECT_EQ(r.f1, 1.0);
  ASSERT_TRUE(r.cohen_kappa.has_value());
  EXPECT_EQ(*r.cohen_kappa, 1.0);
  EXPECT_EQ(r.mse_rounded, 0.0);
  EXPECT_EQ(r.mse_raw, 0.0);
  EXPECT_EQ(r.n, 5u);
}

TEST(Evaluate, ConstantPrediction) {
  const IntVec q{2, 5, 9, 6, 5};
  const auto gold = gold_targets(q);
  std::vector<Prediction> pred;
  for (const auto& g : gold) pred.push_back({g.id, 5.2, 5});
  const auto r = evaluate(gold, pred, Task::Quality);
  EXPECT_EQ(r.class_counts, (std::map<int, std::size_t>{{5, 5}}));
  double expected = 0.0;
  for (int g : q) expected += (g - 5.0) * (g - 5.0);
  EXPECT_DOUBLE_EQ(r.mse_rounded, expected / 5.0);
  double raw = 0.0;
  for (int g : q) raw += (g - 5.2) * (g - 5.2);
  EXPECT_DOUBLE_EQ(r.mse_raw, raw / 5.0);
}

TEST(Evaluate, DisagreementHasNoKappa) {
  const auto gold = gold_targets({3, 7});
  const std::vector<Prediction> pred{{"id0", 3.0, 3}, {"id1", 7.0, 7}};
  const auto r = evaluate(gold, pred, Task::Disagreement);
  EXPECT_FALSE(r.cohen_kappa.has_value());
  EXPECT_TRUE(r.to_json()["cohen_kappa"].is_null());
  EXPECT_EQ(r.to_json()["task"], "disagreement");
}

TEST(Evaluate, OrderInvariant) {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> q(1, 10);
  std::uniform_real_distribution<double> noise(-3.0, 3.0);
  IntVec quality(30);
  for (auto& x : quality) x = q(rng);
  auto gold = gold_targets(quality);
  std::vector<Prediction> pred;
  for (const auto& g : gold) pred.push_back({g.id, g.quality + noise(rng), 0});
  const auto r = evaluate(gold, pred, Task::Quality, F1Average::Macro);
  std::shuffle(gold.begin(), gold.end(), rng);
  std::shuffle(pred.begin(), pred.end(), rng);
  EXPECT_EQ(evaluate(gold, pred, Task::Quality, F1Average::Macro), r);
}

TEST(Evaluate, RawAndRoundedAgreeOnInRangeIntegers) {
  const auto gold = gold_targets({1, 4, 8});
  const std::vector<Prediction> pred{{"id0", 2.0, 2}, {"id1", 4.0, 4}, {"id2", 10.0, 10}};
  const auto r = evaluate(gold, pred, Task::Quality);
  EXPECT_EQ(r.mse_raw, r.mse_rounded);
}

TEST(Evaluate, IdMismatch) {
  const auto gold = gold_targets({3, 7});
  EXPECT_THROW(evaluate(gold, std::vector<Prediction>{{"id0", 3.0, 3}, {"zzz", 7.0, 7}},
                        Task::Quality),
               DataError);
  EXPECT_THROW(evaluate(gold, std::vector<Prediction>{{"id0", 3.0, 3}}, Task::Quality), DataError);
}

TEST(PredictionsIo, RoundTrip) {
  const std::vector<Prediction> preds{{"a", 3.141592653589793, 3}, {"b", -0.1, 0}};
  std::stringstream buf;
  write_predictions(buf, preds);
  EXPECT_EQ(parse_predictions(buf), preds);
  std::istringstream bad(R"({"id":"a","raw":"x","rounded":1})");
  EXPECT_THROW(parse_predictions(bad), DataError);
}

TEST(F1Average, Names) {
  EXPECT_EQ(parse_f1_average("macro"), F1Average::Macro);
  EXPECT_EQ(to_string(F1Average::Weighted), "weighted");
  EXPECT_FALSE(parse_f1_average("samples").has_value());
}

}  // namespace
}  // namespace cmqe
