#include "cmqe/eval.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <unordered_map>
#include <unordered_set>

#include "cmqe/error.hpp"
#include "jsonl.hpp"

namespace cmqe {
namespace {

using detail::json;

void check_lengths(std::size_t a, std::size_t b) {
  if (a != b) {
    throw DataError("length mismatch: " + std::to_string(a) + " vs " + std::to_string(b));
  }
  if (a == 0) throw DataError("empty input");
}

struct ClassTally {
  std::size_t tp = 0;
  std::size_t gold = 0;
  std::size_t pred = 0;
};

double class_f1(const ClassTally& t) {
  const std::size_t denom = t.gold + t.pred;
  return denom == 0 ? 0.0 : 2.0 * static_cast<double>(t.tp) / static_cast<double>(denom);
}

}  // namespace

std::string_view to_string(F1Average average) {
  switch (average) {
    case F1Average::Macro: return "macro";
    case F1Average::Micro: return "micro";
    case F1Average::Weighted: return "weighted";
  }
  return "weighted";
}

std::optional<F1Average> parse_f1_average(std::string_view text) {
  if (text == "macro") return F1Average::Macro;
  if (text == "micro") return F1Average::Micro;
  if (text == "weighted") return F1Average::Weighted;
  return std::nullopt;
}

int round_clip(double prediction, Task task) {
  if (!std::isfinite(prediction)) throw NumericError("non-finite prediction");
  const auto range = target_range(task);
  const double rounded = std::floor(prediction + 0.5);
  return static_cast<int>(std::clamp(rounded, static_cast<double>(range.lo),
                                     static_cast<double>(range.hi)));
}

double f1_score(std::span<const int> gold, std::span<const int> pred, F1Average average) {
  check_lengths(gold.size(), pred.size());
  std::map<int, ClassTally> tallies;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    ++tallies[gold[i]].gold;
    ++tallies[pred[i]].pred;
    if (gold[i] == pred[i]) ++tallies[gold[i]].tp;
  }
  const auto n = static_cast<double>(gold.size());
  switch (average) {
    case F1Average::Micro: {
      // Single-label multiclass: pooled precision = pooled recall = accuracy.
      std::size_t tp = 0;
      for (const auto& [cls, t] : tallies) tp += t.tp;
      return static_cast<double>(tp) / n;
    }
    case F1Average::Macro: {
      double sum = 0.0;
      for (const auto& [cls, t] : tallies) sum += class_f1(t);
      return sum / static_cast<double>(tallies.size());
    }
    case F1Average::Weighted: {
      double sum = 0.0;
      for (const auto& [cls, t] : tallies) sum += class_f1(t) * static_cast<double>(t.gold);
      return sum / n;
    }
  }
  return 0.0;
}

Kappa cohen_kappa(std::span<const int> gold, std::span<const int> pred) {
  check_lengths(gold.size(), pred.size());
  std::map<int, ClassTally> tallies;
  std::size_t agree = 0;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    ++tallies[gold[i]].gold;
    ++tallies[pred[i]].pred;
    if (gold[i] == pred[i]) ++agree;
  }
  const auto n = static_cast<double>(gold.size());
  const double p_o = static_cast<double>(agree) / n;
  double p_e = 0.0;
  for (const auto& [cls, t] : tallies) {
    p_e += (static_cast<double>(t.gold) / n) * (static_cast<double>(t.pred) / n);
  }
  if (p_e >= 1.0) return {};
  return {(p_o - p_e) / (1.0 - p_e), true};
}

double mean_squared_error(std::span<const double> gold, std::span<const double> pred) {
  check_lengths(gold.size(), pred.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    const double d = pred[i] - gold[i];
    sum += d * d;
  }
  return sum / static_cast<double>(gold.size());
}

double mean_squared_error(std::span<const int> gold, std::span<const int> pred) {
  std::vector<double> g(gold.begin(), gold.end());
  std::vector<double> p(pred.begin(), pred.end());
  return mean_squared_error(g, p);
}

std::vector<Prediction> parse_predictions(std::istream& in, const std::string& source) {
  std::vector<Prediction> out;
  detail::IdRegistry ids;
  detail::for_each_line(in, source, [&](const json& j, std::size_t) {
    Prediction p;
    p.id = detail::require_string(j, "id");
    p.raw = detail::require_number(j, "raw");
    if (!std::isfinite(p.raw)) throw DataError("field 'raw' is not finite");
    p.rounded = static_cast<int>(detail::require_integer(j, "rounded"));
    ids.add(p.id);
    out.push_back(std::move(p));
  });
  return out;
}

std::vector<Prediction> parse_predictions(const std::filesystem::path& path) {
  auto in = detail::open_input(path);
  return parse_predictions(in, path.string());
}

void write_predictions(std::ostream& out, std::span<const Prediction> predictions) {
  for (const auto& p : predictions) {
    out << json{{"id", p.id}, {"raw", p.raw}, {"rounded", p.rounded}}.dump() << '\n';
  }
}

nlohmann::json EvalReport::to_json() const {
  json counts = json::object();
  for (const auto& [cls, count] : class_counts) counts[std::to_string(cls)] = count;
  return json{{"task", to_string(task)},
              {"f1_average", to_string(average)},
              {"f1", f1},
              {"cohen_kappa", cohen_kappa ? json(*cohen_kappa) : json(nullptr)},
              {"mse_rounded", mse_rounded},
              {"mse_raw", mse_raw},
              {"n", n},
              {"class_counts", counts}};
}

EvalReport evaluate(std::span<const TaskTarget> gold, std::span<const Prediction> predictions,
                    Task task, F1Average average) {
  if (gold.empty()) throw DataError("nothing to evaluate");
  std::unordered_map<std::string, const Prediction*> by_id;
  for (const auto& p : predictions) {
    if (!by_id.emplace(p.id, &p).second) throw DataError("duplicate prediction id '" + p.id + "'");
  }
  if (predictions.size() > gold.size()) {
    std::unordered_set<std::string_view> gold_ids;
    for (const auto& g : gold) gold_ids.insert(g.id);
    for (const auto& p : predictions) {
      if (!gold_ids.contains(p.id)) throw DataError("prediction id '" + p.id + "' has no gold rating");
    }
  }

  // Score in id order so the report is independent of input order.
  std::vector<const TaskTarget*> ordered;
  ordered.reserve(gold.size());
  for (const auto& g : gold) ordered.push_back(&g);
  std::sort(ordered.begin(), ordered.end(),
            [](const TaskTarget* a, const TaskTarget* b) { return a->id < b->id; });

  std::vector<int> gold_int;
  std::vector<int> pred_int;
  std::vector<double> gold_real;
  std::vector<double> pred_raw;
  EvalReport report;
  for (const auto* g : ordered) {
    auto it = by_id.find(g->id);
    if (it == by_id.end()) throw DataError("no prediction for id '" + g->id + "'");
    const int value = g->value(task);
    const int rounded = round_clip(it->second->raw, task);
    gold_int.push_back(value);
    pred_int.push_back(rounded);
    gold_real.push_back(value);
    pred_raw.push_back(it->second->raw);
    ++report.class_counts[rounded];
  }

  report.task = task;
  report.average = average;
  report.n = gold.size();
  report.f1 = f1_score(gold_int, pred_int, average);
  if (task == Task::Quality) report.cohen_kappa = cohen_kappa(gold_int, pred_int).value;
  report.mse_rounded = mean_squared_error(gold_int, pred_int);
  report.mse_raw = mean_squared_error(gold_real, pred_raw);
  return report;
}

}  // namespace cmqe
