#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "cmqe/types.hpp"

namespace cmqe {

enum class F1Average { Macro, Micro, Weighted };

std::string_view to_string(F1Average average);
std::optional<F1Average> parse_f1_average(std::string_view text);

/// Half-up rounding followed by clipping to the task's target range.
/// Throws NumericError on non-finite input.
int round_clip(double prediction, Task task);

/// F1 over the classes present in gold or pred. Weighted averaging weighs
/// each class by its gold support; micro averaging pools all decisions.
double f1_score(std::span<const int> gold, std::span<const int> pred,
                F1Average average = F1Average::Weighted);

struct Kappa {
  double value = 0.0;
  bool valid = false;  // false when expected agreement is 1
};

/// Unweighted Cohen's kappa.
Kappa cohen_kappa(std::span<const int> gold, std::span<const int> pred);

double mean_squared_error(std::span<const double> gold, std::span<const double> pred);
double mean_squared_error(std::span<const int> gold, std::span<const int> pred);

struct Prediction {
  std::string id;
  double raw = 0.0;
  int rounded = 0;

  bool operator==(const Prediction&) const = default;
};

std::vector<Prediction> parse_predictions(std::istream& in,
                                          const std::string& source = "<predictions>");
std::vector<Prediction> parse_predictions(const std::filesystem::path& path);
void write_predictions(std::ostream& out, std::span<const Prediction> predictions);

struct EvalReport {
  Task task = Task::Quality;
  F1Average average = F1Average::Weighted;
  double f1 = 0.0;
  std::optional<double> cohen_kappa;  // quality task only
  double mse_rounded = 0.0;
  double mse_raw = 0.0;
  std::size_t n = 0;
  std::map<int, std::size_t> class_counts;  // of rounded predictions

  nlohmann::json to_json() const;
  bool operator==(const EvalReport&) const = default;
};

/// Pairs gold targets with raw predictions by id (both sides must cover the
/// same ids), rounds and clips the predictions and scores them. The result
/// does not depend on input order.
EvalReport evaluate(std::span<const TaskTarget> gold, std::span<const Prediction> predictions,
                    Task task, F1Average average = F1Average::Weighted);

}  // namespace cmqe
