#include "cli.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include <CLI11.hpp>

#include "cmqe/dataset_io.hpp"
#include "cmqe/error.hpp"
#include "cmqe/eval.hpp"
#include "cmqe/features.hpp"
#include "cmqe/metrics.hpp"
#include "cmqe/mlp.hpp"
#include "cmqe/model_io.hpp"

namespace cmqe::cli {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Streams every output to a temporary sibling; targets are only replaced by
// commit(). Uncommitted temporaries are removed on destruction.
class OutputSet {
 public:
  OutputSet() = default;
  OutputSet(const OutputSet&) = delete;
  OutputSet& operator=(const OutputSet&) = delete;

  ~OutputSet() {
    for (auto& p : pending_) {
      p.stream.reset();
      std::error_code ec;
      fs::remove(p.temp, ec);
    }
  }

  std::ostream& open(const fs::path& target) {
    fs::path temp = target;
    temp += ".partial";
    auto stream = std::make_unique<std::ofstream>(temp, std::ios::binary | std::ios::trunc);
    if (!*stream) throw DataError("cannot write '" + target.string() + "'");
    pending_.push_back({target, temp, std::move(stream)});
    return *pending_.back().stream;
  }

  void commit() {
    for (auto& p : pending_) {
      p.stream->flush();
      if (!*p.stream) throw DataError("failed writing '" + p.target.string() + "'");
      p.stream.reset();
    }
    for (auto& p : pending_) fs::rename(p.temp, p.target);
    pending_.clear();
  }

 private:
  struct Pending {
    fs::path target;
    fs::path temp;
    std::unique_ptr<std::ofstream> stream;
  };
  std::vector<Pending> pending_;
};

struct TrainingFlags {
  std::uint64_t seed = 0;
  std::optional<double> learning_rate;
  std::vector<std::size_t> hidden_dims;
  std::vector<double> lr_grid;
  std::size_t batch_size = 0;
  std::size_t max_epochs = 200;
  bool search_hidden = false;
};

struct Options {
  fs::path dataset, tagged, features, model, predictions, out, report, dump;
  std::string task = "quality";
  std::string f1_average = "weighted";
  TrainingFlags training;
};

Task task_of(const Options& o) {
  auto t = parse_task(o.task);
  if (!t) throw UsageError("unknown task '" + o.task + "'");
  return *t;
}

MlpConfig config_of(const TrainingFlags& f, std::size_t input_dim) {
  MlpConfig c;
  c.input_dim = input_dim;
  c.seed = f.seed;
  if (f.learning_rate) c.learning_rate = *f.learning_rate;
  if (!f.hidden_dims.empty()) c.hidden_dims = f.hidden_dims;
  if (!f.lr_grid.empty()) c.lr_grid = f.lr_grid;
  c.batch_size = f.batch_size;
  c.max_epochs = f.max_epochs;
  c.search_hidden_dims = f.search_hidden;
  c.validate();
  return c;
}

json finite_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

// Dataset records joined with the metrics of their tagged synthetic sentence
// and their precomputed features, in dataset order.
struct Joined {
  std::vector<DatasetRecord> dataset;
  std::vector<MetricVector> metrics;
  std::vector<FeatureRecord> features;
  std::size_t embedding_dim = 0;
};

Joined load_joined(const Options& o) {
  Joined j;
  j.dataset = parse_dataset(o.dataset);
  auto tagged = parse_tagged(o.tagged);
  auto feature_file = parse_features(o.features);
  j.embedding_dim = feature_file.embedding_dim;

  std::unordered_map<std::string, const TaggedSentence*> tagged_by_id;
  for (const auto& s : tagged) tagged_by_id.emplace(s.id, &s);
  std::unordered_map<std::string, FeatureRecord*> features_by_id;
  for (auto& f : feature_file.records) features_by_id.emplace(f.id, &f);

  std::unordered_set<std::string> in_dataset;
  for (const auto& r : j.dataset) in_dataset.insert(r.id);
  for (const auto& s : tagged) {
    if (!in_dataset.contains(s.id)) throw DataError("tagged id '" + s.id + "' not in dataset");
  }
  for (const auto& f : feature_file.records) {
    if (!in_dataset.contains(f.id)) throw DataError("features id '" + f.id + "' not in dataset");
  }

  for (const auto& r : j.dataset) {
    auto t = tagged_by_id.find(r.id);
    if (t == tagged_by_id.end()) throw DataError("id '" + r.id + "' missing from tagged file");
    auto f = features_by_id.find(r.id);
    if (f == features_by_id.end()) throw DataError("id '" + r.id + "' missing from features file");
    j.metrics.push_back(metric_vector(*t->second));
    j.features.push_back(std::move(*f->second));
  }
  return j;
}

std::vector<FeatureVector> assemble_all(const Joined& j, const ScalerParams& scaler) {
  std::vector<FeatureVector> out;
  out.reserve(j.dataset.size());
  for (std::size_t i = 0; i < j.dataset.size(); ++i) {
    out.push_back(assemble_features(j.metrics[i], j.features[i], scaler));
  }
  return out;
}

std::vector<double> targets_of(const Joined& j, Task task) {
  std::vector<double> out;
  out.reserve(j.dataset.size());
  for (const auto& r : j.dataset) out.push_back(derive_targets(r).value(task));
  return out;
}

void dump_vectors(std::ostream& out, const std::vector<FeatureVector>& vectors) {
  for (const auto& v : vectors) {
    out << v.id;
    for (double x : v.values) out << '\t' << json(x).dump();
    out << '\n';
  }
}

int cmd_metrics(const Options& o, std::ostream& out) {
  const auto sentences = parse_tagged(o.tagged);
  OutputSet outputs;
  auto& file = outputs.open(o.out);
  for (const auto& s : sentences) file << metric_record(metric_vector(s)).dump() << '\n';
  outputs.commit();
  out << json{{"sentences", sentences.size()}, {"out", o.out.string()}}.dump() << '\n';
  return kSuccess;
}

int cmd_train(const Options& o, std::ostream& out) {
  const Task task = task_of(o);
  const Joined joined = load_joined(o);
  if (joined.dataset.empty()) throw DataError("dataset is empty");
  const ScalerParams scaler = fit_scaler(joined.metrics);
  const auto vectors = assemble_all(joined, scaler);
  const auto targets = targets_of(joined, task);
  const auto data = TrainingSet::from_features(vectors, targets);
  const MlpConfig config = config_of(o.training, data.input_dim());

  auto result = train(init_model(config), data, config);
  const RegressionModel model{task, scaler, vectors.front().layout, std::move(result.model)};

  OutputSet outputs;
  outputs.open(o.model) << serialize_model(model);
  const json report{{"task", to_string(task)},
                    {"seed", result.report.seed},
                    {"epochs_run", result.report.epochs_run},
                    {"final_learning_rate", result.report.final_learning_rate},
                    {"epoch_loss", result.report.epoch_loss},
                    {"epoch_learning_rate", result.report.epoch_learning_rate}};
  if (!o.report.empty()) outputs.open(o.report) << report.dump(2) << '\n';
  if (!o.dump.empty()) dump_vectors(outputs.open(o.dump), vectors);
  outputs.commit();

  out << json{{"task", to_string(task)},
              {"instances", data.size()},
              {"feature_dim", data.input_dim()},
              {"epochs_run", result.report.epochs_run},
              {"final_loss", result.report.epoch_loss.back()},
              {"final_learning_rate", result.report.final_learning_rate}}
             .dump()
      << '\n';
  return kSuccess;
}

int cmd_predict(const Options& o, std::ostream& out) {
  const RegressionModel model = load_model(o.model);
  const Joined joined = load_joined(o);
  const auto vectors = assemble_all(joined, model.scaler);

  std::vector<Prediction> predictions;
  predictions.reserve(vectors.size());
  for (const auto& v : vectors) {
    if (v.layout != model.layout) {
      throw DataError("instance '" + v.id + "' has feature dimension " +
                      std::to_string(v.values.size()) + " but the model expects " +
                      std::to_string(model.layout.dimension()));
    }
    const double raw = forward(model.network, v.values);
    if (!std::isfinite(raw)) throw NumericError("non-finite prediction for '" + v.id + "'");
    predictions.push_back({v.id, raw, round_clip(raw, model.task)});
  }

  OutputSet outputs;
  write_predictions(outputs.open(o.out), predictions);
  if (!o.dump.empty()) dump_vectors(outputs.open(o.dump), vectors);
  outputs.commit();
  out << json{{"task", to_string(model.task)}, {"predictions", predictions.size()}}.dump() << '\n';
  return kSuccess;
}

int cmd_evaluate(const Options& o, std::ostream& out) {
  const Task task = task_of(o);
  const auto average = parse_f1_average(o.f1_average);
  if (!average) throw UsageError("unknown F1 averaging '" + o.f1_average + "'");
  const auto dataset = parse_dataset(o.dataset);
  const auto predictions = parse_predictions(o.predictions);
  std::vector<TaskTarget> gold;
  gold.reserve(dataset.size());
  for (const auto& r : dataset) gold.push_back(derive_targets(r));

  const std::string line = evaluate(gold, predictions, task, *average).to_json().dump();
  if (!o.out.empty()) {
    OutputSet outputs;
    outputs.open(o.out) << line << '\n';
    outputs.commit();
  }
  out << line << '\n';
  return kSuccess;
}

int cmd_gridsearch(const Options& o, std::ostream& out) {
  const Task task = task_of(o);
  const Joined joined = load_joined(o);
  if (joined.dataset.empty()) throw DataError("dataset is empty");
  const ScalerParams scaler = fit_scaler(joined.metrics);
  const auto vectors = assemble_all(joined, scaler);
  const auto data = TrainingSet::from_features(vectors, targets_of(joined, task));
  const MlpConfig config = config_of(o.training, data.input_dim());

  const auto result = grid_search(data, config);

  OutputSet outputs;
  auto& table = outputs.open(o.out);
  for (std::size_t i = 0; i < result.points.size(); ++i) {
    const auto& p = result.points[i];
    table << json{{"learning_rate", p.learning_rate},
                  {"hidden_dims", p.hidden_dims},
                  {"validation_mse", finite_or_null(p.validation_mse)},
                  {"selected", i == result.best_index}}
                 .dump()
          << '\n';
  }
  outputs.commit();
  const auto& best = result.points[result.best_index];
  out << json{{"task", to_string(task)},
              {"learning_rate", best.learning_rate},
              {"hidden_dims", best.hidden_dims},
              {"validation_mse", best.validation_mse}}
             .dump()
      << '\n';
  return kSuccess;
}

void add_joined_inputs(CLI::App* cmd, Options& o) {
  cmd->add_option("--dataset", o.dataset, "Dataset file (JSONL)")->required()->check(CLI::ExistingFile);
  cmd->add_option("--tagged", o.tagged, "Tagged synthetic sentences (JSONL)")
      ->required()
      ->check(CLI::ExistingFile);
  cmd->add_option("--features", o.features, "Precomputed features file")
      ->required()
      ->check(CLI::ExistingFile);
}

void add_task(CLI::App* cmd, Options& o) {
  cmd->add_option("--task", o.task, "quality or disagreement")
      ->check(CLI::IsMember({"quality", "disagreement"}));
}

void add_training_flags(CLI::App* cmd, TrainingFlags& f) {
  cmd->add_option("--seed", f.seed, "Seed for initialisation, shuffling and splits");
  cmd->add_option("--lr", f.learning_rate, "Initial learning rate");
  cmd->add_option("--hidden-dims", f.hidden_dims, "Hidden layer widths, e.g. 1000,100,10")
      ->delimiter(',');
  cmd->add_option("--batch-size", f.batch_size, "Mini-batch size (default min(200, n))");
  cmd->add_option("--max-epochs", f.max_epochs, "Number of training epochs");
}

}  // namespace

json metric_record(const MetricVector& mv) {
  json su = json::object();
  json su_valid = json::object();
  for (auto pos : kAllPos) {
    su[std::string(to_string(pos))] = mv.symcom_su[index_of(pos)];
    su_valid[std::string(to_string(pos))] = mv.valid.symcom_su[index_of(pos)];
  }
  return json{{"id", mv.id},
              {"cmi", mv.cmi},
              {"switch_points", mv.switch_points},
              {"burstiness", mv.burstiness},
              {"symcom_sent", mv.symcom_sent},
              {"symcom_su", su},
              {"valid",
               {{"cmi", mv.valid.cmi},
                {"switch_points", mv.valid.switch_points},
                {"burstiness", mv.valid.burstiness},
                {"symcom_sent", mv.valid.symcom_sent},
                {"symcom_su", su_valid}}}};
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Code-mixed text quality estimation toolkit", "cmqe"};
  app.require_subcommand(1);
  Options o;

  auto* metrics = app.add_subcommand("metrics", "Compute code-mixing metrics for tagged sentences");
  metrics->add_option("--tagged", o.tagged, "Tagged sentences (JSONL)")
      ->required()
      ->check(CLI::ExistingFile);
  metrics->add_option("--out", o.out, "Metrics output (JSONL)")->required();

  auto* train_cmd = app.add_subcommand("train", "Train a task-specific MLP regressor");
  add_joined_inputs(train_cmd, o);
  add_task(train_cmd, o);
  train_cmd->add_option("--model-out", o.model, "Model file to write")->required();
  train_cmd->add_option("--report", o.report, "Training report (JSON)");
  train_cmd->add_option("--dump-features", o.dump, "Write assembled model inputs (TSV)");
  add_training_flags(train_cmd, o.training);

  auto* predict_cmd = app.add_subcommand("predict", "Predict with a trained model");
  predict_cmd->add_option("--model", o.model, "Model file")->required()->check(CLI::ExistingFile);
  add_joined_inputs(predict_cmd, o);
  predict_cmd->add_option("--out", o.out, "Predictions output (JSONL)")->required();
  predict_cmd->add_option("--dump-features", o.dump, "Write assembled model inputs (TSV)");

  auto* evaluate_cmd = app.add_subcommand("evaluate", "Score predictions against gold ratings");
  evaluate_cmd->add_option("--predictions", o.predictions, "Predictions file")
      ->required()
      ->check(CLI::ExistingFile);
  evaluate_cmd->add_option("--dataset", o.dataset, "Dataset file")
      ->required()
      ->check(CLI::ExistingFile);
  add_task(evaluate_cmd, o);
  evaluate_cmd->add_option("--f1-average", o.f1_average, "macro, micro or weighted")
      ->check(CLI::IsMember({"macro", "micro", "weighted"}));
  evaluate_cmd->add_option("--out", o.out, "Also write the report here");

  auto* grid_cmd = app.add_subcommand("gridsearch", "Select a learning rate on a validation split");
  add_joined_inputs(grid_cmd, o);
  add_task(grid_cmd, o);
  grid_cmd->add_option("--out", o.out, "Per-point validation table (JSONL)")->required();
  grid_cmd->add_option("--lr-grid", o.training.lr_grid, "Learning rates to try")->delimiter(',');
  grid_cmd->add_flag("--search-hidden", o.training.search_hidden,
                     "Also sweep {10,100,1000} for every hidden layer");
  add_training_flags(grid_cmd, o.training);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kSuccess : kUsageError;
  }

  try {
    if (metrics->parsed()) return cmd_metrics(o, out);
    if (train_cmd->parsed()) return cmd_train(o, out);
    if (predict_cmd->parsed()) return cmd_predict(o, out);
    if (evaluate_cmd->parsed()) return cmd_evaluate(o, out);
    if (grid_cmd->parsed()) return cmd_gridsearch(o, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const NumericError& e) {
    err << "numeric error: " << e.what() << '\n';
    return kNumericError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kDataError;
  }
  return kUsageError;
}

}  // namespace cmqe::cli
