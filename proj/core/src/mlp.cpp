#include "cmqe/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>

#include "cmqe/error.hpp"
#include "cmqe/eval.hpp"

namespace cmqe {
namespace {

constexpr std::array<std::size_t, 3> kHiddenGrid = {10, 100, 1000};

// Independent generator streams derived from the single user seed.
enum class Stream : std::uint64_t { Init = 0, Shuffle = 1, Split = 2 };

std::mt19937_64 make_rng(std::uint64_t seed, Stream stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream)};
  return std::mt19937_64(seq);
}

Eigen::MatrixXd relu(const Eigen::MatrixXd& z) { return z.cwiseMax(0.0); }

Eigen::MatrixXd select_columns(const Eigen::MatrixXd& m, std::span<const std::size_t> cols) {
  Eigen::MatrixXd out(m.rows(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t i = 0; i < cols.size(); ++i) {
    out.col(static_cast<Eigen::Index>(i)) = m.col(static_cast<Eigen::Index>(cols[i]));
  }
  return out;
}

Eigen::VectorXd select_rows(const Eigen::VectorXd& v, std::span<const std::size_t> rows) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out(static_cast<Eigen::Index>(i)) = v(static_cast<Eigen::Index>(rows[i]));
  }
  return out;
}

void check_input_rows(const MlpModel& model, Eigen::Index rows) {
  if (static_cast<std::size_t>(rows) != model.input_dim()) {
    throw DataError("input dimension " + std::to_string(rows) + " does not match model input " +
                    std::to_string(model.input_dim()));
  }
}

std::vector<std::vector<std::size_t>> hidden_candidates(const MlpConfig& config) {
  if (!config.search_hidden_dims) return {config.hidden_dims};
  std::vector<std::vector<std::size_t>> out{{}};
  for (std::size_t layer = 0; layer < config.hidden_dims.size(); ++layer) {
    std::vector<std::vector<std::size_t>> next;
    for (const auto& prefix : out) {
      for (std::size_t width : kHiddenGrid) {
        auto extended = prefix;
        extended.push_back(width);
        next.push_back(std::move(extended));
      }
    }
    out = std::move(next);
  }
  return out;
}

}  // namespace

void MlpConfig::validate() const {
  if (hidden_dims.empty()) throw std::invalid_argument("hidden_dims must not be empty");
  if (std::find(hidden_dims.begin(), hidden_dims.end(), 0u) != hidden_dims.end()) {
    throw std::invalid_argument("hidden layer widths must be positive");
  }
  if (!(learning_rate > 0.0)) throw std::invalid_argument("learning_rate must be positive");
  for (double lr : lr_grid) {
    if (!(lr > 0.0)) throw std::invalid_argument("lr_grid entries must be positive");
  }
  if (max_epochs == 0) throw std::invalid_argument("max_epochs must be positive");
  if (!(adam_beta1 >= 0.0 && adam_beta1 < 1.0) || !(adam_beta2 >= 0.0 && adam_beta2 < 1.0)) {
    throw std::invalid_argument("Adam betas must lie in [0, 1)");
  }
  if (!(adam_epsilon > 0.0)) throw std::invalid_argument("adam_epsilon must be positive");
  if (lr_patience == 0) throw std::invalid_argument("lr_patience must be positive");
  if (!(lr_decay_factor > 1.0)) throw std::invalid_argument("lr_decay_factor must exceed 1");
  if (!(improvement_tol >= 0.0)) throw std::invalid_argument("improvement_tol must be >= 0");
}

std::size_t MlpConfig::effective_batch_size(std::size_t n_samples) const {
  const std::size_t requested = batch_size == 0 ? 200 : batch_size;
  return std::max<std::size_t>(1, std::min(requested, n_samples));
}

std::size_t MlpModel::parameter_count() const {
  std::size_t n = 0;
  for (const auto& l : layers) n += static_cast<std::size_t>(l.weights.size() + l.bias.size());
  return n;
}

bool MlpModel::all_finite() const {
  return std::all_of(layers.begin(), layers.end(), [](const DenseLayer& l) {
    return l.weights.allFinite() && l.bias.allFinite();
  });
}

MlpModel init_model(const MlpConfig& config) {
  config.validate();
  if (config.input_dim == 0) throw std::invalid_argument("input_dim must be set");
  MlpModel model{config, {}};
  auto rng = make_rng(config.seed, Stream::Init);

  std::vector<std::size_t> dims{config.input_dim};
  dims.insert(dims.end(), config.hidden_dims.begin(), config.hidden_dims.end());
  dims.push_back(1);

  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    const auto fan_in = static_cast<Eigen::Index>(dims[l]);
    const auto fan_out = static_cast<Eigen::Index>(dims[l + 1]);
    const double bound = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    std::uniform_real_distribution<double> dist(-bound, bound);
    DenseLayer layer{Eigen::MatrixXd(fan_out, fan_in), Eigen::VectorXd::Zero(fan_out)};
    for (Eigen::Index r = 0; r < fan_out; ++r) {
      for (Eigen::Index c = 0; c < fan_in; ++c) layer.weights(r, c) = dist(rng);
    }
    model.layers.push_back(std::move(layer));
  }
  return model;
}

Eigen::VectorXd forward_batch(const MlpModel& model, const Eigen::MatrixXd& inputs) {
  check_input_rows(model, inputs.rows());
  Eigen::MatrixXd a = inputs;
  for (std::size_t l = 0; l < model.layers.size(); ++l) {
    const auto& layer = model.layers[l];
    Eigen::MatrixXd z = layer.weights * a;
    z.colwise() += layer.bias;
    a = l + 1 < model.layers.size() ? relu(z) : std::move(z);
  }
  return a.row(0).transpose();
}

double forward(const MlpModel& model, std::span<const double> x) {
  const Eigen::Map<const Eigen::VectorXd> input(x.data(), static_cast<Eigen::Index>(x.size()));
  check_input_rows(model, input.rows());
  return forward_batch(model, input)(0);
}

double loss_mse(std::span<const double> predictions, std::span<const double> targets) {
  return mean_squared_error(targets, predictions);
}

Gradients gradients(const MlpModel& model, const Eigen::MatrixXd& inputs,
                    const Eigen::VectorXd& targets) {
  check_input_rows(model, inputs.rows());
  if (inputs.cols() == 0) throw DataError("empty batch");
  if (inputs.cols() != targets.size()) throw DataError("batch inputs and targets differ in size");

  const std::size_t depth = model.layers.size();
  const auto batch = static_cast<double>(inputs.cols());

  // activations[l] feeds layer l; pre[l] is layer l's pre-activation.
  std::vector<Eigen::MatrixXd> activations{inputs};
  std::vector<Eigen::MatrixXd> pre;
  for (std::size_t l = 0; l < depth; ++l) {
    Eigen::MatrixXd z = model.layers[l].weights * activations.back();
    z.colwise() += model.layers[l].bias;
    pre.push_back(z);
    if (l + 1 < depth) activations.push_back(relu(z));
  }

  const Eigen::RowVectorXd residual = pre.back().row(0) - targets.transpose();
  Gradients g;
  g.loss = residual.squaredNorm() / batch;
  g.layers.resize(depth);

  Eigen::MatrixXd delta = (2.0 / batch) * residual;  // dL/dz for the output layer
  for (std::size_t l = depth; l-- > 0;) {
    g.layers[l].weights = delta * activations[l].transpose();
    g.layers[l].bias = delta.rowwise().sum();
    if (l > 0) {
      Eigen::MatrixXd back = model.layers[l].weights.transpose() * delta;
      delta = back.cwiseProduct((pre[l - 1].array() > 0.0).cast<double>().matrix());
    }
  }
  return g;
}

AdamState::AdamState(const Parameters& like, double beta1, double beta2, double epsilon)
    : beta1_(beta1), beta2_(beta2), epsilon_(epsilon) {
  for (const auto& l : like) {
    DenseLayer zero{Eigen::MatrixXd::Zero(l.weights.rows(), l.weights.cols()),
                    Eigen::VectorXd::Zero(l.bias.size())};
    first_.push_back(zero);
    second_.push_back(std::move(zero));
  }
}

void AdamState::step(Parameters& params, const Parameters& grads, double learning_rate) {
  ++steps_;
  const double t = static_cast<double>(steps_);
  const double correction1 = 1.0 - std::pow(beta1_, t);
  const double correction2 = 1.0 - std::pow(beta2_, t);

  auto update = [&](auto& param, const auto& grad, auto& m, auto& v) {
    m = beta1_ * m + (1.0 - beta1_) * grad;
    v = beta2_ * v + (1.0 - beta2_) * grad.cwiseProduct(grad);
    param.array() -= learning_rate * (m.array() / correction1) /
                     ((v.array() / correction2).sqrt() + epsilon_);
  };
  for (std::size_t l = 0; l < params.size(); ++l) {
    update(params[l].weights, grads[l].weights, first_[l].weights, second_[l].weights);
    update(params[l].bias, grads[l].bias, first_[l].bias, second_[l].bias);
  }
}

TrainingSet TrainingSet::from_features(std::span<const FeatureVector> vectors,
                                       std::span<const double> targets) {
  if (vectors.empty()) throw DataError("no training instances");
  if (vectors.size() != targets.size()) throw DataError("feature and target counts differ");
  const std::size_t dim = vectors.front().values.size();
  TrainingSet set{Eigen::MatrixXd(static_cast<Eigen::Index>(dim),
                                  static_cast<Eigen::Index>(vectors.size())),
                  Eigen::VectorXd(static_cast<Eigen::Index>(vectors.size()))};
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    if (vectors[i].values.size() != dim) {
      throw DataError("instance '" + vectors[i].id + "' has dimension " +
                      std::to_string(vectors[i].values.size()) + ", expected " +
                      std::to_string(dim));
    }
    set.inputs.col(static_cast<Eigen::Index>(i)) =
        Eigen::Map<const Eigen::VectorXd>(vectors[i].values.data(), static_cast<Eigen::Index>(dim));
    set.targets(static_cast<Eigen::Index>(i)) = targets[i];
  }
  return set;
}

TrainResult train(MlpModel model, const TrainingSet& data, const MlpConfig& config) {
  config.validate();
  if (data.size() == 0) throw DataError("no training instances");
  check_input_rows(model, data.inputs.rows());
  if (model.layers.size() != config.hidden_dims.size() + 1) {
    throw std::invalid_argument("config hidden_dims do not match the model");
  }
  model.config = config;
  model.config.input_dim = model.input_dim();

  const std::size_t n = data.size();
  const std::size_t batch = config.effective_batch_size(n);
  auto rng = make_rng(config.seed, Stream::Shuffle);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});

  AdamState adam(model.layers, config.adam_beta1, config.adam_beta2, config.adam_epsilon);
  TrainReport report;
  report.seed = config.seed;
  double lr = config.learning_rate;
  double best = std::numeric_limits<double>::infinity();
  std::size_t stale_epochs = 0;

  for (std::size_t epoch = 0; epoch < config.max_epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double weighted_loss = 0.0;
    for (std::size_t start = 0; start < n; start += batch) {
      const auto idx = std::span<const std::size_t>(order).subspan(start, std::min(batch, n - start));
      const Gradients g = gradients(model, select_columns(data.inputs, idx),
                                    select_rows(data.targets, idx));
      if (!std::isfinite(g.loss)) {
        throw NumericError("non-finite training loss in epoch " + std::to_string(epoch + 1) +
                           " (learning rate " + std::to_string(lr) + ")");
      }
      weighted_loss += g.loss * static_cast<double>(idx.size());
      adam.step(model.layers, g.layers, lr);
    }
    const double epoch_loss = weighted_loss / static_cast<double>(n);
    if (!std::isfinite(epoch_loss)) {
      throw NumericError("non-finite training loss in epoch " + std::to_string(epoch + 1));
    }
    report.epoch_loss.push_back(epoch_loss);
    report.epoch_learning_rate.push_back(lr);

    stale_epochs = epoch_loss > best - config.improvement_tol ? stale_epochs + 1 : 0;
    best = std::min(best, epoch_loss);
    if (stale_epochs >= config.lr_patience) {
      lr /= config.lr_decay_factor;
      stale_epochs = 0;
    }
  }
  if (!model.all_finite()) throw NumericError("training produced non-finite parameters");

  report.epochs_run = report.epoch_loss.size();
  report.final_learning_rate = lr;
  return {std::move(model), std::move(report)};
}

GridSearchResult grid_search(const TrainingSet& data, const MlpConfig& config) {
  if (config.lr_grid.empty()) throw std::invalid_argument("learning-rate grid is empty");
  config.validate();
  const std::size_t n = data.size();
  if (n < 2) throw DataError("grid search needs at least 2 instances");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  auto rng = make_rng(config.seed, Stream::Split);
  std::shuffle(order.begin(), order.end(), rng);
  const std::size_t n_val = std::max<std::size_t>(1, n / 5);
  const auto train_idx = std::span<const std::size_t>(order).first(n - n_val);
  const auto val_idx = std::span<const std::size_t>(order).last(n_val);
  const TrainingSet train_set{select_columns(data.inputs, train_idx),
                              select_rows(data.targets, train_idx)};
  const Eigen::MatrixXd val_inputs = select_columns(data.inputs, val_idx);
  const Eigen::VectorXd val_targets = select_rows(data.targets, val_idx);

  GridSearchResult result;
  for (const auto& hidden : hidden_candidates(config)) {
    for (double lr : config.lr_grid) {
      MlpConfig candidate = config;
      candidate.input_dim = data.input_dim();
      candidate.hidden_dims = hidden;
      candidate.learning_rate = lr;
      double score = std::numeric_limits<double>::infinity();
      try {
        const auto trained = train(init_model(candidate), train_set, candidate);
        const Eigen::VectorXd pred = forward_batch(trained.model, val_inputs);
        const double mse = (pred - val_targets).squaredNorm() / static_cast<double>(n_val);
        if (std::isfinite(mse)) score = mse;
      } catch (const NumericError&) {
        // Diverged: keep +inf so the point is never selected.
      }
      result.points.push_back({lr, hidden, score});
    }
  }

  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < result.points.size(); ++i) {
    const auto& p = result.points[i];
    if (!std::isfinite(p.validation_mse)) continue;
    if (!best) {
      best = i;
      continue;
    }
    const auto& b = result.points[*best];
    if (p.validation_mse < b.validation_mse ||
        (p.validation_mse == b.validation_mse && p.learning_rate < b.learning_rate)) {
      best = i;
    }
  }
  if (!best) throw NumericError("every grid point diverged");

  result.best_index = *best;
  result.best = config;
  result.best.input_dim = data.input_dim();
  result.best.hidden_dims = result.points[*best].hidden_dims;
  result.best.learning_rate = result.points[*best].learning_rate;
  return result;
}

}  // namespace cmqe
