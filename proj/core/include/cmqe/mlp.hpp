#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "cmqe/features.hpp"

namespace cmqe {

/// Network shape and training hyper-parameters. Invalid settings are reported
/// by validate() as std::invalid_argument.
struct MlpConfig {
  std::size_t input_dim = 0;
  std::vector<std::size_t> hidden_dims{1000, 100, 10};
  double learning_rate = 1e-3;
  std::vector<double> lr_grid{1e-2, 1e-3, 1e-4};
  bool search_hidden_dims = false;  // grid_search also sweeps {10,100,1000} per layer
  std::size_t batch_size = 0;       // 0 selects min(200, n)
  std::size_t max_epochs = 200;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_epsilon = 1e-8;
  std::size_t lr_patience = 2;
  double lr_decay_factor = 5.0;
  double improvement_tol = 1e-4;
  std::uint64_t seed = 0;

  void validate() const;
  std::size_t effective_batch_size(std::size_t n_samples) const;
  bool operator==(const MlpConfig&) const = default;
};

/// Fully connected layer; weights are (outputs x inputs).
struct DenseLayer {
  Eigen::MatrixXd weights;
  Eigen::VectorXd bias;

  bool operator==(const DenseLayer& other) const {
    return weights.rows() == other.weights.rows() && weights.cols() == other.weights.cols() &&
           bias.size() == other.bias.size() && weights == other.weights && bias == other.bias;
  }
};

/// Parameters in canonical order: input->h1, h1->h2, ..., hk->output.
using Parameters = std::vector<DenseLayer>;

struct MlpModel {
  MlpConfig config;
  Parameters layers;

  std::size_t input_dim() const { return static_cast<std::size_t>(layers.front().weights.cols()); }
  std::size_t parameter_count() const;
  bool all_finite() const;
  bool operator==(const MlpModel&) const = default;
};

/// Glorot-uniform weights in +-sqrt(6 / (fan_in + fan_out)) drawn from a
/// generator seeded with config.seed, zero biases.
MlpModel init_model(const MlpConfig& config);

/// Scalar prediction; ReLU on hidden layers, identity on the output.
double forward(const MlpModel& model, std::span<const double> x);

/// Predictions for the columns of `inputs` (input_dim x n).
Eigen::VectorXd forward_batch(const MlpModel& model, const Eigen::MatrixXd& inputs);

/// Mean of squared residuals.
double loss_mse(std::span<const double> predictions, std::span<const double> targets);

struct Gradients {
  Parameters layers;  // same shapes as the model's
  double loss = 0.0;  // batch-mean MSE at the current parameters
};

/// Exact gradient of the batch-mean MSE with respect to every parameter.
/// The ReLU derivative at 0 is taken as 0.
Gradients gradients(const MlpModel& model, const Eigen::MatrixXd& inputs,
                    const Eigen::VectorXd& targets);

/// Adam moment estimates for one training run.
class AdamState {
 public:
  AdamState(const Parameters& like, double beta1 = 0.9, double beta2 = 0.999,
            double epsilon = 1e-8);

  /// One bias-corrected Adam update of `params` in place.
  void step(Parameters& params, const Parameters& grads, double learning_rate);

  std::size_t steps() const { return steps_; }

 private:
  double beta1_;
  double beta2_;
  double epsilon_;
  std::size_t steps_ = 0;
  Parameters first_;
  Parameters second_;
};

/// Column-major training data: one column per instance.
struct TrainingSet {
  Eigen::MatrixXd inputs;
  Eigen::VectorXd targets;

  std::size_t size() const { return static_cast<std::size_t>(targets.size()); }
  std::size_t input_dim() const { return static_cast<std::size_t>(inputs.rows()); }

  static TrainingSet from_features(std::span<const FeatureVector> vectors,
                                   std::span<const double> targets);
};

struct TrainReport {
  std::vector<double> epoch_loss;
  std::vector<double> epoch_learning_rate;  // rate used during each epoch
  double final_learning_rate = 0.0;
  std::size_t epochs_run = 0;
  std::uint64_t seed = 0;
};

struct TrainResult {
  MlpModel model;
  TrainReport report;
};

/// Mini-batch Adam on the batch-mean MSE. Batches come from a per-epoch
/// shuffle seeded by config.seed. After lr_patience consecutive epochs whose
/// loss fails to beat the best so far by improvement_tol, the learning rate
/// is divided by lr_decay_factor. Runs exactly max_epochs epochs and throws
/// NumericError on a non-finite loss.
TrainResult train(MlpModel model, const TrainingSet& data, const MlpConfig& config);

struct GridPoint {
  double learning_rate = 0.0;
  std::vector<std::size_t> hidden_dims;
  double validation_mse = 0.0;  // +inf when training diverged
};

struct GridSearchResult {
  MlpConfig best;
  std::vector<GridPoint> points;
  std::size_t best_index = 0;
};

/// Trains one model per grid point on a seeded 80/20 split and keeps the
/// configuration with the lowest validation MSE; ties go to the smaller
/// learning rate.
GridSearchResult grid_search(const TrainingSet& data, const MlpConfig& config);

}  // namespace cmqe
