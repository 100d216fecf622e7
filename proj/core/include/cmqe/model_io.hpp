#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "cmqe/features.hpp"
#include "cmqe/mlp.hpp"
#include "cmqe/types.hpp"

namespace cmqe {

/// Everything needed to turn raw inputs into task predictions.
struct RegressionModel {
  Task task = Task::Quality;
  ScalerParams scaler = ScalerParams::identity();
  FeatureLayout layout;
  MlpModel network;

  bool operator==(const RegressionModel&) const = default;
};

inline constexpr std::uint32_t kModelFormatVersion = 1;

// Binary container, all integers and reals little-endian:
//
//   "CMQEMODL"                       8-byte magic
//   u32 format version
//   u64 metadata length, metadata    JSON: task, seed, config, layout, shapes
//   f64 x 21 scaler means, f64 x 21 scaler stddevs
//   per layer: weights row-major, then biases (f64)
//   u32 CRC-32 of every preceding byte
//
// Loading validates the checksum before anything else and checks that the
// declared shapes, layout dimension and payload size agree.

std::string serialize_model(const RegressionModel& model);
RegressionModel deserialize_model(std::string_view bytes);

void save_model(const RegressionModel& model, const std::filesystem::path& path);
RegressionModel load_model(const std::filesystem::path& path);

}  // namespace cmqe
