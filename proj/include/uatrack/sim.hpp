// Copyright 2026 The uatrack Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef UATRACK__SIM_HPP_
#define UATRACK__SIM_HPP_

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "uatrack/box_codec.hpp"
#include "uatrack/tracker.hpp"

namespace uatrack
{

/// Per-parameter values in box order: x, y, z, w, l, h, theta.
using BoxParams = std::array<double, 7>;

struct ScenarioConfig
{
  int n_targets{15};
  int n_frames{200};
  double dt{0.1};
  /// Targets live in [-field_extent, field_extent]^2.
  double field_extent{40.0};
  double sensor_x{0.0};
  double sensor_y{0.0};
  /// Detection noise sigma = noise_base + noise_range_coeff * range.
  BoxParams noise_base{0.005, 0.005, 0.03, 0.03, 0.05, 0.03, 0.01};
  BoxParams noise_range_coeff{0.015, 0.015, 0.002, 0.002, 0.004, 0.002, 0.002};
  /// Expected false positives per frame.
  double fp_rate{0.5};
  /// Miss probability per target and frame is fn_rate + fn_range_coeff * range.
  double fn_rate{0.1};
  double fn_range_coeff{0.0};
  /// Reported variance = miscalibration_factor * true variance.
  double miscalibration_factor{1.0};
  double speed_min{1.0};
  double speed_max{6.0};
  double accel_noise{0.3};
  double yaw_rate_noise{0.03};
  std::uint64_t seed{1};

  /// Throws std::invalid_argument when a field is out of range.
  void validate() const;
};

struct GroundTruthObject
{
  int id{0};
  Box3D box;
};

struct SimDetection
{
  Box3D box;
  BoxVariance true_variance;
  BoxVariance reported_variance;
  // -1 for false positives
  int target_id{-1};
};

enum class CovarianceVariant { kTrue, kReported, kNone };

struct Scenario
{
  ScenarioConfig config;
  std::vector<std::vector<GroundTruthObject>> ground_truth;
  /// Full CTRA state of each ground-truth object, aligned with ground_truth.
  std::vector<std::vector<PoseVector>> truth_states;
  std::vector<std::vector<SimDetection>> detections;

  std::size_t frame_count() const { return ground_truth.size(); }
  FrameDetections frame(std::size_t f, CovarianceVariant variant = CovarianceVariant::kReported) const;
};

/// Noise sigma per box parameter at the given range from the sensor.
BoxParams noise_sigma(const ScenarioConfig & cfg, double range);

/// Deterministic in cfg (including seed).
Scenario generate_scenario(const ScenarioConfig & cfg);

}  // namespace uatrack

#endif  // UATRACK__SIM_HPP_
