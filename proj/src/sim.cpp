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

#include "uatrack/sim.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

#include "uatrack/math_core.hpp"
#include "uatrack/random.hpp"

namespace uatrack
{
namespace
{

constexpr double kGroundZ = -1.73;
constexpr double kMinDimension = 0.1;
constexpr double kTurnBackRadius = 1.0;
constexpr double kMaxYawRate = 0.6;
constexpr double kMaxAccel = 3.0;

struct Target
{
  int id{0};
  PoseVector state{PoseVector::Zero()};
  double w{1.6};
  double l{3.9};
  double h{1.56};
  double speed_nominal{3.0};
};

Box3D target_box(const Target & t)
{
  Box3D b;
  b.x = t.state(kPosX);
  b.y = t.state(kPosY);
  b.z = kGroundZ + 0.5 * t.h;
  b.w = t.w;
  b.l = t.l;
  b.h = t.h;
  b.theta = wrap_angle(t.state(kYaw));
  b.class_id = 0;
  b.score = 1.0;
  return b;
}

BoxVariance variance_from_sigma(const BoxParams & sigma, double factor)
{
  auto v = [&](std::size_t i) { return factor * sigma[i] * sigma[i]; };
  return {v(0), v(1), v(2), v(3), v(4), v(5), v(6)};
}

double detection_score(Rng & rng, double range)
{
  return std::clamp(0.95 - 0.008 * range + rng.normal(0.0, 0.05), 0.05, 1.0);
}

// Injected at frame boundaries only; between injections the motion is exact CTRA.
void perturb(Target & t, Rng & rng, const ScenarioConfig & cfg)
{
  PoseVector & s = t.state;
  s(kAccel) = std::clamp(
    0.5 * (t.speed_nominal - s(kSpeed)) + rng.normal(0.0, cfg.accel_noise), -kMaxAccel, kMaxAccel);

  const double x = s(kPosX) - cfg.sensor_x;
  const double y = s(kPosY) - cfg.sensor_y;
  const bool outside = std::max(std::abs(x), std::abs(y)) > kTurnBackRadius * cfg.field_extent;
  const bool heading_out = x * std::cos(s(kYaw)) + y * std::sin(s(kYaw)) > 0.0;
  double yaw_rate = 0.9 * s(kYawRate) + rng.normal(0.0, cfg.yaw_rate_noise);
  if (outside && heading_out) {
    yaw_rate = wrap_angle(std::atan2(-y, -x) - s(kYaw));
  }
  s(kYawRate) = std::clamp(yaw_rate, -kMaxYawRate, kMaxYawRate);
}

}  // namespace

void ScenarioConfig::validate() const
{
  if (n_targets < 1 || n_frames < 1) {
    throw std::invalid_argument("scenario: n_targets and n_frames must be at least 1");
  }
  if (!(dt > 0.0)) {
    throw std::invalid_argument("scenario: dt must be positive");
  }
  if (!(field_extent > 0.0) || !std::isfinite(field_extent)) {
    throw std::invalid_argument("scenario: field_extent must be positive and finite");
  }
  if (!(fp_rate >= 0.0 && fp_rate <= 1.0) || !(fn_rate >= 0.0 && fn_rate <= 1.0) ||
      !(fn_range_coeff >= 0.0)) {
    throw std::invalid_argument("scenario: rates must lie in [0, 1]");
  }
  for (std::size_t i = 0; i < noise_base.size(); ++i) {
    if (!(noise_base[i] >= 0.0) || !(noise_range_coeff[i] >= 0.0)) {
      throw std::invalid_argument("scenario: noise parameters must be non-negative");
    }
  }
  if (!(miscalibration_factor > 0.0)) {
    throw std::invalid_argument("scenario: miscalibration_factor must be positive");
  }
  if (!(speed_min >= 0.0 && speed_max >= speed_min)) {
    throw std::invalid_argument("scenario: need 0 <= speed_min <= speed_max");
  }
}

BoxParams noise_sigma(const ScenarioConfig & cfg, double range)
{
  BoxParams sigma{};
  for (std::size_t i = 0; i < sigma.size(); ++i) {
    sigma[i] = cfg.noise_base[i] + cfg.noise_range_coeff[i] * range;
  }
  return sigma;
}

FrameDetections Scenario::frame(std::size_t f, CovarianceVariant variant) const
{
  FrameDetections out;
  out.reserve(detections.at(f).size());
  for (const SimDetection & d : detections[f]) {
    DetectionWithCovariance det{d.box, std::nullopt};
    if (variant == CovarianceVariant::kTrue) {
      det.variance = d.true_variance;
    } else if (variant == CovarianceVariant::kReported) {
      det.variance = d.reported_variance;
    }
    out.push_back(det);
  }
  return out;
}

Scenario generate_scenario(const ScenarioConfig & cfg)
{
  cfg.validate();
  Rng rng(cfg.seed);
  const double e = cfg.field_extent;

  std::vector<Target> targets(cfg.n_targets);
  for (int i = 0; i < cfg.n_targets; ++i) {
    Target & t = targets[i];
    t.id = i + 1;
    t.state(kPosX) = cfg.sensor_x + rng.uniform(-0.7 * e, 0.7 * e);
    t.state(kPosY) = cfg.sensor_y + rng.uniform(-0.7 * e, 0.7 * e);
    t.state(kYaw) = rng.uniform(-kPi, kPi);
    t.speed_nominal = rng.uniform(cfg.speed_min, cfg.speed_max);
    t.state(kSpeed) = t.speed_nominal;
    t.w = rng.uniform(1.5, 1.9);
    t.l = rng.uniform(3.5, 4.5);
    t.h = rng.uniform(1.4, 1.7);
  }

  Scenario sc;
  sc.config = cfg;
  sc.ground_truth.resize(cfg.n_frames);
  sc.truth_states.resize(cfg.n_frames);
  sc.detections.resize(cfg.n_frames);

  for (int f = 0; f < cfg.n_frames; ++f) {
    if (f > 0) {
      for (Target & t : targets) {
        perturb(t, rng, cfg);
        t.state = ctra_propagate(t.state, cfg.dt);
      }
    }

    auto & dets = sc.detections[f];
    for (const Target & t : targets) {
      const Box3D gt = target_box(t);
      sc.ground_truth[f].push_back({t.id, gt});
      sc.truth_states[f].push_back(t.state);

      const double range = std::hypot(gt.x - cfg.sensor_x, gt.y - cfg.sensor_y);
      // draw every variate even for misses so the noise stream does not depend on fn_rate
      const bool missed = rng.bernoulli(cfg.fn_rate + cfg.fn_range_coeff * range);
      const BoxParams sigma = noise_sigma(cfg, range);
      BoxParams noise{};
      for (std::size_t k = 0; k < noise.size(); ++k) {
        noise[k] = rng.normal(0.0, sigma[k]);
      }
      const double score = detection_score(rng, range);
      if (missed) {
        continue;
      }
      SimDetection d;
      d.box = gt;
      d.box.x += noise[0];
      d.box.y += noise[1];
      d.box.z += noise[2];
      d.box.w = std::max(kMinDimension, gt.w + noise[3]);
      d.box.l = std::max(kMinDimension, gt.l + noise[4]);
      d.box.h = std::max(kMinDimension, gt.h + noise[5]);
      d.box.theta = wrap_angle(gt.theta + noise[6]);
      d.box.score = score;
      d.true_variance = variance_from_sigma(sigma, 1.0);
      d.reported_variance = variance_from_sigma(sigma, cfg.miscalibration_factor);
      d.target_id = t.id;
      dets.push_back(d);
    }

    const int n_fp = rng.poisson(cfg.fp_rate);
    for (int k = 0; k < n_fp; ++k) {
      SimDetection d;
      d.box.x = cfg.sensor_x + rng.uniform(-e, e);
      d.box.y = cfg.sensor_y + rng.uniform(-e, e);
      d.box.w = rng.uniform(1.5, 1.9);
      d.box.l = rng.uniform(3.5, 4.5);
      d.box.h = rng.uniform(1.4, 1.7);
      d.box.z = kGroundZ + 0.5 * d.box.h;
      d.box.theta = rng.uniform(-kPi, kPi);
      d.box.class_id = 0;
      d.box.score = rng.uniform(0.05, 0.5);
      const double range = std::hypot(d.box.x - cfg.sensor_x, d.box.y - cfg.sensor_y);
      const BoxParams sigma = noise_sigma(cfg, range);
      d.true_variance = variance_from_sigma(sigma, 1.0);
      d.reported_variance = variance_from_sigma(sigma, cfg.miscalibration_factor);
      dets.push_back(d);
    }

    // Fisher-Yates with the portable generator so detection order carries no identity
    for (std::size_t i = dets.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(rng.uniform() * static_cast<double>(i));
      std::swap(dets[i - 1], dets[std::min(j, i - 1)]);
    }
  }
  return sc;
}

}  // namespace uatrack
