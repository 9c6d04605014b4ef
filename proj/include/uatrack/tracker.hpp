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

#ifndef UATRACK__TRACKER_HPP_
#define UATRACK__TRACKER_HPP_

#include <Eigen/Core>

#include <optional>
#include <vector>

#include "uatrack/assignment.hpp"
#include "uatrack/box_codec.hpp"

namespace uatrack
{

// Pose state layout: x, y [m], yaw [rad], speed [m/s], acceleration [m/s^2], yaw rate [rad/s].
enum PoseIndex : int { kPosX = 0, kPosY, kYaw, kSpeed, kAccel, kYawRate, kPoseDim };

using PoseVector = Eigen::Matrix<double, kPoseDim, 1>;
using PoseMatrix = Eigen::Matrix<double, kPoseDim, kPoseDim>;

// Below this yaw rate CTRA integrates along a straight line.
inline constexpr double kStraightLineYawRate = 1e-6;

struct PoseState
{
  PoseVector mean{PoseVector::Zero()};
  PoseMatrix covariance{PoseMatrix::Identity()};
};

struct SizeState
{
  double w{1.0};
  double l{1.0};
  double h{1.0};
  double var_w{1.0};
  double var_l{1.0};
  double var_h{1.0};
};

enum class TrackStatus { kTentative, kConfirmed, kLost };

struct Track
{
  int id{0};
  int class_id{0};
  PoseState pose;
  SizeState size;
  double z_latest{0.0};
  double h_latest{1.0};
  int hits{0};
  int misses{0};
  TrackStatus status{TrackStatus::kTentative};
  // exponentially smoothed detection score
  double score{0.0};

  Box3D box() const;
};

/// Unscented transform scaling.
struct UkfParams
{
  double alpha{1e-3};
  double beta{2.0};
  double kappa{0.0};
};

struct TrackerConfig
{
  double gate_distance{2.5};
  int t_init{3};
  int t_drop{5};
  /// Added to the pose covariance as process_noise * dt.
  PoseMatrix process_noise{default_process_noise()};
  /// Observation noise for detections without variance, or for all detections when
  /// use_detection_covariance is off.
  BoxVariance default_obs_noise{BoxVariance::isotropic(1.0)};
  bool use_detection_covariance{true};
  // prior variances of the unobserved states of a new track
  double init_var_speed{100.0};
  double init_var_accel{9.0};
  double init_var_yaw_rate{0.25};
  double score_smoothing{0.5};
  UkfParams ukf{};

  static PoseMatrix default_process_noise();
};

struct DetectionWithCovariance
{
  Box3D box;
  std::optional<BoxVariance> variance;
};

using FrameDetections = std::vector<DetectionWithCovariance>;

/// Closed-form CTRA integration of the mean over dt.
PoseVector ctra_propagate(const PoseVector & state, double dt);

/// Sigma-point prediction through ctra_propagate, then covariance += q * dt.
PoseState ukf_predict(const PoseState & state, double dt, const PoseMatrix & q, const UkfParams & p = {});
Track ukf_predict(const Track & track, double dt, const PoseMatrix & q, const UkfParams & p = {});

/// Sigma-point measurement update with observation (x, y, yaw).
/// Throws std::invalid_argument if r is not symmetric positive semi-definite.
PoseState ukf_update(
  const PoseState & state, const Eigen::Vector3d & z, const Eigen::Matrix3d & r,
  const UkfParams & p = {});
Track ukf_update(const Track & track, const DetectionWithCovariance & det, const TrackerConfig & cfg);

/// Observation noise used for a detection under the given config.
BoxVariance observation_noise(const DetectionWithCovariance & det, const TrackerConfig & cfg);

/// Independent scalar Kalman updates of w, l and h.
SizeState size_update(const SizeState & size, const DetectionWithCovariance & det, const TrackerConfig & cfg);

/// Symmetrizes and clamps negative eigenvalues to zero.
PoseMatrix repair_covariance(const PoseMatrix & cov);

struct AssociationResult
{
  std::vector<Assignment> matches;  // row = track index, col = detection index
  std::vector<int> unmatched_tracks;
  std::vector<int> unmatched_detections;
};

/// GNN association on BEV center distance. Pairs beyond the gate or of different class never match.
AssociationResult associate(
  const std::vector<Track> & tracks, const FrameDetections & dets, const TrackerConfig & cfg);

/// Track initialized from a detection: observed states take the detection noise,
/// unobserved ones the configured priors.
Track make_track(int id, const DetectionWithCovariance & det, const TrackerConfig & cfg);

/// Predict, associate, update and manage the track buffer frame by frame.
/// Not thread-safe; use one instance per sequence.
class Tracker
{
public:
  explicit Tracker(TrackerConfig cfg);

  /// Advances by dt (> 0) and returns the confirmed tracks, ordered by id.
  std::vector<Track> step(const FrameDetections & frame, double dt);

  const std::vector<Track> & tracks() const { return tracks_; }
  const TrackerConfig & config() const { return cfg_; }

private:
  TrackerConfig cfg_;
  std::vector<Track> tracks_;
  int next_id_{1};
};

}  // namespace uatrack

#endif  // UATRACK__TRACKER_HPP_
