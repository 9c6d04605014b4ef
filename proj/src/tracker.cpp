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

#include "uatrack/tracker.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <utility>

#include "uatrack/math_core.hpp"

namespace uatrack
{
namespace
{

constexpr int kSigmaCount = 2 * kPoseDim + 1;
constexpr double kForbiddenCost = 1e9;

struct SigmaWeights
{
  double gamma;
  double wm0;
  double wc0;
  double wi;
};

SigmaWeights sigma_weights(const UkfParams & p)
{
  const double n = kPoseDim;
  const double lambda = p.alpha * p.alpha * (n + p.kappa) - n;
  SigmaWeights w{};
  w.gamma = std::sqrt(n + lambda);
  w.wm0 = lambda / (n + lambda);
  w.wc0 = w.wm0 + (1.0 - p.alpha * p.alpha + p.beta);
  w.wi = 0.5 / (n + lambda);
  return w;
}

// S with S S^T = cov, from a pivoted LDL^T factorization so semi-definite inputs work.
PoseMatrix matrix_sqrt(const PoseMatrix & cov)
{
  Eigen::LDLT<PoseMatrix> ldlt(cov);
  const PoseVector d = ldlt.vectorD().cwiseMax(0.0).cwiseSqrt();
  const PoseMatrix l = ldlt.matrixL();
  PoseMatrix s = l * d.asDiagonal();
  return ldlt.transpositionsP().transpose() * s;
}

using SigmaSet = std::array<PoseVector, kSigmaCount>;

SigmaSet sigma_points(const PoseState & state, double gamma)
{
  const PoseMatrix s = matrix_sqrt(state.covariance);
  SigmaSet pts;
  pts[0] = state.mean;
  for (int i = 0; i < kPoseDim; ++i) {
    pts[1 + i] = state.mean + gamma * s.col(i);
    pts[1 + kPoseDim + i] = state.mean - gamma * s.col(i);
  }
  return pts;
}

// Weighted mean of offsets from the central point; angular offsets are wrapped first.
// The central weight multiplies a zero offset, so the large negative weights of small
// alpha never enter an angle average.
template <int Dim>
Eigen::Matrix<double, Dim, 1> sigma_mean(
  const std::array<Eigen::Matrix<double, Dim, 1>, kSigmaCount> & pts, const SigmaWeights & w,
  int angle_index)
{
  const auto & ref = pts[0];
  Eigen::Matrix<double, Dim, 1> offset = Eigen::Matrix<double, Dim, 1>::Zero();
  for (int i = 1; i < kSigmaCount; ++i) {
    Eigen::Matrix<double, Dim, 1> d = pts[i] - ref;
    d(angle_index) = wrap_angle(d(angle_index));
    offset += w.wi * d;
  }
  Eigen::Matrix<double, Dim, 1> mean = ref + offset;
  mean(angle_index) = wrap_angle(mean(angle_index));
  return mean;
}

template <int Dim>
Eigen::Matrix<double, Dim, 1> residual(
  const Eigen::Matrix<double, Dim, 1> & a, const Eigen::Matrix<double, Dim, 1> & b, int angle_index)
{
  Eigen::Matrix<double, Dim, 1> d = a - b;
  d(angle_index) = wrap_angle(d(angle_index));
  return d;
}

double weight_c(int i, const SigmaWeights & w) { return i == 0 ? w.wc0 : w.wi; }

}  // namespace

Box3D Track::box() const
{
  Box3D b;
  b.x = pose.mean(kPosX);
  b.y = pose.mean(kPosY);
  b.z = z_latest;
  b.w = size.w;
  b.l = size.l;
  b.h = h_latest;
  b.theta = wrap_angle(pose.mean(kYaw));
  b.class_id = class_id;
  b.score = score;
  return b;
}

PoseMatrix TrackerConfig::default_process_noise()
{
  PoseVector diag;
  // matched to the default simulator: accel_noise^2 / dt and yaw_rate_noise^2 / dt
  diag << 0.001, 0.001, 0.0001, 0.001, 0.9, 0.009;
  return diag.asDiagonal();
}

PoseVector ctra_propagate(const PoseVector & s, double dt)
{
  const double x = s(kPosX);
  const double y = s(kPosY);
  const double yaw = s(kYaw);
  const double v = s(kSpeed);
  const double a = s(kAccel);
  const double w = s(kYawRate);

  PoseVector out = s;
  const double v1 = v + a * dt;
  const double yaw1 = yaw + w * dt;
  if (std::abs(w) < kStraightLineYawRate) {
    const double dist = v * dt + 0.5 * a * dt * dt;
    out(kPosX) = x + dist * std::cos(yaw);
    out(kPosY) = y + dist * std::sin(yaw);
  } else {
    // integral of (v + a t) (cos, sin)(yaw + w t) over [0, dt]
    const double w2 = w * w;
    const double s0 = std::sin(yaw);
    const double c0 = std::cos(yaw);
    const double s1 = std::sin(yaw1);
    const double c1 = std::cos(yaw1);
    out(kPosX) = x + (v1 * w * s1 + a * c1 - v * w * s0 - a * c0) / w2;
    out(kPosY) = y + (-v1 * w * c1 + a * s1 + v * w * c0 - a * s0) / w2;
  }
  out(kYaw) = wrap_angle(yaw1);
  out(kSpeed) = v1;
  return out;
}

PoseMatrix repair_covariance(const PoseMatrix & cov)
{
  PoseMatrix sym = 0.5 * (cov + cov.transpose());
  Eigen::SelfAdjointEigenSolver<PoseMatrix> eig(sym);
  if (eig.info() != Eigen::Success || eig.eigenvalues().minCoeff() >= 0.0) {
    return sym;
  }
  const PoseVector clamped = eig.eigenvalues().cwiseMax(0.0);
  sym = eig.eigenvectors() * clamped.asDiagonal() * eig.eigenvectors().transpose();
  return 0.5 * (sym + sym.transpose());
}

PoseState ukf_predict(const PoseState & state, double dt, const PoseMatrix & q, const UkfParams & p)
{
  if (!(dt > 0.0)) {
    throw std::invalid_argument("ukf_predict: dt must be positive");
  }
  const SigmaWeights w = sigma_weights(p);
  SigmaSet pts = sigma_points(state, w.gamma);
  for (PoseVector & pt : pts) {
    pt = ctra_propagate(pt, dt);
  }

  PoseState out;
  out.mean = sigma_mean<kPoseDim>(pts, w, kYaw);
  PoseMatrix cov = PoseMatrix::Zero();
  for (int i = 0; i < kSigmaCount; ++i) {
    const PoseVector d = residual<kPoseDim>(pts[i], out.mean, kYaw);
    cov += weight_c(i, w) * d * d.transpose();
  }
  out.covariance = repair_covariance(cov + q * dt);
  return out;
}

Track ukf_predict(const Track & track, double dt, const PoseMatrix & q, const UkfParams & p)
{
  Track out = track;
  out.pose = ukf_predict(track.pose, dt, q, p);
  return out;
}

PoseState ukf_update(
  const PoseState & state, const Eigen::Vector3d & z, const Eigen::Matrix3d & r, const UkfParams & p)
{
  if (!r.allFinite() || (r - r.transpose()).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + r.cwiseAbs().maxCoeff())) {
    throw std::invalid_argument("ukf_update: observation noise must be finite and symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> r_eig(r);
  if (r_eig.eigenvalues().minCoeff() < 0.0) {
    throw std::invalid_argument("ukf_update: observation noise must be positive semi-definite");
  }

  using ObsVector = Eigen::Vector3d;
  constexpr int kObsYaw = 2;
  const SigmaWeights w = sigma_weights(p);
  const SigmaSet pts = sigma_points(state, w.gamma);

  std::array<ObsVector, kSigmaCount> obs;
  for (int i = 0; i < kSigmaCount; ++i) {
    obs[i] = ObsVector(pts[i](kPosX), pts[i](kPosY), pts[i](kYaw));
  }
  const ObsVector z_mean = sigma_mean<3>(obs, w, kObsYaw);

  Eigen::Matrix3d s = r;
  Eigen::Matrix<double, kPoseDim, 3> cross = Eigen::Matrix<double, kPoseDim, 3>::Zero();
  for (int i = 0; i < kSigmaCount; ++i) {
    const ObsVector dz = residual<3>(obs[i], z_mean, kObsYaw);
    const PoseVector dx = residual<kPoseDim>(pts[i], state.mean, kYaw);
    s += weight_c(i, w) * dz * dz.transpose();
    cross += weight_c(i, w) * dx * dz.transpose();
  }

  Eigen::LDLT<Eigen::Matrix3d> s_ldlt(s);
  // K = cross * S^-1, solved as S K^T = cross^T
  const Eigen::Matrix<double, 3, kPoseDim> gain_t = s_ldlt.solve(cross.transpose());
  const Eigen::Matrix<double, kPoseDim, 3> gain = gain_t.transpose();

  const ObsVector innovation = residual<3>(z, z_mean, kObsYaw);
  PoseState out;
  out.mean = state.mean + gain * innovation;
  out.mean(kYaw) = wrap_angle(out.mean(kYaw));
  out.covariance = repair_covariance(state.covariance - gain * s * gain.transpose());
  return out;
}

BoxVariance observation_noise(const DetectionWithCovariance & det, const TrackerConfig & cfg)
{
  if (cfg.use_detection_covariance && det.variance.has_value()) {
    return *det.variance;
  }
  return cfg.default_obs_noise;
}

Track ukf_update(const Track & track, const DetectionWithCovariance & det, const TrackerConfig & cfg)
{
  const BoxVariance noise = observation_noise(det, cfg);
  const Eigen::Vector3d z(det.box.x, det.box.y, det.box.theta);
  const Eigen::Matrix3d r = Eigen::Vector3d(noise.x, noise.y, noise.theta).asDiagonal();
  Track out = track;
  out.pose = ukf_update(track.pose, z, r, cfg.ukf);
  return out;
}

SizeState size_update(const SizeState & size, const DetectionWithCovariance & det, const TrackerConfig & cfg)
{
  const BoxVariance noise = observation_noise(det, cfg);
  auto scalar = [](double & mean, double & var, double meas, double meas_var) {
    if (var <= 0.0) {
      return;
    }
    const double gain = var / (var + meas_var);
    mean += gain * (meas - mean);
    var = (1.0 - gain) * var;
  };
  SizeState out = size;
  scalar(out.w, out.var_w, det.box.w, noise.w);
  scalar(out.l, out.var_l, det.box.l, noise.l);
  scalar(out.h, out.var_h, det.box.h, noise.h);
  return out;
}

AssociationResult associate(
  const std::vector<Track> & tracks, const FrameDetections & dets, const TrackerConfig & cfg)
{
  AssociationResult result;
  const int nt = static_cast<int>(tracks.size());
  const int nd = static_cast<int>(dets.size());

  Eigen::MatrixXd cost(nt, nd);
  for (int i = 0; i < nt; ++i) {
    for (int j = 0; j < nd; ++j) {
      const double dist = std::hypot(
        tracks[i].pose.mean(kPosX) - dets[j].box.x, tracks[i].pose.mean(kPosY) - dets[j].box.y);
      const bool allowed = tracks[i].class_id == dets[j].box.class_id && dist <= cfg.gate_distance;
      cost(i, j) = allowed ? dist : kForbiddenCost;
    }
  }

  std::vector<bool> track_used(nt, false);
  std::vector<bool> det_used(nd, false);
  for (const Assignment & a : hungarian_assign(cost)) {
    if (cost(a.row, a.col) >= kForbiddenCost) {
      continue;
    }
    result.matches.push_back(a);
    track_used[a.row] = true;
    det_used[a.col] = true;
  }
  for (int i = 0; i < nt; ++i) {
    if (!track_used[i]) result.unmatched_tracks.push_back(i);
  }
  for (int j = 0; j < nd; ++j) {
    if (!det_used[j]) result.unmatched_detections.push_back(j);
  }
  return result;
}

Track make_track(int id, const DetectionWithCovariance & det, const TrackerConfig & cfg)
{
  const BoxVariance noise = observation_noise(det, cfg);
  Track t;
  t.id = id;
  t.class_id = det.box.class_id;
  t.pose.mean << det.box.x, det.box.y, wrap_angle(det.box.theta), 0.0, 0.0, 0.0;
  PoseVector var;
  var << noise.x, noise.y, noise.theta, cfg.init_var_speed, cfg.init_var_accel, cfg.init_var_yaw_rate;
  t.pose.covariance = var.asDiagonal();
  t.size = {det.box.w, det.box.l, det.box.h, noise.w, noise.l, noise.h};
  t.z_latest = det.box.z;
  t.h_latest = det.box.h;
  t.hits = 1;
  t.misses = 0;
  t.status = TrackStatus::kTentative;
  t.score = det.box.score;
  return t;
}

Tracker::Tracker(TrackerConfig cfg) : cfg_(std::move(cfg))
{
  if (!(cfg_.gate_distance > 0.0) || cfg_.t_init < 1 || cfg_.t_drop < 1) {
    throw std::invalid_argument("tracker config: gate must be positive, t_init and t_drop at least 1");
  }
}

std::vector<Track> Tracker::step(const FrameDetections & frame, double dt)
{
  if (!(dt > 0.0)) {
    throw std::invalid_argument("Tracker::step: dt must be positive");
  }
  for (Track & t : tracks_) {
    t.pose = ukf_predict(t.pose, dt, cfg_.process_noise, cfg_.ukf);
  }

  const AssociationResult assoc = associate(tracks_, frame, cfg_);
  for (const Assignment & m : assoc.matches) {
    Track & t = tracks_[m.row];
    const DetectionWithCovariance & det = frame[m.col];
    t = ukf_update(t, det, cfg_);
    t.size = size_update(t.size, det, cfg_);
    t.z_latest = det.box.z;
    t.h_latest = det.box.h;
    t.score = cfg_.score_smoothing * t.score + (1.0 - cfg_.score_smoothing) * det.box.score;
    t.hits += 1;
    t.misses = 0;
    if (t.status == TrackStatus::kLost) {
      t.status = TrackStatus::kConfirmed;
    }
  }
  for (int i : assoc.unmatched_tracks) {
    Track & t = tracks_[i];
    t.misses += 1;
    t.hits = 0;
    if (t.status == TrackStatus::kConfirmed) {
      t.status = TrackStatus::kLost;
    }
  }
  std::erase_if(tracks_, [&](const Track & t) { return t.misses >= cfg_.t_drop; });

  for (int j : assoc.unmatched_detections) {
    tracks_.push_back(make_track(next_id_++, frame[j], cfg_));
  }

  std::vector<Track> confirmed;
  for (Track & t : tracks_) {
    if (t.status == TrackStatus::kTentative && t.hits >= cfg_.t_init) {
      t.status = TrackStatus::kConfirmed;
    }
    if (t.status == TrackStatus::kConfirmed) {
      confirmed.push_back(t);
    }
  }
  return confirmed;
}

}  // namespace uatrack
