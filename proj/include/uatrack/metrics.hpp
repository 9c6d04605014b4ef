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

#ifndef UATRACK__METRICS_HPP_
#define UATRACK__METRICS_HPP_

#include <cstddef>
#include <vector>

#include "uatrack/assignment.hpp"
#include "uatrack/box_codec.hpp"
#include "uatrack/geometry.hpp"

namespace uatrack
{

struct EvalConfig
{
  /// A pair is a true positive when IoU > iou_threshold.
  double iou_threshold{0.5};
  IouKind iou_kind{IouKind::kBev};
  int recall_points{40};
  /// Ground-truth tracks matched in fewer than this fraction of their frames are mostly lost.
  double mostly_lost_ratio{0.2};
};

/// Box with an identity, used for both ground-truth and predicted tracks.
struct TrackedBox
{
  int id{0};
  Box3D box;
};

using BoxFrames = std::vector<std::vector<Box3D>>;
using TrackFrames = std::vector<std::vector<TrackedBox>>;

/// One-to-one matching that maximizes the number of pairs with IoU > threshold,
/// then their total IoU. row = ground-truth index, col = prediction index.
std::vector<Assignment> match_frame(
  const std::vector<Box3D> & gt, const std::vector<Box3D> & pred, const EvalConfig & cfg);

struct PrPoint
{
  double threshold{0.0};
  double precision{0.0};
  double recall{0.0};
};

struct DetectionReport
{
  double ap{0.0};      // percent
  double max_f1{0.0};  // percent
  std::vector<PrPoint> pr_curve;  // thresholds in descending order
};

/// Sweeps every distinct prediction score as a threshold and re-matches each frame with
/// the surviving predictions. AP averages interpolated precision at recall i/N, i = 1..N.
DetectionReport detection_pr(const BoxFrames & gt_frames, const BoxFrames & pred_frames, const EvalConfig & cfg);

struct TrackingReport
{
  double ap{0.0};
  double max_f1{0.0};
  long idsw{0};
  long frag{0};
  double ml{0.0};    // percent of ground-truth tracks
  double mota{0.0};  // percent, can be negative
  long tp{0};
  long fp{0};
  long fn{0};
  long gt_boxes{0};
  long gt_tracks{0};
  long mostly_lost{0};
};

/// CLEAR-MOT counting. Correspondences from the previous frame are kept while their IoU stays
/// above threshold; remaining boxes are matched with match_frame. AP and max F1 use the
/// predicted boxes' scores.
TrackingReport clear_mot(const TrackFrames & gt, const TrackFrames & pred, const EvalConfig & cfg);

/// Combines reports of disjoint sequences: counts add, ratios are recomputed.
/// AP and max F1 are not additive and are left at zero.
TrackingReport combine_reports(const std::vector<TrackingReport> & reports);

struct RmseReport
{
  double rmse{0.0};
  std::size_t pairs{0};
};

/// BEV center RMSE over per-frame minimum-distance pairs closer than max_distance.
RmseReport position_rmse(const TrackFrames & gt, const TrackFrames & pred, double max_distance);

}  // namespace uatrack

#endif  // UATRACK__METRICS_HPP_
