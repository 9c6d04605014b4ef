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


#ifndef UATRACK__COMMANDS_HPP_
#define UATRACK__COMMANDS_HPP_

#include <iosfwd>
#include <string>
#include <vector>

#include "uatrack/config.hpp"
#include "uatrack/io.hpp"
#include "uatrack/metrics.hpp"
#include "uatrack/sim.hpp"

namespace uatrack
{

struct SimulatedRecords
{
  std::vector<TrackRecord> ground_truth;
  std::vector<DetectionRecord> detections;
};

/// Flattens a scenario into file records. kNone drops the variance columns.
SimulatedRecords scenario_records(const Scenario & scenario, CovarianceVariant variant);

/// Runs the tracker over every frame (n_frames at least max frame + 1) and returns the
/// confirmed tracks of each frame.
std::vector<TrackRecord> run_tracker(
  const std::vector<DetectionRecord> & detections, const TrackerConfig & cfg, double dt, std::size_t n_frames = 0);
TrackFrames run_tracker(const std::vector<FrameDetections> & frames, const TrackerConfig & cfg, double dt);

struct TrackEvaluation
{
  TrackingReport report;
  RmseReport rmse;
};

TrackEvaluation evaluate_tracks(const TrackFrames & gt, const TrackFrames & pred, const RunConfig & cfg);

/// Pools several sequences: counts add, AP is computed over all frames together and the RMSE
/// over all pairs.
TrackEvaluation evaluate_sequences(
  const std::vector<TrackFrames> & gt, const std::vector<TrackFrames> & pred, const RunConfig & cfg);

/// Header line and one row, comma separated.
std::string tracking_report_header();
std::string tracking_report_row(const TrackEvaluation & e);

/// Converts world-frame variances to log-variances against an anchor of cfg.anchor's size
/// placed at each box, rescores with cfg.scoring and applies cfg.nms per frame.
/// Records without variance are only accepted with the "none" strategy.
std::vector<DetectionRecord> rescore_and_suppress(const std::vector<DetectionRecord> & records, const RunConfig & cfg);

/// Loss curves on the grid s = (i - 500) / 100, i = 0..1000. kind is "gaussian" (params are
/// squared residuals) or "vonmises" (params are cos(theta - theta_t)).
std::string loss_curves_csv(
  const std::string & kind, const std::vector<double> & params, const std::vector<double> & lambdas, double s0);

/// Command-line entry point. Returns the process exit code.
int run_cli(int argc, const char * const * argv, std::ostream & out, std::ostream & err);

}  // namespace uatrack

#endif  // UATRACK__COMMANDS_HPP_
