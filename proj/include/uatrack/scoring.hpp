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

#ifndef UATRACK__SCORING_HPP_
#define UATRACK__SCORING_HPP_

#include <cstddef>
#include <string>
#include <vector>

#include "uatrack/box_codec.hpp"
#include "uatrack/geometry.hpp"

namespace uatrack
{

enum class ScoreStrategy { kNone, kLinear, kExponential, kSigmoid };
enum class Aggregate { kMax, kSum };

struct ScoreMapConfig
{
  ScoreStrategy strategy{ScoreStrategy::kNone};
  double k_s{0.001};
  double b_s{0.0};
  Aggregate aggregate{Aggregate::kSum};
  double alpha{1.0};
};

struct NmsConfig
{
  double iou_threshold{0.5};
  std::size_t pre_top_k{100};
  IouKind iou_kind{IouKind::kBev};
};

/// g(s): max or sum over the seven log-variance components.
double aggregate_logvar(const EncodedLogVar & s, Aggregate mode);

/// log beta_s for an aggregated log-variance. Non-increasing in g_s for every strategy;
/// kNone maps everything to 0.
///   Linear:      max(-k_s g + b_s, 0)
///   Exponential: -exp(k_s g + b_s)
///   Sigmoid:     log(sigmoid(-k_s g + b_s))
double map_uncertainty_to_logscore(double g_s, const ScoreMapConfig & cfg);

/// (beta_d * beta_s)^alpha evaluated in log space. Requires detection_score > 0.
double combined_score(double detection_score, double log_beta_s, double alpha);

/// Replaces each box score by its uncertainty-aware score.
std::vector<Box3D> rescore(
  const std::vector<Box3D> & boxes, const std::vector<EncodedLogVar> & logvars,
  const ScoreMapConfig & cfg);

/// Greedy NMS over the pre_top_k highest-scoring boxes. Equal scores keep input order.
/// Returns the indices of kept boxes in descending score order.
std::vector<std::size_t> nms_indices(const std::vector<Box3D> & boxes, const NmsConfig & cfg);

std::vector<Box3D> nms(const std::vector<Box3D> & boxes, const NmsConfig & cfg);

std::string to_string(ScoreStrategy s);
std::string to_string(Aggregate a);
/// Throws std::invalid_argument for unknown names.
ScoreStrategy parse_strategy(const std::string & name);
Aggregate parse_aggregate(const std::string & name);

}  // namespace uatrack

#endif  // UATRACK__SCORING_HPP_
