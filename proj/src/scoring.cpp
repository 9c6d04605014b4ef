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

#include "uatrack/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace uatrack
{

double aggregate_logvar(const EncodedLogVar & s, Aggregate mode)
{
  const auto v = s.values();
  if (mode == Aggregate::kMax) {
    return *std::max_element(v.begin(), v.end());
  }
  return std::accumulate(v.begin(), v.end(), 0.0);
}

double map_uncertainty_to_logscore(double g_s, const ScoreMapConfig & cfg)
{
  switch (cfg.strategy) {
    case ScoreStrategy::kLinear:
      return std::max(-cfg.k_s * g_s + cfg.b_s, 0.0);
    case ScoreStrategy::kExponential:
      return -std::exp(cfg.k_s * g_s + cfg.b_s);
    case ScoreStrategy::kSigmoid: {
      // log(sigmoid(u)) = -log1p(exp(-u)), written to stay finite for large |u|
      const double u = -cfg.k_s * g_s + cfg.b_s;
      return u >= 0.0 ? -std::log1p(std::exp(-u)) : u - std::log1p(std::exp(u));
    }
    case ScoreStrategy::kNone:
      break;
  }
  return 0.0;
}

double combined_score(double detection_score, double log_beta_s, double alpha)
{
  if (!(detection_score > 0.0)) {
    throw std::invalid_argument("detection score must be positive");
  }
  return std::exp(alpha * (std::log(detection_score) + log_beta_s));
}

std::vector<Box3D> rescore(
  const std::vector<Box3D> & boxes, const std::vector<EncodedLogVar> & logvars,
  const ScoreMapConfig & cfg)
{
  if (boxes.size() != logvars.size()) {
    throw std::invalid_argument("rescore: one log-variance per box required");
  }
  std::vector<Box3D> out = boxes;
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double g = aggregate_logvar(logvars[i], cfg.aggregate);
    out[i].score = combined_score(boxes[i].score, map_uncertainty_to_logscore(g, cfg), cfg.alpha);
  }
  return out;
}

std::vector<std::size_t> nms_indices(const std::vector<Box3D> & boxes, const NmsConfig & cfg)
{
  std::vector<std::size_t> order(boxes.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return boxes[a].score > boxes[b].score;
  });
  if (order.size() > cfg.pre_top_k) {
    order.resize(cfg.pre_top_k);
  }

  std::vector<std::size_t> kept;
  for (std::size_t idx : order) {
    const bool suppressed = std::any_of(kept.begin(), kept.end(), [&](std::size_t k) {
      return box_iou(boxes[k], boxes[idx], cfg.iou_kind) > cfg.iou_threshold;
    });
    if (!suppressed) {
      kept.push_back(idx);
    }
  }
  return kept;
}

std::vector<Box3D> nms(const std::vector<Box3D> & boxes, const NmsConfig & cfg)
{
  std::vector<Box3D> out;
  for (std::size_t i : nms_indices(boxes, cfg)) {
    out.push_back(boxes[i]);
  }
  return out;
}

std::string to_string(ScoreStrategy s)
{
  switch (s) {
    case ScoreStrategy::kLinear:
      return "linear";
    case ScoreStrategy::kExponential:
      return "exponential";
    case ScoreStrategy::kSigmoid:
      return "sigmoid";
    case ScoreStrategy::kNone:
      break;
  }
  return "none";
}

std::string to_string(Aggregate a) { return a == Aggregate::kMax ? "max" : "sum"; }

ScoreStrategy parse_strategy(const std::string & name)
{
  if (name == "none") return ScoreStrategy::kNone;
  if (name == "linear") return ScoreStrategy::kLinear;
  if (name == "exponential") return ScoreStrategy::kExponential;
  if (name == "sigmoid") return ScoreStrategy::kSigmoid;
  throw std::invalid_argument("unknown score strategy '" + name + "'");
}

Aggregate parse_aggregate(const std::string & name)
{
  if (name == "max") return Aggregate::kMax;
  if (name == "sum") return Aggregate::kSum;
  throw std::invalid_argument("unknown aggregation '" + name + "'");
}

}  // namespace uatrack
