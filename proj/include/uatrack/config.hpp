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


#ifndef UATRACK__CONFIG_HPP_
#define UATRACK__CONFIG_HPP_

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "uatrack/box_codec.hpp"
#include "uatrack/metrics.hpp"
#include "uatrack/scoring.hpp"
#include "uatrack/sim.hpp"
#include "uatrack/tracker.hpp"

namespace uatrack
{

class ConfigError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// Everything a CLI run can be configured with. JSON sections: tracker, scoring, nms, eval,
/// scenario, anchor, plus a top-level seed. Missing keys keep their defaults, unknown keys
/// are rejected.
struct RunConfig
{
  TrackerConfig tracker;
  ScoreMapConfig scoring;
  NmsConfig nms;
  EvalConfig eval;
  /// Pairs farther apart than this are left out of the position RMSE.
  double rmse_max_distance{2.0};
  ScenarioConfig scenario;
  /// Size prototype used to turn world-frame variances back into log-variances for rescoring.
  Anchor anchor;
  std::uint64_t seed{1};
};

/// Throws ConfigError naming the offending key.
RunConfig parse_config(const std::string & json_text);
RunConfig load_config(const std::filesystem::path & path);
/// Pretty-printed JSON with every key; parse_config(serialize_config(c)) reproduces c.
std::string serialize_config(const RunConfig & cfg);

/// Sets one dotted key ("tracker.gate_distance", "seed") from text. The text is read as JSON
/// when it parses as JSON and as a string otherwise.
RunConfig with_override(const RunConfig & cfg, const std::string & key, const std::string & value);

/// Switches the tracker to one fixed isotropic noise sigma for every detection.
void apply_constant_sigma(TrackerConfig & cfg, double sigma);

std::string to_string(IouKind kind);
IouKind parse_iou_kind(const std::string & name);

}  // namespace uatrack

#endif  // UATRACK__CONFIG_HPP_
