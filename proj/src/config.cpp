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


#include "uatrack/config.hpp"

#include <array>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <type_traits>

#include <Eigen/Eigenvalues>

#include "json.hpp"

namespace uatrack
{
namespace
{

using Json = nlohmann::ordered_json;

// Reads keys out of one JSON object and remembers which ones were used.
class Section
{
public:
  Section(const Json & root, const std::string & name) : name_(name)
  {
    if (!root.contains(name)) {
      return;
    }
    obj_ = &root.at(name);
    if (!obj_->is_object()) {
      throw ConfigError("'" + name + "' must be an object");
    }
  }

  const Json * find(const std::string & key)
  {
    if (obj_ == nullptr || !obj_->contains(key)) {
      return nullptr;
    }
    used_.insert(key);
    return &obj_->at(key);
  }

  void number(const std::string & key, double & out)
  {
    if (const Json * v = find(key)) {
      if (!v->is_number()) {
        throw ConfigError(path(key) + ": expected a number");
      }
      out = v->get<double>();
    }
  }

  template <typename Int>
  void integer(const std::string & key, Int & out)
  {
    if (const Json * v = find(key)) {
      if (!v->is_number_integer()) {
        throw ConfigError(path(key) + ": expected an integer");
      }
      if constexpr (std::is_unsigned_v<Int>) {
        if (v->is_number_unsigned()) {
          out = v->get<Int>();
          return;
        }
        if (v->get<long long>() < 0) {
          throw ConfigError(path(key) + ": expected a non-negative integer");
        }
      }
      out = static_cast<Int>(v->get<long long>());
    }
  }

  void boolean(const std::string & key, bool & out)
  {
    if (const Json * v = find(key)) {
      if (!v->is_boolean()) {
        throw ConfigError(path(key) + ": expected true or false");
      }
      out = v->get<bool>();
    }
  }

  bool text(const std::string & key, std::string & out)
  {
    if (const Json * v = find(key)) {
      if (!v->is_string()) {
        throw ConfigError(path(key) + ": expected a string");
      }
      out = v->get<std::string>();
      return true;
    }
    return false;
  }

  template <std::size_t N>
  void numbers(const std::string & key, std::array<double, N> & out)
  {
    if (const Json * v = find(key)) {
      if (!v->is_array() || v->size() != N) {
        throw ConfigError(path(key) + ": expected " + std::to_string(N) + " numbers");
      }
      for (std::size_t i = 0; i < N; ++i) {
        if (!(*v)[i].is_number()) {
          throw ConfigError(path(key) + ": expected " + std::to_string(N) + " numbers");
        }
        out[i] = (*v)[i].get<double>();
      }
    }
  }

  void finish() const
  {
    if (obj_ == nullptr) {
      return;
    }
    for (const auto & item : obj_->items()) {
      if (used_.count(item.key()) == 0) {
        throw ConfigError("unknown key '" + path(item.key()) + "'");
      }
    }
  }

  std::string path(const std::string & key) const { return name_ + "." + key; }

private:
  std::string name_;
  const Json * obj_{nullptr};
  std::set<std::string> used_;
};

void read_process_noise(Section & sec, PoseMatrix & q)
{
  const Json * v = sec.find("process_noise");
  if (v == nullptr) {
    return;
  }
  const std::string where = sec.path("process_noise");
  if (!v->is_array()) {
    throw ConfigError(where + ": expected 6 numbers (diagonal) or 6 rows of 6");
  }
  if (v->size() == kPoseDim && (*v)[0].is_number()) {
    q.setZero();
    for (int i = 0; i < kPoseDim; ++i) {
      if (!(*v)[i].is_number()) {
        throw ConfigError(where + ": expected 6 numbers");
      }
      q(i, i) = (*v)[i].get<double>();
    }
    return;
  }
  if (v->size() != kPoseDim) {
    throw ConfigError(where + ": expected 6 numbers (diagonal) or 6 rows of 6");
  }
  for (int r = 0; r < kPoseDim; ++r) {
    const Json & row = (*v)[r];
    if (!row.is_array() || row.size() != kPoseDim) {
      throw ConfigError(where + ": row " + std::to_string(r) + " needs 6 numbers");
    }
    for (int c = 0; c < kPoseDim; ++c) {
      if (!row[c].is_number()) {
        throw ConfigError(where + ": non-numeric entry");
      }
      q(r, c) = row[c].get<double>();
    }
  }
}

void read_variance(Section & sec, const std::string & key, BoxVariance & out)
{
  const Json * v = sec.find(key);
  if (v == nullptr) {
    return;
  }
  const std::string where = sec.path(key);
  if (v->is_number()) {
    // a single number is a shared sigma
    out = BoxVariance::isotropic(v->get<double>());
    return;
  }
  if (!v->is_array() || v->size() != 7) {
    throw ConfigError(where + ": expected 7 variances (x, y, z, w, l, h, theta) or one sigma");
  }
  std::array<double, 7> a{};
  for (std::size_t i = 0; i < 7; ++i) {
    if (!(*v)[i].is_number()) {
      throw ConfigError(where + ": expected numbers");
    }
    a[i] = (*v)[i].get<double>();
  }
  out = {a[0], a[1], a[2], a[3], a[4], a[5], a[6]};
}

void require(bool ok, const std::string & message)
{
  if (!ok) {
    throw ConfigError(message);
  }
}

void validate(const RunConfig & c)
{
  const TrackerConfig & t = c.tracker;
  require(t.gate_distance > 0.0, "tracker.gate_distance must be positive");
  require(t.t_init >= 1 && t.t_drop >= 1, "tracker.t_init and tracker.t_drop must be at least 1");
  require(t.process_noise.allFinite(), "tracker.process_noise must be finite");
  require((t.process_noise - t.process_noise.transpose()).cwiseAbs().maxCoeff() <= 1e-12,
    "tracker.process_noise must be symmetric");
  const Eigen::SelfAdjointEigenSolver<PoseMatrix> eig(t.process_noise);
  require(eig.eigenvalues().minCoeff() >= -1e-12, "tracker.process_noise must be positive semidefinite");
  require(t.default_obs_noise.positive(), "tracker.default_obs_noise must be positive");
  require(t.init_var_speed > 0.0 && t.init_var_accel > 0.0 && t.init_var_yaw_rate > 0.0,
    "tracker.init_var_* must be positive");
  require(t.score_smoothing >= 0.0 && t.score_smoothing < 1.0, "tracker.score_smoothing must lie in [0, 1)");
  require(t.ukf.alpha > 0.0, "tracker.ukf.alpha must be positive");
  require(t.ukf.kappa + static_cast<double>(kPoseDim) > 0.0, "tracker.ukf.kappa must exceed -6");

  require(c.scoring.k_s > 0.0, "scoring.k_s must be positive");
  require(c.scoring.alpha > 0.0, "scoring.alpha must be positive");
  require(std::isfinite(c.scoring.b_s), "scoring.b_s must be finite");

  require(c.nms.iou_threshold > 0.0 && c.nms.iou_threshold <= 1.0, "nms.iou_threshold must lie in (0, 1]");
  require(c.nms.pre_top_k >= 1, "nms.pre_top_k must be at least 1");

  require(c.eval.iou_threshold > 0.0 && c.eval.iou_threshold < 1.0, "eval.iou_threshold must lie in (0, 1)");
  require(c.eval.recall_points >= 1, "eval.recall_points must be at least 1");
  require(c.eval.mostly_lost_ratio >= 0.0 && c.eval.mostly_lost_ratio <= 1.0,
    "eval.mostly_lost_ratio must lie in [0, 1]");
  require(c.rmse_max_distance > 0.0, "eval.rmse_max_distance must be positive");

  require(c.anchor.w > 0.0 && c.anchor.l > 0.0 && c.anchor.h > 0.0, "anchor dimensions must be positive");
  try {
    c.scenario.validate();
  } catch (const std::invalid_argument & e) {
    throw ConfigError(e.what());
  }
}

RunConfig from_json(const Json & root)
{
  if (!root.is_object()) {
    throw ConfigError("config must be a JSON object");
  }
  static const std::set<std::string> kSections{"tracker", "scoring", "nms", "eval", "scenario", "anchor", "seed"};
  for (const auto & item : root.items()) {
    if (kSections.count(item.key()) == 0) {
      throw ConfigError("unknown key '" + item.key() + "'");
    }
  }

  RunConfig c;
  if (root.contains("seed")) {
    const Json & s = root.at("seed");
    if (!s.is_number_integer() || (!s.is_number_unsigned() && s.get<long long>() < 0)) {
      throw ConfigError("seed: expected a non-negative integer");
    }
    c.seed = s.get<std::uint64_t>();
  }
  c.scenario.seed = c.seed;

  Section tr(root, "tracker");
  tr.number("gate_distance", c.tracker.gate_distance);
  tr.integer("t_init", c.tracker.t_init);
  tr.integer("t_drop", c.tracker.t_drop);
  read_process_noise(tr, c.tracker.process_noise);
  read_variance(tr, "default_obs_noise", c.tracker.default_obs_noise);
  tr.boolean("use_detection_covariance", c.tracker.use_detection_covariance);
  tr.number("init_var_speed", c.tracker.init_var_speed);
  tr.number("init_var_accel", c.tracker.init_var_accel);
  tr.number("init_var_yaw_rate", c.tracker.init_var_yaw_rate);
  tr.number("score_smoothing", c.tracker.score_smoothing);
  if (const Json * u = tr.find("ukf")) {
    Json wrapper{{"tracker.ukf", *u}};
    Section ukf(wrapper, "tracker.ukf");
    ukf.number("alpha", c.tracker.ukf.alpha);
    ukf.number("beta", c.tracker.ukf.beta);
    ukf.number("kappa", c.tracker.ukf.kappa);
    ukf.finish();
  }
  tr.finish();

  Section sc(root, "scoring");
  std::string name;
  try {
    if (sc.text("strategy", name)) c.scoring.strategy = parse_strategy(name);
    if (sc.text("aggregate", name)) c.scoring.aggregate = parse_aggregate(name);
  } catch (const std::invalid_argument & e) {
    throw ConfigError(std::string("scoring: ") + e.what());
  }
  sc.number("k_s", c.scoring.k_s);
  sc.number("b_s", c.scoring.b_s);
  sc.number("alpha", c.scoring.alpha);
  sc.finish();

  Section nm(root, "nms");
  nm.number("iou_threshold", c.nms.iou_threshold);
  nm.integer("pre_top_k", c.nms.pre_top_k);
  if (nm.text("iou_kind", name)) c.nms.iou_kind = parse_iou_kind(name);
  nm.finish();

  Section ev(root, "eval");
  ev.number("iou_threshold", c.eval.iou_threshold);
  if (ev.text("iou_kind", name)) c.eval.iou_kind = parse_iou_kind(name);
  ev.integer("recall_points", c.eval.recall_points);
  ev.number("mostly_lost_ratio", c.eval.mostly_lost_ratio);
  ev.number("rmse_max_distance", c.rmse_max_distance);
  ev.finish();

  Section sn(root, "scenario");
  sn.integer("n_targets", c.scenario.n_targets);
  sn.integer("n_frames", c.scenario.n_frames);
  sn.number("dt", c.scenario.dt);
  sn.number("field_extent", c.scenario.field_extent);
  sn.number("sensor_x", c.scenario.sensor_x);
  sn.number("sensor_y", c.scenario.sensor_y);
  sn.numbers("noise_base", c.scenario.noise_base);
  sn.numbers("noise_range_coeff", c.scenario.noise_range_coeff);
  sn.number("fp_rate", c.scenario.fp_rate);
  sn.number("fn_rate", c.scenario.fn_rate);
  sn.number("fn_range_coeff", c.scenario.fn_range_coeff);
  sn.number("miscalibration_factor", c.scenario.miscalibration_factor);
  sn.number("speed_min", c.scenario.speed_min);
  sn.number("speed_max", c.scenario.speed_max);
  sn.number("accel_noise", c.scenario.accel_noise);
  sn.number("yaw_rate_noise", c.scenario.yaw_rate_noise);
  sn.finish();

  Section an(root, "anchor");
  an.number("w", c.anchor.w);
  an.number("l", c.anchor.l);
  an.number("h", c.anchor.h);
  an.finish();

  validate(c);
  return c;
}

Json to_json(const RunConfig & c)
{
  Json root;
  root["seed"] = c.seed;

  Json tr;
  tr["gate_distance"] = c.tracker.gate_distance;
  tr["t_init"] = c.tracker.t_init;
  tr["t_drop"] = c.tracker.t_drop;
  Json q = Json::array();
  for (int r = 0; r < kPoseDim; ++r) {
    Json row = Json::array();
    for (int col = 0; col < kPoseDim; ++col) {
      row.push_back(c.tracker.process_noise(r, col));
    }
    q.push_back(row);
  }
  tr["process_noise"] = q;
  Json obs = Json::array();
  for (double v : c.tracker.default_obs_noise.values()) {
    obs.push_back(v);
  }
  tr["default_obs_noise"] = obs;
  tr["use_detection_covariance"] = c.tracker.use_detection_covariance;
  tr["init_var_speed"] = c.tracker.init_var_speed;
  tr["init_var_accel"] = c.tracker.init_var_accel;
  tr["init_var_yaw_rate"] = c.tracker.init_var_yaw_rate;
  tr["score_smoothing"] = c.tracker.score_smoothing;
  tr["ukf"] = {{"alpha", c.tracker.ukf.alpha}, {"beta", c.tracker.ukf.beta}, {"kappa", c.tracker.ukf.kappa}};
  root["tracker"] = tr;

  root["scoring"] = {
    {"strategy", to_string(c.scoring.strategy)},
    {"k_s", c.scoring.k_s},
    {"b_s", c.scoring.b_s},
    {"aggregate", to_string(c.scoring.aggregate)},
    {"alpha", c.scoring.alpha}};
  root["nms"] = {
    {"iou_threshold", c.nms.iou_threshold},
    {"pre_top_k", c.nms.pre_top_k},
    {"iou_kind", to_string(c.nms.iou_kind)}};
  root["eval"] = {
    {"iou_threshold", c.eval.iou_threshold},
    {"iou_kind", to_string(c.eval.iou_kind)},
    {"recall_points", c.eval.recall_points},
    {"mostly_lost_ratio", c.eval.mostly_lost_ratio},
    {"rmse_max_distance", c.rmse_max_distance}};

  const ScenarioConfig & s = c.scenario;
  root["scenario"] = {
    {"n_targets", s.n_targets},
    {"n_frames", s.n_frames},
    {"dt", s.dt},
    {"field_extent", s.field_extent},
    {"sensor_x", s.sensor_x},
    {"sensor_y", s.sensor_y},
    {"noise_base", s.noise_base},
    {"noise_range_coeff", s.noise_range_coeff},
    {"fp_rate", s.fp_rate},
    {"fn_rate", s.fn_rate},
    {"fn_range_coeff", s.fn_range_coeff},
    {"miscalibration_factor", s.miscalibration_factor},
    {"speed_min", s.speed_min},
    {"speed_max", s.speed_max},
    {"accel_noise", s.accel_noise},
    {"yaw_rate_noise", s.yaw_rate_noise}};
  root["anchor"] = {{"w", c.anchor.w}, {"l", c.anchor.l}, {"h", c.anchor.h}};
  return root;
}

Json parse_text(const std::string & text)
{
  try {
    return Json::parse(text);
  } catch (const Json::parse_error & e) {
    throw ConfigError(std::string("invalid JSON: ") + e.what());
  }
}

}  // namespace

RunConfig parse_config(const std::string & json_text)
{
  return from_json(parse_text(json_text));
}

RunConfig load_config(const std::filesystem::path & path)
{
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot open config '" + path.string() + "'");
  }
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string serialize_config(const RunConfig & cfg)
{
  return to_json(cfg).dump(2) + "\n";
}

RunConfig with_override(const RunConfig & cfg, const std::string & key, const std::string & value)
{
  Json root = to_json(cfg);
  Json parsed;
  try {
    parsed = Json::parse(value);
  } catch (const Json::parse_error &) {
    parsed = value;
  }
  const auto dot = key.find('.');
  if (dot == std::string::npos) {
    if (key != "seed") {
      throw ConfigError("unknown key '" + key + "'");
    }
    root[key] = parsed;
  } else {
    const std::string section = key.substr(0, dot);
    const std::string rest = key.substr(dot + 1);
    if (!root.contains(section)) {
      throw ConfigError("unknown key '" + key + "'");
    }
    Json * node = &root[section];
    const auto dot2 = rest.find('.');
    if (dot2 != std::string::npos) {
      const std::string sub = rest.substr(0, dot2);
      if (!node->contains(sub) || !(*node)[sub].is_object()) {
        throw ConfigError("unknown key '" + key + "'");
      }
      node = &(*node)[sub];
      (*node)[rest.substr(dot2 + 1)] = parsed;
    } else {
      (*node)[rest] = parsed;
    }
  }
  return from_json(root);
}

void apply_constant_sigma(TrackerConfig & cfg, double sigma)
{
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw ConfigError("constant sigma must be positive and finite");
  }
  cfg.use_detection_covariance = false;
  cfg.default_obs_noise = BoxVariance::isotropic(sigma);
}

std::string to_string(IouKind kind)
{
  return kind == IouKind::kBev ? "bev" : "3d";
}

IouKind parse_iou_kind(const std::string & name)
{
  if (name == "bev") return IouKind::kBev;
  if (name == "3d") return IouKind::k3d;
  throw ConfigError("unknown IoU kind '" + name + "' (expected bev or 3d)");
}

}  // namespace uatrack
