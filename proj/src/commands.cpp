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


#include "uatrack/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "uatrack/loss_checks.hpp"
#include "uatrack/math_core.hpp"
#include "uatrack/scoring.hpp"

namespace uatrack
{
namespace
{

std::string fixed(double v)
{
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

std::string g9(double v)
{
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

TrackFrames to_track_frames(const std::map<int, std::vector<TrackedBox>> & by_frame)
{
  TrackFrames frames;
  for (const auto & [frame, boxes] : by_frame) {
    if (frame < 0) {
      throw FormatError("negative frame index", 0);
    }
    if (frames.size() <= static_cast<std::size_t>(frame)) {
      frames.resize(static_cast<std::size_t>(frame) + 1);
    }
    frames[frame] = boxes;
  }
  return frames;
}

TrackFrames load_ground_truth(const std::string & path, const std::string & format)
{
  if (format == "kitti") {
    return to_track_frames(parse_kitti_labels(std::filesystem::path(path)));
  }
  return tracks_by_frame(read_tracks(std::filesystem::path(path)));
}

BoxFrames boxes_of(const TrackFrames & frames)
{
  BoxFrames out;
  out.reserve(frames.size());
  for (const auto & f : frames) {
    auto & boxes = out.emplace_back();
    for (const auto & tb : f) {
      boxes.push_back(tb.box);
    }
  }
  return out;
}

std::vector<double> parse_list(const std::string & text)
{
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception &) {
      used = 0;
    }
    if (used == 0 || used != item.size()) {
      throw std::invalid_argument("invalid number '" + item + "' in list '" + text + "'");
    }
    out.push_back(v);
  }
  if (out.empty()) {
    throw std::invalid_argument("empty list");
  }
  return out;
}

// Splits on commas that are not inside brackets so JSON arrays can be grid values.
std::vector<std::string> split_values(const std::string & text)
{
  std::vector<std::string> out;
  std::string cur;
  int depth = 0;
  for (char c : text) {
    if (c == '[' || c == '{') ++depth;
    if (c == ']' || c == '}') --depth;
    if (c == ',' && depth == 0) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

std::pair<std::string, std::string> split_assignment(const std::string & text)
{
  const auto eq = text.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw std::invalid_argument("expected key=value, got '" + text + "'");
  }
  return {text.substr(0, eq), text.substr(eq + 1)};
}

CovarianceVariant parse_variant(const std::string & name)
{
  if (name == "true") return CovarianceVariant::kTrue;
  if (name == "reported") return CovarianceVariant::kReported;
  if (name == "none") return CovarianceVariant::kNone;
  throw std::invalid_argument("unknown variance variant '" + name + "'");
}

void write_text(const std::string & path, const std::string & text, std::ostream & out)
{
  if (path.empty()) {
    out << text;
    return;
  }
  std::ofstream file(path);
  if (!file) {
    throw FormatError("cannot write '" + path + "'", 0);
  }
  file << text;
}

struct CommonOptions
{
  std::string config;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> overrides;

  RunConfig resolve() const
  {
    RunConfig cfg = config.empty() ? RunConfig{} : load_config(config);
    for (const std::string & o : overrides) {
      const auto [key, value] = split_assignment(o);
      cfg = with_override(cfg, key, value);
    }
    if (seed) {
      cfg = with_override(cfg, "seed", std::to_string(*seed));
    }
    return cfg;
  }
};

void add_common(CLI::App * sub, CommonOptions & c)
{
  sub->add_option("--config", c.config, "JSON run configuration")->check(CLI::ExistingFile);
  sub->add_option("--seed", c.seed, "random seed (overrides the config)");
  sub->add_option("--set", c.overrides, "override a config key, section.key=value (repeatable)")
    ->allow_extra_args(false);
}

}  // namespace

SimulatedRecords scenario_records(const Scenario & scenario, CovarianceVariant variant)
{
  SimulatedRecords out;
  for (std::size_t f = 0; f < scenario.frame_count(); ++f) {
    const int frame = static_cast<int>(f);
    for (const GroundTruthObject & g : scenario.ground_truth[f]) {
      out.ground_truth.push_back({frame, g.id, g.box});
    }
    for (const DetectionWithCovariance & d : scenario.frame(f, variant)) {
      out.detections.push_back({frame, d.box, d.variance});
    }
  }
  return out;
}

TrackFrames run_tracker(const std::vector<FrameDetections> & frames, const TrackerConfig & cfg, double dt)
{
  Tracker tracker(cfg);
  TrackFrames out;
  out.reserve(frames.size());
  for (const FrameDetections & frame : frames) {
    auto & tracks = out.emplace_back();
    for (const Track & t : tracker.step(frame, dt)) {
      tracks.push_back({t.id, t.box()});
    }
  }
  return out;
}

std::vector<TrackRecord> run_tracker(
  const std::vector<DetectionRecord> & detections, const TrackerConfig & cfg, double dt, std::size_t n_frames)
{
  const TrackFrames frames = run_tracker(detections_by_frame(detections, n_frames), cfg, dt);
  std::vector<TrackRecord> out;
  for (std::size_t f = 0; f < frames.size(); ++f) {
    for (const TrackedBox & tb : frames[f]) {
      out.push_back({static_cast<int>(f), tb.id, tb.box});
    }
  }
  return out;
}

TrackEvaluation evaluate_tracks(const TrackFrames & gt, const TrackFrames & pred, const RunConfig & cfg)
{
  return {clear_mot(gt, pred, cfg.eval), position_rmse(gt, pred, cfg.rmse_max_distance)};
}

TrackEvaluation evaluate_sequences(
  const std::vector<TrackFrames> & gt, const std::vector<TrackFrames> & pred, const RunConfig & cfg)
{
  if (gt.size() != pred.size()) {
    throw std::invalid_argument("evaluate_sequences: sequence counts differ");
  }
  std::vector<TrackingReport> reports;
  BoxFrames gt_boxes;
  BoxFrames pred_boxes;
  double sum_sq = 0.0;
  std::size_t pairs = 0;
  for (std::size_t i = 0; i < gt.size(); ++i) {
    const TrackEvaluation e = evaluate_tracks(gt[i], pred[i], cfg);
    reports.push_back(e.report);
    sum_sq += e.rmse.rmse * e.rmse.rmse * static_cast<double>(e.rmse.pairs);
    pairs += e.rmse.pairs;
    const std::size_t n = std::max(gt[i].size(), pred[i].size());
    BoxFrames g = boxes_of(gt[i]);
    BoxFrames p = boxes_of(pred[i]);
    g.resize(n);
    p.resize(n);
    gt_boxes.insert(gt_boxes.end(), g.begin(), g.end());
    pred_boxes.insert(pred_boxes.end(), p.begin(), p.end());
  }
  TrackEvaluation out;
  out.report = combine_reports(reports);
  const DetectionReport det = detection_pr(gt_boxes, pred_boxes, cfg.eval);
  out.report.ap = det.ap;
  out.report.max_f1 = det.max_f1;
  out.rmse.pairs = pairs;
  out.rmse.rmse = pairs > 0 ? std::sqrt(sum_sq / static_cast<double>(pairs)) : 0.0;
  return out;
}

std::string tracking_report_header()
{
  return "ap,max_f1,mota,idsw,frag,ml,tp,fp,fn,gt_boxes,gt_tracks,rmse,rmse_pairs";
}

std::string tracking_report_row(const TrackEvaluation & e)
{
  const TrackingReport & r = e.report;
  std::ostringstream ss;
  ss << fixed(r.ap) << ',' << fixed(r.max_f1) << ',' << fixed(r.mota) << ',' << r.idsw << ',' << r.frag << ','
     << fixed(r.ml) << ',' << r.tp << ',' << r.fp << ',' << r.fn << ',' << r.gt_boxes << ',' << r.gt_tracks << ','
     << fixed(e.rmse.rmse) << ',' << e.rmse.pairs;
  return ss.str();
}

std::vector<DetectionRecord> rescore_and_suppress(const std::vector<DetectionRecord> & records, const RunConfig & cfg)
{
  std::map<int, std::vector<std::size_t>> frames;
  for (std::size_t i = 0; i < records.size(); ++i) {
    frames[records[i].frame].push_back(i);
  }
  std::vector<DetectionRecord> out;
  for (const auto & [frame, indices] : frames) {
    std::vector<Box3D> boxes;
    std::vector<EncodedLogVar> logvars;
    for (std::size_t i : indices) {
      const DetectionRecord & r = records[i];
      boxes.push_back(r.box);
      if (r.variance) {
        Anchor a = cfg.anchor;
        a.x = r.box.x;
        a.y = r.box.y;
        a.z = r.box.z;
        a.theta = r.box.theta;
        logvars.push_back(encode_variance(*r.variance, a, r.box));
      } else if (cfg.scoring.strategy != ScoreStrategy::kNone) {
        throw std::invalid_argument(
          "frame " + std::to_string(frame) + ": strategy '" + to_string(cfg.scoring.strategy) +
          "' needs variance columns");
      } else {
        logvars.emplace_back();
      }
    }
    const std::vector<Box3D> scored = rescore(boxes, logvars, cfg.scoring);
    for (std::size_t k : nms_indices(scored, cfg.nms)) {
      DetectionRecord r = records[indices[k]];
      r.box.score = scored[k].score;
      out.push_back(r);
    }
  }
  return out;
}

std::string loss_curves_csv(
  const std::string & kind, const std::vector<double> & params, const std::vector<double> & lambdas, double s0)
{
  std::ostringstream ss;
  if (kind == "gaussian") {
    ss << "d2,lambda,s,loss\n";
  } else if (kind == "vonmises") {
    ss << "cos,lambda,s,loss\n";
  } else {
    throw std::invalid_argument("unknown curve kind '" + kind + "' (expected gaussian or vonmises)");
  }
  for (double p : params) {
    for (double lambda : lambdas) {
      for (int i = 0; i <= 1000; ++i) {
        const double s = (i - 500) / 100.0;
        double loss = 0.0;
        if (kind == "gaussian") {
          if (p < 0.0) {
            throw std::invalid_argument("squared residual must be non-negative");
          }
          loss = gaussian_nll(std::sqrt(p), 0.0, s, {lambda}).value;
        } else {
          if (p < -1.0 || p > 1.0) {
            throw std::invalid_argument("cos value must lie in [-1, 1]");
          }
          loss = von_mises_nll(std::acos(p), 0.0, s, {lambda, s0}).value;
        }
        ss << g9(p) << ',' << g9(lambda) << ',' << g9(s) << ',' << g9(loss) << '\n';
      }
    }
  }
  return ss.str();
}

int run_cli(int argc, const char * const * argv, std::ostream & out, std::ostream & err)
{
  CLI::App app{"Uncertainty-aware 3D box post-processing, tracking and evaluation"};
  app.name("uatrack");
  app.require_subcommand(1);

  // simulate
  CommonOptions sim_common;
  std::string sim_gt;
  std::string sim_det;
  std::string sim_variant = "reported";
  auto * sim = app.add_subcommand("simulate", "generate a seeded scenario: ground truth and detections");
  add_common(sim, sim_common);
  sim->add_option("--gt", sim_gt, "ground-truth track file to write")->required();
  sim->add_option("--detections", sim_det, "detection file to write")->required();
  sim->add_option("--variance", sim_variant, "variance columns: true, reported or none")
    ->check(CLI::IsMember({"true", "reported", "none"}));

  // track
  CommonOptions trk_common;
  std::string trk_in;
  std::string trk_out;
  std::optional<double> trk_dt;
  std::optional<double> trk_sigma;
  bool trk_ignore = false;
  bool trk_use = false;
  auto * trk = app.add_subcommand("track", "run the tracker over a detection file");
  add_common(trk, trk_common);
  trk->add_option("--detections", trk_in, "detection file")->required()->check(CLI::ExistingFile);
  trk->add_option("--out", trk_out, "track file to write")->required();
  trk->add_option("--dt", trk_dt, "frame period in seconds (default: scenario.dt)");
  auto * use_flag = trk->add_flag("--use-variance", trk_use, "use the detection variances (default)");
  auto * ignore_flag = trk->add_flag("--ignore-variance", trk_ignore, "use tracker.default_obs_noise for every detection");
  auto * sigma_opt = trk->add_option("--constant-sigma", trk_sigma, "one fixed noise sigma for every detection");
  use_flag->excludes(ignore_flag)->excludes(sigma_opt);
  ignore_flag->excludes(sigma_opt);

  // eval-track
  CommonOptions et_common;
  std::string et_gt;
  std::string et_tracks;
  std::string et_format = "csv";
  std::string et_out;
  auto * et = app.add_subcommand("eval-track", "CLEAR-MOT, AP and position RMSE of a track file");
  add_common(et, et_common);
  et->add_option("--gt", et_gt, "ground-truth file")->required()->check(CLI::ExistingFile);
  et->add_option("--tracks", et_tracks, "track file")->required()->check(CLI::ExistingFile);
  et->add_option("--gt-format", et_format, "csv or kitti")->check(CLI::IsMember({"csv", "kitti"}));
  et->add_option("--out", et_out, "report file (default: stdout)");

  // eval-det
  CommonOptions ed_common;
  std::string ed_gt;
  std::string ed_det;
  std::string ed_format = "csv";
  std::string ed_out;
  auto * ed = app.add_subcommand("eval-det", "AP and max F1 of a detection file");
  add_common(ed, ed_common);
  ed->add_option("--gt", ed_gt, "ground-truth file")->required()->check(CLI::ExistingFile);
  ed->add_option("--detections", ed_det, "detection file")->required()->check(CLI::ExistingFile);
  ed->add_option("--gt-format", ed_format, "csv or kitti")->check(CLI::IsMember({"csv", "kitti"}));
  ed->add_option("--out", ed_out, "report file (default: stdout)");

  // nms
  CommonOptions nms_common;
  std::string nms_in;
  std::string nms_out;
  auto * nmsc = app.add_subcommand("nms", "uncertainty-aware rescoring followed by NMS");
  add_common(nmsc, nms_common);
  nmsc->add_option("--detections", nms_in, "detection file with variance columns")->required()->check(CLI::ExistingFile);
  nmsc->add_option("--out", nms_out, "filtered detection file")->required();

  // check-losses
  CommonOptions cl_common;
  int cl_points = 1000;
  auto * cl = app.add_subcommand("check-losses", "gradient and minimum-location checks of the regression losses");
  add_common(cl, cl_common);
  cl->add_option("--points", cl_points, "random points for the gradient check")->check(CLI::PositiveNumber);

  // sweep
  CommonOptions sw_common;
  std::vector<std::string> sw_grid;
  int sw_scenarios = 1;
  std::string sw_variant = "reported";
  std::string sw_out;
  auto * sw = app.add_subcommand("sweep", "grid over config values on simulated scenarios, one report row per cell");
  add_common(sw, sw_common);
  sw->add_option("--grid", sw_grid, "key=v1,v2,... (repeatable; key constant_sigma selects a fixed noise sigma)")
    ->allow_extra_args(false);
  sw->add_option("--scenarios", sw_scenarios, "scenarios per cell, seeds seed..seed+n-1")->check(CLI::PositiveNumber);
  sw->add_option("--variance", sw_variant, "variance fed to the tracker: true, reported or none")
    ->check(CLI::IsMember({"true", "reported", "none"}));
  sw->add_option("--out", sw_out, "report file (default: stdout)");

  // plot-data
  CommonOptions pd_common;
  std::string pd_kind;
  std::string pd_params;
  std::string pd_lambda = "1";
  double pd_s0 = 1.0;
  std::string pd_out;
  auto * pd = app.add_subcommand("plot-data", "loss curves over s as CSV series");
  add_common(pd, pd_common);
  pd->add_option("kind", pd_kind, "gaussian or vonmises")->required()->check(CLI::IsMember({"gaussian", "vonmises"}));
  auto * d2_opt = pd->add_option("--d2", pd_params, "squared residuals, comma separated (gaussian)");
  auto * cos_opt = pd->add_option("--cos", pd_params, "cos(theta - theta_t) values, comma separated (vonmises)");
  d2_opt->excludes(cos_opt);
  pd->add_option("--lambda", pd_lambda, "regularizer weights, comma separated");
  pd->add_option("--s0", pd_s0, "ELU offset (vonmises)");
  pd->add_option("--out", pd_out, "CSV file (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError & e) {
    return app.exit(e, out, err);
  }

  try {
    if (sim->parsed()) {
      const RunConfig cfg = sim_common.resolve();
      const Scenario scenario = generate_scenario(cfg.scenario);
      const SimulatedRecords rec = scenario_records(scenario, parse_variant(sim_variant));
      write_tracks(std::filesystem::path(sim_gt), rec.ground_truth);
      write_detections(std::filesystem::path(sim_det), rec.detections);
      out << "frames=" << scenario.frame_count() << " ground_truth=" << rec.ground_truth.size()
          << " detections=" << rec.detections.size() << '\n';
    } else if (trk->parsed()) {
      RunConfig cfg = trk_common.resolve();
      if (trk_ignore) {
        cfg.tracker.use_detection_covariance = false;
      } else if (trk_sigma) {
        apply_constant_sigma(cfg.tracker, *trk_sigma);
      } else if (trk_use) {
        cfg.tracker.use_detection_covariance = true;
      }
      const double dt = trk_dt.value_or(cfg.scenario.dt);
      if (!(dt > 0.0)) {
        throw std::invalid_argument("--dt must be positive");
      }
      const auto tracks = run_tracker(read_detections(std::filesystem::path(trk_in)), cfg.tracker, dt);
      write_tracks(std::filesystem::path(trk_out), tracks);
    } else if (et->parsed()) {
      const RunConfig cfg = et_common.resolve();
      const TrackFrames gt = load_ground_truth(et_gt, et_format);
      const TrackFrames pred = tracks_by_frame(read_tracks(std::filesystem::path(et_tracks)));
      const TrackEvaluation e = evaluate_tracks(gt, pred, cfg);
      write_text(et_out, tracking_report_header() + "\n" + tracking_report_row(e) + "\n", out);
    } else if (ed->parsed()) {
      const RunConfig cfg = ed_common.resolve();
      const BoxFrames gt = boxes_of(load_ground_truth(ed_gt, ed_format));
      const auto records = read_detections(std::filesystem::path(ed_det));
      const DetectionReport r = detection_pr(gt, boxes_by_frame(records), cfg.eval);
      std::size_t n_gt = 0;
      for (const auto & f : gt) n_gt += f.size();
      write_text(
        ed_out,
        "ap,max_f1,predictions,ground_truth\n" + fixed(r.ap) + "," + fixed(r.max_f1) + "," +
          std::to_string(records.size()) + "," + std::to_string(n_gt) + "\n",
        out);
    } else if (nmsc->parsed()) {
      const RunConfig cfg = nms_common.resolve();
      const auto kept = rescore_and_suppress(read_detections(std::filesystem::path(nms_in)), cfg);
      write_detections(std::filesystem::path(nms_out), kept);
    } else if (cl->parsed()) {
      const RunConfig cfg = cl_common.resolve();
      const auto start = std::chrono::steady_clock::now();
      const auto results = run_loss_checks(cfg.seed, cl_points);
      const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      bool ok = true;
      for (const CheckResult & r : results) {
        out << (r.passed ? "PASS " : "FAIL ") << r.name << ": " << r.detail << '\n';
        ok = ok && r.passed;
      }
      const bool fast = seconds < 5.0;
      out << (fast ? "PASS " : "FAIL ") << "runtime under 5 s\n";
      err << "check-losses took " << seconds << " s\n";
      return ok && fast ? 0 : 1;
    } else if (sw->parsed()) {
      const RunConfig base = sw_common.resolve();
      const CovarianceVariant variant = parse_variant(sw_variant);
      std::vector<std::pair<std::string, std::vector<std::string>>> axes;
      for (const std::string & g : sw_grid) {
        const auto [key, values] = split_assignment(g);
        axes.emplace_back(key, split_values(values));
      }
      std::ostringstream report;
      for (const auto & axis : axes) {
        report << axis.first << ',';
      }
      report << tracking_report_header() << '\n';

      std::vector<std::size_t> pos(axes.size(), 0);
      while (true) {
        RunConfig cell = base;
        for (std::size_t a = 0; a < axes.size(); ++a) {
          const std::string & value = axes[a].second[pos[a]];
          if (axes[a].first == "constant_sigma") {
            if (value != "off") {
              apply_constant_sigma(cell.tracker, parse_list(value).front());
            }
          } else {
            cell = with_override(cell, axes[a].first, value);
          }
        }
        std::vector<TrackFrames> gts;
        std::vector<TrackFrames> preds;
        for (int k = 0; k < sw_scenarios; ++k) {
          ScenarioConfig sc = cell.scenario;
          sc.seed = cell.seed + static_cast<std::uint64_t>(k);
          const Scenario scenario = generate_scenario(sc);
          std::vector<FrameDetections> frames;
          for (std::size_t f = 0; f < scenario.frame_count(); ++f) {
            frames.push_back(scenario.frame(f, variant));
          }
          TrackFrames gt;
          for (const auto & f : scenario.ground_truth) {
            auto & g = gt.emplace_back();
            for (const auto & o : f) g.push_back({o.id, o.box});
          }
          gts.push_back(std::move(gt));
          preds.push_back(run_tracker(frames, cell.tracker, sc.dt));
        }
        for (std::size_t a = 0; a < axes.size(); ++a) {
          const std::string & value = axes[a].second[pos[a]];
          // quote values that contain commas so the row stays parseable
          report << (value.find(',') != std::string::npos ? "\"" + value + "\"" : value) << ',';
        }
        report << tracking_report_row(evaluate_sequences(gts, preds, cell)) << '\n';

        std::size_t a = 0;
        while (a < axes.size() && ++pos[a] == axes[a].second.size()) {
          pos[a] = 0;
          ++a;
        }
        if (a == axes.size()) {
          break;
        }
      }
      write_text(sw_out, report.str(), out);
    } else if (pd->parsed()) {
      pd_common.resolve();
      std::vector<double> params;
      if (!pd_params.empty()) {
        params = parse_list(pd_params);
      } else if (pd_kind == "gaussian") {
        params = {0.25, 1.0, 4.0};
      } else {
        params = {-0.5, 0.0, 0.5, 0.9};
      }
      write_text(pd_out, loss_curves_csv(pd_kind, params, parse_list(pd_lambda), pd_s0), out);
    }
  } catch (const std::exception & e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace uatrack
