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

#include "uatrack/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>
#include <unordered_map>

namespace uatrack
{
namespace
{

constexpr double kForbidden = 1e6;

struct GtHistory
{
  long present{0};
  long matched{0};
  bool ever_matched{false};
  bool interrupted{false};
  int last_pred_id{0};
  bool has_last_pred{false};
};

}  // namespace

std::vector<Assignment> match_frame(
  const std::vector<Box3D> & gt, const std::vector<Box3D> & pred, const EvalConfig & cfg)
{
  if (gt.empty() || pred.empty()) {
    return {};
  }
  Eigen::MatrixXd cost(gt.size(), pred.size());
  Eigen::MatrixXd iou(gt.size(), pred.size());
  for (std::size_t i = 0; i < gt.size(); ++i) {
    for (std::size_t j = 0; j < pred.size(); ++j) {
      iou(i, j) = box_iou(gt[i], pred[j], cfg.iou_kind);
      // a forbidden pair costs more than any full set of allowed ones, so the pair count is maximized first
      cost(i, j) = iou(i, j) > cfg.iou_threshold ? 1.0 - iou(i, j) : kForbidden;
    }
  }
  std::vector<Assignment> out;
  for (const Assignment & a : hungarian_assign(cost)) {
    if (iou(a.row, a.col) > cfg.iou_threshold) {
      out.push_back(a);
    }
  }
  return out;
}

DetectionReport detection_pr(const BoxFrames & gt_frames, const BoxFrames & pred_frames, const EvalConfig & cfg)
{
  DetectionReport report;
  const std::size_t n_frames = std::max(gt_frames.size(), pred_frames.size());
  long total_gt = 0;
  for (const auto & f : gt_frames) {
    total_gt += static_cast<long>(f.size());
  }

  // per-threshold increments of (true positives, predictions), keyed by descending score
  std::map<double, std::pair<long, long>, std::greater<>> deltas;
  static const std::vector<Box3D> kEmpty;
  for (std::size_t f = 0; f < n_frames; ++f) {
    const auto & gt = f < gt_frames.size() ? gt_frames[f] : kEmpty;
    const auto & pred = f < pred_frames.size() ? pred_frames[f] : kEmpty;
    if (pred.empty()) {
      continue;
    }
    std::vector<Box3D> sorted = pred;
    std::stable_sort(sorted.begin(), sorted.end(), [](const Box3D & a, const Box3D & b) {
      return a.score > b.score;
    });
    long prev_tp = 0;
    std::size_t end = 0;
    while (end < sorted.size()) {
      const double s = sorted[end].score;
      std::size_t next = end;
      while (next < sorted.size() && sorted[next].score == s) {
        ++next;
      }
      const std::vector<Box3D> subset(sorted.begin(), sorted.begin() + static_cast<long>(next));
      const long tp = gt.empty() ? 0 : static_cast<long>(match_frame(gt, subset, cfg).size());
      auto & d = deltas[s];
      d.first += tp - prev_tp;
      d.second += static_cast<long>(next - end);
      prev_tp = tp;
      end = next;
    }
  }

  long tp = 0;
  long np = 0;
  double best_f1 = 0.0;
  for (const auto & [threshold, d] : deltas) {
    tp += d.first;
    np += d.second;
    PrPoint p;
    p.threshold = threshold;
    p.precision = np > 0 ? static_cast<double>(tp) / static_cast<double>(np) : 0.0;
    p.recall = total_gt > 0 ? static_cast<double>(tp) / static_cast<double>(total_gt) : 0.0;
    if (p.precision + p.recall > 0.0) {
      best_f1 = std::max(best_f1, 2.0 * p.precision * p.recall / (p.precision + p.recall));
    }
    report.pr_curve.push_back(p);
  }

  if (total_gt > 0 && cfg.recall_points > 0) {
    double sum = 0.0;
    for (int i = 1; i <= cfg.recall_points; ++i) {
      const double level = static_cast<double>(i) / cfg.recall_points;
      double best = 0.0;
      for (const PrPoint & p : report.pr_curve) {
        if (p.recall >= level - 1e-12) {
          best = std::max(best, p.precision);
        }
      }
      sum += best;
    }
    report.ap = 100.0 * sum / cfg.recall_points;
  }
  report.max_f1 = 100.0 * best_f1;
  return report;
}

TrackingReport clear_mot(const TrackFrames & gt, const TrackFrames & pred, const EvalConfig & cfg)
{
  TrackingReport report;
  const std::size_t n_frames = std::max(gt.size(), pred.size());
  static const std::vector<TrackedBox> kEmpty;

  std::map<int, GtHistory> history;
  std::unordered_map<int, int> previous;  // gt id -> pred id matched in the previous frame
  BoxFrames gt_boxes(n_frames);
  BoxFrames pred_boxes(n_frames);

  for (std::size_t f = 0; f < n_frames; ++f) {
    const auto & g = f < gt.size() ? gt[f] : kEmpty;
    const auto & p = f < pred.size() ? pred[f] : kEmpty;
    for (const auto & tb : g) gt_boxes[f].push_back(tb.box);
    for (const auto & tb : p) pred_boxes[f].push_back(tb.box);

    std::vector<int> gt_match(g.size(), -1);
    std::vector<bool> pred_taken(p.size(), false);

    for (std::size_t i = 0; i < g.size(); ++i) {
      const auto it = previous.find(g[i].id);
      if (it == previous.end()) {
        continue;
      }
      for (std::size_t j = 0; j < p.size(); ++j) {
        if (!pred_taken[j] && p[j].id == it->second &&
            box_iou(g[i].box, p[j].box, cfg.iou_kind) > cfg.iou_threshold) {
          gt_match[i] = static_cast<int>(j);
          pred_taken[j] = true;
          break;
        }
      }
    }

    std::vector<std::size_t> gt_rest;
    std::vector<std::size_t> pred_rest;
    std::vector<Box3D> gt_rest_boxes;
    std::vector<Box3D> pred_rest_boxes;
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (gt_match[i] < 0) {
        gt_rest.push_back(i);
        gt_rest_boxes.push_back(g[i].box);
      }
    }
    for (std::size_t j = 0; j < p.size(); ++j) {
      if (!pred_taken[j]) {
        pred_rest.push_back(j);
        pred_rest_boxes.push_back(p[j].box);
      }
    }
    for (const Assignment & a : match_frame(gt_rest_boxes, pred_rest_boxes, cfg)) {
      gt_match[gt_rest[a.row]] = static_cast<int>(pred_rest[a.col]);
      pred_taken[pred_rest[a.col]] = true;
    }

    previous.clear();
    for (std::size_t i = 0; i < g.size(); ++i) {
      GtHistory & h = history[g[i].id];
      h.present += 1;
      if (gt_match[i] < 0) {
        report.fn += 1;
        if (h.ever_matched) {
          h.interrupted = true;
        }
        continue;
      }
      const int pred_id = p[gt_match[i]].id;
      report.tp += 1;
      h.matched += 1;
      if (h.has_last_pred && h.last_pred_id != pred_id) {
        report.idsw += 1;
      }
      if (h.interrupted) {
        report.frag += 1;
        h.interrupted = false;
      }
      h.ever_matched = true;
      h.has_last_pred = true;
      h.last_pred_id = pred_id;
      previous[g[i].id] = pred_id;
    }
    for (std::size_t j = 0; j < p.size(); ++j) {
      if (!pred_taken[j]) {
        report.fp += 1;
      }
    }
    report.gt_boxes += static_cast<long>(g.size());
  }

  for (const auto & [id, h] : history) {
    report.gt_tracks += 1;
    if (static_cast<double>(h.matched) < cfg.mostly_lost_ratio * static_cast<double>(h.present)) {
      report.mostly_lost += 1;
    }
  }

  const DetectionReport det = detection_pr(gt_boxes, pred_boxes, cfg);
  TrackingReport combined = combine_reports({report});
  combined.ap = det.ap;
  combined.max_f1 = det.max_f1;
  return combined;
}

TrackingReport combine_reports(const std::vector<TrackingReport> & reports)
{
  TrackingReport out;
  for (const TrackingReport & r : reports) {
    out.idsw += r.idsw;
    out.frag += r.frag;
    out.tp += r.tp;
    out.fp += r.fp;
    out.fn += r.fn;
    out.gt_boxes += r.gt_boxes;
    out.gt_tracks += r.gt_tracks;
    out.mostly_lost += r.mostly_lost;
  }
  if (out.gt_boxes > 0) {
    out.mota = 100.0 * (1.0 - static_cast<double>(out.fn + out.fp + out.idsw) / static_cast<double>(out.gt_boxes));
  }
  if (out.gt_tracks > 0) {
    out.ml = 100.0 * static_cast<double>(out.mostly_lost) / static_cast<double>(out.gt_tracks);
  }
  return out;
}

RmseReport position_rmse(const TrackFrames & gt, const TrackFrames & pred, double max_distance)
{
  RmseReport out;
  double sum_sq = 0.0;
  const std::size_t n_frames = std::min(gt.size(), pred.size());
  for (std::size_t f = 0; f < n_frames; ++f) {
    const auto & g = gt[f];
    const auto & p = pred[f];
    if (g.empty() || p.empty()) {
      continue;
    }
    Eigen::MatrixXd cost(g.size(), p.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
      for (std::size_t j = 0; j < p.size(); ++j) {
        const double d = std::hypot(g[i].box.x - p[j].box.x, g[i].box.y - p[j].box.y);
        cost(i, j) = d <= max_distance ? d : kForbidden;
      }
    }
    for (const Assignment & a : hungarian_assign(cost)) {
      const double d = cost(a.row, a.col);
      if (d < kForbidden) {
        sum_sq += d * d;
        out.pairs += 1;
      }
    }
  }
  if (out.pairs > 0) {
    out.rmse = std::sqrt(sum_sq / static_cast<double>(out.pairs));
  }
  return out;
}

}  // namespace uatrack
