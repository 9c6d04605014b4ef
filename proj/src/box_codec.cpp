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

#include "uatrack/box_codec.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "uatrack/math_core.hpp"

namespace uatrack
{
namespace
{

void check_anchor(const Anchor & a)
{
  if (!(a.w > 0.0 && a.l > 0.0 && a.h > 0.0)) {
    throw std::invalid_argument("anchor dimensions must be positive");
  }
}

}  // namespace

double Anchor::diagonal() const { return std::sqrt(l * l + w * w); }

BoxVariance BoxVariance::isotropic(double sigma)
{
  const double v = sigma * sigma;
  return {v, v, v, v, v, v, v};
}

bool BoxVariance::positive() const
{
  for (double v : values()) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      return false;
    }
  }
  return true;
}

EncodedTarget encode_box(const Box3D & gt, const Anchor & anchor)
{
  check_anchor(anchor);
  if (!(gt.w > 0.0 && gt.l > 0.0 && gt.h > 0.0)) {
    throw std::invalid_argument("box dimensions must be positive");
  }
  const double d = anchor.diagonal();
  EncodedTarget t;
  t.x = (gt.x - anchor.x) / d;
  t.y = (gt.y - anchor.y) / d;
  t.z = (gt.z - anchor.z) / anchor.h;
  t.w = std::log(gt.w / anchor.w);
  t.l = std::log(gt.l / anchor.l);
  t.h = std::log(gt.h / anchor.h);
  t.theta = gt.theta - anchor.theta;
  return t;
}

Box3D decode_box(const EncodedTarget & t, const Anchor & anchor)
{
  check_anchor(anchor);
  const double d = anchor.diagonal();
  Box3D b;
  b.x = t.x * d + anchor.x;
  b.y = t.y * d + anchor.y;
  b.z = t.z * anchor.h + anchor.z;
  b.w = std::exp(t.w) * anchor.w;
  b.l = std::exp(t.l) * anchor.l;
  b.h = std::exp(t.h) * anchor.h;
  b.theta = wrap_angle(t.theta + anchor.theta);
  return b;
}

BoxVariance decode_variance(const EncodedLogVar & s, const Anchor & anchor, const Box3D & decoded)
{
  check_anchor(anchor);
  const double d2 = anchor.l * anchor.l + anchor.w * anchor.w;
  BoxVariance v;
  v.x = d2 * std::exp(s.x);
  v.y = d2 * std::exp(s.y);
  v.z = anchor.h * anchor.h * std::exp(s.z);
  v.w = decoded.w * decoded.w * std::exp(s.w);
  v.l = decoded.l * decoded.l * std::exp(s.l);
  v.h = decoded.h * decoded.h * std::exp(s.h);
  v.theta = std::exp(s.theta);
  return v;
}

EncodedLogVar encode_variance(const BoxVariance & v, const Anchor & anchor, const Box3D & decoded)
{
  check_anchor(anchor);
  if (!v.positive()) {
    throw std::invalid_argument("variances must be positive");
  }
  const double d2 = anchor.l * anchor.l + anchor.w * anchor.w;
  EncodedLogVar s;
  s.x = std::log(v.x / d2);
  s.y = std::log(v.y / d2);
  s.z = std::log(v.z / (anchor.h * anchor.h));
  s.w = std::log(v.w / (decoded.w * decoded.w));
  s.l = std::log(v.l / (decoded.l * decoded.l));
  s.h = std::log(v.h / (decoded.h * decoded.h));
  s.theta = std::log(v.theta);
  return s;
}

std::vector<Anchor> make_anchor_grid(
  double extent, double spacing, const Anchor & prototype, const std::vector<double> & yaws)
{
  check_anchor(prototype);
  if (!(extent > 0.0 && spacing > 0.0)) {
    throw std::invalid_argument("anchor grid needs positive extent and spacing");
  }
  const int n = static_cast<int>(std::floor(2.0 * extent / spacing)) + 1;
  std::vector<Anchor> anchors;
  anchors.reserve(static_cast<std::size_t>(n) * n * yaws.size());
  for (int iy = 0; iy < n; ++iy) {
    for (int ix = 0; ix < n; ++ix) {
      for (double yaw : yaws) {
        Anchor a = prototype;
        a.x = -extent + ix * spacing;
        a.y = -extent + iy * spacing;
        a.theta = yaw;
        anchors.push_back(a);
      }
    }
  }
  return anchors;
}

const Anchor & nearest_anchor(const std::vector<Anchor> & anchors, double x, double y, double theta)
{
  if (anchors.empty()) {
    throw std::invalid_argument("no anchors to choose from");
  }
  std::size_t best = 0;
  double best_d2 = std::numeric_limits<double>::infinity();
  double best_dyaw = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < anchors.size(); ++i) {
    const double dx = anchors[i].x - x;
    const double dy = anchors[i].y - y;
    const double d2 = dx * dx + dy * dy;
    const double dyaw = std::abs(wrap_angle(theta - anchors[i].theta));
    if (d2 < best_d2 || (d2 == best_d2 && dyaw < best_dyaw)) {
      best = i;
      best_d2 = d2;
      best_dyaw = dyaw;
    }
  }
  return anchors[best];
}

}  // namespace uatrack
