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

#ifndef UATRACK__BOX_CODEC_HPP_
#define UATRACK__BOX_CODEC_HPP_

#include <array>
#include <vector>

namespace uatrack
{

/// Oriented 3D box in a right-handed, z-up frame. (x, y, z) is the box center,
/// l runs along the heading direction theta and w across it.
struct Box3D
{
  double x{0.0};
  double y{0.0};
  double z{0.0};
  double w{1.0};
  double l{1.0};
  double h{1.0};
  double theta{0.0};
  int class_id{0};
  double score{1.0};
};

struct Anchor
{
  double x{0.0};
  double y{0.0};
  double z{0.0};
  double w{1.6};
  double l{3.9};
  double h{1.56};
  double theta{0.0};

  double diagonal() const;
};

struct EncodedTarget
{
  double x{0.0};
  double y{0.0};
  double z{0.0};
  double w{0.0};
  double l{0.0};
  double h{0.0};
  double theta{0.0};
};

/// Log-variances of the encoded parameters, as emitted by a variance head.
struct EncodedLogVar
{
  double x{0.0};
  double y{0.0};
  double z{0.0};
  double w{0.0};
  double l{0.0};
  double h{0.0};
  double theta{0.0};

  std::array<double, 7> values() const { return {x, y, z, w, l, h, theta}; }
};

/// Diagonal variance of a decoded box in world units.
struct BoxVariance
{
  double x{1.0};
  double y{1.0};
  double z{1.0};
  double w{1.0};
  double l{1.0};
  double h{1.0};
  double theta{1.0};

  std::array<double, 7> values() const { return {x, y, z, w, l, h, theta}; }
  static BoxVariance isotropic(double sigma);
  bool positive() const;
};

/// Throws std::invalid_argument for non-positive box or anchor dimensions.
EncodedTarget encode_box(const Box3D & gt, const Anchor & anchor);

/// Inverse of encode_box. The result has class 0, score 1 and yaw in (-pi, pi].
Box3D decode_box(const EncodedTarget & target, const Anchor & anchor);

/// First-order propagation of encoded log-variances to world units.
/// Dimension variances use the decoded box as the expectation.
BoxVariance decode_variance(const EncodedLogVar & s, const Anchor & anchor, const Box3D & decoded);

/// Exact inverse of decode_variance for the same anchor and decoded box.
EncodedLogVar encode_variance(const BoxVariance & var, const Anchor & anchor, const Box3D & decoded);

/// Regular grid of anchors covering [-extent, extent]^2 with the given spacing,
/// one anchor per yaw in `yaws`. Used by the simulator and the nms command.
std::vector<Anchor> make_anchor_grid(
  double extent, double spacing, const Anchor & prototype, const std::vector<double> & yaws);

/// Anchor nearest to (x, y), ties broken by the smallest yaw difference.
/// Throws std::invalid_argument for an empty set.
const Anchor & nearest_anchor(const std::vector<Anchor> & anchors, double x, double y, double theta);

}  // namespace uatrack

#endif  // UATRACK__BOX_CODEC_HPP_
