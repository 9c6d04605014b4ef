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

#ifndef UATRACK__GEOMETRY_HPP_
#define UATRACK__GEOMETRY_HPP_

#include <array>
#include <cstddef>

#include "uatrack/box_codec.hpp"

namespace uatrack
{

// Points closer than this to a clipping edge count as inside.
inline constexpr double kClipTolerance = 1e-9;

struct Point2
{
  double x{0.0};
  double y{0.0};
};

/// Bird's-eye-view footprint. l is measured along the heading theta.
struct RotatedRect
{
  double cx{0.0};
  double cy{0.0};
  double w{1.0};
  double l{1.0};
  double theta{0.0};

  double area() const { return w * l; }
  /// Counter-clockwise corners.
  std::array<Point2, 4> corners() const;
};

RotatedRect bev_footprint(const Box3D & box);

/// Convex polygon with a fixed vertex budget; clipping two rectangles never exceeds 8.
struct ConvexPolygon
{
  static constexpr std::size_t kMaxVertices = 16;
  std::array<Point2, kMaxVertices> vertices{};
  std::size_t size{0};

  double area() const;
};

/// Intersection polygon of two rectangles, computed by cutting `a` with each edge of `b`.
ConvexPolygon clip_rectangles(const RotatedRect & a, const RotatedRect & b);

double rotated_intersection_area(const RotatedRect & a, const RotatedRect & b);

double iou_bev(const Box3D & a, const Box3D & b);

/// Volume IoU; z is the box center and h its full height.
double iou_3d(const Box3D & a, const Box3D & b);

enum class IouKind { kBev, k3d };

double box_iou(const Box3D & a, const Box3D & b, IouKind kind);

}  // namespace uatrack

#endif  // UATRACK__GEOMETRY_HPP_
