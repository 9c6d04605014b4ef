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

#include "uatrack/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace uatrack
{
namespace
{

// Signed distance of p from the directed line a->b, positive on the left.
double side(const Point2 & a, const Point2 & b, const Point2 & p)
{
  const double ex = b.x - a.x;
  const double ey = b.y - a.y;
  const double len = std::hypot(ex, ey);
  return (ex * (p.y - a.y) - ey * (p.x - a.x)) / len;
}

void push(ConvexPolygon & poly, const Point2 & p)
{
  // Clipping a convex quad by four half-planes adds at most one vertex per cut.
  if (poly.size < ConvexPolygon::kMaxVertices) {
    poly.vertices[poly.size++] = p;
  }
}

// Keeps the part of `in` on the left of a->b (Sutherland-Hodgman step).
ConvexPolygon cut(const ConvexPolygon & in, const Point2 & a, const Point2 & b)
{
  ConvexPolygon out;
  if (in.size == 0) {
    return out;
  }
  for (std::size_t i = 0; i < in.size; ++i) {
    const Point2 & cur = in.vertices[i];
    const Point2 & nxt = in.vertices[(i + 1) % in.size];
    const double dc = side(a, b, cur);
    const double dn = side(a, b, nxt);
    const bool cur_in = dc >= -kClipTolerance;
    const bool nxt_in = dn >= -kClipTolerance;
    if (cur_in) {
      push(out, cur);
    }
    if (cur_in != nxt_in) {
      const double t = dc / (dc - dn);
      push(out, {cur.x + t * (nxt.x - cur.x), cur.y + t * (nxt.y - cur.y)});
    }
  }
  return out;
}

}  // namespace

std::array<Point2, 4> RotatedRect::corners() const
{
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  const double hl = 0.5 * l;
  const double hw = 0.5 * w;
  // local (along heading, across heading) offsets in counter-clockwise order
  const std::array<std::array<double, 2>, 4> local{{{hl, -hw}, {hl, hw}, {-hl, hw}, {-hl, -hw}}};
  std::array<Point2, 4> out{};
  for (std::size_t i = 0; i < 4; ++i) {
    out[i] = {cx + c * local[i][0] - s * local[i][1], cy + s * local[i][0] + c * local[i][1]};
  }
  return out;
}

RotatedRect bev_footprint(const Box3D & box) { return {box.x, box.y, box.w, box.l, box.theta}; }

double ConvexPolygon::area() const
{
  if (size < 3) {
    return 0.0;
  }
  double twice = 0.0;
  for (std::size_t i = 0; i < size; ++i) {
    const Point2 & p = vertices[i];
    const Point2 & q = vertices[(i + 1) % size];
    twice += p.x * q.y - q.x * p.y;
  }
  return 0.5 * std::abs(twice);
}

ConvexPolygon clip_rectangles(const RotatedRect & a, const RotatedRect & b)
{
  ConvexPolygon poly;
  for (const Point2 & p : a.corners()) {
    push(poly, p);
  }
  const auto edges = b.corners();
  for (std::size_t i = 0; i < 4 && poly.size > 0; ++i) {
    poly = cut(poly, edges[i], edges[(i + 1) % 4]);
  }
  return poly;
}

double rotated_intersection_area(const RotatedRect & a, const RotatedRect & b)
{
  // quick reject on circumscribed circles
  const double ra = 0.5 * std::hypot(a.w, a.l);
  const double rb = 0.5 * std::hypot(b.w, b.l);
  if (std::hypot(a.cx - b.cx, a.cy - b.cy) > ra + rb) {
    return 0.0;
  }
  const double area = clip_rectangles(a, b).area();
  return std::min(area, std::min(a.area(), b.area()));
}

double iou_bev(const Box3D & a, const Box3D & b)
{
  const RotatedRect ra = bev_footprint(a);
  const RotatedRect rb = bev_footprint(b);
  const double inter = rotated_intersection_area(ra, rb);
  const double uni = ra.area() + rb.area() - inter;
  return uni > 0.0 ? std::clamp(inter / uni, 0.0, 1.0) : 0.0;
}

double iou_3d(const Box3D & a, const Box3D & b)
{
  const double top = std::min(a.z + 0.5 * a.h, b.z + 0.5 * b.h);
  const double bottom = std::max(a.z - 0.5 * a.h, b.z - 0.5 * b.h);
  const double overlap_h = std::max(0.0, top - bottom);
  if (overlap_h == 0.0) {
    return 0.0;
  }
  const double inter = rotated_intersection_area(bev_footprint(a), bev_footprint(b)) * overlap_h;
  const double uni = a.w * a.l * a.h + b.w * b.l * b.h - inter;
  return uni > 0.0 ? std::clamp(inter / uni, 0.0, 1.0) : 0.0;
}

double box_iou(const Box3D & a, const Box3D & b, IouKind kind)
{
  return kind == IouKind::kBev ? iou_bev(a, b) : iou_3d(a, b);
}

}  // namespace uatrack
