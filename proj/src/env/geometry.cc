// Copyright 2026 The ResGrasp Authors
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

#include "resgrasp/env/geometry.h"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace resgrasp {
namespace {

double Cross(const Vec2& a, const Vec2& b) {
  return a.x() * b.y() - a.y() * b.x();
}

Vec2 EdgeNormal(const Vec2& a, const Vec2& b) {
  const Vec2 d = b - a;
  return Vec2(d.y(), -d.x()).normalized();
}

bool SegmentsIntersect(const Vec2& p1, const Vec2& p2, const Vec2& q1,
                       const Vec2& q2) {
  const double d1 = Cross(q2 - q1, p1 - q1);
  const double d2 = Cross(q2 - q1, p2 - q1);
  const double d3 = Cross(p2 - p1, q1 - p1);
  const double d4 = Cross(p2 - p1, q2 - p1);
  return ((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0));
}

}  // namespace

Vec2 Rotate(const Vec2& v, double angle) {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  return {c * v.x() - s * v.y(), s * v.x() + c * v.y()};
}

double WrapAngle(double angle) {
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  double a = std::fmod(angle + std::numbers::pi, kTwoPi);
  if (a <= 0.0) a += kTwoPi;
  return a - std::numbers::pi;
}

double SignedArea(const Polygon& poly) {
  double a = 0.0;
  const size_t n = poly.size();
  for (size_t i = 0; i < n; ++i) a += Cross(poly[i], poly[(i + 1) % n]);
  return 0.5 * a;
}

Vec2 AreaCentroid(const Polygon& poly) {
  const size_t n = poly.size();
  Vec2 c = Vec2::Zero();
  double a = 0.0;
  for (size_t i = 0; i < n; ++i) {
    const Vec2& p = poly[i];
    const Vec2& q = poly[(i + 1) % n];
    const double w = Cross(p, q);
    a += w;
    c += (p + q) * w;
  }
  return c / (3.0 * a);
}

double Perimeter(const Polygon& poly) {
  double len = 0.0;
  for (size_t i = 0; i < poly.size(); ++i) {
    len += (poly[(i + 1) % poly.size()] - poly[i]).norm();
  }
  return len;
}

Polygon TransformPolygon(const Polygon& poly, const Pose2& pose) {
  Polygon out;
  out.reserve(poly.size());
  const double c = std::cos(pose.angle);
  const double s = std::sin(pose.angle);
  for (const Vec2& p : poly) {
    out.emplace_back(pose.pos.x() + c * p.x() - s * p.y(),
                     pose.pos.y() + s * p.x() + c * p.y());
  }
  return out;
}

double MinY(const Polygon& poly) {
  double m = poly.front().y();
  for (const Vec2& p : poly) m = std::min(m, p.y());
  return m;
}

double MaxY(const Polygon& poly) {
  double m = poly.front().y();
  for (const Vec2& p : poly) m = std::max(m, p.y());
  return m;
}

bool IsCcw(const Polygon& poly) { return SignedArea(poly) > 0.0; }

bool IsSimple(const Polygon& poly) {
  const size_t n = poly.size();
  if (n < 3) return false;
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = i + 1; j < n; ++j) {
      if (j == i + 1 || (i == 0 && j == n - 1)) continue;
      if (SegmentsIntersect(poly[i], poly[(i + 1) % n], poly[j],
                            poly[(j + 1) % n])) {
        return false;
      }
    }
  }
  return true;
}

Polygon ConvexHull(Polygon pts) {
  std::sort(pts.begin(), pts.end(), [](const Vec2& a, const Vec2& b) {
    return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
  });
  if (pts.size() < 3) return pts;
  Polygon hull(2 * pts.size());
  size_t k = 0;
  for (size_t i = 0; i < pts.size(); ++i) {
    while (k >= 2 &&
           Cross(hull[k - 1] - hull[k - 2], pts[i] - hull[k - 2]) <= 0)
      --k;
    hull[k++] = pts[i];
  }
  for (size_t i = pts.size() - 1, t = k + 1; i > 0; --i) {
    while (k >= t &&
           Cross(hull[k - 1] - hull[k - 2], pts[i - 1] - hull[k - 2]) <= 0)
      --k;
    hull[k++] = pts[i - 1];
  }
  hull.resize(k - 1);
  return hull;
}

bool PointInPolygon(const Polygon& poly, const Vec2& p) {
  bool inside = false;
  const size_t n = poly.size();
  for (size_t i = 0, j = n - 1; i < n; j = i++) {
    const Vec2& a = poly[i];
    const Vec2& b = poly[j];
    if ((a.y() > p.y()) != (b.y() > p.y())) {
      const double x =
          a.x() + (p.y() - a.y()) * (b.x() - a.x()) / (b.y() - a.y());
      if (p.x() < x) inside = !inside;
    }
  }
  return inside;
}

BoundaryQuery QueryBoundary(const Polygon& poly, const Vec2& p) {
  BoundaryQuery q;
  double best = std::numeric_limits<double>::infinity();
  size_t best_edge = 0;
  double best_t = 0.0;
  const size_t n = poly.size();
  for (size_t i = 0; i < n; ++i) {
    const Vec2& a = poly[i];
    const Vec2& b = poly[(i + 1) % n];
    const Vec2 d = b - a;
    const double t = std::clamp((p - a).dot(d) / d.squaredNorm(), 0.0, 1.0);
    const Vec2 c = a + t * d;
    const double dist2 = (p - c).squaredNorm();
    if (dist2 < best) {
      best = dist2;
      best_edge = i;
      best_t = t;
      q.closest = c;
    }
  }
  q.distance = std::sqrt(best);
  q.inside = PointInPolygon(poly, p);
  const Vec2& a = poly[best_edge];
  const Vec2& b = poly[(best_edge + 1) % n];
  const bool at_vertex = best_t <= 0.0 || best_t >= 1.0;
  if (at_vertex && !q.inside && q.distance > 1e-12) {
    q.normal = (p - q.closest) / q.distance;
  } else if (at_vertex) {
    // Average the normals of the two edges meeting at the vertex.
    const size_t v = best_t <= 0.0 ? best_edge : (best_edge + 1) % n;
    const Vec2& prev = poly[(v + n - 1) % n];
    const Vec2& next = poly[(v + 1) % n];
    q.normal =
        (EdgeNormal(prev, poly[v]) + EdgeNormal(poly[v], next)).normalized();
  } else {
    q.normal = EdgeNormal(a, b);
  }
  return q;
}

std::vector<BoundarySample> SampleBoundary(const Polygon& poly, int n) {
  const size_t m = poly.size();
  const double total = Perimeter(poly);
  std::vector<BoundarySample> out;
  out.reserve(n);
  size_t edge = 0;
  double edge_start = 0.0;
  double edge_len = (poly[1 % m] - poly[0]).norm();
  for (int k = 0; k < n; ++k) {
    const double s = total * k / n;
    while (s > edge_start + edge_len && edge + 1 < m) {
      edge_start += edge_len;
      ++edge;
      edge_len = (poly[(edge + 1) % m] - poly[edge]).norm();
    }
    const Vec2& a = poly[edge];
    const Vec2& b = poly[(edge + 1) % m];
    const double t = edge_len > 0.0 ? (s - edge_start) / edge_len : 0.0;
    out.push_back({a + t * (b - a), EdgeNormal(a, b)});
  }
  return out;
}

Eigen::Vector3d CentralMoments(const Polygon& poly) {
  // Green's theorem integrals of x^2, y^2 and xy over the polygon.
  const Vec2 c = AreaCentroid(poly);
  double ixx = 0.0, iyy = 0.0, ixy = 0.0;
  const size_t n = poly.size();
  for (size_t i = 0; i < n; ++i) {
    const Vec2 p = poly[i] - c;
    const Vec2 q = poly[(i + 1) % n] - c;
    const double w = Cross(p, q);
    ixx += w * (p.x() * p.x() + p.x() * q.x() + q.x() * q.x());
    iyy += w * (p.y() * p.y() + p.y() * q.y() + q.y() * q.y());
    ixy += w * (p.x() * q.y() + 2 * p.x() * p.y() + 2 * q.x() * q.y() +
                q.x() * p.y());
  }
  return {ixx / 12.0, iyy / 12.0, ixy / 24.0};
}

}  // namespace resgrasp
