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

#ifndef RESGRASP_ENV_GEOMETRY_H_
#define RESGRASP_ENV_GEOMETRY_H_

#include <Eigen/Dense>
#include <vector>

namespace resgrasp {

using Vec2 = Eigen::Vector2d;
using Polygon = std::vector<Vec2>;

Vec2 Rotate(const Vec2& v, double angle);

// Wraps to (-pi, pi].
double WrapAngle(double angle);

// Rigid planar transform: world = pos + R(angle) * local.
struct Pose2 {
  Vec2 pos = Vec2::Zero();
  double angle = 0.0;

  Vec2 Apply(const Vec2& local) const { return pos + Rotate(local, angle); }
  Vec2 InverseApply(const Vec2& world) const {
    return Rotate(world - pos, -angle);
  }
  Pose2 Compose(const Pose2& child) const {
    return {Apply(child.pos), WrapAngle(angle + child.angle)};
  }
  // Expresses `other` in this pose's frame.
  Pose2 Relative(const Pose2& other) const {
    return {InverseApply(other.pos), WrapAngle(other.angle - angle)};
  }
};

double SignedArea(const Polygon& poly);
Vec2 AreaCentroid(const Polygon& poly);
double Perimeter(const Polygon& poly);
Polygon TransformPolygon(const Polygon& poly, const Pose2& pose);
double MinY(const Polygon& poly);
double MaxY(const Polygon& poly);
bool IsCcw(const Polygon& poly);
// No two non-adjacent edges intersect.
bool IsSimple(const Polygon& poly);
Polygon ConvexHull(Polygon points);

// Even-odd rule; points exactly on the boundary may go either way.
bool PointInPolygon(const Polygon& poly, const Vec2& p);

struct BoundaryQuery {
  Vec2 closest = Vec2::Zero();
  Vec2 normal = Vec2::Zero();  // outward
  double distance = 0.0;       // unsigned distance to the boundary
  bool inside = false;
};

// Closest boundary point of a CCW polygon and the outward normal there.
BoundaryQuery QueryBoundary(const Polygon& poly, const Vec2& p);

struct BoundarySample {
  Vec2 point;
  Vec2 normal;
};

// `n` points spaced evenly by arc length, starting at vertex 0.
std::vector<BoundarySample> SampleBoundary(const Polygon& poly, int n);

// Second-order central area moments (mu20, mu02, mu11) about the centroid.
Eigen::Vector3d CentralMoments(const Polygon& poly);

}  // namespace resgrasp

#endif  // RESGRASP_ENV_GEOMETRY_H_
