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

#include "resgrasp/env/shapes.h"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace resgrasp {
namespace {

constexpr double kPi = std::numbers::pi;

// (reference, scale) pairs used to standardize the shape code.
constexpr std::array<std::array<double, 2>, kShapeCodeSize> kCodeNorm = {{
    {0.012, 0.008},  // area
    {0.40, 0.12},    // perimeter
    {1.5, 0.5},      // aspect ratio
    {0.10, 0.05},    // eta20
    {0.10, 0.05},    // eta02
    {0.0, 0.02},     // eta11
    {0.92, 0.08},    // convexity
    {0.06, 0.02},    // mean radius
}};

Polygon EllipsePolygon(double a, double b, int n) {
  Polygon p;
  for (int i = 0; i < n; ++i) {
    const double t = 2.0 * kPi * i / n;
    p.emplace_back(a * std::cos(t), b * std::sin(t));
  }
  return p;
}

Polygon StarPolygon(int lobes, double amplitude, double phase, int n) {
  Polygon p;
  for (int i = 0; i < n; ++i) {
    const double t = 2.0 * kPi * i / n;
    const double r = 1.0 + amplitude * std::cos(lobes * t + phase);
    p.emplace_back(r * std::cos(t), r * std::sin(t));
  }
  return p;
}

Polygon CapsulePolygon(double half_body, int cap_points) {
  Polygon p;
  // Right cap from -90 to +90 degrees, then the left cap.
  for (int i = 0; i < cap_points; ++i) {
    const double t = -0.5 * kPi + kPi * i / (cap_points - 1);
    p.emplace_back(half_body + std::cos(t), std::sin(t));
  }
  for (int i = 0; i < cap_points; ++i) {
    const double t = 0.5 * kPi + kPi * i / (cap_points - 1);
    p.emplace_back(-half_body + std::cos(t), std::sin(t));
  }
  return p;
}

Polygon Scaled(const Polygon& poly, double s) {
  Polygon out;
  for (const Vec2& v : poly) out.push_back(s * v);
  return out;
}

Polygon Centered(const Polygon& poly) {
  const Vec2 c = AreaCentroid(poly);
  Polygon out;
  for (const Vec2& v : poly) out.push_back(v - c);
  return out;
}

}  // namespace

const char* CategoryName(ShapeCategory c) {
  switch (c) {
    case ShapeCategory::kEllipse:
      return "ellipse";
    case ShapeCategory::kBox:
      return "box";
    case ShapeCategory::kLShape:
      return "l_shape";
    case ShapeCategory::kStar:
      return "star";
    case ShapeCategory::kCapsule:
      return "capsule";
  }
  return "unknown";
}

double AspectRatio(const Polygon& poly) {
  const Eigen::Vector3d m = CentralMoments(poly);
  Eigen::Matrix2d cov;
  cov << m[0], m[2], m[2], m[1];
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(cov);
  const double lo = std::max(es.eigenvalues()[0], 1e-300);
  return std::sqrt(es.eigenvalues()[1] / lo);
}

double MeanRadius(const Polygon& poly) {
  const Vec2 c = AreaCentroid(poly);
  const auto samples = SampleBoundary(poly, 256);
  double sum = 0.0;
  for (const auto& s : samples) sum += (s.point - c).norm();
  return sum / samples.size();
}

std::array<double, kShapeCodeSize> ComputeShapeCode(const Polygon& poly) {
  const double area = SignedArea(poly);
  const Eigen::Vector3d mu = CentralMoments(poly);
  const double a2 = area * area;
  const std::array<double, kShapeCodeSize> raw = {
      area,
      Perimeter(poly),
      AspectRatio(poly),
      mu[0] / a2,
      mu[1] / a2,
      mu[2] / a2,
      area / SignedArea(ConvexHull(poly)),
      MeanRadius(poly),
  };
  std::array<double, kShapeCodeSize> code;
  for (int i = 0; i < kShapeCodeSize; ++i) {
    code[i] = (raw[i] - kCodeNorm[i][0]) / kCodeNorm[i][1];
  }
  return code;
}

double ObjectShape::CharacteristicRadius() const {
  return MeanRadius(vertices);
}

double ObjectShape::Width() const {
  double lo = vertices.front().x(), hi = lo;
  for (const Vec2& v : vertices) {
    lo = std::min(lo, v.x());
    hi = std::max(hi, v.x());
  }
  return hi - lo;
}

ObjectShape ShapeFromPolygon(int id, ShapeCategory category, Polygon poly,
                             int point_cloud_size) {
  ObjectShape s;
  s.id = id;
  s.category = category;
  s.vertices = Centered(poly);
  s.code = ComputeShapeCode(s.vertices);
  for (const auto& b : SampleBoundary(s.vertices, point_cloud_size)) {
    s.point_cloud.push_back(b.point);
  }
  return s;
}

ObjectShape MakeShape(int id, ShapeCategory category, Rng& rng,
                      const ShapeLimits& limits) {
  Polygon unit;
  switch (category) {
    case ShapeCategory::kEllipse: {
      const double aspect = rng.Uniform(1.0, 1.8);
      unit = EllipsePolygon(std::sqrt(aspect), 1.0 / std::sqrt(aspect), 24);
      break;
    }
    case ShapeCategory::kBox: {
      const double aspect = rng.Uniform(0.7, 2.2);
      const double w = std::sqrt(aspect), h = 1.0 / std::sqrt(aspect);
      unit = {{0, 0}, {w, 0}, {w, h}, {0, h}};
      break;
    }
    case ShapeCategory::kLShape: {
      const double aspect = rng.Uniform(0.8, 1.6);
      const double w = std::sqrt(aspect), h = 1.0 / std::sqrt(aspect);
      const double cx = rng.Uniform(0.35, 0.55), cy = rng.Uniform(0.35, 0.55);
      unit = {{0, 0},
              {w, 0},
              {w, h * (1 - cy)},
              {w * (1 - cx), h * (1 - cy)},
              {w * (1 - cx), h},
              {0, h}};
      break;
    }
    case ShapeCategory::kStar: {
      const int lobes = 5 + rng.UniformInt(3);
      const double amplitude = rng.Uniform(0.10, 0.22);
      const double phase = rng.Uniform(0.0, 2.0 * kPi);
      unit = StarPolygon(lobes, amplitude, phase, 8 * lobes);
      break;
    }
    case ShapeCategory::kCapsule: {
      const double half_body = rng.Uniform(0.3, 1.0);
      unit = CapsulePolygon(half_body, 10);
      break;
    }
  }
  unit = Centered(unit);
  const double target = rng.Uniform(limits.min_radius, limits.max_radius);
  double scale = target / MeanRadius(unit);
  Polygon poly = Scaled(unit, scale);
  // Keep the object inside the gripper's reach.
  ObjectShape probe;
  probe.vertices = poly;
  const double shrink = std::min({1.0, limits.max_width / probe.Width(),
                                  limits.max_height / probe.Height()});
  poly = Scaled(poly, shrink);
  if (MeanRadius(poly) < limits.min_radius) {
    poly = Scaled(poly, limits.min_radius / MeanRadius(poly));
  }
  return ShapeFromPolygon(id, category, std::move(poly),
                          limits.point_cloud_size);
}

}  // namespace resgrasp
