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

#ifndef RESGRASP_ENV_SHAPES_H_
#define RESGRASP_ENV_SHAPES_H_

#include <array>
#include <string>
#include <vector>

#include "resgrasp/env/geometry.h"
#include "resgrasp/env/gripper.h"
#include "resgrasp/numerics/rng.h"

namespace resgrasp {

enum class ShapeCategory : int {
  kEllipse = 0,
  kBox = 1,
  kLShape = 2,
  kStar = 3,
  kCapsule = 4,
};
inline constexpr int kNumShapeCategories = 5;
const char* CategoryName(ShapeCategory c);

inline constexpr int kShapeCodeSize = 8;
inline constexpr int kDefaultPointCloudSize = 32;

// Target grasp expressed relative to the object frame: the wrist rotation and
// offset of the gripper base, plus the finger joints at contact.
struct GraspProposal {
  double wrist_rot = 0.0;
  Vec2 wrist_offset = Vec2::Zero();
  Joints joint_targets = {0, 0, 0, 0};
};

// A procedurally generated planar object. Vertices and point cloud live in
// the object frame: area centroid at the origin, orientation as it rests on
// the table at angle zero.
struct ObjectShape {
  int id = 0;
  ShapeCategory category = ShapeCategory::kEllipse;
  Polygon vertices;
  std::array<double, kShapeCodeSize> code{};
  std::vector<Vec2> point_cloud;
  GraspProposal proposal;

  // Mean centroid-to-boundary distance.
  double CharacteristicRadius() const;
  // Height of the centroid above the table when resting at angle zero.
  double RestHeight() const { return -MinY(vertices); }
  double Width() const;
  double Height() const { return MaxY(vertices) - MinY(vertices); }
};

// Shape features: area, perimeter, aspect ratio, normalized central moments
// (eta20, eta02, eta11), convexity ratio, mean radius. Each is standardized
// with fixed constants so typical objects land near [-2, 2].
std::array<double, kShapeCodeSize> ComputeShapeCode(const Polygon& poly);

// sqrt of the ratio of principal second moments (>= 1).
double AspectRatio(const Polygon& poly);
double MeanRadius(const Polygon& poly);

struct ShapeLimits {
  double min_radius = 0.035;
  double max_radius = 0.085;
  double max_width = 0.20;
  double max_height = 0.16;
  int point_cloud_size = kDefaultPointCloudSize;
};

// Builds the outline, code and point cloud for one object of `category`.
// The proposal is left empty; see SynthesizeProposal.
ObjectShape MakeShape(int id, ShapeCategory category, Rng& rng,
                      const ShapeLimits& limits = {});

// Re-centres an arbitrary CCW polygon and fills code and point cloud.
ObjectShape ShapeFromPolygon(int id, ShapeCategory category, Polygon poly,
                             int point_cloud_size = kDefaultPointCloudSize);

}  // namespace resgrasp

#endif  // RESGRASP_ENV_SHAPES_H_
