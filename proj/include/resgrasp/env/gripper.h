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

#ifndef RESGRASP_ENV_GRIPPER_H_
#define RESGRASP_ENV_GRIPPER_H_

#include <array>
#include <optional>

#include "resgrasp/env/geometry.h"

namespace resgrasp {

// Joint order: left proximal, left distal, right proximal, right distal.
// Angles are measured from "pointing straight down" in the gripper frame and
// are positive when the finger curls toward the other finger.
using Joints = std::array<double, 4>;

inline constexpr int kNumJoints = 4;
inline constexpr int kLeftFinger = 0;
inline constexpr int kRightFinger = 1;

struct GripperGeometry {
  double palm_half_width = 0.09;
  double proximal_length = 0.08;
  double distal_length = 0.07;
  // Depth below the base of the point reported as the hand position.
  double hand_center_depth = 0.10;
  Joints joint_lower = {-1.0, -0.4, -1.0, -0.4};
  Joints joint_upper = {0.4, 1.0, 0.4, 1.0};
};

// Mid-range configuration; this is where a zero joint action points.
Joints CanonicalJoints(const GripperGeometry& g);
// Fully opened configuration (all joints at their lower limits).
Joints OpenJoints(const GripperGeometry& g);

// Maps an action component in [-1, 1] to the joint range.
Joints JointTargetsFromAction(const GripperGeometry& g,
                              const std::array<double, 4>& action);
std::array<double, 4> ActionFromJointTargets(const GripperGeometry& g,
                                             const Joints& targets);

Joints ClampJoints(const GripperGeometry& g, const Joints& q);

Vec2 FingerAnchor(const GripperGeometry& g, int finger);
// Fingertip in the gripper frame.
Vec2 FingertipLocal(const GripperGeometry& g, int finger, double proximal,
                    double distal);
Vec2 FingertipLocal(const GripperGeometry& g, int finger, const Joints& q);
Vec2 HandCenterLocal(const GripperGeometry& g);

// Two-link inverse kinematics for one finger. Returns (proximal, distal)
// inside the joint limits or nothing when the point is unreachable.
std::optional<std::array<double, 2>> FingerIk(const GripperGeometry& g,
                                              int finger,
                                              const Vec2& target_local);

// Moves the joints toward `targets` by at most `max_delta` per joint. A
// finger stops where its tip would enter `obstacle` (when given) or drop
// below the table plane y = 0.
Joints MoveFingers(const GripperGeometry& g, const Pose2& base,
                   const Joints& current, const Joints& targets,
                   double max_delta, const Polygon* obstacle);

}  // namespace resgrasp

#endif  // RESGRASP_ENV_GRIPPER_H_
