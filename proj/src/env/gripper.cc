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

#include "resgrasp/env/gripper.h"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace resgrasp {
namespace {

constexpr int kBisectionIters = 20;
constexpr int kSubSteps = 8;

// Unit direction of a link at absolute angle `phi` for the given finger.
Vec2 LinkDirection(int finger, double phi) {
  const double s = std::sin(phi);
  return {finger == kLeftFinger ? s : -s, -std::cos(phi)};
}

bool TipFree(const Vec2& tip_world, const Polygon* obstacle) {
  if (tip_world.y() < 0.0) return false;
  return obstacle == nullptr || !PointInPolygon(*obstacle, tip_world);
}

}  // namespace

Joints CanonicalJoints(const GripperGeometry& g) {
  Joints q;
  for (int j = 0; j < kNumJoints; ++j) {
    q[j] = 0.5 * (g.joint_lower[j] + g.joint_upper[j]);
  }
  return q;
}

Joints OpenJoints(const GripperGeometry& g) { return g.joint_lower; }

Joints JointTargetsFromAction(const GripperGeometry& g,
                              const std::array<double, 4>& action) {
  Joints q;
  for (int j = 0; j < kNumJoints; ++j) {
    const double a = std::clamp(action[j], -1.0, 1.0);
    q[j] = g.joint_lower[j] +
           0.5 * (a + 1.0) * (g.joint_upper[j] - g.joint_lower[j]);
  }
  return q;
}

std::array<double, 4> ActionFromJointTargets(const GripperGeometry& g,
                                             const Joints& targets) {
  std::array<double, 4> a;
  for (int j = 0; j < kNumJoints; ++j) {
    a[j] = 2.0 * (targets[j] - g.joint_lower[j]) /
               (g.joint_upper[j] - g.joint_lower[j]) -
           1.0;
    a[j] = std::clamp(a[j], -1.0, 1.0);
  }
  return a;
}

Joints ClampJoints(const GripperGeometry& g, const Joints& q) {
  Joints out;
  for (int j = 0; j < kNumJoints; ++j) {
    out[j] = std::clamp(q[j], g.joint_lower[j], g.joint_upper[j]);
  }
  return out;
}

Vec2 FingerAnchor(const GripperGeometry& g, int finger) {
  return {finger == kLeftFinger ? -g.palm_half_width : g.palm_half_width, 0.0};
}

Vec2 FingertipLocal(const GripperGeometry& g, int finger, double proximal,
                    double distal) {
  return FingerAnchor(g, finger) +
         g.proximal_length * LinkDirection(finger, proximal) +
         g.distal_length * LinkDirection(finger, proximal + distal);
}

Vec2 FingertipLocal(const GripperGeometry& g, int finger, const Joints& q) {
  return FingertipLocal(g, finger, q[2 * finger], q[2 * finger + 1]);
}

Vec2 HandCenterLocal(const GripperGeometry& g) {
  return {0.0, -g.hand_center_depth};
}

std::optional<std::array<double, 2>> FingerIk(const GripperGeometry& g,
                                              int finger,
                                              const Vec2& target_local) {
  // Solve in the left finger's convention by mirroring the right finger.
  Vec2 r = target_local - FingerAnchor(g, finger);
  if (finger == kRightFinger) r.x() = -r.x();
  const double l1 = g.proximal_length;
  const double l2 = g.distal_length;
  const double c = (r.squaredNorm() - l1 * l1 - l2 * l2) / (2.0 * l1 * l2);
  if (c < -1.0 || c > 1.0) return std::nullopt;
  const double base = std::atan2(r.y(), r.x()) + 0.5 * std::numbers::pi;
  std::optional<std::array<double, 2>> best;
  // Prefer the inward-curling branch (positive distal angle).
  for (double sign : {1.0, -1.0}) {
    const double distal = sign * std::acos(c);
    const double proximal = WrapAngle(
        base - std::atan2(l2 * std::sin(distal), l1 + l2 * std::cos(distal)));
    const int j = 2 * finger;
    if (proximal >= g.joint_lower[j] && proximal <= g.joint_upper[j] &&
        distal >= g.joint_lower[j + 1] && distal <= g.joint_upper[j + 1]) {
      best = std::array<double, 2>{proximal, distal};
      break;
    }
  }
  return best;
}

Joints MoveFingers(const GripperGeometry& g, const Pose2& base,
                   const Joints& current, const Joints& targets,
                   double max_delta, const Polygon* obstacle) {
  Joints out = current;
  for (int f = 0; f < 2; ++f) {
    const int j = 2 * f;
    const std::array<double, 2> from = {current[j], current[j + 1]};
    std::array<double, 2> to;
    for (int k = 0; k < 2; ++k) {
      const double target = std::clamp(targets[j + k], g.joint_lower[j + k],
                                       g.joint_upper[j + k]);
      to[k] = from[k] + std::clamp(target - from[k], -max_delta, max_delta);
    }
    auto tip_at = [&](double s) {
      return base.Apply(FingertipLocal(g, f, from[0] + s * (to[0] - from[0]),
                                       from[1] + s * (to[1] - from[1])));
    };
    // A tip that already starts blocked may move freely so it can escape.
    // Otherwise walk the joint path in sub-steps (so a tip cannot tunnel
    // through a thin feature) and bisect inside the first blocked one.
    double s = 1.0;
    if (TipFree(tip_at(0.0), obstacle)) {
      for (int k = 1; k <= kSubSteps; ++k) {
        const double hi_s = static_cast<double>(k) / kSubSteps;
        if (TipFree(tip_at(hi_s), obstacle)) continue;
        double lo = static_cast<double>(k - 1) / kSubSteps, hi = hi_s;
        for (int it = 0; it < kBisectionIters; ++it) {
          const double mid = 0.5 * (lo + hi);
          if (TipFree(tip_at(mid), obstacle)) {
            lo = mid;
          } else {
            hi = mid;
          }
        }
        s = lo;
        break;
      }
    }
    out[j] = from[0] + s * (to[0] - from[0]);
    out[j + 1] = from[1] + s * (to[1] - from[1]);
  }
  return out;
}

}  // namespace resgrasp
