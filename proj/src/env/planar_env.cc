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

#include "resgrasp/env/planar_env.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "resgrasp/numerics/errors.h"
#include "resgrasp/numerics/rng.h"

namespace resgrasp {
namespace {

constexpr int kBaseBisectionIters = 20;
constexpr int kBaseSubSteps = 4;

double Clamp1(double x) { return std::clamp(x, -1.0, 1.0); }

}  // namespace

Action Action::FromVector(const Vector& v) {
  if (v.size() != kActionDim) {
    throw DimensionError("Action::FromVector: expected 7 components");
  }
  Action a;
  for (int i = 0; i < 4; ++i) a.joint_targets[i] = v[i];
  for (int i = 0; i < 3; ++i) a.wrench[i] = v[4 + i];
  return a;
}

Vector Action::ToVector() const {
  Vector v(kActionDim);
  for (int i = 0; i < 4; ++i) v[i] = joint_targets[i];
  for (int i = 0; i < 3; ++i) v[4 + i] = wrench[i];
  return v;
}

Action Action::Clipped() const {
  Action a;
  for (int i = 0; i < 4; ++i) a.joint_targets[i] = Clamp1(joint_targets[i]);
  for (int i = 0; i < 3; ++i) a.wrench[i] = Clamp1(wrench[i]);
  return a;
}

bool Action::AllFinite() const {
  for (double x : joint_targets) {
    if (!std::isfinite(x)) return false;
  }
  for (double x : wrench) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

int ObsLayerSize(ObsLayer layer, int point_cloud_size) {
  switch (layer) {
    case ObsLayer::kProprio:
      return kProprioSize;
    case ObsLayer::kObjectPos:
      return 3;
    case ObsLayer::kObjectRot:
      return 4;
    case ObsLayer::kObjectCode:
      return kShapeCodeSize;
    case ObsLayer::kPointCloud:
      return 2 * point_cloud_size;
    case ObsLayer::kPrevAction:
      return kActionDim;
    case ObsLayer::kTargetPos:
      return 3;
  }
  return 0;
}

const char* ObsLayerName(ObsLayer layer) {
  switch (layer) {
    case ObsLayer::kProprio:
      return "proprio";
    case ObsLayer::kObjectPos:
      return "object_pos";
    case ObsLayer::kObjectRot:
      return "object_rot";
    case ObsLayer::kObjectCode:
      return "object_code";
    case ObsLayer::kPointCloud:
      return "point_cloud";
    case ObsLayer::kPrevAction:
      return "prev_action";
    case ObsLayer::kTargetPos:
      return "target_pos";
  }
  return "unknown";
}

PlanarGraspEnv::PlanarGraspEnv(EnvConfig cfg) : cfg_(std::move(cfg)) {}

Vec2 PlanarGraspEnv::ObjectRestPosition(double x) const {
  return {x, object_.RestHeight()};
}

Polygon PlanarGraspEnv::ObjectWorldPolygon() const {
  return TransformPolygon(object_.vertices, state_.object_pose());
}

Observation PlanarGraspEnv::Reset(const ObjectShape& object, uint64_t seed,
                                  int env_index) {
  object_ = object;
  has_object_ = true;
  Rng rng(seed, static_cast<uint64_t>(env_index));
  const double x = rng.Uniform(-cfg_.object_x_range, cfg_.object_x_range);

  state_ = EnvState{};
  // Dropped from object_drop_height; the quasi-static model settles it at
  // once with its lowest vertex on the table.
  state_.object_pos = ObjectRestPosition(x);
  state_.object_angle = 0.0;

  GripperState& g = state_.gripper;
  g.joints = CanonicalJoints(cfg_.gripper);
  g.joint_targets = g.joints;
  const double lowest_tip =
      std::min(FingertipLocal(cfg_.gripper, kLeftFinger, g.joints).y(),
               FingertipLocal(cfg_.gripper, kRightFinger, g.joints).y());
  g.base_pos = Vec2(0.0, cfg_.start_clearance - lowest_tip);
  g.base_angle = 0.0;
  g.base_vel.setZero();
  state_.prev_action = Action::Zero();
  RefreshDerived();
  UpdateContacts();
  return Observe();
}

void PlanarGraspEnv::SetState(const EnvState& state) {
  state_ = state;
  RefreshDerived();
}

void PlanarGraspEnv::RefreshDerived() {
  const Pose2 base = state_.gripper.pose();
  for (int f = 0; f < 2; ++f) {
    state_.fingertips[f] =
        base.Apply(FingertipLocal(cfg_.gripper, f, state_.gripper.joints));
  }
  state_.hand_center = base.Apply(HandCenterLocal(cfg_.gripper));
}

bool PlanarGraspEnv::BaseFeasible(const Pose2& base, bool ignore_object) const {
  if (base.pos.y() < cfg_.min_base_height) return false;
  std::array<Vec2, 2> tips;
  for (int f = 0; f < 2; ++f) {
    tips[f] =
        base.Apply(FingertipLocal(cfg_.gripper, f, state_.gripper.joints));
    if (tips[f].y() < 0.0) return false;
  }
  if (state_.attached) {
    const Pose2 obj = base.Compose(state_.object_in_gripper);
    return MinY(TransformPolygon(object_.vertices, obj)) >= 0.0;
  }
  if (ignore_object) return true;
  const Polygon world = ObjectWorldPolygon();
  for (const Vec2& tip : tips) {
    if (PointInPolygon(world, tip)) return false;
  }
  return true;
}

bool PlanarGraspEnv::Squeezing(double margin) const {
  const Pose2 base = state_.gripper.pose();
  const Vec2 tip0 = state_.fingertips[0];
  const Vec2 tip1 = state_.fingertips[1];
  const double gap = (tip1 - tip0).norm();
  if (gap <= 1e-9) return false;
  const Vec2 u = (tip1 - tip0) / gap;
  const Joints& targets = state_.gripper.joint_targets;
  const Vec2 cmd0 =
      base.Apply(FingertipLocal(cfg_.gripper, kLeftFinger, targets));
  const Vec2 cmd1 =
      base.Apply(FingertipLocal(cfg_.gripper, kRightFinger, targets));
  return (cmd0 - tip0).dot(u) > -margin && (tip1 - cmd1).dot(u) > -margin &&
         (cmd1 - cmd0).dot(u) < gap + 2.0 * margin;
}

void PlanarGraspEnv::UpdateContacts() {
  const Polygon world = ObjectWorldPolygon();
  const Pose2 base = state_.gripper.pose();
  std::array<BoundaryQuery, 2> q;
  for (int f = 0; f < 2; ++f) {
    q[f] = QueryBoundary(world, state_.fingertips[f]);
    state_.contacts[f] = !q[f].inside && q[f].distance <= cfg_.contact_eps;
    state_.contact_forces[f] = 0.0;
  }
  const Vec2 tip0 = state_.fingertips[0];
  const Vec2 tip1 = state_.fingertips[1];
  const double gap = (tip1 - tip0).norm();
  bool grip = false;
  if (gap > 1e-9) {
    const Vec2 u = (tip1 - tip0) / gap;
    const Joints& targets = state_.gripper.joint_targets;
    const Vec2 cmd0 =
        base.Apply(FingertipLocal(cfg_.gripper, kLeftFinger, targets));
    const Vec2 cmd1 =
        base.Apply(FingertipLocal(cfg_.gripper, kRightFinger, targets));
    // Squeeze: how far each commanded tip lies past the actual one, toward
    // the other finger.
    const double squeeze0 = (cmd0 - tip0).dot(u);
    const double squeeze1 = (tip1 - cmd1).dot(u);
    if (state_.contacts[0]) {
      state_.contact_forces[0] = cfg_.grip_stiffness * std::max(0.0, squeeze0);
    }
    if (state_.contacts[1]) {
      state_.contact_forces[1] = cfg_.grip_stiffness * std::max(0.0, squeeze1);
    }
    const double commanded_gap = (cmd1 - cmd0).dot(u);
    const double cos_friction = std::cos(cfg_.friction_angle);
    if (state_.attached) {
      // A held object stays held until the grip is relaxed by more than the
      // release margin; the friction cone only gates acquisition.
      grip = state_.contacts[0] && state_.contacts[1] &&
             Squeezing(cfg_.release_margin);
    } else {
      grip = state_.contacts[0] && state_.contacts[1] && commanded_gap < gap &&
             state_.contact_forces[0] > 0.0 && state_.contact_forces[1] > 0.0 &&
             q[0].normal.dot(-u) >= cos_friction &&
             q[1].normal.dot(u) >= cos_friction;
    }
  }
  if (grip && !state_.attached) {
    state_.attached = true;
    state_.object_in_gripper = base.Relative(state_.object_pose());
  } else if (!grip && state_.attached) {
    state_.attached = false;
    // Released objects fall onto the table and settle back on their base.
    state_.object_pos = ObjectRestPosition(state_.object_pos.x());
    state_.object_angle = 0.0;
  }
}

StepResult PlanarGraspEnv::Step(const Action& action) {
  if (!has_object_) throw std::logic_error("Step called before Reset");
  if (state_.done) throw std::logic_error("Step called after episode end");
  if (!action.AllFinite()) throw NumericError("Step: non-finite action");

  const Action a = action.Clipped();
  GripperState& g = state_.gripper;
  // Joint targets follow the command through a first-order filter.
  const Joints commanded =
      JointTargetsFromAction(cfg_.gripper, a.joint_targets);
  for (size_t j = 0; j < commanded.size(); ++j) {
    g.joint_targets[j] = cfg_.target_smoothing * commanded[j] +
                         (1.0 - cfg_.target_smoothing) * g.joint_targets[j];
  }

  // Damped velocity integration of the wrench.
  for (int i = 0; i < 2; ++i) {
    g.base_vel[i] = std::clamp(
        cfg_.linear_damping * g.base_vel[i] + cfg_.linear_gain * a.wrench[i],
        -cfg_.max_linear_speed, cfg_.max_linear_speed);
  }
  g.base_vel[2] = std::clamp(
      cfg_.angular_damping * g.base_vel[2] + cfg_.angular_gain * a.wrench[2],
      -cfg_.max_angular_speed, cfg_.max_angular_speed);

  const Pose2 from = g.pose();
  Pose2 to{from.pos + g.base_vel.head<2>(), from.angle + g.base_vel[2]};
  to.pos.x() = std::clamp(to.pos.x(), -cfg_.workspace_half_width,
                          cfg_.workspace_half_width);
  to.pos.y() = std::min(to.pos.y(), cfg_.workspace_top);
  to.angle = std::clamp(to.angle, -cfg_.max_tilt, cfg_.max_tilt);

  bool ignore_object = false;
  if (!state_.attached) {
    const Polygon world = ObjectWorldPolygon();
    for (const Vec2& tip : state_.fingertips) {
      ignore_object = ignore_object || PointInPolygon(world, tip);
    }
  }
  auto lerp = [&](double s) {
    return Pose2{from.pos + s * (to.pos - from.pos),
                 from.angle + s * (to.angle - from.angle)};
  };
  double s = 1.0;
  if (BaseFeasible(from, ignore_object)) {
    for (int k = 1; k <= kBaseSubSteps; ++k) {
      const double hi_s = static_cast<double>(k) / kBaseSubSteps;
      if (BaseFeasible(lerp(hi_s), ignore_object)) continue;
      double lo = static_cast<double>(k - 1) / kBaseSubSteps, hi = hi_s;
      for (int it = 0; it < kBaseBisectionIters; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (BaseFeasible(lerp(mid), ignore_object)) {
          lo = mid;
        } else {
          hi = mid;
        }
      }
      s = lo;
      break;
    }
  } else if (!BaseFeasible(to, ignore_object)) {
    s = 0.0;
  }
  const Pose2 moved = lerp(s);
  // Velocity reflects the motion actually achieved.
  g.base_vel.head<2>() = moved.pos - from.pos;
  g.base_vel[2] = moved.angle - from.angle;
  g.base_pos = moved.pos;
  g.base_angle = moved.angle;
  if (state_.attached) {
    const Pose2 obj = moved.Compose(state_.object_in_gripper);
    state_.object_pos = obj.pos;
    state_.object_angle = obj.angle;
  }

  RefreshDerived();
  // A held object blocks the fingers for as long as both keep squeezing, so
  // the joints only move once the grip is relaxed.
  if (!(state_.attached && Squeezing(cfg_.release_margin))) {
    const Polygon world = ObjectWorldPolygon();
    g.joints = MoveFingers(cfg_.gripper, moved, g.joints, g.joint_targets,
                           cfg_.max_joint_delta, &world);
    RefreshDerived();
  }
  UpdateContacts();

  state_.prev_action = a;
  state_.t += 1;
  if (DistanceToTarget(state_, cfg_) <= cfg_.success_radius) {
    state_.success = true;
  }
  state_.done = state_.t >= cfg_.episode_length;
  return {Observe(), state_, state_.done};
}

Observation PlanarGraspEnv::Observe() const {
  const double clip = cfg_.obs_clip;
  auto pos = [&](const Vec2& p) {
    return Vec2((p - cfg_.obs_center) / cfg_.pos_scale);
  };
  Observation obs;
  const GripperState& g = state_.gripper;

  Vector proprio(kProprioSize);
  const Vec2 base = pos(g.base_pos);
  proprio << base.x(), base.y(), g.base_angle,
      g.base_vel[0] / cfg_.max_linear_speed,
      g.base_vel[1] / cfg_.max_linear_speed,
      g.base_vel[2] / cfg_.max_angular_speed, g.joints[0], g.joints[1],
      g.joints[2], g.joints[3], 0, 0, 0, 0,
      state_.contact_forces[0] / cfg_.force_scale,
      state_.contact_forces[1] / cfg_.force_scale;
  for (int f = 0; f < 2; ++f) {
    const Vec2 tip = pos(state_.fingertips[f]);
    proprio[10 + 2 * f] = tip.x();
    proprio[11 + 2 * f] = tip.y();
  }
  obs.layer(ObsLayer::kProprio) = proprio;

  const Vec2 op = pos(state_.object_pos);
  obs.layer(ObsLayer::kObjectPos) = Eigen::Vector3d(op.x(), op.y(), 0.0);
  const double half = 0.5 * state_.object_angle;
  obs.layer(ObsLayer::kObjectRot) =
      Eigen::Vector4d(std::cos(half), 0.0, 0.0, std::sin(half));

  Vector code(kShapeCodeSize);
  for (int i = 0; i < kShapeCodeSize; ++i) code[i] = object_.code[i];
  obs.layer(ObsLayer::kObjectCode) = code;

  const Pose2 obj = state_.object_pose();
  Vector cloud(2 * object_.point_cloud.size());
  for (size_t i = 0; i < object_.point_cloud.size(); ++i) {
    const Vec2 p = pos(obj.Apply(object_.point_cloud[i]));
    cloud[2 * i] = p.x();
    cloud[2 * i + 1] = p.y();
  }
  obs.layer(ObsLayer::kPointCloud) = cloud;
  obs.layer(ObsLayer::kPrevAction) = state_.prev_action.ToVector();
  const Vec2 tp = pos(cfg_.target);
  obs.layer(ObsLayer::kTargetPos) = Eigen::Vector3d(tp.x(), tp.y(), 0.0);

  for (Vector& l : obs.layers) l = l.cwiseMax(-clip).cwiseMin(clip);
  return obs;
}

GraspPose CurrentGraspPose(const EnvState& state) {
  const Pose2 rel = state.object_pose().Relative(state.gripper.pose());
  return {rel.angle, rel.pos, state.gripper.joints};
}

bool IsSuccess(const EnvState& state) { return state.success; }

double DistanceToTarget(const EnvState& state, const EnvConfig& cfg) {
  return (state.object_pos - cfg.target).norm();
}

}  // namespace resgrasp
