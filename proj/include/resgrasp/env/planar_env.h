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

#ifndef RESGRASP_ENV_PLANAR_ENV_H_
#define RESGRASP_ENV_PLANAR_ENV_H_

#include <array>
#include <cstdint>

#include "resgrasp/env/geometry.h"
#include "resgrasp/env/gripper.h"
#include "resgrasp/env/shapes.h"
#include "resgrasp/numerics/matrix.h"

namespace resgrasp {

inline constexpr int kActionDim = 7;

// Joint targets (scaled to joint ranges) followed by the planar wrench
// (force x, force y, torque). Every component lives in [-1, 1].
struct Action {
  std::array<double, 4> joint_targets{};
  std::array<double, 3> wrench{};

  static Action Zero() { return {}; }
  static Action FromVector(const Vector& v);
  Vector ToVector() const;
  Action Clipped() const;
  bool AllFinite() const;
  // Scaled vertical force applied at the base.
  double az() const { return wrench[1]; }
};

struct EnvConfig {
  GripperGeometry gripper;
  int episode_length = 100;
  double max_joint_delta = 0.15;
  // Weight of the new command in the joint-target filter; 1 disables it.
  double target_smoothing = 0.3;
  // Base velocity update per step: v <- damping * v + gain * wrench.
  double linear_damping = 0.5;
  double linear_gain = 0.015;
  double max_linear_speed = 0.03;
  double angular_damping = 0.5;
  double angular_gain = 0.04;
  double max_angular_speed = 0.08;
  double max_tilt = 0.8;
  double workspace_half_width = 0.35;
  double workspace_top = 0.65;
  double min_base_height = 0.02;
  double contact_eps = 0.005;
  // Half-angle of the friction cone used by the attach rule.
  double friction_angle = 0.7;
  double grip_stiffness = 10.0;
  // How far a commanded fingertip may back off before a held object slips.
  double release_margin = 0.04;
  double success_radius = 0.05;
  Vec2 target = Vec2(0.0, 0.20);
  // Height of the lowest fingertip above the table at reset.
  double start_clearance = 0.20;
  double object_drop_height = 0.10;
  double object_x_range = 0.02;
  // Observation normalization: positions become (p - obs_center) / pos_scale.
  Vec2 obs_center = Vec2(0.0, 0.20);
  double pos_scale = 0.1;
  double force_scale = 1.0;
  double obs_clip = 5.0;
  int point_cloud_size = kDefaultPointCloudSize;
};

struct GripperState {
  Vec2 base_pos = Vec2::Zero();
  double base_angle = 0.0;
  Eigen::Vector3d base_vel = Eigen::Vector3d::Zero();  // vx, vy, omega
  Joints joints{};
  Joints joint_targets{};

  Pose2 pose() const { return {base_pos, base_angle}; }
};

struct EnvState {
  GripperState gripper;
  Vec2 object_pos = Vec2::Zero();
  double object_angle = 0.0;
  bool attached = false;
  // Object pose in the gripper frame while attached.
  Pose2 object_in_gripper;
  std::array<bool, 2> contacts{};
  std::array<double, 2> contact_forces{};
  std::array<Vec2, 2> fingertips{Vec2::Zero(), Vec2::Zero()};
  Vec2 hand_center = Vec2::Zero();
  int t = 0;
  Action prev_action;
  bool success = false;  // latched once the object reaches the target
  bool done = false;

  Pose2 object_pose() const { return {object_pos, object_angle}; }
};

// Observation layers in their fixed concatenation order.
enum class ObsLayer : int {
  kProprio = 0,
  kObjectPos,
  kObjectRot,
  kObjectCode,
  kPointCloud,
  kPrevAction,
  kTargetPos,
};
inline constexpr int kNumObsLayers = 7;
inline constexpr int kProprioSize = 16;

int ObsLayerSize(ObsLayer layer, int point_cloud_size = kDefaultPointCloudSize);
const char* ObsLayerName(ObsLayer layer);

struct Observation {
  std::array<Vector, kNumObsLayers> layers;

  const Vector& layer(ObsLayer l) const { return layers[static_cast<int>(l)]; }
  Vector& layer(ObsLayer l) { return layers[static_cast<int>(l)]; }
  const Vector& proprio() const { return layer(ObsLayer::kProprio); }
  const Vector& object_pos() const { return layer(ObsLayer::kObjectPos); }
  const Vector& object_rot() const { return layer(ObsLayer::kObjectRot); }
  const Vector& object_code() const { return layer(ObsLayer::kObjectCode); }
  const Vector& point_cloud() const { return layer(ObsLayer::kPointCloud); }
  const Vector& prev_action() const { return layer(ObsLayer::kPrevAction); }
  const Vector& target_pos() const { return layer(ObsLayer::kTargetPos); }
};

struct StepResult {
  Observation observation;
  EnvState state;
  bool done = false;
};

// Planar two-finger grasping task. Quasi-static: joints track their targets
// at a bounded rate, the base integrates the wrench as a damped velocity, and
// the object is either resting on the table or rigidly attached to the hand.
class PlanarGraspEnv {
 public:
  explicit PlanarGraspEnv(EnvConfig cfg = {});

  // The object's x is drawn within +/- object_x_range from the
  // (seed, env_index) stream; everything else is canonical.
  Observation Reset(const ObjectShape& object, uint64_t seed,
                    int env_index = 0);
  StepResult Step(const Action& action);

  Observation Observe() const;
  const EnvState& state() const { return state_; }
  const ObjectShape& object() const { return object_; }
  const EnvConfig& config() const { return cfg_; }

  // World-frame object outline for the current state.
  Polygon ObjectWorldPolygon() const;
  Vec2 ObjectRestPosition(double x) const;

  // Overwrites the state (scripted tests); derived fields are refreshed.
  void SetState(const EnvState& state);

 private:
  bool BaseFeasible(const Pose2& base, bool ignore_object) const;
  // Whether the commanded joint targets press both fingertips toward each
  // other, allowing each to back off by up to `margin`.
  bool Squeezing(double margin) const;
  void UpdateContacts();
  void RefreshDerived();

  EnvConfig cfg_;
  ObjectShape object_;
  EnvState state_;
  bool has_object_ = false;
};

// The gripper's wrist rotation and offset expressed in the object frame plus
// its current joints: the g_t that proposal distances compare against.
struct GraspPose {
  double wrist_rot = 0.0;
  Vec2 wrist_offset = Vec2::Zero();
  Joints joints{};
};
GraspPose CurrentGraspPose(const EnvState& state);

bool IsSuccess(const EnvState& state);
double DistanceToTarget(const EnvState& state, const EnvConfig& cfg);

}  // namespace resgrasp

#endif  // RESGRASP_ENV_PLANAR_ENV_H_
