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

#include "resgrasp/rewards/rewards.h"

#include <cmath>
#include <stdexcept>
#include <string>

#include "resgrasp/env/geometry.h"

namespace resgrasp {
namespace {

struct Gates {
  double hand_dist = 0.0;
  double finger_dist_sum = 0.0;
  int f1 = 0;
};

Gates ComputeGates(const EnvState& state, const RewardConfig& cfg) {
  Gates g;
  g.hand_dist = (state.object_pos - state.hand_center).norm();
  for (const Vec2& tip : state.fingertips) {
    g.finger_dist_sum += (state.object_pos - tip).norm();
  }
  g.f1 = (g.finger_dist_sum <= cfg.finger_dist_sum_max ? 1 : 0) +
         (g.hand_dist <= cfg.hand_dist_max ? 1 : 0);
  return g;
}

double JointL1(const Joints& a, const Joints& b) {
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
  return s;
}

double Lift(int f1, double az, const RewardConfig& cfg) {
  return f1 == 2 ? cfg.lift_base + cfg.lift_az_coeff * az : 0.0;
}

double Move(bool active, double d_obj, const RewardConfig& cfg) {
  return active ? cfg.move_offset - cfg.move_coeff * d_obj : 0.0;
}

double Bonus(double d_obj, const RewardConfig& cfg) {
  return d_obj <= cfg.bonus_threshold ? 1.0 / (1.0 + cfg.bonus_scale * d_obj)
                                      : 0.0;
}

}  // namespace

RewardConfig RewardConfig::FullHandScale() {
  RewardConfig cfg;
  cfg.finger_dist_sum_max = 0.6;
  cfg.hand_dist_max = 0.12;
  cfg.joint_l1_max = 6.0;
  return cfg;
}

void RewardConfig::Validate() const {
  const double values[] = {alpha,
                           pose_coeff,
                           reach_hand_coeff,
                           reach_finger_coeff,
                           lift_base,
                           lift_az_coeff,
                           move_offset,
                           move_coeff,
                           bonus_scale,
                           bonus_threshold,
                           finger_dist_sum_max,
                           hand_dist_max,
                           joint_l1_max,
                           proposal_rot_weight,
                           proposal_offset_weight,
                           proposal_joint_weight,
                           proposal_offset_scale,
                           target.x(),
                           target.y()};
  for (double v : values) {
    if (!std::isfinite(v)) {
      throw std::invalid_argument("RewardConfig: non-finite coefficient");
    }
  }
  if (finger_dist_sum_max <= 0 || hand_dist_max <= 0 || joint_l1_max <= 0 ||
      bonus_threshold <= 0 || proposal_offset_scale <= 0) {
    throw std::invalid_argument("RewardConfig: thresholds must be positive");
  }
}

const char* RewardKindName(RewardKind kind) {
  switch (kind) {
    case RewardKind::kBase:
      return "base";
    case RewardKind::kBaseProposal:
      return "base_proposal";
    case RewardKind::kStage1:
      return "stage1";
    case RewardKind::kStage2:
      return "stage2";
  }
  return "unknown";
}

RewardKind ParseRewardKind(const std::string& name) {
  for (RewardKind k : {RewardKind::kBase, RewardKind::kBaseProposal,
                       RewardKind::kStage1, RewardKind::kStage2}) {
    if (name == RewardKindName(k)) return k;
  }
  throw std::invalid_argument("unknown reward kind: " + name);
}

double ProposalDistance(const GraspProposal& g, const GraspPose& g_t,
                        const RewardConfig& cfg) {
  const double dr =
      cfg.proposal_rot_weight * WrapAngle(g.wrist_rot - g_t.wrist_rot);
  const Vec2 dt = cfg.proposal_offset_weight *
                  (g.wrist_offset - g_t.wrist_offset) /
                  cfg.proposal_offset_scale;
  double sq = dr * dr + dt.squaredNorm();
  for (size_t i = 0; i < g.joint_targets.size(); ++i) {
    const double dq =
        cfg.proposal_joint_weight * (g.joint_targets[i] - g_t.joints[i]);
    sq += dq * dq;
  }
  return std::sqrt(sq);
}

double ProposalReward(const GraspProposal& g, const GraspPose& g_t,
                      const RewardConfig& cfg) {
  return -ProposalDistance(g, g_t, cfg);
}

double PoseReward(const Joints& q, const Joints& q_t, const RewardConfig& cfg) {
  return -cfg.pose_coeff * JointL1(q, q_t);
}

RewardBreakdown BaseTaskReward(const EnvState& state, const Action& action,
                               const Joints& proposal_joints,
                               const RewardConfig& cfg) {
  RewardBreakdown r;
  const Gates gates = ComputeGates(state, cfg);
  r.d_obj = (state.object_pos - cfg.target).norm();
  r.f1 = gates.f1;
  r.f2 =
      gates.f1 +
      (JointL1(proposal_joints, state.gripper.joints) <= cfg.joint_l1_max ? 1
                                                                          : 0);
  r.reach = -cfg.reach_hand_coeff * gates.hand_dist -
            cfg.reach_finger_coeff * gates.finger_dist_sum;
  r.lift = Lift(r.f1, action.az(), cfg);
  r.move = Move(r.f2 == 3, r.d_obj, cfg);
  r.bonus = Bonus(r.d_obj, cfg);
  r.task = r.reach + r.lift + r.move + r.bonus;
  return r;
}

double BasePolicyReward(const EnvState& state, const Action& action,
                        const GraspProposal& proposal,
                        const RewardConfig& cfg) {
  return PoseReward(proposal.joint_targets, state.gripper.joints, cfg) +
         BaseTaskReward(state, action, proposal.joint_targets, cfg).task;
}

double Stage1Reward(const EnvState& state, const Action& action,
                    const GraspProposal& proposal, const RewardConfig& cfg) {
  return BaseTaskReward(state, action, proposal.joint_targets, cfg).task +
         cfg.alpha * ProposalReward(proposal, CurrentGraspPose(state), cfg);
}

double Stage2Reward(const EnvState& state, const Action& action,
                    const RewardConfig& cfg) {
  const Gates gates = ComputeGates(state, cfg);
  const double d_obj = (state.object_pos - cfg.target).norm();
  return Lift(gates.f1, action.az(), cfg) + Move(gates.f1 == 2, d_obj, cfg) +
         Bonus(d_obj, cfg);
}

RewardBreakdown ComputeReward(RewardKind kind, const EnvState& state,
                              const Action& action,
                              const GraspProposal& proposal,
                              const RewardConfig& cfg, double* total) {
  RewardBreakdown r =
      BaseTaskReward(state, action, proposal.joint_targets, cfg);
  r.pose = PoseReward(proposal.joint_targets, state.gripper.joints, cfg);
  r.proposal = ProposalReward(proposal, CurrentGraspPose(state), cfg);
  double value = 0.0;
  switch (kind) {
    case RewardKind::kBase:
      value = r.pose + r.task;
      break;
    case RewardKind::kBaseProposal:
    case RewardKind::kStage1:
      value = r.task + cfg.alpha * r.proposal;
      break;
    case RewardKind::kStage2:
      r.move = Move(r.f1 == 2, r.d_obj, cfg);
      value = r.lift + r.move + r.bonus;
      break;
  }
  if (total != nullptr) *total = value;
  return r;
}

double DMetric(const std::vector<GraspPose>& trajectory,
               const GraspProposal& proposal, const RewardConfig& cfg) {
  double d = 0.0;
  for (const GraspPose& g_t : trajectory) {
    d += ProposalDistance(proposal, g_t, cfg);
  }
  return d;
}

}  // namespace resgrasp
