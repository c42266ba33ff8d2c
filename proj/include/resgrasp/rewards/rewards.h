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

#ifndef RESGRASP_REWARDS_REWARDS_H_
#define RESGRASP_REWARDS_REWARDS_H_

#include <string>
#include <vector>

#include "resgrasp/env/planar_env.h"
#include "resgrasp/env/shapes.h"

namespace resgrasp {

struct RewardConfig {
  // Weight of the proposal term in the stage-1 reward.
  double alpha = 1.0;
  double pose_coeff = 0.05;
  double reach_hand_coeff = 1.0;
  double reach_finger_coeff = 0.5;
  double lift_base = 0.1;
  double lift_az_coeff = 0.1;
  double move_offset = 0.9;
  double move_coeff = 2.0;
  double bonus_scale = 10.0;
  double bonus_threshold = 0.05;
  // Gate thresholds, tuned to the desk-scale gripper.
  double finger_dist_sum_max = 0.3;
  double hand_dist_max = 0.08;
  double joint_l1_max = 3.0;
  // Proposal distance: weighted concatenation of the wrapped rotation error,
  // the offset error in units of offset_scale, and the joint error.
  double proposal_rot_weight = 1.0;
  double proposal_offset_weight = 1.0;
  double proposal_joint_weight = 1.0;
  double proposal_offset_scale = 0.1;
  Vec2 target = Vec2(0.0, 0.20);

  // Gate thresholds of the original 18-DoF hand setup.
  static RewardConfig FullHandScale();
  void Validate() const;
};

struct RewardBreakdown {
  double task = 0.0;
  double proposal = 0.0;
  double pose = 0.0;
  double reach = 0.0;
  double lift = 0.0;
  double move = 0.0;
  double bonus = 0.0;
  int f1 = 0;
  int f2 = 0;
  double d_obj = 0.0;
};

enum class RewardKind {
  kBase,          // pose + task
  kBaseProposal,  // task + alpha * proposal, used by the full-pose ablation
  kStage1,        // task + alpha * proposal
  kStage2,        // lift + move (loose gate) + bonus
};
const char* RewardKindName(RewardKind kind);
RewardKind ParseRewardKind(const std::string& name);

// Distance between a proposal and a current grasp pose, both object-relative.
double ProposalDistance(const GraspProposal& g, const GraspPose& g_t,
                        const RewardConfig& cfg = {});
double ProposalReward(const GraspProposal& g, const GraspPose& g_t,
                      const RewardConfig& cfg = {});

// -pose_coeff * |q - q_t|_1.
double PoseReward(const Joints& q, const Joints& q_t,
                  const RewardConfig& cfg = {});

// Reach, lift, move and bonus with their gates. Only positions, joints and
// the applied action enter, never the object's shape.
RewardBreakdown BaseTaskReward(const EnvState& state, const Action& action,
                               const Joints& proposal_joints,
                               const RewardConfig& cfg = {});

double BasePolicyReward(const EnvState& state, const Action& action,
                        const GraspProposal& proposal,
                        const RewardConfig& cfg = {});
double Stage1Reward(const EnvState& state, const Action& action,
                    const GraspProposal& proposal,
                    const RewardConfig& cfg = {});
double Stage2Reward(const EnvState& state, const Action& action,
                    const RewardConfig& cfg = {});

// Full breakdown for the given reward kind; `total` receives the reward.
RewardBreakdown ComputeReward(RewardKind kind, const EnvState& state,
                              const Action& action,
                              const GraspProposal& proposal,
                              const RewardConfig& cfg, double* total);

// Sum of proposal distances over a trajectory of grasp poses. Lower means the
// executed grasps stayed closer to the proposal.
double DMetric(const std::vector<GraspPose>& trajectory,
               const GraspProposal& proposal, const RewardConfig& cfg = {});

}  // namespace resgrasp

#endif  // RESGRASP_REWARDS_REWARDS_H_
