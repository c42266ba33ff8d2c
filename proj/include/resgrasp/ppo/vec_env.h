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

#ifndef RESGRASP_PPO_VEC_ENV_H_
#define RESGRASP_PPO_VEC_ENV_H_

#include <cstdint>
#include <functional>
#include <vector>

#include "resgrasp/env/planar_env.h"
#include "resgrasp/env/shapes.h"
#include "resgrasp/numerics/matrix.h"
#include "resgrasp/numerics/rng.h"
#include "resgrasp/rewards/rewards.h"

namespace resgrasp {

// Reward for the transition that produced `state` under `applied` (the
// clipped action the env executed).
using RewardFn = std::function<double(
    const EnvState& state, const Action& applied, const ObjectShape& object)>;

RewardFn MakeRewardFn(RewardKind kind, const RewardConfig& cfg);

struct EpisodeRecord {
  int env = 0;
  int object_id = -1;
  double episode_return = 0.0;
  int length = 0;
  bool success = false;
  // False for the shortened first episode of a staggered env.
  bool full_length = true;
};

struct VecStepResult {
  Vector rewards;
  std::vector<uint8_t> dones;
  // Observation at the end of each finished episode, before the reset. Only
  // meaningful where dones[e] is set.
  std::vector<Observation> final_observations;
  std::vector<EpisodeRecord> finished;
};

// A batch of independent environments. Each env is bound to one object per
// episode, drawn uniformly from `objects` at every reset, and keeps running
// across calls so rollouts can be shorter than episodes.
class VecEnv {
 public:
  // With `stagger`, every env's first episode is cut at a random length so
  // episode boundaries are spread over time.
  VecEnv(const EnvConfig& env_cfg, std::vector<const ObjectShape*> objects,
         int num_envs, uint64_t seed, RewardFn reward_fn, bool stagger = true);

  int size() const { return static_cast<int>(envs_.size()); }
  const std::vector<Observation>& observations() const { return obs_; }
  const PlanarGraspEnv& env(int i) const { return envs_[i]; }

  VecStepResult Step(const std::vector<Action>& actions);

 private:
  void ResetEnv(int e);

  std::vector<PlanarGraspEnv> envs_;
  std::vector<const ObjectShape*> objects_;
  std::vector<Observation> obs_;
  std::vector<Rng> rngs_;
  std::vector<int> episode_counts_;
  std::vector<int> limits_;
  std::vector<double> returns_;
  uint64_t seed_;
  RewardFn reward_fn_;
};

}  // namespace resgrasp

#endif  // RESGRASP_PPO_VEC_ENV_H_
