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

#include "resgrasp/ppo/vec_env.h"

#include <stdexcept>
#include <utility>

namespace resgrasp {

RewardFn MakeRewardFn(RewardKind kind, const RewardConfig& cfg) {
  cfg.Validate();
  return [kind, cfg](const EnvState& state, const Action& applied,
                     const ObjectShape& object) {
    double r = 0.0;
    ComputeReward(kind, state, applied, object.proposal, cfg, &r);
    return r;
  };
}

VecEnv::VecEnv(const EnvConfig& env_cfg,
               std::vector<const ObjectShape*> objects, int num_envs,
               uint64_t seed, RewardFn reward_fn, bool stagger)
    : objects_(std::move(objects)),
      seed_(seed),
      reward_fn_(std::move(reward_fn)) {
  if (num_envs < 1)
    throw std::invalid_argument("VecEnv: num_envs must be >= 1");
  if (objects_.empty()) throw std::invalid_argument("VecEnv: no objects");
  envs_.assign(num_envs, PlanarGraspEnv(env_cfg));
  obs_.resize(num_envs);
  episode_counts_.assign(num_envs, 0);
  limits_.assign(num_envs, env_cfg.episode_length);
  returns_.assign(num_envs, 0.0);
  for (int e = 0; e < num_envs; ++e) {
    rngs_.emplace_back(seed, 0x5eed0000ULL + static_cast<uint64_t>(e));
    if (stagger) limits_[e] = 1 + rngs_[e].UniformInt(env_cfg.episode_length);
    ResetEnv(e);
  }
}

void VecEnv::ResetEnv(int e) {
  const int pick = rngs_[e].UniformInt(static_cast<int>(objects_.size()));
  const uint64_t episode_seed =
      MixSeed(seed_, static_cast<uint64_t>(episode_counts_[e]));
  obs_[e] = envs_[e].Reset(*objects_[pick], episode_seed, e);
  returns_[e] = 0.0;
}

VecStepResult VecEnv::Step(const std::vector<Action>& actions) {
  if (static_cast<int>(actions.size()) != size()) {
    throw std::invalid_argument("VecEnv::Step: action count mismatch");
  }
  const int n = size();
  VecStepResult out;
  out.rewards = Vector::Zero(n);
  out.dones.assign(n, 0);
  out.final_observations.resize(n);
  for (int e = 0; e < n; ++e) {
    PlanarGraspEnv& env = envs_[e];
    StepResult r = env.Step(actions[e]);
    const double reward =
        reward_fn_(env.state(), env.state().prev_action, env.object());
    out.rewards[e] = reward;
    returns_[e] += reward;
    const int limit = limits_[e];
    if (r.done || env.state().t >= limit) {
      out.dones[e] = 1;
      out.final_observations[e] = std::move(r.observation);
      EpisodeRecord rec;
      rec.env = e;
      rec.object_id = env.object().id;
      rec.episode_return = returns_[e];
      rec.length = env.state().t;
      rec.success = env.state().success;
      rec.full_length = limit == env.config().episode_length;
      out.finished.push_back(rec);
      ++episode_counts_[e];
      limits_[e] = env.config().episode_length;
      ResetEnv(e);
    } else {
      obs_[e] = std::move(r.observation);
    }
  }
  return out;
}

}  // namespace resgrasp
