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

#include "resgrasp/harness/config.h"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace nlohmann {

template <>
struct adl_serializer<resgrasp::Vec2> {
  static void to_json(json& j, const resgrasp::Vec2& v) {
    j = json::array({v.x(), v.y()});
  }
  static void from_json(const json& j, resgrasp::Vec2& v) {
    if (!j.is_array() || j.size() != 2) {
      throw std::invalid_argument("config: expected a 2-element array");
    }
    v = resgrasp::Vec2(j[0].get<double>(), j[1].get<double>());
  }
};

}  // namespace nlohmann

namespace resgrasp {

using nlohmann::json;

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(SplitCounts, train, test_seen, test_unseen)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(NetworkConfig, hidden, init_std, hidden_gain,
                                   actor_output_gain, critic_output_gain)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(GripperGeometry, palm_half_width,
                                   proximal_length, distal_length,
                                   hand_center_depth, joint_lower, joint_upper)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(
    EnvConfig, gripper, episode_length, max_joint_delta, target_smoothing,
    linear_damping, linear_gain, max_linear_speed, angular_damping,
    angular_gain, max_angular_speed, max_tilt, workspace_half_width,
    workspace_top, min_base_height, contact_eps, friction_angle, grip_stiffness,
    release_margin, success_radius, target, start_clearance, object_drop_height,
    object_x_range, obs_center, pos_scale, force_scale, obs_clip,
    point_cloud_size)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(
    RewardConfig, alpha, pose_coeff, reach_hand_coeff, reach_finger_coeff,
    lift_base, lift_az_coeff, move_offset, move_coeff, bonus_scale,
    bonus_threshold, finger_dist_sum_max, hand_dist_max, joint_l1_max,
    proposal_rot_weight, proposal_offset_weight, proposal_joint_weight,
    proposal_offset_scale, target)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(PpoConfig, gamma, gae_lambda, clip, lr,
                                   rollout_steps, epochs, minibatches, num_envs,
                                   entropy_coeff, value_coeff, max_grad_norm,
                                   iterations)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(DaggerConfig, lr, rollout_steps, epochs,
                                   minibatches, num_envs, iterations,
                                   max_grad_norm, aggregate)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(VisionConfig, encoder_hidden, feature_size,
                                   trunk_hidden)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(ExperimentConfig, seed, dataset_path,
                                   dataset_seed, split_counts, k, network, env,
                                   reward, base_ppo, hyper_stage1_ppo,
                                   hyper_stage2_ppo, dagger, vision,
                                   eval_episodes)

namespace {

// Rejects keys the schema does not know, so typos do not silently fall back
// to defaults.
void CheckKnownKeys(const json& user, const json& schema,
                    const std::string& path) {
  if (!user.is_object() || !schema.is_object()) return;
  for (auto it = user.begin(); it != user.end(); ++it) {
    if (!schema.contains(it.key())) {
      throw std::invalid_argument("config: unknown key '" + path + it.key() +
                                  "'");
    }
    CheckKnownKeys(it.value(), schema[it.key()], path + it.key() + ".");
  }
}

}  // namespace

ExperimentConfig::ExperimentConfig() {
  base_ppo.iterations = 500;
  hyper_stage1_ppo.iterations = 300;
  hyper_stage2_ppo.iterations = 200;
  dagger.iterations = 1000;
}

void ExperimentConfig::Validate() const {
  if (k < 1) throw std::invalid_argument("config: k must be >= 1");
  if (split_counts.train < k) {
    throw std::invalid_argument("config: fewer training objects than k");
  }
  if (split_counts.train < 0 || split_counts.test_seen < 0 ||
      split_counts.test_unseen < 0) {
    throw std::invalid_argument("config: negative split count");
  }
  if (eval_episodes < 1) {
    throw std::invalid_argument("config: eval_episodes must be >= 1");
  }
  if (network.hidden.empty()) {
    throw std::invalid_argument("config: network needs a hidden layer");
  }
  if (env.episode_length < 1) {
    throw std::invalid_argument("config: episode_length must be >= 1");
  }
  reward.Validate();
  base_ppo.Validate();
  hyper_stage1_ppo.Validate();
  hyper_stage2_ppo.Validate();
  dagger.Validate();
}

std::string ConfigToJson(const ExperimentConfig& cfg) {
  return json(cfg).dump(2);
}

ExperimentConfig ConfigFromJson(const std::string& text) {
  const json user = json::parse(text);
  if (!user.is_object()) {
    throw std::invalid_argument("config: top level must be an object");
  }
  json merged = json(ExperimentConfig());
  CheckKnownKeys(user, merged, "");
  merged.merge_patch(user);
  ExperimentConfig cfg = merged.get<ExperimentConfig>();
  cfg.Validate();
  return cfg;
}

ExperimentConfig LoadConfig(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ConfigFromJson(ss.str());
}

std::string ConfigHash(const ExperimentConfig& cfg) {
  const std::string text = json(cfg).dump();
  uint64_t h = 1469598103934665603ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace resgrasp
