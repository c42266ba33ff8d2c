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

#ifndef RESGRASP_HARNESS_CONFIG_H_
#define RESGRASP_HARNESS_CONFIG_H_

#include <cstdint>
#include <string>

#include "resgrasp/dagger/dagger.h"
#include "resgrasp/env/dataset.h"
#include "resgrasp/env/planar_env.h"
#include "resgrasp/policies/policies.h"
#include "resgrasp/ppo/ppo.h"
#include "resgrasp/rewards/rewards.h"

namespace resgrasp {

// Everything one experiment needs. Loaded from a JSON object whose keys
// mirror the field names below; missing keys keep their defaults. See
// README.md for the schema.
struct ExperimentConfig {
  uint64_t seed = 1;
  // Existing dataset file. Empty means "generate from dataset_seed and
  // split_counts into the output directory".
  std::string dataset_path;
  uint64_t dataset_seed = 7;
  SplitCounts split_counts{20, 10, 10};
  int k = 4;
  NetworkConfig network;
  EnvConfig env;
  RewardConfig reward;
  PpoConfig base_ppo;
  PpoConfig hyper_stage1_ppo;
  PpoConfig hyper_stage2_ppo;
  DaggerConfig dagger;
  VisionConfig vision;
  int eval_episodes = 10;

  ExperimentConfig();
  void Validate() const;
};

std::string ConfigToJson(const ExperimentConfig& cfg);
ExperimentConfig ConfigFromJson(const std::string& text);
ExperimentConfig LoadConfig(const std::string& path);

// FNV-1a over the canonical JSON form, as 16 hex digits.
std::string ConfigHash(const ExperimentConfig& cfg);

}  // namespace resgrasp

#endif  // RESGRASP_HARNESS_CONFIG_H_
