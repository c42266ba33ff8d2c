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

#ifndef RESGRASP_HARNESS_EVALUATE_H_
#define RESGRASP_HARNESS_EVALUATE_H_

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "resgrasp/env/dataset.h"
#include "resgrasp/env/planar_env.h"
#include "resgrasp/policies/policies.h"
#include "resgrasp/rewards/rewards.h"

namespace resgrasp {

// Deterministic controller over a batch of environments. Learned policies
// only read the observations; scripted ones may inspect the env state.
using BatchPolicy = std::function<std::vector<Action>(
    const std::vector<Observation>& obs,
    const std::vector<const PlanarGraspEnv*>& envs)>;

BatchPolicy BasePolicyFn(const BasePolicy& policy);
// Residual plus normalized mixture of the (deterministic) base actions.
BatchPolicy HyperPolicyFn(const HyperPolicy& hyper,
                          std::vector<const BasePolicy*> bases);
BatchPolicy StudentPolicyFn(const VisionPolicy& student);
// Privileged hand-written grasp: centre over the object, descend, close,
// lift to the target. Keeps per-env phase, reset at t == 0.
BatchPolicy ScriptedGraspPolicy();
// Uniform random actions from a fixed stream.
BatchPolicy RandomPolicy(uint64_t seed);

struct ObjectResult {
  int id = 0;
  ShapeCategory category = ShapeCategory::kEllipse;
  double success_rate = 0.0;
  double mean_d = 0.0;
};

struct SplitReport {
  Split split = Split::kTrain;
  // Per-object success, then macro-averaged over objects.
  double success_rate = 0.0;
  double mean_d = 0.0;
  std::vector<ObjectResult> objects;
};

struct EvalReport {
  uint64_t seed = 0;
  int episodes_per_object = 0;
  std::vector<SplitReport> splits;

  const SplitReport& Get(Split s) const;
};

// Runs `episodes` full episodes per object in lock step. Episode e of object
// o resets with seed MixSeed(seed, o.id) and env index e.
SplitReport EvaluateSplit(const BatchPolicy& policy,
                          const std::vector<ObjectShape>& objects, Split split,
                          int episodes, uint64_t seed, const EnvConfig& env_cfg,
                          const RewardConfig& reward_cfg);

EvalReport Evaluate(const BatchPolicy& policy, const Dataset& dataset,
                    const std::vector<Split>& splits, int episodes,
                    uint64_t seed, const EnvConfig& env_cfg,
                    const RewardConfig& reward_cfg);

std::string ReportText(const EvalReport& report, const std::string& title);
// Columns: split, object_id, category, success_rate, mean_d; one summary row
// per split with object_id -1.
std::string ReportCsv(const EvalReport& report);

}  // namespace resgrasp

#endif  // RESGRASP_HARNESS_EVALUATE_H_
