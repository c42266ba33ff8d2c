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

#ifndef RESGRASP_HARNESS_PIPELINE_H_
#define RESGRASP_HARNESS_PIPELINE_H_

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "resgrasp/clustering/kmeans.h"
#include "resgrasp/dagger/dagger.h"
#include "resgrasp/env/dataset.h"
#include "resgrasp/harness/config.h"
#include "resgrasp/harness/evaluate.h"
#include "resgrasp/policies/policies.h"
#include "resgrasp/ppo/ppo.h"

namespace resgrasp {

// Progress lines from long-running stages; may be empty.
using LogFn = std::function<void(const std::string&)>;

struct BaseTrainResult {
  BasePolicy policy;
  std::vector<IterationMetrics> metrics;
};

// PPO on a single object with the base reward (pose + task) or, for the
// ablation, the proposal reward.
BaseTrainResult TrainBasePolicy(const ExperimentConfig& cfg,
                                const ObjectShape& object,
                                const ObservationMask& mask, RewardKind reward,
                                uint64_t seed, const LogFn& log = nullptr);

// Hyper-policy samples become residual + normalized mixture of the frozen,
// deterministic base actions.
ActionMapper HyperActionMapper(const HyperPolicy& hyper,
                               std::vector<const BasePolicy*> bases);

// Stage 1 uses the task + proposal reward, stage 2 the lift/move/bonus
// reward. Continues from the policy passed in.
std::vector<IterationMetrics> TrainHyperPolicy(
    HyperPolicy& hyper, const std::vector<const BasePolicy*>& bases,
    const std::vector<const ObjectShape*>& objects, const ExperimentConfig& cfg,
    int stage, uint64_t seed, const LogFn& log = nullptr);

DaggerResult DistillStudent(const HyperPolicy& hyper,
                            const std::vector<const BasePolicy*>& bases,
                            VisionPolicy& student,
                            const std::vector<const ObjectShape*>& objects,
                            const ExperimentConfig& cfg, uint64_t seed,
                            const LogFn& log = nullptr);

// Clusters the training objects on their shape codes.
ClusterModel ClusterObjects(const std::vector<ObjectShape>& objects, int k,
                            uint64_t seed);
// Centroids, per-object assignment and representatives as a JSON record.
std::string ClustersJson(const ClusterModel& m,
                         const std::vector<ObjectShape>& objects);

struct PipelineOptions {
  // Name of this hyper-policy variant; prefixes its files.
  std::string variant = "ours";
  bool residual = true;
  ObservationMask base_mask = ObservationMask::Base();
  RewardKind base_reward = RewardKind::kBase;
  bool run_stage2 = true;
  bool run_distill = true;
  LogFn log;
};

struct PipelineResult {
  Dataset dataset;
  ClusterModel clusters;
  std::vector<int> base_object_ids;
  std::vector<BasePolicy> bases;
  HyperPolicy stage1;
  HyperPolicy stage2;
  VisionPolicy student;
  EvalReport stage1_report;
  EvalReport stage2_report;
  EvalReport student_report;
  // Training histories of the stages run in this call (empty when loaded).
  std::vector<IterationMetrics> stage1_metrics;
  std::vector<IterationMetrics> stage2_metrics;
  DaggerResult dagger;
  // Stages skipped because their checkpoint was already recorded.
  std::vector<std::string> resumed;
};

// dataset -> cluster -> k x base -> hyper stage 1 -> hyper stage 2 ->
// distill -> eval, writing checkpoints, metrics CSVs and reports to
// `out_dir`. manifest.json records every finished stage together with the
// config hash, so an interrupted or repeated run picks up where it stopped.
PipelineResult RunPipeline(const ExperimentConfig& cfg,
                           const std::string& out_dir,
                           const PipelineOptions& opts = {});

struct AblationRow {
  std::string variant;
  EvalReport report;
};

// Variants sharing one output directory (and therefore cached stages):
// "ours", "moe" (weights only), "full_obs" (bases see the full state) and
// "full_pose" (bases trained with the proposal reward).
std::vector<AblationRow> RunAblations(const ExperimentConfig& cfg,
                                      const std::string& out_dir,
                                      const LogFn& log = nullptr);
// Columns: variant, split, success_rate, mean_d.
std::string AblationCsv(const std::vector<AblationRow>& rows);
std::string AblationText(const std::vector<AblationRow>& rows);

}  // namespace resgrasp

#endif  // RESGRASP_HARNESS_PIPELINE_H_
