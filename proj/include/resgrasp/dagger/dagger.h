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

#ifndef RESGRASP_DAGGER_DAGGER_H_
#define RESGRASP_DAGGER_DAGGER_H_

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "resgrasp/numerics/matrix.h"
#include "resgrasp/policies/policies.h"
#include "resgrasp/ppo/vec_env.h"

namespace resgrasp {

struct DaggerConfig {
  double lr = 3e-4;
  int rollout_steps = 1;
  int epochs = 5;
  int minibatches = 4;
  int num_envs = 256;
  int iterations = 500;
  double max_grad_norm = 1.0;
  // Keep every labelled state from earlier iterations in the training set
  // (classic dataset aggregation) instead of training on the fresh batch only.
  bool aggregate = false;

  void Validate() const;
};

// Frozen state-based teacher: hyper-policy plus its base experts.
struct Teacher {
  const HyperPolicy* hyper = nullptr;
  std::vector<const BasePolicy*> bases;
};

// Deterministic combined action, clipped to [-1, 1], one row per observation.
Matrix TeacherActions(const Teacher& teacher,
                      const std::vector<Observation>& obs);
// Raw (pre-transform) deterministic hyper outputs for a batch, one per row.
std::vector<HyperOutput> HyperActBatch(const HyperPolicy& policy,
                                       const std::vector<Observation>& obs);
// Per-base deterministic actions for a batch: result[i] is N x kActionDim.
std::vector<Matrix> BaseActionsBatch(
    const std::vector<const BasePolicy*>& bases,
    const std::vector<Observation>& obs);

struct DaggerMetrics {
  int iteration = 0;
  // Mean squared error between the student's action and the teacher label on
  // the states collected this iteration, measured before the update.
  double label_mse = 0.0;
  double success_rate = 0.0;
};

struct DaggerResult {
  std::vector<DaggerMetrics> metrics;
  // Share of training rows, summed over iterations, that were collected by
  // the student of the same iteration.
  double on_policy_fraction = 1.0;
};

// Student-driven rollouts labelled by the teacher, regressed with MSE.
DaggerResult Distill(
    const Teacher& teacher, VisionPolicy& student, VecEnv& envs,
    const DaggerConfig& cfg, uint64_t seed,
    const std::function<void(const DaggerMetrics&)>& on_iteration = nullptr);

std::string DaggerCsv(const std::vector<DaggerMetrics>& metrics);

// Means of consecutive non-overlapping windows of `window` values.
std::vector<double> WindowMeans(const std::vector<double>& values, int window);

}  // namespace resgrasp

#endif  // RESGRASP_DAGGER_DAGGER_H_
