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

#ifndef RESGRASP_PPO_PPO_H_
#define RESGRASP_PPO_PPO_H_

#include <functional>
#include <string>
#include <vector>

#include "resgrasp/numerics/adam.h"
#include "resgrasp/numerics/matrix.h"
#include "resgrasp/numerics/rng.h"
#include "resgrasp/policies/policies.h"
#include "resgrasp/ppo/vec_env.h"

namespace resgrasp {

struct PpoConfig {
  double gamma = 0.96;
  double gae_lambda = 0.95;
  double clip = 0.2;
  double lr = 3e-4;
  int rollout_steps = 8;
  int epochs = 5;
  int minibatches = 4;
  int num_envs = 256;
  double entropy_coeff = 0.0;
  double value_coeff = 0.5;
  double max_grad_norm = 1.0;
  int iterations = 500;

  void Validate() const;
};

// Transitions laid out step-major: row t * num_envs + e.
struct RolloutBuffer {
  int steps = 0;
  int num_envs = 0;
  Matrix inputs;   // masked observations
  Matrix samples;  // pre-transform Gaussian samples
  Vector log_probs;
  Vector rewards;  // truncation bootstraps already folded in
  Vector values;
  Vector dones;        // 1 where the episode ended after this step
  Vector last_values;  // critic at the observation after the final step
  Vector advantages;
  Vector returns;
  std::vector<EpisodeRecord> finished;
  // Environment reward before bootstrapping, for logging.
  double mean_env_reward = 0.0;

  int size() const { return steps * num_envs; }
};

// Generalized advantage estimation over one env's trajectory.
// delta_t = r_t + gamma * v_{t+1} * (1 - done_t) - v_t, with v_T = last_value;
// A_t = delta_t + gamma * lambda * (1 - done_t) * A_{t+1}.
void ComputeGae(const std::vector<double>& rewards,
                const std::vector<double>& values,
                const std::vector<double>& dones, double last_value,
                double gamma, double lambda, std::vector<double>* advantages,
                std::vector<double>* returns);
void ComputeGae(RolloutBuffer& buffer, double gamma, double lambda);

// Maps pre-transform samples (one row per env) to the actions the envs run.
using ActionMapper = std::function<std::vector<Action>(
    const std::vector<Observation>& obs, const Matrix& samples)>;

// Identity mapping: the sample is the action (the env clips it).
ActionMapper DirectActionMapper();

// Rolls the envs forward `steps` steps with stochastic actions. Episodes that
// end by the time limit bootstrap with the critic value of their final
// observation.
RolloutBuffer CollectRollout(const ActorCritic& net, const ActionMapper& mapper,
                             VecEnv& envs, int steps, double gamma, Rng& rng);

struct PpoBatchLoss {
  double policy_loss = 0.0;
  double value_loss = 0.0;
  double entropy = 0.0;
  double total = 0.0;
  double mean_ratio = 0.0;
  double max_ratio_dev = 0.0;  // max |ratio - 1|
  double clip_fraction = 0.0;
  double approx_kl = 0.0;
  std::vector<Matrix> grads;  // ActorCritic::Tensors() order
};

// Clipped surrogate + value_coeff * (v - R)^2 - entropy_coeff * H, averaged
// over the rows in `idx`, with analytic gradients.
PpoBatchLoss PpoLoss(const ActorCritic& net, const Matrix& inputs,
                     const Matrix& samples, const Vector& old_log_probs,
                     const Vector& advantages, const Vector& returns,
                     const PpoConfig& cfg);

struct PpoUpdateStats {
  double policy_loss = 0.0;
  double value_loss = 0.0;
  double entropy = 0.0;
  double mean_ratio = 0.0;
  double clip_fraction = 0.0;
  double approx_kl = 0.0;
  double grad_norm = 0.0;
  // |ratio - 1| on the first minibatch of the first epoch.
  double first_minibatch_ratio_dev = 0.0;
  double adv_mean = 0.0;  // after normalization
  double adv_std = 0.0;
};

// Normalizes advantages over the whole buffer, then runs epochs x minibatches
// Adam steps. Throws NumericError with diagnostics on a non-finite loss.
PpoUpdateStats PpoUpdate(ActorCritic& net, AdamState& adam,
                         RolloutBuffer& buffer, const PpoConfig& cfg, Rng& rng);

struct IterationMetrics {
  int iteration = 0;
  double mean_reward = 0.0;
  double success_rate = 0.0;
  double clip_fraction = 0.0;
  double value_loss = 0.0;
  double entropy = 0.0;
};

struct TrainCallbacks {
  std::function<void(const IterationMetrics&)> on_iteration;
};

// iterations x (collect, GAE, update). success_rate is the fraction of full
// episodes finished in the iteration that succeeded; iterations without any
// finished episode repeat the previous value.
std::vector<IterationMetrics> TrainLoop(ActorCritic& net,
                                        const ActionMapper& mapper,
                                        VecEnv& envs, const PpoConfig& cfg,
                                        uint64_t seed,
                                        const TrainCallbacks& callbacks = {});

std::string MetricsCsv(const std::vector<IterationMetrics>& metrics);

}  // namespace resgrasp

#endif  // RESGRASP_PPO_PPO_H_
