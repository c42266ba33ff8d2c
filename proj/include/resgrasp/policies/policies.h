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

#ifndef RESGRASP_POLICIES_POLICIES_H_
#define RESGRASP_POLICIES_POLICIES_H_

#include <array>
#include <string>
#include <vector>

#include "resgrasp/env/planar_env.h"
#include "resgrasp/numerics/checkpoint.h"
#include "resgrasp/numerics/gaussian.h"
#include "resgrasp/numerics/matrix.h"
#include "resgrasp/numerics/mlp.h"
#include "resgrasp/numerics/rng.h"

namespace resgrasp {

// Which observation layers a policy sees. Disabled layers are dropped from
// the flat input entirely rather than zeroed.
struct ObservationMask {
  std::array<bool, kNumObsLayers> enabled{};

  // Proprioception, object position, previous action and target.
  static ObservationMask Base();
  // Every state layer; no point cloud.
  static ObservationMask State();
  // Proprioception, point cloud, previous action and target.
  static ObservationMask Vision();

  bool has(ObsLayer l) const { return enabled[static_cast<int>(l)]; }
  int Size(int point_cloud_size = kDefaultPointCloudSize) const;
  // Comma-separated enabled layer names, e.g. "proprio,object_pos".
  std::string ToString() const;
  static ObservationMask FromString(const std::string& s);
  bool operator==(const ObservationMask& o) const {
    return enabled == o.enabled;
  }
};

// Concatenates the enabled layers in ObsLayer order.
Vector MaskObservation(const Observation& obs, const ObservationMask& mask);
// One masked observation per row.
Matrix MaskObservations(const std::vector<Observation>& obs,
                        const ObservationMask& mask);

struct NetworkConfig {
  std::vector<int> hidden = {64, 64};
  double init_std = 0.8;
  double hidden_gain = 1.4142135623730951;
  double actor_output_gain = 0.01;
  double critic_output_gain = 1.0;
};

// Gaussian actor and scalar critic over the same masked observation, with
// separate networks.
struct ActorCritic {
  ObservationMask mask;
  MlpParams actor;
  GaussianHead head;
  MlpParams critic;

  int input_size() const { return actor.input_size(); }
  int action_size() const { return head.dim(); }

  // actor W/b..., log_std, critic W/b...
  std::vector<Matrix*> Tensors();
  std::vector<const Matrix*> Tensors() const;
  std::vector<std::string> TensorNames() const;
};

ActorCritic MakeActorCritic(const ObservationMask& mask, int input_size,
                            int action_size, const NetworkConfig& net,
                            Rng& rng);

// Critic values for a batch of masked inputs.
Vector CriticValues(const ActorCritic& ac, const Matrix& inputs);

struct BasePolicy {
  ActorCritic net;
  int trained_object_id = -1;
};

BasePolicy MakeBasePolicy(const NetworkConfig& net, Rng& rng,
                          const ObservationMask& mask = ObservationMask::Base(),
                          int point_cloud_size = kDefaultPointCloudSize);

// Deterministic action: the Gaussian mean clipped to [-1, 1].
Vector BaseAct(const BasePolicy& policy, const Observation& obs);
// Batched BaseAct over masked inputs; one action per row.
Matrix BaseActBatch(const BasePolicy& policy, const Matrix& masked_inputs);

inline constexpr double kWeightFloor = 1e-6;

// Emits a residual action and one mixing weight per base policy. The Gaussian
// covers [residual (kActionDim) | weight logits (k)]; with the residual
// disabled only the logits remain and the residual is identically zero.
struct HyperPolicy {
  ActorCritic net;
  int k = 1;
  bool residual_enabled = true;

  int residual_size() const { return residual_enabled ? kActionDim : 0; }
};

HyperPolicy MakeHyperPolicy(int k, bool residual_enabled,
                            const NetworkConfig& net, Rng& rng,
                            int point_cloud_size = kDefaultPointCloudSize);

struct HyperOutput {
  Vector residual;  // kActionDim
  Vector weights;   // k, each >= kWeightFloor
  Vector raw;       // pre-transform Gaussian sample
  double log_prob = 0.0;
  double value = 0.0;
};

double Softplus(double x);

// Maps a pre-transform sample to residual and weights.
HyperOutput DecodeHyperSample(const HyperPolicy& policy, const Vector& raw);

// Samples (or takes the mean of) the Gaussian; log_prob is the density of the
// pre-transform sample.
HyperOutput HyperAct(const HyperPolicy& policy, const Observation& obs,
                     Rng& rng, bool deterministic);

// residual + sum_i (lambda_i / sum(lambda)) * base_i, before clipping.
Vector CombineActionsUnclipped(const std::vector<Vector>& base_actions,
                               const Vector& residual, const Vector& weights);
// The same, clipped to [-1, 1].
Vector CombineActions(const std::vector<Vector>& base_actions,
                      const HyperOutput& out);

// Point-cloud student: a shared per-point MLP, a coordinate-wise max-pool and
// a trunk over [pooled | proprio | prev_action | target].
struct VisionPolicy {
  MlpParams point_encoder;
  MlpParams trunk;
  int point_cloud_size = kDefaultPointCloudSize;

  // Layers fed to the trunk next to the pooled feature.
  static ObservationMask TrunkMask();
  std::vector<Matrix*> Tensors();
  std::vector<const Matrix*> Tensors() const;
  std::vector<std::string> TensorNames() const;
};

struct VisionConfig {
  std::vector<int> encoder_hidden = {32};
  int feature_size = 32;
  std::vector<int> trunk_hidden = {64, 64};
};

VisionPolicy MakeVisionPolicy(const VisionConfig& cfg, Rng& rng,
                              int point_cloud_size = kDefaultPointCloudSize);

struct VisionCache {
  MlpCache encoder;
  MlpCache trunk;
  std::vector<int> argmax;  // batch * feature_size winning point per channel
  int batch = 0;
};

// Trunk outputs (action means) for a batch of observations.
Matrix VisionForward(const VisionPolicy& policy,
                     const std::vector<Observation>& obs,
                     VisionCache* cache = nullptr);
// Parameter gradients of sum(upstream .* output), in Tensors() order.
std::vector<Matrix> VisionBackward(const VisionPolicy& policy,
                                   const VisionCache& cache,
                                   const Matrix& upstream);

// Deterministic student action clipped to [-1, 1].
Vector StudentAct(const VisionPolicy& policy, const Observation& obs);

// Checkpoint records. A "meta.kind" scalar tags the policy type.
enum class PolicyKind { kBase = 0, kHyper = 1, kVision = 2 };
PolicyKind CheckpointKind(const std::vector<NamedTensor>& tensors);

std::vector<NamedTensor> SaveBasePolicy(const BasePolicy& p);
BasePolicy LoadBasePolicy(const std::vector<NamedTensor>& tensors);
std::vector<NamedTensor> SaveHyperPolicy(const HyperPolicy& p);
HyperPolicy LoadHyperPolicy(const std::vector<NamedTensor>& tensors);
std::vector<NamedTensor> SaveVisionPolicy(const VisionPolicy& p);
VisionPolicy LoadVisionPolicy(const std::vector<NamedTensor>& tensors);

}  // namespace resgrasp

#endif  // RESGRASP_POLICIES_POLICIES_H_
