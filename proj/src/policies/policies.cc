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

#include "resgrasp/policies/policies.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>

#include "resgrasp/numerics/errors.h"

namespace resgrasp {
namespace {

constexpr std::array<ObsLayer, kNumObsLayers> kAllLayers = {
    ObsLayer::kProprio,    ObsLayer::kObjectPos,  ObsLayer::kObjectRot,
    ObsLayer::kObjectCode, ObsLayer::kPointCloud, ObsLayer::kPrevAction,
    ObsLayer::kTargetPos};

ObservationMask MaskOf(std::initializer_list<ObsLayer> layers) {
  ObservationMask m;
  for (ObsLayer l : layers) m.enabled[static_cast<int>(l)] = true;
  return m;
}

std::vector<int> Sizes(int in, const std::vector<int>& hidden, int out) {
  std::vector<int> sizes = {in};
  sizes.insert(sizes.end(), hidden.begin(), hidden.end());
  sizes.push_back(out);
  return sizes;
}

Vector ClipUnit(Vector v) { return v.cwiseMax(-1.0).cwiseMin(1.0); }

void AppendMlp(const std::string& prefix, const MlpParams& p,
               std::vector<NamedTensor>* out) {
  for (int l = 0; l < p.num_layers(); ++l) {
    out->push_back(NamedTensor::FromMatrix(prefix + ".W" + std::to_string(l),
                                           p.weights[l]));
    out->push_back(NamedTensor::FromMatrix(prefix + ".b" + std::to_string(l),
                                           p.biases[l]));
  }
}

MlpParams ReadMlp(const std::string& prefix,
                  const std::vector<NamedTensor>& tensors) {
  MlpParams p;
  for (int l = 0; HasTensor(tensors, prefix + ".W" + std::to_string(l)); ++l) {
    p.weights.push_back(
        FindTensor(tensors, prefix + ".W" + std::to_string(l)).ToMatrix());
    p.biases.push_back(
        FindTensor(tensors, prefix + ".b" + std::to_string(l)).ToMatrix());
    if (l == 0) p.layer_sizes.push_back(static_cast<int>(p.weights[0].rows()));
    p.layer_sizes.push_back(static_cast<int>(p.weights[l].cols()));
  }
  if (p.weights.empty()) {
    throw std::runtime_error("checkpoint has no network '" + prefix + "'");
  }
  ValidateMlp(p);
  return p;
}

std::vector<std::string> MlpNames(const std::string& prefix,
                                  const MlpParams& p) {
  std::vector<std::string> names;
  for (int l = 0; l < p.num_layers(); ++l) {
    names.push_back(prefix + ".W" + std::to_string(l));
    names.push_back(prefix + ".b" + std::to_string(l));
  }
  return names;
}

double ScalarOf(const std::vector<NamedTensor>& tensors,
                const std::string& name) {
  const NamedTensor& t = FindTensor(tensors, name);
  if (t.data.size() != 1) {
    throw std::runtime_error("checkpoint field '" + name + "' is not scalar");
  }
  return t.data[0];
}

void AppendActorCritic(const ActorCritic& ac, std::vector<NamedTensor>* out) {
  std::vector<double> flags;
  for (bool b : ac.mask.enabled) flags.push_back(b ? 1.0 : 0.0);
  out->push_back(NamedTensor::FromVector("meta.mask", flags));
  AppendMlp("actor", ac.actor, out);
  out->push_back(NamedTensor::FromMatrix("log_std", ac.head.log_std));
  AppendMlp("critic", ac.critic, out);
}

ActorCritic ReadActorCritic(const std::vector<NamedTensor>& tensors) {
  ActorCritic ac;
  const NamedTensor& flags = FindTensor(tensors, "meta.mask");
  if (flags.data.size() != kNumObsLayers) {
    throw std::runtime_error("checkpoint mask has wrong length");
  }
  for (int i = 0; i < kNumObsLayers; ++i) {
    ac.mask.enabled[i] = flags.data[i] != 0.0;
  }
  ac.actor = ReadMlp("actor", tensors);
  ac.head.log_std = FindTensor(tensors, "log_std").ToMatrix();
  ac.critic = ReadMlp("critic", tensors);
  if (ac.head.dim() != ac.actor.output_size() ||
      ac.critic.input_size() != ac.actor.input_size() ||
      ac.critic.output_size() != 1) {
    throw DimensionError("checkpoint actor/critic shapes disagree");
  }
  return ac;
}

void CheckKind(const std::vector<NamedTensor>& tensors, PolicyKind want) {
  if (CheckpointKind(tensors) != want) {
    throw std::runtime_error("checkpoint holds a different policy kind");
  }
}

}  // namespace

ObservationMask ObservationMask::Base() {
  return MaskOf({ObsLayer::kProprio, ObsLayer::kObjectPos,
                 ObsLayer::kPrevAction, ObsLayer::kTargetPos});
}

ObservationMask ObservationMask::State() {
  return MaskOf({ObsLayer::kProprio, ObsLayer::kObjectPos, ObsLayer::kObjectRot,
                 ObsLayer::kObjectCode, ObsLayer::kPrevAction,
                 ObsLayer::kTargetPos});
}

ObservationMask ObservationMask::Vision() {
  return MaskOf({ObsLayer::kProprio, ObsLayer::kPointCloud,
                 ObsLayer::kPrevAction, ObsLayer::kTargetPos});
}

int ObservationMask::Size(int point_cloud_size) const {
  int n = 0;
  for (ObsLayer l : kAllLayers) {
    if (has(l)) n += ObsLayerSize(l, point_cloud_size);
  }
  return n;
}

std::string ObservationMask::ToString() const {
  std::string s;
  for (ObsLayer l : kAllLayers) {
    if (!has(l)) continue;
    if (!s.empty()) s += ",";
    s += ObsLayerName(l);
  }
  return s;
}

ObservationMask ObservationMask::FromString(const std::string& s) {
  ObservationMask m;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    bool found = false;
    for (ObsLayer l : kAllLayers) {
      if (item == ObsLayerName(l)) {
        m.enabled[static_cast<int>(l)] = true;
        found = true;
      }
    }
    if (!found)
      throw std::invalid_argument("unknown observation layer: " + item);
  }
  return m;
}

Vector MaskObservation(const Observation& obs, const ObservationMask& mask) {
  Eigen::Index n = 0;
  for (ObsLayer l : kAllLayers) {
    if (mask.has(l)) n += obs.layer(l).size();
  }
  Vector out(n);
  Eigen::Index at = 0;
  for (ObsLayer l : kAllLayers) {
    if (!mask.has(l)) continue;
    const Vector& v = obs.layer(l);
    out.segment(at, v.size()) = v;
    at += v.size();
  }
  return out;
}

Matrix MaskObservations(const std::vector<Observation>& obs,
                        const ObservationMask& mask) {
  if (obs.empty()) return Matrix(0, 0);
  const Vector first = MaskObservation(obs[0], mask);
  Matrix out(static_cast<Eigen::Index>(obs.size()), first.size());
  out.row(0) = first.transpose();
  for (size_t i = 1; i < obs.size(); ++i) {
    const Vector v = MaskObservation(obs[i], mask);
    if (v.size() != first.size()) {
      throw DimensionError("MaskObservations: ragged observations");
    }
    out.row(static_cast<Eigen::Index>(i)) = v.transpose();
  }
  return out;
}

std::vector<Matrix*> ActorCritic::Tensors() {
  std::vector<Matrix*> t = actor.Tensors();
  t.push_back(&head.log_std);
  for (Matrix* m : critic.Tensors()) t.push_back(m);
  return t;
}

std::vector<const Matrix*> ActorCritic::Tensors() const {
  std::vector<const Matrix*> t = actor.Tensors();
  t.push_back(&head.log_std);
  for (const Matrix* m : critic.Tensors()) t.push_back(m);
  return t;
}

std::vector<std::string> ActorCritic::TensorNames() const {
  std::vector<std::string> names = MlpNames("actor", actor);
  names.push_back("log_std");
  for (const std::string& n : MlpNames("critic", critic)) names.push_back(n);
  return names;
}

ActorCritic MakeActorCritic(const ObservationMask& mask, int input_size,
                            int action_size, const NetworkConfig& net,
                            Rng& rng) {
  ActorCritic ac;
  ac.mask = mask;
  ac.actor = InitMlp(Sizes(input_size, net.hidden, action_size), rng,
                     net.hidden_gain, net.actor_output_gain);
  ac.head = GaussianHead::WithInitialStd(action_size, net.init_std);
  ac.critic = InitMlp(Sizes(input_size, net.hidden, 1), rng, net.hidden_gain,
                      net.critic_output_gain);
  return ac;
}

Vector CriticValues(const ActorCritic& ac, const Matrix& inputs) {
  return MlpForward(ac.critic, inputs).col(0);
}

BasePolicy MakeBasePolicy(const NetworkConfig& net, Rng& rng,
                          const ObservationMask& mask, int point_cloud_size) {
  BasePolicy p;
  p.net =
      MakeActorCritic(mask, mask.Size(point_cloud_size), kActionDim, net, rng);
  return p;
}

Vector BaseAct(const BasePolicy& policy, const Observation& obs) {
  const Vector x = MaskObservation(obs, policy.net.mask);
  if (x.size() != policy.net.input_size()) {
    throw DimensionError("BaseAct: observation size " +
                         std::to_string(x.size()) + " != policy input " +
                         std::to_string(policy.net.input_size()));
  }
  const Matrix mean = MlpForward(policy.net.actor, x.transpose());
  return ClipUnit(mean.row(0).transpose());
}

Matrix BaseActBatch(const BasePolicy& policy, const Matrix& masked_inputs) {
  return MlpForward(policy.net.actor, masked_inputs)
      .cwiseMax(-1.0)
      .cwiseMin(1.0);
}

HyperPolicy MakeHyperPolicy(int k, bool residual_enabled,
                            const NetworkConfig& net, Rng& rng,
                            int point_cloud_size) {
  if (k < 1) throw std::invalid_argument("MakeHyperPolicy: k must be >= 1");
  HyperPolicy p;
  p.k = k;
  p.residual_enabled = residual_enabled;
  const ObservationMask mask = ObservationMask::State();
  p.net = MakeActorCritic(mask, mask.Size(point_cloud_size),
                          p.residual_size() + k, net, rng);
  return p;
}

double Softplus(double x) {
  // log(1 + e^x) without overflow for large x.
  return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

HyperOutput DecodeHyperSample(const HyperPolicy& policy, const Vector& raw) {
  if (raw.size() != policy.residual_size() + policy.k) {
    throw DimensionError("DecodeHyperSample: sample has wrong size");
  }
  HyperOutput out;
  out.raw = raw;
  out.residual = Vector::Zero(kActionDim);
  if (policy.residual_enabled) out.residual = raw.head(kActionDim);
  out.weights.resize(policy.k);
  for (int i = 0; i < policy.k; ++i) {
    out.weights[i] = Softplus(raw[policy.residual_size() + i]) + kWeightFloor;
  }
  return out;
}

HyperOutput HyperAct(const HyperPolicy& policy, const Observation& obs,
                     Rng& rng, bool deterministic) {
  const Vector x = MaskObservation(obs, policy.net.mask);
  if (x.size() != policy.net.input_size()) {
    throw DimensionError("HyperAct: observation size mismatch");
  }
  const Matrix in = x.transpose();
  const Vector mean = MlpForward(policy.net.actor, in).row(0).transpose();
  const GaussianSample s =
      SampleGaussian(mean, policy.net.head, rng, deterministic);
  HyperOutput out = DecodeHyperSample(policy, s.action);
  out.log_prob = s.log_prob;
  out.value = CriticValues(policy.net, in)[0];
  return out;
}

Vector CombineActionsUnclipped(const std::vector<Vector>& base_actions,
                               const Vector& residual, const Vector& weights) {
  if (base_actions.empty() ||
      static_cast<Eigen::Index>(base_actions.size()) != weights.size()) {
    throw DimensionError(
        "CombineActions: " + std::to_string(base_actions.size()) +
        " base actions for " + std::to_string(weights.size()) + " weights");
  }
  const Eigen::Index k = weights.size();
  double total = 0.0;
  for (Eigen::Index i = 0; i < k; ++i) {
    if (!(weights[i] >= 0.0)) {
      throw std::invalid_argument("CombineActions: negative weight");
    }
    total += weights[i];
  }
  Vector out = residual;
  if (total >= kWeightFloor * static_cast<double>(k)) {
    for (Eigen::Index i = 0; i < k; ++i) {
      out += (weights[i] / total) * base_actions[i];
    }
  } else {
    // Degenerate weights: fall back to the plain mean of the experts.
    for (Eigen::Index i = 0; i < k; ++i) {
      out += base_actions[i] / static_cast<double>(k);
    }
  }
  return out;
}

Vector CombineActions(const std::vector<Vector>& base_actions,
                      const HyperOutput& out) {
  return ClipUnit(
      CombineActionsUnclipped(base_actions, out.residual, out.weights));
}

ObservationMask VisionPolicy::TrunkMask() {
  return MaskOf(
      {ObsLayer::kProprio, ObsLayer::kPrevAction, ObsLayer::kTargetPos});
}

std::vector<Matrix*> VisionPolicy::Tensors() {
  std::vector<Matrix*> t = point_encoder.Tensors();
  for (Matrix* m : trunk.Tensors()) t.push_back(m);
  return t;
}

std::vector<const Matrix*> VisionPolicy::Tensors() const {
  std::vector<const Matrix*> t = point_encoder.Tensors();
  for (const Matrix* m : trunk.Tensors()) t.push_back(m);
  return t;
}

std::vector<std::string> VisionPolicy::TensorNames() const {
  std::vector<std::string> names = MlpNames("encoder", point_encoder);
  for (const std::string& n : MlpNames("trunk", trunk)) names.push_back(n);
  return names;
}

VisionPolicy MakeVisionPolicy(const VisionConfig& cfg, Rng& rng,
                              int point_cloud_size) {
  VisionPolicy p;
  p.point_cloud_size = point_cloud_size;
  const double gain = std::sqrt(2.0);
  p.point_encoder =
      InitMlp(Sizes(2, cfg.encoder_hidden, cfg.feature_size), rng, gain, gain);
  p.trunk = InitMlp(Sizes(cfg.feature_size + VisionPolicy::TrunkMask().Size(),
                          cfg.trunk_hidden, kActionDim),
                    rng, gain, 0.01);
  return p;
}

Matrix VisionForward(const VisionPolicy& policy,
                     const std::vector<Observation>& obs, VisionCache* cache) {
  const int batch = static_cast<int>(obs.size());
  const int points = policy.point_cloud_size;
  if (points <= 0)
    throw std::invalid_argument("VisionForward: empty point cloud");
  Matrix pts(static_cast<Eigen::Index>(batch) * points, 2);
  for (int b = 0; b < batch; ++b) {
    const Vector& pc = obs[b].point_cloud();
    if (pc.size() == 0) {
      throw std::invalid_argument("VisionForward: empty point cloud");
    }
    if (pc.size() != 2 * points) {
      throw DimensionError("VisionForward: point cloud has " +
                           std::to_string(pc.size() / 2) +
                           " points, expected " + std::to_string(points));
    }
    for (int p = 0; p < points; ++p) {
      pts(b * points + p, 0) = pc[2 * p];
      pts(b * points + p, 1) = pc[2 * p + 1];
    }
  }
  const Matrix feats =
      MlpForward(policy.point_encoder, pts, cache ? &cache->encoder : nullptr);
  const int f = static_cast<int>(feats.cols());
  const Matrix rest = MaskObservations(obs, VisionPolicy::TrunkMask());
  Matrix trunk_in(batch, f + rest.cols());
  std::vector<int> argmax(static_cast<size_t>(batch) * f);
  for (int b = 0; b < batch; ++b) {
    for (int c = 0; c < f; ++c) {
      int best = b * points;
      for (int p = 1; p < points; ++p) {
        if (feats(b * points + p, c) > feats(best, c)) best = b * points + p;
      }
      trunk_in(b, c) = feats(best, c);
      argmax[static_cast<size_t>(b) * f + c] = best;
    }
  }
  if (batch > 0) trunk_in.rightCols(rest.cols()) = rest;
  if (trunk_in.cols() != policy.trunk.input_size()) {
    throw DimensionError("VisionForward: trunk input size mismatch");
  }
  Matrix out =
      MlpForward(policy.trunk, trunk_in, cache ? &cache->trunk : nullptr);
  if (cache != nullptr) {
    cache->argmax = std::move(argmax);
    cache->batch = batch;
  }
  return out;
}

std::vector<Matrix> VisionBackward(const VisionPolicy& policy,
                                   const VisionCache& cache,
                                   const Matrix& upstream) {
  const MlpBackwardResult trunk =
      MlpBackward(policy.trunk, cache.trunk, upstream);
  const int f = policy.point_encoder.output_size();
  const Eigen::Index rows = cache.encoder.inputs.front().rows();
  Matrix feat_grad = Matrix::Zero(rows, f);
  for (int b = 0; b < cache.batch; ++b) {
    for (int c = 0; c < f; ++c) {
      feat_grad(cache.argmax[static_cast<size_t>(b) * f + c], c) +=
          trunk.input_grads(b, c);
    }
  }
  const MlpBackwardResult enc =
      MlpBackward(policy.point_encoder, cache.encoder, feat_grad);
  std::vector<Matrix> grads;
  for (const Matrix* m : enc.param_grads.Tensors()) grads.push_back(*m);
  for (const Matrix* m : trunk.param_grads.Tensors()) grads.push_back(*m);
  return grads;
}

Vector StudentAct(const VisionPolicy& policy, const Observation& obs) {
  return ClipUnit(VisionForward(policy, {obs}).row(0).transpose());
}

PolicyKind CheckpointKind(const std::vector<NamedTensor>& tensors) {
  const int kind = static_cast<int>(ScalarOf(tensors, "meta.kind"));
  if (kind < 0 || kind > 2) throw std::runtime_error("unknown policy kind");
  return static_cast<PolicyKind>(kind);
}

std::vector<NamedTensor> SaveBasePolicy(const BasePolicy& p) {
  std::vector<NamedTensor> out;
  out.push_back(NamedTensor::Scalar("meta.kind", 0));
  out.push_back(
      NamedTensor::Scalar("meta.trained_object_id", p.trained_object_id));
  AppendActorCritic(p.net, &out);
  return out;
}

BasePolicy LoadBasePolicy(const std::vector<NamedTensor>& tensors) {
  CheckKind(tensors, PolicyKind::kBase);
  BasePolicy p;
  p.trained_object_id =
      static_cast<int>(ScalarOf(tensors, "meta.trained_object_id"));
  p.net = ReadActorCritic(tensors);
  if (p.net.action_size() != kActionDim) {
    throw DimensionError("base checkpoint action size mismatch");
  }
  return p;
}

std::vector<NamedTensor> SaveHyperPolicy(const HyperPolicy& p) {
  std::vector<NamedTensor> out;
  out.push_back(NamedTensor::Scalar("meta.kind", 1));
  out.push_back(NamedTensor::Scalar("meta.k", p.k));
  out.push_back(NamedTensor::Scalar("meta.residual", p.residual_enabled));
  AppendActorCritic(p.net, &out);
  return out;
}

HyperPolicy LoadHyperPolicy(const std::vector<NamedTensor>& tensors) {
  CheckKind(tensors, PolicyKind::kHyper);
  HyperPolicy p;
  p.k = static_cast<int>(ScalarOf(tensors, "meta.k"));
  p.residual_enabled = ScalarOf(tensors, "meta.residual") != 0.0;
  p.net = ReadActorCritic(tensors);
  if (p.net.action_size() != p.residual_size() + p.k) {
    throw DimensionError("hyper checkpoint head size mismatch");
  }
  return p;
}

std::vector<NamedTensor> SaveVisionPolicy(const VisionPolicy& p) {
  std::vector<NamedTensor> out;
  out.push_back(NamedTensor::Scalar("meta.kind", 2));
  out.push_back(
      NamedTensor::Scalar("meta.point_cloud_size", p.point_cloud_size));
  AppendMlp("encoder", p.point_encoder, &out);
  AppendMlp("trunk", p.trunk, &out);
  return out;
}

VisionPolicy LoadVisionPolicy(const std::vector<NamedTensor>& tensors) {
  CheckKind(tensors, PolicyKind::kVision);
  VisionPolicy p;
  p.point_cloud_size =
      static_cast<int>(ScalarOf(tensors, "meta.point_cloud_size"));
  p.point_encoder = ReadMlp("encoder", tensors);
  p.trunk = ReadMlp("trunk", tensors);
  return p;
}

}  // namespace resgrasp
