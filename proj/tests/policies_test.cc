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
#include <numeric>
#include <vector>

#include "doctest.h"
#include "oracles.h"
#include "resgrasp/env/dataset.h"
#include "resgrasp/env/planar_env.h"
#include "resgrasp/numerics/checkpoint.h"
#include "resgrasp/numerics/errors.h"
#include "resgrasp/numerics/rng.h"

namespace resgrasp {
namespace {

const Dataset& Objects() {
  static const Dataset d = GenerateObjects(5, {6, 2, 2});
  return d;
}

Vector RandomAction(Rng& rng) {
  Vector a(kActionDim);
  for (int i = 0; i < kActionDim; ++i) a[i] = rng.Uniform(-1.0, 1.0);
  return a;
}

std::vector<Observation> SomeObservations(int n, uint64_t seed) {
  std::vector<Observation> out;
  Rng rng(seed, 0);
  for (int i = 0; i < n; ++i) {
    PlanarGraspEnv env;
    Observation o = env.Reset(Objects().train[i % 6], seed, i);
    for (int t = 0; t < 3 + i; ++t) {
      o = env.Step(Action::FromVector(RandomAction(rng))).observation;
    }
    out.push_back(o);
  }
  return out;
}

TEST_CASE("mask sizes") {
  CHECK(ObservationMask::Base().Size() == 16 + 3 + 7 + 3);
  int full = 0;
  for (int l = 0; l < kNumObsLayers; ++l) {
    full += ObsLayerSize(static_cast<ObsLayer>(l));
  }
  CHECK(ObservationMask::State().Size() ==
        full - ObsLayerSize(ObsLayer::kPointCloud));
  CHECK(ObservationMask::Vision().has(ObsLayer::kPointCloud));
  CHECK_FALSE(ObservationMask::Base().has(ObsLayer::kObjectCode));
  for (const ObservationMask& m :
       {ObservationMask::Base(), ObservationMask::State(),
        ObservationMask::Vision()}) {
    CHECK(ObservationMask::FromString(m.ToString()) == m);
    CHECK(MaskObservation(SomeObservations(1, 1)[0], m).size() == m.Size());
  }
}

TEST_CASE("moe identity: one expert, zero residual") {
  Rng rng(1, 0);
  for (int i = 0; i < 100; ++i) {
    const Vector a = RandomAction(rng);
    Vector w(1);
    w << rng.Uniform(0.01, 10.0);
    const Vector out =
        CombineActionsUnclipped({a}, Vector::Zero(kActionDim), w);
    CHECK(out == a);
  }
}

TEST_CASE("moe positive-scale invariance") {
  Rng rng(2, 0);
  for (int i = 0; i < 100; ++i) {
    const std::vector<Vector> bases = {RandomAction(rng), RandomAction(rng),
                                       RandomAction(rng)};
    const Vector res = 0.1 * RandomAction(rng);
    Vector w(3);
    for (int j = 0; j < 3; ++j) w[j] = rng.Uniform(0.1, 5.0);
    const Vector ref = CombineActionsUnclipped(bases, res, w);
    // Powers of two rescale every weight and their sum exactly.
    for (double c : {0.25, 2.0, 1024.0}) {
      CHECK(CombineActionsUnclipped(bases, res, c * w) == ref);
    }
    // Other factors agree to rounding.
    const Vector scaled = CombineActionsUnclipped(bases, res, 3.7 * w);
    CHECK((scaled - ref).cwiseAbs().maxCoeff() < 1e-15);
  }
  // Small integer weights stay exact under integer scaling.
  const std::vector<Vector> bases = {Vector::Constant(kActionDim, 0.3),
                                     Vector::Constant(kActionDim, -0.7)};
  Vector w(2);
  w << 1.0, 3.0;
  CHECK(CombineActionsUnclipped(bases, Vector::Zero(kActionDim), 3.0 * w) ==
        CombineActionsUnclipped(bases, Vector::Zero(kActionDim), w));
}

TEST_CASE("moe convex combination with weights (1, 3)") {
  Rng rng(3, 0);
  const Vector a = RandomAction(rng), b = RandomAction(rng);
  Vector w(2);
  w << 1.0, 3.0;
  const Vector expected = (Vector::Zero(kActionDim) + 0.25 * a) + 0.75 * b;
  CHECK(CombineActionsUnclipped({a, b}, Vector::Zero(kActionDim), w) ==
        expected);
}

TEST_CASE("moe residual adds, the result is clipped") {
  const Vector a = Vector::Constant(kActionDim, 0.9);
  Vector w(1);
  w << 2.0;
  const Vector res = Vector::Constant(kActionDim, 0.5);
  CHECK(CombineActionsUnclipped({a}, res, w)
            .isApprox(Vector::Constant(kActionDim, 1.4)));
  HyperOutput out;
  out.residual = res;
  out.weights = w;
  CHECK(CombineActions({a}, out) == Vector::Constant(kActionDim, 1.0));
}

TEST_CASE("moe argument errors and degenerate weights") {
  const Vector a = Vector::Zero(kActionDim), b = Vector::Ones(kActionDim);
  Vector w(2);
  w << 1.0, -1.0;
  CHECK_THROWS(CombineActionsUnclipped({a, b}, a, w));
  CHECK_THROWS_AS(CombineActionsUnclipped({a}, a, Vector::Ones(2)),
                  DimensionError);
  const Vector mean = CombineActionsUnclipped({a, b}, a, Vector::Zero(2));
  CHECK(mean == Vector::Constant(kActionDim, 0.5));
}

TEST_CASE("hyper sample decoding") {
  Rng rng(4, 0);
  const NetworkConfig net;
  const HyperPolicy h = MakeHyperPolicy(3, true, net, rng);
  CHECK(h.net.head.dim() == kActionDim + 3);
  Vector raw(kActionDim + 3);
  for (int i = 0; i < raw.size(); ++i) raw[i] = 0.1 * i - 0.4;
  const HyperOutput out = DecodeHyperSample(h, raw);
  CHECK(out.residual == raw.head(kActionDim));
  for (int i = 0; i < 3; ++i) {
    const double x = raw[kActionDim + i];
    CHECK(out.weights[i] == std::log1p(std::exp(x)) + kWeightFloor);
  }
  CHECK(Softplus(800.0) == 800.0);
  CHECK(Softplus(-800.0) >= 0.0);
  const HyperPolicy weights_only = MakeHyperPolicy(2, false, net, rng);
  CHECK(weights_only.net.head.dim() == 2);
  const HyperOutput w = DecodeHyperSample(weights_only, Vector::Zero(2));
  CHECK(w.residual == Vector::Zero(kActionDim));
  CHECK_THROWS_AS(DecodeHyperSample(weights_only, Vector::Zero(3)),
                  DimensionError);
}

TEST_CASE("zeroed residual head and k = 1 reproduce the base policy exactly") {
  Rng rng(6, 0);
  const NetworkConfig net;
  BasePolicy base = MakeBasePolicy(net, rng);
  // Give the base a non-trivial output layer.
  base.net.actor.weights.back() = oracle::RandomMatrix(
      static_cast<int>(base.net.actor.weights.back().rows()), kActionDim, rng,
      0.3);
  HyperPolicy hyper = MakeHyperPolicy(1, true, net, rng);
  hyper.net.actor.weights.back().leftCols(kActionDim).setZero();
  hyper.net.actor.biases.back().leftCols(kActionDim).setZero();
  hyper.net.actor.biases.back()(0, kActionDim) = 0.7;

  PlanarGraspEnv a, b;
  Observation oa = a.Reset(Objects().train[0], 3, 0);
  Observation ob = b.Reset(Objects().train[0], 3, 0);
  Rng unused(0, 0);
  for (int t = 0; t < 100; ++t) {
    const Vector base_action = BaseAct(base, oa);
    const HyperOutput h = HyperAct(hyper, ob, unused, true);
    const Vector mixed = CombineActions({BaseAct(base, ob)}, h);
    REQUIRE(mixed == base_action);
    oa = a.Step(Action::FromVector(base_action)).observation;
    ob = b.Step(Action::FromVector(mixed)).observation;
  }
  CHECK(a.state().object_pos == b.state().object_pos);
  CHECK(a.state().gripper.base_pos == b.state().gripper.base_pos);
}

TEST_CASE("base act is the clipped mean and checks dimensions") {
  Rng rng(7, 0);
  BasePolicy p = MakeBasePolicy(NetworkConfig{}, rng);
  p.net.actor.biases.back().setConstant(3.0);
  const Observation o = SomeObservations(1, 2)[0];
  const Vector act = BaseAct(p, o);
  CHECK(act.maxCoeff() <= 1.0);
  const Matrix batch = MaskObservations({o, o}, p.net.mask);
  CHECK(BaseActBatch(p, batch).row(1).transpose() == act);
  BasePolicy full =
      MakeBasePolicy(NetworkConfig{}, rng, ObservationMask::State());
  CHECK_THROWS_AS(BaseActBatch(full, batch), DimensionError);
}

TEST_CASE("vision encoder matches a per-point loop") {
  Rng rng(8, 0);
  const VisionPolicy v = MakeVisionPolicy(VisionConfig{}, rng);
  const std::vector<Observation> obs = SomeObservations(3, 4);
  const Matrix out = VisionForward(v, obs);
  for (size_t b = 0; b < obs.size(); ++b) {
    const Vector& pc = obs[b].point_cloud();
    const int f = v.point_encoder.output_size();
    Vector pooled = Vector::Constant(f, -1e300);
    for (int p = 0; p < v.point_cloud_size; ++p) {
      Matrix pt(1, 2);
      pt << pc[2 * p], pc[2 * p + 1];
      const Matrix feat = MlpForward(v.point_encoder, pt);
      for (int c = 0; c < f; ++c) pooled[c] = std::max(pooled[c], feat(0, c));
    }
    const Vector rest = MaskObservation(obs[b], VisionPolicy::TrunkMask());
    Matrix in(1, f + rest.size());
    in << pooled.transpose(), rest.transpose();
    const Matrix expected = MlpForward(v.trunk, in);
    CHECK((out.row(b) - expected).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("vision output is invariant to point order") {
  Rng rng(9, 0);
  const VisionPolicy v = MakeVisionPolicy(VisionConfig{}, rng);
  std::vector<Observation> obs = SomeObservations(2, 5);
  const Matrix ref = VisionForward(v, obs);
  std::vector<int> perm(v.point_cloud_size);
  std::iota(perm.begin(), perm.end(), 0);
  for (int trial = 0; trial < 5; ++trial) {
    for (int i = v.point_cloud_size - 1; i > 0; --i) {
      std::swap(perm[i], perm[rng.UniformInt(i + 1)]);
    }
    std::vector<Observation> shuffled = obs;
    for (Observation& o : shuffled) {
      const Vector pc = o.layer(ObsLayer::kPointCloud);
      Vector& dst = o.layer(ObsLayer::kPointCloud);
      for (int p = 0; p < v.point_cloud_size; ++p) {
        dst[2 * p] = pc[2 * perm[p]];
        dst[2 * p + 1] = pc[2 * perm[p] + 1];
      }
    }
    CHECK(VisionForward(v, shuffled) == ref);
  }
}

TEST_CASE("vision gradients match central differences") {
  Rng rng(10, 0);
  VisionPolicy v = MakeVisionPolicy(VisionConfig{{8}, 6, {10}}, rng);
  const std::vector<Observation> obs = SomeObservations(2, 6);
  const Matrix up = oracle::RandomMatrix(2, kActionDim, rng);
  VisionCache cache;
  VisionForward(v, obs, &cache);
  const std::vector<Matrix> grads = VisionBackward(v, cache, up);
  auto loss = [&]() {
    return (up.array() * VisionForward(v, obs).array()).sum();
  };
  const std::vector<double> fd =
      oracle::CentralDifferences(v.Tensors(), loss, 1e-6);
  CHECK(oracle::RelativeError(oracle::Flatten(grads), fd) < 1e-7);
}

TEST_CASE("vision rejects malformed point clouds") {
  Rng rng(11, 0);
  const VisionPolicy v = MakeVisionPolicy(VisionConfig{}, rng);
  std::vector<Observation> obs = SomeObservations(1, 7);
  obs[0].layer(ObsLayer::kPointCloud) = Vector(0);
  CHECK_THROWS(VisionForward(v, obs));
  obs[0].layer(ObsLayer::kPointCloud) = Vector::Zero(10);
  CHECK_THROWS_AS(VisionForward(v, obs), DimensionError);
}

TEST_CASE("checkpoint save load save is byte identical for every kind") {
  Rng rng(12, 0);
  BasePolicy base =
      MakeBasePolicy(NetworkConfig{}, rng, ObservationMask::State());
  base.trained_object_id = 17;
  const std::string b1 = EncodeCheckpoint(SaveBasePolicy(base));
  const BasePolicy base2 = LoadBasePolicy(DecodeCheckpoint(b1));
  CHECK(EncodeCheckpoint(SaveBasePolicy(base2)) == b1);
  CHECK(base2.trained_object_id == 17);
  CHECK(base2.net.mask == ObservationMask::State());
  CHECK(CheckpointKind(DecodeCheckpoint(b1)) == PolicyKind::kBase);

  const HyperPolicy hyper = MakeHyperPolicy(3, false, NetworkConfig{}, rng);
  const std::string h1 = EncodeCheckpoint(SaveHyperPolicy(hyper));
  const HyperPolicy hyper2 = LoadHyperPolicy(DecodeCheckpoint(h1));
  CHECK(EncodeCheckpoint(SaveHyperPolicy(hyper2)) == h1);
  CHECK(hyper2.k == 3);
  CHECK_FALSE(hyper2.residual_enabled);
  CHECK(CheckpointKind(DecodeCheckpoint(h1)) == PolicyKind::kHyper);

  const VisionPolicy vis = MakeVisionPolicy(VisionConfig{}, rng);
  const std::string v1 = EncodeCheckpoint(SaveVisionPolicy(vis));
  CHECK(EncodeCheckpoint(
            SaveVisionPolicy(LoadVisionPolicy(DecodeCheckpoint(v1)))) == v1);
  CHECK(CheckpointKind(DecodeCheckpoint(v1)) == PolicyKind::kVision);
  CHECK_THROWS(LoadHyperPolicy(DecodeCheckpoint(v1)));
}

}  // namespace
}  // namespace resgrasp
