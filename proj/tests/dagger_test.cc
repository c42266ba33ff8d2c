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

#include "resgrasp/dagger/dagger.h"

#include <vector>

#include "doctest.h"
#include "resgrasp/env/dataset.h"
#include "resgrasp/numerics/rng.h"
#include "resgrasp/policies/policies.h"
#include "resgrasp/ppo/vec_env.h"
#include "resgrasp/rewards/rewards.h"

namespace resgrasp {
namespace {

const Dataset& Objects() {
  static const Dataset d = GenerateObjects(3, {4, 1, 1});
  return d;
}

std::vector<const ObjectShape*> TrainPointers() {
  std::vector<const ObjectShape*> out;
  for (const ObjectShape& o : Objects().train) out.push_back(&o);
  return out;
}

struct TeacherFixture {
  std::vector<BasePolicy> bases;
  HyperPolicy hyper;
  Teacher teacher;

  explicit TeacherFixture(int k, uint64_t seed = 1) {
    Rng rng(seed, 0);
    for (int i = 0; i < k; ++i)
      bases.push_back(MakeBasePolicy(NetworkConfig{}, rng));
    hyper = MakeHyperPolicy(k, true, NetworkConfig{}, rng);
    teacher.hyper = &hyper;
    for (const BasePolicy& b : bases) teacher.bases.push_back(&b);
  }
};

VecEnv MakeEnvs(int n, uint64_t seed) {
  return VecEnv(EnvConfig{}, TrainPointers(), n, seed,
                MakeRewardFn(RewardKind::kStage2, RewardConfig{}));
}

TEST_CASE("teacher label is the clipped combination of deterministic outputs") {
  TeacherFixture f(3);
  VecEnv envs = MakeEnvs(6, 4);
  const std::vector<Observation>& obs = envs.observations();
  const Matrix labels = TeacherActions(f.teacher, obs);
  REQUIRE(labels.rows() == 6);
  REQUIRE(labels.cols() == kActionDim);
  Rng unused(0, 0);
  for (size_t i = 0; i < obs.size(); ++i) {
    std::vector<Vector> base_actions;
    for (const BasePolicy& b : f.bases)
      base_actions.push_back(BaseAct(b, obs[i]));
    const HyperOutput h = HyperAct(f.hyper, obs[i], unused, true);
    const Vector expected = CombineActions(base_actions, h);
    const Vector got = labels.row(static_cast<Eigen::Index>(i)).transpose();
    CHECK((got - expected).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK(got.cwiseAbs().maxCoeff() <= 1.0);
  }
}

TEST_CASE("distillation leaves the teacher untouched and stays on-policy") {
  TeacherFixture f(2);
  const std::vector<NamedTensor> hyper_before = SaveHyperPolicy(f.hyper);
  const std::vector<NamedTensor> base_before = SaveBasePolicy(f.bases[0]);
  Rng rng(5, 0);
  VisionPolicy student = MakeVisionPolicy(VisionConfig{}, rng);
  DaggerConfig cfg;
  cfg.num_envs = 8;
  cfg.iterations = 5;
  VecEnv envs = MakeEnvs(8, 6);
  const DaggerResult r = Distill(f.teacher, student, envs, cfg, 9);
  CHECK(r.metrics.size() == 5);
  CHECK(r.on_policy_fraction >= 0.99);
  const std::vector<NamedTensor> hyper_after = SaveHyperPolicy(f.hyper);
  REQUIRE(hyper_after.size() == hyper_before.size());
  for (size_t i = 0; i < hyper_before.size(); ++i) {
    CHECK(hyper_after[i].name == hyper_before[i].name);
    CHECK(hyper_after[i].data == hyper_before[i].data);
  }
  const std::vector<NamedTensor> base_after = SaveBasePolicy(f.bases[0]);
  for (size_t i = 0; i < base_before.size(); ++i) {
    CHECK(base_after[i].data == base_before[i].data);
  }
}

TEST_CASE("aggregation lowers the on-policy share") {
  TeacherFixture f(1);
  Rng rng(6, 0);
  VisionPolicy student = MakeVisionPolicy(VisionConfig{}, rng);
  DaggerConfig cfg;
  cfg.num_envs = 8;
  cfg.iterations = 4;
  cfg.aggregate = true;
  VecEnv envs = MakeEnvs(8, 6);
  const DaggerResult r = Distill(f.teacher, student, envs, cfg, 9);
  // Rows seen per iteration: 8, 16, 24, 32 with 8 fresh each time.
  CHECK(r.on_policy_fraction == doctest::Approx(32.0 / 80.0).epsilon(1e-12));
}

TEST_CASE("student regresses a fixed teacher") {
  TeacherFixture f(2, 7);
  Rng rng(8, 0);
  VisionPolicy student = MakeVisionPolicy(VisionConfig{}, rng);
  DaggerConfig cfg;
  cfg.num_envs = 32;
  cfg.iterations = 200;
  cfg.lr = 1e-3;
  VecEnv envs = MakeEnvs(32, 10);
  const DaggerResult r = Distill(f.teacher, student, envs, cfg, 11);
  std::vector<double> mse;
  for (const DaggerMetrics& m : r.metrics) mse.push_back(m.label_mse);
  const std::vector<double> windows = WindowMeans(mse, 50);
  REQUIRE(windows.size() == 4);
  CHECK(windows.back() < 0.25 * windows.front());
}

TEST_CASE("distillation is reproducible") {
  auto run = []() {
    TeacherFixture f(2, 3);
    Rng rng(4, 0);
    VisionPolicy student = MakeVisionPolicy(VisionConfig{}, rng);
    DaggerConfig cfg;
    cfg.num_envs = 8;
    cfg.iterations = 6;
    VecEnv envs = MakeEnvs(8, 12);
    return DaggerCsv(Distill(f.teacher, student, envs, cfg, 13).metrics);
  };
  const std::string a = run();
  CHECK(a == run());
  CHECK(a.rfind("iteration,label_mse,success_rate\n", 0) == 0);
}

TEST_CASE("window means") {
  const std::vector<double> v = {1, 2, 3, 4, 5, 6, 7};
  const std::vector<double> w = WindowMeans(v, 3);
  REQUIRE(w.size() == 2);
  CHECK(w[0] == 2.0);
  CHECK(w[1] == 5.0);
  CHECK(WindowMeans(v, 8).empty());
  CHECK_THROWS(WindowMeans(v, 0));
}

TEST_CASE("config and size errors") {
  DaggerConfig cfg;
  CHECK(cfg.rollout_steps == 1);
  CHECK(cfg.epochs == 5);
  CHECK(cfg.minibatches == 4);
  CHECK_NOTHROW(cfg.Validate());
  cfg.minibatches = 0;
  CHECK_THROWS(cfg.Validate());
  TeacherFixture f(1);
  Rng rng(1, 0);
  VisionPolicy student = MakeVisionPolicy(VisionConfig{}, rng);
  DaggerConfig ok;
  ok.num_envs = 8;
  VecEnv envs = MakeEnvs(4, 1);
  CHECK_THROWS(Distill(f.teacher, student, envs, ok, 1));
}

}  // namespace
}  // namespace resgrasp
