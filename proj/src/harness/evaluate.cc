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

#include "resgrasp/harness/evaluate.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>
#include <sstream>
#include <stdexcept>

#include "resgrasp/dagger/dagger.h"
#include "resgrasp/numerics/rng.h"

namespace resgrasp {
namespace {

std::vector<Action> RowsToActions(const Matrix& m) {
  std::vector<Action> out;
  out.reserve(static_cast<size_t>(m.rows()));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    out.push_back(Action::FromVector(m.row(i).transpose()));
  }
  return out;
}

double Clamp1(double v) { return std::clamp(v, -1.0, 1.0); }

struct ScriptState {
  std::vector<int> phase;
  std::vector<int> close_steps;
};

Action ScriptedStep(const EnvState& s, const EnvConfig& cfg, int* phase,
                    int* close_steps) {
  Action a;
  const double tip_y = 0.5 * (s.fingertips[0].y() + s.fingertips[1].y());
  const double obj_y = s.object_pos.y();
  const double dx = s.object_pos.x() - s.gripper.base_pos.x();
  if (*phase == 0) {
    // Open hand, centre above the object and descend.
    a.joint_targets.fill(-1.0);
    a.wrench = {Clamp1(50.0 * dx), -1.0, 0.0};
    if (tip_y < obj_y + 0.03) *phase = 1;
  }
  if (*phase == 1) {
    a.joint_targets.fill(-1.0);
    a.wrench = {Clamp1(50.0 * dx), Clamp1(60.0 * (obj_y - tip_y)), 0.0};
    if (std::abs(obj_y - tip_y) < 0.004) *phase = 2;
  }
  if (*phase == 2) {
    a.joint_targets.fill(1.0);
    a.wrench = {0.0, Clamp1(60.0 * (obj_y - tip_y)), 0.0};
    if (s.attached || ++*close_steps > 20) *phase = 3;
  }
  if (*phase == 3) {
    a.joint_targets.fill(1.0);
    a.wrench = {0.0, Clamp1(40.0 * (cfg.target.y() - obj_y)), 0.0};
  }
  return a;
}

}  // namespace

BatchPolicy BasePolicyFn(const BasePolicy& policy) {
  return [&policy](const std::vector<Observation>& obs,
                   const std::vector<const PlanarGraspEnv*>&) {
    return RowsToActions(BaseActionsBatch({&policy}, obs)[0]);
  };
}

BatchPolicy HyperPolicyFn(const HyperPolicy& hyper,
                          std::vector<const BasePolicy*> bases) {
  return [&hyper, bases](const std::vector<Observation>& obs,
                         const std::vector<const PlanarGraspEnv*>&) {
    return RowsToActions(TeacherActions(Teacher{&hyper, bases}, obs));
  };
}

BatchPolicy StudentPolicyFn(const VisionPolicy& student) {
  return [&student](const std::vector<Observation>& obs,
                    const std::vector<const PlanarGraspEnv*>&) {
    Matrix m = VisionForward(student, obs);
    m = m.cwiseMax(-1.0).cwiseMin(1.0);
    return RowsToActions(m);
  };
}

BatchPolicy ScriptedGraspPolicy() {
  auto state = std::make_shared<ScriptState>();
  return [state](const std::vector<Observation>&,
                 const std::vector<const PlanarGraspEnv*>& envs) {
    state->phase.resize(envs.size(), 0);
    state->close_steps.resize(envs.size(), 0);
    std::vector<Action> out;
    out.reserve(envs.size());
    for (size_t i = 0; i < envs.size(); ++i) {
      const EnvState& s = envs[i]->state();
      if (s.t == 0) {
        state->phase[i] = 0;
        state->close_steps[i] = 0;
      }
      out.push_back(ScriptedStep(s, envs[i]->config(), &state->phase[i],
                                 &state->close_steps[i]));
    }
    return out;
  };
}

BatchPolicy RandomPolicy(uint64_t seed) {
  auto rng = std::make_shared<Rng>(seed, 7);
  return [rng](const std::vector<Observation>& obs,
               const std::vector<const PlanarGraspEnv*>&) {
    std::vector<Action> out(obs.size());
    for (Action& a : out) {
      for (double& j : a.joint_targets) j = rng->Uniform(-1.0, 1.0);
      for (double& w : a.wrench) w = rng->Uniform(-1.0, 1.0);
    }
    return out;
  };
}

const SplitReport& EvalReport::Get(Split s) const {
  for (const SplitReport& r : splits) {
    if (r.split == s) return r;
  }
  throw std::out_of_range(std::string("EvalReport: no split ") + SplitName(s));
}

SplitReport EvaluateSplit(const BatchPolicy& policy,
                          const std::vector<ObjectShape>& objects, Split split,
                          int episodes, uint64_t seed, const EnvConfig& env_cfg,
                          const RewardConfig& reward_cfg) {
  if (episodes < 1) throw std::invalid_argument("EvaluateSplit: episodes < 1");
  SplitReport report;
  report.split = split;
  if (objects.empty()) return report;

  const size_t n = objects.size() * static_cast<size_t>(episodes);
  std::vector<PlanarGraspEnv> envs(n, PlanarGraspEnv(env_cfg));
  std::vector<Observation> obs(n);
  std::vector<const PlanarGraspEnv*> env_ptrs(n);
  std::vector<std::vector<GraspPose>> poses(n);
  for (size_t o = 0; o < objects.size(); ++o) {
    const uint64_t object_seed =
        MixSeed(seed, static_cast<uint64_t>(objects[o].id));
    for (int e = 0; e < episodes; ++e) {
      const size_t i = o * episodes + e;
      obs[i] = envs[i].Reset(objects[o], object_seed, e);
      env_ptrs[i] = &envs[i];
      poses[i].reserve(env_cfg.episode_length);
    }
  }
  for (int t = 0; t < env_cfg.episode_length; ++t) {
    const std::vector<Action> actions = policy(obs, env_ptrs);
    if (actions.size() != n) {
      throw std::logic_error("EvaluateSplit: policy returned wrong batch");
    }
    for (size_t i = 0; i < n; ++i) {
      if (envs[i].state().done) continue;
      obs[i] = envs[i].Step(actions[i]).observation;
      poses[i].push_back(CurrentGraspPose(envs[i].state()));
    }
  }

  double success_sum = 0.0, d_sum = 0.0;
  for (size_t o = 0; o < objects.size(); ++o) {
    ObjectResult r;
    r.id = objects[o].id;
    r.category = objects[o].category;
    for (int e = 0; e < episodes; ++e) {
      const size_t i = o * episodes + e;
      r.success_rate += envs[i].state().success ? 1.0 : 0.0;
      r.mean_d += DMetric(poses[i], objects[o].proposal, reward_cfg);
    }
    r.success_rate /= episodes;
    r.mean_d /= episodes;
    success_sum += r.success_rate;
    d_sum += r.mean_d;
    report.objects.push_back(r);
  }
  report.success_rate = success_sum / static_cast<double>(objects.size());
  report.mean_d = d_sum / static_cast<double>(objects.size());
  return report;
}

EvalReport Evaluate(const BatchPolicy& policy, const Dataset& dataset,
                    const std::vector<Split>& splits, int episodes,
                    uint64_t seed, const EnvConfig& env_cfg,
                    const RewardConfig& reward_cfg) {
  EvalReport report;
  report.seed = seed;
  report.episodes_per_object = episodes;
  for (Split s : splits) {
    report.splits.push_back(EvaluateSplit(policy, dataset.Get(s), s, episodes,
                                          seed, env_cfg, reward_cfg));
  }
  return report;
}

std::string ReportText(const EvalReport& report, const std::string& title) {
  std::ostringstream os;
  char buf[160];
  os << title << "\n";
  std::snprintf(buf, sizeof(buf), "seed %llu, %d episodes per object\n",
                static_cast<unsigned long long>(report.seed),
                report.episodes_per_object);
  os << buf;
  for (const SplitReport& s : report.splits) {
    std::snprintf(buf, sizeof(buf),
                  "  %-12s objects %3zu  success %6.2f%%  mean D %9.3f\n",
                  SplitName(s.split), s.objects.size(), 100.0 * s.success_rate,
                  s.mean_d);
    os << buf;
  }
  return os.str();
}

std::string ReportCsv(const EvalReport& report) {
  std::ostringstream os;
  os << "split,object_id,category,success_rate,mean_d\n";
  char buf[160];
  for (const SplitReport& s : report.splits) {
    std::snprintf(buf, sizeof(buf), "%s,-1,all,%.17g,%.17g\n",
                  SplitName(s.split), s.success_rate, s.mean_d);
    os << buf;
    for (const ObjectResult& r : s.objects) {
      std::snprintf(buf, sizeof(buf), "%s,%d,%s,%.17g,%.17g\n",
                    SplitName(s.split), r.id, CategoryName(r.category),
                    r.success_rate, r.mean_d);
      os << buf;
    }
  }
  return os.str();
}

}  // namespace resgrasp
