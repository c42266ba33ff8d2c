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

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <stdexcept>
#include <string>

#include "resgrasp/numerics/adam.h"
#include "resgrasp/numerics/errors.h"
#include "resgrasp/numerics/mlp.h"
#include "resgrasp/numerics/rng.h"

namespace resgrasp {
namespace {

void Shuffle(std::vector<int>& v, Rng& rng) {
  for (int i = static_cast<int>(v.size()) - 1; i > 0; --i) {
    std::swap(v[i], v[rng.UniformInt(i + 1)]);
  }
}

}  // namespace

void DaggerConfig::Validate() const {
  if (rollout_steps < 1 || epochs < 1 || minibatches < 1 || num_envs < 1 ||
      iterations < 0) {
    throw std::invalid_argument("DaggerConfig: counts must be positive");
  }
  if (minibatches > rollout_steps * num_envs) {
    throw std::invalid_argument("DaggerConfig: more minibatches than samples");
  }
}

std::vector<HyperOutput> HyperActBatch(const HyperPolicy& policy,
                                       const std::vector<Observation>& obs) {
  const Matrix x = MaskObservations(obs, policy.net.mask);
  if (x.cols() != policy.net.input_size()) {
    throw DimensionError("HyperActBatch: observation size mismatch");
  }
  const Matrix mean = MlpForward(policy.net.actor, x);
  std::vector<HyperOutput> out;
  out.reserve(obs.size());
  for (Eigen::Index i = 0; i < mean.rows(); ++i) {
    out.push_back(DecodeHyperSample(policy, mean.row(i).transpose()));
  }
  return out;
}

std::vector<Matrix> BaseActionsBatch(
    const std::vector<const BasePolicy*>& bases,
    const std::vector<Observation>& obs) {
  std::vector<Matrix> out;
  out.reserve(bases.size());
  for (const BasePolicy* b : bases) {
    const Matrix x = MaskObservations(obs, b->net.mask);
    if (x.cols() != b->net.input_size()) {
      throw DimensionError("BaseActionsBatch: observation size mismatch");
    }
    out.push_back(BaseActBatch(*b, x));
  }
  return out;
}

Matrix TeacherActions(const Teacher& teacher,
                      const std::vector<Observation>& obs) {
  if (teacher.hyper == nullptr ||
      static_cast<int>(teacher.bases.size()) != teacher.hyper->k) {
    throw DimensionError("TeacherActions: base count differs from k");
  }
  const std::vector<HyperOutput> hyper = HyperActBatch(*teacher.hyper, obs);
  const std::vector<Matrix> base = BaseActionsBatch(teacher.bases, obs);
  Matrix out(static_cast<Eigen::Index>(obs.size()), kActionDim);
  std::vector<Vector> per_base(base.size());
  for (size_t i = 0; i < obs.size(); ++i) {
    for (size_t b = 0; b < base.size(); ++b) {
      per_base[b] = base[b].row(static_cast<Eigen::Index>(i)).transpose();
    }
    out.row(static_cast<Eigen::Index>(i)) =
        CombineActions(per_base, hyper[i]).transpose();
  }
  return out;
}

DaggerResult Distill(
    const Teacher& teacher, VisionPolicy& student, VecEnv& envs,
    const DaggerConfig& cfg, uint64_t seed,
    const std::function<void(const DaggerMetrics&)>& on_iteration) {
  cfg.Validate();
  if (envs.size() != cfg.num_envs) {
    throw std::invalid_argument("Distill: env count differs from config");
  }
  Rng rng(seed, 3);
  AdamState adam =
      MakeAdamState(static_cast<const VisionPolicy&>(student).Tensors());
  const std::vector<std::string> names = student.TensorNames();

  DaggerResult result;
  std::vector<Observation> data_obs;
  Matrix data_labels(0, kActionDim);
  double success_rate = 0.0;
  double fresh_rows = 0.0, used_rows = 0.0;

  for (int it = 0; it < cfg.iterations; ++it) {
    if (!cfg.aggregate) {
      data_obs.clear();
      data_labels.resize(0, kActionDim);
    }
    const size_t fresh_begin = data_obs.size();
    double sq_err = 0.0;
    int full = 0, wins = 0;
    for (int t = 0; t < cfg.rollout_steps; ++t) {
      const std::vector<Observation>& obs = envs.observations();
      const Matrix labels = TeacherActions(teacher, obs);
      const Matrix acts =
          VisionForward(student, obs).cwiseMax(-1.0).cwiseMin(1.0);
      sq_err += (acts - labels).squaredNorm();
      data_obs.insert(data_obs.end(), obs.begin(), obs.end());
      data_labels.conservativeResize(data_labels.rows() + labels.rows(),
                                     Eigen::NoChange);
      data_labels.bottomRows(labels.rows()) = labels;
      std::vector<Action> actions(acts.rows());
      for (Eigen::Index e = 0; e < acts.rows(); ++e) {
        actions[e] = Action::FromVector(acts.row(e).transpose());
      }
      const VecStepResult r = envs.Step(actions);
      for (const EpisodeRecord& ep : r.finished) {
        if (!ep.full_length) continue;
        ++full;
        wins += ep.success ? 1 : 0;
      }
    }
    if (full > 0) success_rate = static_cast<double>(wins) / full;
    const int fresh = static_cast<int>(data_obs.size() - fresh_begin);

    const int total = static_cast<int>(data_obs.size());
    std::vector<int> order(total);
    std::iota(order.begin(), order.end(), 0);
    const int mb_size = total / cfg.minibatches;
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
      Shuffle(order, rng);
      for (int b = 0; b < cfg.minibatches; ++b) {
        const int begin = b * mb_size;
        const int end = b + 1 == cfg.minibatches ? total : begin + mb_size;
        std::vector<Observation> mb_obs;
        Matrix mb_labels(end - begin, kActionDim);
        for (int i = begin; i < end; ++i) {
          mb_obs.push_back(data_obs[order[i]]);
          mb_labels.row(i - begin) = data_labels.row(order[i]);
        }
        VisionCache cache;
        const Matrix pred = VisionForward(student, mb_obs, &cache);
        const double scale = 2.0 / static_cast<double>(pred.size());
        const Matrix upstream = scale * (pred - mb_labels);
        const std::vector<Matrix> grads =
            VisionBackward(student, cache, upstream);
        AdamStep(student.Tensors(), grads, adam, cfg.lr, cfg.max_grad_norm,
                 names);
        used_rows += end - begin;
        for (int i = begin; i < end; ++i) {
          if (order[i] >= static_cast<int>(fresh_begin)) fresh_rows += 1.0;
        }
      }
    }

    DaggerMetrics m;
    m.iteration = it;
    m.label_mse = sq_err / (static_cast<double>(fresh) * kActionDim);
    m.success_rate = success_rate;
    result.metrics.push_back(m);
    if (on_iteration) on_iteration(m);
  }
  result.on_policy_fraction = used_rows > 0 ? fresh_rows / used_rows : 1.0;
  return result;
}

std::string DaggerCsv(const std::vector<DaggerMetrics>& metrics) {
  std::string out = "iteration,label_mse,success_rate\n";
  char line[128];
  for (const DaggerMetrics& m : metrics) {
    std::snprintf(line, sizeof(line), "%d,%.17g,%.17g\n", m.iteration,
                  m.label_mse, m.success_rate);
    out += line;
  }
  return out;
}

std::vector<double> WindowMeans(const std::vector<double>& values, int window) {
  if (window < 1)
    throw std::invalid_argument("WindowMeans: window must be >= 1");
  std::vector<double> means;
  for (size_t begin = 0; begin + window <= values.size(); begin += window) {
    double s = 0.0;
    for (int i = 0; i < window; ++i) s += values[begin + i];
    means.push_back(s / window);
  }
  return means;
}

}  // namespace resgrasp
