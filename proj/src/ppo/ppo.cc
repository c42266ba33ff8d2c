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

#include "resgrasp/ppo/ppo.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>

#include "resgrasp/numerics/errors.h"
#include "resgrasp/numerics/gaussian.h"
#include "resgrasp/numerics/mlp.h"

namespace resgrasp {
namespace {

Matrix Rows(const Matrix& m, const std::vector<int>& idx) {
  Matrix out(static_cast<Eigen::Index>(idx.size()), m.cols());
  for (size_t i = 0; i < idx.size(); ++i) out.row(i) = m.row(idx[i]);
  return out;
}

Vector Rows(const Vector& v, const std::vector<int>& idx) {
  Vector out(static_cast<Eigen::Index>(idx.size()));
  for (size_t i = 0; i < idx.size(); ++i) out[i] = v[idx[i]];
  return out;
}

void Shuffle(std::vector<int>& v, Rng& rng) {
  for (int i = static_cast<int>(v.size()) - 1; i > 0; --i) {
    std::swap(v[i], v[rng.UniformInt(i + 1)]);
  }
}

}  // namespace

void PpoConfig::Validate() const {
  if (!(gamma > 0.0 && gamma <= 1.0)) {
    throw std::invalid_argument("PpoConfig: gamma must be in (0, 1]");
  }
  if (!(gae_lambda >= 0.0 && gae_lambda <= 1.0)) {
    throw std::invalid_argument("PpoConfig: gae_lambda must be in [0, 1]");
  }
  if (!(clip > 0.0)) throw std::invalid_argument("PpoConfig: clip must be > 0");
  if (rollout_steps < 1 || epochs < 1 || minibatches < 1 || num_envs < 1 ||
      iterations < 0) {
    throw std::invalid_argument("PpoConfig: counts must be positive");
  }
  if (minibatches > rollout_steps * num_envs) {
    throw std::invalid_argument("PpoConfig: more minibatches than samples");
  }
}

void ComputeGae(const std::vector<double>& rewards,
                const std::vector<double>& values,
                const std::vector<double>& dones, double last_value,
                double gamma, double lambda, std::vector<double>* advantages,
                std::vector<double>* returns) {
  const size_t n = rewards.size();
  if (values.size() != n || dones.size() != n) {
    throw DimensionError("ComputeGae: length mismatch");
  }
  advantages->assign(n, 0.0);
  returns->assign(n, 0.0);
  double next_adv = 0.0;
  double next_value = last_value;
  for (size_t i = n; i-- > 0;) {
    const double not_done = 1.0 - dones[i];
    const double delta = rewards[i] + gamma * next_value * not_done - values[i];
    next_adv = delta + gamma * lambda * not_done * next_adv;
    (*advantages)[i] = next_adv;
    (*returns)[i] = next_adv + values[i];
    next_value = values[i];
  }
}

void ComputeGae(RolloutBuffer& buffer, double gamma, double lambda) {
  const int t_max = buffer.steps;
  const int n = buffer.num_envs;
  buffer.advantages = Vector::Zero(buffer.size());
  buffer.returns = Vector::Zero(buffer.size());
  std::vector<double> r(t_max), v(t_max), d(t_max), adv, ret;
  for (int e = 0; e < n; ++e) {
    for (int t = 0; t < t_max; ++t) {
      r[t] = buffer.rewards[t * n + e];
      v[t] = buffer.values[t * n + e];
      d[t] = buffer.dones[t * n + e];
    }
    ComputeGae(r, v, d, buffer.last_values[e], gamma, lambda, &adv, &ret);
    for (int t = 0; t < t_max; ++t) {
      buffer.advantages[t * n + e] = adv[t];
      buffer.returns[t * n + e] = ret[t];
    }
  }
}

ActionMapper DirectActionMapper() {
  return [](const std::vector<Observation>&, const Matrix& samples) {
    std::vector<Action> actions(samples.rows());
    for (Eigen::Index i = 0; i < samples.rows(); ++i) {
      actions[i] = Action::FromVector(samples.row(i).transpose());
    }
    return actions;
  };
}

RolloutBuffer CollectRollout(const ActorCritic& net, const ActionMapper& mapper,
                             VecEnv& envs, int steps, double gamma, Rng& rng) {
  const int n = envs.size();
  RolloutBuffer buf;
  buf.steps = steps;
  buf.num_envs = n;
  const int rows = steps * n;
  buf.inputs.resize(rows, net.input_size());
  buf.samples.resize(rows, net.action_size());
  buf.log_probs.resize(rows);
  buf.rewards.resize(rows);
  buf.values.resize(rows);
  buf.dones.resize(rows);
  double env_reward = 0.0;

  for (int t = 0; t < steps; ++t) {
    const std::vector<Observation>& obs = envs.observations();
    const Matrix x = MaskObservations(obs, net.mask);
    if (x.cols() != net.input_size()) {
      throw DimensionError("CollectRollout: observation/network size mismatch");
    }
    const Matrix mean = MlpForward(net.actor, x);
    const Vector values = CriticValues(net, x);
    Matrix samples(n, net.action_size());
    for (int e = 0; e < n; ++e) {
      const GaussianSample s =
          SampleGaussian(mean.row(e).transpose(), net.head, rng, false);
      samples.row(e) = s.action.transpose();
      buf.log_probs[t * n + e] = s.log_prob;
    }
    const std::vector<Action> actions = mapper(obs, samples);
    const VecStepResult r = envs.Step(actions);

    // Time-limit truncation: fold the critic's estimate of the cut-off tail
    // into the reward so GAE can treat the boundary as terminal.
    std::vector<Observation> finals;
    std::vector<int> final_envs;
    for (int e = 0; e < n; ++e) {
      if (r.dones[e]) {
        finals.push_back(r.final_observations[e]);
        final_envs.push_back(e);
      }
    }
    Vector bootstrap = Vector::Zero(n);
    if (!finals.empty()) {
      const Vector fv = CriticValues(net, MaskObservations(finals, net.mask));
      for (size_t i = 0; i < final_envs.size(); ++i) {
        bootstrap[final_envs[i]] = fv[static_cast<Eigen::Index>(i)];
      }
    }
    for (int e = 0; e < n; ++e) {
      const int row = t * n + e;
      buf.inputs.row(row) = x.row(e);
      buf.samples.row(row) = samples.row(e);
      buf.values[row] = values[e];
      buf.rewards[row] = r.rewards[e] + gamma * bootstrap[e];
      buf.dones[row] = r.dones[e] ? 1.0 : 0.0;
      env_reward += r.rewards[e];
    }
    buf.finished.insert(buf.finished.end(), r.finished.begin(),
                        r.finished.end());
  }
  buf.last_values =
      CriticValues(net, MaskObservations(envs.observations(), net.mask));
  buf.mean_env_reward = env_reward / rows;
  return buf;
}

PpoBatchLoss PpoLoss(const ActorCritic& net, const Matrix& inputs,
                     const Matrix& samples, const Vector& old_log_probs,
                     const Vector& advantages, const Vector& returns,
                     const PpoConfig& cfg) {
  const Eigen::Index m = inputs.rows();
  const double inv_m = 1.0 / static_cast<double>(m);
  PpoBatchLoss out;

  MlpCache actor_cache;
  const Matrix mean = MlpForward(net.actor, inputs, &actor_cache);
  const Vector log_probs = GaussianLogProbBatch(mean, net.head, samples);
  const GaussianLogProbGrads lp =
      GaussianLogProbGradients(mean, net.head, samples);

  // d(loss)/d(log_prob) per row.
  Vector d_logp(m);
  int clipped = 0;
  for (Eigen::Index i = 0; i < m; ++i) {
    const double ratio = std::exp(log_probs[i] - old_log_probs[i]);
    const double a = advantages[i];
    const double clipped_ratio =
        std::clamp(ratio, 1.0 - cfg.clip, 1.0 + cfg.clip);
    out.policy_loss += -std::min(ratio * a, clipped_ratio * a) * inv_m;
    const bool flat = (a >= 0.0 && ratio > 1.0 + cfg.clip) ||
                      (a < 0.0 && ratio < 1.0 - cfg.clip);
    d_logp[i] = flat ? 0.0 : -a * ratio * inv_m;
    out.mean_ratio += ratio * inv_m;
    out.max_ratio_dev = std::max(out.max_ratio_dev, std::abs(ratio - 1.0));
    if (std::abs(ratio - 1.0) > cfg.clip) ++clipped;
    out.approx_kl += (old_log_probs[i] - log_probs[i]) * inv_m;
  }
  out.clip_fraction = static_cast<double>(clipped) * inv_m;

  MlpCache critic_cache;
  const Matrix v = MlpForward(net.critic, inputs, &critic_cache);
  Matrix d_v(m, 1);
  for (Eigen::Index i = 0; i < m; ++i) {
    const double err = v(i, 0) - returns[i];
    out.value_loss += err * err * inv_m;
    d_v(i, 0) = 2.0 * cfg.value_coeff * err * inv_m;
  }
  out.entropy = GaussianEntropy(net.head);
  out.total = out.policy_loss + cfg.value_coeff * out.value_loss -
              cfg.entropy_coeff * out.entropy;

  const Matrix d_mean = lp.d_mean.array().colwise() * d_logp.array();
  const MlpBackwardResult actor_grads =
      MlpBackward(net.actor, actor_cache, d_mean);
  Matrix d_log_std = (lp.d_log_std.array().colwise() * d_logp.array())
                         .colwise()
                         .sum()
                         .matrix();
  // Entropy of a diagonal Gaussian grows by one per unit of each log_std.
  d_log_std.array() -= cfg.entropy_coeff;
  const MlpBackwardResult critic_grads =
      MlpBackward(net.critic, critic_cache, d_v);

  for (const Matrix* g : actor_grads.param_grads.Tensors()) {
    out.grads.push_back(*g);
  }
  out.grads.push_back(d_log_std);
  for (const Matrix* g : critic_grads.param_grads.Tensors()) {
    out.grads.push_back(*g);
  }
  return out;
}

PpoUpdateStats PpoUpdate(ActorCritic& net, AdamState& adam,
                         RolloutBuffer& buffer, const PpoConfig& cfg,
                         Rng& rng) {
  const int total = buffer.size();
  PpoUpdateStats stats;

  Vector& adv = buffer.advantages;
  const double mu = adv.mean();
  const double var = (adv.array() - mu).square().mean();
  const double sd = std::sqrt(var);
  adv = ((adv.array() - mu) / (sd + 1e-8)).matrix();
  stats.adv_mean = adv.mean();
  stats.adv_std = std::sqrt((adv.array() - stats.adv_mean).square().mean());

  std::vector<int> order(total);
  std::iota(order.begin(), order.end(), 0);
  const int mb_size = total / cfg.minibatches;
  const std::vector<std::string> names = net.TensorNames();
  int count = 0;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    Shuffle(order, rng);
    for (int b = 0; b < cfg.minibatches; ++b) {
      const int begin = b * mb_size;
      const int end = b + 1 == cfg.minibatches ? total : begin + mb_size;
      const std::vector<int> idx(order.begin() + begin, order.begin() + end);
      PpoBatchLoss loss =
          PpoLoss(net, Rows(buffer.inputs, idx), Rows(buffer.samples, idx),
                  Rows(buffer.log_probs, idx), Rows(adv, idx),
                  Rows(buffer.returns, idx), cfg);
      if (!std::isfinite(loss.total)) {
        std::ostringstream msg;
        msg << "PpoUpdate: non-finite loss at epoch " << epoch << " minibatch "
            << b << " (policy " << loss.policy_loss << ", value "
            << loss.value_loss << ", entropy " << loss.entropy
            << ", mean ratio " << loss.mean_ratio << ")";
        throw NumericError(msg.str());
      }
      if (epoch == 0 && b == 0) {
        stats.first_minibatch_ratio_dev = loss.max_ratio_dev;
      }
      const AdamStepInfo info = AdamStep(net.Tensors(), loss.grads, adam,
                                         cfg.lr, cfg.max_grad_norm, names);
      stats.policy_loss += loss.policy_loss;
      stats.value_loss += loss.value_loss;
      stats.entropy += loss.entropy;
      stats.mean_ratio += loss.mean_ratio;
      stats.clip_fraction += loss.clip_fraction;
      stats.approx_kl += loss.approx_kl;
      stats.grad_norm += info.grad_norm;
      ++count;
    }
  }
  const double inv = 1.0 / count;
  stats.policy_loss *= inv;
  stats.value_loss *= inv;
  stats.entropy *= inv;
  stats.mean_ratio *= inv;
  stats.clip_fraction *= inv;
  stats.approx_kl *= inv;
  stats.grad_norm *= inv;
  return stats;
}

std::vector<IterationMetrics> TrainLoop(ActorCritic& net,
                                        const ActionMapper& mapper,
                                        VecEnv& envs, const PpoConfig& cfg,
                                        uint64_t seed,
                                        const TrainCallbacks& callbacks) {
  cfg.Validate();
  if (envs.size() != cfg.num_envs) {
    throw std::invalid_argument("TrainLoop: env count differs from config");
  }
  Rng rollout_rng(seed, 1);
  Rng update_rng(seed, 2);
  AdamState adam =
      MakeAdamState(static_cast<const ActorCritic&>(net).Tensors());
  std::vector<IterationMetrics> history;
  double success_rate = 0.0;
  for (int it = 0; it < cfg.iterations; ++it) {
    RolloutBuffer buf = CollectRollout(net, mapper, envs, cfg.rollout_steps,
                                       cfg.gamma, rollout_rng);
    ComputeGae(buf, cfg.gamma, cfg.gae_lambda);
    const PpoUpdateStats stats = PpoUpdate(net, adam, buf, cfg, update_rng);

    int full = 0, wins = 0;
    for (const EpisodeRecord& ep : buf.finished) {
      if (!ep.full_length) continue;
      ++full;
      wins += ep.success ? 1 : 0;
    }
    if (full > 0) success_rate = static_cast<double>(wins) / full;

    IterationMetrics m;
    m.iteration = it;
    m.mean_reward = buf.mean_env_reward;
    m.success_rate = success_rate;
    m.clip_fraction = stats.clip_fraction;
    m.value_loss = stats.value_loss;
    m.entropy = stats.entropy;
    history.push_back(m);
    if (callbacks.on_iteration) callbacks.on_iteration(m);
  }
  return history;
}

std::string MetricsCsv(const std::vector<IterationMetrics>& metrics) {
  std::string out =
      "iteration,mean_reward,success_rate,clip_fraction,value_loss,entropy\n";
  char line[256];
  for (const IterationMetrics& m : metrics) {
    std::snprintf(line, sizeof(line), "%d,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                  m.iteration, m.mean_reward, m.success_rate, m.clip_fraction,
                  m.value_loss, m.entropy);
    out += line;
  }
  return out;
}

}  // namespace resgrasp
