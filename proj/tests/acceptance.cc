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

// End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
// exits non-zero if any criterion fails.
//
// Usage: acceptance [work_dir]

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.h"
#include "resgrasp/dagger/dagger.h"
#include "resgrasp/harness/config.h"
#include "resgrasp/harness/evaluate.h"
#include "resgrasp/harness/pipeline.h"
#include "resgrasp/numerics/mlp.h"
#include "resgrasp/numerics/rng.h"
#include "resgrasp/policies/policies.h"
#include "resgrasp/ppo/ppo.h"
#include "resgrasp/rewards/rewards.h"

namespace resgrasp {
namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

// Tolerances and budgets.
constexpr double kGradTol = 1e-6;
constexpr double kGradSeconds = 30.0;
constexpr int kGradNetworks = 100;
constexpr double kGaeTol = 1e-12;
constexpr double kGaeSeconds = 10.0;
constexpr int kGaeTrajectories = 1000;
constexpr double kRewardTol = 1e-12;
constexpr double kBaseSuccess = 0.80;
constexpr int kBaseMaxIterations = 2000;
constexpr int kBaseEnvs = 256;
constexpr double kBaseSeconds = 15 * 60.0;
constexpr double kResidualMargin = 0.05;
constexpr double kAblationSeconds = 2 * 3600.0;
constexpr double kStage2Gain = 0.02;
constexpr double kUnseenGap = 0.05;
constexpr double kStudentGap = 0.10;
constexpr int kMseWindow = 50;
constexpr int kEvalEpisodes = 10;
const std::vector<uint64_t> kSeeds = {1, 2, 3};

double Seconds(Clock::time_point since) {
  return std::chrono::duration<double>(Clock::now() - since).count();
}

Clock::time_point g_start;

void Progress(const std::string& msg) {
  std::printf("[%7.1fs] %s\n", Seconds(g_start), msg.c_str());
  std::fflush(stdout);
}

std::string Fmt(const char* format, double a, double b = 0, double c = 0,
                double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), format, a, b, c, d);
  return buf;
}

struct Outcome {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
};

// ---------------------------------------------------------------------------

Outcome GradientSoundness() {
  const auto start = Clock::now();
  Rng rng(101, 0);
  double worst = 0.0;
  for (int n = 0; n < kGradNetworks; ++n) {
    std::vector<int> sizes = {1 + rng.UniformInt(6)};
    const int hidden = 1 + rng.UniformInt(3);
    for (int l = 0; l < hidden; ++l) sizes.push_back(2 + rng.UniformInt(7));
    sizes.push_back(1 + rng.UniformInt(5));
    MlpParams p = InitMlp(sizes, rng, std::sqrt(2.0), 1.0);
    for (Matrix* t : p.Tensors()) {
      if (t->rows() == 1) *t = oracle::RandomMatrix(1, t->cols(), rng, 0.3);
    }
    const int batch = 1 + rng.UniformInt(5);
    const Matrix x = oracle::RandomMatrix(batch, sizes.front(), rng);
    const Matrix up = oracle::RandomMatrix(batch, sizes.back(), rng);
    const oracle::MlpGradCheck r = oracle::CheckMlpGradients(p, x, up, 1e-6);
    worst = std::max({worst, r.param_error, r.input_error});
  }
  const double secs = Seconds(start);
  return {1, "gradient soundness", worst < kGradTol && secs < kGradSeconds,
          Fmt("max relative error %.3g over %.0f networks, %.2f s", worst,
              kGradNetworks, secs)};
}

Outcome GaeOracle() {
  const auto start = Clock::now();
  Rng rng(102, 0);
  double worst = 0.0;
  for (int n = 0; n < kGaeTrajectories; ++n) {
    const int len = 1 + rng.UniformInt(10);
    std::vector<double> r, v, d;
    for (int t = 0; t < len; ++t) {
      r.push_back(rng.Normal());
      v.push_back(rng.Normal());
      d.push_back(rng.Uniform() < 0.2 ? 1.0 : 0.0);
    }
    const double last = rng.Normal();
    const double gamma = rng.Uniform(0.5, 1.0), lambda = rng.Uniform();
    std::vector<double> adv, ret, adv_ref, ret_ref;
    ComputeGae(r, v, d, last, gamma, lambda, &adv, &ret);
    oracle::BruteForceGae(r, v, d, last, gamma, lambda, &adv_ref, &ret_ref);
    for (int t = 0; t < len; ++t) {
      worst = std::max({worst, std::abs(adv[t] - adv_ref[t]),
                        std::abs(ret[t] - ret_ref[t])});
    }
  }
  const double secs = Seconds(start);
  return {2, "GAE oracle", worst <= kGaeTol && secs < kGaeSeconds,
          Fmt("max abs error %.3g over %.0f trajectories, %.3f s", worst,
              kGaeTrajectories, secs)};
}

Outcome MoeAlgebra() {
  Rng rng(103, 0);
  bool ok = true;
  std::string why;
  // Identity: one base, zero residual.
  for (int trial = 0; trial < 100; ++trial) {
    const Vector base = oracle::RandomMatrix(kActionDim, 1, rng, 0.5).col(0);
    const Vector w = Vector::Constant(1, rng.Uniform(0.1, 5.0));
    const Vector out =
        CombineActionsUnclipped({base}, Vector::Zero(kActionDim), w);
    if (out != base) {
      ok = false;
      why = "identity";
    }
  }
  // Scale invariance with exactly representable scales.
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<Vector> bases;
    for (int i = 0; i < 3; ++i) {
      bases.push_back(oracle::RandomMatrix(kActionDim, 1, rng).col(0));
    }
    const Vector residual = oracle::RandomMatrix(kActionDim, 1, rng).col(0);
    Vector lambda(3);
    for (int i = 0; i < 3; ++i) lambda[i] = 1 + rng.UniformInt(8);
    const Vector ref = CombineActionsUnclipped(bases, residual, lambda);
    for (double c : {0.25, 2.0, 8.0, 1024.0}) {
      if (CombineActionsUnclipped(bases, residual, c * lambda) != ref) {
        ok = false;
        why = "scale invariance";
      }
    }
  }
  // lambda = (1, 3) mixes 1/4 and 3/4.
  Vector a(kActionDim), b(kActionDim);
  a << 0.5, -1.0, 0.25, 1.0, 0.0, -0.5, 0.75;
  b << -0.5, 1.0, 0.75, 0.0, 1.0, 0.25, -0.25;
  Vector lambda(2);
  lambda << 1.0, 3.0;
  const Vector mixed =
      CombineActionsUnclipped({a, b}, Vector::Zero(kActionDim), lambda);
  if (mixed != Vector(0.25 * a + 0.75 * b)) {
    ok = false;
    why = "convex example";
  }
  return {3, "MoE algebra", ok,
          ok ? "identity, scale invariance and (1,3) mixing exact"
             : "mismatch in " + why};
}

Outcome RewardFormulas() {
  const RewardConfig c;
  bool ok = c.pose_coeff == 0.05 && c.reach_hand_coeff == 1.0 &&
            c.reach_finger_coeff == 0.5 && c.lift_base == 0.1 &&
            c.lift_az_coeff == 0.1 && c.move_offset == 0.9 &&
            c.move_coeff == 2.0 && c.bonus_scale == 10.0 &&
            c.bonus_threshold == 0.05;
  const RewardConfig p = RewardConfig::FullHandScale();
  ok = ok && p.finger_dist_sum_max == 0.6 && p.hand_dist_max == 0.12 &&
       p.joint_l1_max == 6.0;

  const Joints q = {-0.3, 0.6, -0.3, 0.6};
  EnvState s;
  s.object_pos = c.target + Vec2(0.05, 0.0);
  s.hand_center = s.object_pos;
  s.fingertips = {s.object_pos + Vec2(-0.02, 0.0),
                  s.object_pos + Vec2(0.02, 0.0)};
  s.gripper.joints = q;
  Action up;
  up.wrench[1] = 1.0;
  auto near = [](double x, double y) { return std::abs(x - y) <= kRewardTol; };
  const RewardBreakdown r = BaseTaskReward(s, up, q);
  ok = ok && r.f1 == 2 && r.f2 == 3 && near(r.lift, 0.2) &&
       near(r.bonus, 2.0 / 3.0) && near(r.move, 0.9 - 2.0 * 0.05) &&
       near(r.reach, -0.5 * 0.04) &&
       near(r.task, r.reach + r.lift + r.move + r.bonus);
  // Object on target: move 0.9, bonus 1.
  EnvState at = s;
  at.object_pos = c.target;
  at.hand_center = c.target;
  Action still;
  const RewardBreakdown r0 = BaseTaskReward(at, still, q);
  ok = ok && near(r0.move, 0.9) && near(r0.bonus, 1.0) && near(r0.lift, 0.1);
  // Joint gate closed: base move off, stage-2 move on.
  EnvState loose = s;
  loose.gripper.joints = {0.4, -0.4, 0.4, -0.4};
  const RewardBreakdown rl = BaseTaskReward(loose, up, q);
  ok = ok && rl.f1 == 2 && rl.f2 == 2 && rl.move == 0.0 &&
       near(Stage2Reward(loose, up), 0.2 + 0.8 + 2.0 / 3.0);
  ok = ok && near(PoseReward({0.1, 0.2, 0.3, 0.4}, {0.0, 0.5, 0.3, -0.1}),
                  -0.05 * 0.9);
  return {4, "reward formulas", ok,
          ok ? "constants and gates exact to 1e-12" : "a reward value differs"};
}

// ---------------------------------------------------------------------------

ExperimentConfig AcceptanceConfig(uint64_t seed) {
  ExperimentConfig cfg;
  cfg.seed = seed;
  cfg.eval_episodes = kEvalEpisodes;
  return cfg;
}

std::vector<ObjectShape> HeldOut(const Dataset& d) {
  std::vector<ObjectShape> out = d.test_seen;
  out.insert(out.end(), d.test_unseen.begin(), d.test_unseen.end());
  return out;
}

Outcome SingleObjectBase(const Dataset& d) {
  ExperimentConfig cfg = AcceptanceConfig(1);
  const ObjectShape* object = nullptr;
  for (const ObjectShape& o : d.train) {
    if (o.category == ShapeCategory::kBox) {
      object = &o;
      break;
    }
  }
  const auto start = Clock::now();
  const BaseTrainResult r =
      TrainBasePolicy(cfg, *object, ObservationMask::Base(), RewardKind::kBase,
                      MixSeed(cfg.seed, 600));
  const double secs = Seconds(start);
  const SplitReport rep =
      EvaluateSplit(BasePolicyFn(r.policy), {*object}, Split::kTrain, 20,
                    MixSeed(cfg.seed, 601), cfg.env, cfg.reward);
  const bool ok = rep.success_rate >= kBaseSuccess &&
                  cfg.base_ppo.iterations <= kBaseMaxIterations &&
                  cfg.base_ppo.num_envs == kBaseEnvs && secs <= kBaseSeconds;
  return {
      5, "single-object base policy", ok,
      Fmt("object %.0f success %.1f%% after %.0f iterations, %.0f s",
          object->id, 100 * rep.success_rate, cfg.base_ppo.iterations, secs)};
}

Outcome GeometryUnaware(const Dataset& d, const fs::path& work) {
  // One training object per seen category except star.
  std::vector<const ObjectShape*> objects;
  for (ShapeCategory c :
       {ShapeCategory::kEllipse, ShapeCategory::kBox, ShapeCategory::kLShape}) {
    for (const ObjectShape& o : d.train) {
      if (o.category == c) {
        objects.push_back(&o);
        break;
      }
    }
  }
  const std::vector<ObjectShape> held_out = HeldOut(d);
  std::ofstream csv(work / "geometry_unaware.csv");
  csv << "object_id,seed,mask,held_out_success\n";
  int wins = 0, losses = 0;
  std::string detail;
  for (const ObjectShape* o : objects) {
    double geo = 0.0, full = 0.0;
    for (uint64_t seed : kSeeds) {
      ExperimentConfig cfg = AcceptanceConfig(seed);
      for (bool state_mask : {false, true}) {
        const ObservationMask mask =
            state_mask ? ObservationMask::State() : ObservationMask::Base();
        const BaseTrainResult r = TrainBasePolicy(
            cfg, *o, mask, RewardKind::kBase, MixSeed(seed, 700 + o->id));
        const SplitReport rep =
            EvaluateSplit(BasePolicyFn(r.policy), held_out, Split::kTestSeen, 5,
                          MixSeed(seed, 701), cfg.env, cfg.reward);
        (state_mask ? full : geo) += rep.success_rate / kSeeds.size();
        csv << o->id << ',' << seed << ',' << (state_mask ? "full" : "geo")
            << ',' << Fmt("%.17g", rep.success_rate) << '\n';
      }
      Progress(Fmt("geometry-unaware: object %.0f seed %.0f done", o->id,
                   static_cast<double>(seed)));
    }
    if (geo > full) ++wins;
    if (geo < full) ++losses;
    detail +=
        Fmt("obj %.0f geo %.1f%% full %.1f%%; ", o->id, 100 * geo, 100 * full);
  }
  return {7, "geometry-unaware generalization", losses == 0 && wins >= 2,
          detail + Fmt("strict wins %.0f of %.0f", wins, objects.size())};
}

// Hyper-policy with sampled rather than mean actions. Diagnostic only.
BatchPolicy SampledHyperPolicyFn(const HyperPolicy& hyper,
                                 const std::vector<BasePolicy>& bases,
                                 uint64_t seed) {
  auto rng = std::make_shared<Rng>(seed, 0);
  return [&hyper, &bases, rng](const std::vector<Observation>& obs,
                               const std::vector<const PlanarGraspEnv*>&) {
    std::vector<Action> out;
    for (const Observation& o : obs) {
      std::vector<Vector> base_actions;
      for (const BasePolicy& b : bases) base_actions.push_back(BaseAct(b, o));
      const HyperOutput h = HyperAct(hyper, o, *rng, false);
      out.push_back(Action::FromVector(CombineActions(base_actions, h)));
    }
    return out;
  };
}

double SampledTrainSuccess(const PipelineResult& r, const HyperPolicy& hyper) {
  const ExperimentConfig cfg;
  return EvaluateSplit(SampledHyperPolicyFn(hyper, r.bases, 9), r.dataset.train,
                       Split::kTrain, kEvalEpisodes, 9, cfg.env, cfg.reward)
      .success_rate;
}

struct SeedRun {
  PipelineResult ours;
  PipelineResult moe;
};

double TrainSuccess(const EvalReport& r) {
  return r.Get(Split::kTrain).success_rate;
}

// Least-squares slope of y against its index.
double Slope(const std::vector<double>& y) {
  const double n = static_cast<double>(y.size());
  if (n < 2) return 0.0;
  double mx = (n - 1) / 2.0, my = 0.0;
  for (double v : y) my += v / n;
  double num = 0.0, den = 0.0;
  for (size_t i = 0; i < y.size(); ++i) {
    num += (i - mx) * (y[i] - my);
    den += (i - mx) * (i - mx);
  }
  return num / den;
}

std::string ReadAll(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome Determinism(const fs::path& work) {
  ExperimentConfig cfg;
  cfg.split_counts = {6, 2, 2};
  cfg.k = 2;
  cfg.eval_episodes = 2;
  for (PpoConfig* p :
       {&cfg.base_ppo, &cfg.hyper_stage1_ppo, &cfg.hyper_stage2_ppo}) {
    p->num_envs = 16;
    p->iterations = 4;
  }
  cfg.dagger.num_envs = 16;
  cfg.dagger.iterations = 4;
  const fs::path a = work / "determinism_a", b = work / "determinism_b";
  RunPipeline(cfg, a.string());
  RunPipeline(cfg, b.string());
  int files = 0, same = 0;
  for (const auto& entry : fs::directory_iterator(a)) {
    if (entry.path().extension() != ".csv") continue;
    ++files;
    const fs::path other = b / entry.path().filename();
    if (fs::exists(other) && ReadAll(entry.path()) == ReadAll(other)) ++same;
  }
  return {11, "determinism", files > 0 && same == files,
          Fmt("%.0f of %.0f CSV files byte-identical", same, files)};
}

int Run(const fs::path& work) {
  g_start = Clock::now();
  fs::remove_all(work);
  fs::create_directories(work);
  std::vector<Outcome> outcomes;
  auto record = [&](Outcome o) {
    Progress(Fmt("criterion %.0f finished", o.id));
    outcomes.push_back(std::move(o));
  };

  record(GradientSoundness());
  record(GaeOracle());
  record(MoeAlgebra());
  record(RewardFormulas());

  const ExperimentConfig defaults = AcceptanceConfig(1);
  const Dataset dataset =
      GenerateObjects(defaults.dataset_seed, defaults.split_counts);
  record(SingleObjectBase(dataset));

  // Full pipeline plus the weights-only variant for each seed. The variant
  // shares the directory and therefore the base policies.
  std::vector<SeedRun> runs;
  const auto pipeline_start = Clock::now();
  for (uint64_t seed : kSeeds) {
    const ExperimentConfig cfg = AcceptanceConfig(seed);
    const fs::path dir = work / ("pipeline_seed" + std::to_string(seed));
    SeedRun run;
    run.ours = RunPipeline(cfg, dir.string());
    Progress(Fmt("seed %.0f: ours stage1 %.1f%% stage2 %.1f%% student %.1f%%",
                 static_cast<double>(seed),
                 100 * TrainSuccess(run.ours.stage1_report),
                 100 * TrainSuccess(run.ours.stage2_report),
                 100 * TrainSuccess(run.ours.student_report)));
    PipelineOptions moe;
    moe.variant = "moe";
    moe.residual = false;
    moe.run_stage2 = false;
    moe.run_distill = false;
    run.moe = RunPipeline(cfg, dir.string(), moe);
    Progress(Fmt("seed %.0f: moe stage1 %.1f%%", static_cast<double>(seed),
                 100 * TrainSuccess(run.moe.stage1_report)));
    runs.push_back(std::move(run));
  }
  const double pipeline_secs = Seconds(pipeline_start);
  const double n = static_cast<double>(runs.size());

  {
    double ours = 0.0, moe = 0.0;
    for (const SeedRun& r : runs) {
      ours += TrainSuccess(r.ours.stage1_report) / n;
      moe += TrainSuccess(r.moe.stage1_report) / n;
    }
    // Compared after the first training stage.
    record({6, "residual ablation",
            ours - moe >= kResidualMargin && pipeline_secs <= kAblationSeconds,
            Fmt("MoE+Res %.1f%% vs MoE %.1f%% (margin %.1f pts), %.0f s",
                100 * ours, 100 * moe, 100 * (ours - moe), pipeline_secs)});
  }

  record(GeometryUnaware(dataset, work));

  {
    double s1 = 0.0, s2 = 0.0, sampled1 = 0.0, sampled2 = 0.0;
    bool never_lower = true;
    std::string per_seed;
    for (const SeedRun& r : runs) {
      const double a = TrainSuccess(r.ours.stage1_report);
      const double b = TrainSuccess(r.ours.stage2_report);
      s1 += a / n;
      s2 += b / n;
      never_lower = never_lower && b >= a;
      per_seed += Fmt("%.1f->%.1f ", 100 * a, 100 * b);
      sampled1 += SampledTrainSuccess(r.ours, r.ours.stage1) / n;
      sampled2 += SampledTrainSuccess(r.ours, r.ours.stage2) / n;
    }
    record({8, "two-stage direction", never_lower && s2 - s1 >= kStage2Gain,
            Fmt("stage1 %.1f%% stage2 %.1f%% (gain %.1f pts); per seed ",
                100 * s1, 100 * s2, 100 * (s2 - s1)) +
                per_seed +
                Fmt("; sampled-action eval %.1f%% -> %.1f%% (not gating)",
                    100 * sampled1, 100 * sampled2)});
  }

  {
    double train = 0.0, unseen = 0.0;
    for (const SeedRun& r : runs) {
      train += TrainSuccess(r.ours.stage2_report) / n;
      unseen += r.ours.stage2_report.Get(Split::kTestUnseen).success_rate / n;
    }
    record({9, "generalization gap", std::abs(unseen - train) <= kUnseenGap,
            Fmt("train %.1f%% unseen-category %.1f%% (difference %.1f pts)",
                100 * train, 100 * unseen, 100 * (unseen - train))});
  }

  {
    double teacher = 0.0, student = 0.0;
    bool trend = true;
    int rises = 0;
    for (const SeedRun& r : runs) {
      teacher += TrainSuccess(r.ours.stage2_report) / n;
      student += TrainSuccess(r.ours.student_report) / n;
      std::vector<double> mse;
      for (const DaggerMetrics& m : r.ours.dagger.metrics) {
        mse.push_back(m.label_mse);
      }
      const std::vector<double> w = WindowMeans(mse, kMseWindow);
      trend =
          trend && w.size() >= 2 && Slope(w) <= 0.0 && w.back() <= w.front();
      for (size_t i = 1; i < w.size(); ++i) rises += w[i] > w[i - 1] ? 1 : 0;
    }
    record(
        {10, "distillation fidelity", trend && student >= teacher - kStudentGap,
         Fmt("teacher %.1f%% student %.1f%%; ", 100 * teacher, 100 * student) +
             "label MSE window-50 trend " +
             (trend ? "non-increasing" : "increasing") +
             Fmt(" (%.0f window-to-window rises)", rises)});
  }

  record(Determinism(work));

  std::sort(outcomes.begin(), outcomes.end(),
            [](const Outcome& a, const Outcome& b) { return a.id < b.id; });
  std::ofstream summary(work / "summary.txt");
  int failures = 0;
  std::printf("\n");
  for (const Outcome& o : outcomes) {
    char line[1024];
    std::snprintf(line, sizeof(line), "%s criterion %2d %-34s %s\n",
                  o.pass ? "PASS" : "FAIL", o.id, o.name.c_str(),
                  o.detail.c_str());
    std::fputs(line, stdout);
    summary << line;
    failures += o.pass ? 0 : 1;
  }
  std::printf("%d of %zu criteria passed, %.0f s total\n",
              static_cast<int>(outcomes.size()) - failures, outcomes.size(),
              Seconds(g_start));
  return failures == 0 ? 0 : 1;
}

}  // namespace
}  // namespace resgrasp

int main(int argc, char** argv) {
  const std::string work = argc > 1 ? argv[1] : "acceptance_work";
  return resgrasp::Run(work);
}
