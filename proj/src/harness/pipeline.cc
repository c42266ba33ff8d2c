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

#include "resgrasp/harness/pipeline.h"

#include <cstdio>
#include <filesystem>
#include <sstream>
#include <stdexcept>
#include <utility>

#include "json.hpp"
#include "resgrasp/numerics/checkpoint.h"
#include "resgrasp/numerics/rng.h"

namespace resgrasp {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr int kLogEvery = 25;

// Sub-seed streams derived from the experiment seed.
constexpr uint64_t kBaseSeed = 100;
constexpr uint64_t kHyperInitSeed = 200;
constexpr uint64_t kStage1Seed = 201;
constexpr uint64_t kStage2Seed = 202;
constexpr uint64_t kStudentSeed = 300;
constexpr uint64_t kEvalSeed = 400;
constexpr uint64_t kClusterSeed = 500;

void Log(const LogFn& log, const std::string& line) {
  if (log) log(line);
}

TrainCallbacks LoggingCallbacks(const LogFn& log, const std::string& tag) {
  TrainCallbacks cb;
  if (!log) return cb;
  cb.on_iteration = [log, tag](const IterationMetrics& m) {
    if (m.iteration % kLogEvery != 0) return;
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "%s it %d reward %.3f success %.3f clip %.3f", tag.c_str(),
                  m.iteration, m.mean_reward, m.success_rate, m.clip_fraction);
    log(buf);
  };
  return cb;
}

std::string MaskTag(const ObservationMask& mask) {
  if (mask == ObservationMask::Base()) return "geo";
  if (mask == ObservationMask::State()) return "full";
  std::string tag = "m";
  for (bool b : mask.enabled) tag += b ? '1' : '0';
  return tag;
}

// Stage bookkeeping persisted as manifest.json.
class Manifest {
 public:
  Manifest(fs::path dir, std::string config_hash, uint64_t seed)
      : path_(dir / "manifest.json") {
    if (fs::exists(path_)) {
      const json j = json::parse(ReadFileBytes(path_.string()));
      if (j.value("config_hash", "") == config_hash) data_ = j;
    }
    data_["config_hash"] = config_hash;
    data_["seed"] = seed;
    if (!data_.contains("stages")) data_["stages"] = json::array();
  }

  // True when `stage` finished earlier and all of its files still exist.
  bool Done(const std::string& stage) const {
    for (const json& s : data_["stages"]) {
      if (s["name"] != stage) continue;
      for (const json& f : s["files"]) {
        if (!fs::exists(path_.parent_path() / f.get<std::string>())) {
          return false;
        }
      }
      return true;
    }
    return false;
  }

  void Record(const std::string& stage, const std::vector<std::string>& files) {
    json& stages = data_["stages"];
    for (size_t i = 0; i < stages.size(); ++i) {
      if (stages[i]["name"] == stage) {
        stages.erase(i);
        break;
      }
    }
    stages.push_back({{"name", stage}, {"files", files}});
    WriteFileBytes(path_.string(), data_.dump(2) + "\n");
  }

 private:
  fs::path path_;
  json data_;
};

std::vector<NamedTensor> SaveClusters(const ClusterModel& m) {
  std::vector<double> assignment(m.assignment.begin(), m.assignment.end());
  std::vector<double> reps(m.representatives.begin(), m.representatives.end());
  return {NamedTensor::Scalar("k", m.k),
          NamedTensor::FromMatrix("centroids", m.centroids),
          NamedTensor::FromVector("assignment", assignment),
          NamedTensor::FromVector("representatives", reps),
          NamedTensor::FromVector("objective_history", m.objective_history),
          NamedTensor::Scalar("iterations", m.iterations)};
}

ClusterModel LoadClusters(const std::vector<NamedTensor>& t) {
  ClusterModel m;
  m.k = static_cast<int>(FindTensor(t, "k").data.at(0));
  m.centroids = FindTensor(t, "centroids").ToMatrix();
  for (double v : FindTensor(t, "assignment").data) {
    m.assignment.push_back(static_cast<int>(v));
  }
  for (double v : FindTensor(t, "representatives").data) {
    m.representatives.push_back(static_cast<int>(v));
  }
  m.objective_history = FindTensor(t, "objective_history").data;
  m.iterations = static_cast<int>(FindTensor(t, "iterations").data.at(0));
  return m;
}

std::string ClustersCsv(const ClusterModel& m,
                        const std::vector<ObjectShape>& objects) {
  std::ostringstream os;
  os << "object_id,category,cluster,representative\n";
  for (size_t i = 0; i < objects.size(); ++i) {
    const int c = m.assignment[i];
    os << objects[i].id << ',' << CategoryName(objects[i].category) << ',' << c
       << ',' << (m.representatives[c] == objects[i].id ? 1 : 0) << '\n';
  }
  return os.str();
}

}  // namespace

std::string ClustersJson(const ClusterModel& m,
                         const std::vector<ObjectShape>& objects) {
  json centroids = json::array();
  for (Eigen::Index r = 0; r < m.centroids.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.centroids.cols(); ++c) {
      row.push_back(m.centroids(r, c));
    }
    centroids.push_back(row);
  }
  json assignment = json::array();
  for (size_t i = 0; i < objects.size(); ++i) {
    assignment.push_back(
        {{"object_id", objects[i].id}, {"cluster", m.assignment[i]}});
  }
  json j = {{"k", m.k},
            {"centroids", centroids},
            {"assignment", assignment},
            {"representatives", m.representatives},
            {"objective",
             m.objective_history.empty() ? 0.0 : m.objective_history.back()}};
  return j.dump(2) + "\n";
}

namespace {

std::vector<const ObjectShape*> Pointers(const std::vector<ObjectShape>& v) {
  std::vector<const ObjectShape*> out;
  out.reserve(v.size());
  for (const ObjectShape& o : v) out.push_back(&o);
  return out;
}

const std::vector<Split> kAllSplits = {Split::kTrain, Split::kTestSeen,
                                       Split::kTestUnseen};

}  // namespace

BaseTrainResult TrainBasePolicy(const ExperimentConfig& cfg,
                                const ObjectShape& object,
                                const ObservationMask& mask, RewardKind reward,
                                uint64_t seed, const LogFn& log) {
  Rng init(seed, 0);
  BaseTrainResult r{
      MakeBasePolicy(cfg.network, init, mask, cfg.env.point_cloud_size), {}};
  r.policy.trained_object_id = object.id;
  VecEnv envs(cfg.env, {&object}, cfg.base_ppo.num_envs, MixSeed(seed, 1),
              MakeRewardFn(reward, cfg.reward));
  r.metrics = TrainLoop(
      r.policy.net, DirectActionMapper(), envs, cfg.base_ppo, seed,
      LoggingCallbacks(log, "base[" + std::to_string(object.id) + "]"));
  return r;
}

ActionMapper HyperActionMapper(const HyperPolicy& hyper,
                               std::vector<const BasePolicy*> bases) {
  if (static_cast<int>(bases.size()) != hyper.k) {
    throw std::invalid_argument("HyperActionMapper: base count differs from k");
  }
  return [&hyper, bases](const std::vector<Observation>& obs,
                         const Matrix& samples) {
    const std::vector<Matrix> base = BaseActionsBatch(bases, obs);
    std::vector<Action> out;
    out.reserve(obs.size());
    std::vector<Vector> per_base(base.size());
    for (size_t i = 0; i < obs.size(); ++i) {
      const Eigen::Index row = static_cast<Eigen::Index>(i);
      const HyperOutput h =
          DecodeHyperSample(hyper, samples.row(row).transpose());
      for (size_t b = 0; b < base.size(); ++b) {
        per_base[b] = base[b].row(row).transpose();
      }
      out.push_back(Action::FromVector(
          CombineActionsUnclipped(per_base, h.residual, h.weights)));
    }
    return out;
  };
}

std::vector<IterationMetrics> TrainHyperPolicy(
    HyperPolicy& hyper, const std::vector<const BasePolicy*>& bases,
    const std::vector<const ObjectShape*>& objects, const ExperimentConfig& cfg,
    int stage, uint64_t seed, const LogFn& log) {
  if (stage != 1 && stage != 2) {
    throw std::invalid_argument("TrainHyperPolicy: stage must be 1 or 2");
  }
  const PpoConfig& ppo =
      stage == 1 ? cfg.hyper_stage1_ppo : cfg.hyper_stage2_ppo;
  const RewardKind kind =
      stage == 1 ? RewardKind::kStage1 : RewardKind::kStage2;
  VecEnv envs(cfg.env, objects, ppo.num_envs, MixSeed(seed, 1),
              MakeRewardFn(kind, cfg.reward));
  return TrainLoop(hyper.net, HyperActionMapper(hyper, bases), envs, ppo, seed,
                   LoggingCallbacks(log, "stage" + std::to_string(stage)));
}

DaggerResult DistillStudent(const HyperPolicy& hyper,
                            const std::vector<const BasePolicy*>& bases,
                            VisionPolicy& student,
                            const std::vector<const ObjectShape*>& objects,
                            const ExperimentConfig& cfg, uint64_t seed,
                            const LogFn& log) {
  VecEnv envs(cfg.env, objects, cfg.dagger.num_envs, MixSeed(seed, 1),
              MakeRewardFn(RewardKind::kStage2, cfg.reward));
  std::function<void(const DaggerMetrics&)> cb;
  if (log) {
    cb = [&log](const DaggerMetrics& m) {
      if (m.iteration % (4 * kLogEvery) != 0) return;
      char buf[128];
      std::snprintf(buf, sizeof(buf),
                    "distill it %d label_mse %.5f success %.3f", m.iteration,
                    m.label_mse, m.success_rate);
      log(buf);
    };
  }
  return Distill(Teacher{&hyper, bases}, student, envs, cfg.dagger, seed, cb);
}

ClusterModel ClusterObjects(const std::vector<ObjectShape>& objects, int k,
                            uint64_t seed) {
  Matrix features(static_cast<Eigen::Index>(objects.size()), kShapeCodeSize);
  std::vector<int> ids;
  for (size_t i = 0; i < objects.size(); ++i) {
    for (int j = 0; j < kShapeCodeSize; ++j) {
      features(static_cast<Eigen::Index>(i), j) = objects[i].code[j];
    }
    ids.push_back(objects[i].id);
  }
  ClusterModel model = KMeans(features, k, seed);
  model.representatives = SelectRepresentatives(model, features, ids);
  return model;
}

PipelineResult RunPipeline(const ExperimentConfig& cfg,
                           const std::string& out_dir,
                           const PipelineOptions& opts) {
  cfg.Validate();
  const fs::path dir(out_dir);
  fs::create_directories(dir);
  auto file = [&dir](const std::string& name) { return (dir / name).string(); };
  WriteFileBytes(file("config.json"), ConfigToJson(cfg) + "\n");
  Manifest manifest(dir, ConfigHash(cfg), cfg.seed);
  PipelineResult r;
  const LogFn& log = opts.log;

  // Dataset.
  if (!cfg.dataset_path.empty()) {
    r.dataset = LoadDataset(cfg.dataset_path);
  } else if (manifest.Done("dataset")) {
    r.dataset = LoadDataset(file("dataset.jsonl"));
    r.resumed.push_back("dataset");
  } else {
    r.dataset = GenerateObjects(cfg.dataset_seed, cfg.split_counts);
    SaveDataset(file("dataset.jsonl"), r.dataset);
    manifest.Record("dataset", {"dataset.jsonl"});
  }
  r.dataset.CheckSplitHygiene();
  const std::vector<const ObjectShape*> train = Pointers(r.dataset.train);
  if (static_cast<int>(train.size()) < cfg.k) {
    throw std::invalid_argument("RunPipeline: fewer training objects than k");
  }

  // Clustering.
  if (manifest.Done("cluster")) {
    r.clusters = LoadClusters(ReadCheckpoint(file("clusters.ckpt")));
    r.resumed.push_back("cluster");
  } else {
    r.clusters =
        ClusterObjects(r.dataset.train, cfg.k, MixSeed(cfg.seed, kClusterSeed));
    WriteCheckpoint(file("clusters.ckpt"), SaveClusters(r.clusters));
    WriteFileBytes(file("clusters.csv"),
                   ClustersCsv(r.clusters, r.dataset.train));
    manifest.Record("cluster", {"clusters.ckpt", "clusters.csv"});
  }
  r.base_object_ids = r.clusters.representatives;
  Log(log, "cluster representatives ready");

  // Base policies, one per cluster representative.
  const std::string base_tag = "base_" + MaskTag(opts.base_mask) + "_" +
                               RewardKindName(opts.base_reward);
  for (int i = 0; i < cfg.k; ++i) {
    const std::string stage = base_tag + "_" + std::to_string(i);
    if (manifest.Done(stage)) {
      r.bases.push_back(LoadBasePolicy(ReadCheckpoint(file(stage + ".ckpt"))));
      r.resumed.push_back(stage);
      continue;
    }
    const ObjectShape& object = r.dataset.FindById(r.base_object_ids[i]);
    BaseTrainResult b =
        TrainBasePolicy(cfg, object, opts.base_mask, opts.base_reward,
                        MixSeed(cfg.seed, kBaseSeed + i), log);
    WriteCheckpoint(file(stage + ".ckpt"), SaveBasePolicy(b.policy));
    WriteFileBytes(file(stage + "_metrics.csv"), MetricsCsv(b.metrics));
    manifest.Record(stage, {stage + ".ckpt", stage + "_metrics.csv"});
    r.bases.push_back(std::move(b.policy));
  }
  std::vector<const BasePolicy*> bases;
  for (const BasePolicy& b : r.bases) bases.push_back(&b);

  // Hyper-policy stage 1.
  const std::string s1 = opts.variant + "_stage1";
  if (manifest.Done(s1)) {
    r.stage1 = LoadHyperPolicy(ReadCheckpoint(file(s1 + ".ckpt")));
    r.resumed.push_back(s1);
  } else {
    Rng init(MixSeed(cfg.seed, kHyperInitSeed), 0);
    r.stage1 = MakeHyperPolicy(cfg.k, opts.residual, cfg.network, init,
                               cfg.env.point_cloud_size);
    r.stage1_metrics = TrainHyperPolicy(r.stage1, bases, train, cfg, 1,
                                        MixSeed(cfg.seed, kStage1Seed), log);
    WriteCheckpoint(file(s1 + ".ckpt"), SaveHyperPolicy(r.stage1));
    WriteFileBytes(file(s1 + "_metrics.csv"), MetricsCsv(r.stage1_metrics));
    manifest.Record(s1, {s1 + ".ckpt", s1 + "_metrics.csv"});
  }
  const uint64_t eval_seed = MixSeed(cfg.seed, kEvalSeed);
  r.stage1_report =
      Evaluate(HyperPolicyFn(r.stage1, bases), r.dataset, kAllSplits,
               cfg.eval_episodes, eval_seed, cfg.env, cfg.reward);
  WriteFileBytes(file(s1 + "_report.csv"), ReportCsv(r.stage1_report));
  WriteFileBytes(file(s1 + "_report.txt"),
                 ReportText(r.stage1_report, opts.variant + " stage 1"));
  Log(log, ReportText(r.stage1_report, opts.variant + " stage 1"));

  // Stage 2 continues from the stage-1 weights.
  r.stage2 = r.stage1;
  const HyperPolicy* final_hyper = &r.stage1;
  if (opts.run_stage2) {
    const std::string s2 = opts.variant + "_stage2";
    if (manifest.Done(s2)) {
      r.stage2 = LoadHyperPolicy(ReadCheckpoint(file(s2 + ".ckpt")));
      r.resumed.push_back(s2);
    } else {
      r.stage2_metrics = TrainHyperPolicy(r.stage2, bases, train, cfg, 2,
                                          MixSeed(cfg.seed, kStage2Seed), log);
      WriteCheckpoint(file(s2 + ".ckpt"), SaveHyperPolicy(r.stage2));
      WriteFileBytes(file(s2 + "_metrics.csv"), MetricsCsv(r.stage2_metrics));
      manifest.Record(s2, {s2 + ".ckpt", s2 + "_metrics.csv"});
    }
    r.stage2_report =
        Evaluate(HyperPolicyFn(r.stage2, bases), r.dataset, kAllSplits,
                 cfg.eval_episodes, eval_seed, cfg.env, cfg.reward);
    WriteFileBytes(file(s2 + "_report.csv"), ReportCsv(r.stage2_report));
    WriteFileBytes(file(s2 + "_report.txt"),
                   ReportText(r.stage2_report, opts.variant + " stage 2"));
    Log(log, ReportText(r.stage2_report, opts.variant + " stage 2"));
    final_hyper = &r.stage2;
  } else {
    r.stage2_report = r.stage1_report;
  }

  // Distillation into the point-cloud student.
  if (opts.run_distill) {
    const std::string sd = opts.variant + "_distill";
    if (manifest.Done(sd)) {
      r.student = LoadVisionPolicy(ReadCheckpoint(file(sd + ".ckpt")));
      r.resumed.push_back(sd);
    } else {
      Rng init(MixSeed(cfg.seed, kStudentSeed), 0);
      r.student = MakeVisionPolicy(cfg.vision, init, cfg.env.point_cloud_size);
      r.dagger = DistillStudent(*final_hyper, bases, r.student, train, cfg,
                                MixSeed(cfg.seed, kStudentSeed + 1), log);
      WriteCheckpoint(file(sd + ".ckpt"), SaveVisionPolicy(r.student));
      WriteFileBytes(file(sd + "_metrics.csv"), DaggerCsv(r.dagger.metrics));
      manifest.Record(sd, {sd + ".ckpt", sd + "_metrics.csv"});
    }
    r.student_report =
        Evaluate(StudentPolicyFn(r.student), r.dataset, kAllSplits,
                 cfg.eval_episodes, eval_seed, cfg.env, cfg.reward);
    WriteFileBytes(file(sd + "_report.csv"), ReportCsv(r.student_report));
    WriteFileBytes(file(sd + "_report.txt"),
                   ReportText(r.student_report, opts.variant + " student"));
    Log(log, ReportText(r.student_report, opts.variant + " student"));
  }
  return r;
}

std::vector<AblationRow> RunAblations(const ExperimentConfig& cfg,
                                      const std::string& out_dir,
                                      const LogFn& log) {
  std::vector<PipelineOptions> variants(4);
  variants[0].variant = "ours";
  variants[1].variant = "moe";
  variants[1].residual = false;
  variants[2].variant = "full_obs";
  variants[2].base_mask = ObservationMask::State();
  variants[3].variant = "full_pose";
  variants[3].base_reward = RewardKind::kBaseProposal;
  std::vector<AblationRow> rows;
  for (PipelineOptions& v : variants) {
    v.run_distill = false;
    v.log = log;
    Log(log, "ablation variant " + v.variant);
    PipelineResult r = RunPipeline(cfg, out_dir, v);
    rows.push_back({v.variant, r.stage2_report});
  }
  WriteFileBytes((fs::path(out_dir) / "ablation.csv").string(),
                 AblationCsv(rows));
  WriteFileBytes((fs::path(out_dir) / "ablation.txt").string(),
                 AblationText(rows));
  return rows;
}

std::string AblationCsv(const std::vector<AblationRow>& rows) {
  std::ostringstream os;
  os << "variant,split,success_rate,mean_d\n";
  char buf[160];
  for (const AblationRow& row : rows) {
    for (const SplitReport& s : row.report.splits) {
      std::snprintf(buf, sizeof(buf), "%s,%s,%.17g,%.17g\n",
                    row.variant.c_str(), SplitName(s.split), s.success_rate,
                    s.mean_d);
      os << buf;
    }
  }
  return os.str();
}

std::string AblationText(const std::vector<AblationRow>& rows) {
  std::ostringstream os;
  char buf[160];
  std::snprintf(buf, sizeof(buf), "%-10s %-12s %9s %10s\n", "variant", "split",
                "success", "mean D");
  os << buf;
  for (const AblationRow& row : rows) {
    for (const SplitReport& s : row.report.splits) {
      std::snprintf(buf, sizeof(buf), "%-10s %-12s %8.2f%% %10.3f\n",
                    row.variant.c_str(), SplitName(s.split),
                    100.0 * s.success_rate, s.mean_d);
      os << buf;
    }
  }
  return os.str();
}

}  // namespace resgrasp
