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

// Command-line entry point for dataset generation, training, distillation,
// evaluation and the full pipeline.

#include <cstdio>
#include <exception>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "resgrasp/harness/config.h"
#include "resgrasp/harness/evaluate.h"
#include "resgrasp/harness/pipeline.h"
#include "resgrasp/numerics/checkpoint.h"
#include "resgrasp/numerics/rng.h"

namespace {

using namespace resgrasp;  // NOLINT

struct GlobalFlags {
  std::string config;
  std::optional<uint64_t> seed;
  std::string out;
};

ExperimentConfig ResolveConfig(const GlobalFlags& g) {
  ExperimentConfig cfg =
      g.config.empty() ? ExperimentConfig() : LoadConfig(g.config);
  if (g.seed) cfg.seed = *g.seed;
  return cfg;
}

void RequireOut(const GlobalFlags& g) {
  if (g.out.empty())
    throw CLI::ValidationError("--out", "an output path is required");
}

void PrintLine(const std::string& s) {
  std::printf("%s\n", s.c_str());
  std::fflush(stdout);
}

std::vector<BasePolicy> LoadBases(const std::vector<std::string>& paths) {
  std::vector<BasePolicy> bases;
  for (const std::string& p : paths)
    bases.push_back(LoadBasePolicy(ReadCheckpoint(p)));
  return bases;
}

std::vector<const BasePolicy*> Pointers(const std::vector<BasePolicy>& bases) {
  std::vector<const BasePolicy*> out;
  for (const BasePolicy& b : bases) out.push_back(&b);
  return out;
}

std::vector<const ObjectShape*> Pointers(
    const std::vector<ObjectShape>& objects) {
  std::vector<const ObjectShape*> out;
  for (const ObjectShape& o : objects) out.push_back(&o);
  return out;
}

std::string SiblingPath(const std::string& path, const std::string& suffix) {
  std::filesystem::path p(path);
  return (p.parent_path() / (p.stem().string() + suffix)).string();
}

std::vector<Split> ParseSplits(const std::string& s) {
  if (s == "all") return {Split::kTrain, Split::kTestSeen, Split::kTestUnseen};
  return {ParseSplit(s)};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Residual mixture-of-experts grasping: training and evaluation"};
  app.require_subcommand(1);
  app.fallthrough();
  GlobalFlags g;
  app.add_option("--config", g.config, "Experiment config (JSON)")
      ->check(CLI::ExistingFile);
  app.add_option("--seed", g.seed, "Overrides the config seed");
  app.add_option("--out", g.out, "Output file or directory");

  // gen-objects
  auto* gen = app.add_subcommand("gen-objects",
                                 "Generate the procedural object dataset");
  SplitCounts counts;
  uint64_t dataset_seed = 7;
  gen->add_option("--train", counts.train, "Training objects");
  gen->add_option("--test-seen", counts.test_seen,
                  "Held-out objects of seen categories");
  gen->add_option("--test-unseen", counts.test_unseen,
                  "Objects of the unseen category");
  gen->add_option("--dataset-seed", dataset_seed,
                  "Generation seed (default: --seed or 7)");

  // cluster
  auto* cluster =
      app.add_subcommand("cluster", "K-means over training-object shape codes");
  std::string objects_path;
  int k = 0;
  cluster->add_option("--objects", objects_path, "Dataset file")
      ->required()
      ->check(CLI::ExistingFile);
  cluster->add_option("--k", k, "Number of clusters (default: config k)");

  // train-base
  auto* train_base =
      app.add_subcommand("train-base", "Train one base policy on one object");
  int object_id = -1;
  std::string mask_name = "geo";
  std::string base_reward = "base";
  train_base->add_option("--object-id", object_id, "Training object id")
      ->required();
  train_base->add_option("--objects", objects_path, "Dataset file")
      ->required()
      ->check(CLI::ExistingFile);
  train_base->add_option("--mask", mask_name, "geo (geometry-unaware) or full")
      ->check(CLI::IsMember({"geo", "full"}));
  train_base->add_option("--reward", base_reward, "base or base_proposal")
      ->check(CLI::IsMember({"base", "base_proposal"}));

  // train-hyper
  auto* train_hyper = app.add_subcommand(
      "train-hyper", "Train the hyper-policy (stage 1 or 2)");
  int stage = 1;
  std::vector<std::string> base_paths;
  std::string resume;
  bool no_residual = false;
  train_hyper->add_option("--stage", stage, "1 or 2")
      ->check(CLI::IsMember({1, 2}));
  train_hyper->add_option("--bases", base_paths, "Base policy checkpoints")
      ->required();
  train_hyper->add_option("--objects", objects_path, "Dataset file")
      ->required()
      ->check(CLI::ExistingFile);
  train_hyper->add_option("--resume", resume,
                          "Hyper checkpoint to continue from (stage 2)");
  train_hyper->add_flag("--no-residual", no_residual, "Weights-only mixture");

  // distill
  auto* distill = app.add_subcommand(
      "distill", "Distill the hyper-policy into the point-cloud student");
  std::string teacher_path;
  distill->add_option("--teacher", teacher_path, "Hyper-policy checkpoint")
      ->required();
  distill->add_option("--bases", base_paths, "Base policy checkpoints")
      ->required();
  distill->add_option("--objects", objects_path, "Dataset file")
      ->required()
      ->check(CLI::ExistingFile);

  // eval
  auto* eval =
      app.add_subcommand("eval", "Evaluate a checkpoint or a scripted policy");
  std::string policy_path;
  std::string split_name = "all";
  int episodes = 0;
  eval->add_option("--policy", policy_path,
                   "Checkpoint, or 'scripted' / 'random'")
      ->required();
  eval->add_option("--bases", base_paths, "Base checkpoints (hyper-policies)");
  eval->add_option("--objects", objects_path, "Dataset file")
      ->required()
      ->check(CLI::ExistingFile);
  eval->add_option("--split", split_name,
                   "train, test_seen, test_unseen or all");
  eval->add_option("--episodes", episodes,
                   "Episodes per object (default: config)");

  auto* ablate =
      app.add_subcommand("ablate", "Run the ablation variants into --out");
  auto* pipeline = app.add_subcommand(
      "pipeline", "Run the full three-phase pipeline into --out");

  CLI11_PARSE(app, argc, argv);

  try {
    const ExperimentConfig cfg = ResolveConfig(g);
    if (*gen) {
      RequireOut(g);
      if (gen->count("--dataset-seed") == 0 && g.seed) dataset_seed = *g.seed;
      const Dataset d = GenerateObjects(dataset_seed, counts);
      SaveDataset(g.out, d);
      std::printf(
          "wrote %zu objects (%zu train, %zu test_seen, %zu test_unseen) to "
          "%s\n",
          d.size(), d.train.size(), d.test_seen.size(), d.test_unseen.size(),
          g.out.c_str());
    } else if (*cluster) {
      const Dataset d = LoadDataset(objects_path);
      const ClusterModel m =
          ClusterObjects(d.train, k > 0 ? k : cfg.k, cfg.seed);
      const std::string record = ClustersJson(m, d.train);
      if (g.out.empty()) {
        std::cout << record;
      } else {
        WriteFileBytes(g.out, record);
      }
    } else if (*train_base) {
      RequireOut(g);
      const Dataset d = LoadDataset(objects_path);
      const ObservationMask mask = mask_name == "geo"
                                       ? ObservationMask::Base()
                                       : ObservationMask::State();
      BaseTrainResult r =
          TrainBasePolicy(cfg, d.FindById(object_id), mask,
                          ParseRewardKind(base_reward), cfg.seed, PrintLine);
      WriteCheckpoint(g.out, SaveBasePolicy(r.policy));
      WriteFileBytes(SiblingPath(g.out, "_metrics.csv"), MetricsCsv(r.metrics));
    } else if (*train_hyper) {
      RequireOut(g);
      const Dataset d = LoadDataset(objects_path);
      const std::vector<BasePolicy> bases = LoadBases(base_paths);
      HyperPolicy hyper;
      if (!resume.empty()) {
        hyper = LoadHyperPolicy(ReadCheckpoint(resume));
      } else {
        Rng init(cfg.seed, 0);
        hyper = MakeHyperPolicy(static_cast<int>(bases.size()), !no_residual,
                                cfg.network, init, cfg.env.point_cloud_size);
      }
      const auto metrics =
          TrainHyperPolicy(hyper, Pointers(bases), Pointers(d.train), cfg,
                           stage, cfg.seed, PrintLine);
      WriteCheckpoint(g.out, SaveHyperPolicy(hyper));
      WriteFileBytes(SiblingPath(g.out, "_metrics.csv"), MetricsCsv(metrics));
    } else if (*distill) {
      RequireOut(g);
      const Dataset d = LoadDataset(objects_path);
      const std::vector<BasePolicy> bases = LoadBases(base_paths);
      const HyperPolicy teacher = LoadHyperPolicy(ReadCheckpoint(teacher_path));
      Rng init(cfg.seed, 0);
      VisionPolicy student =
          MakeVisionPolicy(cfg.vision, init, cfg.env.point_cloud_size);
      const DaggerResult r =
          DistillStudent(teacher, Pointers(bases), student, Pointers(d.train),
                         cfg, cfg.seed, PrintLine);
      WriteCheckpoint(g.out, SaveVisionPolicy(student));
      WriteFileBytes(SiblingPath(g.out, "_metrics.csv"), DaggerCsv(r.metrics));
    } else if (*eval) {
      const Dataset d = LoadDataset(objects_path);
      d.CheckSplitHygiene();
      const int n = episodes > 0 ? episodes : cfg.eval_episodes;
      std::vector<BasePolicy> bases;
      BasePolicy base;
      HyperPolicy hyper;
      VisionPolicy student;
      BatchPolicy policy;
      if (policy_path == "scripted") {
        policy = ScriptedGraspPolicy();
      } else if (policy_path == "random") {
        policy = RandomPolicy(cfg.seed);
      } else {
        const std::vector<NamedTensor> t = ReadCheckpoint(policy_path);
        switch (CheckpointKind(t)) {
          case PolicyKind::kBase:
            base = LoadBasePolicy(t);
            policy = BasePolicyFn(base);
            break;
          case PolicyKind::kHyper:
            hyper = LoadHyperPolicy(t);
            bases = LoadBases(base_paths);
            if (static_cast<int>(bases.size()) != hyper.k) {
              throw std::invalid_argument(
                  "eval: hyper-policy needs --bases with k checkpoints");
            }
            policy = HyperPolicyFn(hyper, Pointers(bases));
            break;
          case PolicyKind::kVision:
            student = LoadVisionPolicy(t);
            policy = StudentPolicyFn(student);
            break;
        }
      }
      const EvalReport report = Evaluate(policy, d, ParseSplits(split_name), n,
                                         cfg.seed, cfg.env, cfg.reward);
      std::cout << ReportText(report, "evaluation of " + policy_path);
      if (!g.out.empty()) {
        WriteFileBytes(g.out, ReportCsv(report));
        WriteFileBytes(SiblingPath(g.out, ".txt"),
                       ReportText(report, "evaluation of " + policy_path));
      }
    } else if (*ablate) {
      RequireOut(g);
      const auto rows = RunAblations(cfg, g.out, PrintLine);
      std::cout << AblationText(rows);
    } else if (*pipeline) {
      RequireOut(g);
      PipelineOptions opts;
      opts.log = PrintLine;
      const PipelineResult r = RunPipeline(cfg, g.out, opts);
      for (const std::string& s : r.resumed)
        std::printf("resumed %s\n", s.c_str());
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
