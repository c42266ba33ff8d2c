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

#ifndef RESGRASP_ENV_DATASET_H_
#define RESGRASP_ENV_DATASET_H_

#include <cstdint>
#include <string>
#include <vector>

#include "resgrasp/env/proposal.h"
#include "resgrasp/env/shapes.h"

namespace resgrasp {

enum class Split { kTrain, kTestSeen, kTestUnseen };
const char* SplitName(Split s);
Split ParseSplit(const std::string& name);

struct SplitCounts {
  int train = 200;
  int test_seen = 40;
  int test_unseen = 40;
};

struct DatasetConfig {
  // Families used for train and test_seen; test_unseen uses held_out only.
  std::vector<ShapeCategory> seen_categories = {
      ShapeCategory::kEllipse, ShapeCategory::kBox, ShapeCategory::kLShape,
      ShapeCategory::kStar};
  ShapeCategory held_out = ShapeCategory::kCapsule;
  ShapeLimits limits;
  ProposalConfig proposal;
  int max_attempts_per_object = 50;
};

struct Dataset {
  std::vector<ObjectShape> train;
  std::vector<ObjectShape> test_seen;
  std::vector<ObjectShape> test_unseen;

  const std::vector<ObjectShape>& Get(Split s) const;
  size_t size() const {
    return train.size() + test_seen.size() + test_unseen.size();
  }
  const ObjectShape& FindById(int id) const;
  // Throws if any id appears twice or the unseen split shares a family with
  // the training split.
  void CheckSplitHygiene() const;
};

// Deterministic in `seed`. Seen families are assigned round-robin; instance
// parameters come from a per-object random stream. Objects whose proposal
// cannot be synthesized are redrawn.
Dataset GenerateObjects(uint64_t seed, const SplitCounts& counts,
                        const DatasetConfig& cfg = {});

// One JSON record per line, each tagged with its split.
std::string SerializeDataset(const Dataset& d);
Dataset ParseDataset(const std::string& text);
void SaveDataset(const std::string& path, const Dataset& d);
Dataset LoadDataset(const std::string& path);

}  // namespace resgrasp

#endif  // RESGRASP_ENV_DATASET_H_
