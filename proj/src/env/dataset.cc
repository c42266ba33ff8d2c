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

#include "resgrasp/env/dataset.h"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "resgrasp/numerics/checkpoint.h"

namespace resgrasp {
namespace {

using nlohmann::json;

json PointsToJson(const std::vector<Vec2>& pts) {
  json a = json::array();
  for (const Vec2& p : pts) a.push_back({p.x(), p.y()});
  return a;
}

std::vector<Vec2> PointsFromJson(const json& a) {
  std::vector<Vec2> pts;
  for (const auto& p : a)
    pts.emplace_back(p.at(0).get<double>(), p.at(1).get<double>());
  return pts;
}

json ShapeToJson(const ObjectShape& s, Split split) {
  json r;
  r["split"] = SplitName(split);
  r["id"] = s.id;
  r["category"] = static_cast<int>(s.category);
  r["category_name"] = CategoryName(s.category);
  r["vertices"] = PointsToJson(s.vertices);
  r["code"] = s.code;
  r["point_cloud"] = PointsToJson(s.point_cloud);
  r["proposal"] = {{"wrist_rot", s.proposal.wrist_rot},
                   {"wrist_offset",
                    {s.proposal.wrist_offset.x(), s.proposal.wrist_offset.y()}},
                   {"joint_targets", s.proposal.joint_targets}};
  return r;
}

ObjectShape ShapeFromJson(const json& r) {
  ObjectShape s;
  s.id = r.at("id").get<int>();
  s.category = static_cast<ShapeCategory>(r.at("category").get<int>());
  s.vertices = PointsFromJson(r.at("vertices"));
  s.code = r.at("code").get<std::array<double, kShapeCodeSize>>();
  s.point_cloud = PointsFromJson(r.at("point_cloud"));
  const json& p = r.at("proposal");
  s.proposal.wrist_rot = p.at("wrist_rot").get<double>();
  s.proposal.wrist_offset = Vec2(p.at("wrist_offset").at(0).get<double>(),
                                 p.at("wrist_offset").at(1).get<double>());
  s.proposal.joint_targets = p.at("joint_targets").get<Joints>();
  return s;
}

}  // namespace

const char* SplitName(Split s) {
  switch (s) {
    case Split::kTrain:
      return "train";
    case Split::kTestSeen:
      return "test_seen";
    case Split::kTestUnseen:
      return "test_unseen";
  }
  return "unknown";
}

Split ParseSplit(const std::string& name) {
  if (name == "train") return Split::kTrain;
  if (name == "test_seen") return Split::kTestSeen;
  if (name == "test_unseen") return Split::kTestUnseen;
  throw std::invalid_argument("unknown split: " + name);
}

const std::vector<ObjectShape>& Dataset::Get(Split s) const {
  switch (s) {
    case Split::kTrain:
      return train;
    case Split::kTestSeen:
      return test_seen;
    case Split::kTestUnseen:
      return test_unseen;
  }
  throw std::invalid_argument("bad split");
}

const ObjectShape& Dataset::FindById(int id) const {
  for (Split s : {Split::kTrain, Split::kTestSeen, Split::kTestUnseen}) {
    for (const ObjectShape& o : Get(s)) {
      if (o.id == id) return o;
    }
  }
  throw std::out_of_range("no object with id " + std::to_string(id));
}

void Dataset::CheckSplitHygiene() const {
  std::set<int> ids;
  for (Split s : {Split::kTrain, Split::kTestSeen, Split::kTestUnseen}) {
    for (const ObjectShape& o : Get(s)) {
      if (!ids.insert(o.id).second) {
        throw std::runtime_error("object id " + std::to_string(o.id) +
                                 " appears more than once");
      }
    }
  }
  std::set<ShapeCategory> train_families;
  for (const ObjectShape& o : train) train_families.insert(o.category);
  for (const ObjectShape& o : test_unseen) {
    if (train_families.count(o.category)) {
      throw std::runtime_error("unseen split shares a family with train");
    }
  }
}

Dataset GenerateObjects(uint64_t seed, const SplitCounts& counts,
                        const DatasetConfig& cfg) {
  if (counts.train < 1 || counts.test_seen < 1 || counts.test_unseen < 1) {
    throw std::invalid_argument(
        "GenerateObjects: every split needs >= 1 object");
  }
  if (cfg.seen_categories.empty() ||
      std::find(cfg.seen_categories.begin(), cfg.seen_categories.end(),
                cfg.held_out) != cfg.seen_categories.end()) {
    throw std::invalid_argument(
        "GenerateObjects: need at least two category families with one held "
        "out of the seen set");
  }
  Dataset d;
  int next_id = 0;
  auto make = [&](ShapeCategory category) {
    const int id = next_id++;
    Rng rng(seed, static_cast<uint64_t>(id));
    for (int attempt = 0; attempt < cfg.max_attempts_per_object; ++attempt) {
      ObjectShape s = MakeShape(id, category, rng, cfg.limits);
      try {
        s.proposal = SynthesizeProposal(s, rng, cfg.proposal);
        return s;
      } catch (const ProposalUnavailable&) {
      }
    }
    throw std::runtime_error("GenerateObjects: could not build a graspable " +
                             std::string(CategoryName(category)));
  };
  const int nseen = static_cast<int>(cfg.seen_categories.size());
  for (int i = 0; i < counts.train; ++i) {
    d.train.push_back(make(cfg.seen_categories[i % nseen]));
  }
  for (int i = 0; i < counts.test_seen; ++i) {
    d.test_seen.push_back(make(cfg.seen_categories[i % nseen]));
  }
  for (int i = 0; i < counts.test_unseen; ++i) {
    d.test_unseen.push_back(make(cfg.held_out));
  }
  return d;
}

std::string SerializeDataset(const Dataset& d) {
  std::ostringstream out;
  for (Split s : {Split::kTrain, Split::kTestSeen, Split::kTestUnseen}) {
    for (const ObjectShape& o : d.Get(s))
      out << ShapeToJson(o, s).dump() << "\n";
  }
  return out.str();
}

Dataset ParseDataset(const std::string& text) {
  Dataset d;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const json r = json::parse(line);
    const Split s = ParseSplit(r.at("split").get<std::string>());
    ObjectShape o = ShapeFromJson(r);
    switch (s) {
      case Split::kTrain:
        d.train.push_back(std::move(o));
        break;
      case Split::kTestSeen:
        d.test_seen.push_back(std::move(o));
        break;
      case Split::kTestUnseen:
        d.test_unseen.push_back(std::move(o));
        break;
    }
  }
  d.CheckSplitHygiene();
  return d;
}

void SaveDataset(const std::string& path, const Dataset& d) {
  WriteFileBytes(path, SerializeDataset(d));
}

Dataset LoadDataset(const std::string& path) {
  return ParseDataset(ReadFileBytes(path));
}

}  // namespace resgrasp
