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

#include <cmath>
#include <set>
#include <vector>

#include "doctest.h"
#include "resgrasp/env/dataset.h"
#include "resgrasp/env/geometry.h"
#include "resgrasp/env/planar_env.h"
#include "resgrasp/env/proposal.h"
#include "resgrasp/env/shapes.h"
#include "resgrasp/numerics/errors.h"
#include "resgrasp/numerics/rng.h"
#include "resgrasp/policies/policies.h"

namespace resgrasp {
namespace {

const Dataset& SmallDataset() {
  static const Dataset d = GenerateObjects(7, {20, 8, 8});
  return d;
}

ObjectShape Square(double half) {
  Polygon p = {Vec2(-half, -half), Vec2(half, -half), Vec2(half, half),
               Vec2(-half, half)};
  ObjectShape s = ShapeFromPolygon(1000, ShapeCategory::kBox, p);
  Rng rng(1, 0);
  s.proposal = SynthesizeProposal(s, rng);
  return s;
}

TEST_CASE("geometry helpers") {
  const Polygon sq = {Vec2(0, 0), Vec2(2, 0), Vec2(2, 2), Vec2(0, 2)};
  CHECK(SignedArea(sq) == doctest::Approx(4.0));
  CHECK(IsCcw(sq));
  CHECK(Perimeter(sq) == doctest::Approx(8.0));
  CHECK((AreaCentroid(sq) - Vec2(1, 1)).norm() < 1e-12);
  CHECK(PointInPolygon(sq, Vec2(1, 1)));
  CHECK_FALSE(PointInPolygon(sq, Vec2(3, 1)));
  const BoundaryQuery q = QueryBoundary(sq, Vec2(3, 1));
  CHECK(q.distance == doctest::Approx(1.0));
  CHECK((q.normal - Vec2(1, 0)).norm() < 1e-12);
  CHECK(WrapAngle(3.5 * M_PI) == doctest::Approx(-0.5 * M_PI));
  const Pose2 a{Vec2(1, 2), 0.3}, b{Vec2(-0.5, 0.1), -1.1};
  const Pose2 rel = a.Relative(a.Compose(b));
  CHECK((rel.pos - b.pos).norm() < 1e-12);
  CHECK(rel.angle == doctest::Approx(b.angle));
}

TEST_CASE("square gets a side pinch with both tips on opposite edges") {
  const ObjectShape s = Square(0.04);
  CHECK(ValidateProposal(s, s.proposal));
  const GripperGeometry g;
  const Pose2 wrist{s.proposal.wrist_offset, s.proposal.wrist_rot};
  std::vector<Vec2> tips;
  for (int f = 0; f < 2; ++f) {
    tips.push_back(wrist.Apply(FingertipLocal(g, f, s.proposal.joint_targets)));
    CHECK(QueryBoundary(s.vertices, tips.back()).distance < 0.005);
  }
  // Opposite edges: the tips straddle the centre along one axis.
  const bool x_pinch = tips[0].x() * tips[1].x() < 0 &&
                       std::abs(std::abs(tips[0].x()) - 0.04) < 0.005;
  const bool y_pinch = tips[0].y() * tips[1].y() < 0 &&
                       std::abs(std::abs(tips[0].y()) - 0.04) < 0.005;
  CHECK((x_pinch || y_pinch));
}

TEST_CASE("every generated proposal validates") {
  const Dataset& d = SmallDataset();
  for (Split sp : {Split::kTrain, Split::kTestSeen, Split::kTestUnseen}) {
    for (const ObjectShape& o : d.Get(sp)) {
      CHECK(ValidateProposal(o, o.proposal));
    }
  }
}

TEST_CASE("dataset splits are disjoint and hold out one family") {
  const Dataset& d = SmallDataset();
  CHECK_NOTHROW(d.CheckSplitHygiene());
  std::set<int> ids;
  for (Split sp : {Split::kTrain, Split::kTestSeen, Split::kTestUnseen}) {
    for (const ObjectShape& o : d.Get(sp)) CHECK(ids.insert(o.id).second);
  }
  for (const ObjectShape& o : d.test_unseen) {
    CHECK(o.category == ShapeCategory::kCapsule);
  }
  for (const ObjectShape& o : d.train) {
    CHECK(o.category != ShapeCategory::kCapsule);
  }
  Dataset bad = d;
  bad.test_seen.push_back(bad.train.front());
  CHECK_THROWS(bad.CheckSplitHygiene());
}

TEST_CASE("dataset serialization round trip and determinism") {
  const Dataset& d = SmallDataset();
  const std::string text = SerializeDataset(d);
  CHECK(SerializeDataset(ParseDataset(text)) == text);
  CHECK(SerializeDataset(GenerateObjects(7, {20, 8, 8})) == text);
  CHECK(SerializeDataset(GenerateObjects(8, {20, 8, 8})) != text);
}

TEST_CASE("reset places the object on the table and the gripper above it") {
  const ObjectShape& o = SmallDataset().train[0];
  EnvConfig cfg;
  PlanarGraspEnv env(cfg);
  env.Reset(o, 3, 0);
  const EnvState& s = env.state();
  CHECK(MinY(env.ObjectWorldPolygon()) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(std::abs(s.object_pos.x()) <= cfg.object_x_range + 1e-12);
  CHECK(std::min(s.fingertips[0].y(), s.fingertips[1].y()) ==
        doctest::Approx(cfg.start_clearance));
  CHECK(s.t == 0);
  CHECK_FALSE(s.attached);
  PlanarGraspEnv again(cfg);
  again.Reset(o, 3, 0);
  CHECK(again.state().object_pos == s.object_pos);
}

TEST_CASE("observation layers have their documented sizes") {
  const ObjectShape& o = SmallDataset().train[1];
  PlanarGraspEnv env;
  const Observation obs = env.Reset(o, 1, 0);
  for (int l = 0; l < kNumObsLayers; ++l) {
    CHECK(obs.layers[l].size() == ObsLayerSize(static_cast<ObsLayer>(l)));
  }
  CHECK(obs.proprio().size() == kProprioSize);
  CHECK(obs.point_cloud().size() == 2 * kDefaultPointCloudSize);
}

TEST_CASE("base mask hides geometry: different shapes, same base input") {
  const Dataset& d = SmallDataset();
  PlanarGraspEnv a, b;
  a.Reset(d.train[0], 5, 0);
  b.Reset(d.train[1], 5, 0);
  EnvState s = a.state();
  b.SetState(s);
  // Same gripper and object position, so only geometry differs.
  const Vector va = MaskObservation(a.Observe(), ObservationMask::Base());
  const Vector vb = MaskObservation(b.Observe(), ObservationMask::Base());
  CHECK(va == vb);
  const Vector fa = MaskObservation(a.Observe(), ObservationMask::State());
  const Vector fb = MaskObservation(b.Observe(), ObservationMask::State());
  CHECK(fa != fb);
}

TEST_CASE("current grasp pose equals the proposal at the proposal pose") {
  const ObjectShape& o = SmallDataset().train[2];
  PlanarGraspEnv env;
  env.Reset(o, 1, 0);
  EnvState s = env.state();
  s.object_angle = 0.4;
  const Pose2 obj = s.object_pose();
  s.gripper.base_angle = obj.angle + o.proposal.wrist_rot;
  s.gripper.base_pos = obj.Apply(o.proposal.wrist_offset);
  s.gripper.joints = o.proposal.joint_targets;
  const GraspPose g = CurrentGraspPose(s);
  CHECK(std::abs(WrapAngle(g.wrist_rot - o.proposal.wrist_rot)) < 1e-9);
  CHECK((g.wrist_offset - o.proposal.wrist_offset).norm() < 1e-9);
  for (int j = 0; j < 4; ++j) {
    CHECK(std::abs(g.joints[j] - o.proposal.joint_targets[j]) < 1e-9);
  }
}

TEST_CASE("physical sanity under random actions") {
  const Dataset& d = SmallDataset();
  Rng rng(17, 0);
  for (int ep = 0; ep < 12; ++ep) {
    const ObjectShape& o = d.train[ep % d.train.size()];
    PlanarGraspEnv env;
    env.Reset(o, ep, 0);
    bool held = false;
    Pose2 offset;
    for (int t = 0; t < 100; ++t) {
      Action a;
      for (double& j : a.joint_targets) j = rng.Uniform(-1.0, 1.0);
      for (double& w : a.wrench) w = rng.Uniform(-1.0, 1.0);
      env.Step(a);
      const EnvState& s = env.state();
      CHECK(MinY(env.ObjectWorldPolygon()) > -1e-9);
      CHECK(s.fingertips[0].y() > -1e-9);
      CHECK(s.fingertips[1].y() > -1e-9);
      if (s.attached) {
        const Pose2 rel = s.gripper.pose().Relative(s.object_pose());
        if (held) {
          CHECK((rel.pos - offset.pos).norm() < 1e-9);
          CHECK(std::abs(WrapAngle(rel.angle - offset.angle)) < 1e-9);
        }
        held = true;
        offset = rel;
      } else {
        held = false;
        // Resting objects sit flat on the table.
        CHECK(MinY(env.ObjectWorldPolygon()) ==
              doctest::Approx(0.0).epsilon(1e-12));
      }
    }
    CHECK(env.state().done);
    CHECK_THROWS(env.Step(Action::Zero()));
  }
}

TEST_CASE("scripted grasp attaches and lifts a square") {
  const ObjectShape s = Square(0.04);
  PlanarGraspEnv env;
  env.Reset(s, 1, 0);
  const EnvState& st = env.state();
  const double rest = st.object_pos.y();
  int phase = 0;
  bool attached = false;
  for (int t = 0; t < 100 && !st.done; ++t) {
    Action a;
    const double tip_y = 0.5 * (st.fingertips[0].y() + st.fingertips[1].y());
    const double dx = st.object_pos.x() - st.gripper.base_pos.x();
    const double dy = st.object_pos.y() - tip_y;
    if (phase == 0) {
      a.joint_targets.fill(-1.0);
      a.wrench = {std::clamp(50 * dx, -1.0, 1.0), -1.0, 0};
      if (dy > -0.03) phase = 1;
    } else if (phase == 1) {
      a.joint_targets.fill(-1.0);
      a.wrench = {std::clamp(50 * dx, -1.0, 1.0),
                  std::clamp(60 * dy, -1.0, 1.0), 0};
      if (std::abs(dy) < 0.004) phase = 2;
    } else {
      a.joint_targets.fill(1.0);
      a.wrench = {0, st.attached ? 1.0 : std::clamp(60 * dy, -1.0, 1.0), 0};
    }
    env.Step(a);
    attached = attached || st.attached;
  }
  CHECK(attached);
  CHECK(st.object_pos.y() > rest + 0.05);
}

TEST_CASE("non-finite actions are rejected") {
  PlanarGraspEnv env;
  env.Reset(SmallDataset().train[0], 1, 0);
  Action a;
  a.wrench[0] = std::nan("");
  CHECK_THROWS_AS(env.Step(a), NumericError);
  PlanarGraspEnv fresh;
  CHECK_THROWS(fresh.Step(Action::Zero()));
}

}  // namespace
}  // namespace resgrasp
