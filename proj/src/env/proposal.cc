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

#include "resgrasp/env/proposal.h"

#include <algorithm>
#include <cmath>
#include <vector>

namespace resgrasp {
namespace {

struct Candidate {
  GraspProposal proposal;
  double score;
};

// Object pose when resting on the table at angle zero.
Pose2 RestPose(const ObjectShape& shape) {
  return {Vec2(0.0, shape.RestHeight()), 0.0};
}

}  // namespace

bool ValidateProposal(const ObjectShape& shape, const GraspProposal& proposal,
                      const ProposalConfig& cfg) {
  const GripperGeometry& g = cfg.gripper;
  const Pose2 object = RestPose(shape);
  const Polygon world = TransformPolygon(shape.vertices, object);
  const Pose2 base =
      object.Compose({proposal.wrist_offset, proposal.wrist_rot});
  if (base.pos.y() <= 0.0) return false;

  Joints q = OpenJoints(g);
  for (int f = 0; f < 2; ++f) {
    const Vec2 tip = base.Apply(FingertipLocal(g, f, q));
    if (tip.y() < 0.0 || PointInPolygon(world, tip)) return false;
  }
  for (int step = 0; step < 200; ++step) {
    q = MoveFingers(g, base, q, proposal.joint_targets, 0.05, &world);
  }
  for (int j = 0; j < kNumJoints; ++j) {
    if (std::abs(q[j] - proposal.joint_targets[j]) > cfg.joint_tolerance) {
      return false;
    }
  }
  for (int f = 0; f < 2; ++f) {
    const Vec2 tip = base.Apply(FingertipLocal(g, f, q));
    if (QueryBoundary(world, tip).distance > cfg.contact_eps) return false;
  }
  return true;
}

GraspProposal SynthesizeProposal(const ObjectShape& shape, Rng& rng,
                                 const ProposalConfig& cfg) {
  if (shape.vertices.size() < 3) {
    throw ProposalUnavailable("object has fewer than 3 vertices");
  }
  if (AspectRatio(shape.vertices) > cfg.max_aspect) {
    throw ProposalUnavailable("object aspect ratio too extreme to grasp");
  }
  const GripperGeometry& g = cfg.gripper;
  const Pose2 object = RestPose(shape);
  const Polygon world = TransformPolygon(shape.vertices, object);
  const double cos_tol = std::cos(cfg.antipodal_tolerance);
  const auto samples = SampleBoundary(shape.vertices, cfg.boundary_samples);
  const std::vector<double> depths = {0.13,  0.12,  0.14,  0.11, 0.10,
                                      0.135, 0.125, 0.115, 0.105};

  std::vector<Candidate> candidates;
  for (size_t i = 0; i < samples.size(); ++i) {
    for (size_t j = i + 1; j < samples.size(); ++j) {
      const Vec2 pi = object.Apply(samples[i].point);
      const Vec2 pj = object.Apply(samples[j].point);
      const Vec2& ni = samples[i].normal;
      const Vec2& nj = samples[j].normal;
      if (ni.dot(nj) > -cos_tol) continue;
      const Vec2 u = (pj - pi).normalized();
      if (ni.dot(-u) < cos_tol || nj.dot(u) < cos_tol) continue;
      const Vec2 mid = 0.5 * (pi + pj);
      if (!PointInPolygon(world, mid)) continue;

      // The gripper x-axis runs from the left contact to the right contact.
      Vec2 left = pi, right = pj;
      if (u.x() < 0.0) std::swap(left, right);
      const Vec2 axis = (right - left).normalized();
      const double rot = std::atan2(axis.y(), axis.x());
      if (std::abs(rot) > cfg.max_wrist_tilt) continue;

      for (double depth : depths) {
        const Pose2 base{mid + Rotate(Vec2(0.0, depth), rot), rot};
        const auto lq = FingerIk(g, kLeftFinger, base.InverseApply(left));
        const auto rq = FingerIk(g, kRightFinger, base.InverseApply(right));
        if (!lq || !rq) continue;
        GraspProposal p;
        p.wrist_rot = rot;
        p.wrist_offset = object.InverseApply(base.pos);
        p.joint_targets = {(*lq)[0], (*lq)[1], (*rq)[0], (*rq)[1]};
        // Prefer level grasps through the centroid height.
        const double score = std::abs(rot) +
                             4.0 * std::abs(mid.y() - object.pos.y()) +
                             0.5 * std::abs(depth - 0.13);
        candidates.push_back({p, score});
        break;
      }
    }
  }
  std::stable_sort(
      candidates.begin(), candidates.end(),
      [](const Candidate& a, const Candidate& b) { return a.score < b.score; });
  std::vector<GraspProposal> valid;
  for (const Candidate& c : candidates) {
    if (ValidateProposal(shape, c.proposal, cfg)) valid.push_back(c.proposal);
    if (static_cast<int>(valid.size()) >= cfg.top_choices) break;
  }
  if (valid.empty()) {
    throw ProposalUnavailable("no antipodal pair passed validation");
  }
  return valid[rng.UniformInt(static_cast<int>(valid.size()))];
}

}  // namespace resgrasp
