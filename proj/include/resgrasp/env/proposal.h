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

#ifndef RESGRASP_ENV_PROPOSAL_H_
#define RESGRASP_ENV_PROPOSAL_H_

#include <stdexcept>
#include <string>

#include "resgrasp/env/gripper.h"
#include "resgrasp/env/shapes.h"
#include "resgrasp/numerics/rng.h"

namespace resgrasp {

class ProposalUnavailable : public std::runtime_error {
 public:
  explicit ProposalUnavailable(const std::string& what)
      : std::runtime_error(what) {}
};

struct ProposalConfig {
  GripperGeometry gripper;
  // Contact normals must be within this angle of exactly opposite, and the
  // line joining the contacts within this angle of each normal.
  double antipodal_tolerance = 20.0 * 3.14159265358979323846 / 180.0;
  double max_wrist_tilt = 0.6;
  double contact_eps = 0.005;
  double max_aspect = 10.0;
  int boundary_samples = 72;
  // The proposal is drawn uniformly from this many best-scoring candidates.
  int top_choices = 3;
  // Allowed joint error at the end of open-loop validation.
  double joint_tolerance = 0.05;
};

// Finds an antipodal boundary pair, places the wrist so both fingers can reach
// it and solves finger IK. Throws ProposalUnavailable when nothing passes
// validation.
GraspProposal SynthesizeProposal(const ObjectShape& shape, Rng& rng,
                                 const ProposalConfig& cfg = {});

// Starting from the fully open hand at the proposal's wrist pose on the
// object resting at angle zero, drives the joints to the proposal targets
// with fingertip collision. True iff both fingertips end within contact_eps
// of the boundary at the proposed joints.
bool ValidateProposal(const ObjectShape& shape, const GraspProposal& proposal,
                      const ProposalConfig& cfg = {});

}  // namespace resgrasp

#endif  // RESGRASP_ENV_PROPOSAL_H_
