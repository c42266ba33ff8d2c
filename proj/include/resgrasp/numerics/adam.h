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

#ifndef RESGRASP_NUMERICS_ADAM_H_
#define RESGRASP_NUMERICS_ADAM_H_

#include <cstdint>
#include <string>
#include <vector>

#include "resgrasp/numerics/matrix.h"

namespace resgrasp {

struct AdamState {
  std::vector<Matrix> first_moment;
  std::vector<Matrix> second_moment;
  int64_t step_count = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

// Zero-initialized moments shaped like `params`.
AdamState MakeAdamState(const std::vector<const Matrix*>& params,
                        double beta1 = 0.9, double beta2 = 0.999,
                        double epsilon = 1e-8);

struct AdamStepInfo {
  double grad_norm = 0.0;   // global L2 norm before clipping
  double clip_scale = 1.0;  // factor applied to the gradients
};

// One bias-corrected Adam update. The global gradient norm is clipped to
// `max_grad_norm` first (disabled when <= 0). A non-finite gradient rejects
// the whole update, leaving params and state untouched, and throws
// NumericError naming the offending tensor.
AdamStepInfo AdamStep(const std::vector<Matrix*>& params,
                      const std::vector<Matrix>& grads, AdamState& state,
                      double lr, double max_grad_norm,
                      const std::vector<std::string>& names = {});

}  // namespace resgrasp

#endif  // RESGRASP_NUMERICS_ADAM_H_
