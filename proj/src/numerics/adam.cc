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

#include "resgrasp/numerics/adam.h"

#include <cmath>
#include <sstream>

#include "resgrasp/numerics/errors.h"

namespace resgrasp {

AdamState MakeAdamState(const std::vector<const Matrix*>& params, double beta1,
                        double beta2, double epsilon) {
  AdamState s;
  s.beta1 = beta1;
  s.beta2 = beta2;
  s.epsilon = epsilon;
  for (const Matrix* p : params) {
    s.first_moment.push_back(Matrix::Zero(p->rows(), p->cols()));
    s.second_moment.push_back(Matrix::Zero(p->rows(), p->cols()));
  }
  return s;
}

AdamStepInfo AdamStep(const std::vector<Matrix*>& params,
                      const std::vector<Matrix>& grads, AdamState& state,
                      double lr, double max_grad_norm,
                      const std::vector<std::string>& names) {
  if (params.size() != grads.size() ||
      params.size() != state.first_moment.size()) {
    throw DimensionError("AdamStep: parameter/gradient/state count mismatch");
  }
  if (!(lr > 0.0)) throw std::invalid_argument("AdamStep: lr must be positive");

  double sq = 0.0;
  for (size_t i = 0; i < params.size(); ++i) {
    CheckShape(grads[i], params[i]->rows(), params[i]->cols(),
               "AdamStep gradient " + std::to_string(i));
    if (!grads[i].allFinite()) {
      std::ostringstream msg;
      msg << "AdamStep: non-finite gradient in tensor " << i;
      if (i < names.size()) msg << " (" << names[i] << ")";
      throw NumericError(msg.str());
    }
    sq += grads[i].squaredNorm();
  }

  AdamStepInfo info;
  info.grad_norm = std::sqrt(sq);
  if (max_grad_norm > 0.0 && info.grad_norm > max_grad_norm) {
    info.clip_scale = max_grad_norm / info.grad_norm;
  }

  state.step_count += 1;
  const double t = static_cast<double>(state.step_count);
  const double bc1 = 1.0 - std::pow(state.beta1, t);
  const double bc2 = 1.0 - std::pow(state.beta2, t);
  for (size_t i = 0; i < params.size(); ++i) {
    const Matrix g = grads[i] * info.clip_scale;
    Matrix& m = state.first_moment[i];
    Matrix& v = state.second_moment[i];
    m = state.beta1 * m + (1.0 - state.beta1) * g;
    v = state.beta2 * v + (1.0 - state.beta2) * g.cwiseProduct(g);
    const double eps = state.epsilon;
    *params[i] -=
        (lr * (m / bc1).array() / ((v / bc2).array().sqrt() + eps)).matrix();
  }
  return info;
}

}  // namespace resgrasp
