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

#ifndef RESGRASP_NUMERICS_MLP_H_
#define RESGRASP_NUMERICS_MLP_H_

#include <vector>

#include "resgrasp/numerics/matrix.h"
#include "resgrasp/numerics/rng.h"

namespace resgrasp {

// Fully connected network. Hidden layers use ELU, the output layer is linear.
// weights[l] maps layer_sizes[l] -> layer_sizes[l + 1] (shape in x out) so a
// batch of row samples propagates as `h * W + b`.
struct MlpParams {
  std::vector<int> layer_sizes;
  std::vector<Matrix> weights;
  std::vector<Matrix> biases;  // each 1 x out

  int num_layers() const { return static_cast<int>(weights.size()); }
  int input_size() const { return layer_sizes.front(); }
  int output_size() const { return layer_sizes.back(); }

  // All parameter tensors in a fixed order: W0, b0, W1, b1, ...
  std::vector<Matrix*> Tensors();
  std::vector<const Matrix*> Tensors() const;

  // Same shapes, all zeros.
  MlpParams ZerosLike() const;
};

// Intermediate values kept by MlpForward for the backward pass.
struct MlpCache {
  std::vector<Matrix> inputs;           // input to layer l
  std::vector<Matrix> pre_activations;  // h * W + b at layer l
};

struct MlpBackwardResult {
  MlpParams param_grads;
  Matrix input_grads;
};

double Elu(double x);
double EluDerivative(double x);

// Orthogonal initialization with `hidden_gain` on hidden layers and
// `output_gain` on the final layer; biases start at zero.
MlpParams InitMlp(const std::vector<int>& layer_sizes, Rng& rng,
                  double hidden_gain, double output_gain);

// Validates that weight and bias shapes chain together.
void ValidateMlp(const MlpParams& params);

Matrix MlpForward(const MlpParams& params, const Matrix& batch,
                  MlpCache* cache = nullptr);

// Reverse-mode gradients of sum(upstream .* output) using a cache filled by
// MlpForward on the same parameters.
MlpBackwardResult MlpBackward(const MlpParams& params, const MlpCache& cache,
                              const Matrix& upstream);

// Convenience overload that recomputes the forward pass.
MlpBackwardResult MlpBackward(const MlpParams& params, const Matrix& batch,
                              const Matrix& upstream);

}  // namespace resgrasp

#endif  // RESGRASP_NUMERICS_MLP_H_
