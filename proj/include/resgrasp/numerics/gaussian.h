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

#ifndef RESGRASP_NUMERICS_GAUSSIAN_H_
#define RESGRASP_NUMERICS_GAUSSIAN_H_

#include "resgrasp/numerics/matrix.h"
#include "resgrasp/numerics/rng.h"

namespace resgrasp {

// Diagonal Gaussian with a state-independent learnable log standard deviation.
// The mean comes from a network; only log_std lives here.
struct GaussianHead {
  Matrix log_std;  // 1 x dim

  static GaussianHead WithInitialStd(int dim, double std);
  int dim() const { return static_cast<int>(log_std.cols()); }
};

struct GaussianSample {
  Vector action;
  double log_prob = 0.0;
};

// Exact diagonal-Gaussian log density of `action`.
double GaussianLogProb(const Vector& mean, const GaussianHead& head,
                       const Vector& action);

// Draws mean + std * z, or returns the mean when `deterministic`.
GaussianSample SampleGaussian(const Vector& mean, const GaussianHead& head,
                              Rng& rng, bool deterministic);

double GaussianEntropy(const GaussianHead& head);

// Batched log densities: one per row of `mean`/`actions`.
Vector GaussianLogProbBatch(const Matrix& mean, const GaussianHead& head,
                            const Matrix& actions);

// Per-row partial derivatives of the log density.
struct GaussianLogProbGrads {
  Matrix d_mean;     // N x dim
  Matrix d_log_std;  // N x dim
};
GaussianLogProbGrads GaussianLogProbGradients(const Matrix& mean,
                                              const GaussianHead& head,
                                              const Matrix& actions);

}  // namespace resgrasp

#endif  // RESGRASP_NUMERICS_GAUSSIAN_H_
