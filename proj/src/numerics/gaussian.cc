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

#include "resgrasp/numerics/gaussian.h"

#include <cmath>
#include <numbers>

#include "resgrasp/numerics/errors.h"

namespace resgrasp {
namespace {

constexpr double kHalfLog2Pi = 0.91893853320467274178;  // 0.5 * ln(2 pi)

void CheckDims(const Vector& mean, const GaussianHead& head) {
  if (mean.size() != head.dim()) {
    throw DimensionError("Gaussian: mean size does not match log_std");
  }
  if (!mean.allFinite() || !head.log_std.allFinite()) {
    throw NumericError("Gaussian: non-finite mean or log_std");
  }
}

}  // namespace

GaussianHead GaussianHead::WithInitialStd(int dim, double std) {
  GaussianHead h;
  h.log_std = Matrix::Constant(1, dim, std::log(std));
  return h;
}

double GaussianLogProb(const Vector& mean, const GaussianHead& head,
                       const Vector& action) {
  CheckDims(mean, head);
  if (action.size() != mean.size()) {
    throw DimensionError("GaussianLogProb: action size mismatch");
  }
  double lp = 0.0;
  for (int i = 0; i < mean.size(); ++i) {
    const double ls = head.log_std(0, i);
    const double z = (action[i] - mean[i]) * std::exp(-ls);
    lp += -0.5 * z * z - ls - kHalfLog2Pi;
  }
  return lp;
}

GaussianSample SampleGaussian(const Vector& mean, const GaussianHead& head,
                              Rng& rng, bool deterministic) {
  CheckDims(mean, head);
  GaussianSample s;
  s.action = mean;
  if (!deterministic) {
    for (int i = 0; i < mean.size(); ++i) {
      s.action[i] += std::exp(head.log_std(0, i)) * rng.Normal();
    }
  }
  s.log_prob = GaussianLogProb(mean, head, s.action);
  return s;
}

double GaussianEntropy(const GaussianHead& head) {
  const double per_dim = 0.5 + kHalfLog2Pi;
  return head.log_std.sum() + per_dim * head.dim();
}

Vector GaussianLogProbBatch(const Matrix& mean, const GaussianHead& head,
                            const Matrix& actions) {
  CheckShape(actions, mean.rows(), mean.cols(), "GaussianLogProbBatch actions");
  if (mean.cols() != head.dim()) {
    throw DimensionError("GaussianLogProbBatch: dim mismatch");
  }
  const RowVector inv_std = (-head.log_std.row(0)).array().exp();
  const double const_term = -head.log_std.sum() - kHalfLog2Pi * head.dim();
  Matrix z = (actions - mean).array().rowwise() * inv_std.array();
  Vector out = -0.5 * z.rowwise().squaredNorm();
  out.array() += const_term;
  return out;
}

GaussianLogProbGrads GaussianLogProbGradients(const Matrix& mean,
                                              const GaussianHead& head,
                                              const Matrix& actions) {
  CheckShape(actions, mean.rows(), mean.cols(), "GaussianLogProbGradients");
  const RowVector inv_std = (-head.log_std.row(0)).array().exp();
  GaussianLogProbGrads g;
  Matrix z = (actions - mean).array().rowwise() * inv_std.array();
  // d/dmu = (a - mu) / sigma^2 ; d/dlog_sigma = z^2 - 1
  g.d_mean = z.array().rowwise() * inv_std.array();
  g.d_log_std = z.array().square() - 1.0;
  return g;
}

}  // namespace resgrasp
