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

// Independent reference implementations shared by the unit tests and the
// acceptance checks. Nothing here is used by the library.

#ifndef RESGRASP_TESTS_ORACLES_H_
#define RESGRASP_TESTS_ORACLES_H_

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "resgrasp/numerics/matrix.h"
#include "resgrasp/numerics/mlp.h"
#include "resgrasp/numerics/rng.h"

namespace resgrasp::oracle {

// ||a - b|| / max(||a||, ||b||), or 0 when both vanish.
inline double RelativeError(const std::vector<double>& a,
                            const std::vector<double>& b) {
  double diff = 0.0, na = 0.0, nb = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    diff += (a[i] - b[i]) * (a[i] - b[i]);
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  const double denom = std::sqrt(std::max(na, nb));
  return denom < 1e-300 ? 0.0 : std::sqrt(diff) / denom;
}

// Central differences of a scalar function over every entry of `params`.
inline std::vector<double> CentralDifferences(
    const std::vector<Matrix*>& params, const std::function<double()>& f,
    double h) {
  std::vector<double> out;
  for (Matrix* m : params) {
    for (Eigen::Index i = 0; i < m->size(); ++i) {
      double& x = m->data()[i];
      const double saved = x;
      x = saved + h;
      const double up = f();
      x = saved - h;
      const double down = f();
      x = saved;
      out.push_back((up - down) / (2.0 * h));
    }
  }
  return out;
}

inline std::vector<double> Flatten(const std::vector<Matrix>& tensors) {
  std::vector<double> out;
  for (const Matrix& m : tensors) {
    out.insert(out.end(), m.data(), m.data() + m.size());
  }
  return out;
}

struct MlpGradCheck {
  double param_error = 0.0;
  double input_error = 0.0;
};

// Compares MlpBackward against central differences of
// L = sum(upstream .* MlpForward(params, batch)).
inline MlpGradCheck CheckMlpGradients(MlpParams params, Matrix batch,
                                      const Matrix& upstream, double h) {
  auto loss = [&]() {
    return (upstream.array() * MlpForward(params, batch).array()).sum();
  };
  const MlpBackwardResult g = MlpBackward(params, batch, upstream);
  std::vector<Matrix> analytic;
  for (const Matrix* t : g.param_grads.Tensors()) analytic.push_back(*t);
  MlpGradCheck r;
  r.param_error = RelativeError(Flatten(analytic),
                                CentralDifferences(params.Tensors(), loss, h));
  r.input_error = RelativeError(Flatten({g.input_grads}),
                                CentralDifferences({&batch}, loss, h));
  return r;
}

// A_t = sum_{l >= 0} (gamma lambda)^l [no episode end in t..t+l-1] delta_{t+l},
// with every delta recomputed from scratch; the value after the last step is
// `last_value`.
inline void BruteForceGae(const std::vector<double>& rewards,
                          const std::vector<double>& values,
                          const std::vector<double>& dones, double last_value,
                          double gamma, double lambda,
                          std::vector<double>* advantages,
                          std::vector<double>* returns) {
  const size_t n = rewards.size();
  advantages->assign(n, 0.0);
  returns->assign(n, 0.0);
  for (size_t t = 0; t < n; ++t) {
    double sum = 0.0;
    for (size_t l = 0; t + l < n; ++l) {
      bool alive = true;
      for (size_t j = t; j < t + l; ++j) alive = alive && dones[j] == 0.0;
      if (!alive) break;
      const size_t s = t + l;
      const double next = s + 1 < n ? values[s + 1] : last_value;
      const double delta =
          rewards[s] + gamma * next * (1.0 - dones[s]) - values[s];
      sum += std::pow(gamma * lambda, static_cast<double>(l)) * delta;
    }
    (*advantages)[t] = sum;
    (*returns)[t] = sum + values[t];
  }
}

// Exhaustive k-means optimum for tiny inputs: tries every assignment of n
// points to k non-empty clusters. Returns the minimal sum of squared
// distances to cluster means.
inline double BruteForceKMeansObjective(const Matrix& points, int k) {
  const int n = static_cast<int>(points.rows());
  std::vector<int> labels(n, 0);
  double best = std::numeric_limits<double>::infinity();
  while (true) {
    std::vector<int> counts(k, 0);
    for (int l : labels) ++counts[l];
    if (std::all_of(counts.begin(), counts.end(),
                    [](int c) { return c > 0; })) {
      Matrix means = Matrix::Zero(k, points.cols());
      for (int i = 0; i < n; ++i) means.row(labels[i]) += points.row(i);
      for (int c = 0; c < k; ++c) means.row(c) /= counts[c];
      double obj = 0.0;
      for (int i = 0; i < n; ++i) {
        obj += (points.row(i) - means.row(labels[i])).squaredNorm();
      }
      best = std::min(best, obj);
    }
    int pos = 0;
    while (pos < n && ++labels[pos] == k) labels[pos++] = 0;
    if (pos == n) break;
  }
  return best;
}

inline Matrix RandomMatrix(int rows, int cols, Rng& rng, double scale = 1.0) {
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i)
    m.data()[i] = scale * rng.Normal();
  return m;
}

}  // namespace resgrasp::oracle

#endif  // RESGRASP_TESTS_ORACLES_H_
