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

#include "resgrasp/clustering/kmeans.h"

#include <limits>
#include <stdexcept>
#include <string>

#include "resgrasp/numerics/errors.h"
#include "resgrasp/numerics/rng.h"

namespace resgrasp {
namespace {

double SquaredDistance(const Matrix& a, int i, const Matrix& b, int j) {
  return (a.row(i) - b.row(j)).squaredNorm();
}

// Draws an index with probability proportional to weights; falls back to a
// uniform pick when every weight is zero (all points coincide with seeds).
int SampleProportional(const std::vector<double>& weights, Rng& rng) {
  double total = 0.0;
  for (double w : weights) total += w;
  if (total <= 0.0)
    return static_cast<int>(rng.UniformInt(static_cast<int>(weights.size())));
  const double u = rng.Uniform() * total;
  double acc = 0.0;
  for (size_t i = 0; i < weights.size(); ++i) {
    acc += weights[i];
    if (u < acc) return static_cast<int>(i);
  }
  for (size_t i = weights.size(); i-- > 0;) {
    if (weights[i] > 0.0) return static_cast<int>(i);
  }
  return 0;
}

Matrix SeedPlusPlus(const Matrix& x, int k, Rng& rng) {
  const int n = static_cast<int>(x.rows());
  Matrix centroids(k, x.cols());
  centroids.row(0) = x.row(static_cast<int>(rng.UniformInt(n)));
  std::vector<double> d2(n, std::numeric_limits<double>::infinity());
  for (int c = 1; c < k; ++c) {
    for (int i = 0; i < n; ++i) {
      d2[i] = std::min(d2[i], SquaredDistance(x, i, centroids, c - 1));
    }
    centroids.row(c) = x.row(SampleProportional(d2, rng));
  }
  return centroids;
}

}  // namespace

int NearestCentroid(const Matrix& centroids, const RowVector& point) {
  int best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (int c = 0; c < centroids.rows(); ++c) {
    const double d = (centroids.row(c) - point).squaredNorm();
    if (d < best_d) {
      best_d = d;
      best = c;
    }
  }
  return best;
}

double ClusterObjective(const Matrix& features, const Matrix& centroids,
                        const std::vector<int>& assignment) {
  double total = 0.0;
  for (int i = 0; i < features.rows(); ++i) {
    total += SquaredDistance(features, i, centroids, assignment[i]);
  }
  return total;
}

ClusterModel KMeans(const Matrix& features, int k, uint64_t seed,
                    int max_iters) {
  const int n = static_cast<int>(features.rows());
  if (k < 1) throw std::invalid_argument("KMeans: k must be >= 1");
  if (k > n) {
    throw std::invalid_argument("KMeans: k=" + std::to_string(k) + " exceeds " +
                                std::to_string(n) + " points");
  }
  if (!AllFinite(features)) throw NumericError("KMeans: non-finite features");

  Rng rng(seed, 0);
  ClusterModel model;
  model.k = k;
  model.centroids = SeedPlusPlus(features, k, rng);
  model.assignment.assign(n, -1);

  for (int iter = 0; iter < max_iters; ++iter) {
    bool changed = false;
    for (int i = 0; i < n; ++i) {
      const int c = NearestCentroid(model.centroids, features.row(i));
      if (c != model.assignment[i]) {
        model.assignment[i] = c;
        changed = true;
      }
    }
    model.objective_history.push_back(
        ClusterObjective(features, model.centroids, model.assignment));
    model.iterations = iter + 1;
    if (!changed && iter > 0) break;

    Matrix sums = Matrix::Zero(k, features.cols());
    std::vector<int> counts(k, 0);
    for (int i = 0; i < n; ++i) {
      sums.row(model.assignment[i]) += features.row(i);
      ++counts[model.assignment[i]];
    }
    for (int c = 0; c < k; ++c) {
      if (counts[c] > 0) {
        model.centroids.row(c) = sums.row(c) / counts[c];
        continue;
      }
      // Empty cluster: move it onto the point worst served by its centroid,
      // taken from a cluster that can spare a member.
      int far = -1;
      double far_d = -1.0;
      for (int i = 0; i < n; ++i) {
        const int a = model.assignment[i];
        if (counts[a] < 2) continue;
        const double d = SquaredDistance(features, i, model.centroids, a);
        if (d > far_d) {
          far_d = d;
          far = i;
        }
      }
      if (far < 0) continue;
      --counts[model.assignment[far]];
      model.assignment[far] = c;
      counts[c] = 1;
      model.centroids.row(c) = features.row(far);
    }
  }
  return model;
}

std::vector<int> SelectRepresentatives(const ClusterModel& model,
                                       const Matrix& features,
                                       const std::vector<int>& ids) {
  if (ids.size() != static_cast<size_t>(features.rows()) ||
      model.assignment.size() != ids.size()) {
    throw DimensionError("SelectRepresentatives: ids/features mismatch");
  }
  std::vector<int> reps(model.k, -1);
  std::vector<double> best(model.k, std::numeric_limits<double>::infinity());
  for (size_t i = 0; i < ids.size(); ++i) {
    const int c = model.assignment[i];
    const double d =
        SquaredDistance(features, static_cast<int>(i), model.centroids, c);
    if (d < best[c] || (d == best[c] && ids[i] < reps[c])) {
      best[c] = d;
      reps[c] = ids[i];
    }
  }
  return reps;
}

}  // namespace resgrasp
