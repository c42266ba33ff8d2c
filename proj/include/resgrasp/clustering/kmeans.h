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

#ifndef RESGRASP_CLUSTERING_KMEANS_H_
#define RESGRASP_CLUSTERING_KMEANS_H_

#include <cstdint>
#include <vector>

#include "resgrasp/numerics/matrix.h"

namespace resgrasp {

struct ClusterModel {
  int k = 0;
  // k x d.
  Matrix centroids;
  // Cluster index per input row.
  std::vector<int> assignment;
  // Object id of each cluster's representative.
  std::vector<int> representatives;
  // Sum of squared distances after every assignment step.
  std::vector<double> objective_history;
  int iterations = 0;
};

// K-means++ seeding followed by Lloyd iterations until the assignment stops
// changing or max_iters is reached. Rows of `features` are points. An empty
// cluster is reseeded at the point farthest from its current centroid.
ClusterModel KMeans(const Matrix& features, int k, uint64_t seed,
                    int max_iters = 100);

// Per cluster, the member closest to its centroid; ties go to the lower id.
std::vector<int> SelectRepresentatives(const ClusterModel& model,
                                       const Matrix& features,
                                       const std::vector<int>& ids);

// Index of the nearest centroid (lowest index on ties).
int NearestCentroid(const Matrix& centroids, const RowVector& point);

double ClusterObjective(const Matrix& features, const Matrix& centroids,
                        const std::vector<int>& assignment);

}  // namespace resgrasp

#endif  // RESGRASP_CLUSTERING_KMEANS_H_
