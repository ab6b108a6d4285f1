//
// Copyright 2026 The deepcand Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#ifndef DEEPCAND_KMEANS_H_
#define DEEPCAND_KMEANS_H_

#include <cstddef>
#include <vector>

#include "absl/status/statusor.h"
#include "deepcand/matrix.h"
#include "deepcand/rng.h"

namespace deepcand {

struct KMeansOptions {
  size_t max_iters = 100;
  // Stop once no center moves farther than this (Euclidean).
  double tol = 1e-6;
};

struct KMeansModel {
  size_t n_clusters = 0;
  EmbeddingMatrix centers;
  // Sum of squared distances to the assigned centers.
  double inertia = 0.0;
  size_t iterations = 0;
  // Cost after each assignment step; nonincreasing.
  std::vector<double> inertia_history;
};

// Lloyd iterations from a k-means++ start. A cluster left empty is reseeded
// at the point farthest from its assigned center.
absl::StatusOr<KMeansModel> FitKMeans(ConstMatrixView points,
                                      size_t n_clusters, SeededRng& rng,
                                      const KMeansOptions& options = {});

// Nearest center per point, lowest index on ties.
absl::StatusOr<std::vector<int>> AssignClusters(const KMeansModel& model,
                                                ConstMatrixView points);

}  // namespace deepcand

#endif  // DEEPCAND_KMEANS_H_
