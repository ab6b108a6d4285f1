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

#include "deepcand/kmeans.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "absl/strings/str_cat.h"
#include "deepcand/parallel.h"
#include "deepcand/sampling.h"
#include "deepcand/simd/kernels.h"
#include "deepcand/status_macros.h"

namespace deepcand {
namespace {

struct Assignment {
  std::vector<int> labels;
  std::vector<double> distances;  // squared, to the assigned center
  double cost = 0.0;
};

Assignment AssignToCenters(ConstMatrixView points,
                           const EmbeddingMatrix& centers) {
  Assignment a;
  a.labels.resize(points.rows());
  a.distances.resize(points.rows());
  ParallelFor(points.rows(), [&](size_t i) {
    int best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (size_t c = 0; c < centers.rows(); ++c) {
      const double d = simd::SquaredDistance(points.row(i), centers.row(c));
      if (d < best_d) {
        best_d = d;
        best = static_cast<int>(c);
      }
    }
    a.labels[i] = best;
    a.distances[i] = best_d;
  });
  for (double d : a.distances) a.cost += d;
  return a;
}

absl::StatusOr<EmbeddingMatrix> KMeansPlusPlus(ConstMatrixView points,
                                               size_t n_clusters,
                                               SeededRng& rng) {
  const size_t n = points.rows();
  EmbeddingMatrix centers(n_clusters, points.cols());
  size_t first = rng.UniformIndex(n);
  std::copy(points.row(first).begin(), points.row(first).end(),
            centers.row(0).begin());
  std::vector<double> nearest(n, std::numeric_limits<double>::infinity());
  for (size_t c = 1; c < n_clusters; ++c) {
    double total = 0.0;
    for (size_t i = 0; i < n; ++i) {
      nearest[i] = std::min(
          nearest[i], simd::SquaredDistance(points.row(i), centers.row(c - 1)));
      total += nearest[i];
    }
    size_t pick;
    if (total > 0.0) {
      DEEPCAND_ASSIGN_OR_RETURN(pick, SampleCategorical(rng, nearest));
    } else {
      // Every point already coincides with a center.
      pick = rng.UniformIndex(n);
    }
    std::copy(points.row(pick).begin(), points.row(pick).end(),
              centers.row(c).begin());
  }
  return centers;
}

}  // namespace

absl::StatusOr<KMeansModel> FitKMeans(ConstMatrixView points,
                                      size_t n_clusters, SeededRng& rng,
                                      const KMeansOptions& options) {
  if (n_clusters == 0) {
    return absl::InvalidArgumentError("need at least one cluster");
  }
  if (n_clusters > points.rows()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "cannot fit ", n_clusters, " clusters to ", points.rows(), " points"));
  }
  const size_t d = points.cols();
  KMeansModel model;
  model.n_clusters = n_clusters;
  DEEPCAND_ASSIGN_OR_RETURN(model.centers,
                            KMeansPlusPlus(points, n_clusters, rng));

  Assignment current = AssignToCenters(points, model.centers);
  model.inertia_history.push_back(current.cost);
  for (size_t iter = 0; iter < options.max_iters; ++iter) {
    EmbeddingMatrix next(n_clusters, d);
    std::vector<size_t> sizes(n_clusters, 0);
    for (size_t i = 0; i < points.rows(); ++i) {
      const int c = current.labels[i];
      ++sizes[c];
      simd::Axpy(1.0, points.row(i), next.row(c));
    }
    std::vector<bool> taken(points.rows(), false);
    for (size_t c = 0; c < n_clusters; ++c) {
      if (sizes[c] > 0) {
        for (double& v : next.row(c)) v /= static_cast<double>(sizes[c]);
        continue;
      }
      // Empty: move to the point farthest from its own center.
      size_t far = 0;
      double far_d = -1.0;
      for (size_t i = 0; i < points.rows(); ++i) {
        if (!taken[i] && current.distances[i] > far_d) {
          far_d = current.distances[i];
          far = i;
        }
      }
      taken[far] = true;
      std::copy(points.row(far).begin(), points.row(far).end(),
                next.row(c).begin());
    }

    double movement = 0.0;
    for (size_t c = 0; c < n_clusters; ++c) {
      movement = std::max(
          movement, std::sqrt(simd::SquaredDistance(model.centers.row(c),
                                                    next.row(c))));
    }
    model.centers = std::move(next);
    current = AssignToCenters(points, model.centers);
    model.inertia_history.push_back(current.cost);
    model.iterations = iter + 1;
    if (movement < options.tol) break;
  }
  model.inertia = current.cost;
  return model;
}

absl::StatusOr<std::vector<int>> AssignClusters(const KMeansModel& model,
                                                ConstMatrixView points) {
  if (points.rows() > 0 && points.cols() != model.centers.cols()) {
    return absl::InvalidArgumentError(
        absl::StrCat("points have dim ", points.cols(), ", centers ",
                     model.centers.cols()));
  }
  return AssignToCenters(points, model.centers).labels;
}

}  // namespace deepcand
