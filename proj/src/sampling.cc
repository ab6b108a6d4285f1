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

#include "deepcand/sampling.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "absl/strings/str_cat.h"

namespace deepcand {

ProjectionSet ProjectionSet::Prefix(size_t count) const {
  count = std::min(count, size());
  return ProjectionSet(EmbeddingMatrix::Copy(vectors_.view().Rows(0, count)));
}

absl::StatusOr<ProjectionSet> SampleUnitSphere(SeededRng& rng, size_t dim,
                                               size_t p) {
  if (dim == 0 || p == 0) {
    return absl::InvalidArgumentError(
        absl::StrCat("unit sphere sampling needs dim >= 1 and p >= 1, got dim=",
                     dim, " p=", p));
  }
  EmbeddingMatrix vectors(p, dim);
  for (size_t j = 0; j < p; ++j) {
    std::span<double> row = vectors.row(j);
    double norm = 0.0;
    do {
      double sq = 0.0;
      for (double& x : row) {
        x = rng.Gaussian();
        sq += x * x;
      }
      norm = std::sqrt(sq);
    } while (norm == 0.0);
    for (double& x : row) x /= norm;
  }
  return ProjectionSet(std::move(vectors));
}

double LaplaceFromUniform(double u, double scale) {
  if (u == 0.0) return 0.0;
  const double sign = u > 0.0 ? 1.0 : -1.0;
  return -scale * sign * std::log1p(-2.0 * std::fabs(u));
}

absl::StatusOr<double> SampleLaplace(SeededRng& rng, double scale) {
  if (!(scale > 0.0) || !std::isfinite(scale)) {
    return absl::InvalidArgumentError(
        absl::StrCat("Laplace scale must be positive and finite, got ", scale));
  }
  return LaplaceFromUniform(rng.UniformOpen() - 0.5, scale);
}

absl::StatusOr<size_t> SampleCategorical(SeededRng& rng,
                                         std::span<const double> weights) {
  double total = 0.0;
  size_t last_positive = weights.size();
  for (size_t i = 0; i < weights.size(); ++i) {
    const double w = weights[i];
    if (!std::isfinite(w) || w < 0.0) {
      return absl::InvalidArgumentError(
          absl::StrCat("categorical weight ", i, " is ", w));
    }
    if (w > 0.0) last_positive = i;
    total += w;
  }
  if (last_positive == weights.size() || !std::isfinite(total)) {
    return absl::InvalidArgumentError(
        "categorical weights need a positive finite total");
  }
  const double target = rng.Uniform() * total;
  double cumulative = 0.0;
  for (size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] == 0.0) continue;
    cumulative += weights[i];
    if (target < cumulative) return i;
  }
  // Rounding left target at or above the final cumulative sum.
  return last_positive;
}

double LogSumExp(std::span<const double> log_weights) {
  double max = -std::numeric_limits<double>::infinity();
  for (double v : log_weights) max = std::max(max, v);
  if (!std::isfinite(max)) return max;
  double sum = 0.0;
  for (double v : log_weights) sum += std::exp(v - max);
  return max + std::log(sum);
}

absl::StatusOr<std::vector<double>> LogSumExpNormalize(
    std::span<const double> log_weights) {
  double max = -std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < log_weights.size(); ++i) {
    const double v = log_weights[i];
    if (std::isnan(v) || v == std::numeric_limits<double>::infinity()) {
      return absl::InvalidArgumentError(
          absl::StrCat("log-weight ", i, " is ", v));
    }
    max = std::max(max, v);
  }
  if (!std::isfinite(max)) {
    return absl::InvalidArgumentError("no finite log-weight to normalize");
  }
  std::vector<double> out(log_weights.size());
  double sum = 0.0;
  for (size_t i = 0; i < out.size(); ++i) {
    out[i] = std::exp(log_weights[i] - max);
    sum += out[i];
  }
  for (double& v : out) v /= sum;
  return out;
}

absl::StatusOr<double> SampleGamma(SeededRng& rng, double shape, double scale) {
  if (!(shape > 0.0) || !(scale > 0.0) || !std::isfinite(shape) ||
      !std::isfinite(scale)) {
    return absl::InvalidArgumentError(
        absl::StrCat("gamma needs positive shape and scale, got ", shape, ", ",
                     scale));
  }
  double boost = 1.0;
  double a = shape;
  if (a < 1.0) {
    boost = std::pow(rng.UniformOpen(), 1.0 / a);
    a += 1.0;
  }
  const double d = a - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  while (true) {
    double x;
    double v;
    do {
      x = rng.Gaussian();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = rng.UniformOpen();
    if (u < 1.0 - 0.0331 * x * x * x * x ||
        std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) {
      return d * v * scale * boost;
    }
  }
}

absl::StatusOr<std::vector<size_t>> SampleWithoutReplacement(SeededRng& rng,
                                                             size_t n,
                                                             size_t count) {
  if (count > n) {
    return absl::InvalidArgumentError(
        absl::StrCat("cannot draw ", count, " distinct items from ", n));
  }
  std::vector<size_t> pool(n);
  std::iota(pool.begin(), pool.end(), 0);
  for (size_t i = 0; i < count; ++i) {
    const size_t j = i + rng.UniformIndex(n - i);
    std::swap(pool[i], pool[j]);
  }
  pool.resize(count);
  std::sort(pool.begin(), pool.end());
  return pool;
}

}  // namespace deepcand
