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

#ifndef DEEPCAND_BASELINES_H_
#define DEEPCAND_BASELINES_H_

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "absl/status/statusor.h"
#include "deepcand/matrix.h"
#include "deepcand/mechanism.h"
#include "deepcand/rng.h"

namespace deepcand {

// Per-dimension interval [lower, upper].
struct TruncationBox {
  std::vector<double> lower;
  std::vector<double> upper;

  size_t dim() const { return lower.size(); }
  std::vector<double> widths() const;
  double max_width() const;
  std::vector<double> center() const;
};

// Linear-interpolation sample quantile (position (n - 1) q in sorted order).
double Quantile(std::span<const double> sorted, double q);

// Central interval holding `coverage` of each column: quantiles
// (1 - coverage) / 2 and (1 + coverage) / 2.
absl::StatusOr<TruncationBox> FitBox(ConstMatrixView doc_embeddings,
                                     double coverage = 0.75);

void ClipToBox(const TruncationBox& box, std::span<double> v);

// Mean of the box-clipped sentences; always inside the box.
absl::StatusOr<std::vector<double>> ClippedMean(ConstMatrixView sentences,
                                                const TruncationBox& box);
// ClippedMean for every document, n_docs x d.
absl::StatusOr<EmbeddingMatrix> ClippedMeans(ConstMatrixView sentences,
                                             std::span<const size_t> starts,
                                             std::span<const size_t> counts,
                                             const TruncationBox& box);

enum class WidthMode { kPerDimension, kMax };
absl::StatusOr<WidthMode> ParseWidthMode(std::string_view name);

// Laplace scale per dimension: d * w / (k * eps), where w is that
// dimension's width or the largest width.
std::vector<double> TruncationNoiseScales(const TruncationBox& box, size_t k,
                                          PrivacyBudget budget,
                                          WidthMode mode);

// ClippedMean plus independent Laplace noise per dimension. A zero scale
// adds nothing and consumes no randomness.
absl::StatusOr<std::vector<double>> TruncationMechanism(
    ConstMatrixView sentences, const TruncationBox& box, PrivacyBudget budget,
    SeededRng& rng, WidthMode mode = WidthMode::kPerDimension);

// Token list with one embedding row per token.
class VocabEmbedding {
 public:
  static absl::StatusOr<VocabEmbedding> Create(std::vector<std::string> tokens,
                                               EmbeddingMatrix embeddings);

  size_t size() const { return tokens_.size(); }
  size_t dim() const { return embeddings_.cols(); }
  const std::vector<std::string>& tokens() const { return tokens_; }
  const EmbeddingMatrix& embeddings() const { return embeddings_; }

  absl::StatusOr<size_t> Lookup(std::string_view token) const;
  // Euclidean nearest row, lowest index on ties.
  size_t Nearest(std::span<const double> point) const;

 private:
  VocabEmbedding() = default;
  std::vector<std::string> tokens_;
  EmbeddingMatrix embeddings_;
  std::unordered_map<std::string, size_t> lookup_;
};

// Noise with density proportional to exp(-eps ||z||): uniform direction,
// norm ~ Gamma(shape dim, scale 1/eps).
absl::StatusOr<std::vector<double>> SampleMetricNoise(SeededRng& rng,
                                                      size_t dim,
                                                      PrivacyBudget budget);

// Each token independently: embed, perturb, snap to the nearest token.
absl::StatusOr<std::vector<std::string>> WordMdp(
    std::span<const std::string> tokens, const VocabEmbedding& vocab,
    PrivacyBudget budget, SeededRng& rng);

// Accuracy of guessing labels from their own marginal: sum q_i^2.
absl::StatusOr<double> RandomGuessScore(std::span<const double> fractions);
// Empirical label fractions over [0, r).
absl::StatusOr<std::vector<double>> LabelFractions(std::span<const int> labels,
                                                   size_t r);

}  // namespace deepcand

#endif  // DEEPCAND_BASELINES_H_
