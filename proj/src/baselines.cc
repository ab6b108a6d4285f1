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

#include "deepcand/baselines.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "absl/strings/str_cat.h"
#include "deepcand/sampling.h"
#include "deepcand/simd/kernels.h"
#include "deepcand/status_macros.h"

namespace deepcand {

std::vector<double> TruncationBox::widths() const {
  std::vector<double> w(dim());
  for (size_t j = 0; j < dim(); ++j) w[j] = upper[j] - lower[j];
  return w;
}

double TruncationBox::max_width() const {
  double m = 0.0;
  for (size_t j = 0; j < dim(); ++j) m = std::max(m, upper[j] - lower[j]);
  return m;
}

std::vector<double> TruncationBox::center() const {
  std::vector<double> c(dim());
  for (size_t j = 0; j < dim(); ++j) c[j] = 0.5 * (lower[j] + upper[j]);
  return c;
}

double Quantile(std::span<const double> sorted, double q) {
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const size_t lo = static_cast<size_t>(std::floor(pos));
  const size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

absl::StatusOr<TruncationBox> FitBox(ConstMatrixView doc_embeddings,
                                     double coverage) {
  if (doc_embeddings.rows() == 0) {
    return absl::InvalidArgumentError("cannot fit a box to zero documents");
  }
  if (!(coverage > 0.0 && coverage <= 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("coverage must be in (0, 1], got ", coverage));
  }
  const size_t n = doc_embeddings.rows();
  const size_t d = doc_embeddings.cols();
  TruncationBox box;
  box.lower.resize(d);
  box.upper.resize(d);
  std::vector<double> column(n);
  for (size_t j = 0; j < d; ++j) {
    for (size_t i = 0; i < n; ++i) column[i] = doc_embeddings(i, j);
    std::sort(column.begin(), column.end());
    box.lower[j] = Quantile(column, (1.0 - coverage) / 2.0);
    box.upper[j] = Quantile(column, (1.0 + coverage) / 2.0);
  }
  return box;
}

void ClipToBox(const TruncationBox& box, std::span<double> v) {
  for (size_t j = 0; j < v.size(); ++j) {
    v[j] = std::clamp(v[j], box.lower[j], box.upper[j]);
  }
}

absl::StatusOr<std::vector<double>> ClippedMean(ConstMatrixView sentences,
                                                const TruncationBox& box) {
  if (sentences.rows() == 0) {
    return absl::InvalidArgumentError("need at least one sentence");
  }
  if (sentences.cols() != box.dim()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "box has dim ", box.dim(), ", sentences ", sentences.cols()));
  }
  std::vector<double> mean(box.dim(), 0.0);
  std::vector<double> row(box.dim());
  for (size_t i = 0; i < sentences.rows(); ++i) {
    std::copy(sentences.row(i).begin(), sentences.row(i).end(), row.begin());
    ClipToBox(box, row);
    simd::Axpy(1.0, row, mean);
  }
  for (double& v : mean) v /= static_cast<double>(sentences.rows());
  // Rounding in the division can step just outside a degenerate interval.
  ClipToBox(box, mean);
  return mean;
}

absl::StatusOr<EmbeddingMatrix> ClippedMeans(ConstMatrixView sentences,
                                             std::span<const size_t> starts,
                                             std::span<const size_t> counts,
                                             const TruncationBox& box) {
  EmbeddingMatrix out(starts.size(), box.dim());
  for (size_t i = 0; i < starts.size(); ++i) {
    DEEPCAND_ASSIGN_OR_RETURN(
        std::vector<double> mean,
        ClippedMean(sentences.Rows(starts[i], counts[i]), box));
    std::copy(mean.begin(), mean.end(), out.row(i).begin());
  }
  return out;
}

absl::StatusOr<WidthMode> ParseWidthMode(std::string_view name) {
  if (name == "per-dim") return WidthMode::kPerDimension;
  if (name == "max") return WidthMode::kMax;
  return absl::InvalidArgumentError(
      absl::StrCat("unknown width mode '", std::string(name),
                   "' (expected per-dim or max)"));
}

std::vector<double> TruncationNoiseScales(const TruncationBox& box, size_t k,
                                          PrivacyBudget budget,
                                          WidthMode mode) {
  const double d = static_cast<double>(box.dim());
  const double denom = static_cast<double>(k) * budget.epsilon();
  std::vector<double> scales = box.widths();
  const double widest = box.max_width();
  for (double& s : scales) {
    const double w = mode == WidthMode::kMax ? widest : s;
    s = d * w / denom;
  }
  return scales;
}

absl::StatusOr<std::vector<double>> TruncationMechanism(
    ConstMatrixView sentences, const TruncationBox& box, PrivacyBudget budget,
    SeededRng& rng, WidthMode mode) {
  DEEPCAND_ASSIGN_OR_RETURN(std::vector<double> out,
                            ClippedMean(sentences, box));
  const std::vector<double> scales =
      TruncationNoiseScales(box, sentences.rows(), budget, mode);
  for (size_t j = 0; j < out.size(); ++j) {
    if (scales[j] == 0.0) continue;
    DEEPCAND_ASSIGN_OR_RETURN(double noise, SampleLaplace(rng, scales[j]));
    out[j] += noise;
  }
  return out;
}

absl::StatusOr<VocabEmbedding> VocabEmbedding::Create(
    std::vector<std::string> tokens, EmbeddingMatrix embeddings) {
  if (tokens.size() != embeddings.rows()) {
    return absl::InvalidArgumentError(
        absl::StrCat(tokens.size(), " tokens for ", embeddings.rows(),
                     " embedding rows"));
  }
  if (tokens.empty()) return absl::InvalidArgumentError("empty vocabulary");
  VocabEmbedding vocab;
  for (size_t i = 0; i < tokens.size(); ++i) {
    if (!vocab.lookup_.emplace(tokens[i], i).second) {
      return absl::InvalidArgumentError(
          absl::StrCat("duplicate token '", tokens[i], "'"));
    }
  }
  for (double v : embeddings.values()) {
    if (!std::isfinite(v)) {
      return absl::InvalidArgumentError("token embeddings must be finite");
    }
  }
  vocab.tokens_ = std::move(tokens);
  vocab.embeddings_ = std::move(embeddings);
  return vocab;
}

absl::StatusOr<size_t> VocabEmbedding::Lookup(std::string_view token) const {
  auto it = lookup_.find(std::string(token));
  if (it == lookup_.end()) {
    return absl::NotFoundError(
        absl::StrCat("token '", std::string(token), "' is not in vocabulary"));
  }
  return it->second;
}

size_t VocabEmbedding::Nearest(std::span<const double> point) const {
  size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < size(); ++i) {
    const double d = simd::SquaredDistance(point, embeddings_.row(i));
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  return best;
}

absl::StatusOr<std::vector<double>> SampleMetricNoise(SeededRng& rng,
                                                      size_t dim,
                                                      PrivacyBudget budget) {
  DEEPCAND_ASSIGN_OR_RETURN(ProjectionSet direction,
                            SampleUnitSphere(rng, dim, 1));
  DEEPCAND_ASSIGN_OR_RETURN(
      double radius,
      SampleGamma(rng, static_cast<double>(dim), 1.0 / budget.epsilon()));
  std::vector<double> z(direction.direction(0).begin(),
                        direction.direction(0).end());
  for (double& v : z) v *= radius;
  return z;
}

absl::StatusOr<std::vector<std::string>> WordMdp(
    std::span<const std::string> tokens, const VocabEmbedding& vocab,
    PrivacyBudget budget, SeededRng& rng) {
  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (const std::string& token : tokens) {
    DEEPCAND_ASSIGN_OR_RETURN(size_t id, vocab.Lookup(token));
    DEEPCAND_ASSIGN_OR_RETURN(std::vector<double> z,
                              SampleMetricNoise(rng, vocab.dim(), budget));
    simd::Axpy(1.0, vocab.embeddings().row(id), z);
    out.push_back(vocab.tokens()[vocab.Nearest(z)]);
  }
  return out;
}

absl::StatusOr<double> RandomGuessScore(std::span<const double> fractions) {
  if (fractions.empty()) {
    return absl::InvalidArgumentError("need at least one class");
  }
  double total = 0.0, score = 0.0;
  for (double q : fractions) {
    if (!std::isfinite(q) || q < 0.0) {
      return absl::InvalidArgumentError("label fractions must be >= 0");
    }
    total += q;
    score += q * q;
  }
  if (std::fabs(total - 1.0) > 1e-9) {
    return absl::InvalidArgumentError(
        absl::StrCat("label fractions sum to ", total, ", not 1"));
  }
  return score;
}

absl::StatusOr<std::vector<double>> LabelFractions(std::span<const int> labels,
                                                   size_t r) {
  if (labels.empty() || r == 0) {
    return absl::InvalidArgumentError("need labels and r >= 1");
  }
  std::vector<double> f(r, 0.0);
  for (int y : labels) {
    if (y < 0 || static_cast<size_t>(y) >= r) {
      return absl::OutOfRangeError(absl::StrCat("label ", y, " out of range"));
    }
    f[y] += 1.0;
  }
  for (double& v : f) v /= static_cast<double>(labels.size());
  return f;
}

}  // namespace deepcand
