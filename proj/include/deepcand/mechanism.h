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

#ifndef DEEPCAND_MECHANISM_H_
#define DEEPCAND_MECHANISM_H_

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "absl/status/statusor.h"
#include "deepcand/matrix.h"
#include "deepcand/rng.h"
#include "deepcand/sampling.h"
#include "deepcand/store.h"
#include "deepcand/tukey.h"

namespace deepcand {

// A pure-DP budget: finite and strictly positive.
class PrivacyBudget {
 public:
  static absl::StatusOr<PrivacyBudget> Create(double epsilon);
  double epsilon() const { return epsilon_; }

 private:
  explicit PrivacyBudget(double epsilon) : epsilon_(epsilon) {}
  double epsilon_;
};

// log Pr[i] = eps * u_i / (2 * sensitivity) - logsumexp(...).
absl::StatusOr<std::vector<double>> ExponentialMechanismLogProbabilities(
    std::span<const double> utilities, double sensitivity,
    PrivacyBudget budget);
absl::StatusOr<std::vector<double>> ExponentialMechanismProbabilities(
    std::span<const double> utilities, double sensitivity,
    PrivacyBudget budget);
// One draw from the distribution above.
absl::StatusOr<size_t> ExponentialMechanism(std::span<const double> utilities,
                                            double sensitivity,
                                            PrivacyBudget budget,
                                            SeededRng& rng);

// Exact output distribution of the depth-selection mechanism for one
// document.
struct SelectionDistribution {
  std::vector<double> probabilities;
  std::vector<double> log_probabilities;
  std::vector<int> utilities;
  double epsilon = 0.0;
  uint64_t projection_seed = 0;
};

// Exponential mechanism over public candidates with approximate Tukey depth
// as utility (sensitivity 1). Projections are fixed at construction; they are
// data-independent, so the guarantee holds conditionally on them.
class DepthSelectionMechanism {
 public:
  static constexpr double kSensitivity = 1.0;

  DepthSelectionMechanism(ConstMatrixView candidates, ProjectionSet projections,
                          PrivacyBudget budget, DepthAggregation rule,
                          uint64_t projection_seed = 0)
      : candidates_(candidates),
        projections_(std::move(projections)),
        budget_(budget),
        rule_(rule),
        projection_seed_(projection_seed) {}

  // Projections drawn from SeededRng(seed, "projections").
  static absl::StatusOr<DepthSelectionMechanism> FromSeed(
      ConstMatrixView candidates, PrivacyBudget budget, size_t p,
      uint64_t seed, DepthAggregation rule = DepthAggregation::kMin);

  absl::StatusOr<SelectionDistribution> Distribution(
      ConstMatrixView sentences) const;
  // Returns (chosen index, distribution used).
  absl::StatusOr<std::pair<size_t, SelectionDistribution>> Select(
      ConstMatrixView sentences, SeededRng& rng) const;

  const ProjectionSet& projections() const { return projections_; }
  size_t num_candidates() const { return candidates_.rows(); }

 private:
  ConstMatrixView candidates_;
  ProjectionSet projections_;
  PrivacyBudget budget_;
  DepthAggregation rule_;
  uint64_t projection_seed_;
};

struct PrivateSelection {
  SelectionRecord record;
  SelectionDistribution distribution;
};

// Projections from (seed, "projections"), the draw from (seed, "selection").
// record.doc_id is left empty.
absl::StatusOr<PrivateSelection> SelectPrivateEmbedding(
    ConstMatrixView sentences, ConstMatrixView candidates,
    PrivacyBudget budget, size_t p, uint64_t seed,
    DepthAggregation rule = DepthAggregation::kMin);

// Fractions a_j of candidates at depth j = 0..floor(k/2).
class DepthHistogram {
 public:
  // Nonnegative, finite, summing to 1 within 1e-12.
  static absl::StatusOr<DepthHistogram> Create(std::vector<double> fractions);
  // Empirical histogram of `depths` over 0..max_depth.
  static absl::StatusOr<DepthHistogram> FromDepths(std::span<const int> depths,
                                                   int max_depth);

  const std::vector<double>& fractions() const { return fractions_; }

 private:
  explicit DepthHistogram(std::vector<double> f) : fractions_(std::move(f)) {}
  std::vector<double> fractions_;
};

// Pr[selected depth = j] = a_j e^{eps j / 2} / sum_i a_i e^{eps i / 2}.
absl::StatusOr<std::vector<double>> DepthSamplingDistribution(
    const DepthHistogram& histogram, PrivacyBudget budget);

// Probability of selecting depth jstar when b of m candidates sit at jstar
// and the other m - b at depth 0.
absl::StatusOr<double> CheckTable1(size_t m, size_t b, int jstar,
                                   PrivacyBudget budget);

struct DeepCandidateCondition {
  double epsilon;
  size_t b;
  int jstar;
};
// Settings under which 5000 candidates yield a deep pick w.p. >= 0.95.
inline constexpr std::array<DeepCandidateCondition, 4> kDeepCandidateConditions{
    {{3.0, 55, 5}, {6.0, 25, 3}, {10.0, 5, 2}, {23.0, 1, 1}}};
inline constexpr size_t kDefaultCandidateCount = 5000;

// max_i |log_p[i] - log_q[i]|; 0 where both are -inf, +inf where only one is.
double MaxLogRatio(std::span<const double> log_p,
                   std::span<const double> log_q);
// Rows that differ between equally shaped matrices; error on shape mismatch.
absl::StatusOr<size_t> CountDifferingRows(ConstMatrixView x,
                                          ConstMatrixView x_prime);

// Largest log-probability ratio between the exact distributions for two
// documents sharing one projection set. Documents must have equal k and
// differ in at most one row.
absl::StatusOr<double> AuditPair(ConstMatrixView x, ConstMatrixView x_prime,
                                 ConstMatrixView candidates,
                                 PrivacyBudget budget, size_t p, uint64_t seed,
                                 DepthAggregation rule = DepthAggregation::kMin);

// As AuditPair for documents differing in exactly `differing_rows` rows;
// bounded by differing_rows * epsilon.
absl::StatusOr<double> AuditGroup(ConstMatrixView x, ConstMatrixView x_prime,
                                  size_t differing_rows,
                                  ConstMatrixView candidates,
                                  PrivacyBudget budget, size_t p,
                                  uint64_t seed,
                                  DepthAggregation rule = DepthAggregation::kMin);

}  // namespace deepcand

#endif  // DEEPCAND_MECHANISM_H_
