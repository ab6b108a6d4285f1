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

#include "deepcand/mechanism.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "absl/strings/str_cat.h"
#include "deepcand/status_macros.h"

namespace deepcand {
namespace {

constexpr double kSimplexTolerance = 1e-12;

}  // namespace

absl::StatusOr<PrivacyBudget> PrivacyBudget::Create(double epsilon) {
  if (!std::isfinite(epsilon) || !(epsilon > 0.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("epsilon must be finite and > 0, got ", epsilon));
  }
  return PrivacyBudget(epsilon);
}

namespace {

// eps * u_i / (2 * sensitivity), validated.
absl::StatusOr<std::vector<double>> ScaledUtilities(
    std::span<const double> utilities, double sensitivity,
    PrivacyBudget budget) {
  if (utilities.empty()) {
    return absl::InvalidArgumentError("exponential mechanism needs outputs");
  }
  if (!std::isfinite(sensitivity) || !(sensitivity > 0.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("sensitivity must be > 0, got ", sensitivity));
  }
  std::vector<double> scores(utilities.size());
  for (size_t i = 0; i < utilities.size(); ++i) {
    if (!std::isfinite(utilities[i])) {
      return absl::InvalidArgumentError(
          absl::StrCat("utility ", i, " is not finite"));
    }
    scores[i] = budget.epsilon() * utilities[i] / (2.0 * sensitivity);
  }
  return scores;
}

}  // namespace

absl::StatusOr<std::vector<double>> ExponentialMechanismLogProbabilities(
    std::span<const double> utilities, double sensitivity,
    PrivacyBudget budget) {
  DEEPCAND_ASSIGN_OR_RETURN(std::vector<double> scores,
                            ScaledUtilities(utilities, sensitivity, budget));
  const double normalizer = LogSumExp(scores);
  for (double& s : scores) s -= normalizer;
  return scores;
}

absl::StatusOr<std::vector<double>> ExponentialMechanismProbabilities(
    std::span<const double> utilities, double sensitivity,
    PrivacyBudget budget) {
  DEEPCAND_ASSIGN_OR_RETURN(std::vector<double> scores,
                            ScaledUtilities(utilities, sensitivity, budget));
  return LogSumExpNormalize(scores);
}

absl::StatusOr<size_t> ExponentialMechanism(std::span<const double> utilities,
                                            double sensitivity,
                                            PrivacyBudget budget,
                                            SeededRng& rng) {
  DEEPCAND_ASSIGN_OR_RETURN(
      std::vector<double> probabilities,
      ExponentialMechanismProbabilities(utilities, sensitivity, budget));
  return SampleCategorical(rng, probabilities);
}

absl::StatusOr<DepthSelectionMechanism> DepthSelectionMechanism::FromSeed(
    ConstMatrixView candidates, PrivacyBudget budget, size_t p, uint64_t seed,
    DepthAggregation rule) {
  if (candidates.rows() == 0) {
    return absl::InvalidArgumentError("candidate set is empty");
  }
  SeededRng rng(seed, "projections");
  DEEPCAND_ASSIGN_OR_RETURN(ProjectionSet projections,
                            SampleUnitSphere(rng, candidates.cols(), p));
  return DepthSelectionMechanism(candidates, std::move(projections), budget,
                                 rule, seed);
}

absl::StatusOr<SelectionDistribution> DepthSelectionMechanism::Distribution(
    ConstMatrixView sentences) const {
  DEEPCAND_ASSIGN_OR_RETURN(
      std::vector<int> depths,
      ApproxDepthUtilities(candidates_, sentences, projections_, rule_));
  const std::vector<double> utilities(depths.begin(), depths.end());
  SelectionDistribution out;
  DEEPCAND_ASSIGN_OR_RETURN(
      out.log_probabilities,
      ExponentialMechanismLogProbabilities(utilities, kSensitivity, budget_));
  DEEPCAND_ASSIGN_OR_RETURN(
      out.probabilities,
      ExponentialMechanismProbabilities(utilities, kSensitivity, budget_));
  out.utilities = std::move(depths);
  out.epsilon = budget_.epsilon();
  out.projection_seed = projection_seed_;
  return out;
}

absl::StatusOr<std::pair<size_t, SelectionDistribution>>
DepthSelectionMechanism::Select(ConstMatrixView sentences,
                                SeededRng& rng) const {
  DEEPCAND_ASSIGN_OR_RETURN(SelectionDistribution dist,
                            Distribution(sentences));
  DEEPCAND_ASSIGN_OR_RETURN(size_t chosen,
                            SampleCategorical(rng, dist.probabilities));
  return std::make_pair(chosen, std::move(dist));
}

absl::StatusOr<PrivateSelection> SelectPrivateEmbedding(
    ConstMatrixView sentences, ConstMatrixView candidates,
    PrivacyBudget budget, size_t p, uint64_t seed, DepthAggregation rule) {
  DEEPCAND_ASSIGN_OR_RETURN(
      DepthSelectionMechanism mechanism,
      DepthSelectionMechanism::FromSeed(candidates, budget, p, seed, rule));
  SeededRng rng(seed, "selection");
  DEEPCAND_ASSIGN_OR_RETURN(auto selected, mechanism.Select(sentences, rng));
  PrivateSelection out;
  out.record.chosen_candidate = selected.first;
  out.record.utility = selected.second.utilities[selected.first];
  out.record.epsilon = budget.epsilon();
  out.record.seed = seed;
  out.distribution = std::move(selected.second);
  return out;
}

absl::StatusOr<DepthHistogram> DepthHistogram::Create(
    std::vector<double> fractions) {
  if (fractions.empty()) {
    return absl::InvalidArgumentError("depth histogram is empty");
  }
  double total = 0.0;
  for (double f : fractions) {
    if (!std::isfinite(f) || f < 0.0) {
      return absl::InvalidArgumentError(
          "depth histogram fractions must be finite and nonnegative");
    }
    total += f;
  }
  if (std::fabs(total - 1.0) > kSimplexTolerance) {
    return absl::InvalidArgumentError(
        absl::StrCat("depth histogram sums to ", total, ", not 1"));
  }
  return DepthHistogram(std::move(fractions));
}

absl::StatusOr<DepthHistogram> DepthHistogram::FromDepths(
    std::span<const int> depths, int max_depth) {
  if (depths.empty() || max_depth < 0) {
    return absl::InvalidArgumentError("need depths and max_depth >= 0");
  }
  std::vector<double> counts(static_cast<size_t>(max_depth) + 1, 0.0);
  for (int d : depths) {
    if (d < 0 || d > max_depth) {
      return absl::OutOfRangeError(
          absl::StrCat("depth ", d, " outside [0, ", max_depth, "]"));
    }
    counts[d] += 1.0;
  }
  for (double& c : counts) c /= static_cast<double>(depths.size());
  return DepthHistogram(std::move(counts));
}

absl::StatusOr<std::vector<double>> DepthSamplingDistribution(
    const DepthHistogram& histogram, PrivacyBudget budget) {
  const std::vector<double>& a = histogram.fractions();
  std::vector<double> log_weights(a.size());
  for (size_t j = 0; j < a.size(); ++j) {
    log_weights[j] = a[j] > 0.0
                         ? std::log(a[j]) + budget.epsilon() * j / 2.0
                         : -std::numeric_limits<double>::infinity();
  }
  return LogSumExpNormalize(log_weights);
}

absl::StatusOr<double> CheckTable1(size_t m, size_t b, int jstar,
                                   PrivacyBudget budget) {
  if (m == 0 || b > m || jstar < 0) {
    return absl::InvalidArgumentError(
        absl::StrCat("need 0 <= b <= m, m >= 1, j* >= 0; got m=", m, " b=", b,
                     " j*=", jstar));
  }
  std::vector<double> fractions(static_cast<size_t>(jstar) + 1, 0.0);
  fractions[0] += static_cast<double>(m - b) / static_cast<double>(m);
  fractions[jstar] += static_cast<double>(b) / static_cast<double>(m);
  DEEPCAND_ASSIGN_OR_RETURN(DepthHistogram histogram,
                            DepthHistogram::Create(std::move(fractions)));
  DEEPCAND_ASSIGN_OR_RETURN(std::vector<double> by_depth,
                            DepthSamplingDistribution(histogram, budget));
  return by_depth[jstar];
}

double MaxLogRatio(std::span<const double> log_p,
                   std::span<const double> log_q) {
  double worst = 0.0;
  const size_t n = std::min(log_p.size(), log_q.size());
  for (size_t i = 0; i < n; ++i) {
    if (std::isinf(log_p[i]) && std::isinf(log_q[i]) && log_p[i] < 0 &&
        log_q[i] < 0) {
      continue;
    }
    worst = std::max(worst, std::fabs(log_p[i] - log_q[i]));
  }
  return worst;
}

absl::StatusOr<size_t> CountDifferingRows(ConstMatrixView x,
                                          ConstMatrixView x_prime) {
  if (x.rows() != x_prime.rows() || x.cols() != x_prime.cols()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "neighboring documents must have equal shape, got ", x.rows(), "x",
        x.cols(), " and ", x_prime.rows(), "x", x_prime.cols()));
  }
  size_t differing = 0;
  for (size_t i = 0; i < x.rows(); ++i) {
    const auto a = x.row(i);
    const auto b = x_prime.row(i);
    if (!std::equal(a.begin(), a.end(), b.begin())) ++differing;
  }
  return differing;
}

namespace {

absl::StatusOr<double> AuditWithSharedProjections(
    ConstMatrixView x, ConstMatrixView x_prime, ConstMatrixView candidates,
    PrivacyBudget budget, size_t p, uint64_t seed, DepthAggregation rule) {
  DEEPCAND_ASSIGN_OR_RETURN(
      DepthSelectionMechanism mechanism,
      DepthSelectionMechanism::FromSeed(candidates, budget, p, seed, rule));
  DEEPCAND_ASSIGN_OR_RETURN(SelectionDistribution px,
                            mechanism.Distribution(x));
  DEEPCAND_ASSIGN_OR_RETURN(SelectionDistribution py,
                            mechanism.Distribution(x_prime));
  return MaxLogRatio(px.log_probabilities, py.log_probabilities);
}

}  // namespace

absl::StatusOr<double> AuditPair(ConstMatrixView x, ConstMatrixView x_prime,
                                 ConstMatrixView candidates,
                                 PrivacyBudget budget, size_t p, uint64_t seed,
                                 DepthAggregation rule) {
  DEEPCAND_ASSIGN_OR_RETURN(size_t differing, CountDifferingRows(x, x_prime));
  if (differing > 1) {
    return absl::InvalidArgumentError(absl::StrCat(
        "sentence neighbors differ in at most one row, these differ in ",
        differing));
  }
  return AuditWithSharedProjections(x, x_prime, candidates, budget, p, seed,
                                    rule);
}

absl::StatusOr<double> AuditGroup(ConstMatrixView x, ConstMatrixView x_prime,
                                  size_t differing_rows,
                                  ConstMatrixView candidates,
                                  PrivacyBudget budget, size_t p,
                                  uint64_t seed, DepthAggregation rule) {
  DEEPCAND_ASSIGN_OR_RETURN(size_t differing, CountDifferingRows(x, x_prime));
  if (differing != differing_rows) {
    return absl::InvalidArgumentError(
        absl::StrCat("documents differ in ", differing, " rows, expected ",
                     differing_rows));
  }
  return AuditWithSharedProjections(x, x_prime, candidates, budget, p, seed,
                                    rule);
}

}  // namespace deepcand
