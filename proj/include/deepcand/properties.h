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

#ifndef DEEPCAND_PROPERTIES_H_
#define DEEPCAND_PROPERTIES_H_

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"
#include "deepcand/matrix.h"

namespace deepcand {

// Randomized and exact checks of the library's guarantees, shared by the
// `selftest` subcommand and the acceptance suite. Each check is
// deterministic given its seed.
struct PropertyResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

// Every deep-candidate row at m candidates reaches 0.95, and each agrees
// with a direct evaluation of the two-level closed form within 1e-12.
PropertyResult CheckDeepCandidateTable(size_t m);

enum class PairFamily { kRandom, kExtreme, kTieHeavy };
std::string_view PairFamilyName(PairFamily family);

// Documents x and x_prime differ in exactly `differing_rows` sentences and
// share `candidates` and the projection seed.
struct NeighborPair {
  PairFamily family = PairFamily::kRandom;
  EmbeddingMatrix x;
  EmbeddingMatrix x_prime;
  EmbeddingMatrix candidates;
  size_t differing_rows = 1;
  size_t projections = 1;
  uint64_t projection_seed = 0;
};
//   kRandom: replaced rows are fresh Gaussian draws.
//   kExtreme: replaced rows are the originals scaled by +-1e6.
//   kTieHeavy: sentences and the first candidates share a three-point pool.
// Families cycle in that order; dimensions and sizes vary per pair.
std::vector<NeighborPair> GenerateNeighborPairs(size_t count,
                                                size_t differing_rows,
                                                uint64_t seed);

struct AuditSuiteOptions {
  // Per family (random, extreme, tie-heavy); every pair is audited at each
  // epsilon under both aggregation rules.
  size_t pairs_per_family = 70;
  std::vector<double> epsilons = {1.0, 3.0, 10.0};
  size_t group_pairs = 30;  // a = 2
  uint64_t seed = 1;
};
PropertyResult CheckPrivacyAudit(const AuditSuiteOptions& options);

// One-row replacement moves each candidate's utility by at most 1.
PropertyResult CheckSensitivity(size_t triples, uint64_t seed);

// Approximate depth never falls below the exact planar depth for
// p in {1, 5, 25}.
PropertyResult CheckDepthUpperBound(size_t instances, uint64_t seed);
// With p = 200 and 50 points, approximate equals exact on >= 90%.
PropertyResult CheckDepthGap(size_t instances, uint64_t seed);

// Depth frequencies of `draws` selections versus the histogram formula.
PropertyResult CheckDepthSampling(size_t draws, uint64_t seed);

// Backward() against central differences on random tiny MLPs. Batches with
// a pre-activation within 10 steps of a rectifier kink are redrawn.
PropertyResult CheckGradients(size_t models, uint64_t seed);

// Lloyd cost never rises; the four-point fixture is solved exactly.
PropertyResult CheckKMeans(size_t instances, uint64_t seed);

// Laplace and truncation noise spread within 2% of sqrt(2) * scale, and
// the clipped mean never leaves the box.
PropertyResult CheckLaplaceCalibration(size_t draws, uint64_t seed);

// Constant utility shifts leave the exponential mechanism unchanged.
PropertyResult CheckShiftInvariance(size_t trials, uint64_t seed);

// Desk-scale utility comparison on the synthetic topic corpus.
struct UtilityStudyOptions {
  size_t public_docs = 1000;
  size_t test_docs = 500;
  size_t validation_docs = 200;
  size_t dim = 32;
  size_t candidates = 500;
  size_t min_sentences = 8;
  size_t n_clusters = 12;
  size_t recoder_epochs = 10;
  size_t trials = 5;
  double epsilon = 10.0;
  std::vector<size_t> projection_grid = {10, 25, 50, 100};
  uint64_t seed = 1;
};
struct UtilityStudy {
  size_t projections = 0;
  double deep_candidate = 0.0;
  double truncation = 0.0;
  double random_guess = 0.0;
  double non_private = 0.0;
  std::vector<std::string> bucket_names;
  std::vector<double> bucket_means;
};
absl::StatusOr<UtilityStudy> RunUtilityStudy(
    const UtilityStudyOptions& options);
// DeepCandidate beats truncation and random guessing; k-bucket means are
// nondecreasing.
PropertyResult CheckUtilityOrdering(const UtilityStudyOptions& options);

}  // namespace deepcand

#endif  // DEEPCAND_PROPERTIES_H_
