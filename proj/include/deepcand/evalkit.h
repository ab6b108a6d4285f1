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

#ifndef DEEPCAND_EVALKIT_H_
#define DEEPCAND_EVALKIT_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "deepcand/baselines.h"
#include "deepcand/matrix.h"
#include "deepcand/mlp.h"
#include "deepcand/pipeline.h"
#include "deepcand/store.h"

namespace deepcand {

// Unweighted mean of per-class F1 = 2TP / (2TP + FP + FN) over the classes
// that occur in the truth or the predictions.
absl::StatusOr<double> MacroF1(std::span<const int> predictions,
                               std::span<const int> truth, size_t r);

struct EpochSelection {
  Mlp model;                        // snapshot after best_epoch epochs
  size_t best_epoch = 0;            // 1-based
  std::vector<double> validation;   // macro-F1 after each epoch
};

// Trains for options.epochs and keeps the epoch with the highest validation
// macro-F1, earliest on ties.
absl::StatusOr<EpochSelection> TrainClassifierWithValidation(
    ConstMatrixView features, std::span<const int> labels, size_t r,
    ConstMatrixView validation_features, std::span<const int> validation_labels,
    const ClassifierOptions& options, SeededRng& rng);

// Copies the listed documents (sentences and index entries) into a new corpus.
absl::StatusOr<Corpus> SubsetCorpus(const Corpus& corpus,
                                    std::span<const size_t> documents);

// Documents whose sentence count lies in [lo, hi).
struct KBucket {
  size_t lo = 0;
  size_t hi = 0;
  std::string Name() const;
};
absl::StatusOr<KBucket> ParseKBucket(std::string_view text);

// Turns documents into one feature row each. `seed` fixes all randomness.
using DocumentEncoder = std::function<absl::StatusOr<EmbeddingMatrix>(
    const Corpus& documents, double epsilon, uint64_t seed)>;

// A classifier with the encoder whose features it was trained on.
struct EvalArm {
  DocumentEncoder encode;
  const Mlp* classifier = nullptr;
};

struct SweepPoint {
  std::string axis;
  std::vector<double> scores;  // one per trial
  double mean = 0.0;
  double stddev = 0.0;         // population (divisor = trials)
  size_t num_documents = 0;
  bool empty = false;
};

struct SweepResult {
  std::vector<SweepPoint> points;
};

double Mean(std::span<const double> v);
double PopulationStddev(std::span<const double> v);

// Macro-F1 of arm.classifier on arm.encode(documents, epsilon, seed).
absl::StatusOr<double> ScoreArm(const EvalArm& arm, const Corpus& documents,
                                std::span<const int> labels, size_t r,
                                double epsilon, uint64_t seed);

// Trial seed t at axis point `axis`: derived from (seed, axis, t).
uint64_t TrialSeed(uint64_t seed, std::string_view axis, size_t trial);

// One point per epsilon. With a reference arm, its score comes first under
// axis "non-private" (single trial; it must not depend on epsilon or seed).
absl::StatusOr<SweepResult> SweepEpsilon(
    const Corpus& test, std::span<const int> labels, size_t r,
    const EvalArm& arm, std::span<const double> epsilons, size_t trials,
    uint64_t seed, const EvalArm* reference = nullptr);

// One point per bucket at a fixed epsilon. Buckets with no documents are
// marked empty.
absl::StatusOr<SweepResult> SweepK(const Corpus& test,
                                   std::span<const int> labels, size_t r,
                                   const EvalArm& arm,
                                   std::span<const KBucket> buckets,
                                   double epsilon, size_t trials,
                                   uint64_t seed);

// Columns: axis,trial,score,mean,std. An empty point is one row with
// trial, score and std blank and mean "empty".
absl::Status WriteSweepCsv(const SweepResult& result, std::ostream& out);

// Grid value with the highest score, first on ties.
absl::StatusOr<size_t> SelectByValidation(
    std::span<const size_t> grid,
    const std::function<absl::StatusOr<double>(size_t)>& score);

// Encoders for the mechanisms in this library.

// Rows of the candidates chosen by PrivatizeCorpus.
DocumentEncoder DeepCandidateEncoder(const CandidateSet* candidates,
                                     const RecoderBundle* bundle,
                                     size_t projections,
                                     DepthAggregation rule);
// Candidate rows picked in each record.
absl::StatusOr<EmbeddingMatrix> SelectedEmbeddings(
    std::span<const SelectionRecord> records, const CandidateSet& candidates);

// TruncationMechanism per document, stream (DocumentSeed(seed, id),
// "truncation").
DocumentEncoder TruncationEncoder(const TruncationBox* box, WidthMode mode);

// Plain (optionally recoded) document means; ignores epsilon and seed.
DocumentEncoder MeanEncoder(const RecoderBundle* bundle);

// Clipped document means without noise; ignores epsilon and seed.
DocumentEncoder ClippedMeanEncoder(const TruncationBox* box);

}  // namespace deepcand

#endif  // DEEPCAND_EVALKIT_H_
