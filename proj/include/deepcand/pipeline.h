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

#ifndef DEEPCAND_PIPELINE_H_
#define DEEPCAND_PIPELINE_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"
#include "deepcand/kmeans.h"
#include "deepcand/matrix.h"
#include "deepcand/mechanism.h"
#include "deepcand/mlp.h"
#include "deepcand/rng.h"
#include "deepcand/store.h"
#include "deepcand/tukey.h"

namespace deepcand {

// (1/k) sum of the rows, in binary64.
absl::StatusOr<std::vector<double>> MeanEmbedding(ConstMatrixView sentences);

// Sentence recoder H and the linear cluster head L trained through the
// document mean.
struct RecoderBundle {
  Mlp recoder;  // d -> d
  Mlp head;     // d -> n_clusters
  KMeansModel kmeans;
  size_t epochs = 0;
  uint64_t seed = 0;
  // Mean training cross-entropy per epoch.
  std::vector<double> loss_history;

  size_t dim() const { return recoder.input_dim(); }
};

struct RecoderOptions {
  size_t n_clusters = 50;
  size_t epochs = 10;
  // Documents per optimizer step.
  size_t batch_size = 64;
  // Hidden width of H; 0 means the input dimension.
  size_t hidden = 0;
  // Start H at the exact identity map instead of a random draw.
  bool identity_init = false;
  AdamOptions adam;
  KMeansOptions kmeans;
};

// Recoded sentences H(s_i), row by row.
absl::StatusOr<EmbeddingMatrix> RecodeDocument(const RecoderBundle& bundle,
                                               ConstMatrixView sentences);

// One mean per document, n_docs x d. With a bundle the sentences are recoded
// first.
absl::StatusOr<EmbeddingMatrix> DocumentMeans(
    const Corpus& corpus, const RecoderBundle* bundle = nullptr);

// k-means on the document means, then joint Adam training of H and L on the
// cluster labels. L sees mean(H(S_x)); its loss is back-propagated through
// the mean into H. Streams: rng children "kmeans", "recoder", "head",
// "shuffle".
absl::StatusOr<RecoderBundle> TrainRecoder(const Corpus& corpus,
                                           const RecoderOptions& options,
                                           uint64_t seed);

// Fraction of documents whose head prediction equals their k-means label.
absl::StatusOr<double> ClusterAgreement(const RecoderBundle& bundle,
                                        const Corpus& corpus);

struct CandidateSet {
  EmbeddingMatrix embeddings;
  std::vector<std::string> source_doc_ids;

  size_t size() const { return embeddings.rows(); }
};

// m documents with at least min_sentences sentences, sampled without
// replacement and kept in corpus order. Stores recoded means when a bundle is
// given, plain means otherwise.
absl::StatusOr<CandidateSet> BuildCandidates(
    const Corpus& corpus, size_t min_sentences, size_t m, SeededRng& rng,
    const RecoderBundle* bundle = nullptr);

struct PrivatizeOptions {
  double epsilon = 10.0;
  size_t projections = 50;
  DepthAggregation rule = DepthAggregation::kMin;
  uint64_t seed = 0;
};

// Per-document mechanism seed. Depends only on the run seed and the id, so
// corpus order and scheduling never change a document's output.
uint64_t DocumentSeed(uint64_t run_seed, std::string_view doc_id);

// One record per document, in corpus order. Documents run in parallel.
absl::StatusOr<std::vector<SelectionRecord>> PrivatizeCorpus(
    const Corpus& corpus, const CandidateSet& candidates,
    const RecoderBundle* bundle, const PrivatizeOptions& options);

struct ClassifierOptions {
  size_t epochs = 20;
  size_t batch_size = 64;
  size_t hidden = 0;
  AdamOptions adam;
  // Called after every epoch with the 1-based epoch number.
  std::function<absl::Status(size_t epoch, const Mlp& model)> on_epoch;
};

// MLP{r} on (features, labels) with Adam and cross-entropy, reshuffled every
// epoch from `rng`. `epoch_losses`, when given, receives the mean loss of each
// epoch.
absl::StatusOr<Mlp> TrainClassifier(ConstMatrixView features,
                                    std::span<const int> labels, size_t r,
                                    const ClassifierOptions& options,
                                    SeededRng& rng,
                                    std::vector<double>* epoch_losses = nullptr);

// Gathers rows by index.
EmbeddingMatrix GatherRows(ConstMatrixView matrix,
                           std::span<const size_t> rows);

}  // namespace deepcand

#endif  // DEEPCAND_PIPELINE_H_
