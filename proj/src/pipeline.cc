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

#include "deepcand/pipeline.h"

#include <algorithm>
#include <numeric>

#include "absl/strings/str_cat.h"
#include "deepcand/parallel.h"
#include "deepcand/sampling.h"
#include "deepcand/simd/kernels.h"
#include "deepcand/status_macros.h"

namespace deepcand {
namespace {

void Shuffle(std::vector<size_t>& order, SeededRng& rng) {
  for (size_t i = order.size(); i > 1; --i) {
    std::swap(order[i - 1], order[rng.UniformIndex(i)]);
  }
}

absl::Status CheckLabels(std::span<const int> labels, size_t r) {
  for (size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0 || static_cast<size_t>(labels[i]) >= r) {
      return absl::OutOfRangeError(
          absl::StrCat("label ", labels[i], " at ", i, " outside [0, ", r, ")"));
    }
  }
  return absl::OkStatus();
}

}  // namespace

absl::StatusOr<std::vector<double>> MeanEmbedding(ConstMatrixView sentences) {
  if (sentences.rows() == 0) {
    return absl::InvalidArgumentError("mean of zero sentences");
  }
  std::vector<double> mean(sentences.cols(), 0.0);
  for (size_t i = 0; i < sentences.rows(); ++i) {
    simd::Axpy(1.0, sentences.row(i), mean);
  }
  const double k = static_cast<double>(sentences.rows());
  for (double& v : mean) v /= k;
  return mean;
}

absl::StatusOr<EmbeddingMatrix> RecodeDocument(const RecoderBundle& bundle,
                                               ConstMatrixView sentences) {
  return Predict(bundle.recoder, sentences);
}

absl::StatusOr<EmbeddingMatrix> DocumentMeans(const Corpus& corpus,
                                              const RecoderBundle* bundle) {
  const size_t n = corpus.num_documents();
  const size_t d = bundle ? bundle->recoder.output_dim() : corpus.dim();
  if (bundle && bundle->dim() != corpus.dim()) {
    return absl::InvalidArgumentError(
        absl::StrCat("recoder expects dim ", bundle->dim(), ", corpus has ",
                     corpus.dim()));
  }
  EmbeddingMatrix means(n, d);
  DEEPCAND_RETURN_IF_ERROR(ParallelForWithStatus(n, [&](size_t i) {
    std::vector<double> mean;
    if (bundle) {
      DEEPCAND_ASSIGN_OR_RETURN(EmbeddingMatrix recoded,
                                RecodeDocument(*bundle, corpus.Document(i)));
      DEEPCAND_ASSIGN_OR_RETURN(mean, MeanEmbedding(recoded));
    } else {
      DEEPCAND_ASSIGN_OR_RETURN(mean, MeanEmbedding(corpus.Document(i)));
    }
    std::copy(mean.begin(), mean.end(), means.row(i).begin());
    return absl::OkStatus();
  }));
  return means;
}

namespace {

// One optimizer step on a batch of documents. Returns the batch loss.
absl::StatusOr<double> RecoderStep(const Corpus& corpus,
                                   std::span<const size_t> docs,
                                   std::span<const int> cluster_labels,
                                   RecoderBundle& bundle, AdamState& adam) {
  const size_t d = corpus.dim();
  size_t rows = 0;
  for (size_t doc : docs) rows += corpus.index[doc].count;
  EmbeddingMatrix stacked(rows, d);
  std::vector<size_t> offsets;
  std::vector<int> targets;
  size_t r = 0;
  for (size_t doc : docs) {
    offsets.push_back(r);
    const ConstMatrixView s = corpus.Document(doc);
    std::copy(s.data(), s.data() + s.rows() * d, stacked.row(r).begin());
    r += s.rows();
    targets.push_back(cluster_labels[doc]);
  }

  DEEPCAND_ASSIGN_OR_RETURN(ForwardCache h_cache,
                            Forward(bundle.recoder, stacked));
  const EmbeddingMatrix& recoded = h_cache.output();
  const size_t out_d = recoded.cols();
  EmbeddingMatrix means(docs.size(), out_d);
  for (size_t b = 0; b < docs.size(); ++b) {
    const size_t k = corpus.index[docs[b]].count;
    DEEPCAND_ASSIGN_OR_RETURN(
        std::vector<double> mean,
        MeanEmbedding(recoded.view().Rows(offsets[b], k)));
    std::copy(mean.begin(), mean.end(), means.row(b).begin());
  }

  DEEPCAND_ASSIGN_OR_RETURN(ForwardCache l_cache, Forward(bundle.head, means));
  DEEPCAND_ASSIGN_OR_RETURN(CrossEntropy ce,
                            SoftmaxCrossEntropy(l_cache.output(), targets));
  std::vector<double> head_grad(bundle.head.num_parameters(), 0.0);
  DEEPCAND_ASSIGN_OR_RETURN(
      EmbeddingMatrix mean_grad,
      BackwardFromOutput(bundle.head, l_cache, ce.logit_grad, head_grad));

  // d mean / d row = 1/k for every row of the document.
  EmbeddingMatrix row_grad(rows, out_d);
  for (size_t b = 0; b < docs.size(); ++b) {
    const size_t k = corpus.index[docs[b]].count;
    const double inv_k = 1.0 / static_cast<double>(k);
    for (size_t i = 0; i < k; ++i) {
      simd::Axpy(inv_k, mean_grad.row(b), row_grad.row(offsets[b] + i));
    }
  }
  std::vector<double> recoder_grad(bundle.recoder.num_parameters(), 0.0);
  DEEPCAND_ASSIGN_OR_RETURN(
      EmbeddingMatrix unused,
      BackwardFromOutput(bundle.recoder, h_cache, row_grad, recoder_grad));
  (void)unused;

  const ParameterBlock blocks[] = {
      {bundle.recoder.parameters(), recoder_grad},
      {bundle.head.parameters(), head_grad}};
  DEEPCAND_RETURN_IF_ERROR(AdamStep(blocks, adam));
  return ce.loss;
}

}  // namespace

absl::StatusOr<RecoderBundle> TrainRecoder(const Corpus& corpus,
                                           const RecoderOptions& options,
                                           uint64_t seed) {
  if (corpus.num_documents() == 0) {
    return absl::InvalidArgumentError("recoder training needs documents");
  }
  if (options.batch_size == 0) {
    return absl::InvalidArgumentError("batch size must be >= 1");
  }
  const size_t d = corpus.dim();
  SeededRng rng(seed, "train-recoder");
  RecoderBundle bundle;
  bundle.seed = seed;
  bundle.epochs = options.epochs;

  DEEPCAND_ASSIGN_OR_RETURN(EmbeddingMatrix means, DocumentMeans(corpus));
  SeededRng kmeans_rng = rng.Child("kmeans");
  DEEPCAND_ASSIGN_OR_RETURN(
      bundle.kmeans,
      FitKMeans(means, options.n_clusters, kmeans_rng, options.kmeans));
  DEEPCAND_ASSIGN_OR_RETURN(std::vector<int> labels,
                            AssignClusters(bundle.kmeans, means));

  if (options.identity_init) {
    DEEPCAND_ASSIGN_OR_RETURN(bundle.recoder, Mlp::Identity(d));
  } else {
    SeededRng h_rng = rng.Child("recoder");
    DEEPCAND_ASSIGN_OR_RETURN(bundle.recoder,
                              Mlp::FourLayer(d, d, h_rng, options.hidden));
  }
  SeededRng l_rng = rng.Child("head");
  DEEPCAND_ASSIGN_OR_RETURN(bundle.head,
                            Mlp::Linear(d, options.n_clusters, l_rng));

  AdamState adam = AdamState::Create(
      bundle.recoder.num_parameters() + bundle.head.num_parameters(),
      options.adam);
  SeededRng shuffle_rng = rng.Child("shuffle");
  std::vector<size_t> order(corpus.num_documents());
  std::iota(order.begin(), order.end(), size_t{0});
  for (size_t epoch = 0; epoch < options.epochs; ++epoch) {
    Shuffle(order, shuffle_rng);
    double total = 0.0;
    for (size_t start = 0; start < order.size(); start += options.batch_size) {
      const size_t count = std::min(options.batch_size, order.size() - start);
      DEEPCAND_ASSIGN_OR_RETURN(
          double loss,
          RecoderStep(corpus,
                      std::span<const size_t>(order).subspan(start, count),
                      labels, bundle, adam));
      total += loss * static_cast<double>(count);
    }
    bundle.loss_history.push_back(total / static_cast<double>(order.size()));
  }
  return bundle;
}

absl::StatusOr<double> ClusterAgreement(const RecoderBundle& bundle,
                                        const Corpus& corpus) {
  DEEPCAND_ASSIGN_OR_RETURN(EmbeddingMatrix plain, DocumentMeans(corpus));
  DEEPCAND_ASSIGN_OR_RETURN(std::vector<int> labels,
                            AssignClusters(bundle.kmeans, plain));
  DEEPCAND_ASSIGN_OR_RETURN(EmbeddingMatrix recoded,
                            DocumentMeans(corpus, &bundle));
  DEEPCAND_ASSIGN_OR_RETURN(std::vector<int> predicted,
                            PredictClasses(bundle.head, recoded));
  if (labels.empty()) return 0.0;
  size_t agree = 0;
  for (size_t i = 0; i < labels.size(); ++i) agree += labels[i] == predicted[i];
  return static_cast<double>(agree) / static_cast<double>(labels.size());
}

absl::StatusOr<CandidateSet> BuildCandidates(const Corpus& corpus,
                                             size_t min_sentences, size_t m,
                                             SeededRng& rng,
                                             const RecoderBundle* bundle) {
  if (m == 0) return absl::InvalidArgumentError("need m >= 1 candidates");
  std::vector<size_t> qualifying;
  for (size_t i = 0; i < corpus.num_documents(); ++i) {
    if (corpus.index[i].count >= min_sentences) qualifying.push_back(i);
  }
  if (qualifying.size() < m) {
    return absl::FailedPreconditionError(absl::StrCat(
        "only ", qualifying.size(), " documents have >= ", min_sentences,
        " sentences; ", m, " candidates requested"));
  }
  DEEPCAND_ASSIGN_OR_RETURN(
      std::vector<size_t> picks,
      SampleWithoutReplacement(rng, qualifying.size(), m));

  std::vector<CorpusEntry> entries;
  for (size_t pick : picks) entries.push_back(corpus.index[qualifying[pick]]);
  CandidateSet out;
  out.embeddings = EmbeddingMatrix(m, bundle ? bundle->recoder.output_dim()
                                             : corpus.dim());
  DEEPCAND_RETURN_IF_ERROR(ParallelForWithStatus(m, [&](size_t c) {
    const ConstMatrixView doc =
        corpus.sentences.view().Rows(entries[c].start, entries[c].count);
    std::vector<double> mean;
    if (bundle) {
      DEEPCAND_ASSIGN_OR_RETURN(EmbeddingMatrix recoded,
                                RecodeDocument(*bundle, doc));
      DEEPCAND_ASSIGN_OR_RETURN(mean, MeanEmbedding(recoded));
    } else {
      DEEPCAND_ASSIGN_OR_RETURN(mean, MeanEmbedding(doc));
    }
    std::copy(mean.begin(), mean.end(), out.embeddings.row(c).begin());
    return absl::OkStatus();
  }));
  for (const CorpusEntry& e : entries) out.source_doc_ids.push_back(e.doc_id);
  return out;
}

uint64_t DocumentSeed(uint64_t run_seed, std::string_view doc_id) {
  return SeededRng::DeriveSeed(run_seed, doc_id);
}

absl::StatusOr<std::vector<SelectionRecord>> PrivatizeCorpus(
    const Corpus& corpus, const CandidateSet& candidates,
    const RecoderBundle* bundle, const PrivatizeOptions& options) {
  DEEPCAND_ASSIGN_OR_RETURN(PrivacyBudget budget,
                            PrivacyBudget::Create(options.epsilon));
  if (options.projections == 0) {
    return absl::InvalidArgumentError("need p >= 1 projections");
  }
  const size_t d = bundle ? bundle->recoder.output_dim() : corpus.dim();
  if (candidates.embeddings.cols() != d) {
    return absl::InvalidArgumentError(
        absl::StrCat("candidates have dim ", candidates.embeddings.cols(),
                     ", documents ", d));
  }
  std::vector<SelectionRecord> records(corpus.num_documents());
  DEEPCAND_RETURN_IF_ERROR(
      ParallelForWithStatus(corpus.num_documents(), [&](size_t i) {
        const uint64_t seed = DocumentSeed(options.seed, corpus.index[i].doc_id);
        EmbeddingMatrix recoded;
        ConstMatrixView sentences = corpus.Document(i);
        if (bundle) {
          DEEPCAND_ASSIGN_OR_RETURN(recoded, RecodeDocument(*bundle, sentences));
          sentences = recoded.view();
        }
        DEEPCAND_ASSIGN_OR_RETURN(
            PrivateSelection sel,
            SelectPrivateEmbedding(sentences, candidates.embeddings, budget,
                                   options.projections, seed, options.rule));
        records[i] = std::move(sel.record);
        records[i].doc_id = corpus.index[i].doc_id;
        return absl::OkStatus();
      }));
  return records;
}

absl::StatusOr<Mlp> TrainClassifier(ConstMatrixView features,
                                    std::span<const int> labels, size_t r,
                                    const ClassifierOptions& options,
                                    SeededRng& rng,
                                    std::vector<double>* epoch_losses) {
  if (features.rows() == 0 || features.rows() != labels.size()) {
    return absl::InvalidArgumentError(
        absl::StrCat("need one label per feature row, got ", features.rows(),
                     " rows and ", labels.size(), " labels"));
  }
  if (r == 0 || options.batch_size == 0) {
    return absl::InvalidArgumentError("need r >= 1 and batch size >= 1");
  }
  DEEPCAND_RETURN_IF_ERROR(CheckLabels(labels, r));
  SeededRng init = rng.Child("init");
  DEEPCAND_ASSIGN_OR_RETURN(
      Mlp model, Mlp::FourLayer(features.cols(), r, init, options.hidden));
  AdamState adam = AdamState::Create(model.num_parameters(), options.adam);
  SeededRng shuffle_rng = rng.Child("shuffle");
  std::vector<size_t> order(features.rows());
  std::iota(order.begin(), order.end(), size_t{0});
  for (size_t epoch = 0; epoch < options.epochs; ++epoch) {
    Shuffle(order, shuffle_rng);
    double total = 0.0;
    for (size_t start = 0; start < order.size(); start += options.batch_size) {
      const size_t count = std::min(options.batch_size, order.size() - start);
      const auto batch_rows = std::span<const size_t>(order).subspan(start, count);
      const EmbeddingMatrix batch = GatherRows(features, batch_rows);
      std::vector<int> targets;
      for (size_t i : batch_rows) targets.push_back(labels[i]);
      DEEPCAND_ASSIGN_OR_RETURN(ForwardCache cache, Forward(model, batch));
      DEEPCAND_ASSIGN_OR_RETURN(CrossEntropy ce,
                                SoftmaxCrossEntropy(cache.output(), targets));
      std::vector<double> grad(model.num_parameters(), 0.0);
      DEEPCAND_ASSIGN_OR_RETURN(
          EmbeddingMatrix unused,
          BackwardFromOutput(model, cache, ce.logit_grad, grad));
      (void)unused;
      DEEPCAND_RETURN_IF_ERROR(AdamStep(model, grad, adam));
      total += ce.loss * static_cast<double>(count);
    }
    if (epoch_losses) {
      epoch_losses->push_back(total / static_cast<double>(order.size()));
    }
    if (options.on_epoch) {
      DEEPCAND_RETURN_IF_ERROR(options.on_epoch(epoch + 1, model));
    }
  }
  return model;
}

EmbeddingMatrix GatherRows(ConstMatrixView matrix,
                           std::span<const size_t> rows) {
  EmbeddingMatrix out(rows.size(), matrix.cols());
  for (size_t i = 0; i < rows.size(); ++i) {
    std::copy(matrix.row(rows[i]).begin(), matrix.row(rows[i]).end(),
              out.row(i).begin());
  }
  return out;
}

}  // namespace deepcand
