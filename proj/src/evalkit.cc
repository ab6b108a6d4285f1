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

#include "deepcand/evalkit.h"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_split.h"
#include "deepcand/parallel.h"
#include "deepcand/status_macros.h"

namespace deepcand {

absl::StatusOr<double> MacroF1(std::span<const int> predictions,
                               std::span<const int> truth, size_t r) {
  if (predictions.size() != truth.size()) {
    return absl::InvalidArgumentError(
        absl::StrCat(predictions.size(), " predictions for ", truth.size(),
                     " labels"));
  }
  if (truth.empty()) return absl::InvalidArgumentError("nothing to score");
  std::vector<size_t> tp(r, 0), fp(r, 0), fn(r, 0);
  std::vector<bool> seen(r, false);
  for (size_t i = 0; i < truth.size(); ++i) {
    const int p = predictions[i], t = truth[i];
    if (p < 0 || t < 0 || static_cast<size_t>(p) >= r ||
        static_cast<size_t>(t) >= r) {
      return absl::OutOfRangeError(
          absl::StrCat("label pair (", p, ", ", t, ") outside [0, ", r, ")"));
    }
    seen[p] = seen[t] = true;
    if (p == t) {
      ++tp[t];
    } else {
      ++fp[p];
      ++fn[t];
    }
  }
  double total = 0.0;
  size_t classes = 0;
  for (size_t c = 0; c < r; ++c) {
    if (!seen[c]) continue;
    ++classes;
    total += 2.0 * tp[c] / static_cast<double>(2 * tp[c] + fp[c] + fn[c]);
  }
  return total / static_cast<double>(classes);
}

absl::StatusOr<EpochSelection> TrainClassifierWithValidation(
    ConstMatrixView features, std::span<const int> labels, size_t r,
    ConstMatrixView validation_features, std::span<const int> validation_labels,
    const ClassifierOptions& options, SeededRng& rng) {
  if (validation_features.rows() == 0 ||
      validation_features.rows() != validation_labels.size()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "need one label per validation row, got ", validation_features.rows(),
        " rows and ", validation_labels.size(), " labels"));
  }
  EpochSelection out;
  double best = -1.0;
  ClassifierOptions with_hook = options;
  with_hook.on_epoch = [&](size_t epoch, const Mlp& model) -> absl::Status {
    DEEPCAND_ASSIGN_OR_RETURN(std::vector<int> predicted,
                              PredictClasses(model, validation_features));
    DEEPCAND_ASSIGN_OR_RETURN(double score,
                              MacroF1(predicted, validation_labels, r));
    out.validation.push_back(score);
    if (score > best) {
      best = score;
      out.best_epoch = epoch;
      out.model = model;
    }
    return absl::OkStatus();
  };
  DEEPCAND_ASSIGN_OR_RETURN(
      Mlp last, TrainClassifier(features, labels, r, with_hook, rng));
  if (out.best_epoch == 0) out.model = std::move(last);
  return out;
}

absl::StatusOr<Corpus> SubsetCorpus(const Corpus& corpus,
                                    std::span<const size_t> documents) {
  EmbeddingMatrix sentences(0, corpus.dim());
  std::vector<CorpusEntry> entries;
  for (size_t i : documents) {
    if (i >= corpus.num_documents()) {
      return absl::OutOfRangeError(absl::StrCat("no document ", i));
    }
    CorpusEntry e = corpus.index[i];
    const ConstMatrixView doc = corpus.Document(i);
    e.start = sentences.rows();
    for (size_t s = 0; s < doc.rows(); ++s) sentences.AppendRow(doc.row(s));
    entries.push_back(std::move(e));
  }
  DEEPCAND_ASSIGN_OR_RETURN(CorpusIndex index,
                            CorpusIndex::Create(std::move(entries)));
  return MakeCorpus(std::move(sentences), std::move(index));
}

std::string KBucket::Name() const { return absl::StrCat("[", lo, ",", hi, ")"); }

absl::StatusOr<KBucket> ParseKBucket(std::string_view text) {
  // "lo:hi", half-open.
  std::vector<std::string> parts = absl::StrSplit(std::string(text), ':');
  KBucket b;
  if (parts.size() != 2 || !absl::SimpleAtoi(parts[0], &b.lo) ||
      !absl::SimpleAtoi(parts[1], &b.hi) || b.lo >= b.hi) {
    return absl::InvalidArgumentError(absl::StrCat(
        "bad k bucket '", std::string(text), "' (expected lo:hi with lo < hi)"));
  }
  return b;
}

double Mean(std::span<const double> v) {
  if (v.empty()) return 0.0;
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double PopulationStddev(std::span<const double> v) {
  if (v.empty()) return 0.0;
  const double m = Mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size()));
}

absl::StatusOr<double> ScoreArm(const EvalArm& arm, const Corpus& documents,
                                std::span<const int> labels, size_t r,
                                double epsilon, uint64_t seed) {
  if (arm.classifier == nullptr || !arm.encode) {
    return absl::FailedPreconditionError("arm needs an encoder and classifier");
  }
  DEEPCAND_ASSIGN_OR_RETURN(EmbeddingMatrix features,
                            arm.encode(documents, epsilon, seed));
  DEEPCAND_ASSIGN_OR_RETURN(std::vector<int> predicted,
                            PredictClasses(*arm.classifier, features));
  return MacroF1(predicted, labels, r);
}

uint64_t TrialSeed(uint64_t seed, std::string_view axis, size_t trial) {
  return SeededRng::DeriveSeed(seed,
                               absl::StrCat(std::string(axis), "/trial", trial));
}

namespace {

absl::StatusOr<SweepPoint> RunPoint(const EvalArm& arm, const Corpus& docs,
                                    std::span<const int> labels, size_t r,
                                    double epsilon, size_t trials,
                                    uint64_t seed, std::string axis) {
  SweepPoint point;
  point.axis = std::move(axis);
  point.num_documents = docs.num_documents();
  for (size_t t = 0; t < trials; ++t) {
    DEEPCAND_ASSIGN_OR_RETURN(
        double score,
        ScoreArm(arm, docs, labels, r, epsilon, TrialSeed(seed, point.axis, t)));
    point.scores.push_back(score);
  }
  point.mean = Mean(point.scores);
  point.stddev = PopulationStddev(point.scores);
  return point;
}

}  // namespace

absl::StatusOr<SweepResult> SweepEpsilon(
    const Corpus& test, std::span<const int> labels, size_t r,
    const EvalArm& arm, std::span<const double> epsilons, size_t trials,
    uint64_t seed, const EvalArm* reference) {
  if (trials == 0) return absl::InvalidArgumentError("need trials >= 1");
  if (labels.size() != test.num_documents()) {
    return absl::InvalidArgumentError("need one label per test document");
  }
  SweepResult result;
  if (reference != nullptr) {
    DEEPCAND_ASSIGN_OR_RETURN(
        SweepPoint ref,
        RunPoint(*reference, test, labels, r, 1.0, 1, seed, "non-private"));
    result.points.push_back(std::move(ref));
  }
  for (double eps : epsilons) {
    DEEPCAND_ASSIGN_OR_RETURN(
        SweepPoint p, RunPoint(arm, test, labels, r, eps, trials, seed,
                               absl::StrCat(eps)));
    result.points.push_back(std::move(p));
  }
  return result;
}

absl::StatusOr<SweepResult> SweepK(const Corpus& test,
                                   std::span<const int> labels, size_t r,
                                   const EvalArm& arm,
                                   std::span<const KBucket> buckets,
                                   double epsilon, size_t trials,
                                   uint64_t seed) {
  if (trials == 0) return absl::InvalidArgumentError("need trials >= 1");
  if (labels.size() != test.num_documents()) {
    return absl::InvalidArgumentError("need one label per test document");
  }
  SweepResult result;
  for (const KBucket& bucket : buckets) {
    std::vector<size_t> members;
    std::vector<int> member_labels;
    for (size_t i = 0; i < test.num_documents(); ++i) {
      const size_t k = test.index[i].count;
      if (k >= bucket.lo && k < bucket.hi) {
        members.push_back(i);
        member_labels.push_back(labels[i]);
      }
    }
    if (members.empty()) {
      SweepPoint p;
      p.axis = bucket.Name();
      p.empty = true;
      result.points.push_back(std::move(p));
      continue;
    }
    DEEPCAND_ASSIGN_OR_RETURN(Corpus sub, SubsetCorpus(test, members));
    DEEPCAND_ASSIGN_OR_RETURN(
        SweepPoint p, RunPoint(arm, sub, member_labels, r, epsilon, trials,
                               seed, bucket.Name()));
    result.points.push_back(std::move(p));
  }
  return result;
}

absl::Status WriteSweepCsv(const SweepResult& result, std::ostream& out) {
  out << "axis,trial,score,mean,std\n";
  for (const SweepPoint& p : result.points) {
    if (p.empty) {
      out << '"' << p.axis << "\",,,empty,\n";
      continue;
    }
    for (size_t t = 0; t < p.scores.size(); ++t) {
      out << '"' << p.axis << "\"," << t << ',' << p.scores[t] << ','
          << p.mean << ',' << p.stddev << '\n';
    }
  }
  if (!out) return absl::DataLossError("failed to write CSV");
  return absl::OkStatus();
}

absl::StatusOr<size_t> SelectByValidation(
    std::span<const size_t> grid,
    const std::function<absl::StatusOr<double>(size_t)>& score) {
  if (grid.empty()) return absl::InvalidArgumentError("empty grid");
  size_t best = grid[0];
  double best_score = -1.0;
  for (size_t value : grid) {
    DEEPCAND_ASSIGN_OR_RETURN(double s, score(value));
    if (s > best_score) {
      best_score = s;
      best = value;
    }
  }
  return best;
}

absl::StatusOr<EmbeddingMatrix> SelectedEmbeddings(
    std::span<const SelectionRecord> records, const CandidateSet& candidates) {
  EmbeddingMatrix out(records.size(), candidates.embeddings.cols());
  for (size_t i = 0; i < records.size(); ++i) {
    const size_t c = records[i].chosen_candidate;
    if (c >= candidates.size()) {
      return absl::OutOfRangeError(
          absl::StrCat("record ", i, " chose candidate ", c, " of ",
                       candidates.size()));
    }
    std::copy(candidates.embeddings.row(c).begin(),
              candidates.embeddings.row(c).end(), out.row(i).begin());
  }
  return out;
}

DocumentEncoder DeepCandidateEncoder(const CandidateSet* candidates,
                                     const RecoderBundle* bundle,
                                     size_t projections,
                                     DepthAggregation rule) {
  return [=](const Corpus& docs, double epsilon,
             uint64_t seed) -> absl::StatusOr<EmbeddingMatrix> {
    PrivatizeOptions options;
    options.epsilon = epsilon;
    options.projections = projections;
    options.rule = rule;
    options.seed = seed;
    DEEPCAND_ASSIGN_OR_RETURN(
        std::vector<SelectionRecord> records,
        PrivatizeCorpus(docs, *candidates, bundle, options));
    return SelectedEmbeddings(records, *candidates);
  };
}

DocumentEncoder TruncationEncoder(const TruncationBox* box, WidthMode mode) {
  return [=](const Corpus& docs, double epsilon,
             uint64_t seed) -> absl::StatusOr<EmbeddingMatrix> {
    DEEPCAND_ASSIGN_OR_RETURN(PrivacyBudget budget,
                              PrivacyBudget::Create(epsilon));
    EmbeddingMatrix out(docs.num_documents(), box->dim());
    DEEPCAND_RETURN_IF_ERROR(
        ParallelForWithStatus(docs.num_documents(), [&](size_t i) {
          SeededRng rng(DocumentSeed(seed, docs.index[i].doc_id),
                        "truncation");
          DEEPCAND_ASSIGN_OR_RETURN(
              std::vector<double> z,
              TruncationMechanism(docs.Document(i), *box, budget, rng, mode));
          std::copy(z.begin(), z.end(), out.row(i).begin());
          return absl::OkStatus();
        }));
    return out;
  };
}

DocumentEncoder MeanEncoder(const RecoderBundle* bundle) {
  return [=](const Corpus& docs, double,
             uint64_t) -> absl::StatusOr<EmbeddingMatrix> {
    return DocumentMeans(docs, bundle);
  };
}

DocumentEncoder ClippedMeanEncoder(const TruncationBox* box) {
  return [=](const Corpus& docs, double,
             uint64_t) -> absl::StatusOr<EmbeddingMatrix> {
    std::vector<size_t> starts, counts;
    for (const CorpusEntry& e : docs.index.entries()) {
      starts.push_back(e.start);
      counts.push_back(e.count);
    }
    return ClippedMeans(docs.sentences, starts, counts, *box);
  };
}

}  // namespace deepcand
