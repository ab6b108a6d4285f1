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

// Command-line front end. Usage errors exit 2. Validation and data errors
// exit 1 with a one-line JSON diagnostic on stderr.

#include <cstdint>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "deepcand/baselines.h"
#include "deepcand/checkpoint.h"
#include "deepcand/evalkit.h"
#include "deepcand/kmeans.h"
#include "deepcand/mechanism.h"
#include "deepcand/parallel.h"
#include "deepcand/pipeline.h"
#include "deepcand/properties.h"
#include "deepcand/simd/kernels.h"
#include "deepcand/status_macros.h"
#include "deepcand/store.h"
#include "deepcand/synthetic.h"
#include "deepcand/tukey.h"
#include "json.hpp"

namespace deepcand {
namespace {

using nlohmann::json;

struct GlobalFlags {
  uint64_t seed = 1;
  size_t threads = 0;
  std::string simd = "auto";
  std::string aggregation = "min";
};

// A corpus on disk is PREFIX.emb plus PREFIX.index.jsonl.
absl::StatusOr<Corpus> LoadCorpus(const std::string& prefix) {
  return ReadCorpusFiles(prefix + ".emb", prefix + ".index.jsonl");
}

absl::Status SaveCorpus(const Corpus& corpus, const std::string& prefix) {
  DEEPCAND_RETURN_IF_ERROR(
      WriteEmbeddingsFile(corpus.sentences, prefix + ".emb"));
  return WriteIndexFile(corpus.index, prefix + ".index.jsonl");
}

// "-" is standard output.
absl::Status WithOutput(const std::string& path,
                        const std::function<absl::Status(std::ostream&)>& fn) {
  if (path == "-") return fn(std::cout);
  std::ofstream out(path);
  if (!out) return absl::NotFoundError(absl::StrCat("cannot write ", path));
  DEEPCAND_RETURN_IF_ERROR(fn(out));
  out.close();
  if (!out) return absl::DataLossError(absl::StrCat("short write to ", path));
  return absl::OkStatus();
}

absl::StatusOr<std::string> ReadText(const std::string& path) {
  if (path == "-") {
    std::stringstream ss;
    ss << std::cin.rdbuf();
    return ss.str();
  }
  std::ifstream in(path);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open ", path));
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Class ids of `index` against the label list of a training corpus.
absl::StatusOr<std::vector<int>> LabelIds(
    const CorpusIndex& index, const std::vector<std::string>& labels) {
  std::vector<int> ids;
  ids.reserve(index.size());
  for (const CorpusEntry& e : index.entries()) {
    const auto it = std::lower_bound(labels.begin(), labels.end(), e.label);
    if (it == labels.end() || *it != e.label) {
      return absl::InvalidArgumentError(absl::StrCat(
          "document ", e.doc_id, " has label '", e.label,
          "' absent from the training corpus"));
    }
    ids.push_back(static_cast<int>(it - labels.begin()));
  }
  return ids;
}

absl::Status ApplyGlobals(const GlobalFlags& g) {
  SetThreadCount(g.threads);
  if (g.simd == "auto") {
    simd::SelectBest();
    return absl::OkStatus();
  }
  DEEPCAND_ASSIGN_OR_RETURN(simd::Isa isa, simd::ParseIsa(g.simd));
  return simd::SelectIsa(isa);
}

void PrintJson(const json& j) { std::cout << j.dump() << "\n"; }

// ---------------------------------------------------------------- synth

struct SynthFlags {
  SyntheticOptions options;
  std::string out;
};

absl::Status RunSynth(const GlobalFlags& g, SynthFlags f) {
  f.options.seed = g.seed;
  DEEPCAND_ASSIGN_OR_RETURN(Corpus corpus, GenerateTopicCorpus(f.options));
  DEEPCAND_RETURN_IF_ERROR(SaveCorpus(corpus, f.out));
  PrintJson({{"documents", corpus.num_documents()},
             {"sentences", corpus.sentences.rows()},
             {"dim", corpus.dim()},
             {"prefix", f.out}});
  return absl::OkStatus();
}

// ------------------------------------------------------------ privatize

struct PrivatizeFlags {
  std::string corpus;
  std::string candidates;
  std::string recoder;
  double epsilon = 10.0;
  size_t projections = 50;
  std::string out = "-";
  std::string embeddings_out;
};

absl::Status RunPrivatize(const GlobalFlags& g, const PrivatizeFlags& f) {
  DEEPCAND_ASSIGN_OR_RETURN(DepthAggregation rule,
                            ParseDepthAggregation(g.aggregation));
  DEEPCAND_ASSIGN_OR_RETURN(Corpus corpus, LoadCorpus(f.corpus));
  DEEPCAND_ASSIGN_OR_RETURN(CandidateSet candidates,
                            LoadCandidateSet(f.candidates));
  RecoderBundle bundle;
  if (!f.recoder.empty()) {
    DEEPCAND_ASSIGN_OR_RETURN(bundle, LoadRecoderBundle(f.recoder));
  }
  PrivatizeOptions options;
  options.epsilon = f.epsilon;
  options.projections = f.projections;
  options.rule = rule;
  options.seed = g.seed;
  DEEPCAND_ASSIGN_OR_RETURN(
      std::vector<SelectionRecord> records,
      PrivatizeCorpus(corpus, candidates, f.recoder.empty() ? nullptr : &bundle,
                      options));
  DEEPCAND_RETURN_IF_ERROR(WithOutput(f.out, [&](std::ostream& out) {
    return WriteSelectionRecords(records, out);
  }));
  if (!f.embeddings_out.empty()) {
    DEEPCAND_ASSIGN_OR_RETURN(EmbeddingMatrix chosen,
                              SelectedEmbeddings(records, candidates));
    DEEPCAND_RETURN_IF_ERROR(WriteEmbeddingsFile(chosen, f.embeddings_out));
  }
  return absl::OkStatus();
}

// ---------------------------------------------------------------- depth

struct DepthFlags {
  std::string sentences;
  std::string candidates;
  size_t projections = 50;
  bool detail = false;
  bool exact = false;
};

absl::Status RunDepth(const GlobalFlags& g, const DepthFlags& f) {
  DEEPCAND_ASSIGN_OR_RETURN(DepthAggregation rule,
                            ParseDepthAggregation(g.aggregation));
  DEEPCAND_ASSIGN_OR_RETURN(EmbeddingMatrix sentences,
                            ReadEmbeddingsFile(f.sentences));
  DEEPCAND_ASSIGN_OR_RETURN(EmbeddingMatrix candidates,
                            ReadEmbeddingsFile(f.candidates));
  if (f.exact && sentences.cols() != 2) {
    return absl::InvalidArgumentError(absl::StrCat(
        "--exact needs 2-dimensional embeddings, got ", sentences.cols()));
  }
  SeededRng rng(g.seed, "projections");
  DEEPCAND_ASSIGN_OR_RETURN(
      ProjectionSet projections,
      SampleUnitSphere(rng, candidates.cols(), f.projections));
  DEEPCAND_ASSIGN_OR_RETURN(
      std::vector<DepthReport> reports,
      ApproxDepth(candidates, sentences, projections, rule));
  for (const DepthReport& r : reports) {
    json j = {{"candidate", r.candidate}, {"depth", r.depth}};
    if (f.detail) {
      j["h"] = r.per_projection_h;
      j["per_projection_depth"] = r.per_projection_depth;
    }
    if (f.exact) {
      DEEPCAND_ASSIGN_OR_RETURN(
          int exact, ExactDepth2d(candidates.row(r.candidate), sentences));
      j["exact_depth"] = exact;
    }
    PrintJson(j);
  }
  return absl::OkStatus();
}

// ---------------------------------------------------------------- audit

struct AuditFlags {
  double epsilon = 10.0;
  size_t pairs = 210;
  size_t group_size = 1;
};

absl::Status RunAudit(const GlobalFlags& g, const AuditFlags& f) {
  DEEPCAND_ASSIGN_OR_RETURN(DepthAggregation rule,
                            ParseDepthAggregation(g.aggregation));
  DEEPCAND_ASSIGN_OR_RETURN(PrivacyBudget budget,
                            PrivacyBudget::Create(f.epsilon));
  if (f.pairs == 0 || f.group_size == 0) {
    return absl::InvalidArgumentError("--pairs and --group-size must be >= 1");
  }
  const std::vector<NeighborPair> pairs =
      GenerateNeighborPairs(f.pairs, f.group_size, g.seed);
  double worst = 0.0;
  json by_family = json::object();
  for (const NeighborPair& pair : pairs) {
    DEEPCAND_ASSIGN_OR_RETURN(
        double ratio,
        f.group_size == 1
            ? AuditPair(pair.x, pair.x_prime, pair.candidates, budget,
                        pair.projections, pair.projection_seed, rule)
            : AuditGroup(pair.x, pair.x_prime, pair.differing_rows,
                         pair.candidates, budget, pair.projections,
                         pair.projection_seed, rule));
    worst = std::max(worst, ratio);
    const std::string family(PairFamilyName(pair.family));
    by_family[family] = std::max(by_family.value(family, 0.0), ratio);
  }
  const double bound = static_cast<double>(f.group_size) * f.epsilon;
  const bool ok = worst <= bound + 1e-9;
  PrintJson({{"pairs", pairs.size()},
             {"group_size", f.group_size},
             {"epsilon", f.epsilon},
             {"aggregation", g.aggregation},
             {"bound", bound},
             {"max_log_ratio", worst},
             {"max_log_ratio_by_family", by_family},
             {"passed", ok}});
  if (!ok) {
    return absl::InternalError(absl::StrFormat(
        "max log-ratio %.17g exceeds bound %.17g", worst, bound));
  }
  return absl::OkStatus();
}

// --------------------------------------------------------------- table1

absl::Status RunTable1(size_t m) {
  std::cout << absl::StrFormat("%8s %6s %4s %12s\n", "epsilon", "b", "j*",
                               "P(depth=j*)");
  bool ok = true;
  for (const DeepCandidateCondition& row : kDeepCandidateConditions) {
    DEEPCAND_ASSIGN_OR_RETURN(PrivacyBudget budget,
                              PrivacyBudget::Create(row.epsilon));
    DEEPCAND_ASSIGN_OR_RETURN(double p,
                              CheckTable1(m, row.b, row.jstar, budget));
    ok &= p >= 0.95;
    std::cout << absl::StrFormat("%8g %6d %4d %12.6f\n", row.epsilon, row.b,
                                 row.jstar, p);
  }
  if (!ok) {
    return absl::FailedPreconditionError(
        absl::StrCat("some rows fall below 0.95 at m=", m));
  }
  return absl::OkStatus();
}

// --------------------------------------------------------------- kmeans

struct KMeansFlags {
  std::string embeddings;
  std::string corpus;
  size_t clusters = 50;
  KMeansOptions options;
  std::string out;
};

absl::Status RunKMeans(const GlobalFlags& g, const KMeansFlags& f) {
  if (f.embeddings.empty() == f.corpus.empty()) {
    return absl::InvalidArgumentError(
        "give exactly one of --embeddings and --corpus");
  }
  EmbeddingMatrix points;
  if (!f.embeddings.empty()) {
    DEEPCAND_ASSIGN_OR_RETURN(points, ReadEmbeddingsFile(f.embeddings));
  } else {
    DEEPCAND_ASSIGN_OR_RETURN(Corpus corpus, LoadCorpus(f.corpus));
    DEEPCAND_ASSIGN_OR_RETURN(points, DocumentMeans(corpus));
  }
  SeededRng rng(g.seed, "kmeans");
  DEEPCAND_ASSIGN_OR_RETURN(KMeansModel model,
                            FitKMeans(points, f.clusters, rng, f.options));
  DEEPCAND_RETURN_IF_ERROR(SaveKMeans(model, f.out));
  PrintJson({{"n_clusters", model.n_clusters},
             {"inertia", model.inertia},
             {"iterations", model.iterations}});
  return absl::OkStatus();
}

// -------------------------------------------------------- train-recoder

struct RecoderFlags {
  std::string corpus;
  RecoderOptions options;
  std::string out;
};

absl::Status RunTrainRecoder(const GlobalFlags& g, const RecoderFlags& f) {
  DEEPCAND_ASSIGN_OR_RETURN(Corpus corpus, LoadCorpus(f.corpus));
  DEEPCAND_ASSIGN_OR_RETURN(RecoderBundle bundle,
                            TrainRecoder(corpus, f.options, g.seed));
  DEEPCAND_ASSIGN_OR_RETURN(double agreement,
                            ClusterAgreement(bundle, corpus));
  DEEPCAND_RETURN_IF_ERROR(SaveRecoderBundle(bundle, f.out));
  PrintJson({{"epochs", bundle.epochs},
             {"loss", bundle.loss_history},
             {"cluster_agreement", agreement},
             {"out", f.out}});
  return absl::OkStatus();
}

// ----------------------------------------------------------- candidates

struct CandidateFlags {
  std::string corpus;
  std::string recoder;
  size_t m = 5000;
  size_t min_sentences = 8;
  std::string out;
};

absl::Status RunCandidates(const GlobalFlags& g, const CandidateFlags& f) {
  DEEPCAND_ASSIGN_OR_RETURN(Corpus corpus, LoadCorpus(f.corpus));
  RecoderBundle bundle;
  if (!f.recoder.empty()) {
    DEEPCAND_ASSIGN_OR_RETURN(bundle, LoadRecoderBundle(f.recoder));
  }
  SeededRng rng(g.seed, "candidates");
  DEEPCAND_ASSIGN_OR_RETURN(
      CandidateSet candidates,
      BuildCandidates(corpus, f.min_sentences, f.m, rng,
                      f.recoder.empty() ? nullptr : &bundle));
  DEEPCAND_RETURN_IF_ERROR(SaveCandidateSet(candidates, f.out));
  PrintJson({{"candidates", candidates.size()},
             {"dim", candidates.embeddings.cols()},
             {"recoded", !f.recoder.empty()}});
  return absl::OkStatus();
}

// ----------------------------------------------------- train-classifier

struct ClassifierFlags {
  std::string corpus;
  std::string validation;
  std::string recoder;
  ClassifierOptions options;
  std::string out;
};

absl::Status RunTrainClassifier(const GlobalFlags& g,
                                const ClassifierFlags& f) {
  DEEPCAND_ASSIGN_OR_RETURN(Corpus corpus, LoadCorpus(f.corpus));
  RecoderBundle bundle;
  const RecoderBundle* bundle_ptr = nullptr;
  if (!f.recoder.empty()) {
    DEEPCAND_ASSIGN_OR_RETURN(bundle, LoadRecoderBundle(f.recoder));
    bundle_ptr = &bundle;
  }
  const std::vector<std::string> labels = corpus.index.SortedLabels();
  DEEPCAND_ASSIGN_OR_RETURN(std::vector<int> ids,
                            LabelIds(corpus.index, labels));
  DEEPCAND_ASSIGN_OR_RETURN(EmbeddingMatrix features,
                            DocumentMeans(corpus, bundle_ptr));
  SeededRng rng(g.seed, "train-classifier");
  Mlp model;
  json summary = {{"classes", labels.size()}};
  if (!f.validation.empty()) {
    DEEPCAND_ASSIGN_OR_RETURN(Corpus val, LoadCorpus(f.validation));
    DEEPCAND_ASSIGN_OR_RETURN(std::vector<int> val_ids,
                              LabelIds(val.index, labels));
    DEEPCAND_ASSIGN_OR_RETURN(EmbeddingMatrix val_features,
                              DocumentMeans(val, bundle_ptr));
    DEEPCAND_ASSIGN_OR_RETURN(
        EpochSelection sel,
        TrainClassifierWithValidation(features, ids, labels.size(),
                                      val_features, val_ids, f.options, rng));
    summary["best_epoch"] = sel.best_epoch;
    summary["validation_macro_f1"] = sel.validation;
    model = std::move(sel.model);
  } else {
    std::vector<double> losses;
    DEEPCAND_ASSIGN_OR_RETURN(model, TrainClassifier(features, ids,
                                                     labels.size(), f.options,
                                                     rng, &losses));
    summary["loss"] = losses;
  }
  DEEPCAND_RETURN_IF_ERROR(SaveMlp(model, f.out));
  DEEPCAND_RETURN_IF_ERROR(
      WithOutput(f.out + ".labels.json", [&](std::ostream& out) {
        out << json{{"labels", labels}}.dump(2) << "\n";
        return absl::OkStatus();
      }));
  PrintJson(summary);
  return absl::OkStatus();
}

// ------------------------------------------------------------- baseline

struct TruncationFlags {
  std::string corpus;
  std::string public_corpus;
  double coverage = 0.75;
  std::string width = "per-dim";
  double epsilon = 10.0;
  std::string out;
};

absl::Status RunTruncation(const GlobalFlags& g, const TruncationFlags& f) {
  DEEPCAND_ASSIGN_OR_RETURN(WidthMode mode, ParseWidthMode(f.width));
  DEEPCAND_ASSIGN_OR_RETURN(PrivacyBudget budget,
                            PrivacyBudget::Create(f.epsilon));
  DEEPCAND_ASSIGN_OR_RETURN(Corpus pub, LoadCorpus(f.public_corpus));
  DEEPCAND_ASSIGN_OR_RETURN(Corpus corpus, LoadCorpus(f.corpus));
  DEEPCAND_ASSIGN_OR_RETURN(EmbeddingMatrix pub_means, DocumentMeans(pub));
  DEEPCAND_ASSIGN_OR_RETURN(TruncationBox box, FitBox(pub_means, f.coverage));
  DEEPCAND_ASSIGN_OR_RETURN(EmbeddingMatrix out,
                            TruncationEncoder(&box, mode)(corpus, budget.epsilon(),
                                                          g.seed));
  DEEPCAND_RETURN_IF_ERROR(WriteEmbeddingsFile(out, f.out));
  PrintJson({{"documents", out.rows()},
             {"max_width", box.max_width()},
             {"width", f.width}});
  return absl::OkStatus();
}

struct MdpFlags {
  std::string vocab;
  std::string tokens;
  std::string input = "-";
  double epsilon = 10.0;
  std::string out = "-";
};

std::vector<std::string> SplitWords(const std::string& line) {
  std::vector<std::string> words;
  std::istringstream in(line);
  for (std::string w; in >> w;) words.push_back(w);
  return words;
}

absl::Status RunMdp(const GlobalFlags& g, const MdpFlags& f) {
  DEEPCAND_ASSIGN_OR_RETURN(PrivacyBudget budget,
                            PrivacyBudget::Create(f.epsilon));
  DEEPCAND_ASSIGN_OR_RETURN(EmbeddingMatrix embeddings,
                            ReadEmbeddingsFile(f.vocab));
  DEEPCAND_ASSIGN_OR_RETURN(std::string token_text, ReadText(f.tokens));
  std::vector<std::string> tokens;
  std::istringstream token_lines(token_text);
  for (std::string line; std::getline(token_lines, line);) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) tokens.push_back(line);
  }
  DEEPCAND_ASSIGN_OR_RETURN(
      VocabEmbedding vocab,
      VocabEmbedding::Create(std::move(tokens), std::move(embeddings)));
  DEEPCAND_ASSIGN_OR_RETURN(std::string text, ReadText(f.input));
  SeededRng rng(g.seed, "mdp");
  std::istringstream lines(text);
  return WithOutput(f.out, [&](std::ostream& out) -> absl::Status {
    for (std::string line; std::getline(lines, line);) {
      const std::vector<std::string> words = SplitWords(line);
      DEEPCAND_ASSIGN_OR_RETURN(std::vector<std::string> noisy,
                                WordMdp(words, vocab, budget, rng));
      for (size_t i = 0; i < noisy.size(); ++i) {
        out << (i ? " " : "") << noisy[i];
      }
      out << "\n";
    }
    return absl::OkStatus();
  });
}

// ----------------------------------------------------------------- eval

struct EvalFlags {
  std::string public_corpus;
  std::string test;
  std::string validation;
  std::string recoder;
  std::string candidates;
  std::string mechanism = "deep-candidate";
  size_t clusters = 50;
  size_t recoder_epochs = 10;
  size_t m = 5000;
  size_t min_sentences = 8;
  size_t projections = 50;
  std::vector<size_t> projection_grid = {10, 25, 50, 100};
  size_t classifier_epochs = 20;
  double coverage = 0.75;
  std::string width = "per-dim";
  size_t trials = 5;
  std::vector<double> epsilons = {3, 6, 10, 15, 20, 25, 30};
  double epsilon = 10.0;
  std::vector<std::string> buckets = {"4:8", "8:12", "12:21"};
  std::string out = "-";
};

// Everything a sweep needs, trained or loaded once.
struct EvalSetup {
  Corpus test;
  std::optional<Corpus> validation;
  std::vector<int> test_labels;
  std::vector<int> validation_labels;
  size_t r = 0;
  RecoderBundle bundle;
  CandidateSet candidates;
  TruncationBox box;
  WidthMode width = WidthMode::kPerDimension;
  DepthAggregation rule = DepthAggregation::kMin;
  Mlp classifier;    // on the mechanism's public features
  Mlp non_private;   // on plain public means
  bool deep_candidate = true;
  uint64_t seed = 0;
};

absl::StatusOr<Mlp> FitClassifier(const EvalSetup& s, const EvalFlags& f,
                                  const Corpus& pub,
                                  std::span<const int> pub_labels,
                                  const DocumentEncoder& featurize,
                                  std::string_view stream) {
  DEEPCAND_ASSIGN_OR_RETURN(EmbeddingMatrix features, featurize(pub, 1.0, 0));
  ClassifierOptions options;
  options.epochs = f.classifier_epochs;
  SeededRng rng(SeededRng::DeriveSeed(s.seed, "eval"), stream);
  if (!s.validation) {
    return TrainClassifier(features, pub_labels, s.r, options, rng);
  }
  DEEPCAND_ASSIGN_OR_RETURN(EmbeddingMatrix val_features,
                            featurize(*s.validation, 1.0, 0));
  DEEPCAND_ASSIGN_OR_RETURN(
      EpochSelection sel,
      TrainClassifierWithValidation(features, pub_labels, s.r, val_features,
                                    s.validation_labels, options, rng));
  return std::move(sel.model);
}

absl::StatusOr<EvalSetup> PrepareEval(const GlobalFlags& g,
                                      const EvalFlags& f) {
  EvalSetup s;
  if (f.mechanism != "deep-candidate" && f.mechanism != "truncation") {
    return absl::InvalidArgumentError(absl::StrCat(
        "unknown mechanism '", f.mechanism,
        "', expected deep-candidate or truncation"));
  }
  s.deep_candidate = f.mechanism == "deep-candidate";
  DEEPCAND_ASSIGN_OR_RETURN(s.rule, ParseDepthAggregation(g.aggregation));
  DEEPCAND_ASSIGN_OR_RETURN(s.width, ParseWidthMode(f.width));
  DEEPCAND_ASSIGN_OR_RETURN(Corpus pub, LoadCorpus(f.public_corpus));
  DEEPCAND_ASSIGN_OR_RETURN(s.test, LoadCorpus(f.test));
  const std::vector<std::string> labels = pub.index.SortedLabels();
  s.r = labels.size();
  DEEPCAND_ASSIGN_OR_RETURN(std::vector<int> pub_labels,
                            LabelIds(pub.index, labels));
  DEEPCAND_ASSIGN_OR_RETURN(s.test_labels, LabelIds(s.test.index, labels));
  if (!f.validation.empty()) {
    DEEPCAND_ASSIGN_OR_RETURN(s.validation, LoadCorpus(f.validation));
    DEEPCAND_ASSIGN_OR_RETURN(s.validation_labels,
                              LabelIds(s.validation->index, labels));
  }

  if (s.deep_candidate) {
    if (!f.recoder.empty()) {
      DEEPCAND_ASSIGN_OR_RETURN(s.bundle, LoadRecoderBundle(f.recoder));
    } else {
      RecoderOptions options;
      options.n_clusters = f.clusters;
      options.epochs = f.recoder_epochs;
      DEEPCAND_ASSIGN_OR_RETURN(s.bundle, TrainRecoder(pub, options, g.seed));
    }
    if (!f.candidates.empty()) {
      DEEPCAND_ASSIGN_OR_RETURN(s.candidates, LoadCandidateSet(f.candidates));
    } else {
      SeededRng rng(g.seed, "candidates");
      DEEPCAND_ASSIGN_OR_RETURN(
          s.candidates,
          BuildCandidates(pub, f.min_sentences, f.m, rng, &s.bundle));
    }
    if (s.candidates.embeddings.cols() != s.bundle.dim()) {
      return absl::InvalidArgumentError(absl::StrCat(
          "candidates have dim ", s.candidates.embeddings.cols(),
          ", recoder ", s.bundle.dim()));
    }
  }
  s.seed = g.seed;
  DEEPCAND_ASSIGN_OR_RETURN(EmbeddingMatrix pub_means, DocumentMeans(pub));
  DEEPCAND_ASSIGN_OR_RETURN(s.box, FitBox(pub_means, f.coverage));

  const DocumentEncoder features =
      s.deep_candidate ? MeanEncoder(&s.bundle) : ClippedMeanEncoder(&s.box);
  DEEPCAND_ASSIGN_OR_RETURN(
      s.classifier, FitClassifier(s, f, pub, pub_labels, features, "mechanism"));
  DEEPCAND_ASSIGN_OR_RETURN(
      s.non_private, FitClassifier(s, f, pub, pub_labels, MeanEncoder(nullptr),
                                   "non-private"));
  return s;
}

DocumentEncoder MechanismEncoder(const EvalSetup& s, size_t projections) {
  return s.deep_candidate
             ? DeepCandidateEncoder(&s.candidates, &s.bundle, projections,
                                    s.rule)
             : TruncationEncoder(&s.box, s.width);
}

// Projection count for one epsilon: validation-selected when a validation
// corpus is given, else --projections.
absl::StatusOr<size_t> ChooseProjections(const EvalSetup& s,
                                         const EvalFlags& f, double eps,
                                         uint64_t seed) {
  if (!s.deep_candidate || !s.validation) return f.projections;
  return SelectByValidation(
      f.projection_grid, [&](size_t p) -> absl::StatusOr<double> {
        const EvalArm arm{MechanismEncoder(s, p), &s.classifier};
        return ScoreArm(arm, *s.validation, s.validation_labels, s.r, eps,
                        SeededRng::DeriveSeed(seed, "validation"));
      });
}

absl::Status RunSweepEps(const GlobalFlags& g, const EvalFlags& f) {
  if (f.epsilons.empty() || f.trials == 0) {
    return absl::InvalidArgumentError("need epsilons and trials >= 1");
  }
  DEEPCAND_ASSIGN_OR_RETURN(EvalSetup s, PrepareEval(g, f));
  const EvalArm reference{MeanEncoder(nullptr), &s.non_private};
  SweepResult result;
  for (size_t i = 0; i < f.epsilons.size(); ++i) {
    const double eps = f.epsilons[i];
    DEEPCAND_ASSIGN_OR_RETURN(size_t p, ChooseProjections(s, f, eps, g.seed));
    const EvalArm arm{MechanismEncoder(s, p), &s.classifier};
    const double one[] = {eps};
    DEEPCAND_ASSIGN_OR_RETURN(
        SweepResult part,
        SweepEpsilon(s.test, s.test_labels, s.r, arm, one, f.trials, g.seed,
                     i == 0 ? &reference : nullptr));
    for (SweepPoint& point : part.points) {
      result.points.push_back(std::move(point));
    }
  }
  return WithOutput(f.out, [&](std::ostream& out) {
    return WriteSweepCsv(result, out);
  });
}

absl::Status RunSweepK(const GlobalFlags& g, const EvalFlags& f) {
  std::vector<KBucket> buckets;
  for (const std::string& text : f.buckets) {
    DEEPCAND_ASSIGN_OR_RETURN(KBucket b, ParseKBucket(text));
    buckets.push_back(b);
  }
  if (buckets.empty() || f.trials == 0) {
    return absl::InvalidArgumentError("need buckets and trials >= 1");
  }
  DEEPCAND_ASSIGN_OR_RETURN(PrivacyBudget budget,
                            PrivacyBudget::Create(f.epsilon));
  DEEPCAND_ASSIGN_OR_RETURN(EvalSetup s, PrepareEval(g, f));
  DEEPCAND_ASSIGN_OR_RETURN(size_t p,
                            ChooseProjections(s, f, budget.epsilon(), g.seed));
  const EvalArm arm{MechanismEncoder(s, p), &s.classifier};
  DEEPCAND_ASSIGN_OR_RETURN(
      SweepResult result,
      SweepK(s.test, s.test_labels, s.r, arm, buckets, budget.epsilon(),
             f.trials, g.seed));
  return WithOutput(f.out, [&](std::ostream& out) {
    return WriteSweepCsv(result, out);
  });
}

// ------------------------------------------------------------- selftest

absl::Status RunSelftest(const GlobalFlags& g, bool quick, bool skip_utility) {
  const uint64_t seed = g.seed;
  const size_t scale = quick ? 10 : 1;
  AuditSuiteOptions audit;
  audit.seed = seed;
  if (quick) {
    audit.pairs_per_family = 10;
    audit.group_pairs = 5;
  }
  std::vector<std::function<PropertyResult()>> checks = {
      [] { return CheckDeepCandidateTable(kDefaultCandidateCount); },
      [&] { return CheckPrivacyAudit(audit); },
      [&] { return CheckSensitivity(1000 / scale, seed); },
      [&] { return CheckDepthUpperBound(1000 / scale, seed); },
      [&] { return CheckDepthGap(1000 / scale, seed); },
      [&] { return CheckDepthSampling(100000 / scale, seed); },
      [&] { return CheckGradients(20 / scale + 1, seed); },
      [&] { return CheckKMeans(100 / scale, seed); },
      [&] { return CheckLaplaceCalibration(100000, seed); },
      [&] { return CheckShiftInvariance(1000 / scale, seed); },
  };
  if (!skip_utility) {
    checks.push_back([&] {
      UtilityStudyOptions options;
      options.seed = seed;
      if (quick) options.trials = 1;
      return CheckUtilityOrdering(options);
    });
  }
  size_t failed = 0;
  for (const auto& check : checks) {
    const PropertyResult r = check();
    failed += !r.passed;
    std::cout << (r.passed ? "PASS " : "FAIL ") << r.name << ": " << r.detail
              << std::endl;
  }
  if (failed > 0) {
    return absl::InternalError(absl::StrCat(failed, " property checks failed"));
  }
  return absl::OkStatus();
}

// ----------------------------------------------------------------- main

int ReportError(const absl::Status& status) {
  std::cerr << json{{"error",
                     {{"code", absl::StatusCodeToString(status.code())},
                      {"message", std::string(status.message())}}}}
                   .dump()
            << std::endl;
  return 1;
}

int Main(int argc, char** argv) {
  CLI::App app{"Sentence-level private document embeddings."};
  app.option_defaults()->always_capture_default();
  app.require_subcommand(1);
  app.fallthrough();

  GlobalFlags g;
  app.add_option("--seed", g.seed, "Run seed; every output is a function of it");
  app.add_option("--threads", g.threads,
                 "Worker threads; 0 uses DEEPCAND_THREADS or the core count");
  app.add_option("--simd", g.simd, "Kernel variant: auto, scalar, avx2, neon");
  app.add_option("--aggregation", g.aggregation,
                 "Depth aggregation over projections: min or max");

  std::function<absl::Status()> action;

  SynthFlags synth;
  auto* synth_cmd =
      app.add_subcommand("synth", "Write a synthetic topic corpus");
  synth_cmd->add_option("--out", synth.out, "Output corpus prefix")->required();
  synth_cmd->add_option("--docs", synth.options.num_docs, "Documents");
  synth_cmd->add_option("--dim", synth.options.dim, "Embedding dimension");
  synth_cmd->add_option("--topics", synth.options.topics, "Topics (labels)");
  synth_cmd->add_option("--subtopics", synth.options.subtopics,
                        "Subtopics per topic");
  synth_cmd->add_option("--min-sentences", synth.options.min_sentences,
                        "Fewest sentences per document");
  synth_cmd->add_option("--max-sentences", synth.options.max_sentences,
                        "Most sentences per document");
  synth_cmd->add_option("--topic-scale", synth.options.topic_scale,
                        "Topic center spread");
  synth_cmd->add_option("--subtopic-scale", synth.options.subtopic_scale,
                        "Subtopic spread around its topic");
  synth_cmd->add_option("--noise", synth.options.sentence_noise,
                        "Sentence noise around its subtopic");
  synth_cmd->add_option("--world-seed", synth.options.world_seed,
                        "Seed of the topic geometry");
  synth_cmd->add_option("--id-prefix", synth.options.id_prefix,
                        "Document id prefix");
  synth_cmd->callback([&] { action = [&] { return RunSynth(g, synth); }; });

  PrivatizeFlags priv;
  auto* priv_cmd = app.add_subcommand(
      "privatize", "Select one candidate per document (JSON lines)");
  priv_cmd->add_option("--corpus", priv.corpus, "Private corpus prefix")
      ->required();
  priv_cmd->add_option("--candidates", priv.candidates,
                       "Candidate set prefix")
      ->required();
  priv_cmd->add_option("--recoder", priv.recoder,
                       "Recoder bundle directory; empty for none");
  priv_cmd->add_option("--epsilon", priv.epsilon, "Privacy parameter");
  priv_cmd->add_option("--projections", priv.projections,
                       "Random projections p");
  priv_cmd->add_option("--out", priv.out, "Selection records; - is stdout");
  priv_cmd->add_option("--embeddings-out", priv.embeddings_out,
                       "Also write the chosen embeddings as EMB1");
  priv_cmd->callback([&] { action = [&] { return RunPrivatize(g, priv); }; });

  DepthFlags depth;
  auto* depth_cmd = app.add_subcommand(
      "depth", "Approximate depth of each candidate (JSON lines)");
  depth_cmd->add_option("--sentences", depth.sentences,
                        "Sentence embeddings (EMB1)")
      ->required();
  depth_cmd->add_option("--candidates", depth.candidates,
                        "Candidate embeddings (EMB1)")
      ->required();
  depth_cmd->add_option("--projections", depth.projections,
                        "Random projections p");
  depth_cmd->add_flag("--detail", depth.detail,
                      "Include per-projection counts");
  depth_cmd->add_flag("--exact", depth.exact,
                      "Include exact depth (2-dimensional inputs)");
  depth_cmd->callback([&] { action = [&] { return RunDepth(g, depth); }; });

  AuditFlags audit;
  auto* audit_cmd = app.add_subcommand(
      "audit", "Exact log-ratio audit over generated neighbor documents");
  audit_cmd->add_option("--epsilon", audit.epsilon, "Privacy parameter");
  audit_cmd->add_option("--pairs", audit.pairs, "Neighbor pairs");
  audit_cmd->add_option("--group-size", audit.group_size,
                        "Differing sentences a; the bound is a * epsilon");
  audit_cmd->callback([&] { action = [&] { return RunAudit(g, audit); }; });

  size_t table_m = kDefaultCandidateCount;
  auto* table_cmd = app.add_subcommand(
      "table1", "Deep-candidate selection probabilities");
  table_cmd->add_option("--m", table_m, "Candidate count");
  table_cmd->callback([&] { action = [&] { return RunTable1(table_m); }; });

  KMeansFlags km;
  auto* km_cmd = app.add_subcommand("kmeans", "Fit k-means");
  km_cmd->add_option("--embeddings", km.embeddings,
                     "Rows to cluster (EMB1)");
  km_cmd->add_option("--corpus", km.corpus,
                     "Cluster the document means of this corpus instead");
  km_cmd->add_option("--clusters", km.clusters, "Clusters n_c");
  km_cmd->add_option("--max-iters", km.options.max_iters, "Lloyd iterations");
  km_cmd->add_option("--tol", km.options.tol, "Center movement tolerance");
  km_cmd->add_option("--out", km.out, "Model path prefix")->required();
  km_cmd->callback([&] { action = [&] { return RunKMeans(g, km); }; });

  RecoderFlags rec;
  auto* rec_cmd = app.add_subcommand("train-recoder",
                                     "Train the cluster-preserving recoder");
  rec_cmd->add_option("--corpus", rec.corpus, "Public corpus prefix")
      ->required();
  rec_cmd->add_option("--clusters", rec.options.n_clusters, "Clusters n_c");
  rec_cmd->add_option("--epochs", rec.options.epochs, "Training epochs");
  rec_cmd->add_option("--batch-size", rec.options.batch_size,
                      "Documents per batch");
  rec_cmd->add_option("--hidden", rec.options.hidden,
                      "Hidden width; 0 uses the input dimension");
  rec_cmd->add_flag("--identity-init", rec.options.identity_init,
                    "Start the recoder at the identity map");
  rec_cmd->add_option("--learning-rate", rec.options.adam.learning_rate,
                      "Adam step size");
  rec_cmd->add_option("--out", rec.out, "Bundle directory")->required();
  rec_cmd->callback([&] { action = [&] { return RunTrainRecoder(g, rec); }; });

  CandidateFlags cand;
  auto* cand_cmd = app.add_subcommand(
      "candidates", "Build the candidate set from a public corpus");
  cand_cmd->add_option("--corpus", cand.corpus, "Public corpus prefix")
      ->required();
  cand_cmd->add_option("--recoder", cand.recoder,
                       "Recoder bundle directory; empty for plain means");
  cand_cmd->add_option("--m", cand.m, "Candidates");
  cand_cmd->add_option("--min-sentences", cand.min_sentences,
                       "Fewest sentences for a source document");
  cand_cmd->add_option("--out", cand.out, "Candidate set prefix")->required();
  cand_cmd->callback([&] { action = [&] { return RunCandidates(g, cand); }; });

  ClassifierFlags cls;
  auto* cls_cmd = app.add_subcommand(
      "train-classifier", "Train a label classifier on document means");
  cls_cmd->add_option("--corpus", cls.corpus, "Training corpus prefix")
      ->required();
  cls_cmd->add_option("--validation", cls.validation,
                      "Validation corpus prefix; selects the epoch");
  cls_cmd->add_option("--recoder", cls.recoder,
                      "Recoder bundle directory; empty for plain means");
  cls_cmd->add_option("--epochs", cls.options.epochs, "Training epochs");
  cls_cmd->add_option("--batch-size", cls.options.batch_size,
                      "Documents per batch");
  cls_cmd->add_option("--hidden", cls.options.hidden,
                      "Hidden width; 0 uses the input dimension");
  cls_cmd->add_option("--learning-rate", cls.options.adam.learning_rate,
                      "Adam step size");
  cls_cmd->add_option("--out", cls.out,
                      "Model path prefix; labels go to <out>.labels.json")
      ->required();
  cls_cmd->callback([&] { action = [&] { return RunTrainClassifier(g, cls); }; });

  auto* base_cmd = app.add_subcommand("baseline", "Baseline mechanisms");
  base_cmd->require_subcommand(1);
  TruncationFlags trunc;
  auto* trunc_cmd = base_cmd->add_subcommand(
      "truncation", "Clipped mean plus Laplace noise (EMB1 output)");
  trunc_cmd->add_option("--corpus", trunc.corpus, "Private corpus prefix")
      ->required();
  trunc_cmd->add_option("--public", trunc.public_corpus,
                        "Public corpus prefix for the box")
      ->required();
  trunc_cmd->add_option("--coverage", trunc.coverage,
                        "Central quantile range per dimension");
  trunc_cmd->add_option("--width", trunc.width,
                        "Noise width: per-dim or max");
  trunc_cmd->add_option("--epsilon", trunc.epsilon, "Privacy parameter");
  trunc_cmd->add_option("--out", trunc.out, "Output EMB1 path")->required();
  trunc_cmd->callback(
      [&] { action = [&] { return RunTruncation(g, trunc); }; });

  MdpFlags mdp;
  auto* mdp_cmd = base_cmd->add_subcommand(
      "mdp", "Word-level metric-DP token replacement");
  mdp_cmd->add_option("--vocab", mdp.vocab, "Vocabulary embeddings (EMB1)")
      ->required();
  mdp_cmd->add_option("--tokens", mdp.tokens, "Token list, one per line")
      ->required();
  mdp_cmd->add_option("--input", mdp.input,
                      "Whitespace-tokenized text; - is stdin");
  mdp_cmd->add_option("--epsilon", mdp.epsilon, "Privacy parameter");
  mdp_cmd->add_option("--out", mdp.out, "Output text; - is stdout");
  mdp_cmd->callback([&] { action = [&] { return RunMdp(g, mdp); }; });

  auto* eval_cmd = app.add_subcommand(
      "eval", "Utility sweeps; CSV columns axis,trial,score,mean,std");
  eval_cmd->require_subcommand(1);
  EvalFlags ev;
  auto add_eval_common = [&](CLI::App* cmd) {
    cmd->add_option("--public", ev.public_corpus, "Public corpus prefix")
        ->required();
    cmd->add_option("--test", ev.test, "Test corpus prefix")->required();
    cmd->add_option("--validation", ev.validation,
                    "Validation corpus prefix; selects p and epochs");
    cmd->add_option("--mechanism", ev.mechanism,
                    "deep-candidate or truncation");
    cmd->add_option("--recoder", ev.recoder,
                    "Recoder bundle directory; empty trains one");
    cmd->add_option("--candidates", ev.candidates,
                    "Candidate set prefix; empty builds one");
    cmd->add_option("--clusters", ev.clusters, "Recoder clusters n_c");
    cmd->add_option("--recoder-epochs", ev.recoder_epochs, "Recoder epochs");
    cmd->add_option("--m", ev.m, "Candidates");
    cmd->add_option("--min-sentences", ev.min_sentences,
                    "Fewest sentences for a candidate source");
    cmd->add_option("--projections", ev.projections,
                    "Projections p without a validation corpus");
    cmd->add_option("--projection-grid", ev.projection_grid,
                    "Validation grid for p")
        ->delimiter(',');
    cmd->add_option("--classifier-epochs", ev.classifier_epochs,
                    "Classifier epochs (upper bound with validation)");
    cmd->add_option("--coverage", ev.coverage, "Truncation box coverage");
    cmd->add_option("--width", ev.width, "Truncation width: per-dim or max");
    cmd->add_option("--trials", ev.trials, "Trials per axis point");
    cmd->add_option("--out", ev.out, "CSV output; - is stdout");
  };
  auto* eps_cmd = eval_cmd->add_subcommand(
      "sweep-eps", "Score versus epsilon, with a non-private first row");
  add_eval_common(eps_cmd);
  eps_cmd->add_option("--epsilons", ev.epsilons, "Epsilon grid")
      ->delimiter(',');
  eps_cmd->callback([&] { action = [&] { return RunSweepEps(g, ev); }; });
  auto* k_cmd = eval_cmd->add_subcommand(
      "sweep-k", "Score versus sentence count at a fixed epsilon");
  add_eval_common(k_cmd);
  k_cmd->add_option("--epsilon", ev.epsilon, "Privacy parameter");
  k_cmd->add_option("--buckets", ev.buckets,
                    "Half-open sentence-count ranges lo:hi")
      ->delimiter(',');
  k_cmd->callback([&] { action = [&] { return RunSweepK(g, ev); }; });

  bool quick = false;
  bool skip_utility = false;
  auto* self_cmd =
      app.add_subcommand("selftest", "Run the property suites (PASS/FAIL)");
  self_cmd->add_flag("--quick", quick, "Smaller sample sizes");
  self_cmd->add_flag("--skip-utility", skip_utility,
                     "Skip the synthetic utility study");
  self_cmd->callback([&] {
    action = [&] { return RunSelftest(g, quick, skip_utility); };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  if (absl::Status s = ApplyGlobals(g); !s.ok()) return ReportError(s);
  if (!action) return 2;
  if (absl::Status s = action(); !s.ok()) return ReportError(s);
  return 0;
}

}  // namespace
}  // namespace deepcand

int main(int argc, char** argv) { return deepcand::Main(argc, argv); }
