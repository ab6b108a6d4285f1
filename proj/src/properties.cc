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

#include "deepcand/properties.h"

#include <algorithm>
#include <cmath>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "deepcand/baselines.h"
#include "deepcand/evalkit.h"
#include "deepcand/kmeans.h"
#include "deepcand/mechanism.h"
#include "deepcand/mlp.h"
#include "deepcand/pipeline.h"
#include "deepcand/sampling.h"
#include "deepcand/synthetic.h"
#include "deepcand/status_macros.h"
#include "deepcand/tukey.h"

namespace deepcand {
namespace {

PropertyResult Fail(std::string name, const absl::Status& status) {
  return {std::move(name), false,
          absl::StrCat("error: ", std::string(status.message()))};
}

EmbeddingMatrix Gaussian(SeededRng& rng, size_t rows, size_t cols,
                         double scale = 1.0) {
  EmbeddingMatrix m(rows, cols);
  for (double& v : m.values()) v = scale * rng.Gaussian();
  return m;
}

PrivacyBudget Budget(double eps) { return *PrivacyBudget::Create(eps); }

// Smallest |pre-activation| over the rectified layers for `batch`.
double MinAbsPreactivation(const Mlp& model, const EmbeddingMatrix& batch) {
  const ForwardCache cache = *Forward(model, batch);
  double smallest = INFINITY;
  for (size_t l = 0; l + 1 < model.num_layers(); ++l) {
    const size_t in = model.dims()[l], out = model.dims()[l + 1];
    const auto w = model.weights(l);
    const auto b = model.bias(l);
    const EmbeddingMatrix& a = cache.activations[l];
    for (size_t r = 0; r < a.rows(); ++r) {
      for (size_t o = 0; o < out; ++o) {
        double z = b[o];
        for (size_t i = 0; i < in; ++i) z += w[o * in + i] * a(r, i);
        smallest = std::min(smallest, std::fabs(z));
      }
    }
  }
  return smallest;
}

}  // namespace

PropertyResult CheckDeepCandidateTable(size_t m) {
  const std::string name = "deep-candidate table";
  double worst_gap = 0.0, lowest = 1.0;
  std::string rows;
  for (const DeepCandidateCondition& row : kDeepCandidateConditions) {
    auto pr = CheckTable1(m, row.b, row.jstar, Budget(row.epsilon));
    if (!pr.ok()) return Fail(name, pr.status());
    // Direct sum over the m candidates: b at depth j*, the rest at 0.
    double deep = 0.0, total = 0.0;
    for (size_t i = 0; i < m; ++i) {
      const double w = i < row.b ? std::exp(row.epsilon * row.jstar / 2.0) : 1.0;
      total += w;
      if (i < row.b) deep += w;
    }
    worst_gap = std::max(worst_gap, std::fabs(*pr - deep / total));
    lowest = std::min(lowest, *pr);
    absl::StrAppendFormat(&rows, " eps=%g:%.5f", row.epsilon, *pr);
  }
  const bool ok = lowest >= 0.95 && worst_gap <= 1e-12;
  return {name, ok,
          absl::StrFormat("min=%.5f direct-sum gap=%.1e;%s", lowest, worst_gap,
                          rows)};
}

std::string_view PairFamilyName(PairFamily family) {
  switch (family) {
    case PairFamily::kRandom:
      return "random";
    case PairFamily::kExtreme:
      return "extreme";
    case PairFamily::kTieHeavy:
      return "tie-heavy";
  }
  return "unknown";
}

std::vector<NeighborPair> GenerateNeighborPairs(size_t count,
                                                size_t differing_rows,
                                                uint64_t seed) {
  SeededRng rng(seed, "neighbor-pairs");
  const size_t a = std::max<size_t>(differing_rows, 1);
  std::vector<NeighborPair> pairs;
  pairs.reserve(count);
  for (size_t t = 0; t < count; ++t) {
    NeighborPair pair;
    pair.family = static_cast<PairFamily>(t % 3);
    pair.differing_rows = a;
    const size_t d = 2 + rng.UniformIndex(4);
    const size_t k = a + 2 + rng.UniformIndex(10);
    const size_t m = 10 + rng.UniformIndex(30);
    pair.projections = 1 + rng.UniformIndex(30);
    pair.projection_seed = rng.NextU64();
    const std::vector<size_t> rows = *SampleWithoutReplacement(rng, k, a);
    if (pair.family == PairFamily::kTieHeavy) {
      const EmbeddingMatrix pool = Gaussian(rng, 3, d);
      pair.x = EmbeddingMatrix(k, d);
      for (size_t i = 0; i < k; ++i) {
        const auto src = pool.row(rng.UniformIndex(3));
        std::copy(src.begin(), src.end(), pair.x.row(i).begin());
      }
      pair.candidates = Gaussian(rng, m, d, 0.7);
      for (size_t i = 0; i < 3; ++i) {
        std::copy(pool.row(i).begin(), pool.row(i).end(),
                  pair.candidates.row(i).begin());
      }
      pair.x_prime = pair.x;
      for (size_t r : rows) {
        const auto src = pool.row(rng.UniformIndex(3));
        auto dst = pair.x_prime.row(r);
        std::copy(src.begin(), src.end(), dst.begin());
        // Same pool point: shift off the pool so the row still differs.
        if (std::equal(src.begin(), src.end(), pair.x.row(r).begin())) {
          for (double& v : dst) v += 1.0;
        }
      }
    } else {
      pair.x = Gaussian(rng, k, d);
      pair.candidates = Gaussian(rng, m, d, 0.7);
      pair.x_prime = pair.x;
      for (size_t r : rows) {
        const double sign = rng.Uniform() < 0.5 ? -1.0 : 1.0;
        for (double& v : pair.x_prime.row(r)) {
          v = pair.family == PairFamily::kRandom ? rng.Gaussian()
                                                 : v * sign * 1e6;
        }
      }
    }
    pairs.push_back(std::move(pair));
  }
  return pairs;
}

PropertyResult CheckPrivacyAudit(const AuditSuiteOptions& options) {
  const std::string name = "privacy audit";
  const DepthAggregation rules[] = {DepthAggregation::kMin,
                                    DepthAggregation::kMax};
  const std::vector<NeighborPair> pairs =
      GenerateNeighborPairs(3 * options.pairs_per_family, 1, options.seed);
  const std::vector<NeighborPair> groups =
      GenerateNeighborPairs(options.group_pairs, 2, options.seed + 1);
  size_t audits = 0;
  double worst_excess = -INFINITY;  // max(ratio - a * eps)
  double worst_group = -INFINITY;
  double worst_fraction = 0.0;      // max ratio / (a * eps)
  for (const auto* set : {&pairs, &groups}) {
    for (const NeighborPair& pair : *set) {
      const double a = static_cast<double>(pair.differing_rows);
      for (double eps : options.epsilons) {
        for (DepthAggregation rule : rules) {
          auto ratio =
              pair.differing_rows == 1
                  ? AuditPair(pair.x, pair.x_prime, pair.candidates,
                              Budget(eps), pair.projections,
                              pair.projection_seed, rule)
                  : AuditGroup(pair.x, pair.x_prime, pair.differing_rows,
                               pair.candidates, Budget(eps), pair.projections,
                               pair.projection_seed, rule);
          if (!ratio.ok()) return Fail(name, ratio.status());
          ++audits;
          double& worst = set == &pairs ? worst_excess : worst_group;
          worst = std::max(worst, *ratio - a * eps);
          worst_fraction = std::max(worst_fraction, *ratio / (a * eps));
        }
      }
    }
  }
  const bool ok = worst_excess <= 1e-9 && worst_group <= 1e-9;
  return {name, ok,
          absl::StrFormat("%d pairs + %d group pairs, %d audits; "
                          "max ratio/(a eps)=%.6f, max(ratio-eps)=%.3g, "
                          "group a=2 max(ratio-2eps)=%.3g",
                          pairs.size(), groups.size(), audits, worst_fraction,
                          worst_excess, worst_group)};
}

PropertyResult CheckSensitivity(size_t triples, uint64_t seed) {
  const std::string name = "utility sensitivity";
  SeededRng rng(seed, "sensitivity");
  size_t checked = 0, violations = 0;
  int largest = 0;
  while (checked < triples) {
    const size_t d = 2 + rng.UniformIndex(5);
    const size_t k = 1 + rng.UniformIndex(15);
    const EmbeddingMatrix x = Gaussian(rng, k, d);
    EmbeddingMatrix y = x;
    const size_t row = rng.UniformIndex(k);
    const double scale = rng.Uniform() < 0.2 ? 1e4 : 1.0;
    for (double& v : y.row(row)) v = scale * rng.Gaussian();
    const EmbeddingMatrix cands = Gaussian(rng, 8, d, 0.5);
    auto v = SampleUnitSphere(rng, d, 1 + rng.UniformIndex(20));
    if (!v.ok()) return Fail(name, v.status());
    for (DepthAggregation rule :
         {DepthAggregation::kMin, DepthAggregation::kMax}) {
      auto ux = ApproxDepthUtilities(cands, x, *v, rule);
      auto uy = ApproxDepthUtilities(cands, y, *v, rule);
      if (!ux.ok()) return Fail(name, ux.status());
      if (!uy.ok()) return Fail(name, uy.status());
      for (size_t i = 0; i < cands.rows(); ++i) {
        const int diff = std::abs((*ux)[i] - (*uy)[i]);
        largest = std::max(largest, diff);
        violations += diff > 1;
      }
    }
    checked += cands.rows();
  }
  return {name, violations == 0,
          absl::StrFormat("%d triples x 2 rules, max |du|=%d, violations=%d",
                          checked, largest, violations)};
}

PropertyResult CheckDepthUpperBound(size_t instances, uint64_t seed) {
  const std::string name = "depth upper bound";
  SeededRng rng(seed, "depth-bound");
  size_t violations = 0, checks = 0;
  for (size_t t = 0; t < instances; ++t) {
    const size_t n = 3 + rng.UniformIndex(40);
    const EmbeddingMatrix pts = Gaussian(rng, n, 2);
    const EmbeddingMatrix cand = Gaussian(rng, 1, 2, 1.5);
    auto exact = ExactDepth2d(cand.row(0), pts);
    if (!exact.ok()) return Fail(name, exact.status());
    for (size_t p : {1, 5, 25}) {
      auto v = SampleUnitSphere(rng, 2, p);
      auto approx = ApproxDepthUtilities(cand, pts, *v);
      if (!approx.ok()) return Fail(name, approx.status());
      ++checks;
      violations += (*approx)[0] < *exact;
    }
  }
  return {name, violations == 0 && instances > 0,
          absl::StrFormat("%d instances, %d comparisons, %d below exact",
                          instances, checks, violations)};
}

PropertyResult CheckDepthGap(size_t instances, uint64_t seed) {
  const std::string name = "depth gap at p=200";
  SeededRng rng(seed, "depth-gap");
  size_t exact_hits = 0, deep = 0;
  for (size_t t = 0; t < instances; ++t) {
    const EmbeddingMatrix pts = Gaussian(rng, 50, 2);
    const EmbeddingMatrix cand = Gaussian(rng, 1, 2);
    auto exact = ExactDepth2d(cand.row(0), pts);
    auto v = SampleUnitSphere(rng, 2, 200);
    auto approx = ApproxDepthUtilities(cand, pts, *v);
    if (!exact.ok()) return Fail(name, exact.status());
    if (!approx.ok()) return Fail(name, approx.status());
    exact_hits += (*approx)[0] == *exact;
    deep += *exact > 0;
  }
  const double rate = static_cast<double>(exact_hits) / instances;
  return {name, rate >= 0.90,
          absl::StrFormat("gap 0 on %.3f of %d instances (%d with exact "
                          "depth > 0)",
                          rate, instances, deep)};
}

PropertyResult CheckDepthSampling(size_t draws, uint64_t seed) {
  const std::string name = "depth sampling distribution";
  SeededRng rng(seed, "depth-sampling");
  const size_t m = 100, k = 8, p = 10, d = 3;
  const EmbeddingMatrix sents = Gaussian(rng, k, d);
  const EmbeddingMatrix cands = Gaussian(rng, m, d, 0.6);
  const PrivacyBudget budget = Budget(2.0);
  auto mech = DepthSelectionMechanism::FromSeed(cands, budget, p, seed);
  if (!mech.ok()) return Fail(name, mech.status());
  auto dist = mech->Distribution(sents);
  if (!dist.ok()) return Fail(name, dist.status());
  const int max_depth = static_cast<int>(k / 2);
  auto hist = DepthHistogram::FromDepths(dist->utilities, max_depth);
  if (!hist.ok()) return Fail(name, hist.status());
  auto expected = DepthSamplingDistribution(*hist, budget);
  if (!expected.ok()) return Fail(name, expected.status());

  std::vector<double> freq(max_depth + 1, 0.0);
  SeededRng draw_rng(seed, "selection");
  for (size_t i = 0; i < draws; ++i) {
    auto chosen = SampleCategorical(draw_rng, dist->probabilities);
    if (!chosen.ok()) return Fail(name, chosen.status());
    freq[dist->utilities[*chosen]] += 1.0 / static_cast<double>(draws);
  }
  double tv = 0.0;
  for (int j = 0; j <= max_depth; ++j) {
    tv += 0.5 * std::fabs(freq[j] - (*expected)[j]);
  }
  return {name, tv <= 0.01,
          absl::StrFormat("m=%d k=%d p=%d eps=2, %d draws, TV=%.5f", m, k, p,
                          draws, tv)};
}

PropertyResult CheckGradients(size_t models, uint64_t seed) {
  const std::string name = "gradient check";
  constexpr double kStep = 1e-5;
  // Central differences are only valid away from rectifier kinks.
  constexpr double kKinkMargin = 10 * kStep;
  SeededRng rng(seed, "gradients");
  double worst = 0.0;
  size_t redrawn = 0;
  for (size_t t = 0; t < models; ++t) {
    const size_t in = 2 + rng.UniformIndex(5);
    const size_t out = 2 + rng.UniformIndex(4);
    const size_t hidden = 2 + rng.UniformIndex(6);
    auto model = Mlp::FourLayer(in, out, rng, hidden);
    if (!model.ok()) return Fail(name, model.status());
    const size_t batch = 1 + rng.UniformIndex(6);
    EmbeddingMatrix x = Gaussian(rng, batch, in);
    while (MinAbsPreactivation(*model, x) < kKinkMargin) {
      ++redrawn;
      x = Gaussian(rng, batch, in);
    }
    std::vector<int> y(batch);
    for (int& v : y) v = static_cast<int>(rng.UniformIndex(out));
    auto err = GradientCheck(*model, x, y, kStep);
    if (!err.ok()) return Fail(name, err.status());
    worst = std::max(worst, *err);
  }
  return {name, worst <= 1e-4,
          absl::StrFormat("%d models, max relative error %.2e (%d batches "
                          "redrawn within %.0e of a kink)",
                          models, worst, redrawn, kKinkMargin)};
}

PropertyResult CheckKMeans(size_t instances, uint64_t seed) {
  const std::string name = "k-means";
  SeededRng rng(seed, "kmeans-suite");
  size_t rises = 0;
  double worst_rise = 0.0;
  for (size_t t = 0; t < instances; ++t) {
    const size_t n = 10 + rng.UniformIndex(90);
    const size_t d = 1 + rng.UniformIndex(5);
    const size_t c = 1 + rng.UniformIndex(std::min<size_t>(8, n));
    const EmbeddingMatrix pts = Gaussian(rng, n, d);
    auto model = FitKMeans(pts, c, rng);
    if (!model.ok()) return Fail(name, model.status());
    const auto& h = model->inertia_history;
    for (size_t i = 1; i < h.size(); ++i) {
      worst_rise = std::max(worst_rise, h[i] - h[i - 1]);
      rises += h[i] > h[i - 1] + 1e-9;
    }
  }
  const EmbeddingMatrix fixture =
      *EmbeddingMatrix::FromRows({{0, 0}, {0, 2}, {10, 0}, {10, 2}});
  SeededRng fixture_rng(seed, "kmeans-fixture");
  auto model = FitKMeans(fixture, 2, fixture_rng);
  if (!model.ok()) return Fail(name, model.status());
  std::vector<std::vector<double>> centers;
  for (size_t i = 0; i < 2; ++i) {
    centers.emplace_back(model->centers.row(i).begin(),
                         model->centers.row(i).end());
  }
  std::sort(centers.begin(), centers.end());
  const bool fixture_ok =
      centers == std::vector<std::vector<double>>{{0, 1}, {10, 1}} &&
      model->inertia == 4.0;
  return {name, rises == 0 && fixture_ok,
          absl::StrFormat("%d instances, %d rises (max %.2e); fixture "
                          "centers (%g,%g),(%g,%g) inertia %g",
                          instances, rises, worst_rise, centers[0][0],
                          centers[0][1], centers[1][0], centers[1][1],
                          model->inertia)};
}

PropertyResult CheckLaplaceCalibration(size_t draws, uint64_t seed) {
  const std::string name = "laplace calibration";
  SeededRng rng(seed, "laplace-suite");
  // Plain sampler.
  const double b = 0.7;
  double sum = 0.0, sq = 0.0;
  for (size_t i = 0; i < draws; ++i) {
    auto x = SampleLaplace(rng, b);
    if (!x.ok()) return Fail(name, x.status());
    sum += *x;
    sq += *x * *x;
  }
  const double n = static_cast<double>(draws);
  const double mean = sum / n;
  double worst = std::fabs(std::sqrt(sq / n - mean * mean) /
                               (std::sqrt(2.0) * b) - 1.0);

  // Truncation noise per dimension around a fixed document.
  TruncationBox box{{-1.0, 0.0, 2.0}, {1.0, 0.5, 2.0}};
  const EmbeddingMatrix doc = *EmbeddingMatrix::FromRows(
      {{0.2, 3.0, 1.0}, {-5.0, 0.1, 2.5}, {0.4, 0.2, 2.0}, {0.0, -1.0, 9.0}});
  const PrivacyBudget budget = Budget(3.0);
  const auto pre = ClippedMean(doc, box);
  if (!pre.ok()) return Fail(name, pre.status());
  const auto scales =
      TruncationNoiseScales(box, doc.rows(), budget, WidthMode::kPerDimension);
  std::vector<double> s1(3, 0.0), s2(3, 0.0);
  bool zero_width_exact = true;
  for (size_t i = 0; i < draws; ++i) {
    auto z = TruncationMechanism(doc, box, budget, rng);
    if (!z.ok()) return Fail(name, z.status());
    for (size_t j = 0; j < 3; ++j) {
      const double e = (*z)[j] - (*pre)[j];
      s1[j] += e;
      s2[j] += e * e;
    }
    zero_width_exact &= (*z)[2] == 2.0;
  }
  for (size_t j = 0; j < 2; ++j) {
    const double m = s1[j] / n;
    const double sd = std::sqrt(s2[j] / n - m * m);
    worst = std::max(worst, std::fabs(sd / (std::sqrt(2.0) * scales[j]) - 1.0));
  }

  // Pre-noise means of random documents, outliers included, stay inside.
  size_t outside = 0;
  for (size_t t = 0; t < 1000; ++t) {
    const size_t k = 1 + rng.UniformIndex(12);
    EmbeddingMatrix sents = Gaussian(rng, k, 3, rng.Uniform() < 0.3 ? 50 : 1);
    auto mean_in = ClippedMean(sents, box);
    if (!mean_in.ok()) return Fail(name, mean_in.status());
    for (size_t j = 0; j < 3; ++j) {
      outside += (*mean_in)[j] < box.lower[j] || (*mean_in)[j] > box.upper[j];
    }
  }
  const bool ok = worst <= 0.02 && outside == 0 && zero_width_exact;
  return {name, ok,
          absl::StrFormat("%d draws, max |sd/(sqrt2 b)-1|=%.4f; pre-noise "
                          "outside box: %d; zero-width dim noiseless: %s",
                          draws, worst, outside,
                          zero_width_exact ? "yes" : "no")};
}

PropertyResult CheckShiftInvariance(size_t trials, uint64_t seed) {
  const std::string name = "shift invariance";
  SeededRng rng(seed, "shift");
  double worst = 0.0;
  for (size_t t = 0; t < trials; ++t) {
    const size_t m = 1 + rng.UniformIndex(200);
    const int k = 1 + static_cast<int>(rng.UniformIndex(40));
    std::vector<double> u(m), shifted(m);
    // Integer depths in [0, k/2] against the appendix form in [-k/2, 0].
    for (size_t i = 0; i < m; ++i) {
      u[i] = static_cast<double>(rng.UniformIndex(k / 2 + 1));
      shifted[i] = u[i] - k / 2;
    }
    const double eps = 0.1 + 30.0 * rng.Uniform();
    auto p = ExponentialMechanismProbabilities(u, 1.0, Budget(eps));
    auto q = ExponentialMechanismProbabilities(shifted, 1.0, Budget(eps));
    if (!p.ok()) return Fail(name, p.status());
    if (!q.ok()) return Fail(name, q.status());
    double tv = 0.0;
    for (size_t i = 0; i < m; ++i) tv += 0.5 * std::fabs((*p)[i] - (*q)[i]);
    worst = std::max(worst, tv);
  }
  return {name, worst <= 1e-12,
          absl::StrFormat("%d trials, max TV=%.2e", trials, worst)};
}

absl::StatusOr<UtilityStudy> RunUtilityStudy(
    const UtilityStudyOptions& options) {
  SyntheticOptions world;
  world.dim = options.dim;
  world.world_seed = options.seed;
  SyntheticOptions pub = world, test = world, val = world;
  pub.num_docs = options.public_docs;
  pub.seed = SeededRng::DeriveSeed(options.seed, "public");
  pub.id_prefix = "pub";
  test.num_docs = options.test_docs;
  test.seed = SeededRng::DeriveSeed(options.seed, "test");
  test.id_prefix = "test";
  val.num_docs = options.validation_docs;
  val.seed = SeededRng::DeriveSeed(options.seed, "validation");
  val.id_prefix = "val";
  DEEPCAND_ASSIGN_OR_RETURN(Corpus pub_corpus, GenerateTopicCorpus(pub));
  DEEPCAND_ASSIGN_OR_RETURN(Corpus test_corpus, GenerateTopicCorpus(test));
  DEEPCAND_ASSIGN_OR_RETURN(Corpus val_corpus, GenerateTopicCorpus(val));
  const size_t r = world.topics;
  const std::vector<int> pub_labels = pub_corpus.index.ClassIds();
  const std::vector<int> test_labels = test_corpus.index.ClassIds();
  const std::vector<int> val_labels = val_corpus.index.ClassIds();

  RecoderOptions recoder_options;
  recoder_options.n_clusters = options.n_clusters;
  recoder_options.epochs = options.recoder_epochs;
  DEEPCAND_ASSIGN_OR_RETURN(
      RecoderBundle bundle,
      TrainRecoder(pub_corpus, recoder_options, options.seed));
  SeededRng cand_rng(options.seed, "candidates");
  DEEPCAND_ASSIGN_OR_RETURN(
      CandidateSet candidates,
      BuildCandidates(pub_corpus, options.min_sentences, options.candidates,
                      cand_rng, &bundle));

  const ClassifierOptions classifier_options;
  DEEPCAND_ASSIGN_OR_RETURN(EmbeddingMatrix recoded,
                            DocumentMeans(pub_corpus, &bundle));
  SeededRng dc_rng(options.seed, "classifier-dc");
  DEEPCAND_ASSIGN_OR_RETURN(
      Mlp c_dc,
      TrainClassifier(recoded, pub_labels, r, classifier_options, dc_rng));

  DEEPCAND_ASSIGN_OR_RETURN(EmbeddingMatrix plain, DocumentMeans(pub_corpus));
  DEEPCAND_ASSIGN_OR_RETURN(TruncationBox box, FitBox(plain));
  DEEPCAND_ASSIGN_OR_RETURN(EmbeddingMatrix clipped,
                            ClippedMeanEncoder(&box)(pub_corpus, 1.0, 0));
  SeededRng trunc_rng(options.seed, "classifier-trunc");
  DEEPCAND_ASSIGN_OR_RETURN(
      Mlp c_trunc,
      TrainClassifier(clipped, pub_labels, r, classifier_options, trunc_rng));
  SeededRng np_rng(options.seed, "classifier-nonpriv");
  DEEPCAND_ASSIGN_OR_RETURN(
      Mlp c_np, TrainClassifier(plain, pub_labels, r, classifier_options, np_rng));

  UtilityStudy study;
  const uint64_t eval_seed = SeededRng::DeriveSeed(options.seed, "eval");
  DEEPCAND_ASSIGN_OR_RETURN(
      study.projections,
      SelectByValidation(
          options.projection_grid, [&](size_t p) -> absl::StatusOr<double> {
            const EvalArm arm{DeepCandidateEncoder(&candidates, &bundle, p,
                                                   DepthAggregation::kMin),
                              &c_dc};
            return ScoreArm(arm, val_corpus, val_labels, r, options.epsilon,
                            SeededRng::DeriveSeed(eval_seed, "validation"));
          }));

  const EvalArm dc{DeepCandidateEncoder(&candidates, &bundle,
                                        study.projections,
                                        DepthAggregation::kMin),
                   &c_dc};
  const EvalArm trunc{TruncationEncoder(&box, WidthMode::kPerDimension),
                      &c_trunc};
  const EvalArm np{MeanEncoder(nullptr), &c_np};
  const double eps[] = {options.epsilon};
  DEEPCAND_ASSIGN_OR_RETURN(
      SweepResult dc_sweep,
      SweepEpsilon(test_corpus, test_labels, r, dc, eps, options.trials,
                   eval_seed, &np));
  DEEPCAND_ASSIGN_OR_RETURN(
      SweepResult trunc_sweep,
      SweepEpsilon(test_corpus, test_labels, r, trunc, eps, options.trials,
                   eval_seed));
  study.non_private = dc_sweep.points[0].mean;
  study.deep_candidate = dc_sweep.points[1].mean;
  study.truncation = trunc_sweep.points[0].mean;
  DEEPCAND_ASSIGN_OR_RETURN(std::vector<double> fractions,
                            LabelFractions(test_labels, r));
  DEEPCAND_ASSIGN_OR_RETURN(study.random_guess, RandomGuessScore(fractions));

  const KBucket buckets[] = {{4, 8}, {8, 12}, {12, 21}};
  DEEPCAND_ASSIGN_OR_RETURN(
      SweepResult k_sweep,
      SweepK(test_corpus, test_labels, r, dc, buckets, options.epsilon,
             options.trials, eval_seed));
  for (const SweepPoint& p : k_sweep.points) {
    if (p.empty) {
      return absl::FailedPreconditionError(
          absl::StrCat("k bucket ", p.axis, " has no test documents"));
    }
    study.bucket_names.push_back(p.axis);
    study.bucket_means.push_back(p.mean);
  }
  return study;
}

PropertyResult CheckUtilityOrdering(const UtilityStudyOptions& options) {
  const std::string name = "desk-scale utility ordering";
  auto study = RunUtilityStudy(options);
  if (!study.ok()) return Fail(name, study.status());
  bool monotone = true;
  std::string buckets;
  for (size_t i = 0; i < study->bucket_means.size(); ++i) {
    if (i > 0) monotone &= study->bucket_means[i] >= study->bucket_means[i - 1];
    absl::StrAppendFormat(&buckets, " %s=%.3f", study->bucket_names[i],
                          study->bucket_means[i]);
  }
  const bool ok = study->deep_candidate > study->truncation &&
                  study->deep_candidate > study->random_guess && monotone;
  return {name, ok,
          absl::StrFormat("eps=%g p=%d: deep-candidate=%.3f truncation=%.3f "
                          "random-guess=%.3f (non-private %.3f); k buckets:%s",
                          options.epsilon, study->projections,
                          study->deep_candidate, study->truncation,
                          study->random_guess, study->non_private, buckets)};
}

}  // namespace deepcand
