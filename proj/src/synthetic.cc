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

#include "deepcand/synthetic.h"

#include <vector>

#include "absl/strings/str_cat.h"
#include "deepcand/rng.h"
#include "deepcand/status_macros.h"

namespace deepcand {

absl::StatusOr<Corpus> GenerateTopicCorpus(const SyntheticOptions& options) {
  if (options.dim == 0 || options.topics == 0 || options.subtopics == 0) {
    return absl::InvalidArgumentError("dim, topics and subtopics must be >= 1");
  }
  if (options.min_sentences == 0 ||
      options.min_sentences > options.max_sentences) {
    return absl::InvalidArgumentError(
        "need 1 <= min_sentences <= max_sentences");
  }
  const size_t d = options.dim;
  SeededRng world(options.world_seed, "synthetic-world");
  std::vector<EmbeddingMatrix> centers;
  for (size_t t = 0; t < options.topics; ++t) {
    std::vector<double> topic(d);
    for (double& v : topic) v = options.topic_scale * world.Gaussian();
    EmbeddingMatrix sub(options.subtopics, d);
    for (size_t s = 0; s < options.subtopics; ++s) {
      for (size_t j = 0; j < d; ++j) {
        sub(s, j) = topic[j] + options.subtopic_scale * world.Gaussian();
      }
    }
    centers.push_back(std::move(sub));
  }

  SeededRng rng(options.seed, "synthetic-docs");
  const size_t k_range = options.max_sentences - options.min_sentences + 1;
  EmbeddingMatrix sentences(0, d);
  std::vector<CorpusEntry> entries;
  std::vector<double> row(d);
  for (size_t i = 0; i < options.num_docs; ++i) {
    const size_t topic = rng.UniformIndex(options.topics);
    const size_t sub = rng.UniformIndex(options.subtopics);
    const size_t k = options.min_sentences + rng.UniformIndex(k_range);
    entries.push_back({absl::StrCat(options.id_prefix, i),
                       absl::StrCat("topic", topic), sentences.rows(), k});
    for (size_t s = 0; s < k; ++s) {
      for (size_t j = 0; j < d; ++j) {
        row[j] = centers[topic](sub, j) +
                 options.sentence_noise * rng.Gaussian();
      }
      sentences.AppendRow(row);
    }
  }
  DEEPCAND_ASSIGN_OR_RETURN(CorpusIndex index,
                            CorpusIndex::Create(std::move(entries)));
  return MakeCorpus(std::move(sentences), std::move(index));
}

}  // namespace deepcand
