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

#ifndef DEEPCAND_SYNTHETIC_H_
#define DEEPCAND_SYNTHETIC_H_

#include <cstddef>
#include <cstdint>
#include <string>

#include "absl/status/statusor.h"
#include "deepcand/store.h"

namespace deepcand {

// Gaussian-mixture topic corpus. Each topic owns `subtopics` centers; a
// document picks a topic and one of its subtopics, then draws k sentences
// around that center. Draws the "world" (centers) from world_seed and the
// documents from seed, so several corpora can share one world.
struct SyntheticOptions {
  size_t num_docs = 500;
  size_t dim = 32;
  size_t topics = 4;
  size_t subtopics = 3;
  // k is uniform on [min_sentences, max_sentences].
  size_t min_sentences = 4;
  size_t max_sentences = 20;
  // Per-coordinate standard deviations.
  double topic_scale = 1.0;
  double subtopic_scale = 0.5;
  double sentence_noise = 2.0;
  uint64_t world_seed = 1;
  uint64_t seed = 1;
  std::string id_prefix = "doc";
};

// Labels are "topic<t>"; doc ids are id_prefix + running number.
absl::StatusOr<Corpus> GenerateTopicCorpus(const SyntheticOptions& options);

}  // namespace deepcand

#endif  // DEEPCAND_SYNTHETIC_H_
