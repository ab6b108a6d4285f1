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

#ifndef DEEPCAND_CHECKPOINT_H_
#define DEEPCAND_CHECKPOINT_H_

#include <string>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "deepcand/kmeans.h"
#include "deepcand/mlp.h"
#include "deepcand/pipeline.h"

namespace deepcand {

// Model files are JSON manifests next to EMB1 payloads. Payload paths in a
// manifest are relative to the manifest's directory. Parameters are stored
// as binary32, so a reloaded model equals the saved one rounded to float.

// Manifest at `path`; layer l in "<path>.layer<l>.emb" as an
// out x (in + 1) matrix whose last column is the bias.
absl::Status SaveMlp(const Mlp& model, const std::string& path);
absl::StatusOr<Mlp> LoadMlp(const std::string& path);

// Sidecar {n_clusters, inertia, iterations, centers} at `path`; centers in
// "<path>.centers.emb".
absl::Status SaveKMeans(const KMeansModel& model, const std::string& path);
absl::StatusOr<KMeansModel> LoadKMeans(const std::string& path);

// Directory holding bundle.json, recoder.json, head.json and kmeans.json
// plus their payloads. The directory is created if missing.
absl::Status SaveRecoderBundle(const RecoderBundle& bundle,
                               const std::string& dir);
absl::StatusOr<RecoderBundle> LoadRecoderBundle(const std::string& dir);

// "<prefix>.emb" with the embeddings and "<prefix>.ids.json" with
// {"source_doc_ids": [...]}.
absl::Status SaveCandidateSet(const CandidateSet& candidates,
                              const std::string& prefix);
absl::StatusOr<CandidateSet> LoadCandidateSet(const std::string& prefix);

}  // namespace deepcand

#endif  // DEEPCAND_CHECKPOINT_H_
