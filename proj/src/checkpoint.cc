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

#include "deepcand/checkpoint.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "absl/strings/str_cat.h"
#include "deepcand/status_macros.h"
#include "deepcand/store.h"
#include "json.hpp"

namespace deepcand {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr int kManifestVersion = 1;

absl::Status WriteJson(const json& j, const std::string& path) {
  std::ofstream out(path);
  if (!out) return absl::NotFoundError(absl::StrCat("cannot write ", path));
  out << j.dump(2) << '\n';
  if (!out) return absl::DataLossError(absl::StrCat("failed writing ", path));
  return absl::OkStatus();
}

absl::StatusOr<json> ReadJson(const std::string& path) {
  std::ifstream in(path);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open ", path));
  std::stringstream buffer;
  buffer << in.rdbuf();
  json j = json::parse(buffer.str(), nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded() || !j.is_object()) {
    return absl::InvalidArgumentError(
        absl::StrCat(path, ": not a JSON object"));
  }
  return j;
}

std::string Basename(const std::string& path) {
  return fs::path(path).filename().string();
}

std::string Sibling(const std::string& manifest, const std::string& name) {
  return (fs::path(manifest).parent_path() / name).string();
}

// Runs `fn` and turns nlohmann type or key errors into a status.
template <typename Fn>
auto Guarded(const std::string& path, Fn fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const json::exception& e) {
    return absl::InvalidArgumentError(
        absl::StrCat(path, ": malformed manifest: ", e.what()));
  }
}

absl::Status CheckFormat(const json& j, const std::string& path,
                         const char* format) {
  if (j.value("format", "") != format ||
      j.value("version", 0) != kManifestVersion) {
    return absl::InvalidArgumentError(absl::StrCat(
        path, ": expected format ", format, " version ", kManifestVersion));
  }
  return absl::OkStatus();
}

}  // namespace

absl::Status SaveMlp(const Mlp& model, const std::string& path) {
  json layers = json::array();
  for (size_t l = 0; l < model.num_layers(); ++l) {
    const size_t in = model.dims()[l];
    const size_t out = model.dims()[l + 1];
    EmbeddingMatrix block(out, in + 1);
    const auto w = model.weights(l);
    const auto b = model.bias(l);
    for (size_t o = 0; o < out; ++o) {
      for (size_t i = 0; i < in; ++i) block(o, i) = w[o * in + i];
      block(o, in) = b[o];
    }
    const std::string file = absl::StrCat(path, ".layer", l, ".emb");
    DEEPCAND_RETURN_IF_ERROR(WriteEmbeddingsFile(block, file));
    layers.push_back(Basename(file));
  }
  const json manifest = {{"format", "deepcand-mlp"},
                         {"version", kManifestVersion},
                         {"activation", "relu"},
                         {"dims", model.dims()},
                         {"layers", layers}};
  return WriteJson(manifest, path);
}

absl::StatusOr<Mlp> LoadMlp(const std::string& path) {
  DEEPCAND_ASSIGN_OR_RETURN(json j, ReadJson(path));
  DEEPCAND_RETURN_IF_ERROR(CheckFormat(j, path, "deepcand-mlp"));
  return Guarded(path, [&]() -> absl::StatusOr<Mlp> {
    const auto dims = j.at("dims").get<std::vector<size_t>>();
    const auto files = j.at("layers").get<std::vector<std::string>>();
    DEEPCAND_ASSIGN_OR_RETURN(Mlp model, Mlp::Zeros(dims));
    if (files.size() != model.num_layers()) {
      return absl::InvalidArgumentError(
          absl::StrCat(path, ": ", files.size(), " layer files for ",
                       model.num_layers(), " layers"));
    }
    for (size_t l = 0; l < model.num_layers(); ++l) {
      const size_t in = dims[l];
      const size_t out = dims[l + 1];
      DEEPCAND_ASSIGN_OR_RETURN(EmbeddingMatrix block,
                                ReadEmbeddingsFile(Sibling(path, files[l])));
      if (block.rows() != out || block.cols() != in + 1) {
        return absl::InvalidArgumentError(absl::StrCat(
            files[l], ": expected ", out, "x", in + 1, ", got ", block.rows(),
            "x", block.cols()));
      }
      auto w = model.weights(l);
      auto b = model.bias(l);
      for (size_t o = 0; o < out; ++o) {
        for (size_t i = 0; i < in; ++i) w[o * in + i] = block(o, i);
        b[o] = block(o, in);
      }
    }
    return model;
  });
}

absl::Status SaveKMeans(const KMeansModel& model, const std::string& path) {
  const std::string centers = absl::StrCat(path, ".centers.emb");
  DEEPCAND_RETURN_IF_ERROR(WriteEmbeddingsFile(model.centers, centers));
  const json manifest = {{"format", "deepcand-kmeans"},
                         {"version", kManifestVersion},
                         {"n_clusters", model.n_clusters},
                         {"inertia", model.inertia},
                         {"iterations", model.iterations},
                         {"centers", Basename(centers)}};
  return WriteJson(manifest, path);
}

absl::StatusOr<KMeansModel> LoadKMeans(const std::string& path) {
  DEEPCAND_ASSIGN_OR_RETURN(json j, ReadJson(path));
  DEEPCAND_RETURN_IF_ERROR(CheckFormat(j, path, "deepcand-kmeans"));
  return Guarded(path, [&]() -> absl::StatusOr<KMeansModel> {
    KMeansModel model;
    model.n_clusters = j.at("n_clusters").get<size_t>();
    model.inertia = j.at("inertia").get<double>();
    model.iterations = j.at("iterations").get<size_t>();
    DEEPCAND_ASSIGN_OR_RETURN(
        model.centers,
        ReadEmbeddingsFile(Sibling(path, j.at("centers").get<std::string>())));
    if (model.centers.rows() != model.n_clusters || model.n_clusters == 0) {
      return absl::InvalidArgumentError(absl::StrCat(
          path, ": ", model.centers.rows(), " centers for n_clusters ",
          model.n_clusters));
    }
    return model;
  });
}

absl::Status SaveRecoderBundle(const RecoderBundle& bundle,
                               const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    return absl::NotFoundError(
        absl::StrCat("cannot create ", dir, ": ", ec.message()));
  }
  const fs::path root(dir);
  DEEPCAND_RETURN_IF_ERROR(
      SaveMlp(bundle.recoder, (root / "recoder.json").string()));
  DEEPCAND_RETURN_IF_ERROR(SaveMlp(bundle.head, (root / "head.json").string()));
  DEEPCAND_RETURN_IF_ERROR(
      SaveKMeans(bundle.kmeans, (root / "kmeans.json").string()));
  const json manifest = {{"format", "deepcand-recoder"},
                         {"version", kManifestVersion},
                         {"epochs", bundle.epochs},
                         {"seed", bundle.seed},
                         {"loss_history", bundle.loss_history},
                         {"recoder", "recoder.json"},
                         {"head", "head.json"},
                         {"kmeans", "kmeans.json"}};
  return WriteJson(manifest, (root / "bundle.json").string());
}

absl::StatusOr<RecoderBundle> LoadRecoderBundle(const std::string& dir) {
  const std::string path = (fs::path(dir) / "bundle.json").string();
  DEEPCAND_ASSIGN_OR_RETURN(json j, ReadJson(path));
  DEEPCAND_RETURN_IF_ERROR(CheckFormat(j, path, "deepcand-recoder"));
  return Guarded(path, [&]() -> absl::StatusOr<RecoderBundle> {
    RecoderBundle bundle;
    bundle.epochs = j.at("epochs").get<size_t>();
    bundle.seed = j.at("seed").get<uint64_t>();
    bundle.loss_history = j.at("loss_history").get<std::vector<double>>();
    DEEPCAND_ASSIGN_OR_RETURN(
        bundle.recoder, LoadMlp(Sibling(path, j.at("recoder").get<std::string>())));
    DEEPCAND_ASSIGN_OR_RETURN(
        bundle.head, LoadMlp(Sibling(path, j.at("head").get<std::string>())));
    DEEPCAND_ASSIGN_OR_RETURN(
        bundle.kmeans,
        LoadKMeans(Sibling(path, j.at("kmeans").get<std::string>())));
    const size_t d = bundle.recoder.output_dim();
    if (bundle.recoder.input_dim() != d || bundle.head.input_dim() != d ||
        bundle.kmeans.centers.cols() != d ||
        bundle.head.output_dim() != bundle.kmeans.n_clusters) {
      return absl::InvalidArgumentError(
          absl::StrCat(path, ": recoder, head and k-means shapes disagree"));
    }
    return bundle;
  });
}

absl::Status SaveCandidateSet(const CandidateSet& candidates,
                              const std::string& prefix) {
  if (candidates.source_doc_ids.size() != candidates.size()) {
    return absl::InvalidArgumentError("one source id per candidate required");
  }
  DEEPCAND_RETURN_IF_ERROR(
      WriteEmbeddingsFile(candidates.embeddings, absl::StrCat(prefix, ".emb")));
  return WriteJson(json{{"source_doc_ids", candidates.source_doc_ids}},
                   absl::StrCat(prefix, ".ids.json"));
}

absl::StatusOr<CandidateSet> LoadCandidateSet(const std::string& prefix) {
  CandidateSet out;
  DEEPCAND_ASSIGN_OR_RETURN(out.embeddings,
                            ReadEmbeddingsFile(absl::StrCat(prefix, ".emb")));
  const std::string ids = absl::StrCat(prefix, ".ids.json");
  DEEPCAND_ASSIGN_OR_RETURN(json j, ReadJson(ids));
  DEEPCAND_RETURN_IF_ERROR(Guarded(ids, [&]() -> absl::Status {
    out.source_doc_ids = j.at("source_doc_ids").get<std::vector<std::string>>();
    return absl::OkStatus();
  }));
  if (out.source_doc_ids.size() != out.size() || out.size() == 0) {
    return absl::InvalidArgumentError(absl::StrCat(
        ids, ": ", out.source_doc_ids.size(), " ids for ", out.size(),
        " candidate rows"));
  }
  return out;
}

}  // namespace deepcand
