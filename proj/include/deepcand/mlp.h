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

#ifndef DEEPCAND_MLP_H_
#define DEEPCAND_MLP_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "absl/status/statusor.h"
#include "deepcand/matrix.h"
#include "deepcand/rng.h"

namespace deepcand {

// Stack of affine layers with a rectifier after every layer except the last.
// dims = {input, hidden..., output}; layer l maps dims[l] -> dims[l + 1].
// All parameters live in one contiguous buffer: for each layer, the
// dims[l+1] x dims[l] row-major weight matrix followed by its bias.
class Mlp {
 public:
  Mlp() = default;

  // Weights and biases uniform in +-1/sqrt(fan_in).
  static absl::StatusOr<Mlp> Create(std::vector<size_t> dims, SeededRng& rng);
  static absl::StatusOr<Mlp> Zeros(std::vector<size_t> dims);
  // in -> hidden -> hidden -> hidden -> out. hidden = 0 means hidden = in.
  static absl::StatusOr<Mlp> FourLayer(size_t in, size_t out, SeededRng& rng,
                                       size_t hidden = 0);
  // Single affine map, no rectifier.
  static absl::StatusOr<Mlp> Linear(size_t in, size_t out, SeededRng& rng);
  // dim -> 2dim -> 2dim -> 2dim -> dim computing relu(x) - relu(-x) = x.
  static absl::StatusOr<Mlp> Identity(size_t dim);

  const std::vector<size_t>& dims() const { return dims_; }
  size_t num_layers() const { return dims_.empty() ? 0 : dims_.size() - 1; }
  size_t input_dim() const { return dims_.front(); }
  size_t output_dim() const { return dims_.back(); }
  size_t num_parameters() const { return parameters_.size(); }

  std::span<double> parameters() { return parameters_; }
  std::span<const double> parameters() const { return parameters_; }

  // Offsets into parameters() for layer l.
  size_t weight_offset(size_t layer) const { return weight_offsets_[layer]; }
  size_t bias_offset(size_t layer) const {
    return weight_offsets_[layer] + dims_[layer + 1] * dims_[layer];
  }
  std::span<double> weights(size_t layer);
  std::span<const double> weights(size_t layer) const;
  std::span<double> bias(size_t layer);
  std::span<const double> bias(size_t layer) const;

 private:
  explicit Mlp(std::vector<size_t> dims);
  std::vector<size_t> dims_;
  std::vector<size_t> weight_offsets_;
  std::vector<double> parameters_;
};

// activations[0] is the input batch; activations[l + 1] is layer l's output
// (after the rectifier for hidden layers). The last entry holds the logits.
struct ForwardCache {
  std::vector<EmbeddingMatrix> activations;
  const EmbeddingMatrix& output() const { return activations.back(); }
};

absl::StatusOr<ForwardCache> Forward(const Mlp& model, ConstMatrixView batch);
absl::StatusOr<EmbeddingMatrix> Predict(const Mlp& model,
                                        ConstMatrixView batch);
// Row-wise argmax of the logits, lowest index on ties.
absl::StatusOr<std::vector<int>> PredictClasses(const Mlp& model,
                                                ConstMatrixView batch);

// Back-propagates dLoss/dOutput. Parameter gradients are added into
// `parameter_grads` (length num_parameters()); returns dLoss/dInput.
absl::StatusOr<EmbeddingMatrix> BackwardFromOutput(
    const Mlp& model, const ForwardCache& cache, ConstMatrixView output_grad,
    std::span<double> parameter_grads);

std::vector<double> Softmax(std::span<const double> logits);

struct CrossEntropy {
  double loss = 0.0;            // mean over the batch
  EmbeddingMatrix logit_grad;   // (softmax - onehot) / batch
};
absl::StatusOr<CrossEntropy> SoftmaxCrossEntropy(ConstMatrixView logits,
                                                 std::span<const int> targets);

// Gradient of the mean cross-entropy with respect to every parameter.
absl::StatusOr<std::vector<double>> Backward(const Mlp& model,
                                             const ForwardCache& cache,
                                             std::span<const int> targets);
absl::StatusOr<double> MeanCrossEntropy(const Mlp& model, ConstMatrixView batch,
                                        std::span<const int> targets);

struct AdamOptions {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct AdamState {
  AdamOptions options;
  std::vector<double> first_moment;
  std::vector<double> second_moment;
  uint64_t step = 0;

  static AdamState Create(size_t num_parameters,
                          const AdamOptions& options = {});
};

struct ParameterBlock {
  std::span<double> parameters;
  std::span<const double> gradients;
};

// One bias-corrected Adam step over the concatenation of `blocks`. The step
// counter advances once, so several models can share one optimizer.
absl::Status AdamStep(std::span<const ParameterBlock> blocks, AdamState& state);
absl::Status AdamStep(Mlp& model, std::span<const double> gradients,
                      AdamState& state);

// |analytic - numeric| / max(|analytic| + |numeric|, 1e-6). The floor keeps
// finite-difference round-off on near-zero gradients from dominating.
double GradientRelativeError(double analytic, double numeric);

// Max relative error of `analytic` against central differences
// (L(theta + h e_i) - L(theta - h e_i)) / 2h of `loss`.
double GradientCheck(
    const std::function<double(std::span<const double>)>& loss,
    std::span<const double> parameters, std::span<const double> analytic,
    double h);

// GradientCheck of Backward() against MeanCrossEntropy().
absl::StatusOr<double> GradientCheck(const Mlp& model, ConstMatrixView batch,
                                     std::span<const int> targets, double h);

}  // namespace deepcand

#endif  // DEEPCAND_MLP_H_
