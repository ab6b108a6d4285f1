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

#include "deepcand/mlp.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "absl/strings/str_cat.h"
#include "deepcand/parallel.h"
#include "deepcand/simd/kernels.h"
#include "deepcand/status_macros.h"

namespace deepcand {
namespace {

absl::Status CheckDims(const std::vector<size_t>& dims) {
  if (dims.size() < 2) {
    return absl::InvalidArgumentError("an MLP needs at least one layer");
  }
  for (size_t d : dims) {
    if (d == 0) return absl::InvalidArgumentError("layer widths must be >= 1");
  }
  return absl::OkStatus();
}

}  // namespace

Mlp::Mlp(std::vector<size_t> dims) : dims_(std::move(dims)) {
  size_t offset = 0;
  for (size_t l = 0; l + 1 < dims_.size(); ++l) {
    weight_offsets_.push_back(offset);
    offset += dims_[l + 1] * dims_[l] + dims_[l + 1];
  }
  parameters_.assign(offset, 0.0);
}

absl::StatusOr<Mlp> Mlp::Zeros(std::vector<size_t> dims) {
  DEEPCAND_RETURN_IF_ERROR(CheckDims(dims));
  return Mlp(std::move(dims));
}

absl::StatusOr<Mlp> Mlp::Create(std::vector<size_t> dims, SeededRng& rng) {
  DEEPCAND_ASSIGN_OR_RETURN(Mlp model, Zeros(std::move(dims)));
  for (size_t l = 0; l < model.num_layers(); ++l) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(model.dims_[l]));
    for (double& w : model.weights(l)) w = bound * (2.0 * rng.Uniform() - 1.0);
    for (double& b : model.bias(l)) b = bound * (2.0 * rng.Uniform() - 1.0);
  }
  return model;
}

absl::StatusOr<Mlp> Mlp::FourLayer(size_t in, size_t out, SeededRng& rng,
                                   size_t hidden) {
  if (hidden == 0) hidden = in;
  return Create({in, hidden, hidden, hidden, out}, rng);
}

absl::StatusOr<Mlp> Mlp::Linear(size_t in, size_t out, SeededRng& rng) {
  return Create({in, out}, rng);
}

absl::StatusOr<Mlp> Mlp::Identity(size_t dim) {
  DEEPCAND_ASSIGN_OR_RETURN(Mlp model,
                            Zeros({dim, 2 * dim, 2 * dim, 2 * dim, dim}));
  // [I; -I] splits x into relu(x) and relu(-x).
  auto w0 = model.weights(0);
  for (size_t i = 0; i < dim; ++i) {
    w0[i * dim + i] = 1.0;
    w0[(dim + i) * dim + i] = -1.0;
  }
  for (size_t l = 1; l <= 2; ++l) {
    auto w = model.weights(l);
    for (size_t i = 0; i < 2 * dim; ++i) w[i * 2 * dim + i] = 1.0;
  }
  // [I, -I] recombines them.
  auto w3 = model.weights(3);
  for (size_t i = 0; i < dim; ++i) {
    w3[i * 2 * dim + i] = 1.0;
    w3[i * 2 * dim + dim + i] = -1.0;
  }
  return model;
}

std::span<double> Mlp::weights(size_t layer) {
  return {parameters_.data() + weight_offsets_[layer],
          dims_[layer + 1] * dims_[layer]};
}
std::span<const double> Mlp::weights(size_t layer) const {
  return {parameters_.data() + weight_offsets_[layer],
          dims_[layer + 1] * dims_[layer]};
}
std::span<double> Mlp::bias(size_t layer) {
  return {parameters_.data() + bias_offset(layer), dims_[layer + 1]};
}
std::span<const double> Mlp::bias(size_t layer) const {
  return {parameters_.data() + bias_offset(layer), dims_[layer + 1]};
}

absl::StatusOr<ForwardCache> Forward(const Mlp& model, ConstMatrixView batch) {
  if (model.num_layers() == 0) return absl::FailedPreconditionError("empty MLP");
  if (batch.cols() != model.input_dim()) {
    return absl::InvalidArgumentError(
        absl::StrCat("MLP expects input dim ", model.input_dim(), ", got ",
                     batch.cols()));
  }
  ForwardCache cache;
  cache.activations.reserve(model.num_layers() + 1);
  cache.activations.push_back(EmbeddingMatrix::Copy(batch));
  for (size_t l = 0; l < model.num_layers(); ++l) {
    const size_t in = model.dims()[l];
    const size_t out = model.dims()[l + 1];
    const bool rectify = l + 1 < model.num_layers();
    const EmbeddingMatrix& x = cache.activations.back();
    EmbeddingMatrix y(batch.rows(), out);
    const auto w = model.weights(l);
    const auto b = model.bias(l);
    ParallelFor(batch.rows(), [&](size_t r) {
      const auto xr = x.row(r);
      auto yr = y.row(r);
      for (size_t o = 0; o < out; ++o) {
        double z = simd::Dot(w.subspan(o * in, in), xr) + b[o];
        yr[o] = rectify ? std::max(z, 0.0) : z;
      }
    });
    cache.activations.push_back(std::move(y));
  }
  return cache;
}

absl::StatusOr<EmbeddingMatrix> Predict(const Mlp& model,
                                        ConstMatrixView batch) {
  DEEPCAND_ASSIGN_OR_RETURN(ForwardCache cache, Forward(model, batch));
  return std::move(cache.activations.back());
}

absl::StatusOr<std::vector<int>> PredictClasses(const Mlp& model,
                                                ConstMatrixView batch) {
  DEEPCAND_ASSIGN_OR_RETURN(EmbeddingMatrix logits, Predict(model, batch));
  std::vector<int> classes(logits.rows());
  for (size_t r = 0; r < logits.rows(); ++r) {
    const auto row = logits.row(r);
    classes[r] =
        static_cast<int>(std::max_element(row.begin(), row.end()) - row.begin());
  }
  return classes;
}

absl::StatusOr<EmbeddingMatrix> BackwardFromOutput(
    const Mlp& model, const ForwardCache& cache, ConstMatrixView output_grad,
    std::span<double> parameter_grads) {
  if (cache.activations.size() != model.num_layers() + 1) {
    return absl::FailedPreconditionError("forward cache does not match model");
  }
  if (parameter_grads.size() != model.num_parameters()) {
    return absl::InvalidArgumentError("gradient buffer has the wrong size");
  }
  const size_t batch = cache.activations.front().rows();
  if (output_grad.rows() != batch || output_grad.cols() != model.output_dim()) {
    return absl::InvalidArgumentError("output gradient has the wrong shape");
  }
  EmbeddingMatrix upstream = EmbeddingMatrix::Copy(output_grad);
  for (size_t l = model.num_layers(); l-- > 0;) {
    const size_t in = model.dims()[l];
    const size_t out = model.dims()[l + 1];
    const EmbeddingMatrix& x = cache.activations[l];
    const EmbeddingMatrix& y = cache.activations[l + 1];
    if (l + 1 < model.num_layers()) {
      // Rectifier: y > 0 exactly where the pre-activation was positive.
      for (size_t r = 0; r < batch; ++r) {
        auto g = upstream.row(r);
        const auto yr = y.row(r);
        for (size_t o = 0; o < out; ++o) {
          if (!(yr[o] > 0.0)) g[o] = 0.0;
        }
      }
    }
    auto w_grad = parameter_grads.subspan(model.weight_offset(l), out * in);
    auto b_grad = parameter_grads.subspan(model.bias_offset(l), out);
    const auto w = model.weights(l);
    EmbeddingMatrix downstream(batch, in);
    for (size_t r = 0; r < batch; ++r) {
      const auto g = upstream.row(r);
      const auto xr = x.row(r);
      auto dr = downstream.row(r);
      for (size_t o = 0; o < out; ++o) {
        if (g[o] == 0.0) continue;
        simd::Axpy(g[o], xr, w_grad.subspan(o * in, in));
        b_grad[o] += g[o];
        simd::Axpy(g[o], w.subspan(o * in, in), dr);
      }
    }
    upstream = std::move(downstream);
  }
  return upstream;
}

std::vector<double> Softmax(std::span<const double> logits) {
  double max = -std::numeric_limits<double>::infinity();
  for (double v : logits) max = std::max(max, v);
  std::vector<double> out(logits.size());
  double sum = 0.0;
  for (size_t i = 0; i < logits.size(); ++i) {
    out[i] = std::exp(logits[i] - max);
    sum += out[i];
  }
  for (double& v : out) v /= sum;
  return out;
}

absl::StatusOr<CrossEntropy> SoftmaxCrossEntropy(
    ConstMatrixView logits, std::span<const int> targets) {
  if (logits.rows() != targets.size()) {
    return absl::InvalidArgumentError(
        absl::StrCat(logits.rows(), " logit rows but ", targets.size(),
                     " targets"));
  }
  if (logits.rows() == 0) return absl::InvalidArgumentError("empty batch");
  const double inv_batch = 1.0 / static_cast<double>(logits.rows());
  CrossEntropy ce;
  ce.logit_grad = EmbeddingMatrix(logits.rows(), logits.cols());
  for (size_t r = 0; r < logits.rows(); ++r) {
    const int t = targets[r];
    if (t < 0 || static_cast<size_t>(t) >= logits.cols()) {
      return absl::OutOfRangeError(
          absl::StrCat("label ", t, " outside [0, ", logits.cols(), ")"));
    }
    const auto row = logits.row(r);
    const double log_norm = [&] {
      double max = *std::max_element(row.begin(), row.end());
      double sum = 0.0;
      for (double v : row) sum += std::exp(v - max);
      return max + std::log(sum);
    }();
    ce.loss += (log_norm - row[t]) * inv_batch;
    auto g = ce.logit_grad.row(r);
    for (size_t c = 0; c < row.size(); ++c) {
      g[c] = std::exp(row[c] - log_norm) * inv_batch;
    }
    g[t] -= inv_batch;
  }
  return ce;
}

absl::StatusOr<std::vector<double>> Backward(const Mlp& model,
                                             const ForwardCache& cache,
                                             std::span<const int> targets) {
  DEEPCAND_ASSIGN_OR_RETURN(CrossEntropy ce,
                            SoftmaxCrossEntropy(cache.output(), targets));
  std::vector<double> grads(model.num_parameters(), 0.0);
  DEEPCAND_RETURN_IF_ERROR(
      BackwardFromOutput(model, cache, ce.logit_grad, grads).status());
  return grads;
}

absl::StatusOr<double> MeanCrossEntropy(const Mlp& model, ConstMatrixView batch,
                                        std::span<const int> targets) {
  DEEPCAND_ASSIGN_OR_RETURN(EmbeddingMatrix logits, Predict(model, batch));
  DEEPCAND_ASSIGN_OR_RETURN(CrossEntropy ce,
                            SoftmaxCrossEntropy(logits, targets));
  return ce.loss;
}

AdamState AdamState::Create(size_t num_parameters,
                            const AdamOptions& options) {
  AdamState state;
  state.options = options;
  state.first_moment.assign(num_parameters, 0.0);
  state.second_moment.assign(num_parameters, 0.0);
  return state;
}

absl::Status AdamStep(std::span<const ParameterBlock> blocks,
                      AdamState& state) {
  size_t total = 0;
  for (const ParameterBlock& b : blocks) {
    if (b.parameters.size() != b.gradients.size()) {
      return absl::InvalidArgumentError("parameter/gradient size mismatch");
    }
    total += b.parameters.size();
  }
  if (total != state.first_moment.size()) {
    return absl::InvalidArgumentError(
        absl::StrCat("optimizer holds ", state.first_moment.size(),
                     " moments, blocks carry ", total, " parameters"));
  }
  const AdamOptions& o = state.options;
  ++state.step;
  const double t = static_cast<double>(state.step);
  const double correction1 = 1.0 - std::pow(o.beta1, t);
  const double correction2 = 1.0 - std::pow(o.beta2, t);
  size_t k = 0;
  for (const ParameterBlock& b : blocks) {
    for (size_t i = 0; i < b.parameters.size(); ++i, ++k) {
      const double g = b.gradients[i];
      double& m = state.first_moment[k];
      double& v = state.second_moment[k];
      m = o.beta1 * m + (1.0 - o.beta1) * g;
      v = o.beta2 * v + (1.0 - o.beta2) * g * g;
      const double m_hat = m / correction1;
      const double v_hat = v / correction2;
      b.parameters[i] -= o.learning_rate * m_hat / (std::sqrt(v_hat) + o.epsilon);
    }
  }
  return absl::OkStatus();
}

absl::Status AdamStep(Mlp& model, std::span<const double> gradients,
                      AdamState& state) {
  const ParameterBlock block{model.parameters(), gradients};
  return AdamStep(std::span<const ParameterBlock>(&block, 1), state);
}

double GradientRelativeError(double analytic, double numeric) {
  return std::fabs(analytic - numeric) /
         std::max(std::fabs(analytic) + std::fabs(numeric), 1e-6);
}

double GradientCheck(
    const std::function<double(std::span<const double>)>& loss,
    std::span<const double> parameters, std::span<const double> analytic,
    double h) {
  std::vector<double> theta(parameters.begin(), parameters.end());
  double worst = 0.0;
  for (size_t i = 0; i < theta.size(); ++i) {
    const double saved = theta[i];
    theta[i] = saved + h;
    const double up = loss(theta);
    theta[i] = saved - h;
    const double down = loss(theta);
    theta[i] = saved;
    const double numeric = (up - down) / (2.0 * h);
    worst = std::max(worst, GradientRelativeError(analytic[i], numeric));
  }
  return worst;
}

absl::StatusOr<double> GradientCheck(const Mlp& model, ConstMatrixView batch,
                                     std::span<const int> targets, double h) {
  DEEPCAND_ASSIGN_OR_RETURN(ForwardCache cache, Forward(model, batch));
  DEEPCAND_ASSIGN_OR_RETURN(std::vector<double> analytic,
                            Backward(model, cache, targets));
  Mlp probe = model;
  absl::Status failure;
  auto loss = [&](std::span<const double> theta) {
    std::copy(theta.begin(), theta.end(), probe.parameters().begin());
    auto l = MeanCrossEntropy(probe, batch, targets);
    if (!l.ok()) {
      failure = l.status();
      return 0.0;
    }
    return *l;
  };
  const double worst = GradientCheck(loss, model.parameters(), analytic, h);
  if (!failure.ok()) return failure;
  return worst;
}

}  // namespace deepcand
