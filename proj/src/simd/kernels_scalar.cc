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

#include "deepcand/simd/kernel_table.h"

namespace deepcand::simd {
namespace {

double DotScalar(const double* a, const double* b, size_t n) {
  double lane[4] = {0.0, 0.0, 0.0, 0.0};
  const size_t blocked = n & ~size_t{3};
  for (size_t i = 0; i < blocked; i += 4) {
    for (size_t l = 0; l < 4; ++l) lane[l] += a[i + l] * b[i + l];
  }
  double total = (lane[0] + lane[1]) + (lane[2] + lane[3]);
  for (size_t i = blocked; i < n; ++i) total += a[i] * b[i];
  return total;
}

double SquaredDistanceScalar(const double* a, const double* b, size_t n) {
  double lane[4] = {0.0, 0.0, 0.0, 0.0};
  const size_t blocked = n & ~size_t{3};
  for (size_t i = 0; i < blocked; i += 4) {
    for (size_t l = 0; l < 4; ++l) {
      const double d = a[i + l] - b[i + l];
      lane[l] += d * d;
    }
  }
  double total = (lane[0] + lane[1]) + (lane[2] + lane[3]);
  for (size_t i = blocked; i < n; ++i) {
    const double d = a[i] - b[i];
    total += d * d;
  }
  return total;
}

size_t CountGreaterEqualScalar(const double* values, size_t n,
                               double threshold) {
  size_t count = 0;
  for (size_t i = 0; i < n; ++i) count += values[i] >= threshold ? 1 : 0;
  return count;
}

void AxpyScalar(double alpha, const double* x, double* y, size_t n) {
  for (size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

constexpr KernelTable kScalar = {Isa::kScalar, "scalar", DotScalar,
                                 SquaredDistanceScalar,
                                 CountGreaterEqualScalar, AxpyScalar};

}  // namespace

const KernelTable& ScalarKernels() { return kScalar; }

}  // namespace deepcand::simd
