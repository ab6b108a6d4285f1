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

// Built with -mavx2 only (no -mfma): multiplies and adds stay separate
// roundings, matching the scalar reference.
#include <immintrin.h>

#include "deepcand/simd/kernel_table.h"

namespace deepcand::simd {
namespace {

double CombineLanes(__m256d acc) {
  alignas(32) double lane[4];
  _mm256_store_pd(lane, acc);
  return (lane[0] + lane[1]) + (lane[2] + lane[3]);
}

double DotAvx2(const double* a, const double* b, size_t n) {
  __m256d acc = _mm256_setzero_pd();
  const size_t blocked = n & ~size_t{3};
  for (size_t i = 0; i < blocked; i += 4) {
    const __m256d prod =
        _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
    acc = _mm256_add_pd(acc, prod);
  }
  double total = CombineLanes(acc);
  for (size_t i = blocked; i < n; ++i) total += a[i] * b[i];
  return total;
}

double SquaredDistanceAvx2(const double* a, const double* b, size_t n) {
  __m256d acc = _mm256_setzero_pd();
  const size_t blocked = n & ~size_t{3};
  for (size_t i = 0; i < blocked; i += 4) {
    const __m256d d =
        _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
    acc = _mm256_add_pd(acc, _mm256_mul_pd(d, d));
  }
  double total = CombineLanes(acc);
  for (size_t i = blocked; i < n; ++i) {
    const double d = a[i] - b[i];
    total += d * d;
  }
  return total;
}

size_t CountGreaterEqualAvx2(const double* values, size_t n, double threshold) {
  const __m256d t = _mm256_set1_pd(threshold);
  size_t count = 0;
  size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const int m0 = _mm256_movemask_pd(
        _mm256_cmp_pd(_mm256_loadu_pd(values + i), t, _CMP_GE_OQ));
    const int m1 = _mm256_movemask_pd(
        _mm256_cmp_pd(_mm256_loadu_pd(values + i + 4), t, _CMP_GE_OQ));
    count += static_cast<size_t>(__builtin_popcount((m1 << 4) | m0));
  }
  for (; i + 4 <= n; i += 4) {
    const int m = _mm256_movemask_pd(
        _mm256_cmp_pd(_mm256_loadu_pd(values + i), t, _CMP_GE_OQ));
    count += static_cast<size_t>(__builtin_popcount(m));
  }
  for (; i < n; ++i) count += values[i] >= threshold ? 1 : 0;
  return count;
}

void AxpyAvx2(double alpha, const double* x, double* y, size_t n) {
  const __m256d a = _mm256_set1_pd(alpha);
  size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d prod = _mm256_mul_pd(a, _mm256_loadu_pd(x + i));
    _mm256_storeu_pd(y + i, _mm256_add_pd(_mm256_loadu_pd(y + i), prod));
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

constexpr KernelTable kAvx2 = {Isa::kAvx2, "avx2", DotAvx2,
                               SquaredDistanceAvx2, CountGreaterEqualAvx2,
                               AxpyAvx2};

}  // namespace

const KernelTable* Avx2Kernels() { return &kAvx2; }

}  // namespace deepcand::simd
