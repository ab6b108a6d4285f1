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

// AArch64 Advanced SIMD variant. Uses vmulq/vaddq (never vfmaq) so results
// match the scalar reference bit for bit.
#include <arm_neon.h>

#include "deepcand/simd/kernel_table.h"

namespace deepcand::simd {
namespace {

double DotNeon(const double* a, const double* b, size_t n) {
  float64x2_t acc01 = vdupq_n_f64(0.0);
  float64x2_t acc23 = vdupq_n_f64(0.0);
  const size_t blocked = n & ~static_cast<size_t>(3);
  for (size_t i = 0; i < blocked; i += 4) {
    acc01 = vaddq_f64(acc01, vmulq_f64(vld1q_f64(a + i), vld1q_f64(b + i)));
    acc23 = vaddq_f64(acc23,
                      vmulq_f64(vld1q_f64(a + i + 2), vld1q_f64(b + i + 2)));
  }
  double total = (vgetq_lane_f64(acc01, 0) + vgetq_lane_f64(acc01, 1)) +
                 (vgetq_lane_f64(acc23, 0) + vgetq_lane_f64(acc23, 1));
  for (size_t i = blocked; i < n; ++i) total += a[i] * b[i];
  return total;
}

double SquaredDistanceNeon(const double* a, const double* b, size_t n) {
  float64x2_t acc01 = vdupq_n_f64(0.0);
  float64x2_t acc23 = vdupq_n_f64(0.0);
  const size_t blocked = n & ~static_cast<size_t>(3);
  for (size_t i = 0; i < blocked; i += 4) {
    const float64x2_t d01 = vsubq_f64(vld1q_f64(a + i), vld1q_f64(b + i));
    const float64x2_t d23 =
        vsubq_f64(vld1q_f64(a + i + 2), vld1q_f64(b + i + 2));
    acc01 = vaddq_f64(acc01, vmulq_f64(d01, d01));
    acc23 = vaddq_f64(acc23, vmulq_f64(d23, d23));
  }
  double total = (vgetq_lane_f64(acc01, 0) + vgetq_lane_f64(acc01, 1)) +
                 (vgetq_lane_f64(acc23, 0) + vgetq_lane_f64(acc23, 1));
  for (size_t i = blocked; i < n; ++i) {
    const double d = a[i] - b[i];
    total += d * d;
  }
  return total;
}

size_t CountGreaterEqualNeon(const double* values, size_t n,
                             double threshold) {
  const float64x2_t t = vdupq_n_f64(threshold);
  // Comparison lanes are all-ones (== -1) when true.
  uint64x2_t hits = vdupq_n_u64(0);
  size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    hits = vsubq_u64(hits, vcgeq_f64(vld1q_f64(values + i), t));
  }
  size_t count = static_cast<size_t>(vgetq_lane_u64(hits, 0) +
                                     vgetq_lane_u64(hits, 1));
  for (; i < n; ++i) count += values[i] >= threshold ? 1 : 0;
  return count;
}

void AxpyNeon(double alpha, const double* x, double* y, size_t n) {
  const float64x2_t a = vdupq_n_f64(alpha);
  size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    vst1q_f64(y + i, vaddq_f64(vld1q_f64(y + i), vmulq_f64(a, vld1q_f64(x + i))));
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

constexpr KernelTable kNeon = {Isa::kNeon, "neon", DotNeon,
                               SquaredDistanceNeon, CountGreaterEqualNeon,
                               AxpyNeon};

}  // namespace

const KernelTable* NeonKernels() { return &kNeon; }

}  // namespace deepcand::simd
