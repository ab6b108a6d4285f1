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

#ifndef DEEPCAND_SIMD_KERNEL_TABLE_H_
#define DEEPCAND_SIMD_KERNEL_TABLE_H_

// Kept free of library headers so the vector variants can be compiled
// against a bare target toolchain.
#include <stddef.h>

namespace deepcand::simd {

// Inner-loop kernels: one scalar reference plus optional vector variants.
//
// Reductions (dot, squared_distance) follow a single canonical order that
// every variant reproduces bit for bit: element i goes to lane i % 4 for the
// first 4 * floor(n / 4) elements, lanes are combined as
// (lane0 + lane1) + (lane2 + lane3), and the n % 4 tail elements are then
// added in index order. Products and sums are separate roundings (the library
// is built with -ffp-contract=off and the vector code never uses FMA).
// count_greater_equal and axpy are elementwise and exact in every variant.
enum class Isa { kScalar, kAvx2, kNeon };

struct KernelTable {
  Isa isa;
  const char* name;
  double (*dot)(const double* a, const double* b, size_t n);
  double (*squared_distance)(const double* a, const double* b, size_t n);
  // #{i : values[i] >= threshold}, IEEE ordered comparison.
  size_t (*count_greater_equal)(const double* values, size_t n,
                                double threshold);
  // y += alpha * x.
  void (*axpy)(double alpha, const double* x, double* y, size_t n);
};

const KernelTable& ScalarKernels();
// Null when the variant is not compiled into this build.
const KernelTable* Avx2Kernels();
const KernelTable* NeonKernels();

}  // namespace deepcand::simd

#endif  // DEEPCAND_SIMD_KERNEL_TABLE_H_
