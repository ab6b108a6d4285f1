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

#ifndef DEEPCAND_SIMD_KERNELS_H_
#define DEEPCAND_SIMD_KERNELS_H_

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "deepcand/simd/kernel_table.h"

namespace deepcand::simd {

// Runtime selection among the kernel variants declared in kernel_table.h.

// Compiled in and supported by the running CPU.
bool IsaAvailable(Isa isa);
std::vector<Isa> AvailableIsas();
const KernelTable* KernelsFor(Isa isa);

absl::StatusOr<Isa> ParseIsa(std::string_view name);
std::string_view IsaName(Isa isa);

// The table used by the inline helpers below. Defaults to the widest
// available variant.
const KernelTable& Active();
absl::Status SelectIsa(Isa isa);
void SelectBest();

inline double Dot(std::span<const double> a, std::span<const double> b) {
  return Active().dot(a.data(), b.data(), a.size());
}
inline double SquaredDistance(std::span<const double> a,
                              std::span<const double> b) {
  return Active().squared_distance(a.data(), b.data(), a.size());
}
inline size_t CountGreaterEqual(std::span<const double> values,
                                double threshold) {
  return Active().count_greater_equal(values.data(), values.size(), threshold);
}
inline void Axpy(double alpha, std::span<const double> x, std::span<double> y) {
  Active().axpy(alpha, x.data(), y.data(), x.size());
}

// RAII override of the active variant, for tests and the CLI.
class ScopedIsa {
 public:
  explicit ScopedIsa(Isa isa);
  ~ScopedIsa();
  ScopedIsa(const ScopedIsa&) = delete;
  ScopedIsa& operator=(const ScopedIsa&) = delete;

 private:
  const KernelTable* previous_;
};

}  // namespace deepcand::simd

#endif  // DEEPCAND_SIMD_KERNELS_H_
