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

#include <atomic>

#include "absl/strings/str_cat.h"
#include "deepcand/simd/kernels.h"

namespace deepcand::simd {

#if !defined(DEEPCAND_HAVE_AVX2)
const KernelTable* Avx2Kernels() { return nullptr; }
#endif
#if !defined(DEEPCAND_HAVE_NEON)
const KernelTable* NeonKernels() { return nullptr; }
#endif

namespace {

bool CpuSupports(Isa isa) {
  switch (isa) {
    case Isa::kScalar:
      return true;
    case Isa::kAvx2:
#if defined(DEEPCAND_HAVE_AVX2) && (defined(__x86_64__) || defined(__i386__))
      return __builtin_cpu_supports("avx2");
#else
      return false;
#endif
    case Isa::kNeon:
#if defined(DEEPCAND_HAVE_NEON) && defined(__aarch64__)
      return true;
#else
      return false;
#endif
  }
  return false;
}

const KernelTable* Best() {
  if (IsaAvailable(Isa::kAvx2)) return Avx2Kernels();
  if (IsaAvailable(Isa::kNeon)) return NeonKernels();
  return &ScalarKernels();
}

std::atomic<const KernelTable*>& ActiveSlot() {
  static std::atomic<const KernelTable*> slot{Best()};
  return slot;
}

}  // namespace

const KernelTable* KernelsFor(Isa isa) {
  switch (isa) {
    case Isa::kScalar:
      return &ScalarKernels();
    case Isa::kAvx2:
      return Avx2Kernels();
    case Isa::kNeon:
      return NeonKernels();
  }
  return nullptr;
}

bool IsaAvailable(Isa isa) {
  return KernelsFor(isa) != nullptr && CpuSupports(isa);
}

std::vector<Isa> AvailableIsas() {
  std::vector<Isa> out;
  for (Isa isa : {Isa::kScalar, Isa::kAvx2, Isa::kNeon}) {
    if (IsaAvailable(isa)) out.push_back(isa);
  }
  return out;
}

absl::StatusOr<Isa> ParseIsa(std::string_view name) {
  if (name == "scalar") return Isa::kScalar;
  if (name == "avx2") return Isa::kAvx2;
  if (name == "neon") return Isa::kNeon;
  return absl::InvalidArgumentError(
      absl::StrCat("unknown SIMD variant '", std::string(name), "'"));
}

std::string_view IsaName(Isa isa) {
  switch (isa) {
    case Isa::kScalar:
      return "scalar";
    case Isa::kAvx2:
      return "avx2";
    case Isa::kNeon:
      return "neon";
  }
  return "unknown";
}

const KernelTable& Active() {
  return *ActiveSlot().load(std::memory_order_acquire);
}

absl::Status SelectIsa(Isa isa) {
  if (!IsaAvailable(isa)) {
    return absl::FailedPreconditionError(
        absl::StrCat("SIMD variant ", std::string(IsaName(isa)),
                     " is not available on this build or CPU"));
  }
  ActiveSlot().store(KernelsFor(isa), std::memory_order_release);
  return absl::OkStatus();
}

void SelectBest() { ActiveSlot().store(Best(), std::memory_order_release); }

ScopedIsa::ScopedIsa(Isa isa) : previous_(&Active()) {
  if (IsaAvailable(isa)) {
    ActiveSlot().store(KernelsFor(isa), std::memory_order_release);
  }
}

ScopedIsa::~ScopedIsa() {
  ActiveSlot().store(previous_, std::memory_order_release);
}

}  // namespace deepcand::simd
