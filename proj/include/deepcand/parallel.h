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

#ifndef DEEPCAND_PARALLEL_H_
#define DEEPCAND_PARALLEL_H_

#include <cstddef>
#include <functional>

#include "absl/status/status.h"

namespace deepcand {

// Worker count for ParallelFor: the last SetThreadCount() value if nonzero,
// else DEEPCAND_THREADS if set to a positive integer, else the hardware
// concurrency.
size_t ThreadCount();
void SetThreadCount(size_t n);

// Runs fn(i) for i in [0, n) over contiguous chunks. Each index runs exactly
// once, so results written to per-index slots do not depend on the schedule.
void ParallelFor(size_t n, const std::function<void(size_t)>& fn);

// As above; returns the error of the lowest failing index.
absl::Status ParallelForWithStatus(
    size_t n, const std::function<absl::Status(size_t)>& fn);

}  // namespace deepcand

#endif  // DEEPCAND_PARALLEL_H_
