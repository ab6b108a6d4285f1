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

#include "deepcand/parallel.h"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace deepcand {
namespace {

std::atomic<size_t> g_thread_override{0};
// Set on pool workers; nested loops then run inline.
thread_local bool t_in_worker = false;

size_t FromEnvironment() {
  const char* value = std::getenv("DEEPCAND_THREADS");
  if (value == nullptr) return 0;
  char* end = nullptr;
  const long parsed = std::strtol(value, &end, 10);
  if (end == value || *end != '\0' || parsed <= 0) return 0;
  return static_cast<size_t>(parsed);
}

}  // namespace

size_t ThreadCount() {
  if (size_t n = g_thread_override.load(); n > 0) return n;
  if (size_t n = FromEnvironment(); n > 0) return n;
  return std::max<size_t>(1, std::thread::hardware_concurrency());
}

void SetThreadCount(size_t n) { g_thread_override.store(n); }

void ParallelFor(size_t n, const std::function<void(size_t)>& fn) {
  const size_t workers = t_in_worker ? 1 : std::min(ThreadCount(), n);
  if (workers <= 1) {
    for (size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  const size_t chunk = (n + workers - 1) / workers;
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (size_t w = 0; w < workers; ++w) {
    const size_t begin = w * chunk;
    const size_t end = std::min(n, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back([&fn, begin, end] {
      t_in_worker = true;
      for (size_t i = begin; i < end; ++i) fn(i);
    });
  }
}

absl::Status ParallelForWithStatus(
    size_t n, const std::function<absl::Status(size_t)>& fn) {
  std::vector<absl::Status> results(n);
  ParallelFor(n, [&](size_t i) { results[i] = fn(i); });
  for (absl::Status& s : results) {
    if (!s.ok()) return s;
  }
  return absl::OkStatus();
}

}  // namespace deepcand
