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

#ifndef DEEPCAND_STATUS_MACROS_H_
#define DEEPCAND_STATUS_MACROS_H_

#include <utility>

#include "absl/status/status.h"
#include "absl/status/statusor.h"

#define DEEPCAND_STATUS_CONCAT_INNER_(x, y) x##y
#define DEEPCAND_STATUS_CONCAT_(x, y) DEEPCAND_STATUS_CONCAT_INNER_(x, y)

#define DEEPCAND_RETURN_IF_ERROR(expr)              \
  do {                                              \
    const absl::Status _deepcand_status = (expr);   \
    if (!_deepcand_status.ok()) return _deepcand_status; \
  } while (0)

#define DEEPCAND_ASSIGN_OR_RETURN_IMPL_(statusor, lhs, rexpr) \
  auto statusor = (rexpr);                                    \
  if (!statusor.ok()) return std::move(statusor).status();    \
  lhs = *std::move(statusor)

// Evaluates `rexpr` (an absl::StatusOr<T>); on error returns the status from
// the enclosing function, otherwise move-assigns the value into `lhs`.
#define DEEPCAND_ASSIGN_OR_RETURN(lhs, rexpr) \
  DEEPCAND_ASSIGN_OR_RETURN_IMPL_(            \
      DEEPCAND_STATUS_CONCAT_(_deepcand_statusor_, __LINE__), lhs, rexpr)

#endif  // DEEPCAND_STATUS_MACROS_H_
