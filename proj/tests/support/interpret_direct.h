// Copyright 2026 The fgc Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at

//     http://www.apache.org/licenses/LICENSE-2.0

// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <string>

#include "fg/ast.h"

namespace fg::testing {

/// Result of running a source program without translating it.
struct DirectOutcome {
  enum class Kind { kValue, kDiverged, kError };
  Kind kind = Kind::kError;
  std::string value;  // "42", "true", "[1, 2]"
  std::string error;
};

/// Type-passing interpreter over the source syntax. Models are runtime
/// records found by concept name and argument types; a constrained value is
/// a suspension that picks its models where it is eliminated.
DirectOutcome interpret_direct(const ExprPtr &program, std::int64_t fuel = 1'000'000);

}  // namespace fg::testing
