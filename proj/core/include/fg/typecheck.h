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

#include <optional>
#include <variant>
#include <vector>

#include "fg/ast.h"
#include "fg/diagnostics.h"
#include "fg/elaborate.h"
#include "fg/env.h"

namespace fg {

/**
 * Type checking.
 *
 * The checker is algorithmic: constrained types are eliminated lazily, only
 * where a specific shape is needed (function position, type-application
 * subject, list primitives, and comparisons that fail as written). Every
 * checked expression is translated to core in the same pass; see
 * elaborate.h.
 */

/// Synthesizes the type of `e` under Γ.
std::variant<TypePtr, std::vector<Diagnostic>> infer(const Env &env, const ExprPtr &e);

/// Checks `e` against `expected`; unannotated lambdas take their parameter
/// type from an expected arrow.
std::vector<Diagnostic> check(const Env &env, const ExprPtr &e, const TypePtr &expected);

/// Γ ⊢ C, reported as T003 on failure.
std::optional<Diagnostic> satisfy(const Env &env, const Constraint &c, const SourceSpan &span = {});

/// Strips the leading constraint group of τ when every constraint in it is
/// satisfied; otherwise returns τ unchanged.
TypePtr discharge(const Env &env, const TypePtr &t);

/// Checks a model declaration and returns Γ extended with the model and its
/// associated-type equations.
std::variant<Env, std::vector<Diagnostic>> check_model(const Env &env, const ModelInfo &info,
                                                       const SourceSpan &span = {});

struct ProgramCheck {
  TypePtr type;  // null when diagnostics is non-empty
  std::vector<Diagnostic> diagnostics;

  bool ok() const { return diagnostics.empty(); }
};

/// ⊢ e : τ under the empty environment, collecting every diagnostic.
ProgramCheck check_program(const ExprPtr &program);

}  // namespace fg
