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

#include <string>
#include <string_view>
#include <vector>

#include "fg/ast.h"
#include "fg/diagnostics.h"

namespace fg {

struct ParseResult {
  ExprPtr program;  // null when diagnostics is non-empty
  std::vector<Diagnostic> diagnostics;

  bool ok() const { return program != nullptr; }
};

/// Parses and scope-resolves a whole program. Every type variable binder gets
/// a fresh TypeVarId; unbound type or term names are reported as P004.
ParseResult parse_program(std::string_view src, std::string file = "<input>");

struct TypeParseResult {
  TypePtr type;
  std::vector<Diagnostic> diagnostics;
};

/// Parses a single type with the given type variables in scope.
TypeParseResult parse_type(std::string_view src,
                           const std::vector<TypeBinder> &scope = {});

/// Allocates a TypeVarId never returned before in this process.
TypeVarId fresh_type_var_id();

}  // namespace fg
