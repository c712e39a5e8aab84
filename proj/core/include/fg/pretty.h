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

#include "fg/ast.h"

namespace fg {

/// Renders a program in the concrete syntax accepted by parse_program.
/// Binders whose surface names would be captured are renamed.
std::string pretty(const ExprPtr &e);

std::string to_string(const TypePtr &t);
std::string to_string(const Constraint &c);
std::string to_string(const ModelId &m);

}  // namespace fg
