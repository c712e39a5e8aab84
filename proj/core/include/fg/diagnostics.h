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
#include <utility>
#include <vector>

#include "fg/ast.h"

namespace fg {

/**
 * Stable diagnostic codes.
 *
 * Parse errors:
 *   P001 unexpected token
 *   P002 unexpected end of input
 *   P003 invalid character or literal
 *   P004 unbound name
 *   P005 duplicate name in a declaration
 *   P006 primitive applied to too few arguments
 *
 * Type errors:
 *   T001 type mismatch (application argument, branch, annotation)
 *   T002 non-function applied
 *   T003 unsatisfied constraint
 *   T004 unknown concept (or wrong number of concept arguments)
 *   T005 model member missing
 *   T006 model member type mismatch
 *   T007 unknown member or variable
 *   T008 non-universal instantiated
 *   T009 annotation required
 *   T010 condition not bool
 *   T011 model associated-type binding missing
 */
namespace codes {
inline constexpr std::string_view kUnexpectedToken = "P001";
inline constexpr std::string_view kUnexpectedEnd = "P002";
inline constexpr std::string_view kBadCharacter = "P003";
inline constexpr std::string_view kUnboundName = "P004";
inline constexpr std::string_view kDuplicateName = "P005";
inline constexpr std::string_view kPrimArity = "P006";

inline constexpr std::string_view kMismatch = "T001";
inline constexpr std::string_view kNotFunction = "T002";
inline constexpr std::string_view kUnsatisfied = "T003";
inline constexpr std::string_view kUnknownConcept = "T004";
inline constexpr std::string_view kMemberMissing = "T005";
inline constexpr std::string_view kMemberMismatch = "T006";
inline constexpr std::string_view kUnknownMember = "T007";
inline constexpr std::string_view kNotUniversal = "T008";
inline constexpr std::string_view kAnnotationRequired = "T009";
inline constexpr std::string_view kConditionNotBool = "T010";
inline constexpr std::string_view kAssocMissing = "T011";
}  // namespace codes

/// All documented codes, in order.
const std::vector<std::string_view> &all_diagnostic_codes();

struct Diagnostic {
  SourceSpan span;
  std::string code;
  std::string message;
  std::vector<std::pair<SourceSpan, std::string>> notes;
};

/// "file:line:col: error[CODE]: message"
std::string format_diagnostic(const Diagnostic &d);

}  // namespace fg
