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

#include "fg/diagnostics.h"

#include <fmt/format.h>

namespace fg {

const std::vector<std::string_view> &all_diagnostic_codes() {
  static const std::vector<std::string_view> kCodes = {
      codes::kUnexpectedToken, codes::kUnexpectedEnd,   codes::kBadCharacter,
      codes::kUnboundName,     codes::kDuplicateName,   codes::kPrimArity,
      codes::kMismatch,        codes::kNotFunction,     codes::kUnsatisfied,
      codes::kUnknownConcept,  codes::kMemberMissing,   codes::kMemberMismatch,
      codes::kUnknownMember,   codes::kNotUniversal,    codes::kAnnotationRequired,
      codes::kConditionNotBool, codes::kAssocMissing,
  };
  return kCodes;
}

std::string format_diagnostic(const Diagnostic &d) {
  std::string out = fmt::format("{}:{}:{}: error[{}]: {}", d.span.file, d.span.start_line,
                                d.span.start_col, d.code, d.message);
  for (const auto &[span, text] : d.notes) {
    out += fmt::format("\n{}:{}:{}: note: {}", span.file, span.start_line, span.start_col, text);
  }
  return out;
}

}  // namespace fg
