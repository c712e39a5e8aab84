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
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "fg/ast.h"
#include "fg/diagnostics.h"
#include "fg/env.h"
#include "fg/sysf.h"

namespace fg {

/// A failure of the translation on a program the checker accepted.
class ElabError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Splits C1 => ... => Cn => τ (τ not constrained) into its constraints and τ.
std::pair<std::vector<Constraint>, TypePtr> peel_constraints(const TypePtr &t);
TypePtr wrap_constraints(const std::vector<Constraint> &cs, TypePtr body);

/// Associated-type paths of a constraint group that become core type
/// parameters, in order: one per associated type of each concept constraint
/// in the group's flattening, except paths the group's own same-type
/// constraints already equate with a path-free type.
std::vector<TypePtr> group_param_paths(const Env &env, const std::vector<Constraint> &cs);

/// True for the fresh variables enter_group introduces for group
/// parameters. They never appear in source-level types.
bool is_group_parameter(TypeVarId id);

/// Environment inside a constraint group C1 => ... => Cn.
struct ConstraintGroup {
  Env env;
  std::vector<TypeVarId> params;
  std::vector<std::string> param_names;
  /// Concept constraints among C1..Cn, each taking one dictionary argument.
  std::vector<ModelId> dict_models;
  std::vector<sf::CTypePtr> dict_types;
};

/// Extends Γ with the group's parameters, path equations and flattened
/// assumptions. With `bind_dicts`, the i-th dictionary is assumed bound by
/// a core lambda at term level Γ.term_depth() + i.
ConstraintGroup enter_group(const Env &env, const std::vector<Constraint> &cs, bool bind_dicts);

/// C(τ) under Γ. Path types are replaced by the representative of their
/// class; a constraint group becomes ∀β*. Dict → ... → C(body).
sf::CTypePtr translate_type(const Env &env, const TypePtr &t);

/// Tuple type of c<τ̄>'s dictionary: nested concept dictionaries, then
/// members.
sf::CTypePtr dict_type(const Env &env, const ModelId &m);

struct CoreValue {
  sf::CTermPtr term;
  sf::CTypePtr type;
};

/// The dictionary for a satisfied concept constraint: the most recent
/// matching assumption or model.
CoreValue build_dict(const Env &env, const ModelId &m);

/// The dictionary a DictRef points at, with its core type.
CoreValue dict_value(const Env &env, const DictRef &ref);

/// Core type of a binding, adjusted to the type depth of `env`.
sf::CTypePtr core_type_in(const Env &env, const CoreTypeAt &at);

/// Core variable term referring to term level `level` from inside `env`.
sf::CTermPtr core_var(const Env &env, int level, std::string hint);

struct Elaboration {
  TypePtr type;
  std::vector<Diagnostic> diagnostics;
  sf::CTermPtr core;
  sf::CTypePtr core_type;
  std::string error;  // set when the translation failed

  bool ok() const { return diagnostics.empty() && core != nullptr; }
};

/// Checks and translates a whole program.
Elaboration elaborate_program(const ExprPtr &program);

/// eval(e) = sf_eval(C(e)). Requires a program that elaborates.
sf::EvalOutcome eval(const ExprPtr &program, std::int64_t fuel = sf::kDefaultFuel);

}  // namespace fg
