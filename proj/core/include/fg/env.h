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

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "fg/ast.h"

namespace fg {

namespace typeq {
class ClosureState;
}
namespace sf {
struct CType;
}

/// Core type of a binding in the elaborated program, with the number of
/// enclosing core type binders at the point it was formed.
struct CoreTypeAt {
  std::shared_ptr<const sf::CType> type;
  int type_depth = 0;
};

/// Where the runtime dictionary for a concept assumption lives in the
/// elaborated program: a core term variable (by binder level) followed by
/// tuple projections.
struct DictRef {
  int term_level = -1;
  std::vector<int> projections;
  /// Core type of the root dictionary variable.
  CoreTypeAt root_type;
};

struct TermBind {
  std::string name;
  TypePtr type;
  int core_level = -1;
  CoreTypeAt ctype;
};

/// A type variable in scope. `core_level` is its type-binder level in the
/// elaborated program, or -1 for variables that have no core counterpart
/// (type aliases).
struct TypeVarEntry {
  TypeVarId id;
  std::string name;
  int core_level = -1;
};

struct ConstraintEntry {
  Constraint constraint;
  std::optional<DictRef> dict;
};

/// An assumed equation; aliases use a Var lhs, models use a Path lhs.
struct TypeEqEntry {
  TypePtr lhs;
  TypePtr rhs;
};

struct ConceptEntry {
  std::shared_ptr<const ConceptInfo> info;
};

struct ModelEntry {
  ModelId model;
  std::shared_ptr<const ModelInfo> info;
  DictRef dict;
};

using EnvEntry = std::variant<TermBind, TypeVarEntry, ConstraintEntry, TypeEqEntry,
                              ConceptEntry, ModelEntry>;

/**
 * The ordered typing environment, most recent entry first.
 *
 * Env is a persistent list: extending returns a new Env sharing the tail.
 * Each node caches the congruence closure of the equations visible from it;
 * the cache is the only mutable state and is built on first use.
 */
class Env {
 public:
  Env() = default;

  Env push(EnvEntry entry) const;

  /// Binds a term variable at the next core term level.
  Env push_term(std::string name, TypePtr type) const;
  /// Binds a type variable at the next core type level.
  Env push_type_var(TypeVarId id, std::string name) const;

  bool empty() const { return head_ == nullptr; }
  int term_depth() const;
  int type_depth() const;

  /// Visits entries most recent first; stop by returning false.
  void for_each(const std::function<bool(const EnvEntry &)> &fn) const;
  std::vector<EnvEntry> entries() const;

  std::optional<TermBind> lookup_term(const std::string &name) const;
  std::shared_ptr<const ConceptInfo> find_concept(const std::string &name) const;
  /// Core type level of a variable, if it has one in this environment.
  std::optional<int> type_level(TypeVarId id) const;

  /// Shared closure over all equations in scope (TypeEq entries and
  /// same-type constraint entries).
  typeq::ClosureState &closure() const;

 private:
  struct Node;
  explicit Env(std::shared_ptr<const Node> head) : head_(std::move(head)) {}

  std::shared_ptr<const Node> head_;
  mutable std::shared_ptr<typeq::ClosureState> empty_closure_;
};

/// lookup_term as a free function, per the typing rule "x : τ ∈ Γ".
std::optional<TypePtr> lookup_term(const std::string &name, const Env &env);

/// Keeps concept definitions, constraint assumptions and type equations,
/// preserving order.
Env restrict(const Env &env);

struct FlatConstraint {
  Constraint constraint;
  /// Projection path from the root dictionary (empty for the root itself).
  std::vector<int> slots;
};

struct UnknownConcept {
  std::string name;
};

/// c<τ̄> followed by the flattening of its nested constraints with the
/// concept parameters substituted, duplicates (up to alpha-equality) dropped.
/// Also records each nested concept constraint's dictionary slot.
std::variant<std::vector<FlatConstraint>, UnknownConcept> flat_with_slots(const Constraint &c,
                                                                          const Env &env);
std::variant<std::vector<Constraint>, UnknownConcept> flat(const Constraint &c, const Env &env);

/// Concept-constraint slots in a concept's dictionary come first, then
/// members. Returns the slot index of each nested concept constraint (or -1
/// for same-type constraints) and the slot of the first member.
struct DictLayout {
  std::vector<int> nested_slots;
  int first_member_slot = 0;
  int size = 0;
};
DictLayout dict_layout(const ConceptInfo &info);

/// Substitution mapping a concept's parameters to `args` and its associated
/// types to paths `concept<args>.β`.
TypeSubst concept_instance_subst(const ConceptInfo &info, const std::vector<TypePtr> &args);

enum class PathError { kUnsatisfied, kUnknownConcept, kUnknownMember };

struct PathResolution {
  TypePtr type;
  /// Dictionary the member is projected from and the member's slot; unset
  /// for empty-prefix paths.
  std::optional<DictRef> dict;
  int slot = -1;
};

struct PathFailure {
  PathError error;
  std::string detail;
};

/// lookup(π, Γ): x resolves through lookup_term; c<τ̄>.π requires Γ ⊢ c<τ̄>
/// and recurses into Γ|_c extended with c's nested constraints and members
/// (parameters substituted by τ̄, associated types by c<τ̄>.β).
std::variant<PathResolution, PathFailure> lookup_path(const TermPath &path, const Env &env);
/// Convenience wrapper returning only the type.
std::optional<TypePtr> lookup_path_type(const TermPath &path, const Env &env);

/// A concept assumption or model in Γ whose arguments equal c<τ̄>'s; the most
/// recent one wins.
struct ConceptEvidence {
  ModelId matched;
  std::optional<DictRef> dict;
  bool from_model = false;
};
std::optional<ConceptEvidence> find_evidence(const ModelId &m, const Env &env);

/// Γ ⊢ C.
bool satisfies(const Env &env, const Constraint &c);

}  // namespace fg
