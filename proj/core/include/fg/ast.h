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
#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace fg {

/// Unique identity of a type variable, assigned by scope resolution (or by
/// the checker for variables it introduces). Surface names are kept only for
/// printing.
using TypeVarId = std::uint32_t;

struct SourceSpan {
  std::string file;
  int start_line = 0;
  int start_col = 0;
  int end_line = 0;
  int end_col = 0;
};

struct Type;
using TypePtr = std::shared_ptr<const Type>;

/// c<τ̄>: a concept applied to its modeling types.
struct ModelId {
  std::string concept_name;
  std::vector<TypePtr> args;
};

struct Constraint {
  struct Concept {
    ModelId model;
  };
  struct Same {
    TypePtr lhs;
    TypePtr rhs;
  };
  std::variant<Concept, Same> node;

  bool is_concept() const { return std::holds_alternative<Concept>(node); }
  const ModelId &model() const { return std::get<Concept>(node).model; }
};

Constraint concept_constraint(std::string name, std::vector<TypePtr> args);
Constraint same_type_constraint(TypePtr lhs, TypePtr rhs);

/**
 * Types of the calculus.
 *
 * Binders introduced by `forall` are nameless: occurrences inside the body
 * are `Bound` indices counting enclosing `Forall`s (0 = innermost), so
 * alpha-equivalent types are structurally identical. Variables bound outside
 * a type (type abstractions, aliases, concept parameters) are `Var`s with a
 * unique id. Every type handled outside this module is locally closed: no
 * `Bound` index escapes its binder.
 */
struct Type {
  struct Int {};
  struct Bool {};
  struct List {
    TypePtr elem;
  };
  struct Arrow {
    TypePtr dom;
    TypePtr cod;
  };
  struct Forall {
    std::string hint;
    TypePtr body;
  };
  struct Constrained {
    Constraint constraint;
    TypePtr body;
  };
  struct Var {
    TypeVarId id;
    std::string name;
  };
  struct Bound {
    std::uint32_t index;
  };
  /// m1.m2...mk.name, k >= 1; `name` is an associated type of the last model.
  struct Path {
    std::vector<ModelId> prefix;
    std::string name;
  };
  /// Recovery placeholder; equal to every type, never part of a result.
  struct Error {};

  std::variant<Int, Bool, List, Arrow, Forall, Constrained, Var, Bound, Path,
               Error>
      node;

  template <typename T>
  const T *as() const {
    return std::get_if<T>(&node);
  }
  template <typename T>
  bool is() const {
    return std::holds_alternative<T>(node);
  }
};

TypePtr int_type();
TypePtr bool_type();
TypePtr list_type(TypePtr elem);
TypePtr arrow_type(TypePtr dom, TypePtr cod);
TypePtr forall_type(std::string hint, TypePtr body);
TypePtr constrained_type(Constraint constraint, TypePtr body);
TypePtr var_type(TypeVarId id, std::string name);
TypePtr bound_type(std::uint32_t index);
TypePtr path_type(std::vector<ModelId> prefix, std::string name);
TypePtr error_type();

/// [binder:=replacement]target for a free variable. Capture cannot happen:
/// bound variables are positional and `replacement` is locally closed.
TypePtr substitute_type(const TypePtr &target, TypeVarId binder,
                        const TypePtr &replacement);
Constraint substitute_constraint(const Constraint &c, TypeVarId binder,
                                 const TypePtr &replacement);

/// Simultaneous substitution of several free variables.
struct TypeSubst {
  std::vector<std::pair<TypeVarId, TypePtr>> entries;
  const TypePtr *find(TypeVarId id) const;
};
TypePtr substitute_type(const TypePtr &target, const TypeSubst &subst);
Constraint substitute_constraint(const Constraint &c, const TypeSubst &subst);

/// Instantiates the outermost binder of a `Forall` body with `replacement`.
TypePtr open_type(const TypePtr &body, const TypePtr &replacement);
/// Inverse of open_type: abstracts `id` into the index of a new binder.
TypePtr close_type(const TypePtr &body, TypeVarId id);

/// Identity up to binder names (the positional encoding makes this
/// structural). Var names and Forall hints are ignored.
bool alpha_equal(const TypePtr &a, const TypePtr &b);
bool alpha_equal(const Constraint &a, const Constraint &b);
bool alpha_equal(const ModelId &a, const ModelId &b);

std::set<TypeVarId> free_type_vars(const TypePtr &t);
bool contains_error(const TypePtr &t);
bool contains_path(const TypePtr &t);

// ---------------------------------------------------------------------------
// Expressions

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

enum class PrimOp { kAdd, kSub, kMul, kLess, kEqual, kIsNil, kHead, kTail, kCons };

std::string_view prim_name(PrimOp op);
int prim_arity(PrimOp op);
bool prim_is_binary_operator(PrimOp op);

/// π ::= x | m.π
struct TermPath {
  std::vector<ModelId> prefix;
  std::string name;
};

struct TypeBinder {
  TypeVarId id;
  std::string name;
};

struct ConceptInfo {
  std::string name;
  std::vector<TypeBinder> params;
  std::vector<TypeBinder> assoc;
  std::vector<Constraint> nested;
  std::vector<std::pair<std::string, TypePtr>> members;
};

struct ModelInfo {
  std::string concept_name;
  std::vector<TypePtr> args;
  std::vector<std::pair<std::string, TypePtr>> assoc_binds;
  std::vector<std::pair<std::string, ExprPtr>> member_binds;
};

struct Expr {
  struct IntLit {
    std::int64_t value;
  };
  struct BoolLit {
    bool value;
  };
  struct Lam {
    std::string param;
    TypePtr ann;  // null when omitted
    ExprPtr body;
  };
  struct App {
    ExprPtr fn;
    ExprPtr arg;
  };
  struct TyLam {
    TypeBinder binder;
    ExprPtr body;
  };
  struct TyApp {
    ExprPtr subject;
    TypePtr arg;
  };
  struct ConstrainedE {
    Constraint constraint;
    ExprPtr body;
  };
  struct PathE {
    TermPath path;
  };
  struct ConceptDecl {
    std::shared_ptr<const ConceptInfo> info;
    ExprPtr rest;
  };
  struct ModelDecl {
    std::shared_ptr<const ModelInfo> info;
    ExprPtr rest;
  };
  struct TypeAlias {
    TypeBinder binder;
    TypePtr rhs;
    ExprPtr rest;
  };
  struct Let {
    std::string name;
    ExprPtr bound;
    ExprPtr rest;
  };
  struct Fix {
    ExprPtr body;
  };
  struct If {
    ExprPtr cond;
    ExprPtr then_branch;
    ExprPtr else_branch;
  };
  struct ListLit {
    std::vector<ExprPtr> elems;
    TypePtr elem_type;  // required when elems is empty
  };
  struct Prim {
    PrimOp op;
    std::vector<ExprPtr> args;
  };

  using Node = std::variant<IntLit, BoolLit, Lam, App, TyLam, TyApp,
                            ConstrainedE, PathE, ConceptDecl, ModelDecl,
                            TypeAlias, Let, Fix, If, ListLit, Prim>;

  SourceSpan span;
  Node node;

  template <typename T>
  const T *as() const {
    return std::get_if<T>(&node);
  }
};

ExprPtr make_expr(Expr::Node node, SourceSpan span = {});

/// Structural equality of programs, ignoring spans and surface names of type
/// variables. Binder identities are compared up to a consistent renaming, so
/// two independent parses of the same text compare equal.
bool structurally_equal(const ExprPtr &a, const ExprPtr &b);

}  // namespace fg
