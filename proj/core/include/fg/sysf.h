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
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "fg/ast.h"

namespace fg::sf {

struct CType;
using CTypePtr = std::shared_ptr<const CType>;

/// Core types. Type variables are de Bruijn indices counting enclosing
/// `Forall`s and type abstractions; hints only feed the printer.
struct CType {
  struct Int {};
  struct Bool {};
  struct List {
    CTypePtr elem;
  };
  struct Arrow {
    CTypePtr dom;
    CTypePtr cod;
  };
  struct Forall {
    std::string hint;
    CTypePtr body;
  };
  struct Tuple {
    std::vector<CTypePtr> elems;
  };
  struct TVar {
    int index;
  };
  std::variant<Int, Bool, List, Arrow, Forall, Tuple, TVar> node;

  template <typename T>
  const T *as() const {
    return std::get_if<T>(&node);
  }
  template <typename T>
  bool is() const {
    return std::holds_alternative<T>(node);
  }
};

CTypePtr c_int();
CTypePtr c_bool();
CTypePtr c_list(CTypePtr elem);
CTypePtr c_arrow(CTypePtr dom, CTypePtr cod);
CTypePtr c_forall(std::string hint, CTypePtr body);
CTypePtr c_tuple(std::vector<CTypePtr> elems);
CTypePtr c_tvar(int index);

/// Structural equality, ignoring hints.
bool type_equal(const CTypePtr &a, const CTypePtr &b);
/// Adds `d` to every type variable index >= cutoff.
CTypePtr shift_type(const CTypePtr &t, int d, int cutoff = 0);
/// Substitutes `s` for index 0 of a binder body and lowers the rest.
CTypePtr instantiate_type(const CTypePtr &body, const CTypePtr &s);

struct CTerm;
using CTermPtr = std::shared_ptr<const CTerm>;

/// Core terms. Term variables are de Bruijn indices counting enclosing `Lam`s
/// only; type abstractions bind type indices.
struct CTerm {
  struct IntLit {
    std::int64_t value;
  };
  struct BoolLit {
    bool value;
  };
  struct Var {
    int index;
    std::string hint;
  };
  struct Lam {
    std::string hint;
    CTypePtr ann;
    CTermPtr body;
  };
  struct App {
    CTermPtr fn;
    CTermPtr arg;
  };
  struct TyLam {
    std::string hint;
    CTermPtr body;
  };
  struct TyApp {
    CTermPtr subject;
    CTypePtr arg;
  };
  struct Tuple {
    std::vector<CTermPtr> elems;
  };
  struct Proj {
    CTermPtr subject;
    int index;
  };
  struct Fix {
    CTermPtr body;
  };
  struct If {
    CTermPtr cond;
    CTermPtr then_branch;
    CTermPtr else_branch;
  };
  /// Any primitive except cons.
  struct Prim {
    PrimOp op;
    std::vector<CTermPtr> args;
  };
  struct Nil {
    CTypePtr elem;
  };
  struct Cons {
    CTermPtr head;
    CTermPtr tail;
  };
  std::variant<IntLit, BoolLit, Var, Lam, App, TyLam, TyApp, Tuple, Proj, Fix, If, Prim, Nil,
               Cons>
      node;

  template <typename T>
  const T *as() const {
    return std::get_if<T>(&node);
  }
};

CTermPtr make_term(CTerm::IntLit n);
CTermPtr make_term(CTerm::BoolLit n);
CTermPtr make_term(CTerm::Var n);
CTermPtr make_term(CTerm::Lam n);
CTermPtr make_term(CTerm::App n);
CTermPtr make_term(CTerm::TyLam n);
CTermPtr make_term(CTerm::TyApp n);
CTermPtr make_term(CTerm::Tuple n);
CTermPtr make_term(CTerm::Proj n);
CTermPtr make_term(CTerm::Fix n);
CTermPtr make_term(CTerm::If n);
CTermPtr make_term(CTerm::Prim n);
CTermPtr make_term(CTerm::Nil n);
CTermPtr make_term(CTerm::Cons n);

bool term_equal(const CTermPtr &a, const CTermPtr &b);
bool is_value(const CTermPtr &t);

struct CoreError {
  std::string message;
  /// Child-index route from the root to the offending subterm.
  std::vector<int> path;
};

/// Types a closed core term.
std::variant<CTypePtr, CoreError> sf_typecheck(const CTermPtr &t);

struct StepResult {
  enum class Kind { kStepped, kNormal, kStuck };
  Kind kind;
  CTermPtr term;  // successor when stepped
  std::string description;
};

/// One call-by-value step of a closed term. `head`/`tail` of an empty list
/// step to themselves.
StepResult sf_step(const CTermPtr &t);

struct EvalOutcome {
  enum class Kind { kValue, kDiverged, kStuck };
  Kind kind;
  CTermPtr value;
  std::int64_t steps = 0;
  std::string description;
};

inline constexpr std::int64_t kDefaultFuel = 1'000'000;

/// Steps until a value, a stuck term, or the fuel runs out. A term that
/// steps to itself never reaches a value and is reported as diverged.
EvalOutcome sf_eval(const CTermPtr &t, std::int64_t fuel = kDefaultFuel);

std::string to_string(const CTypePtr &t);
std::string to_string(const CTermPtr &t);

struct CoreParseResult {
  CTermPtr term;
  std::string error;  // empty on success
};
/// Reads the textual form produced by to_string.
CoreParseResult parse_core(std::string_view src);

}  // namespace fg::sf
