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

#include "fg/sysf.h"

#include <fmt/format.h>

#include <algorithm>
#include <cctype>
#include <functional>
#include <optional>

namespace fg::sf {

namespace {

template <typename... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <typename... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

template <typename T>
CTypePtr mk_type(T node) {
  return std::make_shared<const CType>(CType{std::move(node)});
}

}  // namespace

CTypePtr c_int() {
  static const CTypePtr kInt = mk_type(CType::Int{});
  return kInt;
}
CTypePtr c_bool() {
  static const CTypePtr kBool = mk_type(CType::Bool{});
  return kBool;
}
CTypePtr c_list(CTypePtr elem) { return mk_type(CType::List{std::move(elem)}); }
CTypePtr c_arrow(CTypePtr dom, CTypePtr cod) {
  return mk_type(CType::Arrow{std::move(dom), std::move(cod)});
}
CTypePtr c_forall(std::string hint, CTypePtr body) {
  return mk_type(CType::Forall{std::move(hint), std::move(body)});
}
CTypePtr c_tuple(std::vector<CTypePtr> elems) { return mk_type(CType::Tuple{std::move(elems)}); }
CTypePtr c_tvar(int index) { return mk_type(CType::TVar{index}); }

bool type_equal(const CTypePtr &a, const CTypePtr &b) {
  if (a == b) return true;
  if (a->node.index() != b->node.index()) return false;
  return std::visit(
      Overloaded{
          [&](const CType::Int &) { return true; },
          [&](const CType::Bool &) { return true; },
          [&](const CType::List &x) { return type_equal(x.elem, b->as<CType::List>()->elem); },
          [&](const CType::Arrow &x) {
            auto y = b->as<CType::Arrow>();
            return type_equal(x.dom, y->dom) && type_equal(x.cod, y->cod);
          },
          [&](const CType::Forall &x) { return type_equal(x.body, b->as<CType::Forall>()->body); },
          [&](const CType::Tuple &x) {
            auto y = b->as<CType::Tuple>();
            if (x.elems.size() != y->elems.size()) return false;
            for (std::size_t i = 0; i < x.elems.size(); ++i) {
              if (!type_equal(x.elems[i], y->elems[i])) return false;
            }
            return true;
          },
          [&](const CType::TVar &x) { return x.index == b->as<CType::TVar>()->index; },
      },
      a->node);
}

namespace {

// Rebuilds `t`, replacing each variable via fn(index, cutoff).
CTypePtr map_tvars(const CTypePtr &t, int cutoff,
                   const std::function<CTypePtr(int, int)> &fn) {
  return std::visit(
      Overloaded{
          [&](const CType::Int &) { return t; },
          [&](const CType::Bool &) { return t; },
          [&](const CType::List &x) { return c_list(map_tvars(x.elem, cutoff, fn)); },
          [&](const CType::Arrow &x) {
            return c_arrow(map_tvars(x.dom, cutoff, fn), map_tvars(x.cod, cutoff, fn));
          },
          [&](const CType::Forall &x) { return c_forall(x.hint, map_tvars(x.body, cutoff + 1, fn)); },
          [&](const CType::Tuple &x) {
            std::vector<CTypePtr> elems;
            for (const auto &e : x.elems) elems.push_back(map_tvars(e, cutoff, fn));
            return c_tuple(std::move(elems));
          },
          [&](const CType::TVar &x) { return fn(x.index, cutoff); },
      },
      t->node);
}

bool type_closed_above(const CTypePtr &t, int bound) {
  bool ok = true;
  map_tvars(t, 0, [&](int k, int c) {
    if (k - c >= bound) ok = false;
    return c_tvar(k);
  });
  return ok;
}

}  // namespace

CTypePtr shift_type(const CTypePtr &t, int d, int cutoff) {
  if (d == 0) return t;
  return map_tvars(t, cutoff, [d](int k, int c) { return c_tvar(k >= c ? k + d : k); });
}

namespace {
CTypePtr instantiate_type_at(const CTypePtr &body, const CTypePtr &s, int base) {
  return map_tvars(body, base, [&](int k, int c) {
    if (k == c) return shift_type(s, c);
    return c_tvar(k > c ? k - 1 : k);
  });
}
}  // namespace

CTypePtr instantiate_type(const CTypePtr &body, const CTypePtr &s) {
  return instantiate_type_at(body, s, 0);
}

// ---------------------------------------------------------------------------
// Terms

#define FG_MAKE_TERM(T) \
  CTermPtr make_term(CTerm::T n) { return std::make_shared<const CTerm>(CTerm{std::move(n)}); }
FG_MAKE_TERM(IntLit)
FG_MAKE_TERM(BoolLit)
FG_MAKE_TERM(Var)
FG_MAKE_TERM(Lam)
FG_MAKE_TERM(App)
FG_MAKE_TERM(TyLam)
FG_MAKE_TERM(TyApp)
FG_MAKE_TERM(Tuple)
FG_MAKE_TERM(Proj)
FG_MAKE_TERM(Fix)
FG_MAKE_TERM(If)
FG_MAKE_TERM(Prim)
FG_MAKE_TERM(Nil)
FG_MAKE_TERM(Cons)
#undef FG_MAKE_TERM

bool term_equal(const CTermPtr &a, const CTermPtr &b) {
  if (a == b) return true;
  if (a->node.index() != b->node.index()) return false;
  auto all_equal = [](const std::vector<CTermPtr> &x, const std::vector<CTermPtr> &y) {
    if (x.size() != y.size()) return false;
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (!term_equal(x[i], y[i])) return false;
    }
    return true;
  };
  return std::visit(
      Overloaded{
          [&](const CTerm::IntLit &x) { return x.value == b->as<CTerm::IntLit>()->value; },
          [&](const CTerm::BoolLit &x) { return x.value == b->as<CTerm::BoolLit>()->value; },
          [&](const CTerm::Var &x) { return x.index == b->as<CTerm::Var>()->index; },
          [&](const CTerm::Lam &x) {
            auto y = b->as<CTerm::Lam>();
            return type_equal(x.ann, y->ann) && term_equal(x.body, y->body);
          },
          [&](const CTerm::App &x) {
            auto y = b->as<CTerm::App>();
            return term_equal(x.fn, y->fn) && term_equal(x.arg, y->arg);
          },
          [&](const CTerm::TyLam &x) { return term_equal(x.body, b->as<CTerm::TyLam>()->body); },
          [&](const CTerm::TyApp &x) {
            auto y = b->as<CTerm::TyApp>();
            return term_equal(x.subject, y->subject) && type_equal(x.arg, y->arg);
          },
          [&](const CTerm::Tuple &x) { return all_equal(x.elems, b->as<CTerm::Tuple>()->elems); },
          [&](const CTerm::Proj &x) {
            auto y = b->as<CTerm::Proj>();
            return x.index == y->index && term_equal(x.subject, y->subject);
          },
          [&](const CTerm::Fix &x) { return term_equal(x.body, b->as<CTerm::Fix>()->body); },
          [&](const CTerm::If &x) {
            auto y = b->as<CTerm::If>();
            return term_equal(x.cond, y->cond) && term_equal(x.then_branch, y->then_branch) &&
                   term_equal(x.else_branch, y->else_branch);
          },
          [&](const CTerm::Prim &x) {
            auto y = b->as<CTerm::Prim>();
            return x.op == y->op && all_equal(x.args, y->args);
          },
          [&](const CTerm::Nil &x) { return type_equal(x.elem, b->as<CTerm::Nil>()->elem); },
          [&](const CTerm::Cons &x) {
            auto y = b->as<CTerm::Cons>();
            return term_equal(x.head, y->head) && term_equal(x.tail, y->tail);
          },
      },
      a->node);
}

bool is_value(const CTermPtr &t) {
  return std::visit(
      Overloaded{
          [](const CTerm::IntLit &) { return true; },
          [](const CTerm::BoolLit &) { return true; },
          [](const CTerm::Lam &) { return true; },
          [](const CTerm::TyLam &) { return true; },
          [](const CTerm::Nil &) { return true; },
          [](const CTerm::Tuple &x) { return std::all_of(x.elems.begin(), x.elems.end(), is_value); },
          [](const CTerm::Cons &x) { return is_value(x.head) && is_value(x.tail); },
          [](const auto &) { return false; },
      },
      t->node);
}

namespace {

// Generic rebuild of a term: term variables via on_var(index, term_cutoff,
// type_cutoff, hint), types via on_type(type, type_cutoff).
struct TermMapper {
  std::function<CTermPtr(int, int, int, const std::string &)> on_var;
  std::function<CTypePtr(const CTypePtr &, int)> on_type;

  CTermPtr operator()(const CTermPtr &t, int ct, int cy) const {
    auto sub = [&](const CTermPtr &x) { return (*this)(x, ct, cy); };
    auto subs = [&](const std::vector<CTermPtr> &xs) {
      std::vector<CTermPtr> out;
      out.reserve(xs.size());
      for (const auto &x : xs) out.push_back(sub(x));
      return out;
    };
    return std::visit(
        Overloaded{
            [&](const CTerm::IntLit &) { return t; },
            [&](const CTerm::BoolLit &) { return t; },
            [&](const CTerm::Var &x) { return on_var(x.index, ct, cy, x.hint); },
            [&](const CTerm::Lam &x) {
              return make_term(CTerm::Lam{x.hint, on_type(x.ann, cy), (*this)(x.body, ct + 1, cy)});
            },
            [&](const CTerm::App &x) { return make_term(CTerm::App{sub(x.fn), sub(x.arg)}); },
            [&](const CTerm::TyLam &x) {
              return make_term(CTerm::TyLam{x.hint, (*this)(x.body, ct, cy + 1)});
            },
            [&](const CTerm::TyApp &x) {
              return make_term(CTerm::TyApp{sub(x.subject), on_type(x.arg, cy)});
            },
            [&](const CTerm::Tuple &x) { return make_term(CTerm::Tuple{subs(x.elems)}); },
            [&](const CTerm::Proj &x) { return make_term(CTerm::Proj{sub(x.subject), x.index}); },
            [&](const CTerm::Fix &x) { return make_term(CTerm::Fix{sub(x.body)}); },
            [&](const CTerm::If &x) {
              return make_term(CTerm::If{sub(x.cond), sub(x.then_branch), sub(x.else_branch)});
            },
            [&](const CTerm::Prim &x) { return make_term(CTerm::Prim{x.op, subs(x.args)}); },
            [&](const CTerm::Nil &x) { return make_term(CTerm::Nil{on_type(x.elem, cy)}); },
            [&](const CTerm::Cons &x) { return make_term(CTerm::Cons{sub(x.head), sub(x.tail)}); },
        },
        t->node);
  }
};

CTermPtr shift_term(const CTermPtr &t, int d_term, int d_type) {
  if (d_term == 0 && d_type == 0) return t;
  TermMapper m{
      [&](int k, int ct, int, const std::string &hint) {
        return make_term(CTerm::Var{k >= ct ? k + d_term : k, hint});
      },
      [&](const CTypePtr &ty, int cy) { return shift_type(ty, d_type, cy); },
  };
  return m(t, 0, 0);
}

// body[0 := v] for a Lam body.
CTermPtr instantiate_term(const CTermPtr &body, const CTermPtr &v) {
  TermMapper m{
      [&](int k, int ct, int cy, const std::string &hint) {
        if (k == ct) return shift_term(v, ct, cy);
        return make_term(CTerm::Var{k > ct ? k - 1 : k, hint});
      },
      [](const CTypePtr &ty, int) { return ty; },
  };
  return m(body, 0, 0);
}

// body[0 := s] for a TyLam body.
CTermPtr instantiate_type_in_term(const CTermPtr &body, const CTypePtr &s) {
  TermMapper m{
      [](int k, int, int, const std::string &hint) { return make_term(CTerm::Var{k, hint}); },
      [&](const CTypePtr &ty, int cy) { return instantiate_type_at(ty, s, cy); },
  };
  return m(body, 0, 0);
}

}  // namespace

// ---------------------------------------------------------------------------
// Printing

namespace {

const std::vector<std::string_view> kCoreKeywords = {
    "lam", "Lam", "fix", "if",   "then", "else", "true", "false", "nil",
    "isnil", "head", "tail", "cons", "int", "bool", "list", "forall"};

bool is_keyword(std::string_view s) {
  return std::find(kCoreKeywords.begin(), kCoreKeywords.end(), s) != kCoreKeywords.end();
}

std::string clean_hint(const std::string &hint, const char *fallback) {
  bool ok = !hint.empty() && (std::isalpha(static_cast<unsigned char>(hint[0])) || hint[0] == '_');
  for (char ch : hint) {
    if (!std::isalnum(static_cast<unsigned char>(ch)) && ch != '_' && ch != '\'') ok = false;
  }
  if (!ok || is_keyword(hint)) return fallback;
  return hint;
}

class CorePrinter {
 public:
  explicit CorePrinter(std::vector<std::string> type_scope = {}) : types_(std::move(type_scope)) {}

  std::string type(const CTypePtr &t, int ctx = 0) {
    int level = t->is<CType::Forall>() ? 0 : t->is<CType::Arrow>() ? 1 : t->is<CType::List>() ? 2 : 3;
    auto s = std::visit(
        Overloaded{
            [&](const CType::Int &) -> std::string { return "int"; },
            [&](const CType::Bool &) -> std::string { return "bool"; },
            [&](const CType::List &x) { return "list " + type(x.elem, 2); },
            [&](const CType::Arrow &x) {
              return fmt::format("{} -> {}", type(x.dom, 2), type(x.cod, 1));
            },
            [&](const CType::Forall &x) {
              auto name = fresh(types_, clean_hint(x.hint, "t"));
              types_.push_back(name);
              auto body = type(x.body, 0);
              types_.pop_back();
              return fmt::format("forall {}. {}", name, body);
            },
            [&](const CType::Tuple &x) {
              std::vector<std::string> parts;
              for (const auto &e : x.elems) parts.push_back(type(e, 0));
              return fmt::format("{{{}}}", fmt::join(parts, ", "));
            },
            [&](const CType::TVar &x) -> std::string {
              int n = static_cast<int>(types_.size());
              if (x.index < n) return types_[n - 1 - x.index];
              return fmt::format("?{}", x.index - n);
            },
        },
        t->node);
    return level < ctx ? "(" + s + ")" : s;
  }

  std::string term(const CTermPtr &t, int ctx = 0) {
    int level = term_level(*t);
    auto s = term_inner(t);
    return level < ctx ? "(" + s + ")" : s;
  }

 private:
  static std::string fresh(const std::vector<std::string> &scope, const std::string &base) {
    auto taken = [&](const std::string &n) {
      return std::find(scope.begin(), scope.end(), n) != scope.end();
    };
    if (!taken(base)) return base;
    for (int i = 1;; ++i) {
      auto c = fmt::format("{}{}", base, i);
      if (!taken(c)) return c;
    }
  }

  static int term_level(const CTerm &t) {
    return std::visit(
        Overloaded{
            [](const CTerm::IntLit &x) { return x.value < 0 ? 4 : 6; },
            [](const CTerm::BoolLit &) { return 6; },
            [](const CTerm::Var &) { return 6; },
            [](const CTerm::Nil &) { return 6; },
            [](const CTerm::Tuple &) { return 6; },
            [](const CTerm::Proj &) { return 5; },
            [](const CTerm::App &) { return 4; },
            [](const CTerm::TyApp &) { return 4; },
            [](const CTerm::Fix &) { return 4; },
            [](const CTerm::Cons &) { return 4; },
            [](const CTerm::Prim &p) {
              switch (p.op) {
                case PrimOp::kLess:
                case PrimOp::kEqual:
                  return 1;
                case PrimOp::kAdd:
                case PrimOp::kSub:
                  return 2;
                case PrimOp::kMul:
                  return 3;
                default:
                  return 4;
              }
            },
            [](const auto &) { return 0; },
        },
        t.node);
  }

  std::string term_inner(const CTermPtr &t) {
    return std::visit(
        Overloaded{
            [&](const CTerm::IntLit &x) { return std::to_string(x.value); },
            [&](const CTerm::BoolLit &x) -> std::string { return x.value ? "true" : "false"; },
            [&](const CTerm::Var &x) -> std::string {
              int n = static_cast<int>(terms_.size());
              if (x.index < n) return terms_[n - 1 - x.index];
              return fmt::format("?{}", x.index - n);
            },
            [&](const CTerm::Lam &x) {
              auto ann = type(x.ann);
              auto name = fresh(terms_, clean_hint(x.hint, "x"));
              terms_.push_back(name);
              auto body = term(x.body);
              terms_.pop_back();
              return fmt::format("lam {}: {}. {}", name, ann, body);
            },
            [&](const CTerm::App &x) { return fmt::format("{} {}", term(x.fn, 4), arg(x.arg)); },
            [&](const CTerm::TyLam &x) {
              auto name = fresh(types_, clean_hint(x.hint, "t"));
              types_.push_back(name);
              auto body = term(x.body);
              types_.pop_back();
              return fmt::format("Lam {}. {}", name, body);
            },
            [&](const CTerm::TyApp &x) {
              return fmt::format("{} [{}]", term(x.subject, 4), type(x.arg));
            },
            [&](const CTerm::Tuple &x) {
              std::vector<std::string> parts;
              for (const auto &e : x.elems) parts.push_back(term(e));
              return fmt::format("<{}>", fmt::join(parts, ", "));
            },
            [&](const CTerm::Proj &x) { return fmt::format("{}.{}", term(x.subject, 5), x.index); },
            [&](const CTerm::Fix &x) { return "fix " + arg(x.body); },
            [&](const CTerm::If &x) {
              return fmt::format("if {} then {} else {}", term(x.cond), term(x.then_branch),
                                 term(x.else_branch));
            },
            [&](const CTerm::Prim &x) {
              if (prim_is_binary_operator(x.op)) {
                int level = term_level(*t);
                return fmt::format("{} {} {}", term(x.args[0], level), prim_name(x.op),
                                   term(x.args[1], level + 1));
              }
              std::string s(prim_name(x.op));
              for (const auto &a : x.args) s += " " + arg(a);
              return s;
            },
            [&](const CTerm::Nil &x) { return fmt::format("nil[{}]", type(x.elem)); },
            [&](const CTerm::Cons &x) {
              return fmt::format("cons {} {}", arg(x.head), arg(x.tail));
            },
        },
        t->node);
  }

  // Tuples in argument position would read as a comparison.
  std::string arg(const CTermPtr &a) {
    if (a->as<CTerm::Tuple>()) return "(" + term(a) + ")";
    return term(a, 5);
  }

  std::vector<std::string> types_;
  std::vector<std::string> terms_;
};

}  // namespace

std::string to_string(const CTypePtr &t) { return CorePrinter{}.type(t); }
std::string to_string(const CTermPtr &t) { return CorePrinter{}.term(t); }

// ---------------------------------------------------------------------------
// Type checking

namespace {

struct CheckFailure {
  std::string message;
};

class CoreChecker {
 public:
  std::vector<int> path;

  CTypePtr check(const CTermPtr &t) {
    return std::visit(
        Overloaded{
            [&](const CTerm::IntLit &) { return c_int(); },
            [&](const CTerm::BoolLit &) { return c_bool(); },
            [&](const CTerm::Var &x) {
              int n = static_cast<int>(ctx_.size());
              if (x.index < 0 || x.index >= n) fail(fmt::format("unbound variable {}", x.index));
              const auto &b = ctx_[n - 1 - x.index];
              return shift_type(b.type, static_cast<int>(type_names_.size()) - b.type_depth);
            },
            [&](const CTerm::Lam &x) {
              well_formed(x.ann);
              ctx_.push_back({x.ann, static_cast<int>(type_names_.size())});
              auto body = child(x.body, 0);
              ctx_.pop_back();
              return c_arrow(x.ann, body);
            },
            [&](const CTerm::App &x) {
              auto fn = child(x.fn, 0);
              auto a = child(x.arg, 1);
              auto arrow = fn->as<CType::Arrow>();
              if (!arrow) fail(fmt::format("applied a non-function of type {}", show(fn)));
              if (!type_equal(arrow->dom, a)) {
                fail(fmt::format("the parameter type is {} but the argument type is {}",
                                 show(arrow->dom), show(a)));
              }
              return arrow->cod;
            },
            [&](const CTerm::TyLam &x) {
              type_names_.push_back(clean_hint(x.hint, "t"));
              auto body = child(x.body, 0);
              type_names_.pop_back();
              return c_forall(x.hint, body);
            },
            [&](const CTerm::TyApp &x) {
              well_formed(x.arg);
              auto s = child(x.subject, 0);
              auto f = s->as<CType::Forall>();
              if (!f) fail(fmt::format("instantiated a non-universal type {}", show(s)));
              return instantiate_type(f->body, x.arg);
            },
            [&](const CTerm::Tuple &x) {
              std::vector<CTypePtr> elems;
              for (std::size_t i = 0; i < x.elems.size(); ++i) {
                elems.push_back(child(x.elems[i], static_cast<int>(i)));
              }
              return c_tuple(std::move(elems));
            },
            [&](const CTerm::Proj &x) {
              auto s = child(x.subject, 0);
              auto tup = s->as<CType::Tuple>();
              if (!tup) fail(fmt::format("projection from non-tuple type {}", show(s)));
              if (x.index < 0 || x.index >= static_cast<int>(tup->elems.size())) {
                fail(fmt::format("projection {} out of range for {}", x.index, show(s)));
              }
              return tup->elems[static_cast<std::size_t>(x.index)];
            },
            [&](const CTerm::Fix &x) {
              auto b = child(x.body, 0);
              auto arrow = b->as<CType::Arrow>();
              if (!arrow || !type_equal(arrow->dom, arrow->cod)) {
                fail(fmt::format("fix expects T -> T, got {}", show(b)));
              }
              return arrow->dom;
            },
            [&](const CTerm::If &x) {
              auto c = child(x.cond, 0);
              if (!c->is<CType::Bool>()) fail(fmt::format("condition has type {}", show(c)));
              auto a = child(x.then_branch, 1);
              auto b = child(x.else_branch, 2);
              if (!type_equal(a, b)) {
                fail(fmt::format("branches differ: {} vs {}", show(a), show(b)));
              }
              return a;
            },
            [&](const CTerm::Prim &x) { return prim(x); },
            [&](const CTerm::Nil &x) {
              well_formed(x.elem);
              return c_list(x.elem);
            },
            [&](const CTerm::Cons &x) {
              auto h = child(x.head, 0);
              auto tl = child(x.tail, 1);
              auto l = tl->as<CType::List>();
              if (!l || !type_equal(l->elem, h)) {
                fail(fmt::format("cons of {} onto {}", show(h), show(tl)));
              }
              return tl;
            },
        },
        t->node);
  }

 private:
  struct Binding {
    CTypePtr type;
    int type_depth;
  };

  [[noreturn]] void fail(std::string message) { throw CheckFailure{std::move(message)}; }

  std::string show(const CTypePtr &t) { return CorePrinter(type_names_).type(t); }

  void well_formed(const CTypePtr &t) {
    if (!type_closed_above(t, static_cast<int>(type_names_.size()))) {
      fail(fmt::format("type {} has an unbound variable", show(t)));
    }
  }

  CTypePtr child(const CTermPtr &t, int i) {
    path.push_back(i);
    auto r = check(t);
    path.pop_back();
    return r;
  }

  CTypePtr prim(const CTerm::Prim &x) {
    if (static_cast<int>(x.args.size()) != prim_arity(x.op) || x.op == PrimOp::kCons) {
      fail(fmt::format("bad primitive {}", prim_name(x.op)));
    }
    std::vector<CTypePtr> args;
    for (std::size_t i = 0; i < x.args.size(); ++i) {
      args.push_back(child(x.args[i], static_cast<int>(i)));
    }
    if (prim_is_binary_operator(x.op)) {
      for (const auto &a : args) {
        if (!a->is<CType::Int>()) {
          fail(fmt::format("operator {} expects int, got {}", prim_name(x.op), show(a)));
        }
      }
      return x.op == PrimOp::kLess || x.op == PrimOp::kEqual ? c_bool() : c_int();
    }
    auto l = args[0]->as<CType::List>();
    if (!l) fail(fmt::format("{} expects a list, got {}", prim_name(x.op), show(args[0])));
    if (x.op == PrimOp::kIsNil) return c_bool();
    if (x.op == PrimOp::kHead) return l->elem;
    return args[0];
  }

  std::vector<Binding> ctx_;
  std::vector<std::string> type_names_;
};

}  // namespace

std::variant<CTypePtr, CoreError> sf_typecheck(const CTermPtr &t) {
  CoreChecker checker;
  try {
    return checker.check(t);
  } catch (const CheckFailure &f) {
    return CoreError{f.message, checker.path};
  }
}

// ---------------------------------------------------------------------------
// Evaluation

namespace {

StepResult stepped(CTermPtr t) { return {StepResult::Kind::kStepped, std::move(t), {}}; }
// A congruence step keeps the inner step's description.
StepResult restepped(const StepResult &inner, CTermPtr t) {
  return {StepResult::Kind::kStepped, std::move(t), inner.description};
}
constexpr std::string_view kSelfLoop = "steps to itself";
StepResult stuck(std::string why) { return {StepResult::Kind::kStuck, nullptr, std::move(why)}; }
StepResult normal() { return {StepResult::Kind::kNormal, nullptr, {}}; }

std::int64_t wrap(std::uint64_t v) { return static_cast<std::int64_t>(v); }

StepResult apply_prim(const CTerm::Prim &p, const CTermPtr &self) {
  if (prim_is_binary_operator(p.op)) {
    auto a = p.args[0]->as<CTerm::IntLit>();
    auto b = p.args[1]->as<CTerm::IntLit>();
    if (!a || !b) return stuck(fmt::format("operator {} on non-integers", prim_name(p.op)));
    auto ua = static_cast<std::uint64_t>(a->value);
    auto ub = static_cast<std::uint64_t>(b->value);
    switch (p.op) {
      case PrimOp::kAdd:
        return stepped(make_term(CTerm::IntLit{wrap(ua + ub)}));
      case PrimOp::kSub:
        return stepped(make_term(CTerm::IntLit{wrap(ua - ub)}));
      case PrimOp::kMul:
        return stepped(make_term(CTerm::IntLit{wrap(ua * ub)}));
      case PrimOp::kLess:
        return stepped(make_term(CTerm::BoolLit{a->value < b->value}));
      default:
        return stepped(make_term(CTerm::BoolLit{a->value == b->value}));
    }
  }
  const auto &l = p.args[0];
  if (l->as<CTerm::Nil>()) {
    if (p.op == PrimOp::kIsNil) return stepped(make_term(CTerm::BoolLit{true}));
    return {StepResult::Kind::kStepped, self, std::string(kSelfLoop)};
  }
  auto c = l->as<CTerm::Cons>();
  if (!c) return stuck(fmt::format("{} of a non-list", prim_name(p.op)));
  switch (p.op) {
    case PrimOp::kIsNil:
      return stepped(make_term(CTerm::BoolLit{false}));
    case PrimOp::kHead:
      return stepped(c->head);
    default:
      return stepped(c->tail);
  }
}

}  // namespace

StepResult sf_step(const CTermPtr &t) {
  // Steps the first non-value among `kids`; rebuild() receives the new list.
  auto step_first = [](const std::vector<CTermPtr> &kids,
                       const std::function<CTermPtr(std::vector<CTermPtr>)> &rebuild)
      -> std::optional<StepResult> {
    for (std::size_t i = 0; i < kids.size(); ++i) {
      if (is_value(kids[i])) continue;
      auto r = sf_step(kids[i]);
      if (r.kind != StepResult::Kind::kStepped) return r.kind == StepResult::Kind::kStuck ? r : stuck("no step");
      auto next = kids;
      next[i] = r.term;
      return restepped(r, rebuild(std::move(next)));
    }
    return std::nullopt;
  };
  return std::visit(
      Overloaded{
          [&](const CTerm::IntLit &) { return normal(); },
          [&](const CTerm::BoolLit &) { return normal(); },
          [&](const CTerm::Lam &) { return normal(); },
          [&](const CTerm::TyLam &) { return normal(); },
          [&](const CTerm::Nil &) { return normal(); },
          [&](const CTerm::Var &x) { return stuck(fmt::format("free variable {}", x.index)); },
          [&](const CTerm::App &x) {
            if (auto r = step_first({x.fn, x.arg}, [](std::vector<CTermPtr> k) {
                  return make_term(CTerm::App{k[0], k[1]});
                })) {
              return *r;
            }
            auto lam = x.fn->as<CTerm::Lam>();
            if (!lam) return stuck("application of a non-function");
            return stepped(instantiate_term(lam->body, x.arg));
          },
          [&](const CTerm::TyApp &x) {
            if (!is_value(x.subject)) {
              auto r = sf_step(x.subject);
              if (r.kind != StepResult::Kind::kStepped) return r;
              return restepped(r, make_term(CTerm::TyApp{r.term, x.arg}));
            }
            auto tl = x.subject->as<CTerm::TyLam>();
            if (!tl) return stuck("type application of a non-type-abstraction");
            return stepped(instantiate_type_in_term(tl->body, x.arg));
          },
          [&](const CTerm::Tuple &x) {
            if (auto r = step_first(x.elems, [](std::vector<CTermPtr> k) {
                  return make_term(CTerm::Tuple{std::move(k)});
                })) {
              return *r;
            }
            return normal();
          },
          [&](const CTerm::Proj &x) {
            if (!is_value(x.subject)) {
              auto r = sf_step(x.subject);
              if (r.kind != StepResult::Kind::kStepped) return r;
              return restepped(r, make_term(CTerm::Proj{r.term, x.index}));
            }
            auto tup = x.subject->as<CTerm::Tuple>();
            if (!tup || x.index < 0 || x.index >= static_cast<int>(tup->elems.size())) {
              return stuck("bad projection");
            }
            return stepped(tup->elems[static_cast<std::size_t>(x.index)]);
          },
          [&](const CTerm::Fix &x) {
            if (!is_value(x.body)) {
              auto r = sf_step(x.body);
              if (r.kind != StepResult::Kind::kStepped) return r;
              return restepped(r, make_term(CTerm::Fix{r.term}));
            }
            auto lam = x.body->as<CTerm::Lam>();
            if (!lam) return stuck("fix of a non-function");
            return stepped(instantiate_term(lam->body, t));
          },
          [&](const CTerm::If &x) {
            if (!is_value(x.cond)) {
              auto r = sf_step(x.cond);
              if (r.kind != StepResult::Kind::kStepped) return r;
              return restepped(r, make_term(CTerm::If{r.term, x.then_branch, x.else_branch}));
            }
            auto b = x.cond->as<CTerm::BoolLit>();
            if (!b) return stuck("condition is not a boolean");
            return stepped(b->value ? x.then_branch : x.else_branch);
          },
          [&](const CTerm::Prim &x) {
            if (auto r = step_first(x.args, [op = x.op](std::vector<CTermPtr> k) {
                  return make_term(CTerm::Prim{op, std::move(k)});
                })) {
              return *r;
            }
            return apply_prim(x, t);
          },
          [&](const CTerm::Cons &x) {
            if (auto r = step_first({x.head, x.tail}, [](std::vector<CTermPtr> k) {
                  return make_term(CTerm::Cons{k[0], k[1]});
                })) {
              return *r;
            }
            return normal();
          },
      },
      t->node);
}

EvalOutcome sf_eval(const CTermPtr &t, std::int64_t fuel) {
  CTermPtr cur = t;
  std::int64_t steps = 0;
  while (true) {
    if (is_value(cur)) return {EvalOutcome::Kind::kValue, cur, steps, {}};
    if (steps >= fuel) return {EvalOutcome::Kind::kDiverged, nullptr, steps, {}};
    auto r = sf_step(cur);
    if (r.kind == StepResult::Kind::kStuck) {
      return {EvalOutcome::Kind::kStuck, nullptr, steps, r.description};
    }
    if (r.kind == StepResult::Kind::kNormal) {
      return {EvalOutcome::Kind::kStuck, nullptr, steps, "normal form is not a value"};
    }
    ++steps;
    if (r.description == kSelfLoop) {
      return {EvalOutcome::Kind::kDiverged, nullptr, steps, r.description};
    }
    cur = r.term;
  }
}

// ---------------------------------------------------------------------------
// Parsing the textual form

namespace {

struct CoreToken {
  enum class Kind { kInt, kId, kSym, kEnd } kind;
  std::string text;
};

struct CoreSyntaxError {
  std::string message;
};

class CoreParser {
 public:
  explicit CoreParser(std::string_view src) { lex(src); }

  CTermPtr program() {
    auto t = term();
    if (peek().kind != CoreToken::Kind::kEnd) fail("trailing input at '" + peek().text + "'");
    return t;
  }

 private:
  [[noreturn]] static void fail(std::string m) { throw CoreSyntaxError{std::move(m)}; }

  void lex(std::string_view s) {
    std::size_t i = 0;
    while (i < s.size()) {
      char c = s[i];
      if (std::isspace(static_cast<unsigned char>(c))) {
        ++i;
      } else if (std::isdigit(static_cast<unsigned char>(c))) {
        std::size_t j = i;
        while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
        toks_.push_back({CoreToken::Kind::kInt, std::string(s.substr(i, j - i))});
        i = j;
      } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        std::size_t j = i;
        while (j < s.size() && (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '_' ||
                                s[j] == '\'')) {
          ++j;
        }
        toks_.push_back({CoreToken::Kind::kId, std::string(s.substr(i, j - i))});
        i = j;
      } else if (s.substr(i, 2) == "->" || s.substr(i, 2) == "==") {
        toks_.push_back({CoreToken::Kind::kSym, std::string(s.substr(i, 2))});
        i += 2;
      } else if (std::string_view("()<>{}[],.:+-*").find(c) != std::string_view::npos) {
        toks_.push_back({CoreToken::Kind::kSym, std::string(1, c)});
        ++i;
      } else {
        fail(fmt::format("unexpected character '{}'", c));
      }
    }
    toks_.push_back({CoreToken::Kind::kEnd, "<end>"});
  }

  const CoreToken &peek(std::size_t k = 0) const {
    return toks_[std::min(pos_ + k, toks_.size() - 1)];
  }
  bool at(std::string_view sym) const {
    return peek().kind != CoreToken::Kind::kInt && peek().kind != CoreToken::Kind::kEnd &&
           peek().text == sym;
  }
  void expect(std::string_view sym) {
    if (!at(sym)) fail(fmt::format("expected '{}' but found '{}'", sym, peek().text));
    ++pos_;
  }
  std::string ident() {
    if (peek().kind != CoreToken::Kind::kId || is_keyword(peek().text)) {
      fail(fmt::format("expected identifier but found '{}'", peek().text));
    }
    return toks_[pos_++].text;
  }

  static int index_of(const std::vector<std::string> &scope, const std::string &name) {
    for (int i = static_cast<int>(scope.size()) - 1; i >= 0; --i) {
      if (scope[static_cast<std::size_t>(i)] == name) {
        return static_cast<int>(scope.size()) - 1 - i;
      }
    }
    return -1;
  }

  CTypePtr type() {
    if (at("forall")) {
      ++pos_;
      auto name = ident();
      expect(".");
      types_.push_back(name);
      auto body = type();
      types_.pop_back();
      return c_forall(name, body);
    }
    auto dom = unary_type();
    if (at("->")) {
      ++pos_;
      return c_arrow(dom, type());
    }
    return dom;
  }

  CTypePtr unary_type() {
    if (at("list")) {
      ++pos_;
      return c_list(unary_type());
    }
    return atom_type();
  }

  CTypePtr atom_type() {
    if (at("int")) {
      ++pos_;
      return c_int();
    }
    if (at("bool")) {
      ++pos_;
      return c_bool();
    }
    if (at("(")) {
      ++pos_;
      auto t = type();
      expect(")");
      return t;
    }
    if (at("{")) {
      ++pos_;
      std::vector<CTypePtr> elems;
      if (!at("}")) {
        elems.push_back(type());
        while (at(",")) {
          ++pos_;
          elems.push_back(type());
        }
      }
      expect("}");
      return c_tuple(std::move(elems));
    }
    auto name = ident();
    int k = index_of(types_, name);
    if (k < 0) fail("unbound type variable " + name);
    return c_tvar(k);
  }

  CTermPtr term() {
    if (at("lam")) {
      ++pos_;
      auto name = ident();
      expect(":");
      auto ann = type();
      expect(".");
      terms_.push_back(name);
      auto body = term();
      terms_.pop_back();
      return make_term(CTerm::Lam{name, ann, body});
    }
    if (at("Lam")) {
      ++pos_;
      auto name = ident();
      expect(".");
      types_.push_back(name);
      auto body = term();
      types_.pop_back();
      return make_term(CTerm::TyLam{name, body});
    }
    if (at("if")) {
      ++pos_;
      auto c = term();
      expect("then");
      auto a = term();
      expect("else");
      auto b = term();
      return make_term(CTerm::If{c, a, b});
    }
    return binop(1);
  }

  static std::optional<PrimOp> binary_at(const CoreToken &t, int level) {
    if (t.kind != CoreToken::Kind::kSym) return std::nullopt;
    if (level == 1 && t.text == "<") return PrimOp::kLess;
    if (level == 1 && t.text == "==") return PrimOp::kEqual;
    if (level == 2 && t.text == "+") return PrimOp::kAdd;
    if (level == 2 && t.text == "-") return PrimOp::kSub;
    if (level == 3 && t.text == "*") return PrimOp::kMul;
    return std::nullopt;
  }

  CTermPtr binop(int level) {
    if (level > 3) return app();
    auto lhs = binop(level + 1);
    while (auto op = binary_at(peek(), level)) {
      ++pos_;
      auto rhs = binop(level + 1);
      lhs = make_term(CTerm::Prim{*op, {lhs, rhs}});
    }
    return lhs;
  }

  bool atom_start() const {
    const auto &t = peek();
    if (t.kind == CoreToken::Kind::kInt) return true;
    if (t.kind == CoreToken::Kind::kId) {
      return t.text == "true" || t.text == "false" || t.text == "nil" || !is_keyword(t.text);
    }
    return t.kind == CoreToken::Kind::kSym && t.text == "(";
  }

  CTermPtr app() {
    if (at("-") && peek(1).kind == CoreToken::Kind::kInt) {
      ++pos_;
      return make_term(CTerm::IntLit{negative(toks_[pos_++].text)});
    }
    if (at("fix")) {
      ++pos_;
      return make_term(CTerm::Fix{postfix()});
    }
    for (auto op : {PrimOp::kIsNil, PrimOp::kHead, PrimOp::kTail}) {
      if (at(prim_name(op))) {
        ++pos_;
        return make_term(CTerm::Prim{op, {postfix()}});
      }
    }
    if (at("cons")) {
      ++pos_;
      auto h = postfix();
      auto tl = postfix();
      return make_term(CTerm::Cons{h, tl});
    }
    auto t = postfix();
    while (true) {
      if (at("[")) {
        ++pos_;
        auto ty = type();
        expect("]");
        t = make_term(CTerm::TyApp{t, ty});
      } else if (atom_start()) {
        t = make_term(CTerm::App{t, postfix()});
      } else {
        return t;
      }
    }
  }

  CTermPtr postfix() {
    auto t = atom();
    while (at(".") && peek(1).kind == CoreToken::Kind::kInt) {
      ++pos_;
      t = make_term(CTerm::Proj{t, std::stoi(toks_[pos_++].text)});
    }
    return t;
  }

  static std::int64_t positive(const std::string &digits) {
    return static_cast<std::int64_t>(std::stoull(digits));
  }
  static std::int64_t negative(const std::string &digits) {
    return static_cast<std::int64_t>(0ULL - std::stoull(digits));
  }

  CTermPtr atom() {
    const auto &t = peek();
    if (t.kind == CoreToken::Kind::kInt) {
      ++pos_;
      return make_term(CTerm::IntLit{positive(t.text)});
    }
    if (at("true") || at("false")) {
      bool v = peek().text == "true";
      ++pos_;
      return make_term(CTerm::BoolLit{v});
    }
    if (at("nil")) {
      ++pos_;
      expect("[");
      auto ty = type();
      expect("]");
      return make_term(CTerm::Nil{ty});
    }
    if (at("<")) {
      ++pos_;
      std::vector<CTermPtr> elems;
      if (!at(">")) {
        elems.push_back(term());
        while (at(",")) {
          ++pos_;
          elems.push_back(term());
        }
      }
      expect(">");
      return make_term(CTerm::Tuple{std::move(elems)});
    }
    if (at("(")) {
      ++pos_;
      auto e = term();
      expect(")");
      return e;
    }
    auto name = ident();
    int k = index_of(terms_, name);
    if (k < 0) fail("unbound variable " + name);
    return make_term(CTerm::Var{k, name});
  }

  std::vector<CoreToken> toks_;
  std::size_t pos_ = 0;
  std::vector<std::string> types_;
  std::vector<std::string> terms_;
};

}  // namespace

CoreParseResult parse_core(std::string_view src) {
  try {
    return {CoreParser(src).program(), {}};
  } catch (const CoreSyntaxError &e) {
    return {nullptr, e.message};
  } catch (const std::exception &e) {
    return {nullptr, e.what()};
  }
}

}  // namespace fg::sf
