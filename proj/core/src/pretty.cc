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

#include "fg/pretty.h"

#include <fmt/format.h>

#include <algorithm>
#include <optional>
#include <set>

namespace fg {

namespace {

template <typename... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <typename... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

// Type precedence: 0 forall/constrained, 1 arrow, 2 list, 3 atom.
// Expression precedence: 0 keyword forms, 1 comparison, 2 additive,
// 3 multiplicative, 4 application, 5 atom.
class Printer {
 public:
  std::string type(const TypePtr &t, int ctx = 0) {
    int level = type_level(*t);
    std::string s = type_inner(t);
    return level < ctx ? "(" + s + ")" : s;
  }

  std::string constraint(const Constraint &c) {
    if (c.is_concept()) return model(c.model());
    const auto &s = std::get<Constraint::Same>(c.node);
    return fmt::format("{} == {}", type(s.lhs, 1), type(s.rhs, 1));
  }

  std::string model(const ModelId &m) {
    std::vector<std::string> args;
    for (const auto &a : m.args) args.push_back(type(a));
    return fmt::format("{}<{}>", m.concept_name, fmt::join(args, ", "));
  }

  std::string expr(const ExprPtr &e, int ctx = 0) {
    int level = expr_level(*e);
    std::string s = expr_inner(e);
    return level < ctx ? "(" + s + ")" : s;
  }

 private:
  static int type_level(const Type &t) {
    if (t.is<Type::Forall>() || t.is<Type::Constrained>()) return 0;
    if (t.is<Type::Arrow>()) return 1;
    if (t.is<Type::List>()) return 2;
    return 3;
  }

  bool name_taken(const std::string &n) const {
    return std::any_of(scope_.begin(), scope_.end(),
                       [&](const auto &e) { return e.name == n; });
  }

  std::string pick_name(const std::string &hint, const std::set<std::string> &avoid = {}) {
    std::string base = hint.empty() ? "t" : hint;
    auto taken = [&](const std::string &n) { return name_taken(n) || avoid.count(n) > 0; };
    if (!taken(base)) return base;
    for (int i = 1;; ++i) {
      auto candidate = fmt::format("{}{}", base, i);
      if (!taken(candidate)) return candidate;
    }
  }

  // Surface names of the variables in t that print under their own name.
  void var_names(const TypePtr &t, std::set<std::string> &out) const {
    auto go = [&](const TypePtr &x) { var_names(x, out); };
    auto go_c = [&](const Constraint &c) {
      if (c.is_concept()) {
        for (const auto &a : c.model().args) go(a);
      } else {
        const auto &s = std::get<Constraint::Same>(c.node);
        go(s.lhs);
        go(s.rhs);
      }
    };
    std::visit(Overloaded{
                   [&](const Type::List &l) { go(l.elem); },
                   [&](const Type::Arrow &a) {
                     go(a.dom);
                     go(a.cod);
                   },
                   [&](const Type::Forall &f) { go(f.body); },
                   [&](const Type::Constrained &c) {
                     go_c(c.constraint);
                     go(c.body);
                   },
                   [&](const Type::Var &v) { out.insert(v.name); },
                   [&](const Type::Path &p) {
                     for (const auto &m : p.prefix) {
                       for (const auto &a : m.args) go(a);
                     }
                   },
                   [&](const auto &) {},
               },
               t->node);
  }

  struct ScopeEntry {
    std::string name;
    bool is_forall;
    TypeVarId id;
  };

  std::string type_inner(const TypePtr &t) {
    return std::visit(
        Overloaded{
            [&](const Type::Int &) -> std::string { return "int"; },
            [&](const Type::Bool &) -> std::string { return "bool"; },
            [&](const Type::Error &) -> std::string { return "<error>"; },
            [&](const Type::List &l) { return "list " + type(l.elem, 2); },
            [&](const Type::Arrow &a) {
              return fmt::format("{} -> {}", type(a.dom, 2), type(a.cod, 0));
            },
            [&](const Type::Forall &f) {
              std::set<std::string> avoid;
              var_names(f.body, avoid);
              auto name = pick_name(f.hint, avoid);
              scope_.push_back({name, true, 0});
              auto body = type(f.body, 0);
              scope_.pop_back();
              return fmt::format("forall {}. {}", name, body);
            },
            [&](const Type::Constrained &c) {
              return fmt::format("{} => {}", constraint(c.constraint), type(c.body, 0));
            },
            [&](const Type::Var &v) {
              for (auto it = scope_.rbegin(); it != scope_.rend(); ++it) {
                if (!it->is_forall && it->id == v.id) return it->name;
              }
              return v.name;
            },
            [&](const Type::Bound &b) {
              std::uint32_t seen = 0;
              for (auto it = scope_.rbegin(); it != scope_.rend(); ++it) {
                if (!it->is_forall) continue;
                if (seen == b.index) return it->name;
                ++seen;
              }
              return fmt::format("^{}", b.index);
            },
            [&](const Type::Path &p) {
              std::string s;
              for (const auto &m : p.prefix) s += model(m) + ".";
              return s + p.name;
            },
        },
        t->node);
  }

  // "a ; b ; c" with empty sections left blank: "E ; ; f : S".
  static std::string sections(const std::vector<std::string> &parts) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
      if (i > 0) out += parts[i - 1].empty() ? "; " : " ; ";
      out += parts[i];
    }
    while (!out.empty() && out.back() == ' ') out.pop_back();
    return out;
  }

  std::string bind_type_var(const TypeBinder &b) {
    auto name = pick_name(b.name);
    scope_.push_back({name, false, b.id});
    return name;
  }

  static int expr_level(const Expr &e) {
    return std::visit(
        Overloaded{
            [](const Expr::IntLit &) { return 5; },
            [](const Expr::BoolLit &) { return 5; },
            [](const Expr::PathE &) { return 5; },
            [](const Expr::ListLit &) { return 5; },
            [](const Expr::App &) { return 4; },
            [](const Expr::TyApp &) { return 4; },
            [](const Expr::Fix &) { return 4; },
            [](const Expr::Prim &p) {
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
        e.node);
  }

  std::string expr_inner(const ExprPtr &e) {
    return std::visit(
        Overloaded{
            [&](const Expr::IntLit &x) { return std::to_string(x.value); },
            [&](const Expr::BoolLit &x) -> std::string { return x.value ? "true" : "false"; },
            [&](const Expr::Lam &x) {
              if (x.ann) return fmt::format("lam {}: {}. {}", x.param, type(x.ann, 1), expr(x.body));
              return fmt::format("lam {}. {}", x.param, expr(x.body));
            },
            [&](const Expr::App &x) {
              // A list literal argument would read back as a type application.
              int arg_ctx = x.arg->as<Expr::ListLit>() ? 6 : 5;
              return fmt::format("{} {}", expr(x.fn, 4), expr(x.arg, arg_ctx));
            },
            [&](const Expr::TyLam &x) {
              auto mark = scope_.size();
              auto name = bind_type_var(x.binder);
              auto body = expr(x.body);
              scope_.resize(mark);
              return fmt::format("Lam {}. {}", name, body);
            },
            [&](const Expr::TyApp &x) {
              return fmt::format("{} [{}]", expr(x.subject, 4), type(x.arg));
            },
            [&](const Expr::ConstrainedE &x) {
              return fmt::format("{} => {}", constraint(x.constraint), expr(x.body));
            },
            [&](const Expr::PathE &x) {
              std::string s;
              for (const auto &m : x.path.prefix) s += model(m) + ".";
              return s + x.path.name;
            },
            [&](const Expr::ConceptDecl &x) { return concept_decl(*x.info, x.rest); },
            [&](const Expr::ModelDecl &x) { return model_decl(*x.info, x.rest); },
            [&](const Expr::TypeAlias &x) {
              auto rhs = type(x.rhs);
              auto mark = scope_.size();
              auto name = bind_type_var(x.binder);
              auto rest = expr(x.rest);
              scope_.resize(mark);
              return fmt::format("type {} = {} in\n{}", name, rhs, rest);
            },
            [&](const Expr::Let &x) {
              return fmt::format("let {} = {} in\n{}", x.name, expr(x.bound), expr(x.rest));
            },
            [&](const Expr::Fix &x) { return "fix " + expr(x.body, 5); },
            [&](const Expr::If &x) {
              return fmt::format("if {} then {} else {}", expr(x.cond), expr(x.then_branch),
                                 expr(x.else_branch));
            },
            [&](const Expr::ListLit &x) {
              if (x.elems.empty()) return fmt::format("nil[{}]", type(x.elem_type));
              std::vector<std::string> parts;
              for (const auto &el : x.elems) parts.push_back(expr(el));
              return fmt::format("[{}]", fmt::join(parts, ", "));
            },
            [&](const Expr::Prim &x) {
              if (prim_is_binary_operator(x.op)) {
                int level = expr_level(*e);
                return fmt::format("{} {} {}", expr(x.args[0], level), prim_name(x.op),
                                   expr(x.args[1], level + 1));
              }
              std::string s(prim_name(x.op));
              for (const auto &a : x.args) s += " " + expr(a, 5);
              return s;
            },
        },
        e->node);
  }

  std::string concept_decl(const ConceptInfo &info, const ExprPtr &rest) {
    auto mark = scope_.size();
    std::vector<std::string> params, assoc, nested, members;
    for (const auto &p : info.params) params.push_back(bind_type_var(p));
    for (const auto &a : info.assoc) {
      // Associated type names are referenced by name from paths; keep them.
      scope_.push_back({a.name, false, a.id});
      assoc.push_back(a.name);
    }
    for (const auto &c : info.nested) nested.push_back(constraint(c));
    for (const auto &[name, ty] : info.members) {
      members.push_back(fmt::format("{} : {}", name, type(ty)));
    }
    scope_.resize(mark);
    return fmt::format("concept {}<{}> {{ {} }} in\n{}", info.name, fmt::join(params, ", "),
                       sections({fmt::format("{}", fmt::join(assoc, ", ")),
                                 fmt::format("{}", fmt::join(nested, ", ")),
                                 fmt::format("{}", fmt::join(members, ", "))}),
                       expr(rest));
  }

  std::string model_decl(const ModelInfo &info, const ExprPtr &rest) {
    std::vector<std::string> args, assoc, members;
    for (const auto &a : info.args) args.push_back(type(a));
    for (const auto &[name, ty] : info.assoc_binds) {
      assoc.push_back(fmt::format("{} = {}", name, type(ty)));
    }
    for (const auto &[name, e] : info.member_binds) {
      members.push_back(fmt::format("{} = {}", name, expr(e)));
    }
    return fmt::format("model {}<{}> {{ {} }} in\n{}", info.concept_name, fmt::join(args, ", "),
                       sections({fmt::format("{}", fmt::join(assoc, ", ")),
                                 fmt::format("{}", fmt::join(members, ", "))}),
                       expr(rest));
  }

  std::vector<ScopeEntry> scope_;
};

}  // namespace

std::string pretty(const ExprPtr &e) { return Printer{}.expr(e); }
std::string to_string(const TypePtr &t) { return Printer{}.type(t); }
std::string to_string(const Constraint &c) { return Printer{}.constraint(c); }
std::string to_string(const ModelId &m) { return Printer{}.model(m); }

}  // namespace fg
