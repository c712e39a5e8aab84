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

#include "fg/typecheck.h"

#include <fmt/format.h>

#include <functional>

#include "checker_internal.h"
#include "fg/elaborate.h"
#include "fg/parser.h"
#include "fg/pretty.h"
#include "fg/sysf.h"
#include "fg/typeq.h"

namespace fg {

namespace {

using sf::CTermPtr;
using sf::CTypePtr;
using typeq::Head;

struct Typed {
  TypePtr type;
  CTermPtr core;
  CTypePtr ctype;
};

Typed failed() { return {error_type(), nullptr, nullptr}; }

bool is_error(const TypePtr &t) { return t->is<Type::Error>(); }

struct Mismatch {
  std::string_view code;
  std::function<std::string(const TypePtr &expected, const TypePtr &actual)> message;
};

Mismatch plain_mismatch() {
  return {codes::kMismatch, [](const TypePtr &e, const TypePtr &a) {
            return fmt::format("expected type {} but found {}", to_string(e), to_string(a));
          }};
}

Mismatch operand_mismatch(PrimOp op) {
  return {codes::kMismatch, [op](const TypePtr &e, const TypePtr &a) {
            return fmt::format("operator {} expects {} operands but found {}", prim_name(op),
                               to_string(e), to_string(a));
          }};
}

std::optional<Head> head_of(const TypePtr &t) {
  if (t->is<Type::Int>()) return Head::kInt;
  if (t->is<Type::Bool>()) return Head::kBool;
  if (t->is<Type::List>()) return Head::kList;
  if (t->is<Type::Arrow>()) return Head::kArrow;
  if (t->is<Type::Forall>()) return Head::kForall;
  return std::nullopt;
}

/// A member of t's class with the given constructor, or null.
TypePtr expose(const Env &env, const TypePtr &t, Head head) {
  if (head_of(t) == head) return t;
  typeq::VarLevelFn visible = [](TypeVarId id) -> std::optional<int> {
    if (is_group_parameter(id)) return std::nullopt;
    return 0;
  };
  auto m = env.closure().member_with_head(t, head, visible);
  return m ? *m : nullptr;
}

bool equal_in(const Env &env, const TypePtr &a, const TypePtr &b) {
  return typeq::types_equal(env.closure(), a, b);
}

/// Rebuilds t bottom-up, replacing each path for which `f` returns non-null.
TypePtr rewrite_paths(const TypePtr &t, const std::function<TypePtr(const TypePtr &)> &f) {
  if (t->is<Type::Path>()) {
    if (auto r = f(t)) return r;
    return t;
  }
  if (auto l = t->as<Type::List>()) return list_type(rewrite_paths(l->elem, f));
  if (auto a = t->as<Type::Arrow>()) {
    return arrow_type(rewrite_paths(a->dom, f), rewrite_paths(a->cod, f));
  }
  if (auto fa = t->as<Type::Forall>()) return forall_type(fa->hint, rewrite_paths(fa->body, f));
  if (auto c = t->as<Type::Constrained>()) {
    Constraint k = c->constraint;
    if (auto s = std::get_if<Constraint::Same>(&k.node)) {
      k = same_type_constraint(rewrite_paths(s->lhs, f), rewrite_paths(s->rhs, f));
    } else {
      std::vector<TypePtr> args;
      for (const auto &a : k.model().args) args.push_back(rewrite_paths(a, f));
      k = concept_constraint(k.model().concept_name, std::move(args));
    }
    return constrained_type(std::move(k), rewrite_paths(c->body, f));
  }
  return t;
}

Env bind_term(const Env &env, const std::string &name, const TypePtr &type, const CTypePtr &ct) {
  return env.push(TermBind{name, type, env.term_depth(), CoreTypeAt{ct, env.type_depth()}});
}

std::string concept_arity_message(const ConceptInfo &info, std::size_t got) {
  return fmt::format("concept {} expects {} type argument{} but got {}", info.name,
                     info.params.size(), info.params.size() == 1 ? "" : "s", got);
}

class Checker {
 public:
  explicit Checker(bool translate) : translate_(translate) {}

  std::vector<Diagnostic> diags;
  std::string elab_error;

  Typed infer(const Env &env, const ExprPtr &e);
  Typed check(const Env &env, const ExprPtr &e, const TypePtr &expected, const Mismatch &mm);
  /// Typed result of `r` once it is known to have type `expected`.
  Typed conform(const Env &env, Typed r, const TypePtr &expected, const Mismatch &mm,
                const SourceSpan &span);
  /// Eliminates r's leading constraint group; returns the first unsatisfied
  /// constraint instead when there is one.
  std::variant<Typed, Constraint> discharge(const Env &env, const Typed &r);
  /// discharge, reporting T003 on failure.
  Typed need_shape(const Env &env, const Typed &r, const SourceSpan &span);

  TypePtr check_type(const Env &env, const TypePtr &t, const SourceSpan &span);
  std::optional<Constraint> check_constraint(const Env &env, const Constraint &c,
                                             const SourceSpan &span);

  struct ModelResult {
    Env env;
    CTermPtr dict;
    CTypePtr dict_type;
    ModelId model;
    std::vector<std::pair<std::string, TypePtr>> binds;
  };
  std::optional<ModelResult> check_model(const Env &env, const ModelInfo &mi,
                                         const SourceSpan &span);

  void report(const SourceSpan &span, std::string_view code, std::string message) {
    diags.push_back(Diagnostic{span, std::string(code), std::move(message), {}});
  }

  /// Runs a translation step unless translation is off or already failed.
  template <typename F>
  void elab(F &&f) {
    if (!translate_ || !elab_error.empty()) return;
    try {
      f();
    } catch (const ElabError &err) {
      elab_error = err.what();
    }
  }

  static bool has_core(std::initializer_list<const Typed *> ts) {
    for (auto t : ts) {
      if (!t->core || !t->ctype) return false;
    }
    return true;
  }

  CTermPtr coerce(const CTermPtr &core, const CTypePtr &from, const CTypePtr &to) {
    if (!sf::type_equal(from, to)) {
      throw ElabError(fmt::format("core type {} does not match {}", sf::to_string(from),
                                  sf::to_string(to)));
    }
    return core;
  }

 private:
  Typed infer_app(const Env &env, const Expr::App &x, const SourceSpan &span);
  Typed infer_tyapp(const Env &env, const Expr::TyApp &x, const SourceSpan &span);
  Typed infer_path(const Env &env, const Expr::PathE &x, const SourceSpan &span);
  Typed infer_constrained(const Env &env, const ExprPtr &e);
  Typed infer_concept(const Env &env, const Expr::ConceptDecl &x, const SourceSpan &span);
  Typed infer_model(const Env &env, const Expr::ModelDecl &x, const SourceSpan &span);
  Typed infer_fix(const Env &env, const Expr::Fix &x, const SourceSpan &span,
                  const TypePtr &expected);
  Typed infer_if(const Env &env, const Expr::If &x, const SourceSpan &span,
                 const TypePtr &expected, const Mismatch *mm);
  Typed infer_list(const Env &env, const Expr::ListLit &x, const SourceSpan &span);
  Typed infer_prim(const Env &env, const Expr::Prim &x, const SourceSpan &span);
  Typed wrap_intro(const ConstraintGroup &g, const Typed &body, const TypePtr &type);
  Env assume_flat(const Env &env, const Constraint &c);

  bool translate_;
};

// ---------------------------------------------------------------------------
// Types and constraints

Env Checker::assume_flat(const Env &env, const Constraint &c) {
  auto r = flat_with_slots(c, env);
  auto fs = std::get_if<std::vector<FlatConstraint>>(&r);
  if (!fs) return env;
  Env out = env;
  for (const auto &f : *fs) out = out.push(ConstraintEntry{f.constraint, std::nullopt});
  return out;
}

std::optional<Constraint> Checker::check_constraint(const Env &env, const Constraint &c,
                                                    const SourceSpan &span) {
  if (auto s = std::get_if<Constraint::Same>(&c.node)) {
    auto l = check_type(env, s->lhs, span);
    auto r = check_type(env, s->rhs, span);
    return same_type_constraint(l, r);
  }
  const auto &m = c.model();
  auto info = env.find_concept(m.concept_name);
  if (!info) {
    report(span, codes::kUnknownConcept, "unknown concept " + m.concept_name);
    return std::nullopt;
  }
  if (info->params.size() != m.args.size()) {
    report(span, codes::kUnknownConcept, concept_arity_message(*info, m.args.size()));
    return std::nullopt;
  }
  std::vector<TypePtr> args;
  for (const auto &a : m.args) args.push_back(check_type(env, a, span));
  return concept_constraint(m.concept_name, std::move(args));
}

TypePtr Checker::check_type(const Env &env, const TypePtr &t, const SourceSpan &span) {
  if (auto l = t->as<Type::List>()) return list_type(check_type(env, l->elem, span));
  if (auto a = t->as<Type::Arrow>()) {
    return arrow_type(check_type(env, a->dom, span), check_type(env, a->cod, span));
  }
  if (auto f = t->as<Type::Forall>()) {
    TypeVarId id = fresh_type_var_id();
    Env inner = env.push(TypeVarEntry{id, f->hint, -1});
    auto body = check_type(inner, open_type(f->body, var_type(id, f->hint)), span);
    return forall_type(f->hint, close_type(body, id));
  }
  if (auto c = t->as<Type::Constrained>()) {
    auto k = check_constraint(env, c->constraint, span);
    if (!k) return error_type();
    auto body = check_type(assume_flat(env, *k), c->body, span);
    return constrained_type(*k, body);
  }
  auto p = t->as<Type::Path>();
  if (!p) return t;

  // Each prefix model must be satisfied where it is looked up; the path is
  // normalized to its last model.
  Env cur = env;
  for (std::size_t i = 0; i < p->prefix.size(); ++i) {
    const auto &m = p->prefix[i];
    auto info = cur.find_concept(m.concept_name);
    if (!info) {
      report(span, codes::kUnknownConcept, "unknown concept " + m.concept_name);
      return error_type();
    }
    if (info->params.size() != m.args.size()) {
      report(span, codes::kUnknownConcept, concept_arity_message(*info, m.args.size()));
      return error_type();
    }
    std::vector<TypePtr> args;
    for (const auto &a : m.args) {
      auto checked = check_type(env, a, span);
      if (contains_error(checked)) return error_type();
      args.push_back(checked);
    }
    ModelId model{m.concept_name, args};
    if (!find_evidence(model, cur)) {
      report(span, codes::kUnsatisfied, "unsatisfied constraint " + to_string(model));
      return error_type();
    }
    if (i + 1 == p->prefix.size()) {
      bool known = std::any_of(info->assoc.begin(), info->assoc.end(),
                               [&](const TypeBinder &b) { return b.name == p->name; });
      if (!known) {
        report(span, codes::kUnknownMember,
               fmt::format("concept {} has no associated type {}", info->name, p->name));
        return error_type();
      }
      return path_type({model}, p->name);
    }
    auto subst = concept_instance_subst(*info, args);
    Env next = restrict(cur);
    for (const auto &n : info->nested) {
      next = assume_flat(next, substitute_constraint(n, subst));
    }
    cur = next;
  }
  return t;
}

// ---------------------------------------------------------------------------
// Constraint elimination

std::variant<Typed, Constraint> Checker::discharge(const Env &env, const Typed &r) {
  auto [cs, body] = peel_constraints(r.type);
  if (cs.empty()) return r;
  for (const auto &c : cs) {
    if (!satisfies(env, c)) return c;
  }
  Typed out{body, nullptr, nullptr};
  if (has_core({&r})) {
    elab([&] {
      auto paths = group_param_paths(env, cs);
      CTermPtr core = r.core;
      CTypePtr ct = r.ctype;
      for (const auto &p : paths) {
        auto f = ct->as<sf::CType::Forall>();
        if (!f) throw ElabError("constrained value has core type " + sf::to_string(ct));
        auto w = translate_type(env, p);
        core = sf::make_term(sf::CTerm::TyApp{core, w});
        ct = sf::instantiate_type(f->body, w);
      }
      for (const auto &c : cs) {
        if (!c.is_concept()) continue;
        auto a = ct->as<sf::CType::Arrow>();
        if (!a) throw ElabError("constrained value has core type " + sf::to_string(ct));
        auto d = build_dict(env, c.model());
        core = sf::make_term(sf::CTerm::App{core, coerce(d.term, d.type, a->dom)});
        ct = a->cod;
      }
      out.core = core;
      out.ctype = ct;
    });
  }
  return out;
}

Typed Checker::need_shape(const Env &env, const Typed &r, const SourceSpan &span) {
  auto d = discharge(env, r);
  if (auto c = std::get_if<Constraint>(&d)) {
    report(span, codes::kUnsatisfied, "unsatisfied constraint " + to_string(*c));
    return failed();
  }
  return std::get<Typed>(d);
}

Typed Checker::conform(const Env &env, Typed r, const TypePtr &expected, const Mismatch &mm,
                       const SourceSpan &span) {
  if (is_error(r.type) || is_error(expected)) return r;
  if (equal_in(env, r.type, expected)) return r;
  if (r.type->is<Type::Constrained>()) {
    auto d = discharge(env, r);
    if (auto t = std::get_if<Typed>(&d); t && equal_in(env, t->type, expected)) return *t;
  }
  report(span, mm.code, mm.message(expected, r.type));
  return failed();
}

// ---------------------------------------------------------------------------
// Expressions

Typed Checker::infer(const Env &env, const ExprPtr &e) {
  const auto &span = e->span;
  if (auto x = e->as<Expr::IntLit>()) {
    return {int_type(), sf::make_term(sf::CTerm::IntLit{x->value}), sf::c_int()};
  }
  if (auto x = e->as<Expr::BoolLit>()) {
    return {bool_type(), sf::make_term(sf::CTerm::BoolLit{x->value}), sf::c_bool()};
  }
  if (auto x = e->as<Expr::Lam>()) {
    if (!x->ann) {
      report(span, codes::kAnnotationRequired,
             fmt::format("parameter {} needs a type annotation here", x->param));
      infer(bind_term(env, x->param, error_type(), nullptr), x->body);
      return failed();
    }
    auto ann = check_type(env, x->ann, span);
    CTypePtr ct;
    elab([&] { ct = translate_type(env, ann); });
    auto body = infer(bind_term(env, x->param, ann, ct), x->body);
    Typed out{arrow_type(ann, body.type), nullptr, nullptr};
    if (ct && has_core({&body})) {
      out.core = sf::make_term(sf::CTerm::Lam{x->param, ct, body.core});
      out.ctype = sf::c_arrow(ct, body.ctype);
    }
    return out;
  }
  if (auto x = e->as<Expr::App>()) return infer_app(env, *x, span);
  if (auto x = e->as<Expr::TyLam>()) {
    auto body = infer(env.push_type_var(x->binder.id, x->binder.name), x->body);
    Typed out{forall_type(x->binder.name, close_type(body.type, x->binder.id)), nullptr, nullptr};
    if (has_core({&body})) {
      out.core = sf::make_term(sf::CTerm::TyLam{x->binder.name, body.core});
      out.ctype = sf::c_forall(x->binder.name, body.ctype);
    }
    return out;
  }
  if (auto x = e->as<Expr::TyApp>()) return infer_tyapp(env, *x, span);
  if (e->as<Expr::ConstrainedE>()) return infer_constrained(env, e);
  if (auto x = e->as<Expr::PathE>()) return infer_path(env, *x, span);
  if (auto x = e->as<Expr::ConceptDecl>()) return infer_concept(env, *x, span);
  if (auto x = e->as<Expr::ModelDecl>()) return infer_model(env, *x, span);
  if (auto x = e->as<Expr::TypeAlias>()) {
    auto rhs = check_type(env, x->rhs, span);
    auto var = var_type(x->binder.id, x->binder.name);
    Env inner = env.push(TypeVarEntry{x->binder.id, x->binder.name, -1}).push(TypeEqEntry{var, rhs});
    auto rest = infer(inner, x->rest);
    rest.type = substitute_type(rest.type, x->binder.id, rhs);
    return rest;
  }
  if (auto x = e->as<Expr::Let>()) {
    auto bound = infer(env, x->bound);
    auto rest = infer(bind_term(env, x->name, bound.type, bound.ctype), x->rest);
    Typed out{rest.type, nullptr, nullptr};
    if (has_core({&bound, &rest})) {
      out.core = sf::make_term(sf::CTerm::App{
          sf::make_term(sf::CTerm::Lam{x->name, bound.ctype, rest.core}), bound.core});
      out.ctype = rest.ctype;
    }
    return out;
  }
  if (auto x = e->as<Expr::Fix>()) return infer_fix(env, *x, span, nullptr);
  if (auto x = e->as<Expr::If>()) return infer_if(env, *x, span, nullptr, nullptr);
  if (auto x = e->as<Expr::ListLit>()) return infer_list(env, *x, span);
  if (auto x = e->as<Expr::Prim>()) return infer_prim(env, *x, span);
  return failed();
}

Typed Checker::check(const Env &env, const ExprPtr &e, const TypePtr &expected,
                     const Mismatch &mm) {
  const auto &span = e->span;
  if (auto x = e->as<Expr::Lam>(); x && !x->ann) {
    auto arrow = is_error(expected) ? nullptr : expose(env, expected, Head::kArrow);
    if (!arrow) {
      if (!is_error(expected)) {
        report(span, codes::kAnnotationRequired,
               fmt::format("parameter {} needs a type annotation; the expected type {} is "
                           "not a function type",
                           x->param, to_string(expected)));
      }
      infer(bind_term(env, x->param, error_type(), nullptr), x->body);
      return failed();
    }
    auto a = arrow->as<Type::Arrow>();
    CTypePtr ct;
    elab([&] { ct = translate_type(env, a->dom); });
    auto body = check(bind_term(env, x->param, a->dom, ct), x->body, a->cod, plain_mismatch());
    if (is_error(body.type)) return failed();
    Typed out{arrow, nullptr, nullptr};
    if (ct && has_core({&body})) {
      out.core = sf::make_term(sf::CTerm::Lam{x->param, ct, body.core});
      out.ctype = sf::c_arrow(ct, body.ctype);
    }
    return out;
  }
  if (auto x = e->as<Expr::Fix>()) {
    return conform(env, infer_fix(env, *x, span, expected), expected, mm, span);
  }
  if (auto x = e->as<Expr::If>()) return infer_if(env, *x, span, expected, &mm);
  if (auto x = e->as<Expr::Let>()) {
    auto bound = infer(env, x->bound);
    auto rest = check(bind_term(env, x->name, bound.type, bound.ctype), x->rest, expected, mm);
    Typed out{rest.type, nullptr, nullptr};
    if (has_core({&bound, &rest})) {
      out.core = sf::make_term(sf::CTerm::App{
          sf::make_term(sf::CTerm::Lam{x->name, bound.ctype, rest.core}), bound.core});
      out.ctype = rest.ctype;
    }
    return out;
  }
  return conform(env, infer(env, e), expected, mm, span);
}

Typed Checker::infer_app(const Env &env, const Expr::App &x, const SourceSpan &span) {
  auto fn = infer(env, x.fn);
  if (!is_error(fn.type)) fn = need_shape(env, fn, x.fn->span);
  if (is_error(fn.type)) {
    infer(env, x.arg);
    return failed();
  }
  auto arrow = expose(env, fn.type, Head::kArrow);
  if (!arrow) {
    report(span, codes::kNotFunction,
           fmt::format("cannot apply an expression of type {}; it is not a function",
                       to_string(fn.type)));
    infer(env, x.arg);
    return failed();
  }
  auto a = arrow->as<Type::Arrow>();
  Mismatch mm{codes::kMismatch, [](const TypePtr &expected, const TypePtr &actual) {
                return fmt::format("the parameter type is {} but the argument type is {}",
                                   to_string(expected), to_string(actual));
              }};
  auto arg = check(env, x.arg, a->dom, mm);
  if (is_error(arg.type)) return failed();
  Typed out{a->cod, nullptr, nullptr};
  if (has_core({&fn, &arg})) {
    elab([&] {
      auto fa = fn.ctype->as<sf::CType::Arrow>();
      if (!fa) throw ElabError("applied value has core type " + sf::to_string(fn.ctype));
      out.core = sf::make_term(sf::CTerm::App{fn.core, coerce(arg.core, arg.ctype, fa->dom)});
      out.ctype = fa->cod;
    });
  }
  return out;
}

Typed Checker::infer_tyapp(const Env &env, const Expr::TyApp &x, const SourceSpan &span) {
  auto subject = infer(env, x.subject);
  auto arg = check_type(env, x.arg, span);
  if (!is_error(subject.type)) subject = need_shape(env, subject, x.subject->span);
  if (is_error(subject.type)) return failed();
  auto fa = expose(env, subject.type, Head::kForall);
  if (!fa) {
    report(span, codes::kNotUniversal,
           fmt::format("cannot instantiate an expression of type {}; it is not polymorphic",
                       to_string(subject.type)));
    return failed();
  }
  Typed out{open_type(fa->as<Type::Forall>()->body, arg), nullptr, nullptr};
  if (has_core({&subject})) {
    elab([&] {
      auto cf = subject.ctype->as<sf::CType::Forall>();
      if (!cf) throw ElabError("instantiated value has core type " + sf::to_string(subject.ctype));
      auto carg = translate_type(env, arg);
      out.core = sf::make_term(sf::CTerm::TyApp{subject.core, carg});
      out.ctype = sf::instantiate_type(cf->body, carg);
    });
  }
  return out;
}

Typed Checker::infer_path(const Env &env, const Expr::PathE &x, const SourceSpan &span) {
  const auto &path = x.path;
  if (path.prefix.empty()) {
    auto b = env.lookup_term(path.name);
    if (!b) {
      report(span, codes::kUnknownMember, "unknown variable " + path.name);
      return failed();
    }
    Typed out{b->type, nullptr, nullptr};
    if (b->ctype.type) {
      elab([&] {
        out.core = core_var(env, b->core_level, path.name);
        out.ctype = core_type_in(env, b->ctype);
      });
    }
    return out;
  }
  // Argument types are checked first so malformed paths inside them are
  // reported at this expression.
  std::vector<ModelId> prefix;
  for (const auto &m : path.prefix) {
    ModelId checked{m.concept_name, {}};
    for (const auto &a : m.args) {
      auto t = check_type(env, a, span);
      if (contains_error(t)) return failed();
      checked.args.push_back(t);
    }
    prefix.push_back(std::move(checked));
  }
  for (const auto &m : prefix) {
    auto info = env.find_concept(m.concept_name);
    if (info && info->params.size() != m.args.size()) {
      report(span, codes::kUnknownConcept, concept_arity_message(*info, m.args.size()));
      return failed();
    }
  }
  auto r = lookup_path(TermPath{prefix, path.name}, env);
  if (auto f = std::get_if<PathFailure>(&r)) {
    switch (f->error) {
      case PathError::kUnsatisfied:
        report(span, codes::kUnsatisfied, "unsatisfied constraint " + f->detail);
        break;
      case PathError::kUnknownConcept:
        report(span, codes::kUnknownConcept, "unknown concept " + f->detail);
        break;
      case PathError::kUnknownMember:
        report(span, codes::kUnknownMember,
               fmt::format("{} has no member {}", to_string(prefix.back()), f->detail));
        break;
    }
    return failed();
  }
  auto &res = std::get<PathResolution>(r);
  Typed out{res.type, nullptr, nullptr};
  if (res.dict && res.dict->root_type.type) {
    elab([&] {
      auto d = dict_value(env, *res.dict);
      auto tup = d.type->as<sf::CType::Tuple>();
      if (!tup || res.slot < 0 || res.slot >= static_cast<int>(tup->elems.size())) {
        throw ElabError("dictionary has no slot for " + path.name);
      }
      out.core = sf::make_term(sf::CTerm::Proj{d.term, res.slot});
      out.ctype = tup->elems[static_cast<std::size_t>(res.slot)];
    });
  }
  return out;
}

Typed Checker::wrap_intro(const ConstraintGroup &g, const Typed &body, const TypePtr &type) {
  CTermPtr core = body.core;
  CTypePtr ct = body.ctype;
  for (std::size_t i = g.dict_types.size(); i-- > 0;) {
    core = sf::make_term(sf::CTerm::Lam{"d" + g.dict_models[i].concept_name, g.dict_types[i], core});
    ct = sf::c_arrow(g.dict_types[i], ct);
  }
  for (std::size_t j = g.param_names.size(); j-- > 0;) {
    core = sf::make_term(sf::CTerm::TyLam{g.param_names[j], core});
    ct = sf::c_forall(g.param_names[j], ct);
  }
  return {type, core, ct};
}

Typed Checker::infer_constrained(const Env &env, const ExprPtr &e) {
  std::vector<Constraint> written;
  ExprPtr body = e;
  while (auto c = body->as<Expr::ConstrainedE>()) {
    written.push_back(c->constraint);
    body = c->body;
  }
  Env wf = env;
  std::vector<Constraint> cs;
  bool bad = false;
  for (const auto &c : written) {
    auto k = check_constraint(wf, c, e->span);
    if (!k) {
      bad = true;
      continue;
    }
    cs.push_back(*k);
    wf = assume_flat(wf, *k);
  }
  if (bad) {
    infer(wf, body);
    return failed();
  }
  std::optional<ConstraintGroup> g;
  elab([&] { g = enter_group(env, cs, true); });
  auto inner = infer(g ? g->env : wf, body);
  if (is_error(inner.type)) return failed();
  auto [inner_cs, inner_body] = peel_constraints(inner.type);
  auto all = cs;
  all.insert(all.end(), inner_cs.begin(), inner_cs.end());
  auto type = wrap_constraints(all, inner_body);
  if (!g || !has_core({&inner})) return {type, nullptr, nullptr};
  if (inner_cs.empty()) return wrap_intro(*g, inner, type);

  // A constrained body joins this group: C1 => (D1 => τ) is C1 => D1 => τ,
  // so the body is translated again with D1 assumed alongside C1.
  Typed out{type, nullptr, nullptr};
  elab([&] {
    auto merged = enter_group(env, all, true);
    auto mark = diags.size();
    auto again = infer(merged.env, body);
    diags.resize(mark);
    if (!has_core({&again})) {
      if (elab_error.empty()) elab_error = "constrained body did not translate";
      return;
    }
    auto d = discharge(merged.env, again);
    auto t = std::get_if<Typed>(&d);
    if (!t) throw ElabError("inner constraint " + to_string(std::get<Constraint>(d)) +
                            " is not satisfied by its own group");
    if (!has_core({t})) return;
    out = wrap_intro(merged, *t, type);
  });
  return out;
}

Typed Checker::infer_concept(const Env &env, const Expr::ConceptDecl &x, const SourceSpan &span) {
  const auto &info = *x.info;
  Env inner = env;
  for (const auto &p : info.params) inner = inner.push(TypeVarEntry{p.id, p.name, -1});
  for (const auto &a : info.assoc) inner = inner.push(TypeVarEntry{a.id, a.name, -1});
  auto checked = std::make_shared<ConceptInfo>(info);
  checked->nested.clear();
  for (const auto &n : info.nested) {
    auto k = check_constraint(inner, n, span);
    if (!k) continue;
    checked->nested.push_back(*k);
    inner = assume_flat(inner, *k);
  }
  for (auto &[name, ty] : checked->members) ty = check_type(inner, ty, span);
  return infer(env.push(ConceptEntry{checked}), x.rest);
}

std::optional<Checker::ModelResult> Checker::check_model(const Env &env, const ModelInfo &mi,
                                                         const SourceSpan &span) {
  auto info = env.find_concept(mi.concept_name);
  if (!info) {
    report(span, codes::kUnknownConcept, "unknown concept " + mi.concept_name);
    return std::nullopt;
  }
  if (info->params.size() != mi.args.size()) {
    report(span, codes::kUnknownConcept, concept_arity_message(*info, mi.args.size()));
    return std::nullopt;
  }
  auto before = diags.size();
  ModelId model{mi.concept_name, {}};
  for (const auto &a : mi.args) model.args.push_back(check_type(env, a, span));
  auto shown = to_string(model);

  std::vector<std::pair<std::string, TypePtr>> binds;
  for (const auto &beta : info->assoc) {
    auto it = std::find_if(mi.assoc_binds.begin(), mi.assoc_binds.end(),
                           [&](const auto &b) { return b.first == beta.name; });
    if (it == mi.assoc_binds.end()) {
      report(span, codes::kAssocMissing,
             fmt::format("model {} does not define associated type {}", shown, beta.name));
      continue;
    }
    binds.emplace_back(beta.name, check_type(env, it->second, span));
  }
  for (const auto &[name, ty] : mi.assoc_binds) {
    bool known = std::any_of(info->assoc.begin(), info->assoc.end(),
                             [&](const TypeBinder &b) { return b.name == name; });
    if (!known) {
      report(span, codes::kUnknownMember,
             fmt::format("concept {} has no associated type {}", info->name, name));
    }
  }
  if (diags.size() != before) return std::nullopt;

  TypeSubst subst;
  for (std::size_t i = 0; i < info->params.size(); ++i) {
    subst.entries.emplace_back(info->params[i].id, model.args[i]);
  }
  for (std::size_t i = 0; i < info->assoc.size(); ++i) {
    subst.entries.emplace_back(info->assoc[i].id, binds[i].second);
  }

  std::vector<Constraint> nested;
  for (const auto &n : info->nested) {
    auto k = substitute_constraint(n, subst);
    if (!satisfies(env, k)) {
      report(span, codes::kUnsatisfied,
             fmt::format("unsatisfied constraint {} required by model {}", to_string(k), shown));
    }
    nested.push_back(std::move(k));
  }

  std::vector<Typed> members;
  std::vector<TypePtr> expected_types;
  for (const auto &[name, ty] : info->members) {
    auto expected = substitute_type(ty, subst);
    auto it = std::find_if(mi.member_binds.begin(), mi.member_binds.end(),
                           [&](const auto &b) { return b.first == name; });
    if (it == mi.member_binds.end()) {
      report(span, codes::kMemberMissing,
             fmt::format("model {} is missing member {}", shown, name));
      continue;
    }
    Mismatch mm{codes::kMemberMismatch,
                [name = name, shown](const TypePtr &want, const TypePtr &got) {
                  return fmt::format("member {} of model {} has type {} but the concept requires {}",
                                     name, shown, to_string(got), to_string(want));
                }};
    members.push_back(check(env, it->second, expected, mm));
    expected_types.push_back(expected);
  }
  for (const auto &[name, body] : mi.member_binds) {
    bool known = std::any_of(info->members.begin(), info->members.end(),
                             [&](const auto &m) { return m.first == name; });
    if (!known) {
      report(body->span, codes::kUnknownMember,
             fmt::format("concept {} has no member {}", info->name, name));
    }
  }
  if (diags.size() != before) return std::nullopt;

  ModelResult result{env, nullptr, nullptr, model, binds};
  elab([&] {
    for (const auto &m : members) {
      if (!has_core({&m})) return;
    }
    std::vector<CTermPtr> terms;
    std::vector<CTypePtr> types;
    for (const auto &n : nested) {
      if (!n.is_concept()) continue;
      auto d = build_dict(env, n.model());
      terms.push_back(d.term);
      types.push_back(d.type);
    }
    for (std::size_t i = 0; i < members.size(); ++i) {
      auto want = translate_type(env, expected_types[i]);
      terms.push_back(coerce(members[i].core, members[i].ctype, want));
      types.push_back(want);
    }
    result.dict = sf::make_term(sf::CTerm::Tuple{std::move(terms)});
    result.dict_type = sf::c_tuple(std::move(types));
  });
  Env out = env.push(ModelEntry{model, std::make_shared<ModelInfo>(mi),
                                DictRef{env.term_depth(), {}, {result.dict_type, env.type_depth()}}});
  for (const auto &[name, ty] : binds) {
    out = out.push(TypeEqEntry{path_type({model}, name), ty});
  }
  result.env = out;
  return result;
}

Typed Checker::infer_model(const Env &env, const Expr::ModelDecl &x, const SourceSpan &span) {
  auto m = check_model(env, *x.info, span);
  if (!m) return failed();
  auto rest = infer(m->env, x.rest);
  // A constrained result leaving the model's scope is eliminated while the
  // model is still visible.
  if (!is_error(rest.type) && rest.type->is<Type::Constrained>()) {
    auto d = discharge(m->env, rest);
    if (auto t = std::get_if<Typed>(&d)) rest = *t;
  }
  // The model goes out of scope: its associated types are replaced by the
  // types it binds them to.
  Typed out{rewrite_paths(rest.type,
                          [&](const TypePtr &t) -> TypePtr {
                            auto p = t->as<Type::Path>();
                            if (p->prefix.size() != 1) return nullptr;
                            const auto &pm = p->prefix[0];
                            if (pm.concept_name != m->model.concept_name ||
                                pm.args.size() != m->model.args.size()) {
                              return nullptr;
                            }
                            for (std::size_t i = 0; i < pm.args.size(); ++i) {
                              if (!equal_in(m->env, pm.args[i], m->model.args[i])) return nullptr;
                            }
                            for (const auto &[name, ty] : m->binds) {
                              if (name == p->name) return ty;
                            }
                            return nullptr;
                          }),
            nullptr, nullptr};
  if (m->dict && has_core({&rest})) {
    out.core = sf::make_term(sf::CTerm::App{
        sf::make_term(sf::CTerm::Lam{"d" + m->model.concept_name, m->dict_type, rest.core}),
        m->dict});
    out.ctype = rest.ctype;
  }
  return out;
}

Typed Checker::infer_fix(const Env &env, const Expr::Fix &x, const SourceSpan &span,
                         const TypePtr &expected) {
  auto body = expected && !is_error(expected)
                  ? check(env, x.body, arrow_type(expected, expected), plain_mismatch())
                  : infer(env, x.body);
  if (is_error(body.type)) return failed();
  body = need_shape(env, body, x.body->span);
  if (is_error(body.type)) return failed();
  auto arrow = expose(env, body.type, Head::kArrow);
  auto a = arrow ? arrow->as<Type::Arrow>() : nullptr;
  if (!a || !equal_in(env, a->dom, a->cod)) {
    report(span, codes::kMismatch,
           fmt::format("fix expects a function of type T -> T but found {}", to_string(body.type)));
    return failed();
  }
  Typed out{a->dom, nullptr, nullptr};
  if (has_core({&body})) {
    elab([&] {
      auto fa = body.ctype->as<sf::CType::Arrow>();
      if (!fa) throw ElabError("fix body has core type " + sf::to_string(body.ctype));
      coerce(body.core, fa->cod, fa->dom);
      out.core = sf::make_term(sf::CTerm::Fix{body.core});
      out.ctype = fa->dom;
    });
  }
  return out;
}

Typed Checker::infer_if(const Env &env, const Expr::If &x, const SourceSpan &span,
                        const TypePtr &expected, const Mismatch *mm) {
  (void)span;
  Mismatch cond_mm{codes::kConditionNotBool, [](const TypePtr &, const TypePtr &got) {
                     return fmt::format("the condition has type {}, not bool", to_string(got));
                   }};
  auto cond = check(env, x.cond, bool_type(), cond_mm);
  Typed thn, els;
  if (expected) {
    thn = check(env, x.then_branch, expected, *mm);
    els = check(env, x.else_branch, expected, *mm);
  } else {
    thn = infer(env, x.then_branch);
    els = infer(env, x.else_branch);
    if (!is_error(thn.type) && !is_error(els.type)) {
      Mismatch branch_mm{codes::kMismatch, [](const TypePtr &a, const TypePtr &b) {
                           return fmt::format("the branches have different types: {} and {}",
                                              to_string(a), to_string(b));
                         }};
      // A constrained branch meeting an unconstrained one is eliminated
      // first.
      if (!equal_in(env, thn.type, els.type) && thn.type->is<Type::Constrained>() &&
          !els.type->is<Type::Constrained>()) {
        auto d = discharge(env, thn);
        if (auto t = std::get_if<Typed>(&d)) thn = *t;
      }
      els = conform(env, els, thn.type, branch_mm, x.else_branch->span);
    }
  }
  if (is_error(cond.type) || is_error(thn.type) || is_error(els.type)) return failed();
  Typed out{expected ? expected : thn.type, nullptr, nullptr};
  if (has_core({&cond, &thn, &els})) {
    elab([&] {
      out.core = sf::make_term(sf::CTerm::If{coerce(cond.core, cond.ctype, sf::c_bool()), thn.core,
                                             coerce(els.core, els.ctype, thn.ctype)});
      out.ctype = thn.ctype;
    });
  }
  return out;
}

Typed Checker::infer_list(const Env &env, const Expr::ListLit &x, const SourceSpan &span) {
  if (x.elems.empty()) {
    if (!x.elem_type) {
      report(span, codes::kAnnotationRequired, "an empty list needs an element type");
      return failed();
    }
    auto t = check_type(env, x.elem_type, span);
    Typed out{list_type(t), nullptr, nullptr};
    elab([&] {
      auto ct = translate_type(env, t);
      out.core = sf::make_term(sf::CTerm::Nil{ct});
      out.ctype = sf::c_list(ct);
    });
    return out;
  }
  Mismatch mm{codes::kMismatch, [](const TypePtr &want, const TypePtr &got) {
                return fmt::format("list elements must share one type: expected {} but found {}",
                                   to_string(want), to_string(got));
              }};
  std::vector<Typed> elems;
  elems.push_back(infer(env, x.elems[0]));
  if (x.elem_type && !is_error(elems[0].type)) {
    elems[0] = conform(env, elems[0], check_type(env, x.elem_type, span), mm, x.elems[0]->span);
  }
  bool bad = is_error(elems[0].type);
  for (std::size_t i = 1; i < x.elems.size(); ++i) {
    elems.push_back(bad ? infer(env, x.elems[i]) : check(env, x.elems[i], elems[0].type, mm));
    bad = bad || is_error(elems.back().type);
  }
  if (bad) return failed();
  Typed out{list_type(elems[0].type), nullptr, nullptr};
  for (const auto &el : elems) {
    if (!has_core({&el})) return out;
  }
  elab([&] {
    auto ct = elems[0].ctype;
    CTermPtr acc = sf::make_term(sf::CTerm::Nil{ct});
    for (std::size_t i = elems.size(); i-- > 0;) {
      acc = sf::make_term(sf::CTerm::Cons{coerce(elems[i].core, elems[i].ctype, ct), acc});
    }
    out.core = acc;
    out.ctype = sf::c_list(ct);
  });
  return out;
}

Typed Checker::infer_prim(const Env &env, const Expr::Prim &x, const SourceSpan &span) {
  if (static_cast<int>(x.args.size()) != prim_arity(x.op)) {
    report(span, codes::kMismatch,
           fmt::format("{} expects {} arguments", prim_name(x.op), prim_arity(x.op)));
    return failed();
  }
  if (prim_is_binary_operator(x.op)) {
    auto a = check(env, x.args[0], int_type(), operand_mismatch(x.op));
    auto b = check(env, x.args[1], int_type(), operand_mismatch(x.op));
    if (is_error(a.type) || is_error(b.type)) return failed();
    bool cmp = x.op == PrimOp::kLess || x.op == PrimOp::kEqual;
    Typed out{cmp ? bool_type() : int_type(), nullptr, nullptr};
    if (has_core({&a, &b})) {
      elab([&] {
        out.core = sf::make_term(sf::CTerm::Prim{x.op, {coerce(a.core, a.ctype, sf::c_int()),
                                                        coerce(b.core, b.ctype, sf::c_int())}});
        out.ctype = cmp ? sf::c_bool() : sf::c_int();
      });
    }
    return out;
  }
  if (x.op == PrimOp::kCons) {
    auto h = infer(env, x.args[0]);
    if (is_error(h.type)) {
      infer(env, x.args[1]);
      return failed();
    }
    Mismatch mm{codes::kMismatch, [](const TypePtr &want, const TypePtr &got) {
                  return fmt::format("cons expects a tail of type {} but found {}", to_string(want),
                                     to_string(got));
                }};
    auto t = check(env, x.args[1], list_type(h.type), mm);
    if (is_error(t.type)) return failed();
    Typed out{list_type(h.type), nullptr, nullptr};
    if (has_core({&h, &t})) {
      elab([&] {
        auto lt = sf::c_list(h.ctype);
        out.core = sf::make_term(sf::CTerm::Cons{h.core, coerce(t.core, t.ctype, lt)});
        out.ctype = lt;
      });
    }
    return out;
  }
  auto a = infer(env, x.args[0]);
  if (is_error(a.type)) return failed();
  a = need_shape(env, a, x.args[0]->span);
  if (is_error(a.type)) return failed();
  auto list = expose(env, a.type, Head::kList);
  if (!list) {
    report(x.args[0]->span, codes::kMismatch,
           fmt::format("{} expects a list but found {}", prim_name(x.op), to_string(a.type)));
    return failed();
  }
  auto elem = list->as<Type::List>()->elem;
  Typed out{x.op == PrimOp::kIsNil ? bool_type() : x.op == PrimOp::kHead ? elem : list,
            nullptr, nullptr};
  if (has_core({&a})) {
    elab([&] {
      auto cl = a.ctype->as<sf::CType::List>();
      if (!cl) throw ElabError("list primitive applied to core type " + sf::to_string(a.ctype));
      out.core = sf::make_term(sf::CTerm::Prim{x.op, {a.core}});
      out.ctype = x.op == PrimOp::kIsNil ? sf::c_bool() : x.op == PrimOp::kHead ? cl->elem : a.ctype;
    });
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Public interface

std::variant<TypePtr, std::vector<Diagnostic>> infer(const Env &env, const ExprPtr &e) {
  Checker c(false);
  auto r = c.infer(env, e);
  if (!c.diags.empty()) return c.diags;
  return r.type;
}

std::vector<Diagnostic> check(const Env &env, const ExprPtr &e, const TypePtr &expected) {
  Checker c(false);
  c.check(env, e, expected, plain_mismatch());
  return c.diags;
}

std::optional<Diagnostic> satisfy(const Env &env, const Constraint &c, const SourceSpan &span) {
  if (satisfies(env, c)) return std::nullopt;
  return Diagnostic{span, std::string(codes::kUnsatisfied), "unsatisfied constraint " + to_string(c),
                    {}};
}

TypePtr discharge(const Env &env, const TypePtr &t) {
  Checker c(false);
  auto d = c.discharge(env, Typed{t, nullptr, nullptr});
  if (auto r = std::get_if<Typed>(&d)) return r->type;
  return t;
}

std::variant<Env, std::vector<Diagnostic>> check_model(const Env &env, const ModelInfo &info,
                                                       const SourceSpan &span) {
  Checker c(false);
  auto r = c.check_model(env, info, span);
  if (!r) return c.diags;
  return r->env;
}

namespace {

/// Final program type: a constrained result whose constraints all hold is
/// discharged.
Typed finish(Checker &c, const Env &env, Typed r) {
  if (is_error(r.type) || !r.type->is<Type::Constrained>()) return r;
  auto d = c.discharge(env, r);
  if (auto t = std::get_if<Typed>(&d)) return *t;
  return r;
}

}  // namespace

ProgramCheck check_program(const ExprPtr &program) {
  Checker c(false);
  Env env;
  auto r = finish(c, env, c.infer(env, program));
  ProgramCheck out;
  out.diagnostics = std::move(c.diags);
  if (out.diagnostics.empty()) out.type = r.type;
  return out;
}

namespace detail {

Elaboration check_and_elaborate(const ExprPtr &program) {
  Checker c(true);
  Env env;
  auto r = finish(c, env, c.infer(env, program));
  Elaboration out;
  out.diagnostics = std::move(c.diags);
  if (!out.diagnostics.empty()) return out;
  out.type = r.type;
  out.error = c.elab_error;
  if (out.error.empty() && r.core) {
    out.core = r.core;
    out.core_type = r.ctype;
  } else if (out.error.empty()) {
    out.error = "translation produced no term";
  }
  return out;
}

}  // namespace detail

}  // namespace fg
