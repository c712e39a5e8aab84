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

#include "interpret_direct.h"

#include <fmt/format.h>

#include <memory>
#include <stdexcept>
#include <variant>
#include <vector>

namespace fg::testing {

namespace {

struct Value;
using ValuePtr = std::shared_ptr<const Value>;
struct Scope;
using ScopePtr = std::shared_ptr<const Scope>;

struct ModelVal {
  std::string concept_name;
  std::vector<TypePtr> args;
  std::vector<std::pair<std::string, TypePtr>> assoc;
  std::vector<std::pair<std::string, ValuePtr>> members;
  std::vector<std::shared_ptr<const ModelVal>> nested;
};
using ModelPtr = std::shared_ptr<const ModelVal>;

struct Scope {
  struct Term {
    std::string name;
    ValuePtr value;
  };
  struct TypeBind {
    TypeVarId id;
    TypePtr type;
  };
  struct Model {
    ModelPtr model;
  };
  struct Concept {
    std::shared_ptr<const ConceptInfo> info;
  };
  std::variant<Term, TypeBind, Model, Concept> entry;
  ScopePtr next;
};

ScopePtr extend(ScopePtr s, decltype(Scope::entry) e) {
  return std::make_shared<const Scope>(Scope{std::move(e), std::move(s)});
}

struct Value {
  struct Int {
    std::int64_t n;
  };
  struct Bool {
    bool b;
  };
  struct List {
    std::vector<ValuePtr> elems;
  };
  struct Closure {
    std::string param;
    TypePtr ann;
    ExprPtr body;
    ScopePtr scope;
  };
  struct TyClosure {
    TypeBinder binder;
    ExprPtr body;
    ScopePtr scope;
  };
  struct Fix {
    ValuePtr fn;
  };
  struct Suspended {
    std::vector<Constraint> constraints;
    ExprPtr body;
    ScopePtr scope;
  };
  std::variant<Int, Bool, List, Closure, TyClosure, Fix, Suspended> node;
};

ValuePtr mk(Value::Int v) { return std::make_shared<const Value>(Value{v}); }
ValuePtr mk(Value::Bool v) { return std::make_shared<const Value>(Value{v}); }
ValuePtr mk(Value::List v) { return std::make_shared<const Value>(Value{std::move(v)}); }
ValuePtr mk(Value::Closure v) { return std::make_shared<const Value>(Value{std::move(v)}); }
ValuePtr mk(Value::TyClosure v) { return std::make_shared<const Value>(Value{std::move(v)}); }
ValuePtr mk(Value::Fix v) { return std::make_shared<const Value>(Value{std::move(v)}); }
ValuePtr mk(Value::Suspended v) { return std::make_shared<const Value>(Value{std::move(v)}); }

struct Diverged {};
struct RuntimeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::int64_t wrap(std::uint64_t v) { return static_cast<std::int64_t>(v); }

class Interpreter {
 public:
  explicit Interpreter(std::int64_t fuel) : fuel_(fuel) {}

  ValuePtr eval(const ScopePtr &s, const ExprPtr &e) {
    if (--fuel_ < 0 || depth_ > kMaxDepth) throw Diverged{};
    ++depth_;
    auto v = eval_node(s, e);
    --depth_;
    return v;
  }

  /// A value in the shape its consumer needs: suspensions are resumed with
  /// the models visible at `s`, fixpoints are unrolled.
  ValuePtr consume(const ScopePtr &s, ValuePtr v) {
    while (true) {
      if (auto f = std::get_if<Value::Fix>(&v->node)) {
        v = apply(s, f->fn, v);
      } else if (std::holds_alternative<Value::Suspended>(v->node)) {
        v = resume(s, v);
      } else {
        return v;
      }
    }
  }

  TypePtr resolve(const ScopePtr &s, const TypePtr &t) {
    if (auto v = t->as<Type::Var>()) {
      for (auto cur = s; cur; cur = cur->next) {
        if (auto b = std::get_if<Scope::TypeBind>(&cur->entry); b && b->id == v->id) return b->type;
      }
      return t;
    }
    if (auto l = t->as<Type::List>()) return list_type(resolve(s, l->elem));
    if (auto a = t->as<Type::Arrow>()) return arrow_type(resolve(s, a->dom), resolve(s, a->cod));
    if (auto f = t->as<Type::Forall>()) return forall_type(f->hint, resolve(s, f->body));
    if (auto c = t->as<Type::Constrained>()) {
      return constrained_type(resolve(s, c->constraint), resolve(s, c->body));
    }
    if (auto p = t->as<Type::Path>()) {
      std::vector<ModelId> prefix;
      for (const auto &m : p->prefix) prefix.push_back(resolve(s, m));
      auto m = find_path_model(s, prefix);
      if (m) {
        for (const auto &[name, ty] : m->assoc) {
          if (name == p->name) return ty;
        }
      }
      return path_type(std::move(prefix), p->name);
    }
    return t;
  }

  ModelId resolve(const ScopePtr &s, const ModelId &m) {
    ModelId out{m.concept_name, {}};
    for (const auto &a : m.args) out.args.push_back(resolve(s, a));
    return out;
  }

  Constraint resolve(const ScopePtr &s, const Constraint &c) {
    if (c.is_concept()) {
      auto m = resolve(s, c.model());
      return concept_constraint(m.concept_name, m.args);
    }
    const auto &same = std::get<Constraint::Same>(c.node);
    return same_type_constraint(resolve(s, same.lhs), resolve(s, same.rhs));
  }

 private:
  static constexpr int kMaxDepth = 3000;

  static bool matches(const ModelVal &m, const ModelId &id) {
    if (m.concept_name != id.concept_name || m.args.size() != id.args.size()) return false;
    for (std::size_t i = 0; i < m.args.size(); ++i) {
      if (!alpha_equal(m.args[i], id.args[i])) return false;
    }
    return true;
  }

  ModelPtr find_model(const ScopePtr &s, const ModelId &id) {
    for (auto cur = s; cur; cur = cur->next) {
      if (auto m = std::get_if<Scope::Model>(&cur->entry); m && matches(*m->model, id)) {
        return m->model;
      }
    }
    return nullptr;
  }

  ModelPtr find_path_model(const ScopePtr &s, const std::vector<ModelId> &prefix) {
    auto m = find_model(s, prefix.front());
    for (std::size_t i = 1; m && i < prefix.size(); ++i) {
      ModelPtr next;
      for (const auto &n : m->nested) {
        if (matches(*n, prefix[i])) next = n;
      }
      m = next;
    }
    return m;
  }

  std::shared_ptr<const ConceptInfo> find_concept(const ScopePtr &s, const std::string &name) {
    for (auto cur = s; cur; cur = cur->next) {
      if (auto c = std::get_if<Scope::Concept>(&cur->entry); c && c->info->name == name) {
        return c->info;
      }
    }
    return nullptr;
  }

  bool satisfiable(const ScopePtr &use, const ScopePtr &def, const std::vector<Constraint> &cs) {
    for (const auto &c : cs) {
      auto r = resolve(def, c);
      if (r.is_concept()) {
        if (!find_model(use, r.model())) return false;
      } else {
        const auto &same = std::get<Constraint::Same>(r.node);
        if (!alpha_equal(resolve(use, same.lhs), resolve(use, same.rhs))) return false;
      }
    }
    return true;
  }

  ScopePtr assume_model(ScopePtr s, const ModelPtr &m) {
    for (const auto &n : m->nested) s = assume_model(std::move(s), n);
    return extend(std::move(s), Scope::Model{m});
  }

  ValuePtr resume(const ScopePtr &use, const ValuePtr &v) {
    const auto &sus = std::get<Value::Suspended>(v->node);
    ScopePtr body_scope = sus.scope;
    for (const auto &c : sus.constraints) {
      auto r = resolve(sus.scope, c);
      if (!r.is_concept()) continue;
      auto m = find_model(use, r.model());
      if (!m) {
        throw RuntimeError("no model for " + r.model().concept_name + " at elimination");
      }
      body_scope = assume_model(body_scope, m);
    }
    return eval(body_scope, sus.body);
  }

  ValuePtr apply(const ScopePtr &s, const ValuePtr &fn, ValuePtr arg) {
    if (--fuel_ < 0) throw Diverged{};
    if (auto f = std::get_if<Value::Fix>(&fn->node)) {
      auto unrolled = consume(s, apply(s, f->fn, fn));
      return apply(s, unrolled, std::move(arg));
    }
    if (std::holds_alternative<Value::Suspended>(fn->node)) return apply(s, consume(s, fn), arg);
    auto c = std::get_if<Value::Closure>(&fn->node);
    if (!c) throw RuntimeError("applied a non-function");
    bool wants_constrained = c->ann && resolve(c->scope, c->ann)->is<Type::Constrained>();
    if (!wants_constrained && std::holds_alternative<Value::Suspended>(arg->node)) {
      arg = resume(s, arg);
    }
    return eval(extend(c->scope, Scope::Term{c->param, std::move(arg)}), c->body);
  }

  std::int64_t as_int(const ScopePtr &s, const ExprPtr &e) {
    auto v = consume(s, eval(s, e));
    auto i = std::get_if<Value::Int>(&v->node);
    if (!i) throw RuntimeError("expected an integer");
    return i->n;
  }

  ValuePtr eval_node(const ScopePtr &s, const ExprPtr &e) {
    if (auto x = e->as<Expr::IntLit>()) return mk(Value::Int{x->value});
    if (auto x = e->as<Expr::BoolLit>()) return mk(Value::Bool{x->value});
    if (auto x = e->as<Expr::Lam>()) return mk(Value::Closure{x->param, x->ann, x->body, s});
    if (auto x = e->as<Expr::App>()) {
      auto fn = eval(s, x->fn);
      auto arg = eval(s, x->arg);
      return apply(s, fn, std::move(arg));
    }
    if (auto x = e->as<Expr::TyLam>()) return mk(Value::TyClosure{x->binder, x->body, s});
    if (auto x = e->as<Expr::TyApp>()) {
      auto v = consume(s, eval(s, x->subject));
      auto t = std::get_if<Value::TyClosure>(&v->node);
      if (!t) throw RuntimeError("instantiated a non-polymorphic value");
      return eval(extend(t->scope, Scope::TypeBind{t->binder.id, resolve(s, x->arg)}), t->body);
    }
    if (e->as<Expr::ConstrainedE>()) {
      std::vector<Constraint> cs;
      ExprPtr body = e;
      while (auto c = body->as<Expr::ConstrainedE>()) {
        cs.push_back(c->constraint);
        body = c->body;
      }
      return mk(Value::Suspended{std::move(cs), body, s});
    }
    if (auto x = e->as<Expr::PathE>()) return eval_path(s, x->path);
    if (auto x = e->as<Expr::ConceptDecl>()) return eval(extend(s, Scope::Concept{x->info}), x->rest);
    if (auto x = e->as<Expr::ModelDecl>()) return eval_model(s, *x);
    if (auto x = e->as<Expr::TypeAlias>()) {
      return eval(extend(s, Scope::TypeBind{x->binder.id, resolve(s, x->rhs)}), x->rest);
    }
    if (auto x = e->as<Expr::Let>()) {
      auto v = eval(s, x->bound);
      return eval(extend(s, Scope::Term{x->name, std::move(v)}), x->rest);
    }
    if (auto x = e->as<Expr::Fix>()) return mk(Value::Fix{consume(s, eval(s, x->body))});
    if (auto x = e->as<Expr::If>()) {
      auto c = consume(s, eval(s, x->cond));
      auto b = std::get_if<Value::Bool>(&c->node);
      if (!b) throw RuntimeError("condition is not a boolean");
      return eval(s, b->b ? x->then_branch : x->else_branch);
    }
    if (auto x = e->as<Expr::ListLit>()) {
      Value::List l;
      for (const auto &el : x->elems) l.elems.push_back(eval(s, el));
      return mk(std::move(l));
    }
    if (auto x = e->as<Expr::Prim>()) return eval_prim(s, *x);
    throw RuntimeError("unknown expression");
  }

  ValuePtr eval_path(const ScopePtr &s, const TermPath &path) {
    if (path.prefix.empty()) {
      for (auto cur = s; cur; cur = cur->next) {
        if (auto t = std::get_if<Scope::Term>(&cur->entry); t && t->name == path.name) {
          return t->value;
        }
      }
      throw RuntimeError("unbound variable " + path.name);
    }
    std::vector<ModelId> prefix;
    for (const auto &m : path.prefix) prefix.push_back(resolve(s, m));
    auto m = find_path_model(s, prefix);
    if (!m) throw RuntimeError("no model for " + prefix.back().concept_name);
    for (const auto &[name, v] : m->members) {
      if (name == path.name) return v;
    }
    throw RuntimeError("model has no member " + path.name);
  }

  ValuePtr eval_model(const ScopePtr &s, const Expr::ModelDecl &x) {
    const auto &mi = *x.info;
    auto info = find_concept(s, mi.concept_name);
    if (!info) throw RuntimeError("unknown concept " + mi.concept_name);
    auto m = std::make_shared<ModelVal>();
    m->concept_name = mi.concept_name;
    for (const auto &a : mi.args) m->args.push_back(resolve(s, a));
    // Concept parameters and associated types map to their runtime types.
    ScopePtr concept_scope = s;
    for (std::size_t i = 0; i < info->params.size(); ++i) {
      concept_scope = extend(concept_scope, Scope::TypeBind{info->params[i].id, m->args[i]});
    }
    for (const auto &beta : info->assoc) {
      for (const auto &[name, ty] : mi.assoc_binds) {
        if (name != beta.name) continue;
        auto r = resolve(s, ty);
        m->assoc.emplace_back(name, r);
        concept_scope = extend(concept_scope, Scope::TypeBind{beta.id, r});
      }
    }
    for (const auto &n : info->nested) {
      if (!n.is_concept()) continue;
      auto id = resolve(concept_scope, n.model());
      auto nm = find_model(s, id);
      if (!nm) throw RuntimeError("nested model missing for " + id.concept_name);
      m->nested.push_back(nm);
    }
    for (const auto &[name, ty] : info->members) {
      for (const auto &[bn, body] : mi.member_binds) {
        if (bn != name) continue;
        auto v = eval(s, body);
        if (std::holds_alternative<Value::Suspended>(v->node) &&
            !resolve(concept_scope, ty)->is<Type::Constrained>()) {
          v = resume(s, v);
        }
        m->members.emplace_back(name, v);
      }
    }
    auto inner = extend(s, Scope::Model{m});
    auto v = eval(inner, x.rest);
    if (auto sus = std::get_if<Value::Suspended>(&v->node)) {
      if (satisfiable(inner, sus->scope, sus->constraints)) v = resume(inner, v);
    }
    return v;
  }

  ValuePtr eval_prim(const ScopePtr &s, const Expr::Prim &x) {
    auto list_arg = [&](const ExprPtr &a) -> const Value::List & {
      auto v = consume(s, eval(s, a));
      keep_.push_back(v);
      auto l = std::get_if<Value::List>(&v->node);
      if (!l) throw RuntimeError("expected a list");
      return *l;
    };
    switch (x.op) {
      case PrimOp::kAdd:
      case PrimOp::kSub:
      case PrimOp::kMul:
      case PrimOp::kLess:
      case PrimOp::kEqual: {
        auto a = static_cast<std::uint64_t>(as_int(s, x.args[0]));
        auto b = static_cast<std::uint64_t>(as_int(s, x.args[1]));
        if (x.op == PrimOp::kAdd) return mk(Value::Int{wrap(a + b)});
        if (x.op == PrimOp::kSub) return mk(Value::Int{wrap(a - b)});
        if (x.op == PrimOp::kMul) return mk(Value::Int{wrap(a * b)});
        if (x.op == PrimOp::kLess) return mk(Value::Bool{wrap(a) < wrap(b)});
        return mk(Value::Bool{a == b});
      }
      case PrimOp::kIsNil:
        return mk(Value::Bool{list_arg(x.args[0]).elems.empty()});
      case PrimOp::kHead: {
        const auto &l = list_arg(x.args[0]);
        if (l.elems.empty()) throw Diverged{};
        return l.elems.front();
      }
      case PrimOp::kTail: {
        const auto &l = list_arg(x.args[0]);
        if (l.elems.empty()) throw Diverged{};
        return mk(Value::List{{l.elems.begin() + 1, l.elems.end()}});
      }
      case PrimOp::kCons: {
        auto h = eval(s, x.args[0]);
        auto t = list_arg(x.args[1]);
        Value::List l{{h}};
        l.elems.insert(l.elems.end(), t.elems.begin(), t.elems.end());
        return mk(std::move(l));
      }
    }
    throw RuntimeError("unknown primitive");
  }

  std::int64_t fuel_;
  int depth_ = 0;
  std::vector<ValuePtr> keep_;
};

std::string render(Interpreter &in, const ScopePtr &s, const ValuePtr &v) {
  auto c = in.consume(s, v);
  if (auto i = std::get_if<Value::Int>(&c->node)) return std::to_string(i->n);
  if (auto b = std::get_if<Value::Bool>(&c->node)) return b->b ? "true" : "false";
  if (auto l = std::get_if<Value::List>(&c->node)) {
    std::string out = "[";
    for (std::size_t i = 0; i < l->elems.size(); ++i) {
      if (i) out += ", ";
      out += render(in, s, l->elems[i]);
    }
    return out + "]";
  }
  return "<function>";
}

}  // namespace

DirectOutcome interpret_direct(const ExprPtr &program, std::int64_t fuel) {
  Interpreter in(fuel);
  try {
    ScopePtr top;
    auto v = in.eval(top, program);
    return {DirectOutcome::Kind::kValue, render(in, top, v), {}};
  } catch (const Diverged &) {
    return {DirectOutcome::Kind::kDiverged, {}, {}};
  } catch (const RuntimeError &e) {
    return {DirectOutcome::Kind::kError, {}, e.what()};
  }
}

}  // namespace fg::testing
