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

#include "fg/ast.h"

#include <cassert>
#include <functional>
#include <map>

namespace fg {

namespace {

template <typename... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <typename... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

TypePtr make(Type::Int v) { return std::make_shared<const Type>(Type{v}); }

// Rebuilds `t`, replacing leaves through `leaf`. `depth` counts the Forall
// binders entered so far. Returns the original pointer when nothing changed.
using LeafFn = std::function<TypePtr(const TypePtr &, std::uint32_t depth)>;

TypePtr map_type(const TypePtr &t, std::uint32_t depth, const LeafFn &leaf);

ModelId map_model(const ModelId &m, std::uint32_t depth, const LeafFn &leaf,
                  bool &changed) {
  ModelId out{m.concept_name, {}};
  out.args.reserve(m.args.size());
  for (const auto &a : m.args) {
    out.args.push_back(map_type(a, depth, leaf));
    changed |= out.args.back() != a;
  }
  return out;
}

Constraint map_constraint(const Constraint &c, std::uint32_t depth,
                          const LeafFn &leaf, bool &changed) {
  if (const auto *cc = std::get_if<Constraint::Concept>(&c.node)) {
    return Constraint{Constraint::Concept{map_model(cc->model, depth, leaf, changed)}};
  }
  const auto &s = std::get<Constraint::Same>(c.node);
  auto l = map_type(s.lhs, depth, leaf);
  auto r = map_type(s.rhs, depth, leaf);
  changed |= l != s.lhs || r != s.rhs;
  return Constraint{Constraint::Same{l, r}};
}

TypePtr map_type(const TypePtr &t, std::uint32_t depth, const LeafFn &leaf) {
  return std::visit(
      Overloaded{
          [&](const Type::Int &) { return t; },
          [&](const Type::Bool &) { return t; },
          [&](const Type::Error &) { return t; },
          [&](const Type::Var &) { return leaf(t, depth); },
          [&](const Type::Bound &) { return leaf(t, depth); },
          [&](const Type::List &l) {
            auto e = map_type(l.elem, depth, leaf);
            return e == l.elem ? t : list_type(e);
          },
          [&](const Type::Arrow &a) {
            auto d = map_type(a.dom, depth, leaf);
            auto c = map_type(a.cod, depth, leaf);
            return d == a.dom && c == a.cod ? t : arrow_type(d, c);
          },
          [&](const Type::Forall &f) {
            auto b = map_type(f.body, depth + 1, leaf);
            return b == f.body ? t : forall_type(f.hint, b);
          },
          [&](const Type::Constrained &c) {
            bool changed = false;
            auto con = map_constraint(c.constraint, depth, leaf, changed);
            auto b = map_type(c.body, depth, leaf);
            return !changed && b == c.body ? t : constrained_type(con, b);
          },
          [&](const Type::Path &p) {
            bool changed = false;
            std::vector<ModelId> prefix;
            prefix.reserve(p.prefix.size());
            for (const auto &m : p.prefix) {
              prefix.push_back(map_model(m, depth, leaf, changed));
            }
            return changed ? path_type(std::move(prefix), p.name) : t;
          },
      },
      t->node);
}

void visit_leaves(const TypePtr &t, std::uint32_t depth,
                  const std::function<void(const Type &, std::uint32_t)> &fn);

void visit_constraint_leaves(
    const Constraint &c, std::uint32_t depth,
    const std::function<void(const Type &, std::uint32_t)> &fn) {
  if (const auto *cc = std::get_if<Constraint::Concept>(&c.node)) {
    for (const auto &a : cc->model.args) visit_leaves(a, depth, fn);
  } else {
    const auto &s = std::get<Constraint::Same>(c.node);
    visit_leaves(s.lhs, depth, fn);
    visit_leaves(s.rhs, depth, fn);
  }
}

void visit_leaves(const TypePtr &t, std::uint32_t depth,
                  const std::function<void(const Type &, std::uint32_t)> &fn) {
  std::visit(Overloaded{
                 [&](const Type::List &l) { visit_leaves(l.elem, depth, fn); },
                 [&](const Type::Arrow &a) {
                   visit_leaves(a.dom, depth, fn);
                   visit_leaves(a.cod, depth, fn);
                 },
                 [&](const Type::Forall &f) { visit_leaves(f.body, depth + 1, fn); },
                 [&](const Type::Constrained &c) {
                   visit_constraint_leaves(c.constraint, depth, fn);
                   visit_leaves(c.body, depth, fn);
                 },
                 [&](const Type::Path &p) {
                   for (const auto &m : p.prefix) {
                     for (const auto &a : m.args) visit_leaves(a, depth, fn);
                   }
                   fn(*t, depth);
                 },
                 [&](const auto &) { fn(*t, depth); },
             },
             t->node);
}

}  // namespace

Constraint concept_constraint(std::string name, std::vector<TypePtr> args) {
  return Constraint{Constraint::Concept{ModelId{std::move(name), std::move(args)}}};
}

Constraint same_type_constraint(TypePtr lhs, TypePtr rhs) {
  return Constraint{Constraint::Same{std::move(lhs), std::move(rhs)}};
}

TypePtr int_type() {
  static const TypePtr t = make(Type::Int{});
  return t;
}
TypePtr bool_type() {
  static const TypePtr t = std::make_shared<const Type>(Type{Type::Bool{}});
  return t;
}
TypePtr list_type(TypePtr elem) {
  return std::make_shared<const Type>(Type{Type::List{std::move(elem)}});
}
TypePtr arrow_type(TypePtr dom, TypePtr cod) {
  return std::make_shared<const Type>(Type{Type::Arrow{std::move(dom), std::move(cod)}});
}
TypePtr forall_type(std::string hint, TypePtr body) {
  return std::make_shared<const Type>(Type{Type::Forall{std::move(hint), std::move(body)}});
}
TypePtr constrained_type(Constraint constraint, TypePtr body) {
  return std::make_shared<const Type>(
      Type{Type::Constrained{std::move(constraint), std::move(body)}});
}
TypePtr var_type(TypeVarId id, std::string name) {
  return std::make_shared<const Type>(Type{Type::Var{id, std::move(name)}});
}
TypePtr bound_type(std::uint32_t index) {
  return std::make_shared<const Type>(Type{Type::Bound{index}});
}
TypePtr path_type(std::vector<ModelId> prefix, std::string name) {
  assert(!prefix.empty());
  return std::make_shared<const Type>(Type{Type::Path{std::move(prefix), std::move(name)}});
}
TypePtr error_type() {
  static const TypePtr t = std::make_shared<const Type>(Type{Type::Error{}});
  return t;
}

const TypePtr *TypeSubst::find(TypeVarId id) const {
  for (const auto &[k, v] : entries) {
    if (k == id) return &v;
  }
  return nullptr;
}

TypePtr substitute_type(const TypePtr &target, const TypeSubst &subst) {
  if (subst.entries.empty()) return target;
  return map_type(target, 0, [&](const TypePtr &leaf, std::uint32_t) {
    if (const auto *v = leaf->as<Type::Var>()) {
      if (const auto *r = subst.find(v->id)) return *r;
    }
    return leaf;
  });
}

TypePtr substitute_type(const TypePtr &target, TypeVarId binder,
                        const TypePtr &replacement) {
  return substitute_type(target, TypeSubst{{{binder, replacement}}});
}

Constraint substitute_constraint(const Constraint &c, const TypeSubst &subst) {
  bool changed = false;
  return map_constraint(
      c, 0,
      [&](const TypePtr &leaf, std::uint32_t) {
        if (const auto *v = leaf->as<Type::Var>()) {
          if (const auto *r = subst.find(v->id)) return *r;
        }
        return leaf;
      },
      changed);
}

Constraint substitute_constraint(const Constraint &c, TypeVarId binder,
                                 const TypePtr &replacement) {
  return substitute_constraint(c, TypeSubst{{{binder, replacement}}});
}

TypePtr open_type(const TypePtr &body, const TypePtr &replacement) {
  return map_type(body, 0, [&](const TypePtr &leaf, std::uint32_t depth) {
    if (const auto *b = leaf->as<Type::Bound>()) {
      if (b->index == depth) return replacement;
    }
    return leaf;
  });
}

TypePtr close_type(const TypePtr &body, TypeVarId id) {
  return map_type(body, 0, [&](const TypePtr &leaf, std::uint32_t depth) {
    if (const auto *v = leaf->as<Type::Var>()) {
      if (v->id == id) return bound_type(depth);
    }
    return leaf;
  });
}

bool alpha_equal(const ModelId &a, const ModelId &b) {
  if (a.concept_name != b.concept_name || a.args.size() != b.args.size()) return false;
  for (std::size_t i = 0; i < a.args.size(); ++i) {
    if (!alpha_equal(a.args[i], b.args[i])) return false;
  }
  return true;
}

bool alpha_equal(const Constraint &a, const Constraint &b) {
  if (a.node.index() != b.node.index()) return false;
  if (a.is_concept()) return alpha_equal(a.model(), b.model());
  const auto &sa = std::get<Constraint::Same>(a.node);
  const auto &sb = std::get<Constraint::Same>(b.node);
  return alpha_equal(sa.lhs, sb.lhs) && alpha_equal(sa.rhs, sb.rhs);
}

bool alpha_equal(const TypePtr &a, const TypePtr &b) {
  if (a == b) return true;
  if (a->node.index() != b->node.index()) return false;
  return std::visit(
      Overloaded{
          [&](const Type::List &l) { return alpha_equal(l.elem, b->as<Type::List>()->elem); },
          [&](const Type::Arrow &x) {
            const auto *y = b->as<Type::Arrow>();
            return alpha_equal(x.dom, y->dom) && alpha_equal(x.cod, y->cod);
          },
          [&](const Type::Forall &x) { return alpha_equal(x.body, b->as<Type::Forall>()->body); },
          [&](const Type::Constrained &x) {
            const auto *y = b->as<Type::Constrained>();
            return alpha_equal(x.constraint, y->constraint) && alpha_equal(x.body, y->body);
          },
          [&](const Type::Var &x) { return x.id == b->as<Type::Var>()->id; },
          [&](const Type::Bound &x) { return x.index == b->as<Type::Bound>()->index; },
          [&](const Type::Path &x) {
            const auto *y = b->as<Type::Path>();
            if (x.name != y->name || x.prefix.size() != y->prefix.size()) return false;
            for (std::size_t i = 0; i < x.prefix.size(); ++i) {
              if (!alpha_equal(x.prefix[i], y->prefix[i])) return false;
            }
            return true;
          },
          [&](const auto &) { return true; },
      },
      a->node);
}

std::set<TypeVarId> free_type_vars(const TypePtr &t) {
  std::set<TypeVarId> out;
  visit_leaves(t, 0, [&](const Type &leaf, std::uint32_t) {
    if (const auto *v = leaf.as<Type::Var>()) out.insert(v->id);
  });
  return out;
}

bool contains_error(const TypePtr &t) {
  bool found = false;
  visit_leaves(t, 0, [&](const Type &leaf, std::uint32_t) {
    found |= leaf.is<Type::Error>();
  });
  return found;
}

bool contains_path(const TypePtr &t) {
  bool found = false;
  visit_leaves(t, 0, [&](const Type &leaf, std::uint32_t) {
    found |= leaf.is<Type::Path>();
  });
  return found;
}

std::string_view prim_name(PrimOp op) {
  switch (op) {
    case PrimOp::kAdd: return "+";
    case PrimOp::kSub: return "-";
    case PrimOp::kMul: return "*";
    case PrimOp::kLess: return "<";
    case PrimOp::kEqual: return "==";
    case PrimOp::kIsNil: return "isnil";
    case PrimOp::kHead: return "head";
    case PrimOp::kTail: return "tail";
    case PrimOp::kCons: return "cons";
  }
  return "?";
}

int prim_arity(PrimOp op) {
  switch (op) {
    case PrimOp::kIsNil:
    case PrimOp::kHead:
    case PrimOp::kTail:
      return 1;
    default:
      return 2;
  }
}

bool prim_is_binary_operator(PrimOp op) {
  switch (op) {
    case PrimOp::kAdd:
    case PrimOp::kSub:
    case PrimOp::kMul:
    case PrimOp::kLess:
    case PrimOp::kEqual:
      return true;
    default:
      return false;
  }
}

ExprPtr make_expr(Expr::Node node, SourceSpan span) {
  return std::make_shared<const Expr>(Expr{std::move(span), std::move(node)});
}

// ---------------------------------------------------------------------------
// Structural equality of expressions

namespace {

class StructuralComparer {
 public:
  bool expr(const ExprPtr &a, const ExprPtr &b) {
    if (!a || !b) return a == b;
    if (a->node.index() != b->node.index()) return false;
    return std::visit(
        Overloaded{
            [&](const Expr::IntLit &x) { return x.value == b->as<Expr::IntLit>()->value; },
            [&](const Expr::BoolLit &x) { return x.value == b->as<Expr::BoolLit>()->value; },
            [&](const Expr::Lam &x) {
              const auto *y = b->as<Expr::Lam>();
              return x.param == y->param && opt_type(x.ann, y->ann) && expr(x.body, y->body);
            },
            [&](const Expr::App &x) {
              const auto *y = b->as<Expr::App>();
              return expr(x.fn, y->fn) && expr(x.arg, y->arg);
            },
            [&](const Expr::TyLam &x) {
              const auto *y = b->as<Expr::TyLam>();
              bind(x.binder, y->binder);
              return expr(x.body, y->body);
            },
            [&](const Expr::TyApp &x) {
              const auto *y = b->as<Expr::TyApp>();
              return expr(x.subject, y->subject) && type(x.arg, y->arg);
            },
            [&](const Expr::ConstrainedE &x) {
              const auto *y = b->as<Expr::ConstrainedE>();
              return constraint(x.constraint, y->constraint) && expr(x.body, y->body);
            },
            [&](const Expr::PathE &x) {
              const auto *y = b->as<Expr::PathE>();
              return x.path.name == y->path.name && models(x.path.prefix, y->path.prefix);
            },
            [&](const Expr::ConceptDecl &x) {
              const auto *y = b->as<Expr::ConceptDecl>();
              return concept_info(*x.info, *y->info) && expr(x.rest, y->rest);
            },
            [&](const Expr::ModelDecl &x) {
              const auto *y = b->as<Expr::ModelDecl>();
              return model_info(*x.info, *y->info) && expr(x.rest, y->rest);
            },
            [&](const Expr::TypeAlias &x) {
              const auto *y = b->as<Expr::TypeAlias>();
              if (!type(x.rhs, y->rhs)) return false;
              bind(x.binder, y->binder);
              return expr(x.rest, y->rest);
            },
            [&](const Expr::Let &x) {
              const auto *y = b->as<Expr::Let>();
              return x.name == y->name && expr(x.bound, y->bound) && expr(x.rest, y->rest);
            },
            [&](const Expr::Fix &x) { return expr(x.body, b->as<Expr::Fix>()->body); },
            [&](const Expr::If &x) {
              const auto *y = b->as<Expr::If>();
              return expr(x.cond, y->cond) && expr(x.then_branch, y->then_branch) &&
                     expr(x.else_branch, y->else_branch);
            },
            [&](const Expr::ListLit &x) {
              const auto *y = b->as<Expr::ListLit>();
              if (x.elems.size() != y->elems.size()) return false;
              if (x.elems.empty() && !opt_type(x.elem_type, y->elem_type)) return false;
              for (std::size_t i = 0; i < x.elems.size(); ++i) {
                if (!expr(x.elems[i], y->elems[i])) return false;
              }
              return true;
            },
            [&](const Expr::Prim &x) {
              const auto *y = b->as<Expr::Prim>();
              if (x.op != y->op || x.args.size() != y->args.size()) return false;
              for (std::size_t i = 0; i < x.args.size(); ++i) {
                if (!expr(x.args[i], y->args[i])) return false;
              }
              return true;
            },
        },
        a->node);
  }

 private:
  void bind(const TypeBinder &a, const TypeBinder &b) { renaming_[a.id] = b.id; }

  TypeVarId rename(TypeVarId id) const {
    auto it = renaming_.find(id);
    return it == renaming_.end() ? id : it->second;
  }

  bool opt_type(const TypePtr &a, const TypePtr &b) {
    if (!a || !b) return a == b;
    return type(a, b);
  }

  bool type(const TypePtr &a, const TypePtr &b) {
    if (renaming_.empty()) return alpha_equal(a, b);
    TypeSubst subst;
    for (auto id : free_type_vars(a)) {
      auto to = rename(id);
      if (to != id) subst.entries.emplace_back(id, var_type(to, ""));
    }
    return alpha_equal(substitute_type(a, subst), b);
  }

  bool models(const std::vector<ModelId> &a, const std::vector<ModelId> &b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (a[i].concept_name != b[i].concept_name || a[i].args.size() != b[i].args.size()) {
        return false;
      }
      for (std::size_t j = 0; j < a[i].args.size(); ++j) {
        if (!type(a[i].args[j], b[i].args[j])) return false;
      }
    }
    return true;
  }

  bool constraint(const Constraint &a, const Constraint &b) {
    if (a.node.index() != b.node.index()) return false;
    if (a.is_concept()) return models({a.model()}, {b.model()});
    const auto &sa = std::get<Constraint::Same>(a.node);
    const auto &sb = std::get<Constraint::Same>(b.node);
    return type(sa.lhs, sb.lhs) && type(sa.rhs, sb.rhs);
  }

  bool concept_info(const ConceptInfo &a, const ConceptInfo &b) {
    if (a.name != b.name || a.params.size() != b.params.size() ||
        a.assoc.size() != b.assoc.size() || a.nested.size() != b.nested.size() ||
        a.members.size() != b.members.size()) {
      return false;
    }
    for (std::size_t i = 0; i < a.params.size(); ++i) bind(a.params[i], b.params[i]);
    for (std::size_t i = 0; i < a.assoc.size(); ++i) {
      if (a.assoc[i].name != b.assoc[i].name) return false;
      bind(a.assoc[i], b.assoc[i]);
    }
    for (std::size_t i = 0; i < a.nested.size(); ++i) {
      if (!constraint(a.nested[i], b.nested[i])) return false;
    }
    for (std::size_t i = 0; i < a.members.size(); ++i) {
      if (a.members[i].first != b.members[i].first ||
          !type(a.members[i].second, b.members[i].second)) {
        return false;
      }
    }
    return true;
  }

  bool model_info(const ModelInfo &a, const ModelInfo &b) {
    if (a.concept_name != b.concept_name || a.args.size() != b.args.size() ||
        a.assoc_binds.size() != b.assoc_binds.size() ||
        a.member_binds.size() != b.member_binds.size()) {
      return false;
    }
    for (std::size_t i = 0; i < a.args.size(); ++i) {
      if (!type(a.args[i], b.args[i])) return false;
    }
    for (std::size_t i = 0; i < a.assoc_binds.size(); ++i) {
      if (a.assoc_binds[i].first != b.assoc_binds[i].first ||
          !type(a.assoc_binds[i].second, b.assoc_binds[i].second)) {
        return false;
      }
    }
    for (std::size_t i = 0; i < a.member_binds.size(); ++i) {
      if (a.member_binds[i].first != b.member_binds[i].first ||
          !expr(a.member_binds[i].second, b.member_binds[i].second)) {
        return false;
      }
    }
    return true;
  }

  std::map<TypeVarId, TypeVarId> renaming_;
};

}  // namespace

bool structurally_equal(const ExprPtr &a, const ExprPtr &b) {
  return StructuralComparer{}.expr(a, b);
}

}  // namespace fg
