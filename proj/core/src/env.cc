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

#include "fg/env.h"

#include <algorithm>

#include "fg/pretty.h"
#include "fg/typeq.h"

namespace fg {

struct Env::Node {
  EnvEntry entry;
  std::shared_ptr<const Node> next;
  int term_depth = 0;
  int type_depth = 0;
  // Most recent node (possibly this one) holding an equation.
  const Node *eq_anchor = nullptr;
  mutable std::shared_ptr<typeq::ClosureState> closure;
};

namespace {

bool is_equation(const EnvEntry &e) {
  if (std::holds_alternative<TypeEqEntry>(e)) return true;
  auto c = std::get_if<ConstraintEntry>(&e);
  return c && !c->constraint.is_concept();
}

int term_level_of(const EnvEntry &e) {
  if (auto t = std::get_if<TermBind>(&e)) return t->core_level;
  if (auto c = std::get_if<ConstraintEntry>(&e)) return c->dict ? c->dict->term_level : -1;
  if (auto m = std::get_if<ModelEntry>(&e)) return m->dict.term_level;
  return -1;
}

}  // namespace

Env Env::push(EnvEntry entry) const {
  auto node = std::make_shared<Node>();
  int prev_terms = term_depth();
  int prev_types = type_depth();
  node->term_depth = std::max(prev_terms, term_level_of(entry) + 1);
  int type_level = -1;
  if (auto v = std::get_if<TypeVarEntry>(&entry)) type_level = v->core_level;
  node->type_depth = std::max(prev_types, type_level + 1);
  bool eq = is_equation(entry);
  node->entry = std::move(entry);
  node->next = head_;
  node->eq_anchor = eq ? node.get() : (head_ ? head_->eq_anchor : nullptr);
  return Env(std::move(node));
}

Env Env::push_term(std::string name, TypePtr type) const {
  return push(TermBind{std::move(name), std::move(type), term_depth(), {}});
}

Env Env::push_type_var(TypeVarId id, std::string name) const {
  return push(TypeVarEntry{id, std::move(name), type_depth()});
}

int Env::term_depth() const { return head_ ? head_->term_depth : 0; }
int Env::type_depth() const { return head_ ? head_->type_depth : 0; }

void Env::for_each(const std::function<bool(const EnvEntry &)> &fn) const {
  for (const Node *n = head_.get(); n; n = n->next.get()) {
    if (!fn(n->entry)) return;
  }
}

std::vector<EnvEntry> Env::entries() const {
  std::vector<EnvEntry> out;
  for_each([&](const EnvEntry &e) {
    out.push_back(e);
    return true;
  });
  return out;
}

std::optional<TermBind> Env::lookup_term(const std::string &name) const {
  std::optional<TermBind> found;
  for_each([&](const EnvEntry &e) {
    auto t = std::get_if<TermBind>(&e);
    if (t && t->name == name) found = *t;
    return !found;
  });
  return found;
}

std::shared_ptr<const ConceptInfo> Env::find_concept(const std::string &name) const {
  std::shared_ptr<const ConceptInfo> found;
  for_each([&](const EnvEntry &e) {
    auto c = std::get_if<ConceptEntry>(&e);
    if (c && c->info->name == name) found = c->info;
    return !found;
  });
  return found;
}

std::optional<int> Env::type_level(TypeVarId id) const {
  std::optional<int> level;
  bool seen = false;
  for_each([&](const EnvEntry &e) {
    auto v = std::get_if<TypeVarEntry>(&e);
    if (v && v->id == id) {
      seen = true;
      if (v->core_level >= 0) level = v->core_level;
    }
    return !seen;
  });
  return level;
}

typeq::ClosureState &Env::closure() const {
  const Node *anchor = head_ ? head_->eq_anchor : nullptr;
  if (!anchor) {
    if (!empty_closure_) empty_closure_ = std::make_shared<typeq::ClosureState>();
    return *empty_closure_;
  }
  if (!anchor->closure) {
    // Rebuild an Env view rooted at the anchor; its equations are exactly
    // the ones visible here.
    const Node *n = head_.get();
    std::shared_ptr<const Node> root = head_;
    while (n != anchor) {
      root = n->next;
      n = root.get();
    }
    anchor->closure = std::make_shared<typeq::ClosureState>(typeq::build_closure(Env(root)));
  }
  return *anchor->closure;
}

std::optional<TypePtr> lookup_term(const std::string &name, const Env &env) {
  if (auto b = env.lookup_term(name)) return b->type;
  return std::nullopt;
}

Env restrict(const Env &env) {
  auto entries = env.entries();
  Env out;
  for (auto it = entries.rbegin(); it != entries.rend(); ++it) {
    if (std::holds_alternative<ConceptEntry>(*it) || std::holds_alternative<ConstraintEntry>(*it) ||
        std::holds_alternative<TypeEqEntry>(*it)) {
      out = out.push(*it);
    }
  }
  return out;
}

DictLayout dict_layout(const ConceptInfo &info) {
  DictLayout layout;
  int slot = 0;
  for (const auto &c : info.nested) layout.nested_slots.push_back(c.is_concept() ? slot++ : -1);
  layout.first_member_slot = slot;
  layout.size = slot + static_cast<int>(info.members.size());
  return layout;
}

TypeSubst concept_instance_subst(const ConceptInfo &info, const std::vector<TypePtr> &args) {
  TypeSubst subst;
  for (std::size_t i = 0; i < info.params.size() && i < args.size(); ++i) {
    subst.entries.emplace_back(info.params[i].id, args[i]);
  }
  for (const auto &a : info.assoc) {
    subst.entries.emplace_back(a.id, path_type({ModelId{info.name, args}}, a.name));
  }
  return subst;
}

std::variant<std::vector<FlatConstraint>, UnknownConcept> flat_with_slots(const Constraint &c,
                                                                          const Env &env) {
  std::vector<FlatConstraint> out;
  std::optional<UnknownConcept> failure;
  std::function<void(const Constraint &, std::vector<int>)> rec =
      [&](const Constraint &k, std::vector<int> slots) {
        if (failure) return;
        bool dup = std::any_of(out.begin(), out.end(),
                               [&](const FlatConstraint &f) { return alpha_equal(f.constraint, k); });
        if (dup) return;
        if (!k.is_concept()) {
          out.push_back({k, std::move(slots)});
          return;
        }
        const auto &m = k.model();
        auto info = env.find_concept(m.concept_name);
        if (!info || info->params.size() != m.args.size()) {
          failure = UnknownConcept{m.concept_name};
          return;
        }
        out.push_back({k, slots});
        auto subst = concept_instance_subst(*info, m.args);
        auto layout = dict_layout(*info);
        for (std::size_t i = 0; i < info->nested.size(); ++i) {
          auto child = slots;
          if (layout.nested_slots[i] >= 0) child.push_back(layout.nested_slots[i]);
          rec(substitute_constraint(info->nested[i], subst), std::move(child));
        }
      };
  rec(c, {});
  if (failure) return *failure;
  return out;
}

std::variant<std::vector<Constraint>, UnknownConcept> flat(const Constraint &c, const Env &env) {
  auto r = flat_with_slots(c, env);
  if (auto u = std::get_if<UnknownConcept>(&r)) return *u;
  std::vector<Constraint> out;
  for (auto &f : std::get<std::vector<FlatConstraint>>(r)) out.push_back(std::move(f.constraint));
  return out;
}

std::optional<ConceptEvidence> find_evidence(const ModelId &m, const Env &env) {
  auto &state = env.closure();
  auto args_equal = [&](const ModelId &other) {
    if (other.concept_name != m.concept_name || other.args.size() != m.args.size()) return false;
    for (std::size_t i = 0; i < m.args.size(); ++i) {
      if (!typeq::types_equal(state, m.args[i], other.args[i])) return false;
    }
    return true;
  };
  std::optional<ConceptEvidence> found;
  env.for_each([&](const EnvEntry &e) {
    if (auto c = std::get_if<ConstraintEntry>(&e); c && c->constraint.is_concept()) {
      if (args_equal(c->constraint.model())) found = ConceptEvidence{c->constraint.model(), c->dict, false};
    } else if (auto me = std::get_if<ModelEntry>(&e)) {
      if (args_equal(me->model)) found = ConceptEvidence{me->model, me->dict, true};
    }
    return !found;
  });
  return found;
}

bool satisfies(const Env &env, const Constraint &c) {
  if (c.is_concept()) return find_evidence(c.model(), env).has_value();
  const auto &s = std::get<Constraint::Same>(c.node);
  return typeq::types_equal(env.closure(), s.lhs, s.rhs);
}

std::variant<PathResolution, PathFailure> lookup_path(const TermPath &path, const Env &env) {
  if (path.prefix.empty()) {
    if (auto t = lookup_term(path.name, env)) return PathResolution{*t, std::nullopt, -1};
    return PathFailure{PathError::kUnknownMember, path.name};
  }
  const ModelId &m = path.prefix.front();
  auto info = env.find_concept(m.concept_name);
  if (!info || info->params.size() != m.args.size()) {
    return PathFailure{PathError::kUnknownConcept, m.concept_name};
  }
  auto evidence = find_evidence(m, env);
  if (!evidence) return PathFailure{PathError::kUnsatisfied, to_string(m)};

  auto subst = concept_instance_subst(*info, m.args);
  auto layout = dict_layout(*info);
  if (path.prefix.size() == 1) {
    for (std::size_t i = 0; i < info->members.size(); ++i) {
      if (info->members[i].first != path.name) continue;
      return PathResolution{substitute_type(info->members[i].second, subst), evidence->dict,
                            layout.first_member_slot + static_cast<int>(i)};
    }
    return PathFailure{PathError::kUnknownMember, path.name};
  }

  Env inner = restrict(env);
  for (std::size_t i = 0; i < info->nested.size(); ++i) {
    std::optional<DictRef> dict;
    if (evidence->dict && layout.nested_slots[i] >= 0) {
      dict = evidence->dict;
      dict->projections.push_back(layout.nested_slots[i]);
    }
    inner = inner.push(ConstraintEntry{substitute_constraint(info->nested[i], subst), dict});
  }
  TermPath rest{{path.prefix.begin() + 1, path.prefix.end()}, path.name};
  return lookup_path(rest, inner);
}

std::optional<TypePtr> lookup_path_type(const TermPath &path, const Env &env) {
  auto r = lookup_path(path, env);
  if (auto p = std::get_if<PathResolution>(&r)) return p->type;
  return std::nullopt;
}

}  // namespace fg
