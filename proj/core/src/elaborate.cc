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

#include "fg/elaborate.h"

#include <fmt/format.h>

#include <mutex>
#include <unordered_map>
#include <unordered_set>

#include "fg/parser.h"
#include "fg/pretty.h"
#include "fg/typecheck.h"
#include "fg/typeq.h"
#include "checker_internal.h"

namespace fg {

namespace {

template <typename... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <typename... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

std::mutex group_param_mutex;
std::unordered_set<TypeVarId> &group_param_ids() {
  static std::unordered_set<TypeVarId> ids;
  return ids;
}

using LevelMap = std::unordered_map<TypeVarId, int>;

LevelMap level_map(const Env &env) {
  LevelMap levels;
  env.for_each([&](const EnvEntry &e) {
    if (auto v = std::get_if<TypeVarEntry>(&e); v && v->core_level >= 0) {
      levels.emplace(v->id, v->core_level);
    }
    return true;
  });
  return levels;
}

struct FlatEntry {
  Constraint constraint;
  int dict_index;  // -1 for same-type constraints
  std::vector<int> slots;
};

struct GroupPlan {
  std::vector<FlatEntry> flat;
  std::vector<std::pair<TypePtr, TypeBinder>> params;
};

GroupPlan plan_group(const Env &env, const std::vector<Constraint> &cs) {
  GroupPlan plan;
  int dict_index = 0;
  for (const auto &c : cs) {
    auto r = flat_with_slots(c, env);
    if (auto u = std::get_if<UnknownConcept>(&r)) throw ElabError("unknown concept " + u->name);
    int index = c.is_concept() ? dict_index++ : -1;
    for (auto &f : std::get<std::vector<FlatConstraint>>(r)) {
      int owner = f.constraint.is_concept() ? index : -1;
      plan.flat.push_back({std::move(f.constraint), owner, std::move(f.slots)});
    }
  }
  typeq::ClosureState local;
  for (const auto &f : plan.flat) {
    if (f.constraint.is_concept()) continue;
    const auto &s = std::get<Constraint::Same>(f.constraint.node);
    local.assume(s.lhs, s.rhs);
  }
  for (const auto &f : plan.flat) {
    if (!f.constraint.is_concept()) continue;
    const auto &m = f.constraint.model();
    auto info = env.find_concept(m.concept_name);
    for (const auto &beta : info->assoc) {
      auto p = path_type({m}, beta.name);
      bool seen = std::any_of(plan.params.begin(), plan.params.end(),
                              [&](const auto &q) { return alpha_equal(q.first, p); });
      if (seen || local.canonical(p, {})) continue;
      TypeBinder b{fresh_type_var_id(), beta.name};
      {
        std::lock_guard lock(group_param_mutex);
        group_param_ids().insert(b.id);
      }
      local.assume(p, var_type(b.id, b.name));
      plan.params.emplace_back(p, b);
    }
  }
  return plan;
}

sf::CTypePtr from_witness(const Env &env, const TypePtr &w, const LevelMap &levels);

}  // namespace

bool is_group_parameter(TypeVarId id) {
  std::lock_guard lock(group_param_mutex);
  return group_param_ids().count(id) > 0;
}

std::pair<std::vector<Constraint>, TypePtr> peel_constraints(const TypePtr &t) {
  std::vector<Constraint> cs;
  TypePtr cur = t;
  while (auto c = cur->as<Type::Constrained>()) {
    cs.push_back(c->constraint);
    cur = c->body;
  }
  return {std::move(cs), cur};
}

TypePtr wrap_constraints(const std::vector<Constraint> &cs, TypePtr body) {
  for (auto it = cs.rbegin(); it != cs.rend(); ++it) body = constrained_type(*it, std::move(body));
  return body;
}

std::vector<TypePtr> group_param_paths(const Env &env, const std::vector<Constraint> &cs) {
  std::vector<TypePtr> out;
  for (auto &[p, b] : plan_group(env, cs).params) out.push_back(p);
  return out;
}

ConstraintGroup enter_group(const Env &env, const std::vector<Constraint> &cs, bool bind_dicts) {
  auto plan = plan_group(env, cs);
  ConstraintGroup g;
  g.env = env;
  for (const auto &f : plan.flat) {
    if (!f.constraint.is_concept()) g.env = g.env.push(ConstraintEntry{f.constraint, std::nullopt});
  }
  for (const auto &[p, b] : plan.params) {
    g.env = g.env.push_type_var(b.id, b.name);
    g.env = g.env.push(TypeEqEntry{p, var_type(b.id, b.name)});
    g.params.push_back(b.id);
    g.param_names.push_back(b.name);
  }
  for (const auto &c : cs) {
    if (c.is_concept()) g.dict_models.push_back(c.model());
  }
  for (const auto &m : g.dict_models) g.dict_types.push_back(dict_type(g.env, m));
  int base = env.term_depth();
  int type_depth = g.env.type_depth();
  for (const auto &f : plan.flat) {
    if (!f.constraint.is_concept()) continue;
    std::optional<DictRef> dict;
    if (bind_dicts) {
      auto i = static_cast<std::size_t>(f.dict_index);
      dict = DictRef{base + f.dict_index, f.slots, CoreTypeAt{g.dict_types[i], type_depth}};
    }
    g.env = g.env.push(ConstraintEntry{f.constraint, std::move(dict)});
  }
  return g;
}

sf::CTypePtr translate_type(const Env &env, const TypePtr &t) {
  auto levels = level_map(env);
  typeq::VarLevelFn fn = [&](TypeVarId id) -> std::optional<int> {
    auto it = levels.find(id);
    if (it == levels.end()) return std::nullopt;
    return it->second;
  };
  auto w = env.closure().canonical(t, fn);
  if (!w) throw ElabError("no core representative for type " + to_string(t));
  return from_witness(env, *w, levels);
}

namespace {

sf::CTypePtr from_witness(const Env &env, const TypePtr &w, const LevelMap &levels) {
  return std::visit(
      Overloaded{
          [&](const Type::Int &) { return sf::c_int(); },
          [&](const Type::Bool &) { return sf::c_bool(); },
          [&](const Type::List &l) { return sf::c_list(from_witness(env, l.elem, levels)); },
          [&](const Type::Arrow &a) {
            return sf::c_arrow(from_witness(env, a.dom, levels), from_witness(env, a.cod, levels));
          },
          [&](const Type::Var &v) {
            auto it = levels.find(v.id);
            if (it == levels.end()) throw ElabError("type variable " + v.name + " has no core binder");
            return sf::c_tvar(env.type_depth() - it->second - 1);
          },
          [&](const Type::Forall &f) {
            TypeVarId id = fresh_type_var_id();
            Env inner = env.push_type_var(id, f.hint);
            auto body = translate_type(inner, open_type(f.body, var_type(id, f.hint)));
            return sf::c_forall(f.hint, body);
          },
          [&](const Type::Constrained &) {
            auto [cs, body] = peel_constraints(w);
            auto g = enter_group(env, cs, false);
            auto result = translate_type(g.env, body);
            for (auto it = g.dict_types.rbegin(); it != g.dict_types.rend(); ++it) {
              result = sf::c_arrow(*it, result);
            }
            for (auto it = g.param_names.rbegin(); it != g.param_names.rend(); ++it) {
              result = sf::c_forall(*it, result);
            }
            return result;
          },
          [&](const auto &) -> sf::CTypePtr {
            throw ElabError("unexpected representative " + to_string(w));
          },
      },
      w->node);
}

}  // namespace

sf::CTypePtr dict_type(const Env &env, const ModelId &m) {
  auto info = env.find_concept(m.concept_name);
  if (!info) throw ElabError("unknown concept " + m.concept_name);
  auto subst = concept_instance_subst(*info, m.args);
  std::vector<sf::CTypePtr> slots;
  for (const auto &n : info->nested) {
    if (n.is_concept()) slots.push_back(dict_type(env, substitute_constraint(n, subst).model()));
  }
  for (const auto &[name, ty] : info->members) {
    slots.push_back(translate_type(env, substitute_type(ty, subst)));
  }
  return sf::c_tuple(std::move(slots));
}

sf::CTypePtr core_type_in(const Env &env, const CoreTypeAt &at) {
  if (!at.type) throw ElabError("binding has no core type");
  return sf::shift_type(at.type, env.type_depth() - at.type_depth);
}

sf::CTermPtr core_var(const Env &env, int level, std::string hint) {
  return sf::make_term(sf::CTerm::Var{env.term_depth() - level - 1, std::move(hint)});
}

CoreValue dict_value(const Env &env, const DictRef &ref) {
  CoreValue v{core_var(env, ref.term_level, "d"), core_type_in(env, ref.root_type)};
  for (int p : ref.projections) {
    auto tup = v.type->as<sf::CType::Tuple>();
    if (!tup || p >= static_cast<int>(tup->elems.size())) {
      throw ElabError("dictionary projection out of range");
    }
    v.term = sf::make_term(sf::CTerm::Proj{v.term, p});
    v.type = tup->elems[static_cast<std::size_t>(p)];
  }
  return v;
}

CoreValue build_dict(const Env &env, const ModelId &m) {
  auto ev = find_evidence(m, env);
  if (!ev || !ev->dict) throw ElabError("no dictionary for " + to_string(m));
  return dict_value(env, *ev->dict);
}

Elaboration elaborate_program(const ExprPtr &program) { return detail::check_and_elaborate(program); }

sf::EvalOutcome eval(const ExprPtr &program, std::int64_t fuel) {
  auto r = elaborate_program(program);
  if (!r.ok()) {
    std::string why = !r.diagnostics.empty() ? format_diagnostic(r.diagnostics.front()) : r.error;
    return {sf::EvalOutcome::Kind::kStuck, nullptr, 0, "program does not elaborate: " + why};
  }
  return sf::sf_eval(r.core, fuel);
}

}  // namespace fg
