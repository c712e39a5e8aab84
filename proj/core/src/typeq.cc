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

#include "fg/typeq.h"

#include <fmt/format.h>

#include <algorithm>
#include <limits>

#include "fg/env.h"

namespace fg::typeq {

namespace {

template <typename... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <typename... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

using Rank = std::tuple<bool, int, int, int, std::string>;

constexpr std::uint64_t kErrorLeaf = std::numeric_limits<std::uint64_t>::max();

std::string var_repr(TypeVarId id, const VarLevelFn &levels) {
  if (!levels) return fmt::format("v{:010}", id);
  if (auto level = levels(id)) return fmt::format("v{:010}", *level);
  return fmt::format("u{:010}", id);
}

struct RawRank {
  int vars = 0;
  int height = 0;
  int size = 0;
  std::string repr;
};

// Rank of a term taken verbatim (Forall and constrained representatives).
RawRank raw_rank(const TypePtr &t, const VarLevelFn &levels) {
  auto combine = [&](std::string tag, const std::vector<TypePtr> &kids) {
    RawRank r;
    r.repr = tag + "(";
    for (const auto &k : kids) {
      auto c = raw_rank(k, levels);
      r.vars += c.vars;
      r.height = std::max(r.height, c.height + 1);
      r.size += c.size;
      r.repr += c.repr + ",";
    }
    r.size += 1;
    r.repr += ")";
    return r;
  };
  auto model_kids = [](const ModelId &m) { return m.args; };
  return std::visit(
      Overloaded{
          [&](const Type::Int &) { return RawRank{0, 0, 1, "i"}; },
          [&](const Type::Bool &) { return RawRank{0, 0, 1, "b"}; },
          [&](const Type::Error &) { return RawRank{0, 0, 1, "e"}; },
          [&](const Type::List &l) { return combine("L", {l.elem}); },
          [&](const Type::Arrow &a) { return combine("A", {a.dom, a.cod}); },
          [&](const Type::Forall &f) { return combine("F", {f.body}); },
          [&](const Type::Constrained &c) {
            if (c.constraint.is_concept()) {
              auto kids = model_kids(c.constraint.model());
              kids.push_back(c.body);
              return combine("C" + c.constraint.model().concept_name, kids);
            }
            const auto &s = std::get<Constraint::Same>(c.constraint.node);
            return combine("S", {s.lhs, s.rhs, c.body});
          },
          [&](const Type::Var &v) {
            bool visible = !levels || levels(v.id).has_value();
            return RawRank{visible ? 1 : 0, 0, 1, var_repr(v.id, levels)};
          },
          [&](const Type::Bound &b) { return RawRank{0, 0, 1, fmt::format("B{}", b.index)}; },
          [&](const Type::Path &p) {
            std::vector<TypePtr> kids;
            std::string tag = "P";
            for (const auto &m : p.prefix) {
              tag += m.concept_name + "/";
              kids.insert(kids.end(), m.args.begin(), m.args.end());
            }
            return combine(tag + p.name, kids);
          },
      },
      t->node);
}

}  // namespace

NodeId ClosureState::find(NodeId n) {
  NodeId root = n;
  while (parent_[root] != root) root = parent_[root];
  while (parent_[n] != root) {
    NodeId next = parent_[n];
    parent_[n] = root;
    n = next;
  }
  return root;
}

ClosureState::Key ClosureState::signature(NodeId n) {
  const Node &node = nodes_[n];
  std::vector<NodeId> reps;
  reps.reserve(node.children.size());
  for (NodeId c : node.children) reps.push_back(find(c));
  return {node.head, node.label, node.num, std::move(reps)};
}

NodeId ClosureState::add_node(Head head, std::string label, std::uint64_t num,
                              std::vector<NodeId> children, TypePtr term) {
  Key key{head, label, num, children};
  if (auto it = hashcons_.find(key); it != hashcons_.end()) return it->second;
  auto id = static_cast<NodeId>(nodes_.size());
  nodes_.push_back(Node{head, std::move(label), num, std::move(children), std::move(term)});
  parent_.push_back(id);
  rank_.push_back(0);
  uses_.emplace_back();
  hashcons_.emplace(std::move(key), id);
  witness_.clear();
  for (NodeId c : nodes_[id].children) {
    auto &uses = uses_[find(c)];
    if (uses.empty() || uses.back() != id) uses.push_back(id);
  }
  auto [it, inserted] = signatures_.emplace(signature(id), id);
  if (!inserted) {
    pending_.emplace_back(id, it->second);
    propagate();
  }
  return id;
}

NodeId ClosureState::intern_model_path(const std::vector<ModelId> &prefix, std::size_t i,
                                       const std::string &name, const TypePtr &whole) {
  NodeId rest = i + 1 < prefix.size() ? intern_model_path(prefix, i + 1, name, nullptr)
                                      : add_node(Head::kAssocName, name, 0, {}, nullptr);
  std::vector<NodeId> children;
  for (const auto &a : prefix[i].args) children.push_back(intern(a));
  children.push_back(rest);
  TypePtr term = whole;
  if (!term) {
    term = path_type(std::vector<ModelId>(prefix.begin() + static_cast<std::ptrdiff_t>(i),
                                          prefix.end()),
                     name);
  }
  return add_node(Head::kPathStep, prefix[i].concept_name, prefix[i].args.size(),
                  std::move(children), term);
}

NodeId ClosureState::intern(const TypePtr &t) {
  return std::visit(
      Overloaded{
          [&](const Type::Int &) { return add_node(Head::kInt, "", 0, {}, t); },
          [&](const Type::Bool &) { return add_node(Head::kBool, "", 0, {}, t); },
          [&](const Type::Error &) { return add_node(Head::kVar, "", kErrorLeaf, {}, t); },
          [&](const Type::List &l) { return add_node(Head::kList, "", 0, {intern(l.elem)}, t); },
          [&](const Type::Arrow &a) {
            NodeId d = intern(a.dom);
            NodeId c = intern(a.cod);
            return add_node(Head::kArrow, "", 0, {d, c}, t);
          },
          [&](const Type::Forall &f) {
            return add_node(Head::kForall, "", 0, {intern(f.body)}, t);
          },
          [&](const Type::Constrained &c) {
            std::vector<NodeId> kids;
            if (c.constraint.is_concept()) {
              const auto &m = c.constraint.model();
              for (const auto &a : m.args) kids.push_back(intern(a));
              kids.push_back(intern(c.body));
              return add_node(Head::kConstrainedConcept, m.concept_name, m.args.size(),
                              std::move(kids), t);
            }
            const auto &s = std::get<Constraint::Same>(c.constraint.node);
            kids.push_back(intern(s.lhs));
            kids.push_back(intern(s.rhs));
            kids.push_back(intern(c.body));
            return add_node(Head::kConstrainedSame, "", 0, std::move(kids), t);
          },
          [&](const Type::Var &v) { return add_node(Head::kVar, "", v.id, {}, t); },
          [&](const Type::Bound &b) { return add_node(Head::kBound, "", b.index, {}, t); },
          [&](const Type::Path &p) { return intern_model_path(p.prefix, 0, p.name, t); },
      },
      t->node);
}

void ClosureState::propagate() {
  while (!pending_.empty()) {
    auto [a, b] = pending_.back();
    pending_.pop_back();
    NodeId ra = find(a);
    NodeId rb = find(b);
    if (ra == rb) continue;
    if (rank_[ra] > rank_[rb]) std::swap(ra, rb);
    parent_[ra] = rb;
    if (rank_[ra] == rank_[rb]) ++rank_[rb];
    witness_.clear();
    auto moved = std::move(uses_[ra]);
    uses_[ra].clear();
    for (NodeId p : moved) {
      auto [it, inserted] = signatures_.emplace(signature(p), p);
      if (!inserted && find(it->second) != find(p)) pending_.emplace_back(p, it->second);
      uses_[rb].push_back(p);
    }
  }
}

void ClosureState::merge(NodeId a, NodeId b) {
  pending_.emplace_back(a, b);
  propagate();
}

void ClosureState::assume(const TypePtr &a, const TypePtr &b) {
  NodeId na = intern(a);
  NodeId nb = intern(b);
  merge(na, nb);
}

bool ClosureState::equal(const TypePtr &a, const TypePtr &b) {
  NodeId na = intern(a);
  NodeId nb = intern(b);
  return find(na) == find(nb);
}

std::size_t ClosureState::class_count() {
  std::size_t n = 0;
  for (NodeId i = 0; i < nodes_.size(); ++i) {
    if (find(i) == i) ++n;
  }
  return n;
}

void ClosureState::compute_witnesses(const VarLevelFn &levels) {
  witness_.assign(nodes_.size(), std::nullopt);
  auto child = [&](NodeId c) -> const std::optional<Witness> & { return witness_[find(c)]; };
  bool changed = true;
  while (changed) {
    changed = false;
    for (NodeId n = 0; n < nodes_.size(); ++n) {
      const Node &node = nodes_[n];
      std::optional<Witness> cand;
      switch (node.head) {
        case Head::kInt:
          cand = Witness{node.term, {false, 0, 0, 1, "i"}};
          break;
        case Head::kBool:
          cand = Witness{node.term, {false, 0, 0, 1, "b"}};
          break;
        case Head::kVar: {
          if (node.num == kErrorLeaf) break;
          auto id = static_cast<TypeVarId>(node.num);
          if (levels && !levels(id)) break;
          cand = Witness{node.term, {true, 1, 0, 1, var_repr(id, levels)}};
          break;
        }
        case Head::kList: {
          const auto &e = child(node.children[0]);
          if (!e) break;
          const auto &[vh, vc, h, s, r] = e->rank;
          cand = Witness{list_type(e->term), {false, vc, h + 1, s + 1, "L(" + r + ",)"}};
          break;
        }
        case Head::kArrow: {
          const auto &d = child(node.children[0]);
          const auto &c = child(node.children[1]);
          if (!d || !c) break;
          const auto &[dvh, dvc, dh, ds, dr] = d->rank;
          const auto &[cvh, cvc, ch, cs, cr] = c->rank;
          cand = Witness{arrow_type(d->term, c->term),
                         {false, dvc + cvc, std::max(dh, ch) + 1, ds + cs + 1,
                          "A(" + dr + "," + cr + ",)"}};
          break;
        }
        case Head::kForall:
        case Head::kConstrainedConcept:
        case Head::kConstrainedSame: {
          auto r = raw_rank(node.term, levels);
          cand = Witness{node.term, {false, r.vars, r.height, r.size, std::move(r.repr)}};
          break;
        }
        case Head::kBound:
        case Head::kPathStep:
        case Head::kAssocName:
          break;
      }
      if (!cand) continue;
      auto &slot = witness_[find(n)];
      if (!slot || cand->rank < slot->rank) {
        slot = std::move(cand);
        changed = true;
      }
    }
  }
}

std::optional<TypePtr> ClosureState::canonical(const TypePtr &t, const VarLevelFn &levels) {
  NodeId n = intern(t);
  compute_witnesses(levels);
  const auto &w = witness_[find(n)];
  if (!w) return std::nullopt;
  return w->term;
}

namespace {
bool head_matches(const Type &t, Head head) {
  switch (head) {
    case Head::kInt:
      return t.is<Type::Int>();
    case Head::kBool:
      return t.is<Type::Bool>();
    case Head::kList:
      return t.is<Type::List>();
    case Head::kArrow:
      return t.is<Type::Arrow>();
    case Head::kForall:
      return t.is<Type::Forall>();
    case Head::kConstrainedConcept: {
      auto c = t.as<Type::Constrained>();
      return c && c->constraint.is_concept();
    }
    case Head::kConstrainedSame: {
      auto c = t.as<Type::Constrained>();
      return c && !c->constraint.is_concept();
    }
    case Head::kVar:
      return t.is<Type::Var>();
    case Head::kBound:
      return t.is<Type::Bound>();
    case Head::kPathStep:
      return t.is<Type::Path>();
    case Head::kAssocName:
      return false;
  }
  return false;
}
}  // namespace

std::optional<TypePtr> ClosureState::member_with_head(const TypePtr &t, Head head,
                                                      const VarLevelFn &levels) {
  if (auto c = canonical(t, levels); c && head_matches(**c, head)) return c;
  NodeId root = find(intern(t));
  std::optional<TypePtr> best;
  std::optional<std::tuple<int, int, int, std::string>> best_rank;
  for (NodeId n = 0; n < nodes_.size(); ++n) {
    if (nodes_[n].head != head || find(n) != root || !nodes_[n].term) continue;
    auto r = raw_rank(nodes_[n].term, levels);
    std::tuple<int, int, int, std::string> key{r.vars, r.height, r.size, r.repr};
    if (!best_rank || key < *best_rank) {
      best_rank = std::move(key);
      best = nodes_[n].term;
    }
  }
  return best;
}

ClosureState build_closure(const Env &env) {
  ClosureState state;
  auto entries = env.entries();
  for (auto it = entries.rbegin(); it != entries.rend(); ++it) {
    if (auto eq = std::get_if<TypeEqEntry>(&*it)) {
      state.assume(eq->lhs, eq->rhs);
    } else if (auto ce = std::get_if<ConstraintEntry>(&*it); ce && !ce->constraint.is_concept()) {
      const auto &s = std::get<Constraint::Same>(ce->constraint.node);
      state.assume(s.lhs, s.rhs);
    }
  }
  return state;
}

bool types_equal(ClosureState &state, const TypePtr &a, const TypePtr &b) {
  if (contains_error(a) || contains_error(b)) return true;
  return state.equal(a, b);
}

std::optional<TypePtr> canonical(ClosureState &state, const TypePtr &t,
                                 const VarLevelFn &levels) {
  return state.canonical(t, levels);
}

}  // namespace fg::typeq
