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

#include "naive_closure.h"

#include <map>
#include <numeric>
#include <string>

namespace fg::testing {

namespace {

struct Term {
  std::string label;
  std::vector<int> children;
};

class Universe {
 public:
  int add(const TypePtr &t) {
    Term term;
    auto kids = [&](std::initializer_list<TypePtr> ts) {
      for (const auto &c : ts) term.children.push_back(add(c));
    };
    if (t->is<Type::Int>()) {
      term.label = "int";
    } else if (t->is<Type::Bool>()) {
      term.label = "bool";
    } else if (t->is<Type::Error>()) {
      term.label = "error";
    } else if (auto v = t->as<Type::Var>()) {
      term.label = "var" + std::to_string(v->id);
    } else if (auto b = t->as<Type::Bound>()) {
      term.label = "bound" + std::to_string(b->index);
    } else if (auto l = t->as<Type::List>()) {
      term.label = "list";
      kids({l->elem});
    } else if (auto a = t->as<Type::Arrow>()) {
      term.label = "arrow";
      kids({a->dom, a->cod});
    } else if (auto f = t->as<Type::Forall>()) {
      term.label = "forall";
      kids({f->body});
    } else if (auto c = t->as<Type::Constrained>()) {
      if (c->constraint.is_concept()) {
        const auto &m = c->constraint.model();
        term.label = "where " + m.concept_name;
        for (const auto &arg : m.args) term.children.push_back(add(arg));
      } else {
        const auto &s = std::get<Constraint::Same>(c->constraint.node);
        term.label = "where ==";
        kids({s.lhs, s.rhs});
      }
      term.children.push_back(add(c->body));
    } else if (auto p = t->as<Type::Path>()) {
      // The path m1...mk.name is built from its last model inward.
      term.label = "path";
      for (const auto &m : p->prefix) {
        term.label += "." + m.concept_name + "/" + std::to_string(m.args.size());
        for (const auto &arg : m.args) term.children.push_back(add(arg));
      }
      term.label += "." + p->name;
    }
    std::string key = term.label + "(";
    for (int c : term.children) key += std::to_string(c) + ",";
    key += ")";
    auto [it, fresh] = index_.emplace(key, static_cast<int>(terms_.size()));
    if (fresh) terms_.push_back(std::move(term));
    return it->second;
  }

  const std::vector<Term> &terms() const { return terms_; }

 private:
  std::vector<Term> terms_;
  std::map<std::string, int> index_;
};

}  // namespace

bool naive_equal(const std::vector<Equation> &eqs, const TypePtr &a, const TypePtr &b) {
  Universe u;
  std::vector<std::pair<int, int>> joined;
  for (const auto &[l, r] : eqs) joined.emplace_back(u.add(l), u.add(r));
  int qa = u.add(a);
  int qb = u.add(b);
  const auto &terms = u.terms();
  std::vector<int> cls(terms.size());
  std::iota(cls.begin(), cls.end(), 0);
  auto merge = [&](int x, int y) {
    int from = cls[x], to = cls[y];
    if (from == to) return false;
    for (auto &c : cls) {
      if (c == from) c = to;
    }
    return true;
  };
  for (auto [l, r] : joined) merge(l, r);
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t i = 0; i < terms.size(); ++i) {
      for (std::size_t j = i + 1; j < terms.size(); ++j) {
        if (cls[i] == cls[j] || terms[i].label != terms[j].label ||
            terms[i].children.size() != terms[j].children.size()) {
          continue;
        }
        bool same = true;
        for (std::size_t k = 0; k < terms[i].children.size() && same; ++k) {
          same = cls[terms[i].children[k]] == cls[terms[j].children[k]];
        }
        if (same) changed |= merge(static_cast<int>(i), static_cast<int>(j));
      }
    }
  }
  return cls[qa] == cls[qb];
}

}  // namespace fg::testing
