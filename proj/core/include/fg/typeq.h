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
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "fg/ast.h"

namespace fg {
class Env;
}

namespace fg::typeq {

using NodeId = std::uint32_t;

/// Head constructor of an interned node. A path c<τ̄>.Π is a kPathStep node
/// whose children are τ̄ followed by the node for Π; the final associated
/// type name is a kAssocName leaf.
enum class Head : std::uint8_t {
  kInt,
  kBool,
  kList,
  kArrow,
  kForall,
  kConstrainedConcept,
  kConstrainedSame,
  kVar,
  kBound,
  kPathStep,
  kAssocName,
};

/// Level of a type variable in the elaborated program, or nullopt when the
/// variable has no core counterpart. Only variables with a level may appear
/// in canonical representatives.
using VarLevelFn = std::function<std::optional<int>(TypeVarId)>;

/**
 * Congruence closure over type terms.
 *
 * Terms are hash-consed into nodes; a union-find over node ids records the
 * equivalence, and a signature table keyed by (head, label, child
 * representatives) detects congruent nodes. Merging follows the classic
 * scheme: the losing class's parents are re-signed and any collision is
 * queued for merging, so the state is saturated after every public call.
 */
class ClosureState {
 public:
  NodeId intern(const TypePtr &t);
  /// Adds the assumption a = b and re-saturates.
  void assume(const TypePtr &a, const TypePtr &b);
  NodeId find(NodeId n);

  bool equal(const TypePtr &a, const TypePtr &b);

  /// Chosen representative of t's class, built only from path-free nodes and
  /// variables that have a level. Preference: constructor-headed terms over
  /// variables, then fewer variables, lower height, smaller size, and a
  /// stable structural order (variables compared by level). `Forall` and
  /// constrained nodes are returned verbatim.
  std::optional<TypePtr> canonical(const TypePtr &t, const VarLevelFn &levels);

  /// A member of t's class with the given head, preferring the canonical
  /// representative.
  std::optional<TypePtr> member_with_head(const TypePtr &t, Head head,
                                          const VarLevelFn &levels);

  std::size_t node_count() const { return nodes_.size(); }
  std::size_t class_count();

 private:
  struct Node {
    Head head;
    std::string label;
    std::uint64_t num = 0;
    std::vector<NodeId> children;
    TypePtr term;  // null for kAssocName
  };
  using Key = std::tuple<Head, std::string, std::uint64_t, std::vector<NodeId>>;

  NodeId add_node(Head head, std::string label, std::uint64_t num,
                  std::vector<NodeId> children, TypePtr term);
  NodeId intern_model_path(const std::vector<ModelId> &prefix, std::size_t i,
                           const std::string &name, const TypePtr &whole);
  Key signature(NodeId n);
  void merge(NodeId a, NodeId b);
  void propagate();
  void compute_witnesses(const VarLevelFn &levels);

  std::vector<Node> nodes_;
  std::vector<NodeId> parent_;
  std::vector<std::uint32_t> rank_;
  std::vector<std::vector<NodeId>> uses_;
  std::map<Key, NodeId> hashcons_;
  std::map<Key, NodeId> signatures_;
  std::vector<std::pair<NodeId, NodeId>> pending_;

  struct Witness {
    TypePtr term;
    std::tuple<bool, int, int, int, std::string> rank;
  };
  std::vector<std::optional<Witness>> witness_;  // indexed by representative
};

/// Closure of Γ's equations: TypeEq entries and same-type constraints.
ClosureState build_closure(const Env &env);

/// Γ ⊢ a = b given the closure of Γ.
bool types_equal(ClosureState &state, const TypePtr &a, const TypePtr &b);

/// Representative for `t`; every variable is treated as eligible unless
/// `levels` says otherwise.
std::optional<TypePtr> canonical(ClosureState &state, const TypePtr &t,
                                 const VarLevelFn &levels = {});

}  // namespace fg::typeq
