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

#include "generators.h"

#include <fmt/format.h>

#include <optional>

#include "fg/parser.h"

namespace fg::testing {

namespace {

int pick(Rng &rng, int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng); }

TypePtr subterm(Rng &rng, const TypePtr &t) {
  if (pick(rng, 3) == 0) return t;
  if (auto l = t->as<Type::List>()) return subterm(rng, l->elem);
  if (auto a = t->as<Type::Arrow>()) return subterm(rng, pick(rng, 2) ? a->dom : a->cod);
  if (auto p = t->as<Type::Path>()) {
    const auto &args = p->prefix.back().args;
    return subterm(rng, args[static_cast<std::size_t>(pick(rng, static_cast<int>(args.size())))]);
  }
  return t;
}

}  // namespace

TypePtr random_type(Rng &rng, int depth, const std::vector<TypePtr> &atoms) {
  if (depth <= 1 || pick(rng, 3) == 0) {
    return atoms[static_cast<std::size_t>(pick(rng, static_cast<int>(atoms.size())))];
  }
  switch (pick(rng, 5)) {
    case 0:
      return list_type(random_type(rng, depth - 1, atoms));
    case 1:
      return arrow_type(random_type(rng, depth - 1, atoms), random_type(rng, depth - 1, atoms));
    case 2:
      return path_type({ModelId{"Seq", {random_type(rng, depth - 1, atoms)}}}, "E");
    case 3:
      return path_type(
          {ModelId{"Pair", {random_type(rng, depth - 1, atoms), random_type(rng, depth - 1, atoms)}}},
          "First");
    default:
      return forall_type("a", arrow_type(bound_type(0), random_type(rng, depth - 1, atoms)));
  }
}

ClosureInstance random_closure_instance(Rng &rng) {
  static const TypeVarId base = fresh_type_var_id();
  std::vector<TypePtr> atoms = {int_type(), bool_type()};
  for (TypeVarId i = 0; i < 4; ++i) {
    atoms.push_back(var_type(base + i, std::string(1, static_cast<char>('p' + i))));
  }
  ClosureInstance inst;
  int n = pick(rng, 11);
  for (int i = 0; i < n; ++i) {
    inst.equations.emplace_back(random_type(rng, 1 + pick(rng, 4), atoms),
                                random_type(rng, 1 + pick(rng, 4), atoms));
  }
  // Half of the queries wrap two subterms of the equations in a common
  // context, which makes congruence steps likely to matter.
  if (n > 0 && pick(rng, 2) == 0) {
    const auto &e1 = inst.equations[static_cast<std::size_t>(pick(rng, n))];
    const auto &e2 = inst.equations[static_cast<std::size_t>(pick(rng, n))];
    auto x = subterm(rng, pick(rng, 2) ? e1.first : e1.second);
    auto y = subterm(rng, pick(rng, 2) ? e2.first : e2.second);
    switch (pick(rng, 4)) {
      case 0:
        inst.lhs = list_type(x), inst.rhs = list_type(y);
        break;
      case 1:
        inst.lhs = arrow_type(x, int_type()), inst.rhs = arrow_type(y, int_type());
        break;
      case 2:
        inst.lhs = path_type({ModelId{"Seq", {x}}}, "E");
        inst.rhs = path_type({ModelId{"Seq", {y}}}, "E");
        break;
      default:
        inst.lhs = x, inst.rhs = y;
        break;
    }
  } else {
    inst.lhs = random_type(rng, 1 + pick(rng, 4), atoms);
    inst.rhs = random_type(rng, 1 + pick(rng, 4), atoms);
  }
  return inst;
}

namespace {

enum class Ty { kInt, kBool, kList, kFun };

struct Binding {
  std::string name;
  Ty type;
};

class ProgramGen {
 public:
  explicit ProgramGen(Rng &rng) : rng_(rng) {}

  std::string gen(Ty t, int size) {
    if (size <= 0) return leaf(t);
    switch (t) {
      case Ty::kInt:
        return gen_int(size);
      case Ty::kBool:
        return gen_bool(size);
      case Ty::kList:
        return gen_list(size);
      case Ty::kFun:
        return gen_fun(size);
    }
    return leaf(t);
  }

  static std::string type_text(Ty t) {
    switch (t) {
      case Ty::kInt:
        return "int";
      case Ty::kBool:
        return "bool";
      case Ty::kList:
        return "list int";
      case Ty::kFun:
        return "int -> int";
    }
    return "int";
  }

 private:
  std::string paren(std::string s) { return "(" + s + ")"; }

  Ty any_type() { return static_cast<Ty>(pick(rng_, 4)); }

  std::string fresh() { return fmt::format("v{}", counter_++); }

  std::optional<std::string> var_of(Ty t) {
    std::vector<std::string> names;
    for (const auto &b : env_) {
      if (b.type == t) names.push_back(b.name);
    }
    if (names.empty()) return std::nullopt;
    return names[static_cast<std::size_t>(pick(rng_, static_cast<int>(names.size())))];
  }

  std::string leaf(Ty t) {
    if (pick(rng_, 2) == 0) {
      if (auto v = var_of(t)) return *v;
    }
    switch (t) {
      case Ty::kInt:
        return std::to_string(pick(rng_, 10));
      case Ty::kBool:
        return pick(rng_, 2) ? "true" : "false";
      case Ty::kList:
        return pick(rng_, 3) == 0 ? "nil[int]" : fmt::format("[{}]", pick(rng_, 10));
      case Ty::kFun:
        return pick(rng_, 2) ? "(idf [int])" : "(lam z : int. z + 1)";
    }
    return "0";
  }

  std::string with_binding(const std::string &name, Ty t, int size, Ty body) {
    env_.push_back({name, t});
    auto s = gen(body, size);
    env_.pop_back();
    return s;
  }

  std::string let_form(Ty t, int size) {
    auto x = fresh();
    Ty bt = any_type();
    auto bound = gen(bt, size / 2);
    return fmt::format("let {} = {} in {}", x, bound, with_binding(x, bt, size - 1, t));
  }

  std::string beta_form(Ty t, int size) {
    auto x = fresh();
    Ty bt = any_type();
    auto body = with_binding(x, bt, size - 1, t);
    return fmt::format("(lam {} : {}. {}) {}", x, type_text(bt), body, paren(gen(bt, size / 2)));
  }

  std::string if_form(Ty t, int size) {
    return fmt::format("if {} then {} else {}", gen(Ty::kBool, size / 2), gen(t, size - 1),
                       gen(t, size - 1));
  }

  std::string gen_int(int size) {
    int s = size - 1;
    switch (pick(rng_, 14)) {
      case 0:
        return fmt::format("{} + {}", paren(gen(Ty::kInt, s)), paren(gen(Ty::kInt, s)));
      case 1:
        return fmt::format("{} - {}", paren(gen(Ty::kInt, s)), paren(gen(Ty::kInt, s)));
      case 2:
        return fmt::format("{} * {}", paren(gen(Ty::kInt, s)), paren(gen(Ty::kInt, s)));
      case 3:
        return if_form(Ty::kInt, size);
      case 4:
        return let_form(Ty::kInt, size);
      case 5:
        return beta_form(Ty::kInt, size);
      case 6:
        return fmt::format("{} {}", paren(gen(Ty::kFun, s)), paren(gen(Ty::kInt, s)));
      case 7:
        return fmt::format("twice [int] {}", paren(gen(Ty::kInt, s)));
      case 8:
        return fmt::format("Num<int>.plus {} {}", paren(gen(Ty::kInt, s)), paren(gen(Ty::kInt, s)));
      case 9:
        return fmt::format("unbox [bool] {}", paren(gen(Ty::kBool, s)));
      case 10:
        return fmt::format("head {}", paren(gen(Ty::kList, s)));
      case 11:
        return fmt::format("sum {}", paren(gen(Ty::kList, s)));
      case 12:
        return fmt::format("countdown {}", paren(gen(Ty::kInt, s)));
      default:
        return fmt::format("idf [int] {}", paren(gen(Ty::kInt, s)));
    }
  }

  std::string gen_bool(int size) {
    int s = size - 1;
    switch (pick(rng_, 7)) {
      case 0:
        return fmt::format("{} < {}", paren(gen(Ty::kInt, s)), paren(gen(Ty::kInt, s)));
      case 1:
        return fmt::format("{} == {}", paren(gen(Ty::kInt, s)), paren(gen(Ty::kInt, s)));
      case 2:
        return fmt::format("isnil {}", paren(gen(Ty::kList, s)));
      case 3:
        return if_form(Ty::kBool, size);
      case 4:
        return let_form(Ty::kBool, size);
      case 5:
        return beta_form(Ty::kBool, size);
      default:
        return fmt::format("idf [bool] {}", paren(gen(Ty::kBool, s)));
    }
  }

  std::string gen_list(int size) {
    int s = size - 1;
    switch (pick(rng_, 6)) {
      case 0: {
        int n = 1 + pick(rng_, 3);
        std::string out = "[";
        for (int i = 0; i < n; ++i) out += (i ? ", " : "") + gen(Ty::kInt, s / 2);
        return out + "]";
      }
      case 1:
        return fmt::format("cons {} {}", paren(gen(Ty::kInt, s)), paren(gen(Ty::kList, s)));
      case 2:
        return fmt::format("tail {}", paren(gen(Ty::kList, s)));
      case 3:
        return if_form(Ty::kList, size);
      case 4:
        return let_form(Ty::kList, size);
      default:
        return beta_form(Ty::kList, size);
    }
  }

  std::string gen_fun(int size) {
    int s = size - 1;
    switch (pick(rng_, 4)) {
      case 0: {
        auto x = fresh();
        return fmt::format("lam {} : int. {}", x, with_binding(x, Ty::kInt, s, Ty::kInt));
      }
      case 1:
        return fmt::format("Num<int>.plus {}", paren(gen(Ty::kInt, s)));
      case 2:
        return if_form(Ty::kFun, size);
      default:
        return "twice [int]";
    }
  }

  Rng &rng_;
  std::vector<Binding> env_;
  int counter_ = 0;
};

constexpr const char *kPrelude = R"(concept Num<t> { ; ; plus : t -> t -> t, zero : t } in
model Num<int> { ; plus = lam a : int. lam b : int. a + b, zero = 0 } in
concept Box<b> { V ; ; get : b -> V } in
model Box<bool> { V = int ; get = lam x. if x then 1 else 0 } in
let idf = Lam a. lam x : a. x in
let twice = Lam t. Num<t> => lam x : t. Num<t>.plus x x in
let unbox = Lam b. Box<b> => lam x : b. Box<b>.get x in
let sum = fix (lam f : list int -> int. lam l : list int.
  if isnil l then Num<int>.zero else head l + f (tail l)) in
let countdown = fix (lam f : int -> int. lam n : int. if n < 1 then 0 else f (n - 1)) in
)";

}  // namespace

std::string random_program(Rng &rng, int size) {
  ProgramGen g(rng);
  return kPrelude + g.gen(Ty::kInt, size) + "\n";
}

}  // namespace fg::testing
