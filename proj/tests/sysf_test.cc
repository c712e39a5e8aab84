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

#include <gtest/gtest.h>

#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "corpus.h"
#include "fg/elaborate.h"
#include "fg/parser.h"
#include "fg/sysf.h"
#include "generators.h"

namespace fg::sf {
namespace {

CTermPtr core(const std::string &src) {
  auto r = parse_core(src);
  EXPECT_TRUE(r.error.empty()) << src << ": " << r.error;
  return r.term;
}

CTypePtr type_of(const CTermPtr &t) {
  auto r = sf_typecheck(t);
  if (const auto *e = std::get_if<CoreError>(&r)) {
    ADD_FAILURE() << to_string(t) << ": " << e->message;
    return nullptr;
  }
  return std::get<CTypePtr>(r);
}

TEST(CoreTypecheck, Examples) {
  EXPECT_TRUE(type_equal(type_of(core("(Lam a. lam x: a. x) [int] 5")), c_int()));
  EXPECT_TRUE(type_equal(type_of(core("<1, true>.0")), c_int()));
  EXPECT_TRUE(type_equal(type_of(core("<1, true>.1")), c_bool()));
  EXPECT_TRUE(type_equal(type_of(core("Lam a. lam x: a. x")),
                         c_forall("a", c_arrow(c_tvar(0), c_tvar(0)))));
  EXPECT_TRUE(type_equal(type_of(core("cons 1 nil[int]")), c_list(c_int())));
}

TEST(CoreTypecheck, RejectsIllTypedTerm) {
  auto r = sf_typecheck(core("Lam a. lam x: a -> a. x 1"));
  ASSERT_TRUE(std::holds_alternative<CoreError>(r));
  EXPECT_NE(std::get<CoreError>(r).message.find("parameter type is a but the argument type is int"),
            std::string::npos)
      << std::get<CoreError>(r).message;
}

TEST(CoreTypecheck, OtherRejections) {
  for (const char *src : {"<1, true>.2", "1 2", "if 1 then 2 else 3", "fix (lam x: int. true)",
                          "cons true nil[int]", "3 [int]", "1 + true"}) {
    EXPECT_TRUE(std::holds_alternative<CoreError>(sf_typecheck(core(src)))) << src;
  }
}

TEST(CoreStep, Examples) {
  auto beta = sf_step(core("(lam x: int. x) 5"));
  ASSERT_EQ(beta.kind, StepResult::Kind::kStepped);
  EXPECT_TRUE(term_equal(beta.term, core("5")));

  auto inst = sf_step(core("(Lam a. lam x: a. x) [int]"));
  ASSERT_EQ(inst.kind, StepResult::Kind::kStepped);
  EXPECT_TRUE(term_equal(inst.term, core("lam x: int. x")));

  auto hd = sf_step(core("head (cons 2 nil[int])"));
  ASSERT_EQ(hd.kind, StepResult::Kind::kStepped);
  EXPECT_TRUE(term_equal(hd.term, core("2")));

  EXPECT_EQ(sf_step(core("7")).kind, StepResult::Kind::kNormal);
  EXPECT_EQ(sf_step(core("1 2")).kind, StepResult::Kind::kStuck);
}

TEST(CoreStep, FunctionBeforeArgument) {
  auto r = sf_step(core("((lam x: int. lam y: int. x) 1) (2 + 3)"));
  ASSERT_EQ(r.kind, StepResult::Kind::kStepped);
  EXPECT_TRUE(term_equal(r.term, core("(lam y: int. 1) (2 + 3)")));
}

TEST(CoreEval, Examples) {
  auto v = sf_eval(core("(lam x: int. x * 2) (1 + 2)"));
  ASSERT_EQ(v.kind, EvalOutcome::Kind::kValue);
  EXPECT_TRUE(term_equal(v.value, core("6")));

  auto loop = sf_eval(core("(fix (lam f: int -> int. lam x: int. f x)) 0"), 5000);
  EXPECT_EQ(loop.kind, EvalOutcome::Kind::kDiverged);
  EXPECT_EQ(loop.steps, 5000);

  auto nil_head = sf_eval(core("head nil[int]"), 100);
  EXPECT_EQ(nil_head.kind, EvalOutcome::Kind::kDiverged);
}

TEST(CoreEval, SourceDriver) {
  for (const auto &[name, want] : std::vector<std::pair<std::string, std::string>>{
           {"foldl", "9"}, {"sum", "10"}, {"product", "24"}}) {
    auto prog = testing::corpus_program(name);
    ASSERT_TRUE(prog.has_value()) << name;
    auto out = eval(parse_program(prog->source).program);
    ASSERT_EQ(out.kind, EvalOutcome::Kind::kValue) << name << ": " << out.description;
    EXPECT_EQ(to_string(out.value), want) << name;
  }
  auto five = eval(parse_program("2 + 3").program);
  ASSERT_EQ(five.kind, EvalOutcome::Kind::kValue);
  EXPECT_EQ(to_string(five.value), "5");
}

TEST(CoreText, RoundTripsCorpus) {
  for (const auto &p : testing::load_corpus()) {
    if (!p.well_typed()) continue;
    auto el = elaborate_program(parse_program(p.source).program);
    ASSERT_TRUE(el.ok()) << p.name;
    auto text = to_string(el.core);
    auto back = parse_core(text);
    ASSERT_TRUE(back.error.empty()) << p.name << ": " << back.error;
    EXPECT_TRUE(term_equal(back.term, el.core)) << p.name;
    EXPECT_EQ(to_string(back.term), text) << p.name;
  }
}

TEST(CoreText, TypesPrint) {
  EXPECT_EQ(to_string(c_forall("a", c_arrow(c_tvar(0), c_tuple({c_int(), c_list(c_bool())})))),
            "forall a. a -> {int, list bool}");
}

// Type safety over the corpus: no checked program gets stuck at any fuel.
TEST(CoreEval, CorpusNeverStuck) {
  for (const auto &p : testing::load_corpus()) {
    if (!p.well_typed()) continue;
    auto program = parse_program(p.source).program;
    for (std::int64_t fuel : {1, 10, 100, 100000}) {
      auto out = eval(program, fuel);
      EXPECT_NE(out.kind, EvalOutcome::Kind::kStuck) << p.name << ": " << out.description;
    }
  }
}

// Independent stepping relation over a small fragment (int, bool, lambda,
// application, if, addition, pairs, projection). Each rule contributes the
// successors it licenses; determinism means at most one rule fires.

bool oracle_value(const CTermPtr &t) {
  if (t->as<CTerm::IntLit>() || t->as<CTerm::BoolLit>() || t->as<CTerm::Lam>()) return true;
  if (const auto *p = t->as<CTerm::Tuple>()) {
    for (const auto &e : p->elems) {
      if (!oracle_value(e)) return false;
    }
    return true;
  }
  return false;
}

// Replaces index `depth` by `v` (closed), lowering indices above it.
CTermPtr oracle_subst(const CTermPtr &t, int depth, const CTermPtr &v) {
  auto go = [&](const CTermPtr &x) { return oracle_subst(x, depth, v); };
  if (const auto *x = t->as<CTerm::Var>()) {
    if (x->index == depth) return v;
    if (x->index > depth) return make_term(CTerm::Var{x->index - 1, x->hint});
    return t;
  }
  if (const auto *x = t->as<CTerm::Lam>()) {
    return make_term(CTerm::Lam{x->hint, x->ann, oracle_subst(x->body, depth + 1, v)});
  }
  if (const auto *x = t->as<CTerm::App>()) return make_term(CTerm::App{go(x->fn), go(x->arg)});
  if (const auto *x = t->as<CTerm::If>()) {
    return make_term(CTerm::If{go(x->cond), go(x->then_branch), go(x->else_branch)});
  }
  if (const auto *x = t->as<CTerm::Prim>()) {
    return make_term(CTerm::Prim{x->op, {go(x->args[0]), go(x->args[1])}});
  }
  if (const auto *x = t->as<CTerm::Tuple>()) {
    return make_term(CTerm::Tuple{{go(x->elems[0]), go(x->elems[1])}});
  }
  if (const auto *x = t->as<CTerm::Proj>()) return make_term(CTerm::Proj{go(x->subject), x->index});
  return t;
}

std::vector<CTermPtr> oracle_successors(const CTermPtr &t) {
  std::vector<CTermPtr> out;
  auto lift = [&](const CTermPtr &sub, const std::function<CTermPtr(CTermPtr)> &k) {
    for (const auto &s : oracle_successors(sub)) out.push_back(k(s));
  };
  if (const auto *x = t->as<CTerm::App>()) {
    lift(x->fn, [&](CTermPtr f) { return make_term(CTerm::App{f, x->arg}); });
    if (oracle_value(x->fn)) {
      lift(x->arg, [&](CTermPtr a) { return make_term(CTerm::App{x->fn, a}); });
      const auto *lam = x->fn->as<CTerm::Lam>();
      if (lam && oracle_value(x->arg)) out.push_back(oracle_subst(lam->body, 0, x->arg));
    }
  } else if (const auto *x = t->as<CTerm::If>()) {
    lift(x->cond, [&](CTermPtr c) {
      return make_term(CTerm::If{c, x->then_branch, x->else_branch});
    });
    if (const auto *b = x->cond->as<CTerm::BoolLit>()) {
      out.push_back(b->value ? x->then_branch : x->else_branch);
    }
  } else if (const auto *x = t->as<CTerm::Prim>()) {
    const auto &a = x->args[0];
    const auto &b = x->args[1];
    lift(a, [&](CTermPtr n) { return make_term(CTerm::Prim{x->op, {n, b}}); });
    if (oracle_value(a)) {
      lift(b, [&](CTermPtr n) { return make_term(CTerm::Prim{x->op, {a, n}}); });
    }
    const auto *ia = a->as<CTerm::IntLit>();
    const auto *ib = b->as<CTerm::IntLit>();
    if (ia && ib) out.push_back(make_term(CTerm::IntLit{ia->value + ib->value}));
  } else if (const auto *x = t->as<CTerm::Tuple>()) {
    const auto &a = x->elems[0];
    const auto &b = x->elems[1];
    lift(a, [&](CTermPtr n) { return make_term(CTerm::Tuple{{n, b}}); });
    if (oracle_value(a)) {
      lift(b, [&](CTermPtr n) { return make_term(CTerm::Tuple{{a, n}}); });
    }
  } else if (const auto *x = t->as<CTerm::Proj>()) {
    lift(x->subject, [&](CTermPtr s) { return make_term(CTerm::Proj{s, x->index}); });
    const auto *tup = x->subject->as<CTerm::Tuple>();
    if (tup && oracle_value(x->subject)) out.push_back(tup->elems[static_cast<std::size_t>(x->index)]);
  }
  return out;
}

// All terms of exactly `size` nodes with free indices below `depth`.
std::vector<CTermPtr> enumerate(int size, int depth) {
  std::vector<CTermPtr> out;
  if (size == 1) {
    out.push_back(make_term(CTerm::IntLit{1}));
    out.push_back(make_term(CTerm::BoolLit{true}));
    out.push_back(make_term(CTerm::BoolLit{false}));
    for (int i = 0; i < depth; ++i) out.push_back(make_term(CTerm::Var{i, "x"}));
    return out;
  }
  for (const auto &b : enumerate(size - 1, depth + 1)) {
    out.push_back(make_term(CTerm::Lam{"x", c_int(), b}));
  }
  for (const auto &s : enumerate(size - 1, depth)) {
    out.push_back(make_term(CTerm::Proj{s, 0}));
  }
  for (int l = 1; l < size - 1; ++l) {
    auto ls = enumerate(l, depth);
    auto rs = enumerate(size - 1 - l, depth);
    for (const auto &a : ls) {
      for (const auto &b : rs) {
        out.push_back(make_term(CTerm::App{a, b}));
        out.push_back(make_term(CTerm::Prim{PrimOp::kAdd, {a, b}}));
        out.push_back(make_term(CTerm::Tuple{{a, b}}));
      }
    }
  }
  for (int c = 1; c < size - 2; ++c) {
    for (int th = 1; c + th < size - 1; ++th) {
      int el = size - 1 - c - th;
      for (const auto &x : enumerate(c, depth)) {
        for (const auto &y : enumerate(th, depth)) {
          for (const auto &z : enumerate(el, depth)) {
            out.push_back(make_term(CTerm::If{x, y, z}));
          }
        }
      }
    }
  }
  return out;
}

TEST(CoreStep, DeterministicOnAllSmallTerms) {
  std::size_t checked = 0;
  for (int size = 1; size <= 7; ++size) {
    for (const auto &t : enumerate(size, 0)) {
      auto succ = oracle_successors(t);
      ASSERT_LE(succ.size(), 1u) << to_string(t);
      auto r = sf_step(t);
      if (succ.empty()) {
        EXPECT_EQ(r.kind, oracle_value(t) ? StepResult::Kind::kNormal : StepResult::Kind::kStuck)
            << to_string(t);
      } else {
        ASSERT_EQ(r.kind, StepResult::Kind::kStepped) << to_string(t);
        EXPECT_TRUE(term_equal(r.term, succ.front())) << to_string(t);
      }
      ++checked;
    }
  }
  EXPECT_GT(checked, 100000u);
}

TEST(CoreStep, SubjectReductionOnGeneratedPrograms) {
  testing::Rng rng(90125);
  int programs = 0;
  for (int i = 0; i < 60; ++i) {
    auto parsed = parse_program(testing::random_program(rng));
    ASSERT_TRUE(parsed.ok());
    auto el = elaborate_program(parsed.program);
    ASSERT_TRUE(el.ok()) << el.error;
    CTermPtr t = el.core;
    const CTypePtr ty = type_of(t);
    ASSERT_TRUE(ty);
    for (int step = 0; step < 50; ++step) {
      auto r = sf_step(t);
      ASSERT_NE(r.kind, StepResult::Kind::kStuck) << r.description;
      if (r.kind == StepResult::Kind::kNormal) break;
      t = r.term;
      auto now = type_of(t);
      ASSERT_TRUE(now && type_equal(now, ty)) << "program " << i << " step " << step;
    }
    ++programs;
  }
  EXPECT_EQ(programs, 60);
}

}  // namespace
}  // namespace fg::sf
