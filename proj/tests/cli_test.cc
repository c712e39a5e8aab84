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
#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <string>

#include "corpus.h"

namespace {

struct Run {
  int status = -1;
  std::string out;
  std::string err;
};

std::string slurp(const std::string &path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Run fgc(const std::string &args, const std::string &env = "") {
  const std::string err_path = ::testing::TempDir() + "fgc_stderr.txt";
  const std::string cmd = env + " " FGC_PATH " " + args + " 2>" + err_path;
  Run r;
  FILE *pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  std::array<char, 4096> buf{};
  std::size_t n = 0;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
  int raw = pclose(pipe);
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  r.err = slurp(err_path);
  return r;
}

std::string corpus_file(const std::string &name) {
  return fg::testing::corpus_dir() + "/" + name + ".fg";
}

std::string temp_file(const std::string &name, const std::string &content) {
  std::string path = ::testing::TempDir() + name;
  std::ofstream(path) << content;
  return path;
}

TEST(Check, FoldPrintsInt) {
  auto r = fgc("check " + corpus_file("foldl"));
  EXPECT_EQ(r.status, 0);
  EXPECT_EQ(r.out, "int\n");
}

TEST(Check, IllTypedTerm) {
  auto r = fgc("check " + corpus_file("ill_typed"));
  EXPECT_EQ(r.status, 1);
  EXPECT_NE(r.err.find("error[T001]"), std::string::npos) << r.err;
  EXPECT_NE(r.err.find("the parameter type is a but the argument type is int"),
            std::string::npos);
}

TEST(Check, EmptyFileIsAParseError) {
  auto r = fgc("check " + temp_file("empty.fg", ""));
  EXPECT_EQ(r.status, 2);
  EXPECT_NE(r.err.find("error[P002]"), std::string::npos) << r.err;
}

TEST(Check, MissingFileIsAnIoError) {
  auto r = fgc("check " + ::testing::TempDir() + "does_not_exist.fg");
  EXPECT_EQ(r.status, 3);
}

TEST(Check, UsageErrors) {
  EXPECT_EQ(fgc("").status, 3);
  EXPECT_EQ(fgc("frobnicate x.fg").status, 3);
  EXPECT_EQ(fgc("run --fuel 0 " + corpus_file("foldl")).status, 3);
  EXPECT_EQ(fgc("check --format xml " + corpus_file("foldl")).status, 3);
  EXPECT_EQ(fgc("--help").status, 0);
}

TEST(Check, AllDiagnosticsArePrinted) {
  auto r = fgc("check " + temp_file("two.fg", "let a = 5 3 in\nlet b = if 1 then 2 else 3 in a"));
  EXPECT_EQ(r.status, 1);
  EXPECT_NE(r.err.find("error[T002]"), std::string::npos) << r.err;
  EXPECT_NE(r.err.find("error[T010]"), std::string::npos) << r.err;
}

TEST(Run, CorpusValues) {
  for (const char *name : {"foldl", "sum", "product"}) {
    auto prog = fg::testing::corpus_program(name);
    ASSERT_TRUE(prog && prog->value);
    auto r = fgc("run " + prog->path);
    EXPECT_EQ(r.status, 0) << name << r.err;
    EXPECT_EQ(r.out, *prog->value + "\n") << name;
  }
}

TEST(Run, DivergenceExitsWithFour) {
  auto r = fgc("run --fuel 1000 " + corpus_file("loop"));
  EXPECT_EQ(r.status, 4);
  EXPECT_NE(r.err.find("fuel exhausted after 1000 steps"), std::string::npos) << r.err;
}

TEST(Run, TypeErrorsStopEvaluation) {
  auto r = fgc("run " + corpus_file("ill_typed"));
  EXPECT_EQ(r.status, 1);
  EXPECT_TRUE(r.out.empty());
}

TEST(Run, OutputIsByteStable) {
  for (const auto &p : fg::testing::load_corpus()) {
    if (!p.value) continue;
    auto a = fgc("run " + p.path);
    auto b = fgc("run " + p.path);
    EXPECT_EQ(a.status, 0) << p.name;
    EXPECT_EQ(a.out, b.out) << p.name;
    EXPECT_EQ(a.out, *p.value + "\n") << p.name;
  }
}

TEST(EmitCore, Identity) {
  auto r = fgc("emit-core " + corpus_file("identity"));
  EXPECT_EQ(r.status, 0);
  EXPECT_EQ(r.out, "(Lam a. lam x: a. x) [int] 42\n");
}

TEST(EmitCore, VerifyAddsCoreFooter) {
  auto r = fgc("emit-core --verify " + corpus_file("foldl"));
  EXPECT_EQ(r.status, 0) << r.err;
  ASSERT_GE(r.out.size(), 10u);
  EXPECT_EQ(r.out.substr(r.out.size() - 10), "core: int\n");
}

TEST(EmitCore, IllTypedProducesNoOutput) {
  auto r = fgc("emit-core " + corpus_file("ill_typed"));
  EXPECT_EQ(r.status, 1);
  EXPECT_TRUE(r.out.empty());
}

TEST(Ast, PrintsReparseableProgram) {
  auto first = fgc("ast " + corpus_file("foldl"));
  ASSERT_EQ(first.status, 0);
  auto again = fgc("ast " + temp_file("printed.fg", first.out));
  EXPECT_EQ(again.status, 0);
  EXPECT_EQ(first.out, again.out);
}

TEST(Json, DiagnosticsFollowTheSchema) {
  auto r = fgc("check --format json " + corpus_file("ill_typed"));
  EXPECT_EQ(r.status, 1);
  auto doc = nlohmann::json::parse(r.out);
  EXPECT_EQ(doc.at("schema"), 1);
  ASSERT_EQ(doc.at("diagnostics").size(), 1u);
  const auto &d = doc["diagnostics"][0];
  EXPECT_EQ(d.at("code"), "T001");
  EXPECT_TRUE(d.at("message").is_string());
  EXPECT_EQ(d.at("file"), corpus_file("ill_typed"));
  EXPECT_TRUE(d.at("notes").is_array());
  for (const char *k : {"start_line", "start_col", "end_line", "end_col"}) {
    EXPECT_TRUE(d.at("span").at(k).is_number_integer()) << k;
  }
  EXPECT_EQ(d["span"]["start_line"], 2);
}

TEST(Json, ParseErrorsToo) {
  auto r = fgc("check --format json " + temp_file("bad.fg", "1 $ 2"));
  EXPECT_EQ(r.status, 2);
  auto doc = nlohmann::json::parse(r.out);
  EXPECT_EQ(doc["diagnostics"][0]["code"], "P003");
}

TEST(Color, TagIsColoredOnRequest) {
  auto plain = fgc("check " + corpus_file("ill_typed"), "FGC_COLOR=0");
  auto colored = fgc("check " + corpus_file("ill_typed"), "FGC_COLOR=1");
  EXPECT_EQ(plain.err.find('\x1b'), std::string::npos);
  EXPECT_NE(colored.err.find('\x1b'), std::string::npos);
}

}  // namespace
