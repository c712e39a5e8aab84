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

// fgc: check, run, translate or dump a single program.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "fg/elaborate.h"
#include "fg/parser.h"
#include "fg/pretty.h"
#include "fg/sysf.h"
#include "fg/typecheck.h"

namespace {

enum Exit : int { kOk = 0, kTypeError = 1, kParseError = 2, kIoError = 3, kDiverged = 4 };

struct Config {
  std::string command;
  std::string path;
  std::int64_t fuel = fg::sf::kDefaultFuel;
  std::string format = "human";
  bool verify = false;
  bool color = false;
};

nlohmann::json span_json(const fg::SourceSpan &s) {
  return {{"start_line", s.start_line},
          {"start_col", s.start_col},
          {"end_line", s.end_line},
          {"end_col", s.end_col}};
}

nlohmann::json diagnostic_json(const fg::Diagnostic &d) {
  nlohmann::json notes = nlohmann::json::array();
  for (const auto &[span, text] : d.notes) {
    notes.push_back({{"span", span_json(span)}, {"message", text}});
  }
  return {{"code", d.code},
          {"message", d.message},
          {"file", d.span.file},
          {"span", span_json(d.span)},
          {"notes", notes}};
}

void print_diagnostics(const Config &cfg, const std::vector<fg::Diagnostic> &diags) {
  if (cfg.format == "json") {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto &d : diags) arr.push_back(diagnostic_json(d));
    std::cout << nlohmann::json{{"schema", 1}, {"diagnostics", arr}}.dump(2) << "\n";
    return;
  }
  for (const auto &d : diags) {
    auto text = fg::format_diagnostic(d);
    if (cfg.color) {
      auto tag = fmt::format("error[{}]", d.code);
      auto at = text.find(tag);
      if (at != std::string::npos) text.replace(at, tag.size(), "\x1b[1;31m" + tag + "\x1b[0m");
    }
    std::cerr << text << "\n";
  }
}

void print_result(const Config &cfg, const std::string &key, const std::string &value) {
  if (cfg.format == "json") {
    std::cout << nlohmann::json{{"schema", 1}, {key, value}, {"diagnostics", nlohmann::json::array()}}
                     .dump(2)
              << "\n";
  } else {
    std::cout << value << "\n";
  }
}

void print_failure(const Config &cfg, const std::string &message) {
  if (cfg.format == "json") {
    std::cout << nlohmann::json{{"schema", 1}, {"error", message}}.dump(2) << "\n";
  } else {
    std::cerr << "error: " << message << "\n";
  }
}

int run(const Config &cfg) {
  std::ifstream in(cfg.path, std::ios::binary);
  if (!in) {
    print_failure(cfg, "cannot read " + cfg.path);
    return kIoError;
  }
  std::stringstream buf;
  buf << in.rdbuf();
  auto parsed = fg::parse_program(buf.str(), cfg.path);
  if (!parsed.ok()) {
    print_diagnostics(cfg, parsed.diagnostics);
    return kParseError;
  }
  if (cfg.command == "ast") {
    print_result(cfg, "ast", fg::pretty(parsed.program));
    return kOk;
  }
  if (cfg.command == "check") {
    auto r = fg::check_program(parsed.program);
    if (!r.ok()) {
      print_diagnostics(cfg, r.diagnostics);
      return kTypeError;
    }
    print_result(cfg, "type", fg::to_string(r.type));
    return kOk;
  }

  auto e = fg::elaborate_program(parsed.program);
  if (!e.diagnostics.empty()) {
    print_diagnostics(cfg, e.diagnostics);
    return kTypeError;
  }
  if (!e.core) {
    print_failure(cfg, "translation failed: " + e.error);
    return kTypeError;
  }
  if (cfg.command == "emit-core") {
    std::string text = fg::sf::to_string(e.core);
    if (cfg.verify) {
      auto t = fg::sf::sf_typecheck(e.core);
      if (auto err = std::get_if<fg::sf::CoreError>(&t)) {
        print_failure(cfg, "core does not type check: " + err->message);
        return kTypeError;
      }
      text += "\ncore: " + fg::sf::to_string(std::get<fg::sf::CTypePtr>(t));
    }
    print_result(cfg, "core", text);
    return kOk;
  }

  auto out = fg::sf::sf_eval(e.core, cfg.fuel);
  switch (out.kind) {
    case fg::sf::EvalOutcome::Kind::kValue:
      print_result(cfg, "value", fg::sf::to_string(out.value));
      return kOk;
    case fg::sf::EvalOutcome::Kind::kDiverged:
      print_failure(cfg, fmt::format("fuel exhausted after {} steps", out.steps));
      return kDiverged;
    case fg::sf::EvalOutcome::Kind::kStuck:
      print_failure(cfg, "evaluation stuck: " + out.description);
      return kTypeError;
  }
  return kOk;
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"fgc: checker and evaluator for programs with concepts"};
  app.require_subcommand(1, 1);
  Config cfg;
  if (const char *c = std::getenv("FGC_COLOR")) cfg.color = std::string(c) == "1";

  const std::pair<const char *, const char *> commands[] = {
      {"check", "type check and print the program's type"},
      {"run", "evaluate and print the result"},
      {"emit-core", "print the translated core term"},
      {"ast", "print the parsed program"},
  };
  for (const auto &[name, help] : commands) {
    auto *sub = app.add_subcommand(name, help);
    sub->add_option("file", cfg.path, "program file")->required();
    sub->add_option("--format", cfg.format, "diagnostics format")
        ->check(CLI::IsMember({"human", "json"}));
    if (std::string(name) == "run") {
      sub->add_option("--fuel", cfg.fuel, "step budget")->check(CLI::PositiveNumber);
    }
    if (std::string(name) == "emit-core") {
      sub->add_flag("--verify", cfg.verify, "type check the emitted core");
    }
    sub->callback([&cfg, name] { cfg.command = name; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &err) {
    return app.exit(err) == 0 ? 0 : kIoError;
  }
  return run(cfg);
}
