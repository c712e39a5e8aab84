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

#include "fg/parser.h"

#include <fmt/format.h>

#include <atomic>
#include <cctype>
#include <charconv>
#include <optional>
#include <set>
#include <stdexcept>
#include <unordered_set>

namespace fg {

TypeVarId fresh_type_var_id() {
  static std::atomic<TypeVarId> next{1};
  return next.fetch_add(1, std::memory_order_relaxed);
}

namespace {

enum class Tok {
  kId,
  kInt,
  kKeyword,
  kSymbol,
  kEnd,
};

struct Token {
  Tok kind;
  std::string text;
  SourceSpan span;
};

const std::unordered_set<std::string_view> &keywords() {
  static const std::unordered_set<std::string_view> kw = {
      "concept", "model", "type", "let",  "in",    "lam",   "Lam",
      "forall",  "fix",   "if",   "then", "else",  "true",  "false",
      "int",     "bool",  "list", "nil",  "isnil", "head",  "tail",
      "cons"};
  return kw;
}

struct ParseError : std::runtime_error {
  ParseError(Diagnostic d) : std::runtime_error(d.message), diag(std::move(d)) {}
  Diagnostic diag;
};

class Lexer {
 public:
  Lexer(std::string_view src, std::string file) : src_(src), file_(std::move(file)) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    while (true) {
      skip_space();
      if (pos_ >= src_.size()) break;
      out.push_back(next());
    }
    SourceSpan end{file_, line_, col_, line_, col_};
    out.push_back(Token{Tok::kEnd, "", end});
    return out;
  }

 private:
  void advance() {
    if (src_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  void skip_space() {
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else if (c == '/' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '/') {
        while (pos_ < src_.size() && src_[pos_] != '\n') advance();
      } else {
        break;
      }
    }
  }

  Token next() {
    int sl = line_, sc = col_;
    std::size_t start = pos_;
    char c = src_[pos_];
    auto finish = [&](Tok kind) {
      // end column is inclusive of the last character
      return Token{kind, std::string(src_.substr(start, pos_ - start)),
                   SourceSpan{file_, sl, sc, line_, col_ - 1}};
    };
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      while (pos_ < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_' ||
              src_[pos_] == '\'')) {
        advance();
      }
      auto tok = finish(Tok::kId);
      if (keywords().count(tok.text)) tok.kind = Tok::kKeyword;
      return tok;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
        advance();
      }
      auto tok = finish(Tok::kInt);
      std::int64_t v = 0;
      auto [p, ec] = std::from_chars(tok.text.data(), tok.text.data() + tok.text.size(), v);
      if (ec != std::errc()) {
        throw ParseError(Diagnostic{tok.span, std::string(codes::kBadCharacter),
                                    fmt::format("integer literal '{}' out of range", tok.text),
                                    {}});
      }
      return tok;
    }
    static const char *two_char[] = {"==", "=>", "->"};
    for (const char *sym : two_char) {
      if (src_.substr(pos_, 2) == sym) {
        advance();
        advance();
        return finish(Tok::kSymbol);
      }
    }
    static const std::string_view one_char = "<>{}()[];,.:=+-*";
    if (one_char.find(c) != std::string_view::npos) {
      advance();
      return finish(Tok::kSymbol);
    }
    advance();
    auto tok = finish(Tok::kSymbol);
    throw ParseError(Diagnostic{tok.span, std::string(codes::kBadCharacter),
                                fmt::format("invalid character '{}'", tok.text),
                                {}});
  }

  std::string_view src_;
  std::string file_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

SourceSpan join(const SourceSpan &a, const SourceSpan &b) {
  return SourceSpan{a.file, a.start_line, a.start_col, b.end_line, b.end_col};
}

class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  ParseResult program() {
    ParseResult result;
    try {
      auto e = expr();
      if (peek().kind != Tok::kEnd) fail_unexpected();
      result.program = e;
      return result;
    } catch (const ParseError &err) {
      result.diagnostics.push_back(err.diag);
    }
    // Resynchronize at the next statement keyword and keep looking for
    // further syntax errors; names are no longer checked once recovering.
    recovering_ = true;
    while (true) {
      std::size_t before = pos_;
      while (peek().kind != Tok::kEnd && !is_statement_keyword(peek())) ++pos_;
      if (peek().kind == Tok::kEnd) break;
      if (peek().text == "in") ++pos_;
      if (pos_ == before) ++pos_;
      if (peek().kind == Tok::kEnd) break;
      try {
        expr();
        if (peek().kind != Tok::kEnd) fail_unexpected();
        break;
      } catch (const ParseError &err) {
        if (pos_ <= before) ++pos_;
        result.diagnostics.push_back(err.diag);
      }
    }
    return result;
  }

  TypeParseResult standalone_type(const std::vector<TypeBinder> &scope) {
    TypeParseResult result;
    for (const auto &b : scope) type_scope_.push_back({b.name, false, b.id});
    try {
      result.type = type();
      if (peek().kind != Tok::kEnd) fail_unexpected();
    } catch (const ParseError &err) {
      result.type = nullptr;
      result.diagnostics.push_back(err.diag);
    }
    return result;
  }

 private:
  struct TypeScopeEntry {
    std::string name;
    bool is_forall;
    TypeVarId id;
  };

  static bool is_statement_keyword(const Token &t) {
    if (t.kind != Tok::kKeyword) return false;
    return t.text == "concept" || t.text == "model" || t.text == "type" ||
           t.text == "let" || t.text == "in";
  }

  const Token &peek(std::size_t ahead = 0) const {
    std::size_t i = std::min(pos_ + ahead, toks_.size() - 1);
    return toks_[i];
  }

  bool is_sym(std::string_view s, std::size_t ahead = 0) const {
    const auto &t = peek(ahead);
    return t.kind == Tok::kSymbol && t.text == s;
  }
  bool is_kw(std::string_view s, std::size_t ahead = 0) const {
    const auto &t = peek(ahead);
    return t.kind == Tok::kKeyword && t.text == s;
  }

  const Token &take() {
    const Token &t = toks_[pos_];
    if (pos_ + 1 < toks_.size()) ++pos_;
    last_ = t.span;
    return t;
  }

  [[noreturn]] void fail_unexpected() {
    const auto &t = peek();
    if (t.kind == Tok::kEnd) {
      throw ParseError(Diagnostic{t.span, std::string(codes::kUnexpectedEnd),
                                  "unexpected end of input", {}});
    }
    throw ParseError(Diagnostic{t.span, std::string(codes::kUnexpectedToken),
                                fmt::format("unexpected token '{}'", t.text), {}});
  }

  [[noreturn]] void fail(const SourceSpan &span, std::string_view code, std::string msg) {
    throw ParseError(Diagnostic{span, std::string(code), std::move(msg), {}});
  }

  void expect_sym(std::string_view s) {
    if (!is_sym(s)) fail_unexpected();
    take();
  }
  void expect_kw(std::string_view s) {
    if (!is_kw(s)) fail_unexpected();
    take();
  }
  const Token &expect_id() {
    if (peek().kind != Tok::kId) fail_unexpected();
    return take();
  }
  // Concept members may reuse the list primitive names.
  const Token &expect_member_name() {
    const auto &t = peek();
    if (t.kind == Tok::kKeyword &&
        (t.text == "isnil" || t.text == "head" || t.text == "tail" || t.text == "cons")) {
      return take();
    }
    return expect_id();
  }

  // Runs `fn` speculatively; restores the position and returns nullopt when
  // it throws.
  template <typename F>
  auto attempt(F &&fn) -> std::optional<decltype(fn())> {
    std::size_t saved = pos_;
    auto saved_last = last_;
    auto saved_scope = type_scope_.size();
    try {
      return fn();
    } catch (const ParseError &) {
      pos_ = saved;
      last_ = saved_last;
      type_scope_.resize(saved_scope);
      return std::nullopt;
    }
  }

  // --- scopes --------------------------------------------------------------

  TypePtr resolve_type_name(const Token &t) {
    std::uint32_t foralls = 0;
    for (auto it = type_scope_.rbegin(); it != type_scope_.rend(); ++it) {
      if (it->name == t.text) {
        return it->is_forall ? bound_type(foralls) : var_type(it->id, it->name);
      }
      if (it->is_forall) ++foralls;
    }
    if (recovering_) return var_type(fresh_type_var_id(), t.text);
    fail(t.span, codes::kUnboundName, fmt::format("unbound type name '{}'", t.text));
  }

  void check_term_name(const Token &t) {
    if (recovering_) return;
    for (auto it = term_scope_.rbegin(); it != term_scope_.rend(); ++it) {
      if (*it == t.text) return;
    }
    fail(t.span, codes::kUnboundName, fmt::format("unbound variable '{}'", t.text));
  }

  TypeBinder push_type_var(const std::string &name) {
    TypeBinder b{fresh_type_var_id(), name};
    type_scope_.push_back({name, false, b.id});
    return b;
  }

  // --- types ---------------------------------------------------------------

  // type = "forall" ID "." type | conceptc "=>" type
  //      | arrow ["==" arrow "=>" type]
  TypePtr type() {
    if (is_kw("forall")) {
      take();
      const auto &name = expect_id();
      expect_sym(".");
      type_scope_.push_back({name.text, true, 0});
      auto body = type();
      type_scope_.pop_back();
      return forall_type(name.text, body);
    }
    if (peek().kind == Tok::kId && is_sym("<", 1)) {
      auto c = attempt([&] {
        auto m = model_id();
        expect_sym("=>");
        return m;
      });
      if (c) {
        auto body = type();
        return constrained_type(Constraint{Constraint::Concept{std::move(*c)}}, body);
      }
    }
    auto lhs = arrow_type_();
    if (is_sym("==")) {
      take();
      auto rhs = arrow_type_();
      expect_sym("=>");
      auto body = type();
      return constrained_type(same_type_constraint(lhs, rhs), body);
    }
    return lhs;
  }

  TypePtr arrow_type_() {
    auto dom = unary_type();
    if (is_sym("->")) {
      take();
      return arrow_type(dom, type());
    }
    return dom;
  }

  TypePtr unary_type() {
    if (is_kw("list")) {
      take();
      return list_type(unary_type());
    }
    return atom_type();
  }

  TypePtr atom_type() {
    if (is_kw("int")) {
      take();
      return int_type();
    }
    if (is_kw("bool")) {
      take();
      return bool_type();
    }
    if (is_sym("(")) {
      take();
      auto t = type();
      expect_sym(")");
      return t;
    }
    if (peek().kind == Tok::kId) {
      if (is_sym("<", 1)) {
        std::vector<ModelId> prefix;
        prefix.push_back(model_id());
        expect_sym(".");
        while (peek().kind == Tok::kId && is_sym("<", 1)) {
          prefix.push_back(model_id());
          expect_sym(".");
        }
        const auto &name = expect_id();
        return path_type(std::move(prefix), name.text);
      }
      return resolve_type_name(take());
    }
    fail_unexpected();
  }

  ModelId model_id() {
    const auto &name = expect_id();
    ModelId m{name.text, {}};
    expect_sym("<");
    m.args.push_back(type());
    while (is_sym(",")) {
      take();
      m.args.push_back(type());
    }
    expect_sym(">");
    return m;
  }

  // constraint = ID "<" types ">" | arrow "==" arrow
  Constraint constraint() {
    if (peek().kind == Tok::kId && is_sym("<", 1)) {
      std::size_t saved = pos_;
      auto m = attempt([&] { return model_id(); });
      if (m && !is_sym("==") && !is_sym(".")) return Constraint{Constraint::Concept{std::move(*m)}};
      pos_ = saved;
    }
    auto lhs = arrow_type_();
    expect_sym("==");
    auto rhs = arrow_type_();
    return same_type_constraint(lhs, rhs);
  }

  // --- expressions ---------------------------------------------------------

  ExprPtr expr() {
    const auto &t = peek();
    SourceSpan start = t.span;
    if (t.kind == Tok::kKeyword) {
      if (t.text == "concept") return concept_decl();
      if (t.text == "model") return model_decl();
      if (t.text == "type") {
        take();
        const auto &name = expect_id();
        expect_sym("=");
        auto rhs = type();
        expect_kw("in");
        auto binder = push_type_var(name.text);
        auto rest = expr();
        type_scope_.pop_back();
        return make_expr(Expr::TypeAlias{binder, rhs, rest}, join(start, last_));
      }
      if (t.text == "let") {
        take();
        const auto &name = expect_id();
        std::string n = name.text;
        expect_sym("=");
        auto bound = expr();
        expect_kw("in");
        term_scope_.push_back(n);
        auto rest = expr();
        term_scope_.pop_back();
        return make_expr(Expr::Let{n, bound, rest}, join(start, last_));
      }
      if (t.text == "lam") {
        take();
        const auto &name = expect_id();
        std::string n = name.text;
        TypePtr ann;
        if (is_sym(":")) {
          take();
          ann = type();
        }
        expect_sym(".");
        term_scope_.push_back(n);
        auto body = expr();
        term_scope_.pop_back();
        return make_expr(Expr::Lam{n, ann, body}, join(start, last_));
      }
      if (t.text == "Lam") {
        take();
        const auto &name = expect_id();
        std::string n = name.text;
        expect_sym(".");
        auto binder = push_type_var(n);
        auto body = expr();
        type_scope_.pop_back();
        return make_expr(Expr::TyLam{binder, body}, join(start, last_));
      }
      if (t.text == "if") {
        take();
        auto c = expr();
        expect_kw("then");
        auto a = expr();
        expect_kw("else");
        auto b = expr();
        return make_expr(Expr::If{c, a, b}, join(start, last_));
      }
    }
    if (auto c = constrained_prefix()) {
      auto body = expr();
      return make_expr(Expr::ConstrainedE{std::move(*c), body}, join(start, last_));
    }
    return binop(0);
  }

  std::optional<Constraint> constrained_prefix() {
    if (peek().kind == Tok::kId && is_sym("<", 1)) {
      auto c = attempt([&] {
        auto m = model_id();
        expect_sym("=>");
        return m;
      });
      if (c) return Constraint{Constraint::Concept{std::move(*c)}};
    }
    if (!starts_type(peek())) return std::nullopt;
    return attempt([&] {
      auto lhs = arrow_type_();
      expect_sym("==");
      auto rhs = arrow_type_();
      expect_sym("=>");
      return same_type_constraint(lhs, rhs);
    });
  }

  bool starts_type(const Token &t) const {
    if (t.kind == Tok::kId) return true;
    if (t.kind == Tok::kKeyword) {
      return t.text == "int" || t.text == "bool" || t.text == "list" || t.text == "forall";
    }
    return t.kind == Tok::kSymbol && t.text == "(";
  }

  ExprPtr concept_decl() {
    SourceSpan start = take().span;
    const auto &name = expect_id();
    auto info = std::make_shared<ConceptInfo>();
    info->name = name.text;
    auto scope_mark = type_scope_.size();
    std::set<std::string> seen;
    auto fresh_name = [&](const Token &tok) {
      if (!seen.insert(tok.text).second) {
        fail(tok.span, codes::kDuplicateName,
             fmt::format("duplicate name '{}' in concept '{}'", tok.text, info->name));
      }
    };
    expect_sym("<");
    do {
      const auto &p = expect_id();
      fresh_name(p);
      info->params.push_back(push_type_var(p.text));
    } while (is_sym(",") && (take(), true));
    expect_sym(">");
    expect_sym("{");
    if (peek().kind == Tok::kId) {
      do {
        const auto &a = expect_id();
        fresh_name(a);
        info->assoc.push_back(push_type_var(a.text));
      } while (is_sym(",") && (take(), true));
    }
    expect_sym(";");
    if (!is_sym(";")) {
      do {
        info->nested.push_back(constraint());
      } while (is_sym(",") && (take(), true));
    }
    expect_sym(";");
    std::set<std::string> members;
    if (!is_sym("}")) {
      do {
        const auto &m = expect_member_name();
        if (!members.insert(m.text).second) {
          fail(m.span, codes::kDuplicateName,
               fmt::format("duplicate member '{}' in concept '{}'", m.text, info->name));
        }
        std::string mn = m.text;
        expect_sym(":");
        info->members.emplace_back(mn, type());
      } while (is_sym(",") && (take(), true));
    }
    expect_sym("}");
    type_scope_.resize(scope_mark);
    expect_kw("in");
    auto rest = expr();
    return make_expr(Expr::ConceptDecl{info, rest}, join(start, last_));
  }

  ExprPtr model_decl() {
    SourceSpan start = take().span;
    auto info = std::make_shared<ModelInfo>();
    auto m = model_id();
    info->concept_name = m.concept_name;
    info->args = std::move(m.args);
    expect_sym("{");
    std::set<std::string> seen;
    auto fresh_name = [&](const Token &tok) {
      if (!seen.insert(tok.text).second) {
        fail(tok.span, codes::kDuplicateName,
             fmt::format("duplicate binding '{}' in model", tok.text));
      }
    };
    if (peek().kind == Tok::kId) {
      do {
        const auto &a = expect_id();
        fresh_name(a);
        std::string an = a.text;
        expect_sym("=");
        info->assoc_binds.emplace_back(an, type());
      } while (is_sym(",") && (take(), true));
    }
    expect_sym(";");
    if (!is_sym("}")) {
      do {
        const auto &x = expect_member_name();
        fresh_name(x);
        std::string xn = x.text;
        expect_sym("=");
        info->member_binds.emplace_back(xn, expr());
      } while (is_sym(",") && (take(), true));
    }
    expect_sym("}");
    expect_kw("in");
    auto rest = expr();
    return make_expr(Expr::ModelDecl{info, rest}, join(start, last_));
  }

  static int binop_level(const Token &t) {
    if (t.kind != Tok::kSymbol) return -1;
    if (t.text == "<" || t.text == "==") return 0;
    if (t.text == "+" || t.text == "-") return 1;
    if (t.text == "*") return 2;
    return -1;
  }

  static PrimOp binop_of(const std::string &s) {
    if (s == "+") return PrimOp::kAdd;
    if (s == "-") return PrimOp::kSub;
    if (s == "*") return PrimOp::kMul;
    if (s == "<") return PrimOp::kLess;
    return PrimOp::kEqual;
  }

  ExprPtr binop(int min_level) {
    auto lhs = min_level > 2 ? app() : binop(min_level + 1);
    if (min_level > 2) return lhs;
    while (binop_level(peek()) == min_level) {
      auto op = binop_of(take().text);
      auto rhs = binop(min_level + 1);
      lhs = make_expr(Expr::Prim{op, {lhs, rhs}}, join(lhs->span, rhs->span));
    }
    return lhs;
  }

  static std::optional<PrimOp> prim_keyword(const Token &t) {
    if (t.kind != Tok::kKeyword) return std::nullopt;
    if (t.text == "isnil") return PrimOp::kIsNil;
    if (t.text == "head") return PrimOp::kHead;
    if (t.text == "tail") return PrimOp::kTail;
    if (t.text == "cons") return PrimOp::kCons;
    return std::nullopt;
  }

  bool starts_atom(const Token &t) const {
    switch (t.kind) {
      case Tok::kInt:
      case Tok::kId:
        return true;
      case Tok::kKeyword:
        return t.text == "true" || t.text == "false" || t.text == "nil";
      case Tok::kSymbol:
        return t.text == "(" || t.text == "[";
      default:
        return false;
    }
  }

  ExprPtr app() {
    SourceSpan start = peek().span;
    ExprPtr head;
    if (is_kw("fix")) {
      take();
      auto body = atom();
      head = make_expr(Expr::Fix{body}, join(start, last_));
    } else if (auto op = prim_keyword(peek())) {
      const auto &tok = take();
      std::vector<ExprPtr> args;
      for (int i = 0; i < prim_arity(*op); ++i) {
        if (!starts_atom(peek())) {
          fail(tok.span, codes::kPrimArity,
               fmt::format("'{}' expects {} argument(s)", prim_name(*op), prim_arity(*op)));
        }
        args.push_back(atom());
      }
      head = make_expr(Expr::Prim{*op, std::move(args)}, join(start, last_));
    } else {
      head = atom();
    }
    while (true) {
      if (is_sym("[")) {
        auto ty = attempt([&] {
          take();
          auto t = type();
          expect_sym("]");
          return t;
        });
        if (ty) {
          head = make_expr(Expr::TyApp{head, *ty}, join(start, last_));
          continue;
        }
      }
      if (!starts_atom(peek())) break;
      auto arg = atom();
      head = make_expr(Expr::App{head, arg}, join(start, last_));
    }
    return head;
  }

  ExprPtr atom() {
    const auto &t = peek();
    SourceSpan start = t.span;
    switch (t.kind) {
      case Tok::kInt: {
        take();
        std::int64_t v = 0;
        std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
        return make_expr(Expr::IntLit{v}, start);
      }
      case Tok::kKeyword:
        if (t.text == "true" || t.text == "false") {
          take();
          return make_expr(Expr::BoolLit{t.text == "true"}, start);
        }
        if (t.text == "nil") {
          take();
          expect_sym("[");
          auto ty = type();
          expect_sym("]");
          return make_expr(Expr::ListLit{{}, ty}, join(start, last_));
        }
        break;
      case Tok::kId:
        return path_expr();
      case Tok::kSymbol:
        if (t.text == "(") {
          take();
          auto e = expr();
          expect_sym(")");
          return e;
        }
        if (t.text == "[") {
          take();
          std::vector<ExprPtr> elems;
          elems.push_back(expr());
          while (is_sym(",")) {
            take();
            elems.push_back(expr());
          }
          expect_sym("]");
          return make_expr(Expr::ListLit{std::move(elems), nullptr}, join(start, last_));
        }
        break;
      default:
        break;
    }
    fail_unexpected();
  }

  ExprPtr path_expr() {
    SourceSpan start = peek().span;
    std::vector<ModelId> prefix;
    while (peek().kind == Tok::kId && is_sym("<", 1)) {
      auto m = attempt([&] {
        auto mid = model_id();
        expect_sym(".");
        return mid;
      });
      if (!m) break;
      prefix.push_back(std::move(*m));
    }
    const auto &name = prefix.empty() ? expect_id() : expect_member_name();
    if (prefix.empty()) check_term_name(name);
    return make_expr(Expr::PathE{TermPath{std::move(prefix), name.text}}, join(start, last_));
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  SourceSpan last_;
  std::vector<TypeScopeEntry> type_scope_;
  std::vector<std::string> term_scope_;
  bool recovering_ = false;
};

}  // namespace

ParseResult parse_program(std::string_view src, std::string file) {
  std::vector<Token> toks;
  try {
    toks = Lexer(src, file).run();
  } catch (const ParseError &err) {
    return ParseResult{nullptr, {err.diag}};
  }
  return Parser(std::move(toks)).program();
}

TypeParseResult parse_type(std::string_view src, const std::vector<TypeBinder> &scope) {
  std::vector<Token> toks;
  try {
    toks = Lexer(src, "<type>").run();
  } catch (const ParseError &err) {
    return TypeParseResult{nullptr, {err.diag}};
  }
  return Parser(std::move(toks)).standalone_type(scope);
}

}  // namespace fg
