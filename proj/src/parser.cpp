// Copyright 2026 The cstarlogic Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <charconv>
#include <optional>
#include <vector>

#include "cstarlogic/parser.hpp"

namespace cstarlogic {

namespace {

enum class Tok { ident, number, imag, punct, end };

struct Token {
  Tok kind;
  std::string text;
  double value = 0.0;
  int line = 1;
  int col = 1;
};

[[noreturn]] void error_at(const Token& t, const std::string& msg) {
  fail(ErrorKind::parse,
       "parse error at line " + std::to_string(t.line) + ", column " + std::to_string(t.col) + ": " + msg);
}

std::vector<Token> lex(std::string_view s) {
  std::vector<Token> out;
  int line = 1, col = 1;
  std::size_t i = 0;
  auto advance = [&](std::size_t k) {
    for (std::size_t j = 0; j < k; ++j) {
      if (s[i + j] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    i += k;
  };
  auto is_alpha = [](char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; };
  auto is_digit = [](char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; };
  while (i < s.size()) {
    char c = s[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (c == '#') {  // comment to end of line
      while (i < s.size() && s[i] != '\n') advance(1);
      continue;
    }
    Token t{Tok::punct, "", 0.0, line, col};
    if (is_alpha(c)) {
      std::size_t j = i;
      while (j < s.size() && (is_alpha(s[j]) || is_digit(s[j]))) ++j;
      t.kind = Tok::ident;
      t.text = std::string(s.substr(i, j - i));
      advance(j - i);
    } else if (is_digit(c)) {
      std::size_t j = i;
      while (j < s.size() && is_digit(s[j])) ++j;
      if (j + 1 < s.size() && s[j] == '.' && is_digit(s[j + 1])) {
        ++j;
        while (j < s.size() && is_digit(s[j])) ++j;
      }
      if (j < s.size() && (s[j] == 'e' || s[j] == 'E')) {
        std::size_t k = j + 1;
        if (k < s.size() && (s[k] == '+' || s[k] == '-')) ++k;
        if (k < s.size() && is_digit(s[k])) {
          while (k < s.size() && is_digit(s[k])) ++k;
          j = k;
        }
      }
      t.kind = Tok::number;
      t.text = std::string(s.substr(i, j - i));
      auto res = std::from_chars(s.data() + i, s.data() + j, t.value);
      if (res.ec != std::errc()) error_at(t, "bad number '" + t.text + "'");
      if (j < s.size() && s[j] == 'i' && (j + 1 >= s.size() || !(is_alpha(s[j + 1]) || is_digit(s[j + 1])))) {
        t.kind = Tok::imag;
        ++j;
      }
      advance(j - i);
    } else if (c == '-' && i + 1 < s.size() && s[i + 1] == '.') {
      t.text = "-.";
      advance(2);
    } else if (c == '^' && i + 1 < s.size() && s[i + 1] == '*') {
      t.text = "^*";
      advance(2);
    } else if (std::string_view("()[]{},:.*+-$=").find(c) != std::string_view::npos) {
      t.text = std::string(1, c);
      advance(1);
    } else {
      error_at(t, std::string("unexpected character '") + c + "'");
    }
    out.push_back(std::move(t));
  }
  out.push_back(Token{Tok::end, "<end>", 0.0, line, col});
  return out;
}

class Parser {
 public:
  explicit Parser(std::string_view text) : toks_(lex(text)) {}

  Formula run() {
    std::size_t declared = 0;
    while (is_ident("free")) {
      next();
      const Token& name = expect_ident("variable name");
      expect(":");
      SortSpec s = sort();
      expect(".");
      scope_.emplace_back(name.text, s);
      ++declared;
    }
    Formula f = fexpr();
    if (peek().kind != Tok::end) error_at(peek(), "unexpected '" + peek().text + "'");
    (void)declared;
    return f;
  }

 private:
  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  std::vector<std::pair<std::string, SortSpec>> scope_;

  const Token& peek(std::size_t k = 0) const { return toks_[std::min(pos_ + k, toks_.size() - 1)]; }
  const Token& next() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }
  bool is(std::string_view p, std::size_t k = 0) const {
    return peek(k).kind == Tok::punct && peek(k).text == p;
  }
  bool is_ident(std::string_view w, std::size_t k = 0) const {
    return peek(k).kind == Tok::ident && peek(k).text == w;
  }
  void expect(std::string_view p) {
    if (!is(p)) error_at(peek(), "expected '" + std::string(p) + "', found '" + peek().text + "'");
    next();
  }
  const Token& expect_ident(const std::string& what) {
    if (peek().kind != Tok::ident) error_at(peek(), "expected " + what + ", found '" + peek().text + "'");
    return next();
  }

  double signed_number() {
    bool neg = false;
    if (is("-")) {
      next();
      neg = true;
    }
    if (peek().kind != Tok::number) error_at(peek(), "expected a number, found '" + peek().text + "'");
    double v = next().value;
    return neg ? -v : v;
  }

  int integer() {
    const Token& t = peek();
    double v = signed_number();
    if (v != static_cast<int>(v)) error_at(t, "expected an integer");
    return static_cast<int>(v);
  }

  std::vector<double> brace_numbers() {
    std::vector<double> out;
    expect("{");
    if (!is("}")) {
      out.push_back(signed_number());
      while (is(",")) {
        next();
        out.push_back(signed_number());
      }
    }
    expect("}");
    return out;
  }

  SortSpec sort() {
    const Token& kt = expect_ident("sort kind");
    SortSpec s;
    try {
      s.constraint = constraint_from_keyword(kt.text);
    } catch (const Error& e) {
      error_at(kt, e.what());
    }
    expect("(");
    s.radius = signed_number();
    while (is(",")) {
      next();
      if (is_ident("amp")) {
        next();
        expect("=");
        s.amp = integer();
      } else if (is_ident("scalar")) {
        next();
        s.scalar = true;
      } else {
        error_at(peek(), "expected 'amp' or 'scalar' in sort");
      }
    }
    expect(")");
    try {
      validate(s);
    } catch (const Error& e) {
      error_at(kt, e.what());
    }
    return s;
  }

  // ---- formulas

  Formula fexpr() {
    Formula lhs = funary();
    while (true) {
      Connective c;
      if (is("+")) c = Connective::add;
      else if (is("-")) c = Connective::sub;
      else if (is("-.")) c = Connective::dotminus;
      else break;
      next();
      Formula rhs = funary();
      lhs = Formula::conn(c, {lhs, rhs});
    }
    return lhs;
  }

  Formula funary() {
    const Token& t = peek();
    if (t.kind == Tok::number) {
      next();
      return Formula::number(t.value);
    }
    if (is("-") && peek(1).kind == Tok::number) {
      next();
      return Formula::number(-next().value);
    }
    if (is("(")) {
      next();
      Formula f = fexpr();
      expect(")");
      return f;
    }
    if (t.kind != Tok::ident) error_at(t, "expected a formula, found '" + t.text + "'");
    if (t.text == "sup" || t.text == "inf") {
      next();
      const Token& v = expect_ident("variable name");
      expect(":");
      SortSpec s = sort();
      expect(".");
      scope_.emplace_back(v.text, s);
      Formula body = fexpr();
      scope_.pop_back();
      return Formula::quant(t.text == "sup" ? Quantifier::sup : Quantifier::inf, v.text, s, body);
    }
    if (t.text == "norm") {
      next();
      expect("(");
      Term tm = term();
      expect(")");
      return Formula::atomic(tm);
    }
    auto c = connective_from_name(t.text);
    if (!c) error_at(t, "unknown connective '" + t.text + "'");
    next();
    std::vector<double> params;
    if (is("{")) params = brace_numbers();
    expect("(");
    std::vector<Formula> args{fexpr()};
    while (is(",")) {
      next();
      args.push_back(fexpr());
    }
    expect(")");
    try {
      return Formula::conn(*c, std::move(args), std::move(params));
    } catch (const Error& e) {
      error_at(t, e.what());
    }
  }

  // ---- terms

  Term term() {
    Term lhs = tmul();
    while (is("+") || is("-")) {
      bool add = is("+");
      next();
      Term rhs = tmul();
      lhs = add ? Term::add(lhs, rhs) : Term::sub(lhs, rhs);
    }
    return lhs;
  }

  Term tmul() {
    Term lhs = tpre();
    while (is("*")) {
      next();
      lhs = Term::mul(lhs, tpre());
    }
    return lhs;
  }

  std::optional<Complex> scalar_literal() {
    const std::size_t save = pos_;
    auto unit_of = [](const Token& t) { return t.kind == Tok::imag ? Complex(0.0, t.value) : Complex(t.value, 0.0); };
    if (peek().kind == Tok::number || peek().kind == Tok::imag) {
      Complex c = unit_of(next());
      if (is("*")) {
        next();
        return c;
      }
      error_at(peek(), "scalar must be followed by '*'");
    }
    if (!is("(")) return std::nullopt;
    next();
    bool neg = false;
    if (is("-")) {
      next();
      neg = true;
    }
    if (peek().kind != Tok::number && peek().kind != Tok::imag) {
      pos_ = save;
      return std::nullopt;
    }
    Complex c = unit_of(next());
    if (neg) c = -c;
    if ((is("+") || is("-")) && peek(1).kind == Tok::imag && c.imag() == 0.0) {
      double sign = is("+") ? 1.0 : -1.0;
      next();
      c += Complex(0.0, sign * next().value);
    }
    if (!is(")") || !is("*", 1)) {
      pos_ = save;
      return std::nullopt;
    }
    next();
    next();
    return c;
  }

  Term tpre() {
    if (auto c = scalar_literal()) return Term::scalar_mul(*c, tpre());
    return tpost();
  }

  Term tpost() {
    Term t = tprim();
    while (is("^*")) {
      next();
      t = Term::adjoint(t);
    }
    return t;
  }

  Term tprim() {
    const Token& t = peek();
    if (is("(")) {
      next();
      Term inner = term();
      expect(")");
      return inner;
    }
    if (is("$")) {
      next();
      const Token& name = expect_ident("constant name");
      std::vector<int> args;
      if (is("(")) {
        next();
        args.push_back(integer());
        while (is(",")) {
          next();
          args.push_back(integer());
        }
        expect(")");
      }
      try {
        return Term::constant(name.text, std::move(args));
      } catch (const Error& e) {
        error_at(name, e.what());
      }
    }
    if (t.kind != Tok::ident) error_at(t, "expected a term, found '" + t.text + "'");
    next();
    if (t.text == "one") return Term::one();
    if (t.text == "zero") return Term::zero();
    if (t.text == "diag" && is("{")) {
      std::vector<double> m = brace_numbers();
      if (m.size() != 1 || m[0] < 1 || m[0] != static_cast<int>(m[0])) error_at(t, "diag needs one positive integer");
      expect("[");
      Term inner = term();
      expect("]");
      return Term::embed(static_cast<int>(m[0]), inner);
    }
    if (is("[") || is("{")) {
      if (!is_function_name(t.text)) error_at(t, "unknown function '" + t.text + "'");
      std::vector<double> params;
      if (is("{")) params = brace_numbers();
      expect("[");
      Term inner = term();
      expect("]");
      try {
        return Term::fn(t.text, std::move(params), inner);
      } catch (const Error& e) {
        error_at(t, e.what());
      }
    }
    for (auto it = scope_.rbegin(); it != scope_.rend(); ++it)
      if (it->first == t.text) return Term::var(t.text, it->second);
    error_at(t, "unbound variable '" + t.text + "'");
  }
};

}  // namespace

Formula parse(std::string_view text) { return Parser(text).run(); }

}  // namespace cstarlogic
