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
#include <cmath>
#include <set>
#include <vector>

#include "cstarlogic/parser.hpp"

namespace cstarlogic {

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

namespace {

std::string format_scalar(Complex c) {
  const double re = c.real(), im = c.imag();
  if (im == 0.0) return std::signbit(re) ? "(" + format_double(re) + ")" : format_double(re);
  if (re == 0.0) return std::signbit(im) ? "(" + format_double(im) + "i)" : format_double(im) + "i";
  std::string s = "(" + format_double(re);
  s += std::signbit(im) ? "-" + format_double(-im) : "+" + format_double(im);
  return s + "i)";
}

std::string braces(const std::vector<double>& p) {
  std::string s = "{";
  for (std::size_t i = 0; i < p.size(); ++i) s += (i ? "," : "") + format_double(p[i]);
  return s + "}";
}

std::string sort_text(const SortSpec& s) {
  std::string out = std::string(keyword(s.constraint)) + "(" + format_double(s.radius);
  if (s.amp != 1) out += ", amp=" + std::to_string(s.amp);
  if (s.scalar) out += ", scalar";
  return out + ")";
}

class Printer {
 public:
  explicit Printer(std::set<std::string> reserved) : reserved_(std::move(reserved)) {}

  std::string formula(const Formula& f) { return formula_at(f, 0); }

  std::string term(const Term& t, int need) {
    const TermNode& n = t.node();
    int level = 5;
    std::string s;
    switch (n.kind) {
      case TermKind::var: s = lookup(n.name); break;
      case TermKind::one: s = "one"; break;
      case TermKind::zero: s = "zero"; break;
      case TermKind::constant: {
        s = "$" + n.name;
        if (!n.args.empty()) {
          s += "(";
          for (std::size_t i = 0; i < n.args.size(); ++i) s += (i ? "," : "") + std::to_string(n.args[i]);
          s += ")";
        }
        break;
      }
      case TermKind::literal: s = "$" + n.name; break;
      case TermKind::add:
      case TermKind::sub:
        level = 1;
        s = term(n.lhs, 1) + (n.kind == TermKind::add ? " + " : " - ") + term(n.rhs, 2);
        break;
      case TermKind::mul: {
        level = 2;
        std::string l = term(n.lhs, 2);
        std::string r = term(n.rhs, 3);
        s = l + (l.ends_with("^*") ? " * " : "*") + r;
        break;
      }
      case TermKind::scalar_mul:
        level = 3;
        s = format_scalar(n.scalar) + "*" + term(n.lhs, 3);
        break;
      case TermKind::adjoint:
        level = 4;
        s = term(n.lhs, 4) + "^*";
        break;
      case TermKind::fn_app:
        s = n.name + (n.params.empty() ? "" : braces(n.params)) + "[" + term(n.lhs, 0) + "]";
        break;
      case TermKind::embed:
        s = "diag{" + std::to_string(n.factor) + "}[" + term(n.lhs, 0) + "]";
        break;
    }
    return level < need ? "(" + s + ")" : s;
  }

 private:
  std::set<std::string> reserved_;
  std::vector<std::pair<std::string, std::string>> scope_;
  int counter_ = 0;

  std::string lookup(const std::string& name) const {
    for (auto it = scope_.rbegin(); it != scope_.rend(); ++it)
      if (it->first == name) return it->second;
    return name;
  }

  std::string fresh() {
    while (true) {
      std::string s = "x" + std::to_string(counter_++);
      if (!reserved_.count(s)) return s;
    }
  }

  std::string formula_at(const Formula& f, int need) {
    const FormulaNode& n = f.node();
    switch (n.kind) {
      case FormulaKind::atomic: return "norm(" + term(n.term, 0) + ")";
      case FormulaKind::number:
        return std::signbit(n.number) ? "(" + format_double(n.number) + ")" : format_double(n.number);
      case FormulaKind::quant: {
        std::string v = fresh();
        std::string head = std::string(n.quant == Quantifier::sup ? "sup " : "inf ") + v + ":" +
                           sort_text(n.sort) + ". ";
        scope_.emplace_back(n.var, v);
        std::string body = formula_at(n.body(), 0);
        scope_.pop_back();
        std::string s = head + body;
        return need > 0 ? "(" + s + ")" : s;
      }
      case FormulaKind::conn: {
        const ConnectiveInfo& ci = info(n.conn);
        if (ci.infix) {
          std::string s = formula_at(n.children[0], 1) + " " + std::string(ci.name) + " " +
                          formula_at(n.children[1], 2);
          return need > 1 ? "(" + s + ")" : s;
        }
        std::string s = std::string(ci.name) + (n.params.empty() ? "" : braces(n.params)) + "(";
        for (std::size_t i = 0; i < n.children.size(); ++i)
          s += (i ? ", " : "") + formula_at(n.children[i], 0);
        return s + ")";
      }
    }
    return "";
  }
};

}  // namespace

std::string print(const Formula& phi) {
  VarSet fv = free_vars(phi);
  std::set<std::string> reserved;
  for (const auto& [name, s] : fv) reserved.insert(name);
  Printer p(reserved);
  std::string head;
  for (const auto& [name, s] : fv) head += "free " + name + ":" + sort_text(s) + ". ";
  return head + p.formula(phi);
}

std::string print(const Term& t) {
  Printer p({});
  return p.term(t, 0);
}

}  // namespace cstarlogic
