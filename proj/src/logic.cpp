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

#include "cstarlogic/logic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace cstarlogic {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Term make(TermNode n) { return Term(std::make_shared<const TermNode>(std::move(n))); }

Formula make(FormulaNode n) { return Formula(std::make_shared<const FormulaNode>(std::move(n))); }

bool sa_like(const SortSpec& s) {
  return s.constraint == Constraint::self_adjoint || s.constraint == Constraint::positive ||
         s.constraint == Constraint::projection;
}

}  // namespace

void validate(const SortSpec& s) {
  if (!(s.radius > 0) || !std::isfinite(s.radius)) fail(ErrorKind::sort, "sort radius must be positive");
  if (s.amp < 1) fail(ErrorKind::sort, "amplification must be >= 1");
  if ((s.constraint == Constraint::unitary || s.constraint == Constraint::projection ||
       s.constraint == Constraint::partial_isometry) &&
      s.radius < 1.0)
    fail(ErrorKind::sort, std::string(keyword(s.constraint)) + " sort needs radius >= 1");
}

std::string to_string(const SortSpec& s) {
  std::ostringstream os;
  os << keyword(s.constraint) << '(' << s.radius;
  if (s.amp != 1) os << ", amp=" << s.amp;
  if (s.scalar) os << ", scalar";
  os << ')';
  return os.str();
}

// ---- terms ------------------------------------------------------------

Term Term::var(std::string name, SortSpec sort) {
  validate(sort);
  TermNode n{TermKind::var};
  n.name = std::move(name);
  n.sort = sort;
  return make(std::move(n));
}

Term Term::one() { return make(TermNode{.kind = TermKind::one}); }
Term Term::zero() { return make(TermNode{.kind = TermKind::zero}); }

Term Term::constant(std::string name, std::vector<int> args) {
  constant_amp(name, args);  // validates
  TermNode n{TermKind::constant};
  n.name = std::move(name);
  n.args = std::move(args);
  return make(std::move(n));
}

Term Term::literal(std::string name, Element value, int amp) {
  TermNode n{TermKind::literal};
  n.name = std::move(name);
  n.factor = amp;
  n.value = std::make_shared<const Element>(std::move(value));
  return make(std::move(n));
}

namespace {
Term binary(TermKind k, Term a, Term b) {
  TermNode n{k};
  n.lhs = std::move(a);
  n.rhs = std::move(b);
  return make(std::move(n));
}
}  // namespace

Term Term::add(Term a, Term b) { return binary(TermKind::add, std::move(a), std::move(b)); }
Term Term::sub(Term a, Term b) { return binary(TermKind::sub, std::move(a), std::move(b)); }
Term Term::mul(Term a, Term b) { return binary(TermKind::mul, std::move(a), std::move(b)); }

Term Term::adjoint(Term a) {
  TermNode n{TermKind::adjoint};
  n.lhs = std::move(a);
  return make(std::move(n));
}

Term Term::scalar_mul(Complex c, Term a) {
  TermNode n{TermKind::scalar_mul};
  n.scalar = c;
  n.lhs = std::move(a);
  return make(std::move(n));
}

Term Term::fn(std::string name, std::vector<double> params, Term arg) {
  make_function(name, params);  // validates name and parameters
  TermNode n{TermKind::fn_app};
  n.name = std::move(name);
  n.params = std::move(params);
  n.lhs = std::move(arg);
  return make(std::move(n));
}

Term Term::embed(int m, Term a) {
  if (m < 1) fail(ErrorKind::precondition, "diag amplification must be >= 1");
  TermNode n{TermKind::embed};
  n.factor = m;
  n.lhs = std::move(a);
  return make(std::move(n));
}

Term operator+(Term a, Term b) { return Term::add(std::move(a), std::move(b)); }
Term operator-(Term a, Term b) { return Term::sub(std::move(a), std::move(b)); }
Term operator*(Term a, Term b) { return Term::mul(std::move(a), std::move(b)); }
Term operator*(Complex c, Term a) { return Term::scalar_mul(c, std::move(a)); }

bool is_constant_name(std::string_view name) {
  return name == "unit" || name == "swap" || name == "omega";
}

int constant_amp(std::string_view name, const std::vector<int>& args) {
  auto need = [&](std::size_t k) {
    if (args.size() != k)
      fail(ErrorKind::precondition, "constant $" + std::string(name) + " takes " + std::to_string(k) + " arguments");
  };
  if (name == "unit") {
    need(3);
    if (args[0] < 1 || args[1] < 1 || args[2] < 1 || args[1] > args[0] || args[2] > args[0])
      fail(ErrorKind::precondition, "matrix unit index out of range");
    return args[0];
  }
  if (name == "swap" || name == "omega") {
    need(1);
    if (args[0] < 1) fail(ErrorKind::precondition, "constant size must be >= 1");
    return args[0] * args[0];
  }
  fail(ErrorKind::unknown_name, "unknown constant $" + std::string(name));
}

Element constant_value(std::string_view name, const std::vector<int>& args, const Signature& ambient) {
  const int m = constant_amp(name, args);
  Matrix c = Matrix::Zero(m, m);
  if (name == "unit") {
    c(args[1] - 1, args[2] - 1) = 1.0;
  } else {
    const int l = args[0];
    for (int a = 0; a < l; ++a)
      for (int b = 0; b < l; ++b) {
        if (name == "swap")
          c(b * l + a, a * l + b) = 1.0;
        else
          c(a * l + a, b * l + b) = 1.0;
      }
  }
  return tensor_scalar(c, ambient);
}

// ---- connectives ------------------------------------------------------

namespace {

constexpr ConnectiveInfo kConnectives[] = {
    {Connective::max, "max", -1, 0, false},  {Connective::min, "min", -1, 0, false},
    {Connective::add, "+", 2, 0, true},      {Connective::sub, "-", 2, 0, true},
    {Connective::dotminus, "-.", 2, 0, true}, {Connective::abs, "abs", 1, 0, false},
    {Connective::mul, "mul", 1, 1, false},   {Connective::sq, "sq", 1, 2, false},
    {Connective::sqrt, "sqrt", 1, 2, false}, {Connective::fproj, "fproj", 1, 1, false},
};

}  // namespace

const ConnectiveInfo& info(Connective c) { return kConnectives[static_cast<int>(c)]; }

std::optional<Connective> connective_from_name(std::string_view name) {
  for (const auto& ci : kConnectives)
    if (!ci.infix && ci.name == name) return ci.id;
  return std::nullopt;
}

double apply_connective(Connective c, const std::vector<double>& p, const std::vector<double>& a) {
  switch (c) {
    case Connective::max: return *std::max_element(a.begin(), a.end());
    case Connective::min: return *std::min_element(a.begin(), a.end());
    case Connective::add: return a[0] + a[1];
    case Connective::sub: return a[0] - a[1];
    case Connective::dotminus: return std::max(a[0] - a[1], 0.0);
    case Connective::abs: return std::abs(a[0]);
    case Connective::mul: return p[0] * a[0];
    case Connective::sq: {
      double t = std::clamp(a[0], p[0], p[1]);
      return t * t;
    }
    case Connective::sqrt: return std::sqrt(std::clamp(a[0], p[0], p[1]));
    case Connective::fproj: return 1.0 - std::sqrt(1.0 - 4.0 * std::clamp(a[0], 0.0, p[0]));
  }
  return 0.0;
}

double connective_lipschitz(Connective c, const std::vector<double>& p, std::size_t) {
  switch (c) {
    case Connective::mul: return std::abs(p[0]);
    case Connective::sq: return 2.0 * std::max(std::abs(p[0]), std::abs(p[1]));
    case Connective::sqrt: return p[0] > 0 ? 0.5 / std::sqrt(p[0]) : kInf;
    case Connective::fproj: return 2.0 / std::sqrt(1.0 - 4.0 * p[0]);
    default: return 1.0;
  }
}

int connective_polarity(Connective c, const std::vector<double>& p, std::size_t i) {
  switch (c) {
    case Connective::sub:
    case Connective::dotminus: return i == 0 ? 1 : -1;
    case Connective::abs: return 0;
    case Connective::mul: return p[0] > 0 ? 1 : (p[0] < 0 ? -1 : 0);
    case Connective::sq: return p[0] >= 0 ? 1 : (p[1] <= 0 ? -1 : 0);
    default: return 1;
  }
}

// ---- formulas ---------------------------------------------------------

Formula Formula::atomic(Term t) {
  FormulaNode n{FormulaKind::atomic};
  n.term = std::move(t);
  return make(std::move(n));
}

Formula Formula::number(double v) {
  FormulaNode n{FormulaKind::number};
  n.number = v;
  return make(std::move(n));
}

Formula Formula::conn(Connective c, std::vector<Formula> children, std::vector<double> params) {
  const ConnectiveInfo& ci = info(c);
  if (ci.arity < 0 ? children.empty() : children.size() != static_cast<std::size_t>(ci.arity))
    fail(ErrorKind::precondition, "wrong arity for connective " + std::string(ci.name));
  if (params.size() != ci.params)
    fail(ErrorKind::precondition, "wrong parameter count for connective " + std::string(ci.name));
  if ((c == Connective::sq || c == Connective::sqrt) && !(params[0] <= params[1]))
    fail(ErrorKind::precondition, std::string(ci.name) + " needs lo <= hi");
  if (c == Connective::sqrt && params[0] < 0)
    fail(ErrorKind::precondition, "sqrt range must be nonnegative");
  if (c == Connective::fproj && !(params[0] >= 0 && params[0] < 0.25))
    fail(ErrorKind::precondition, "fproj range must lie in [0, 1/4)");
  FormulaNode n{FormulaKind::conn};
  n.conn = c;
  n.children = std::move(children);
  n.params = std::move(params);
  return make(std::move(n));
}

Formula Formula::quant(Quantifier q, std::string var, SortSpec sort, Formula body) {
  validate(sort);
  FormulaNode n{FormulaKind::quant};
  n.quant = q;
  n.var = std::move(var);
  n.sort = sort;
  n.children.push_back(std::move(body));
  return make(std::move(n));
}

Formula Formula::sup(std::string var, SortSpec sort, Formula body) {
  return quant(Quantifier::sup, std::move(var), sort, std::move(body));
}

Formula Formula::inf(std::string var, SortSpec sort, Formula body) {
  return quant(Quantifier::inf, std::move(var), sort, std::move(body));
}

// ---- equality ---------------------------------------------------------

namespace {

using Renaming = std::vector<std::pair<std::string, std::string>>;

bool same_name(const std::string& a, const std::string& b, const Renaming* env) {
  if (env) {
    for (auto it = env->rbegin(); it != env->rend(); ++it) {
      const bool ha = it->first == a, hb = it->second == b;
      if (ha || hb) return ha && hb;
    }
  }
  return a == b;
}

bool term_eq(const Term& a, const Term& b, const Renaming* env) {
  const TermNode& x = a.node();
  const TermNode& y = b.node();
  if (x.kind != y.kind) return false;
  switch (x.kind) {
    case TermKind::var: return same_name(x.name, y.name, env) && x.sort == y.sort;
    case TermKind::one:
    case TermKind::zero: return true;
    case TermKind::constant: return x.name == y.name && x.args == y.args;
    case TermKind::literal: return x.name == y.name && x.factor == y.factor && *x.value == *y.value;
    case TermKind::add:
    case TermKind::sub:
    case TermKind::mul: return term_eq(x.lhs, y.lhs, env) && term_eq(x.rhs, y.rhs, env);
    case TermKind::adjoint: return term_eq(x.lhs, y.lhs, env);
    case TermKind::scalar_mul: return x.scalar == y.scalar && term_eq(x.lhs, y.lhs, env);
    case TermKind::fn_app: return x.name == y.name && x.params == y.params && term_eq(x.lhs, y.lhs, env);
    case TermKind::embed: return x.factor == y.factor && term_eq(x.lhs, y.lhs, env);
  }
  return false;
}

bool formula_eq(const Formula& a, const Formula& b, Renaming* env) {
  const FormulaNode& x = a.node();
  const FormulaNode& y = b.node();
  if (x.kind != y.kind) return false;
  switch (x.kind) {
    case FormulaKind::atomic: return term_eq(x.term, y.term, env);
    case FormulaKind::number: return x.number == y.number;
    case FormulaKind::conn: {
      if (x.conn != y.conn || x.params != y.params || x.children.size() != y.children.size()) return false;
      for (std::size_t i = 0; i < x.children.size(); ++i)
        if (!formula_eq(x.children[i], y.children[i], env)) return false;
      return true;
    }
    case FormulaKind::quant: {
      if (x.quant != y.quant || !(x.sort == y.sort)) return false;
      if (!env) return x.var == y.var && formula_eq(x.body(), y.body(), nullptr);
      env->emplace_back(x.var, y.var);
      bool r = formula_eq(x.body(), y.body(), env);
      env->pop_back();
      return r;
    }
  }
  return false;
}

}  // namespace

bool structurally_equal(const Term& a, const Term& b) { return term_eq(a, b, nullptr); }
bool structurally_equal(const Formula& a, const Formula& b) { return formula_eq(a, b, nullptr); }

bool alpha_equivalent(const Formula& a, const Formula& b) {
  Renaming env;
  return formula_eq(a, b, &env);
}

// ---- variables --------------------------------------------------------

namespace {

void add_var(VarSet& out, const std::string& name, const SortSpec& s) {
  auto [it, inserted] = out.emplace(name, s);
  if (!inserted && !(it->second == s))
    fail(ErrorKind::sort, "variable '" + name + "' used with sorts " + to_string(it->second) +
                              " and " + to_string(s));
}

void collect(const Term& t, VarSet& out) {
  const TermNode& n = t.node();
  if (n.kind == TermKind::var) add_var(out, n.name, n.sort);
  if (n.lhs) collect(n.lhs, out);
  if (n.rhs) collect(n.rhs, out);
}

void collect(const Formula& f, VarSet& out) {
  const FormulaNode& n = f.node();
  switch (n.kind) {
    case FormulaKind::atomic: collect(n.term, out); break;
    case FormulaKind::number: break;
    case FormulaKind::conn:
      for (const Formula& c : n.children) collect(c, out);
      break;
    case FormulaKind::quant: {
      VarSet inner;
      collect(n.body(), inner);
      for (const auto& [name, s] : inner) {
        if (name == n.var) {
          if (!(s == n.sort))
            fail(ErrorKind::sort, "variable '" + name + "' bound as " + to_string(n.sort) +
                                      " but used as " + to_string(s));
          continue;
        }
        add_var(out, name, s);
      }
      break;
    }
  }
}

}  // namespace

VarSet free_vars(const Term& t) {
  VarSet out;
  collect(t, out);
  return out;
}

VarSet free_vars(const Formula& phi) {
  VarSet out;
  collect(phi, out);
  return out;
}

// ---- amplification and self-adjointness -------------------------------

namespace {

std::optional<int> join_amp(std::optional<int> a, std::optional<int> b) {
  if (a && b && *a != *b)
    fail(ErrorKind::sort, "amplification mixing: M_" + std::to_string(*a) + " and M_" +
                              std::to_string(*b) + " terms combined without diag");
  return a ? a : b;
}

}  // namespace

std::optional<int> infer_amp(const Term& t) {
  const TermNode& n = t.node();
  switch (n.kind) {
    case TermKind::var: return n.sort.amp;
    case TermKind::one:
    case TermKind::zero: return std::nullopt;
    case TermKind::constant: return constant_amp(n.name, n.args);
    case TermKind::literal: return n.factor;
    case TermKind::add:
    case TermKind::sub:
    case TermKind::mul: return join_amp(infer_amp(n.lhs), infer_amp(n.rhs));
    case TermKind::adjoint:
    case TermKind::scalar_mul:
    case TermKind::fn_app: return infer_amp(n.lhs);
    case TermKind::embed: {
      auto a = infer_amp(n.lhs);
      if (!a) return std::nullopt;
      return *a * n.factor;
    }
  }
  return std::nullopt;
}

namespace {

// Noncommutative polynomial: monomial (list of atoms) -> coefficient.
using Poly = std::map<std::vector<std::string>, Complex>;

std::string serialize(const Poly& p);

Poly expand(const Term& t, bool adj) {
  const TermNode& n = t.node();
  auto atom = [](std::string s) { return Poly{{{std::move(s)}, Complex(1.0)}}; };
  switch (n.kind) {
    case TermKind::var:
      return atom(adj && !sa_like(n.sort) ? n.name + "'" : n.name);
    case TermKind::one: return Poly{{{}, Complex(1.0)}};
    case TermKind::zero: return {};
    case TermKind::constant: {
      std::vector<int> a = n.args;
      if (adj && n.name == "unit") std::swap(a[1], a[2]);
      std::string s = "$" + n.name;
      for (int v : a) s += "," + std::to_string(v);
      return atom(s);
    }
    case TermKind::literal: {
      bool herm = true;
      for (const Matrix& m : n.value->blocks()) herm = herm && m == m.adjoint();
      return atom("$" + n.name + (adj && !herm ? "'" : ""));
    }
    case TermKind::add:
    case TermKind::sub: {
      Poly out = expand(n.lhs, adj);
      const double sign = n.kind == TermKind::add ? 1.0 : -1.0;
      for (const auto& [m, c] : expand(n.rhs, adj)) out[m] += sign * c;
      return out;
    }
    case TermKind::mul: {
      Poly l = expand(adj ? n.rhs : n.lhs, adj);
      Poly r = expand(adj ? n.lhs : n.rhs, adj);
      Poly out;
      for (const auto& [ml, cl] : l)
        for (const auto& [mr, cr] : r) {
          std::vector<std::string> m = ml;
          m.insert(m.end(), mr.begin(), mr.end());
          out[m] += cl * cr;
        }
      return out;
    }
    case TermKind::adjoint: return expand(n.lhs, !adj);
    case TermKind::scalar_mul: {
      Poly out = expand(n.lhs, adj);
      const Complex c = adj ? std::conj(n.scalar) : n.scalar;
      for (auto& [m, v] : out) v *= c;
      return out;
    }
    case TermKind::fn_app: {
      std::string s = n.name + "{";
      for (double p : n.params) s += std::to_string(p) + ",";
      s += "}[" + serialize(expand(n.lhs, false)) + "]";
      if (adj && !make_function(n.name, n.params).real_valued) s += "'";
      return atom(s);
    }
    case TermKind::embed:
      return atom("diag" + std::to_string(n.factor) + "[" + serialize(expand(n.lhs, adj)) + "]");
  }
  return {};
}

std::string serialize(const Poly& p) {
  std::ostringstream os;
  os.precision(17);
  for (const auto& [m, c] : p) {
    if (std::abs(c) == 0.0) continue;
    os << '(' << c.real() << ',' << c.imag() << ')';
    for (const auto& a : m) os << '<' << a << '>';
    os << ';';
  }
  return os.str();
}

bool poly_equal(const Poly& a, const Poly& b) {
  auto covered = [](const Poly& x, const Poly& y) {
    for (const auto& [m, c] : x) {
      auto it = y.find(m);
      Complex d = it == y.end() ? Complex(0.0) : it->second;
      if (std::abs(c - d) > 1e-12 * std::max(1.0, std::abs(c))) return false;
    }
    return true;
  };
  return covered(a, b) && covered(b, a);
}

}  // namespace

bool is_self_adjoint_term(const Term& t) { return poly_equal(expand(t, false), expand(t, true)); }

// ---- sort checking ----------------------------------------------------

namespace {

struct Checker {
  const Signature& ambient;
  std::size_t quantifiers = 0;

  std::optional<int> term(const Term& t) {
    const TermNode& n = t.node();
    switch (n.kind) {
      case TermKind::var: validate(n.sort); return n.sort.amp;
      case TermKind::one:
      case TermKind::zero: return std::nullopt;
      case TermKind::constant: return constant_amp(n.name, n.args);
      case TermKind::literal:
        if (n.value->signature() != amplify(ambient, n.factor))
          fail(ErrorKind::structural, "constant $" + n.name + " has signature " +
                                          n.value->signature().str() + ", expected " +
                                          amplify(ambient, n.factor).str());
        return n.factor;
      case TermKind::add:
      case TermKind::sub:
      case TermKind::mul: {
        auto a = term(n.lhs);
        auto b = term(n.rhs);
        return join_amp(a, b);
      }
      case TermKind::adjoint:
      case TermKind::scalar_mul: return term(n.lhs);
      case TermKind::fn_app: {
        auto a = term(n.lhs);
        if (!is_self_adjoint_term(n.lhs))
          fail(ErrorKind::sort, "argument of " + n.name + "[...] is not self-adjoint-valued");
        return a;
      }
      case TermKind::embed: {
        auto a = term(n.lhs);
        if (!a) return std::nullopt;
        return *a * n.factor;
      }
    }
    return std::nullopt;
  }

  void formula(const Formula& f) {
    const FormulaNode& n = f.node();
    switch (n.kind) {
      case FormulaKind::atomic: term(n.term); break;
      case FormulaKind::number: break;
      case FormulaKind::conn:
        for (const Formula& c : n.children) formula(c);
        break;
      case FormulaKind::quant:
        validate(n.sort);
        ++quantifiers;
        formula(n.body());
        break;
    }
  }
};

}  // namespace

CheckedFormula check_sorts(const Formula& phi, const Signature& ambient) {
  Checker c{ambient};
  c.formula(phi);
  return CheckedFormula{phi, ambient, free_vars(phi), c.quantifiers};
}

// ---- bounds and moduli ------------------------------------------------

namespace {

bool is_gram(const TermNode& n) {
  if (n.kind != TermKind::mul) return false;
  const TermNode& l = n.lhs.node();
  const TermNode& r = n.rhs.node();
  return (l.kind == TermKind::adjoint && structurally_equal(l.lhs, n.rhs)) ||
         (r.kind == TermKind::adjoint && structurally_equal(r.lhs, n.lhs));
}

// Factor u of a Gram term u^*u or uu^*.
const Term& gram_factor(const TermNode& n) {
  const TermNode& l = n.lhs.node();
  return l.kind == TermKind::adjoint ? n.rhs : n.lhs;
}

Interval spectral_interval(const Term& t, const Signature& ambient) {
  const TermNode& n = t.node();
  const double b = term_bound(t, ambient);
  if (n.kind == TermKind::var &&
      (n.sort.constraint == Constraint::positive || n.sort.constraint == Constraint::projection))
    return {0.0, b};
  if (n.kind == TermKind::one) return {1.0, 1.0};
  if (is_gram(n)) return {0.0, b};
  return {-b, b};
}

int block_scale(const Term& t, const Signature& ambient) {
  return infer_amp(t).value_or(1) * ambient.max_block();
}

double term_lipschitz(const Term& t, const std::string& v, const Signature& ambient) {
  const TermNode& n = t.node();
  switch (n.kind) {
    case TermKind::var: return n.name == v ? 1.0 : 0.0;
    case TermKind::one:
    case TermKind::zero:
    case TermKind::constant:
    case TermKind::literal: return 0.0;
    case TermKind::add:
    case TermKind::sub: return term_lipschitz(n.lhs, v, ambient) + term_lipschitz(n.rhs, v, ambient);
    case TermKind::mul: {
      double l1 = term_lipschitz(n.lhs, v, ambient);
      double l2 = term_lipschitz(n.rhs, v, ambient);
      return l1 * term_bound(n.rhs, ambient) + term_bound(n.lhs, ambient) * l2;
    }
    case TermKind::adjoint:
    case TermKind::embed: return term_lipschitz(n.lhs, v, ambient);
    case TermKind::scalar_mul: return std::abs(n.scalar) * term_lipschitz(n.lhs, v, ambient);
    case TermKind::fn_app: {
      const double la = term_lipschitz(n.lhs, v, ambient);
      if (la == 0.0) return 0.0;
      // Lipschitz functions are Lipschitz in the Hilbert-Schmidt norm with the
      // same constant; sqrt(u^*u) is sqrt(2)-Lipschitz in u there.
      const double hs = std::sqrt(static_cast<double>(block_scale(n.lhs, ambient)));
      if (n.name == "sqrt" && is_gram(n.lhs.node())) {
        const double lu = term_lipschitz(gram_factor(n.lhs.node()), v, ambient);
        return std::sqrt(2.0) * hs * lu;
      }
      ScalarFunction f = make_function(n.name, n.params);
      Interval iv = spectral_interval(n.lhs, ambient);
      double lf = f.lipschitz_on(iv.lo, iv.hi);
      if (!std::isfinite(lf))
        fail(ErrorKind::modulus, n.name + " has no finite Lipschitz constant on its argument range");
      return lf * hs * la;
    }
  }
  return 0.0;
}

double formula_lipschitz(const Formula& f, const std::string& v, const Signature& ambient) {
  const FormulaNode& n = f.node();
  switch (n.kind) {
    case FormulaKind::atomic: return term_lipschitz(n.term, v, ambient);
    case FormulaKind::number: return 0.0;
    case FormulaKind::conn: {
      double acc = 0.0;
      const bool lattice = n.conn == Connective::max || n.conn == Connective::min;
      for (std::size_t i = 0; i < n.children.size(); ++i) {
        double l = formula_lipschitz(n.children[i], v, ambient);
        if (l == 0.0) continue;
        double c = connective_lipschitz(n.conn, n.params, i);
        if (!std::isfinite(c))
          fail(ErrorKind::modulus, std::string(info(n.conn).name) + " is unbounded on its declared range");
        acc = lattice ? std::max(acc, c * l) : acc + c * l;
      }
      return acc;
    }
    case FormulaKind::quant:
      if (n.var == v) return 0.0;
      return formula_lipschitz(n.body(), v, ambient);
  }
  return 0.0;
}

}  // namespace

double term_bound(const Term& t, const Signature& ambient) {
  const TermNode& n = t.node();
  switch (n.kind) {
    case TermKind::var: return n.sort.radius;
    case TermKind::one: return 1.0;
    case TermKind::zero: return 0.0;
    case TermKind::constant: return n.name == "omega" ? n.args[0] : 1.0;
    case TermKind::literal: return op_norm(*n.value);
    case TermKind::add:
    case TermKind::sub: return term_bound(n.lhs, ambient) + term_bound(n.rhs, ambient);
    case TermKind::mul: return term_bound(n.lhs, ambient) * term_bound(n.rhs, ambient);
    case TermKind::adjoint:
    case TermKind::embed: return term_bound(n.lhs, ambient);
    case TermKind::scalar_mul: return std::abs(n.scalar) * term_bound(n.lhs, ambient);
    case TermKind::fn_app: {
      Interval iv = spectral_interval(n.lhs, ambient);
      return make_function(n.name, n.params).sup_abs_on(iv.lo, iv.hi);
    }
  }
  return 0.0;
}

double lipschitz_modulus(const Formula& phi, const std::string& var, const Signature& ambient) {
  return formula_lipschitz(phi, var, ambient);
}

// ---- substitution -----------------------------------------------------

bool satisfies(const Element& a, const SortSpec& s, const Signature& ambient, double tol) {
  if (a.signature() != amplify(ambient, s.amp)) return false;
  if (op_norm(a) > s.radius * (1 + tol) + tol) return false;
  if (constraint_defect(a, s.constraint) > tol * std::max(1.0, s.radius)) return false;
  if (s.scalar && distance(a, tensor_scalar(scalar_part(a, s.amp), ambient)) > tol) return false;
  return true;
}

namespace {

Term subst_term(const Term& t, const std::string& v, const Term& lit) {
  const TermNode& n = t.node();
  if (n.kind == TermKind::var) return n.name == v ? lit : t;
  if (!n.lhs) return t;
  TermNode copy = n;
  copy.lhs = subst_term(n.lhs, v, lit);
  if (n.rhs) copy.rhs = subst_term(n.rhs, v, lit);
  return make(std::move(copy));
}

Formula subst_formula(const Formula& f, const std::string& v, const Term& lit) {
  const FormulaNode& n = f.node();
  switch (n.kind) {
    case FormulaKind::atomic: return Formula::atomic(subst_term(n.term, v, lit));
    case FormulaKind::number: return f;
    case FormulaKind::conn: {
      std::vector<Formula> ch;
      for (const Formula& c : n.children) ch.push_back(subst_formula(c, v, lit));
      return Formula::conn(n.conn, std::move(ch), n.params);
    }
    case FormulaKind::quant:
      if (n.var == v) return f;
      return Formula::quant(n.quant, n.var, n.sort, subst_formula(n.body(), v, lit));
  }
  return f;
}

Signature base_signature(const Signature& sig, int amp) {
  std::vector<int> b;
  for (int n : sig.blocks()) {
    if (n % amp != 0) fail(ErrorKind::structural, "value is not in an amplification by " + std::to_string(amp));
    b.push_back(n / amp);
  }
  return Signature(std::move(b));
}

}  // namespace

Formula substitute(const Formula& phi, const std::string& var, const Element& value) {
  VarSet fv = free_vars(phi);
  auto it = fv.find(var);
  if (it == fv.end()) fail(ErrorKind::sort, "variable '" + var + "' is not free");
  const SortSpec& s = it->second;
  Signature ambient = base_signature(value.signature(), s.amp);
  if (!satisfies(value, s, ambient))
    fail(ErrorKind::sort, "value for '" + var + "' violates its sort " + to_string(s));
  return subst_formula(phi, var, Term::literal(var, value, s.amp));
}

Formula strip_quantifiers(const Formula& phi) {
  const FormulaNode& n = phi.node();
  switch (n.kind) {
    case FormulaKind::atomic:
    case FormulaKind::number: return phi;
    case FormulaKind::conn: {
      std::vector<Formula> ch;
      for (const Formula& c : n.children) ch.push_back(strip_quantifiers(c));
      return Formula::conn(n.conn, std::move(ch), n.params);
    }
    case FormulaKind::quant: return strip_quantifiers(n.body());
  }
  return phi;
}

std::size_t count_quantifiers(const Formula& phi) {
  const FormulaNode& n = phi.node();
  std::size_t k = n.kind == FormulaKind::quant ? 1 : 0;
  for (const Formula& c : n.children) k += count_quantifiers(c);
  return k;
}

}  // namespace cstarlogic
