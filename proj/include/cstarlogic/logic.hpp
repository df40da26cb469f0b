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

#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "cstarlogic/algebra.hpp"

namespace cstarlogic {

struct SortSpec {
  double radius = 1.0;
  Constraint constraint = Constraint::none;
  int amp = 1;  // element lives in M_amp(A)
  // Element of the form 1_A (x) c with c in M_amp(C); models quantification
  // over scalars (and scalar matrices) inside the same mechanism.
  bool scalar = false;

  bool operator==(const SortSpec&) const = default;
};

void validate(const SortSpec& s);
std::string to_string(const SortSpec& s);

enum class TermKind { var, one, zero, constant, literal, add, sub, mul, adjoint, scalar_mul, fn_app, embed };

struct TermNode;

class Term {
 public:
  Term() = default;
  explicit Term(std::shared_ptr<const TermNode> node) : node_(std::move(node)) {}

  static Term var(std::string name, SortSpec sort);
  static Term one();
  static Term zero();
  // Built-in constants: unit(m,j,k), swap(l), omega(l).
  static Term constant(std::string name, std::vector<int> args);
  // A fixed element (produced by substitution); amp as in the variable's sort.
  static Term literal(std::string name, Element value, int amp);
  static Term add(Term a, Term b);
  static Term sub(Term a, Term b);
  static Term mul(Term a, Term b);
  static Term adjoint(Term a);
  static Term scalar_mul(Complex c, Term a);
  static Term fn(std::string name, std::vector<double> params, Term arg);
  static Term embed(int m, Term a);

  const TermNode& node() const { return *node_; }
  const TermNode* operator->() const { return node_.get(); }
  explicit operator bool() const { return static_cast<bool>(node_); }

 private:
  std::shared_ptr<const TermNode> node_;
};

Term operator+(Term a, Term b);
Term operator-(Term a, Term b);
Term operator*(Term a, Term b);
Term operator*(Complex c, Term a);

struct TermNode {
  TermKind kind;
  std::string name{};  // var, constant, literal, fn_app
  SortSpec sort{};     // var
  std::vector<int> args{};       // constant
  std::vector<double> params{};  // fn_app
  Complex scalar{1.0, 0.0};    // scalar_mul
  int factor = 1;              // embed; amp of a literal
  std::shared_ptr<const Element> value{};  // literal
  Term lhs{};
  Term rhs{};
};

bool is_constant_name(std::string_view name);
// Amplification level of a built-in constant.
int constant_amp(std::string_view name, const std::vector<int>& args);
// Value in M_amp(A) for the given ambient signature.
Element constant_value(std::string_view name, const std::vector<int>& args, const Signature& ambient);

enum class Connective { max, min, add, sub, dotminus, abs, mul, sq, sqrt, fproj };
enum class Quantifier { sup, inf };
enum class FormulaKind { atomic, number, conn, quant };

struct ConnectiveInfo {
  Connective id;
  std::string_view name;   // keyword or operator token
  int arity;               // -1: variadic (>= 1)
  std::size_t params;
  bool infix;
};
const ConnectiveInfo& info(Connective c);
std::optional<Connective> connective_from_name(std::string_view name);
double apply_connective(Connective c, const std::vector<double>& params, const std::vector<double>& args);
// Lipschitz constant of the connective in argument i.
double connective_lipschitz(Connective c, const std::vector<double>& params, std::size_t i);
// +1 nondecreasing, -1 nonincreasing, 0 neither, in argument i.
int connective_polarity(Connective c, const std::vector<double>& params, std::size_t i);

struct FormulaNode;

class Formula {
 public:
  Formula() = default;
  explicit Formula(std::shared_ptr<const FormulaNode> node) : node_(std::move(node)) {}

  static Formula atomic(Term t);
  static Formula number(double v);
  static Formula conn(Connective c, std::vector<Formula> children, std::vector<double> params = {});
  static Formula quant(Quantifier q, std::string var, SortSpec sort, Formula body);
  static Formula sup(std::string var, SortSpec sort, Formula body);
  static Formula inf(std::string var, SortSpec sort, Formula body);

  const FormulaNode& node() const { return *node_; }
  const FormulaNode* operator->() const { return node_.get(); }
  const FormulaNode* get() const { return node_.get(); }
  explicit operator bool() const { return static_cast<bool>(node_); }

 private:
  std::shared_ptr<const FormulaNode> node_;
};

struct FormulaNode {
  FormulaKind kind;
  Term term{};       // atomic
  double number = 0.0;
  Connective conn = Connective::max;
  std::vector<double> params{};
  std::vector<Formula> children{};  // conn args; quant body is children[0]
  Quantifier quant = Quantifier::sup;
  std::string var{};
  SortSpec sort{};

  const Formula& body() const { return children.front(); }
};

// Exact structural equality (names included).
bool structurally_equal(const Term& a, const Term& b);
bool structurally_equal(const Formula& a, const Formula& b);
// Equality up to renaming of bound variables.
bool alpha_equivalent(const Formula& a, const Formula& b);

using VarSet = std::map<std::string, SortSpec>;

VarSet free_vars(const Formula& phi);
VarSet free_vars(const Term& t);

// nullopt for amplification-polymorphic terms (one, zero and their combinations).
std::optional<int> infer_amp(const Term& t);

// Syntactic self-adjointness: t and t^* expand to the same noncommutative
// polynomial over the atoms.
bool is_self_adjoint_term(const Term& t);

struct CheckedFormula {
  Formula formula;
  Signature ambient;
  VarSet free;
  std::size_t quantifiers = 0;
};

CheckedFormula check_sorts(const Formula& phi, const Signature& ambient);

// Upper bound for the operator norm of t when every variable ranges over its sort.
double term_bound(const Term& t, const Signature& ambient);

double lipschitz_modulus(const Formula& phi, const std::string& var, const Signature& ambient);

Formula substitute(const Formula& phi, const std::string& var, const Element& value);

// Drops every quantifier; bound variables become free.
Formula strip_quantifiers(const Formula& phi);

std::size_t count_quantifiers(const Formula& phi);

// Element satisfies the sort (norm, constraint, scalar form) within tol.
bool satisfies(const Element& a, const SortSpec& s, const Signature& ambient, double tol = 1e-9);

}  // namespace cstarlogic
