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

#include <complex>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "cstarlogic/error.hpp"

namespace cstarlogic {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;

// Direct sum M_{n_1} + ... + M_{n_k}.
class Signature {
 public:
  Signature() : blocks_{1} {}
  explicit Signature(std::vector<int> blocks);

  // "2" or "2,2,1"; throws parse error naming the bad token.
  static Signature parse(std::string_view text);

  std::span<const int> blocks() const { return blocks_; }
  int block(std::size_t i) const { return blocks_[i]; }
  std::size_t size() const { return blocks_.size(); }
  int max_block() const;
  // Sum of n_i^2.
  int dimension() const;
  std::string str() const;

  bool operator==(const Signature&) const = default;
  auto operator<=>(const Signature&) const = default;

 private:
  std::vector<int> blocks_;
};

Signature amplify(const Signature& sig, int m);

enum class Constraint { none, self_adjoint, positive, projection, unitary, partial_isometry };

std::string_view to_string(Constraint c);
// DSL kind keyword: ball, sa, pos, proj, unit, pisom.
std::string_view keyword(Constraint c);
Constraint constraint_from_keyword(std::string_view kw);

class Element {
 public:
  Element() = default;
  Element(Signature sig, std::vector<Matrix> blocks);

  static Element zero(const Signature& sig);
  static Element identity(const Signature& sig);
  // Same matrix in every block is not meaningful in general; this builds
  // from a single block for one-block signatures.
  static Element from_matrix(const Matrix& m);

  const Signature& signature() const { return sig_; }
  std::span<const Matrix> blocks() const { return blocks_; }
  const Matrix& block(std::size_t i) const { return blocks_[i]; }
  Matrix& block(std::size_t i) { return blocks_[i]; }

  // Bit-level equality.
  bool operator==(const Element& other) const;

 private:
  Signature sig_;
  std::vector<Matrix> blocks_;
};

enum class ArithKind { add, sub, mul };

Element arith(const Element& a, const Element& b, ArithKind kind);
Element adjoint(const Element& a);
Element scale(Complex lambda, const Element& a);

Element operator+(const Element& a, const Element& b);
Element operator-(const Element& a, const Element& b);
Element operator*(const Element& a, const Element& b);
Element operator*(Complex lambda, const Element& a);

double op_norm(const Element& a);
double op_norm(const Matrix& m);
double distance(const Element& a, const Element& b);

// a (x) 1_m laid out as kron(1_m, a) per block.
Element embed_diag(const Element& a, int m);

// Scalar matrices: 1_A (x) c in M_m(A), laid out as kron(c, 1_{n_i}) per block.
Element tensor_scalar(const Matrix& c, const Signature& ambient);
// Normalized partial trace over the A factor of an element of M_m(ambient).
Matrix scalar_part(const Element& a, int m);

// Exact retraction of each block onto the constraint set, then ball scaling.
Element retract(const Element& a, Constraint c, double radius);
// Constraint part of retract, applied to one block, no ball scaling.
Matrix constrain_block(const Matrix& m, Constraint c);
// How far a is from satisfying the constraint (0 for exact members).
double constraint_defect(const Element& a, Constraint c);

Element sample_ball(const Signature& sig, double radius, Constraint c, std::uint64_t seed);

struct Interval {
  double lo;
  double hi;
  bool contains(double t, double tol = 0.0) const { return t >= lo - tol && t <= hi + tol; }
};

struct ScalarFunction {
  std::string id;
  std::function<Complex(Complex)> fn;
  // Real interval domain; when complex_domain is set the function also
  // accepts non-real spectrum (e.g. abs on normal elements).
  Interval domain;
  bool complex_domain = false;
  // Lipschitz constant on [lo, hi] (subset of the domain); may be +inf.
  std::function<double(double, double)> lipschitz_on;
  bool real_valued = true;
  bool zero_preserving = true;

  double lipschitz() const { return lipschitz_on(domain.lo, domain.hi); }
  Complex operator()(Complex t) const { return fn(t); }
  // Largest |f| on [lo, hi]; the registered functions are monotone or |t|-like
  // so endpoints (and 0) suffice.
  double sup_abs_on(double lo, double hi) const;
};

// Registered functions: sqrt, abs, pos, neg, cut{d}, ramp{a,b}, expi.
ScalarFunction make_function(std::string_view name, std::span<const double> params = {});
bool is_function_name(std::string_view name);
std::size_t function_param_count(std::string_view name);

enum class Intent { general, self_adjoint };

Element apply_scalar_function(const Element& a, const ScalarFunction& f,
                              Intent intent = Intent::general);

std::vector<std::vector<Complex>> spectrum(const Element& a);

struct Polar {
  Element v;
  Element pos;
};
Polar polar(const Element& a);

bool is_normal(const Element& a, double tol = 1e-9);

}  // namespace cstarlogic
