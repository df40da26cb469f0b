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


#include <cmath>

#include "doctest.h"
#include "support.hpp"

#include "cstarlogic/evaluator.hpp"
#include "cstarlogic/logic.hpp"
#include "cstarlogic/parser.hpp"

using namespace cstarlogic;
using csltest::Gen;

namespace {

ErrorKind kind_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  return ErrorKind::io;  // sentinel: tests never expect io here
}

}  // namespace

TEST_SUITE("logic") {
  TEST_CASE("connectives evaluate pointwise") {
    CHECK(apply_connective(Connective::max, {}, {0.1, 0.7, 0.3}) == 0.7);
    CHECK(apply_connective(Connective::min, {}, {0.1, 0.7, 0.3}) == 0.1);
    CHECK(apply_connective(Connective::dotminus, {}, {0.2, 0.5}) == 0.0);
    CHECK(apply_connective(Connective::dotminus, {}, {0.5, 0.2}) == doctest::Approx(0.3));
    CHECK(apply_connective(Connective::abs, {}, {-2.5}) == 2.5);
    CHECK(apply_connective(Connective::mul, {-3}, {2}) == -6);
    CHECK(apply_connective(Connective::sqrt, {0.0, 4.0}, {9.0}) == 2.0);
    CHECK(apply_connective(Connective::fproj, {0.2}, {0.16}) == doctest::Approx(1 - std::sqrt(1 - 0.64)));
    // clamped at the parameter
    CHECK(apply_connective(Connective::fproj, {0.2}, {0.5}) == doctest::Approx(1 - std::sqrt(0.2)));
  }

  TEST_CASE("connective Lipschitz constants bound difference quotients") {
    Gen g(21);
    struct Case {
      Connective c;
      std::vector<double> p;
      std::size_t arity;
    };
    const std::vector<Case> cases = {
        {Connective::max, {}, 3}, {Connective::min, {}, 2},    {Connective::add, {}, 2},
        {Connective::sub, {}, 2}, {Connective::dotminus, {}, 2}, {Connective::abs, {}, 1},
        {Connective::mul, {-1.5}, 1}, {Connective::sq, {-1, 2}, 1}, {Connective::sqrt, {0.1, 2}, 1},
        {Connective::fproj, {0.2}, 1}};
    for (const Case& k : cases)
      for (std::size_t i = 0; i < k.arity; ++i) {
        const double lip = connective_lipschitz(k.c, k.p, i);
        for (int t = 0; t < 500; ++t) {
          std::vector<double> a(k.arity), b;
          for (double& v : a) v = g.uniform(-3, 3);
          b = a;
          b[i] += g.uniform(-0.5, 0.5);
          const double d = std::abs(apply_connective(k.c, k.p, a) - apply_connective(k.c, k.p, b));
          CHECK(d <= lip * std::abs(a[i] - b[i]) + 1e-12);
          const int pol = connective_polarity(k.c, k.p, i);
          if (pol != 0 && b[i] > a[i]) CHECK(pol * (apply_connective(k.c, k.p, b) - apply_connective(k.c, k.p, a)) >= -1e-12);
        }
      }
  }

  TEST_CASE("connective parameters are validated") {
    CHECK(kind_of([] { Formula::conn(Connective::fproj, {Formula::number(0)}, {0.3}); }) == ErrorKind::precondition);
    CHECK(kind_of([] { Formula::conn(Connective::sqrt, {Formula::number(0)}, {-1, 1}); }) == ErrorKind::precondition);
    CHECK(kind_of([] { Formula::conn(Connective::add, {Formula::number(0)}); }) != ErrorKind::io);
  }

  TEST_CASE("free variables and quantifier counting") {
    const Formula f = parse("free a:pos(1). sup x:ball(1). inf y:unit(1). norm(x*a - y)");
    const VarSet fv = free_vars(f);
    REQUIRE(fv.size() == 1);
    CHECK(fv.begin()->first == "a");
    CHECK(fv.begin()->second.constraint == Constraint::positive);
    CHECK(count_quantifiers(f) == 2);
    const Formula s = strip_quantifiers(f);
    CHECK(count_quantifiers(s) == 0);
    CHECK(free_vars(s).size() == 3);
  }

  TEST_CASE("alpha equivalence ignores bound names only") {
    const Formula a = parse("sup x:ball(1). inf y:ball(2). norm(x*y)");
    const Formula b = parse("sup p:ball(1). inf q:ball(2). norm(p*q)");
    const Formula c = parse("sup p:ball(1). inf q:ball(2). norm(q*p)");
    const Formula d = parse("sup p:ball(1). inf q:ball(3). norm(p*q)");
    CHECK(alpha_equivalent(a, b));
    CHECK(!structurally_equal(a, b));
    CHECK(!alpha_equivalent(a, c));
    CHECK(!alpha_equivalent(a, d));
    CHECK(!alpha_equivalent(parse("free u:ball(1). norm(u)"), parse("free v:ball(1). norm(v)")));
  }

  TEST_CASE("substitution replaces free occurrences only") {
    const Signature sig({2});
    const Formula f = parse("free a:ball(1). sup x:ball(1). norm(x - a)");
    const Formula g = substitute(f, "a", Element::identity(sig));
    CHECK(free_vars(g).empty());
    // A bound variable with the same name shadows.
    const Formula h = parse("free a:ball(1). norm(a) + sup a:ball(1). norm(a)");
    const Formula hs = substitute(h, "a", Element::zero(sig));
    CHECK(free_vars(hs).empty());
    EvalConfig cfg;
    cfg.restarts = 4;
    cfg.iterations = 50;
    CHECK(eval(hs, sig, {}, cfg).value == doctest::Approx(1.0).epsilon(1e-6));
  }

  TEST_CASE("sort checking") {
    const Signature sig({2});
    CHECK(kind_of([&] { check_sorts(parse("free x:ball(1). norm(pos[x])"), sig); }) == ErrorKind::sort);
    CHECK(kind_of([&] { check_sorts(parse("free x:ball(1). norm(x*$unit(2,1,1))"), sig); }) == ErrorKind::sort);
    CHECK(kind_of([&] { check_sorts(parse("free x:ball(1, amp=2). norm(x*$unit(2,1,1))"), sig); }) == ErrorKind::io);
    CHECK(kind_of([&] { check_sorts(parse("free x:sa(1). norm(pos[x])"), sig); }) == ErrorKind::io);
    CHECK(kind_of([&] { check_sorts(parse("free x:ball(1). norm(sqrt[x^* * x])"), sig); }) == ErrorKind::io);
    const CheckedFormula c = check_sorts(parse("sup x:ball(1). inf y:ball(1). norm(x*y)"), sig);
    CHECK(c.quantifiers == 2);
    CHECK(c.free.empty());
    SortSpec bad;
    bad.radius = -1;
    CHECK(kind_of([&] { validate(bad); }) != ErrorKind::io);
  }

  TEST_CASE("syntactic self-adjointness") {
    CHECK(is_self_adjoint_term(parse("free x:ball(2). norm(x*x^* + x^* * x)")->term));
    CHECK(is_self_adjoint_term(parse("free x:ball(2). free y:ball(1). norm(x*y + y^* * x^*)")->term));
    CHECK(!is_self_adjoint_term(parse("free x:ball(2). norm(x*x)")->term));
  }

  TEST_CASE("Lipschitz moduli of simple formulas") {
    const Signature sig({2});
    const Formula f = parse("free x:ball(2). free y:ball(1). norm(x*y - y*x) + mul{3}(norm(x^*))");
    CHECK(lipschitz_modulus(f, "x", sig) == doctest::Approx(5.0));
    CHECK(lipschitz_modulus(f, "y", sig) == doctest::Approx(4.0));
    CHECK(term_bound(parse("free x:ball(2). norm(x*x + 3*one)")->term, sig) == doctest::Approx(7.0));
    CHECK(kind_of([&] { lipschitz_modulus(parse("free x:pos(1). norm(sqrt[x])"), "x", sig); }) == ErrorKind::modulus);
  }

  TEST_CASE("moduli bound observed variation") {
    // Random perturbations of quantifier-free bodies; |d phi| <= L |d x|.
    const Signature sig({2, 1});
    const char* texts[] = {
        "free x:ball(1). free y:ball(1). norm(x*y - y*x)",
        "free x:sa(1). free y:pos(2). max(norm(x*y*x), norm(pos[x] - y)) -. 0.1",
        "free x:unit(1). free y:proj(1). abs(norm(x*y*x^* - y) - norm(y*x - x*y))",
        "free x:ball(1). free y:ball(1). sq{-2,2}(norm(x*y)) + mul{0.5}(norm(abs[x + x^*] - y))",
    };
    Gen g(22);
    for (const char* t : texts) {
      const Formula f = parse(t);
      for (const auto& [name, sort] : free_vars(f)) {
        const double lip = lipschitz_modulus(f, name, sig);
        for (int k = 0; k < 200; ++k) {
          Assignment a;
          for (const auto& [n, s] : free_vars(f)) a[n] = sample_sort(s, sig, static_cast<std::uint64_t>(g.integer(0, 1 << 30)));
          Assignment b = a;
          const double eps = k % 2 ? 1e-3 : 1.0;
          b[name] = project_to_sort(a[name] + scale(eps, g.element(sig)), sort, sig);
          const double d = std::abs(evaluate(f, sig, a) - evaluate(f, sig, b));
          CHECK(d <= lip * distance(a[name], b[name]) + 1e-9);
        }
      }
    }
  }

  TEST_CASE("satisfies checks norm, constraint and scalar form") {
    const Signature sig({2});
    SortSpec s;
    s.radius = 1.0;
    s.constraint = Constraint::projection;
    Matrix p = Matrix::Zero(2, 2);
    p(0, 0) = 1;
    CHECK(satisfies(Element::from_matrix(p), s, sig));
    CHECK(!satisfies(Element::from_matrix(2.0 * p), s, sig));
    SortSpec sc;
    sc.scalar = true;
    CHECK(satisfies(scale(0.5, Element::identity(sig)), sc, sig));
    CHECK(!satisfies(Element::from_matrix(0.5 * p), sc, sig));
  }
}
