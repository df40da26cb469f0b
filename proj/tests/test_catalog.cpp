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
#include <set>

#include "doctest.h"
#include "json.hpp"
#include "support.hpp"

#include "cstarlogic/catalog.hpp"
#include "cstarlogic/evaluator.hpp"
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
  return ErrorKind::io;
}

EvalConfig small(int restarts = 8, int iterations = 200) {
  EvalConfig c;
  c.restarts = restarts;
  c.iterations = iterations;
  c.seed = 5;
  return c;
}

double value(const char* ref, const char* sig, const EvalConfig& cfg = small()) {
  const EntryRef r = parse_entry_ref(ref);
  return eval(build_sentence(r.name, r.params), Signature::parse(sig), {}, cfg).value;
}

}  // namespace

TEST_SUITE("catalog") {
  TEST_CASE("every formula entry parses, prints and sort-checks") {
    for (const CatalogEntry& e : catalog_table()) {
      CAPTURE(e.name);
      if (e.kind == EntryKind::map_predicate) {
        CHECK(e.dsl.empty());
        CHECK(e.map_modulus > 0);
        CHECK(kind_of([&] { build_sentence(e.name, e.params); }) == ErrorKind::precondition);
        continue;
      }
      const Formula f = build_sentence(e.name, e.params);
      CHECK(alpha_equivalent(parse(print(f)), f));
      CHECK(alpha_equivalent(parse(e.dsl), f));
      CHECK(e.closed == free_vars(f).empty());
      CHECK(!e.anchor.empty());
      CHECK(!e.notes.empty());
      CHECK_NOTHROW(check_sorts(f, Signature::parse("2,1")));
    }
  }

  TEST_CASE("entry references") {
    const EntryRef r = parse_entry_ref("popa:1:1");
    CHECK(r.name == "popa");
    CHECK(r.params == std::vector<double>{1, 1});
    CHECK(parse_entry_ref("mvn").params.empty());
    CHECK(entry_ref("AL", std::vector<double>{2}) == "AL:2");
    CHECK(entry_ref("cuntz_dom", std::vector<double>{0.1}) == "cuntz_dom:0.1");
    CHECK(kind_of([] { parse_entry_ref("AL:x"); }) == ErrorKind::parse);
    CHECK(kind_of([] { catalog_entry("nosuch"); }) == ErrorKind::unknown_name);
    CHECK(kind_of([] { catalog_entry("AL", std::vector<double>{0}); }) == ErrorKind::precondition);
    CHECK(kind_of([] { catalog_entry("AL", std::vector<double>{1.5}); }) == ErrorKind::precondition);
    CHECK(catalog_entry("AL").params == std::vector<double>{2});
  }

  TEST_CASE("catalog JSON lists every family") {
    const auto j = nlohmann::json::parse(catalog_json(catalog_table()));
    REQUIRE(j.is_array());
    std::set<std::string> names;
    for (const auto& e : j) {
      names.insert(e.at("name").get<std::string>());
      CHECK(e.contains("dsl"));
      CHECK(e.contains("anchor"));
    }
    for (const std::string& n : catalog_names()) CHECK(names.count(n) == 1);
  }

  TEST_CASE("family texts scale with their parameters") {
    // one unitary per term in dixmier:n
    CHECK(count_quantifiers(build_sentence("dixmier", std::vector<double>{4})) == 6);
    CHECK(count_quantifiers(build_sentence("dixmier", std::vector<double>{9})) == 11);
    CHECK(count_quantifiers(build_sentence("AL", std::vector<double>{2})) == 4);
    CHECK(count_quantifiers(build_sentence("AL", std::vector<double>{3})) == 6);
    CHECK(build_text("cuntz_dom", std::vector<double>{0.25}).find("ball(2)") != std::string::npos);
  }

  TEST_CASE("values on small algebras") {
    CHECK(value("abelian", "1,1") <= 1e-12);
    CHECK(value("abelian", "2") >= 1.9);
    CHECK(value("abelian", "2") <= 2.0 + 1e-12);
    CHECK(value("projectionless_u", "1") <= 1e-12);
    CHECK(value("projectionless_u", "2") >= 0.99);
    CHECK(value("projectionless_u", "2") <= 1.0 + 1e-12);
    CHECK(value("trace_exists:1", "3") <= 1.0 + 1e-12);
    for (int i = 1; i <= 7; ++i) {
      const std::string ref = "cstar_axiom:" + std::to_string(i);
      CHECK_MESSAGE(value(ref.c_str(), "2,1", small(4, 100)) <= 1e-9, ref);
    }
  }

  TEST_CASE("dixmier averages vanish at Weyl unitaries") {
    Gen g(51);
    const Formula f = build_sentence("dixmier", std::vector<double>{4});
    const Signature sig({2});
    const auto w = csltest::weyl_unitaries(2);
    for (int t = 0; t < 20; ++t) {
      const Element a = g.element(sig);
      std::vector<Witness> ws{{0, "a", a}};
      for (std::size_t i = 0; i < 4; ++i) ws.push_back({i + 1, "u" + std::to_string(i + 1), Element::from_matrix(w[i])});
      const Complex tr = a.block(0).trace() / 2.0;
      ws.push_back({5, "mu", scale(tr, Element::identity(sig))});
      CHECK(replay(f, sig, ws) <= 1e-12);
    }
  }

  TEST_CASE("mvn separates projections by rank") {
    Gen g(52);
    const Formula f = build_sentence("mvn");
    const Signature sig({3});
    EvalConfig c = small(16, 400);
    for (int t = 0; t < 4; ++t) {
      const int rp = g.integer(0, 3);
      int rq = g.integer(0, 3);
      const Element p = Element::from_matrix(g.projection(3, rp));
      const Element q = Element::from_matrix(g.projection(3, rq));
      const EvalResult r = eval(f, sig, {{"p", p}, {"q", q}}, c);
      CHECK(r.direction == Direction::certified_upper);
      if (rp != rq) CHECK(r.value >= 1.0 - 1e-9);  // |p - v*v| + |q - vv*| >= 1 when ranks differ
    }
  }

  TEST_CASE("spectrum_member measures distance to the spectrum") {
    const Formula f = build_sentence("spectrum_member");
    Matrix a = Matrix::Zero(2, 2);
    a(0, 0) = 0.2;
    a(1, 1) = 0.7;
    const Signature sig({2});
    for (double l : {0.2, 0.5, 0.9}) {
      Assignment as{{"a", Element::from_matrix(a)}, {"l", scale(l, Element::identity(sig))}};
      const double want = std::min(std::abs(l - 0.2), std::abs(l - 0.7)) / 2.0;
      const EvalResult r = eval(f, sig, as, small(8, 400));
      CHECK(r.value >= want - 1e-9);
      CHECK(r.value <= want + 1e-3);
    }
  }
}
