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


#include <filesystem>
#include <fstream>
#include <set>

#include "doctest.h"
#include "json.hpp"
#include "support.hpp"

#include "cstarlogic/harness.hpp"
#include "cstarlogic/parser.hpp"

using namespace cstarlogic;
namespace fs = std::filesystem;

namespace {

ErrorKind kind_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  return ErrorKind::io;
}

EvalConfig small() {
  EvalConfig c;
  c.restarts = 4;
  c.iterations = 60;
  c.seed = 11;
  return c;
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("cstarlogic_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::vector<Sentence> sentences(std::initializer_list<const char*> refs) {
  std::vector<Sentence> out;
  for (const char* r : refs) out.push_back(catalog_sentence(r));
  return out;
}

}  // namespace

TEST_SUITE("harness") {
  TEST_CASE("sentence sources") {
    const Sentence s = catalog_sentence("AL:2");
    CHECK(s.name == "AL:2");
    CHECK(s.params == std::vector<double>{2});
    CHECK(kind_of([] { catalog_sentence("mvn"); }) == ErrorKind::precondition);
    CHECK(kind_of([] { catalog_sentence("nosuch"); }) == ErrorKind::unknown_name);
    const Sentence f = file_sentence(CSL_TEST_DATA "/abelian.fml");
    CHECK(f.name == "abelian");
    CHECK(kind_of([] { file_sentence(CSL_TEST_DATA "/no_such.fml"); }) == ErrorKind::io);
    CHECK(kind_of([] { file_sentence(CSL_TEST_DATA "/broken.fml"); }) == ErrorKind::parse);
  }

  TEST_CASE("battery records are sorted and replayable") {
    const Report r = run_battery(sentences({"projectionless_u", "abelian"}),
                                 {Signature::parse("2"), Signature::parse("1,1"), Signature::parse("2")}, small());
    REQUIRE(r.records.size() == 4);  // duplicate signature dropped
    CHECK(r.records[0].sentence == "abelian");
    CHECK(r.records[0].signature == Signature::parse("1,1"));
    CHECK(r.records[3].sentence == "projectionless_u");
    for (const ReplayCheck& c : verify_report(r)) {
      CHECK(c.digest_ok);
      CHECK(c.value_ok);
    }
  }

  TEST_CASE("reports round trip through JSON and validate") {
    Report r = run_battery(sentences({"abelian"}), {Signature::parse("2")}, small());
    r.probes.push_back(stability_probe("unitary", Signature({2}), {0.01}, 4, 1));
    const std::string text = report_json(r);
    CHECK(report_schema_errors(text).empty());
    const Report back = report_from_json(text);
    CHECK(report_json(back) == text);
    CHECK(verify_report(back).at(0).value_ok);

    auto j = nlohmann::json::parse(text);
    j["records"][0].erase("value");
    CHECK(!report_schema_errors(j.dump()).empty());
    CHECK(!report_schema_errors("[1, 2]").empty());
    CHECK(!report_schema_errors("{not json").empty());
  }

  TEST_CASE("tampered witnesses fail verification") {
    const Report r = run_battery(sentences({"abelian"}), {Signature::parse("2")}, small());
    auto j = nlohmann::json::parse(report_json(r));
    j["records"][0]["value"] = j["records"][0]["value"].get<double>() + 0.25;
    const auto checks = verify_report(report_from_json(j.dump()));
    CHECK(!checks.at(0).value_ok);
  }

  TEST_CASE("deterministic body ignores timing and workers") {
    EvalConfig a = small(), b = small();
    a.workers = 1;
    b.workers = 3;
    const auto s = sentences({"abelian", "trace_exists:1"});
    const std::vector<Signature> sigs{Signature::parse("2"), Signature::parse("2,1")};
    const std::string ja = report_json(run_battery(s, sigs, a), false);
    const std::string jb = report_json(run_battery(s, sigs, b), false);
    CHECK(ja == jb);
    CHECK(ja.find("wall_time") == std::string::npos);
  }

  TEST_CASE("cache hits return identical records") {
    const fs::path dir = scratch("cache");
    const auto s = sentences({"abelian"});
    const std::vector<Signature> sigs{Signature::parse("2")};
    const Report first = run_battery(s, sigs, small(), dir.string());
    CHECK(!first.records[0].cached);
    CHECK(std::distance(fs::directory_iterator(dir), fs::directory_iterator()) == 1);
    const Report second = run_battery(s, sigs, small(), dir.string());
    CHECK(second.records[0].cached);
    CHECK(report_json(first, false) == report_json(second, false));
    // a different seed is a different key
    EvalConfig c = small();
    c.seed = 12;
    CHECK(record_key(s[0].formula, sigs[0], c) != record_key(s[0].formula, sigs[0], small()));
    CHECK(!run_battery(s, sigs, c, dir.string()).records[0].cached);
    fs::remove_all(dir);
  }

  TEST_CASE("separation lists sentences that differ") {
    const Report r = separate(Signature::parse("1"), Signature::parse("2"), 0.05, small(), "",
                              {"abelian", "projectionless_u", "trace_exists:1"});
    REQUIRE(r.separation.has_value());
    const Separation& s = *r.separation;
    CHECK(s.threshold == 0.05);
    std::set<std::string> names;
    for (const SeparationEntry& e : s.entries) {
      names.insert(e.sentence);
      CHECK(std::abs(e.value_a - e.value_b) > 0.05);
    }
    CHECK(names.count("abelian") == 1);
    CHECK(names.count("projectionless_u") == 1);
    CHECK(names.count("trace_exists:1") == 0);
    for (const SeparationEntry& e : s.entries)
      if (e.sentence == "abelian") {
        // both sides are lower bounds; the larger one is certified
        CHECK(!e.evidence_only);
        CHECK(e.direction_b == Direction::certified_lower);
      }
    CHECK(separate(Signature::parse("2"), Signature::parse("2"), 0.05, small(), "", {"abelian"})
              .separation->entries.empty());
  }

  TEST_CASE("tuple files") {
    std::ifstream in(CSL_TEST_DATA "/pair.json");
    const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    Signature sig;
    const auto t = read_tuple(text, &sig);
    CHECK(sig == Signature({2}));
    REQUIRE(t.size() == 2);
    CHECK(t[0].block(0)(0, 0) == Complex(1.0));
    Matrix m(2, 2);
    m << Complex(1, 2), 0.5, 0, -1;
    const Element e = Element::from_matrix(m);
    CHECK(element_from_json(element_json(e), Signature({2})) == e);
    CHECK(kind_of([] {
            Signature s;
            read_tuple("{\"signature\": [2], \"tuple\": [[[[1, 0]]]]}", &s);
          }) != ErrorKind::io);
  }
}
