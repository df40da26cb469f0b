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


// Acceptance runner: one line per criterion, exit status 1 if any fails.
//   acceptance                 all criteria
//   acceptance --criterion N   a single one

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "support.hpp"

#include "cstarlogic/catalog.hpp"
#include "cstarlogic/cpmaps.hpp"
#include "cstarlogic/evaluator.hpp"
#include "cstarlogic/harness.hpp"
#include "cstarlogic/parser.hpp"
#include "cstarlogic/stability.hpp"

using namespace cstarlogic;
using csltest::Gen;
using csltest::ref_norm;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

EvalConfig config(int restarts, int iterations, std::uint64_t seed = 1) {
  EvalConfig c;
  c.restarts = restarts;
  c.iterations = iterations;
  c.seed = seed;
  return c;
}

Formula entry(const std::string& ref) {
  const EntryRef r = parse_entry_ref(ref);
  return build_sentence(r.name, r.params);
}

// 1. Norm identities on random elements.
Outcome c1() {
  Gen g(101);
  double worst = 0.0;
  int n = 0;
  for (int s = 0; s < 10; ++s) {
    const Signature sig = g.signature(4, 5);
    for (int t = 0; t < 1000; ++t, ++n) {
      const Element x = g.element(sig, std::pow(10.0, g.uniform(-3, 3)));
      const Element y = g.element(sig, std::pow(10.0, g.uniform(-3, 3)));
      const double nx = op_norm(x), ny = op_norm(y);
      worst = std::max(worst, std::abs(op_norm(adjoint(x) * x) - nx * nx) / (nx * nx));
      worst = std::max(worst, (op_norm(x * y) - nx * ny) / (nx * ny));
      worst = std::max(worst, (op_norm(x + y) - nx - ny) / (nx + ny));
      worst = std::max(worst, op_norm(adjoint(adjoint(x)) - x) / nx);
      worst = std::max(worst, std::abs(nx - ref_norm(x)) / nx);
    }
  }
  // The axiom sentences' bodies at random points.
  double axioms = 0.0;
  for (int i = 1; i <= 7; ++i) {
    const Formula body = strip_quantifiers(entry("cstar_axiom:" + std::to_string(i)));
    for (int t = 0; t < 100; ++t) {
      const Signature sig = g.signature(3, 4);
      Assignment a;
      for (const auto& [v, s] : free_vars(body)) a[v] = sample_sort(s, sig, static_cast<std::uint64_t>(g.integer(0, 1 << 30)));
      axioms = std::max(axioms, evaluate(body, sig, a));
    }
  }
  return {worst <= 1e-9 && axioms <= 1e-9,
          fmt("%d elements, worst relative violation %.2e, axiom bodies %.2e", n, worst, axioms)};
}

// 2. Commutator sentence.
Outcome c2() {
  const Formula f = entry("abelian");
  const EvalResult z = eval(f, Signature::parse("1,1,1"), {}, config(64, 400));
  const Signature m2({2});
  const EvalResult r = eval(f, m2, {}, config(500, 400));
  const double rep = replay(f, m2, r.witnesses);
  const bool ok = z.value <= 1e-9 && r.value >= 1.99 && r.direction == Direction::certified_lower && rep == r.value;
  return {ok, fmt("[1,1,1] %.2e, M_2 %.6f (%s), replay %.6f", z.value, r.value, std::string(to_string(r.direction)).c_str(), rep)};
}

// 3. Amitsur-Levitzki.
Outcome c3() {
  const Formula f = entry("AL:2");
  const Formula body = strip_quantifiers(f);
  const Signature m2({2});
  Gen g(103);
  double worst = 0.0;
  const VarSet vars = free_vars(body);
  for (int t = 0; t < 10000; ++t) {
    Assignment a;
    for (const auto& [v, s] : vars) a[v] = g.element(m2, g.uniform(0.0, 1.0));
    worst = std::max(worst, evaluate(body, m2, a));
  }
  const Signature m3({3});
  const EvalResult r = eval(f, m3, {}, config(64, 400));
  const double rep = replay(f, m3, r.witnesses);
  const bool ok = worst <= 1e-9 && r.value >= 1e-3 && r.direction == Direction::certified_lower && rep == r.value;
  return {ok, fmt("M_2 max over 10^4 tuples %.2e; M_3 %.4f (%s), replay %.4f", worst, r.value,
                  std::string(to_string(r.direction)).c_str(), rep)};
}

// 4. Projectionless sentence.
Outcome c4() {
  const Formula f = entry("projectionless_u");
  const EvalResult c = eval(f, Signature({1}), {}, config(64, 400));
  const EvalResult m = eval(f, Signature({2}), {}, config(64, 400));
  const bool ok = c.value <= 1e-9 && m.value >= 0.99 && m.direction == Direction::certified_lower &&
                  replay(f, Signature({2}), m.witnesses) == m.value;
  return {ok, fmt("C %.2e, M_2 %.6f", c.value, m.value)};
}

// 5. Rounding near-projections in M_4.
Outcome c5() {
  Gen g(105);
  const int n = 4;
  auto relation = [](const Matrix& a) { return ref_norm(Matrix(a * a - a)); };
  double worst_rel = 0.0, worst_slack = -1.0;
  int count = 0;
  for (double delta : {0.24, 0.1, 0.01, 1e-4}) {
    for (int t = 0; t < 1000; ++t) {
      const Matrix p = g.projection(n, g.integer(0, n));
      Matrix h = g.gaussian(n);
      h = ((h + h.adjoint()) / 2.0).eval();
      h /= ref_norm(h);
      // First crossing of the level delta along p + s h, then bisection.
      double lo = 0.0, hi = delta / 8;
      while (relation(p + hi * h) < delta) lo = hi, hi += delta / 8;
      for (int k = 0; k < 60; ++k) {
        const double mid = (lo + hi) / 2;
        const double v = relation(p + mid * h);
        if (v > delta) hi = mid;
        else if (v < 0.95 * delta) lo = mid;
        else { lo = hi = mid; break; }
      }
      const Matrix a = p + lo * h;
      const double d = relation(a);
      const Matrix r = round_projection(Element::from_matrix(a)).block(0);
      worst_rel = std::max({worst_rel, relation(r), ref_norm(Matrix(r - r.adjoint()))});
      const double bound = (1 - std::sqrt(1 - 4 * d)) / 2;
      worst_slack = std::max(worst_slack, ref_norm(Matrix(r - a)) - bound);
      ++count;
    }
  }
  return {worst_rel <= 1e-10 && worst_slack <= 1e-9,
          fmt("%d inputs, relation after rounding %.2e, max distance - bound %.2e", count, worst_rel, worst_slack)};
}

// 6. Averages over Weyl unitaries.
Outcome c6() {
  Gen g(106);
  double worst = 0.0, scalar_err = 0.0;
  for (int n : {2, 3, 4}) {
    const Signature sig({n});
    const Formula f = build_sentence("dixmier", std::vector<double>{static_cast<double>(n * n)});
    const auto w = csltest::weyl_unitaries(n);
    // rhs of the atomic term mu - average
    const Formula body = strip_quantifiers(f);
    const Term avg = body->term->rhs;
    for (int t = 0; t < 100; ++t) {
      const Element a = g.element(sig, g.uniform(0.0, 1.0));
      const Complex tr = a.block(0).trace() / static_cast<double>(n);
      std::vector<Witness> ws{{0, "a", a}};
      Assignment as{{"a", a}};
      for (std::size_t i = 0; i < w.size(); ++i) {
        const std::string u = "u" + std::to_string(i + 1);
        ws.push_back({i + 1, u, Element::from_matrix(w[i])});
        as[u] = Element::from_matrix(w[i]);
      }
      ws.push_back({w.size() + 1, "mu", scale(tr, Element::identity(sig))});
      worst = std::max(worst, replay(f, sig, ws));
      const Matrix m = evaluate(avg, sig, as).block(0);
      scalar_err = std::max(scalar_err, ref_norm(Matrix(m - tr * Matrix::Identity(n, n))));
    }
  }
  return {worst <= 1e-9 && scalar_err <= 1e-6,
          fmt("n = 2, 3, 4: value at Weyl witnesses %.2e, recovered scalar vs trace %.2e", worst, scalar_err)};
}

// 7. Murray-von Neumann equivalence against ranks.
Outcome c7() {
  Gen g(107);
  const Formula f = entry("mvn");
  EvalConfig cfg = config(1, 10000);
  cfg.tolerance = 1e-6;
  int agree = 0, equivalent = 0, missed = 0, false_pos = 0;
  for (int t = 0; t < 1000; ++t) {
    const Signature sig = g.signature(3, 5);
    std::vector<Matrix> pb, qb;
    for (int m : sig.blocks()) {
      const int rp = g.integer(0, m);
      const int rq = t % 2 ? rp : g.integer(0, m);
      pb.push_back(g.projection(m, rp));
      qb.push_back(g.projection(m, rq));
    }
    const Element p(sig, pb), q(sig, qb);
    bool eq = true;
    const auto rp = csltest::ref_ranks(p), rq = csltest::ref_ranks(q);
    for (std::size_t k = 0; k < rp.size(); ++k) eq = eq && rp[k] == rq[k];
    cfg.seed = static_cast<std::uint64_t>(t);
    const double v = eval(f, sig, {{"p", p}, {"q", q}}, cfg).value;
    const bool small = v <= 1e-4;
    equivalent += eq;
    if (small == eq && eq == mvn_oracle(p, q)) ++agree;
    if (eq && !small) ++missed;
    if (!eq && small) ++false_pos;
  }
  return {agree == 1000, fmt("%d/1000 agree (%d equivalent pairs, %d missed, %d false positives)", agree, equivalent,
                             missed, false_pos)};
}

// 8. Cuntz domination through (b - delta)_+.
Outcome c8() {
  Gen g(108);
  const double delta = 0.1;
  const Formula f = build_sentence("cuntz_dom", std::vector<double>{delta});
  const double cap = 1.0 / std::sqrt(delta) + 1e-6;
  int ok = 0, search_ok = 0, search_tried = 0;
  double worst = 0.0, worst_norm = 0.0;
  for (int t = 0; t < 100; ++t) {
    const Signature sig = g.signature(2, 4);
    std::vector<Matrix> ab, bb, xb;
    for (int m : sig.blocks()) {
      std::vector<double> eb(static_cast<std::size_t>(m));
      for (double& e : eb) e = g.uniform(0.0, 1.0) < 0.3 ? g.uniform(0.0, delta) : g.uniform(delta + 0.01, 1.0);
      int big = 0;
      for (double e : eb) big += e > delta;
      const int r = g.integer(0, big);
      const Matrix ub = g.unitary(m), ua = g.unitary(m);
      Matrix db = Matrix::Zero(m, m), da = Matrix::Zero(m, m), x = Matrix::Zero(m, m);
      int used = 0;
      for (int i = 0; i < m; ++i) {
        db(i, i) = eb[static_cast<std::size_t>(i)];
        if (eb[static_cast<std::size_t>(i)] > delta && used < r) {
          const double alpha = g.uniform(0.05, 1.0);
          da(used, used) = alpha;
          // x maps the i-th eigenvector of b to the used-th of a
          x += std::sqrt(alpha / eb[static_cast<std::size_t>(i)]) * ua.col(used) * ub.col(i).adjoint();
          ++used;
        }
      }
      ab.push_back(ua * da * ua.adjoint());
      bb.push_back(ub * db * ub.adjoint());
      xb.push_back(x);
    }
    const Element a(sig, ab), b(sig, bb), x(sig, xb);
    // Independent domination check: rank a <= #(eigenvalues of b above delta).
    bool dominated = true;
    const auto ra = csltest::ref_ranks(a);
    for (std::size_t k = 0; k < ra.size(); ++k) {
      Eigen::SelfAdjointEigenSolver<Matrix> es(bb[k]);
      int above = 0;
      for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) above += es.eigenvalues()(i) > delta;
      dominated = dominated && ra[k] <= above;
    }
    const Element cut = apply_scalar_function(b, make_function("cut", std::vector<double>{delta}), Intent::self_adjoint);
    dominated = dominated && cuntz_oracle(a, cut);
    EvalConfig cfg = config(4, 400, static_cast<std::uint64_t>(t));
    cfg.hints["x"] = {x};
    const EvalResult r = eval(f, sig, {{"a", a}, {"b", b}}, cfg);
    const double wn = op_norm(r.witnesses.at(0).value);
    worst = std::max(worst, r.value);
    worst_norm = std::max(worst_norm, wn);
    if (dominated && r.value <= 1e-3 && wn <= cap && replay(f, sig, r.witnesses, {{"a", a}, {"b", b}}) == r.value) ++ok;
    if (t < 20) {
      ++search_tried;
      EvalConfig plain = config(16, 400, static_cast<std::uint64_t>(t));
      if (eval(f, sig, {{"a", a}, {"b", b}}, plain).value <= 1e-3) ++search_ok;
    }
  }
  return {ok == 100, fmt("%d/100 within 1e-3 (worst %.2e), witness norm %.6f <= %.6f; search alone %d/%d", ok, worst,
                         worst_norm, cap, search_ok, search_tried)};
}

// 9. Stable rank one through polar decomposition.
Outcome c9() {
  Gen g(109);
  const Formula f = entry("sr_le:1");
  const Formula inner = f->body();
  int ok = 0, total = 0;
  double worst = 0.0;
  for (int k = 1; k <= 4; ++k) {
    const Signature sig({k});
    for (int t = 0; t < 25; ++t, ++total) {
      Element a1 = g.element(sig, g.uniform(0.05, 1.0));
      if (t % 5 == 0 && k > 1) {  // nilpotent
        Matrix m = Matrix::Zero(k, k);
        for (int i = 0; i + 1 < k; ++i) m(i, i + 1) = g.uniform(0.1, 1.0);
        a1 = Element::from_matrix(m);
      }
      // a1 = (U V^*)(V S V^*) with U V^* unitary even when a1 is singular.
      Eigen::JacobiSVD<Matrix> svd(a1.block(0), Eigen::ComputeFullU | Eigen::ComputeFullV);
      const Matrix& u = svd.matrixU();
      const Matrix& v = svd.matrixV();
      const Matrix pos = v * svd.singularValues().cast<Complex>().asDiagonal() * v.adjoint();
      EvalConfig cfg = config(4, 200, static_cast<std::uint64_t>(t));
      cfg.hints["a"] = {Element::from_matrix(pos)};
      cfg.hints["v1"] = {Element::from_matrix(u * v.adjoint())};
      const Assignment as{{"a1", a1}};
      const EvalResult r = eval(inner, sig, as, cfg);
      worst = std::max(worst, r.value);
      if (r.value <= 1e-3 && replay(inner, sig, r.witnesses, as) == r.value) ++ok;
    }
  }
  return {ok == total, fmt("%d/%d instances on M_1..M_4 within 1e-3 (worst %.2e)", ok, total, worst)};
}

// 10. Factorization through matrix algebras.
Outcome c10() {
  Gen g(110);
  double worst = 0.0;
  for (int t = 0; t < 20; ++t) {
    const Signature sig({2});
    std::vector<Element> tuple;
    for (int i = 0, m = g.integer(1, 3); i < m; ++i) tuple.push_back(g.element(sig, g.uniform(0.1, 1.0)));
    worst = std::max(worst, estimate_Rn(sig, tuple, 2, config(4, 200, static_cast<std::uint64_t>(t))).value);
  }
  Matrix e11 = Matrix::Zero(2, 2), pm = Matrix::Constant(2, 2, 0.5);
  e11(0, 0) = 1;
  const std::vector<Element> pair{Element::from_matrix(e11), Element::from_matrix(pm)};
  const csltest::PairOracle o = csltest::pair_oracle(0.02);
  const Factorization f = estimate_Rn(Signature({2}), pair, 1, config(16, 400));
  const bool cpc = is_cpc(f.phi).cpc() && is_cpc(f.psi).cpc();
  const bool ok = worst <= 1e-6 && o.lower >= 0.05 && f.value >= o.lower && f.value <= o.upper + 0.05 && cpc;
  return {ok, fmt("M_2 through M_2 worst %.2e; pair through C: estimate %.6f, oracle in [%.6f, %.6f]", worst, f.value,
                  o.lower, o.upper)};
}

// 11. Moduli bound the variation of every catalog entry.
Outcome c11() {
  Gen g(111);
  int checked = 0, violations = 0;
  double worst = -1.0;
  std::string failing;
  for (const CatalogEntry& e : catalog_table()) {
    if (!e.acceptance) continue;
    if (e.kind == EntryKind::map_predicate) {
      const int n = static_cast<int>(e.params.at(0));
      const int k = static_cast<int>(e.params.at(1));
      const Signature sig({3});
      for (int t = 0; t < 1000; ++t, ++checked) {
        const ChoiMatrix phi = project_cpc(ChoiMatrix(sig, Signature({n}), {g.gaussian(3 * n)}));
        std::vector<Element> a, b;
        double d = 0.0;
        for (int i = 0; i < k; ++i) {
          a.push_back(g.element(sig, g.uniform(0.0, 1.0)));
          Element p = t % 2 ? a.back() + g.element(sig, 1e-3) : g.element(sig, g.uniform(0.0, 1.0));
          if (op_norm(p) > 1.0) p = scale(1.0 / op_norm(p), p);
          d = std::max(d, distance(a.back(), p));
          b.push_back(p);
        }
        const double slack = std::abs(qd_defect(phi, a) - qd_defect(phi, b)) - (e.map_modulus * d + 1e-9);
        worst = std::max(worst, slack);
        if (slack > 0) ++violations, failing = e.name;
      }
      continue;
    }
    const Formula body = strip_quantifiers(build_sentence(e.name, e.params));
    const VarSet vars = free_vars(body);
    const Signature sig = e.min_block > 2 ? Signature({e.min_block}) : Signature({2, 1});
    std::map<std::string, double> lip;
    for (const auto& [v, s] : vars) lip[v] = lipschitz_modulus(body, v, sig);
    for (int t = 0; t < 1000; ++t, ++checked) {
      Assignment a;
      for (const auto& [v, s] : vars) a[v] = sample_sort(s, sig, static_cast<std::uint64_t>(g.integer(0, 1 << 30)));
      auto it = vars.begin();
      std::advance(it, t % static_cast<int>(vars.size()));
      const auto& [name, sort] = *it;
      Assignment b = a;
      b[name] = t % 2 ? project_to_sort(a[name] + scale(1e-3, g.element(b[name].signature())), sort, sig)
                      : sample_sort(sort, sig, static_cast<std::uint64_t>(g.integer(0, 1 << 30)));
      const double slack = std::abs(evaluate(body, sig, a) - evaluate(body, sig, b)) -
                           (lip[name] * distance(a[name], b[name]) + 1e-9);
      worst = std::max(worst, slack);
      if (slack > 0) ++violations, failing = entry_ref(e.name, e.params);
    }
  }
  return {violations == 0, fmt("%d perturbation pairs, %d violations%s, max slack %.2e", checked, violations,
                               failing.empty() ? "" : (" (" + failing + ")").c_str(), worst)};
}

// 12. Text round trips.
Outcome c12() {
  int bad = 0, total = 0;
  for (const CatalogEntry& e : catalog_table()) {
    if (e.kind == EntryKind::map_predicate) continue;
    ++total;
    const Formula f = build_sentence(e.name, e.params);
    const std::string text = print(f);
    const Formula h = parse(text);
    if (!alpha_equivalent(f, h) || print(h) != text) ++bad;
  }
  Gen g(112);
  csltest::FormulaFuzzer fz(g);
  for (int i = 0; i < 1000; ++i, ++total) {
    const Formula f = fz.formula(g.integer(1, 6), i % 4 == 0 ? std::vector<std::string>{"a", "b"} : std::vector<std::string>{});
    const std::string text = print(f);
    const Formula h = parse(text);
    if (!alpha_equivalent(f, h) || print(h) != text) ++bad;
  }
  return {bad == 0, fmt("%d formulas, %d mismatches", total, bad)};
}

// 13. Worker count does not change results.
Outcome c13() {
  std::vector<Sentence> s;
  for (const char* r : {"abelian", "nonabelian", "AL:2", "projectionless_u", "trace_exists:1", "character_exists:1",
                        "finite", "matrix_units:2", "cstar_axiom:3", "not_subhom:1"})
    s.push_back(catalog_sentence(r));
  const std::vector<Signature> sigs{Signature::parse("2"), Signature::parse("2,1")};
  std::vector<std::string> bodies;
  for (int w : {1, 4, 8}) {
    EvalConfig c = config(16, 200, 42);
    c.workers = w;
    bodies.push_back(report_json(run_battery(s, sigs, c), false));
  }
  const bool ok = bodies[0] == bodies[1] && bodies[1] == bodies[2];
  return {ok, fmt("10 sentences x 2 algebras, workers 1/4/8: reports %s (%zu bytes)", ok ? "identical" : "differ",
                  bodies[0].size())};
}

// 14. Separation of small algebras.
Outcome c14() {
  namespace fs = std::filesystem;
  const fs::path cache = fs::temp_directory_path() / "cstarlogic_acceptance_cache";
  fs::remove_all(cache);
  const EvalConfig cfg = config(64, 400);
  auto names = [&](const char* a, const char* b) {
    std::vector<std::string> out;
    const Report r = separate(Signature::parse(a), Signature::parse(b), 0.05, cfg, cache.string());
    for (const auto& e : r.separation->entries) out.push_back(e.sentence);
    return out;
  };
  auto has = [](const std::vector<std::string>& v, const char* n) { return std::find(v.begin(), v.end(), n) != v.end(); };
  const auto s23 = names("2", "3"), s12 = names("1", "2"), s22 = names("2", "2");
  fs::remove_all(cache);
  const bool ok = has(s23, "AL:2") && has(s12, "projectionless_u") && s22.empty();
  return {ok, fmt("2 vs 3: %zu entries (AL:2 %s); 1 vs 2: %zu entries (projectionless_u %s); 2 vs 2: %zu entries",
                  s23.size(), has(s23, "AL:2") ? "listed" : "missing", s12.size(),
                  has(s12, "projectionless_u") ? "listed" : "missing", s22.size())};
}

struct Criterion {
  std::function<Outcome()> run;
  double limit;  // seconds
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria"};
  int only = 0;
  app.add_option("--criterion", only, "run a single criterion (1-14)")->check(CLI::Range(1, 14));
  CLI11_PARSE(app, argc, argv);

  const std::map<int, Criterion> all{{1, {c1, 10}},  {2, {c2, 30}},   {3, {c3, 60}},   {4, {c4, 30}},  {5, {c5, 30}},
                                     {6, {c6, 30}},  {7, {c7, 60}},   {8, {c8, 60}},   {9, {c9, 30}},  {10, {c10, 120}},
                                     {11, {c11, 120}}, {12, {c12, 10}}, {13, {c13, 120}}, {14, {c14, 60}}};
  int failed = 0;
  for (const auto& [n, c] : all) {
    if (only && n != only) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool pass = o.pass && secs < c.limit;
    if (!pass) ++failed;
    std::printf("criterion %d: %s %s (%.1f s, limit %.0f s)\n", n, pass ? "PASS" : "FAIL", o.detail.c_str(), secs,
                c.limit);
    std::fflush(stdout);
  }
  return failed ? 1 : 0;
}
