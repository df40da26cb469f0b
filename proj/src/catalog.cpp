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

#include "cstarlogic/catalog.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>
#include <numeric>

#include <json.hpp>

#include "cstarlogic/parser.hpp"

namespace cstarlogic {

std::string_view to_string(EntryKind k) {
  return k == EntryKind::formula ? "formula" : "map-predicate";
}

namespace {

using Params = std::vector<double>;

std::string num(double v) { return format_double(v); }

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

// Formula-level helpers.
std::string fsum(const std::vector<std::string>& parts) { return join(parts, " + "); }
std::string fmax(const std::vector<std::string>& parts) {
  return parts.size() == 1 ? parts[0] : "max(" + join(parts, ", ") + ")";
}
std::string norm(const std::string& t) { return "norm(" + t + ")"; }

std::string quant(std::string_view q, const std::vector<std::string>& vars, const std::string& sort) {
  std::string out;
  for (const auto& v : vars) out += std::string(q) + " " + v + ":" + sort + ". ";
  return out;
}
std::string frees(const std::vector<std::string>& vars, const std::string& sort) {
  return quant("free", vars, sort);
}

std::vector<std::string> names(std::string_view stem, int n) {
  std::vector<std::string> out;
  for (int i = 1; i <= n; ++i) out.push_back(std::string(stem) + std::to_string(i));
  return out;
}

std::string power(const std::string& x, int k) {
  std::vector<std::string> f(static_cast<std::size_t>(k), x);
  return join(f, "*");
}

int as_int(double v, std::string_view what, int lo, int hi) {
  if (v != std::floor(v) || v < lo || v > hi)
    fail(ErrorKind::precondition, std::string(what) + " must be an integer in [" + std::to_string(lo) + ", " +
                                      std::to_string(hi) + "], got " + num(v));
  return static_cast<int>(v);
}

void need(const Params& p, std::size_t lo, std::size_t hi, std::string_view name) {
  if (p.size() < lo || p.size() > hi)
    fail(ErrorKind::precondition, std::string(name) + " takes " + std::to_string(lo) +
                                      (hi != lo ? ".." + std::to_string(hi) : "") + " parameters, got " +
                                      std::to_string(p.size()));
}

// ---- matrix-unit relations ---------------------------------------------

// x{l}_{i}_{j} for block l of F.
std::string xu(int l, int i, int j) {
  return "x" + std::to_string(l) + "_" + std::to_string(i) + "_" + std::to_string(j);
}
std::string xu(int i, int j) { return "x" + std::to_string(i) + "_" + std::to_string(j); }

// max_{ijkl} (|d_kl x_ij - x_ik x_lj| + |x_ij - x_ji*|) + ||x_11| - 1|.
std::string alpha_n(int n, const std::function<std::string(int, int)>& x) {
  std::vector<std::string> terms;
  for (int i = 1; i <= n; ++i)
    for (int j = 1; j <= n; ++j)
      for (int k = 1; k <= n; ++k)
        for (int l = 1; l <= n; ++l) {
          const std::string prod = x(i, k) + "*" + x(l, j);
          const std::string rel = k == l ? norm(x(i, j) + " - " + prod) : norm(prod);
          terms.push_back(rel + " + " + norm(x(i, j) + " - " + x(j, i) + "^*"));
        }
  return fmax(terms) + " + abs(" + norm(x(1, 1)) + " - 1)";
}

std::string diag_sum(int n, const std::function<std::string(int, int)>& x) {
  std::vector<std::string> d;
  for (int i = 1; i <= n; ++i) d.push_back(x(i, i));
  return join(d, " + ");
}

// Order-zero relations for M_k.
std::string alpha_order_zero(int k, const std::function<std::string(int, int)>& x) {
  std::vector<std::string> terms;
  for (int i = 1; i <= k; ++i)
    for (int j = 1; j <= k; ++j) terms.push_back(norm(x(i, j) + " - " + x(j, i) + "^*"));
  for (int i = 1; i <= k; ++i)
    for (int j = 1; j <= k; ++j)
      for (int m = 1; m <= k; ++m)
        for (int n = 1; n <= k; ++n) {
          const std::string prod = x(i, j) + "*" + x(m, n);
          terms.push_back(j == m ? norm(prod + " - " + x(i, i) + "*" + x(i, n)) : norm(prod));
        }
  terms.push_back("(" + norm(diag_sum(k, x)) + " -. 1)");
  return fsum(terms);
}

// Mutual orthogonality of the diagonal units of different summands.
std::vector<std::string> cross_terms(const std::vector<int>& blocks) {
  std::vector<std::string> out;
  for (std::size_t l = 0; l < blocks.size(); ++l)
    for (std::size_t m = l + 1; m < blocks.size(); ++m)
      for (int i = 1; i <= blocks[l]; ++i)
        for (int j = 1; j <= blocks[m]; ++j)
          out.push_back(norm(xu(static_cast<int>(l + 1), i, i) + "*" + xu(static_cast<int>(m + 1), j, j)));
  return out;
}

std::vector<std::string> unit_vars(const std::vector<int>& blocks) {
  std::vector<std::string> out;
  for (std::size_t l = 0; l < blocks.size(); ++l)
    for (int i = 1; i <= blocks[l]; ++i)
      for (int j = 1; j <= blocks[l]; ++j) out.push_back(xu(static_cast<int>(l + 1), i, j));
  return out;
}

std::vector<int> block_params(const Params& p, std::size_t from, std::string_view name) {
  if (p.size() <= from) fail(ErrorKind::precondition, std::string(name) + " needs at least one block size");
  std::vector<int> out;
  for (std::size_t i = from; i < p.size(); ++i) out.push_back(as_int(p[i], "block size", 1, 4));
  return out;
}

// beta_{F,m}: distance of ys to the span of a copy of F with unit z.
std::string beta_f(const std::vector<int>& blocks, const std::vector<std::string>& ys, const std::string& z) {
  const auto xs = unit_vars(blocks);
  std::vector<std::string> alpha;
  for (std::size_t l = 0; l < blocks.size(); ++l) {
    const int b = static_cast<int>(l + 1);
    alpha.push_back(alpha_n(blocks[l], [b](int i, int j) { return xu(b, i, j); }));
  }
  for (auto& c : cross_terms(blocks)) alpha.push_back(c);

  std::vector<std::string> lams;
  std::vector<std::string> dist;
  for (std::size_t j = 0; j < ys.size(); ++j) {
    std::vector<std::string> span;
    for (std::size_t k = 0; k < xs.size(); ++k) {
      const std::string lam = "lam" + std::to_string(j + 1) + "_" + std::to_string(k + 1);
      lams.push_back(lam);
      span.push_back(lam + "*" + xs[k]);
    }
    dist.push_back(norm(ys[j] + " - (" + join(span, " + ") + ")"));
  }
  std::vector<std::string> units;
  for (std::size_t l = 0; l < blocks.size(); ++l) {
    const int b = static_cast<int>(l + 1);
    units.push_back(diag_sum(blocks[l], [b](int i, int j) { return xu(b, i, j); }));
  }
  dist.push_back(norm(z + " - (" + join(units, " + ") + ")"));
  return "(" + quant("inf", xs, "ball(1)") + quant("inf", lams, "ball(1, scalar)") + "(" + fsum(alpha) + ") + " +
         fmax(dist) + ")";
}

std::string commutator(const std::string& a, const std::string& b) { return a + "*" + b + " - " + b + "*" + a; }

// ---- entries -------------------------------------------------------------

struct Family {
  std::string name;
  Params defaults;
  std::string param_doc;
  EntryKind kind;
  std::string anchor;
  std::string basis;
  std::function<std::string(const Params&)> text;
  std::function<std::string(const Params&)> notes;
  bool closed = true;
  bool acceptance = true;
  double map_modulus = 0.0;
};

std::string cstar_axiom(const Params& p) {
  need(p, 1, 1, "cstar_axiom");
  const int i = as_int(p[0], "axiom index", 1, 7);
  const std::string xy = quant("sup", {"x", "y"}, "ball(1)");
  switch (i) {
    case 1:  // |xy| <= |x||y|, product by polarization
      return xy + "norm(x*y) -. mul{0.25}(sq{0,2}(norm(x) + norm(y)) - sq{-1,1}(norm(x) - norm(y)))";
    case 2: return xy + "norm(x + y) -. (norm(x) + norm(y))";
    case 3: return "sup x:ball(1). abs(norm((1+2i)*x) - mul{" + num(std::sqrt(5.0)) + "}(norm(x)))";
    case 4: return "sup x:ball(1). abs(norm(x^* * x) - sq{0,1}(norm(x)))";
    case 5: return "sup x:ball(1). norm(x^*^* - x)";
    case 6: return xy + "norm((x*y)^* - y^* * x^*)";
    default: return "sup x:ball(1). norm(((1+2i)*x)^* - (1-2i)*x^*)";
  }
}

std::string amitsur_levitzki(const Params& p) {
  need(p, 1, 1, "AL");
  const int n = as_int(p[0], "n", 1, 3);
  const auto xs = names("x", 2 * n);
  std::vector<int> perm(static_cast<std::size_t>(2 * n));
  std::iota(perm.begin(), perm.end(), 0);
  std::string poly;
  do {
    int inversions = 0;
    for (std::size_t a = 0; a < perm.size(); ++a)
      for (std::size_t b = a + 1; b < perm.size(); ++b) inversions += perm[a] > perm[b];
    std::vector<std::string> f;
    for (int k : perm) f.push_back(xs[static_cast<std::size_t>(k)]);
    const std::string mono = join(f, "*");
    if (poly.empty())
      poly = inversions % 2 ? "-1*" + mono : mono;
    else
      poly += (inversions % 2 ? " - " : " + ") + mono;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return quant("sup", xs, "ball(1)") + norm(poly);
}

std::string not_subhom(const Params& p) {
  need(p, 1, 1, "not_subhom");
  const int n = as_int(p[0], "n", 1, 6);
  std::vector<std::string> gaps;
  for (int i = 1; i <= n; ++i) gaps.push_back("(1 - " + norm(power("x", i)) + ")");
  return "inf x:ball(1). " + norm(power("x", n + 1)) + " + " + fmax(gaps);
}

std::string sr_le(const Params& p) {
  need(p, 1, 1, "sr_le");
  const int n = as_int(p[0], "n", 1, 4);
  const auto as = names("a", n);
  const auto vs = names("v", n);
  std::vector<std::string> terms;
  std::vector<std::string> gram;
  for (int i = 0; i < n; ++i) {
    terms.push_back(norm(as[i] + " - " + vs[i] + "*a"));
    gram.push_back(vs[i] + "^* * " + vs[i]);
  }
  terms.push_back(norm("one - (" + join(gram, " + ") + ")"));
  return quant("sup", as, "ball(1)") + "inf a:pos(" + num(std::sqrt(static_cast<double>(n))) + "). " +
         quant("inf", vs, "ball(1)") + fsum(terms);
}

std::string matrix_units(const Params& p, bool unital) {
  need(p, 1, 1, unital ? "matrix_units_u" : "matrix_units");
  const int n = as_int(p[0], "n", 1, 4);
  std::vector<std::string> xs;
  for (int i = 1; i <= n; ++i)
    for (int j = 1; j <= n; ++j) xs.push_back(xu(i, j));
  const std::string alpha = alpha_n(n, [](int i, int j) { return xu(i, j); });
  const std::string body =
      unital ? "max(" + alpha + ", " + norm("one - (" + diag_sum(n, [](int i, int j) { return xu(i, j); }) + ")") + ")"
             : alpha;
  return quant("inf", xs, "ball(1)") + body;
}

std::string order_zero(const Params& p) {
  const auto blocks = block_params(p, 0, "order_zero");
  std::vector<std::string> terms;
  for (std::size_t l = 0; l < blocks.size(); ++l) {
    const int b = static_cast<int>(l + 1);
    terms.push_back(alpha_order_zero(blocks[l], [b](int i, int j) { return xu(b, i, j); }));
  }
  for (auto& c : cross_terms(blocks)) terms.push_back(c);
  for (std::size_t l = 0; l < blocks.size(); ++l)
    terms.push_back("(1 -. " + norm(xu(static_cast<int>(l + 1), 1, 1)) + ")");
  return quant("inf", unit_vars(blocks), "ball(1)") + fsum(terms);
}

std::string cuntz_dom(const Params& p) {
  need(p, 1, 1, "cuntz_dom");
  const double d = p[0];
  if (!(d > 0 && d <= 1)) fail(ErrorKind::precondition, "cuntz_dom: delta must lie in (0, 1]");
  return frees({"a", "b"}, "pos(1)") + "inf x:ball(" + num(1.0 / std::sqrt(d)) + "). " + norm("a - x*b*x^*");
}

std::string simple_phi(const Params& p) {
  need(p, 1, 1, "simple_phi");
  const int i = as_int(p[0], "i", 1, 4);
  const std::string e = "$unit(" + std::to_string(i) + ",1,1)";
  const std::string d = "diag{" + std::to_string(i) + "}";
  return frees({"a", "b"}, "pos(1)") + "inf x:ball(" + num(std::sqrt(2.0)) + ", amp=" + std::to_string(i) + "). " +
         norm(e + "*(x^* * " + d + "[a] * x - " + d + "[b])*" + e);
}

std::string trace_exists(const Params& p) {
  need(p, 1, 1, "trace_exists");
  const int n = as_int(p[0], "n", 1, 6);
  const auto xs = names("x", n);
  std::vector<std::string> c;
  for (const auto& x : xs) c.push_back(x + "*" + x + "^* - " + x + "^* * " + x);
  return quant("sup", xs, "ball(1)") + "1 -. " + norm("one - (" + join(c, " + ") + ")");
}

std::string character_exists(const Params& p) {
  need(p, 1, 1, "character_exists");
  const int n = as_int(p[0], "n", 1, 4);
  std::vector<std::string> vars;
  std::vector<std::string> c;
  for (int i = 1; i <= n; ++i) {
    const auto s = std::to_string(i);
    for (const char* v : {"b", "c", "x", "y"}) vars.push_back(v + s);
    c.push_back("b" + s + "*(" + commutator("x" + s, "y" + s) + ")*c" + s);
  }
  return quant("sup", vars, "ball(1)") + "1 -. " + norm("one - (" + join(c, " + ") + ")");
}

std::string dixmier(const Params& p) {
  need(p, 1, 1, "dixmier");
  const int n = as_int(p[0], "n", 1, 16);
  const auto us = names("u", n);
  std::vector<std::string> conj;
  for (const auto& u : us) conj.push_back(u + "^* * a * " + u);
  const std::string avg = n == 1 ? conj[0] : num(1.0 / n) + "*(" + join(conj, " + ") + ")";
  return "sup a:ball(1). " + quant("inf", us, "unit(1)") + "inf mu:ball(1, scalar). " + norm("mu - " + avg);
}

std::string spectrum_member(const Params& p) {
  need(p, 0, 0, "spectrum_member");
  // G(c): inf over scalars s ~ |c| of |c| - |s - |c||; zero iff c is singular.
  auto g = [](const std::string& c) {
    return "(inf s:pos(2, scalar). max(abs(" + norm(c) + " - norm(s)), " + norm(c) + " - " +
           norm("s - sqrt[(" + c + ")^* * (" + c + ")]") + "))";
  };
  return "free a:ball(1). free l:ball(1, scalar). min(" + g("a - l") + ", " + g("(a - l)^*") + ")";
}

std::string excision_alpha(const Params& p) {
  need(p, 1, 1, "excision_alpha");
  const int l = as_int(p[0], "l", 1, 3);
  const std::string L = std::to_string(l);
  const std::string lhs = "diag{" + L + "}[f*f]*($swap(" + L + ")*diag{" + L + "}[b]*$swap(" + L + "))";
  const std::string rhs = "diag{" + L + "}[f]*diag{" + std::to_string(l * l) + "}[a]*$omega(" + L + ")*diag{" + L +
                          "}[f]";
  return "free a:ball(1). free b:ball(1, amp=" + L + ", scalar). inf f:pos(1, amp=" + L + "). " +
         norm(lhs + " - " + rhs) + " + mul{4}(1 -. norm(f))";
}

std::string popa(const Params& p) {
  if (p.empty()) fail(ErrorKind::precondition, "popa takes m followed by the block sizes of F");
  const int m = as_int(p[0], "m", 1, 3);
  const auto blocks = block_params(p, 1, "popa");
  const auto ys = names("y", m);
  std::vector<std::string> cut;
  std::vector<std::string> comm;
  for (const auto& y : ys) {
    cut.push_back("z*" + y + "*z");
    comm.push_back(norm(commutator("z", y)));
  }
  return frees(ys, "ball(1)") + "inf z:proj(1). max(" + beta_f(blocks, cut, "z") + ", " + fmax(comm) + ")";
}

std::string taf(const Params& p) {
  if (p.empty()) fail(ErrorKind::precondition, "taf takes m followed by the block sizes of F");
  const int m = as_int(p[0], "m", 1, 3);
  const auto blocks = block_params(p, 1, "taf");
  const auto as = names("a", m);
  std::vector<std::string> cut;
  std::vector<std::string> comm;
  for (const auto& a : as) {
    cut.push_back("z*" + a + "*z");
    comm.push_back(norm(commutator("z", a)));
  }
  const std::string small = "(inf v:pisom(1). max(" + norm("z - v*v^*") + ", " +
                            norm("(one - ramp{0,0.5}[b])*v^* * v") + "))";
  return "free b:pos(1). " + frees(as, "ball(1)") + "inf z:proj(1). max(" + beta_f(blocks, cut, "z") + ", " +
         fmax(comm) + ", " + small + ")";
}

std::string rr_gt0_alpha(const Params& p) {
  need(p, 0, 0, "rr_gt0_alpha");
  const std::string e = "(q + (one - q)*h*(one - q))";
  return "sup q:proj(1). sup h:pos(1). sup c:ball(1). inf p:proj(1). " + norm(e + "*p - p") + " + " +
         norm("(one - p)*q*c");
}

std::string fixed(std::string text, std::string_view name, const Params& p) {
  need(p, 0, 0, name);
  return text;
}

const std::vector<Family>& families() {
  static const std::vector<Family> table = [] {
    std::vector<Family> f;
    auto constant = [](std::string s) { return [s](const Params&) { return s; }; };
    f.push_back({"cstar_axiom", {1}, "i in 1..7", EntryKind::formula,
                 "|xy| <= |x||y|; |x+y| <= |x|+|y|; |lx| = |l||x|; |x*x| = |x|^2; x** = x; (xy)* = y*x*; (lx)* = conj(l)x*",
                 "identity", cstar_axiom, constant("0 on every algebra (up to rounding)")});
    f.push_back({"abelian", {}, "", EntryKind::formula, "sup_x sup_y |xy - yx|", "witness",
                 [](const Params& p) { return fixed("sup x:ball(1). sup y:ball(1). norm(x*y - y*x)", "abelian", p); },
                 constant("0 iff commutative; 2 on M_n for n >= 2 (x = diag(1,-1), y = e12 + e21)")});
    f.push_back({"nonabelian", {}, "", EntryKind::formula, "1 -. sup_x (|x|^2 - |x^2|)", "witness",
                 [](const Params& p) {
                   return fixed("1 -. (sup x:ball(1). sq{0,1}(norm(x)) - norm(x*x))", "nonabelian", p);
                 },
                 constant("0 iff some nonzero nilpotent exists (x = e12); 1 on commutative algebras")});
    f.push_back({"AL", {2}, "n in 1..3", EntryKind::formula, "sup |sum_s sgn(s) x_s(1)...x_s(2n)|", "analytic",
                 amitsur_levitzki,
                 [](const Params& p) {
                   return "0 on every block of size <= " + num(p[0]) + "; > 0 on larger blocks";
                 }});
    f.push_back({"not_subhom", {1}, "n >= 1", EntryKind::formula, "inf_x |x^(n+1)| + max_{i<=n} (1 - |x^i|)",
                 "witness", not_subhom,
                 [](const Params& p) {
                   return "0 when some block has size > " + num(p[0]) + " (shift matrix); positive otherwise";
                 }});
    f.push_back({"projectionless_u", {}, "", EntryKind::formula, "sup_{x proj} min(|x|, |1 - x|)", "witness",
                 [](const Params& p) {
                   return fixed("sup x:proj(1). min(norm(x), norm(one - x))", "projectionless_u", p);
                 },
                 constant("0 on C; 1 on every other algebra (x = e11)")});
    f.push_back({"projectionless_fc", {}, "", EntryKind::formula,
                 "sup_x min(|t^2 - t| -. 1/8, max(|x|, |1 - x|) -. (|x - x*| + f(|t^2 - t|))/2), t = (x + x*)/2, "
                 "f(y) = 1 - sqrt(1 - 4y)",
                 "measured",
                 [](const Params& p) {
                   const std::string t = "0.5*(x + x^*)";
                   const std::string d = norm("(" + t + ")*(" + t + ") - " + t);
                   return fixed("sup x:ball(1). min(" + d + " -. 0.125, max(norm(x), norm(one - x)) -. mul{0.5}(" +
                                    norm("x - x^*") + " + fproj{0.24}(" + d + ")))",
                                "projectionless_fc", p);
                 },
                 constant("f clamped to [0, 0.24]; values recorded by measurement")});
    f.push_back({"rr0", {}, "", EntryKind::formula, "sup_{x,y sa} inf_{z proj} max(|zx|, |(1-z)y|)^2 -. |xy|",
                 "analytic",
                 [](const Params& p) {
                   return fixed(
                       "sup x:sa(1). sup y:sa(1). inf z:proj(1). sq{0,1}(max(norm(z*x), norm((one - z)*y))) -. "
                       "norm(x*y)",
                       "rr0", p);
                 },
                 constant("0 on every finite-dimensional algebra (real rank zero)")});
    f.push_back({"sr_le", {1}, "n in 1..4", EntryKind::formula,
                 "sup_{a_i} inf_{|a| <= sqrt n} inf_{v_i} sum |a_i - v_i a| + |1 - sum v_i* v_i|", "witness", sr_le,
                 constant("0 on finite-dimensional algebras; a_1 = e12 has witness v = e12 + e21, a = e22")});
    f.push_back({"sr_one", {}, "", EntryKind::formula, "sup_x inf_{y unit} |x - y|x||", "witness",
                 [](const Params& p) {
                   return fixed("sup x:ball(1). inf y:unit(1). norm(x - y*sqrt[x^* * x])", "sr_one", p);
                 },
                 constant("0 on finite-dimensional algebras (polar decomposition with unitary part)")});
    f.push_back({"finite", {}, "", EntryKind::formula, "sup_{x*x = 1} |xx* - 1|", "analytic",
                 [](const Params& p) {
                   return fixed("sup x:pisom(1). min(1 -. norm(x^* * x - one), norm(x*x^* - one))", "finite", p);
                 },
                 constant("0 on M_n (every isometry is unitary)")});
    f.push_back({"infinite", {}, "", EntryKind::formula, "p, q orthogonal, q != 0, v*v = p + q, vv* = p",
                 "analytic",
                 [](const Params& p) {
                   return fixed(
                       "inf p:proj(1). inf q:proj(1). inf v:pisom(1). norm(p*q) + norm(v^* * v - p - q) + "
                       "norm(v*v^* - p) + (1 -. norm(q))",
                       "infinite", p);
                 },
                 constant("strictly positive on finite-dimensional algebras (no proper isometries)")});
    f.push_back({"stable", {}, "", EntryKind::formula, "sup_x inf_y |x*x y*y| + |x*x - yy*|", "witness",
                 [](const Params& p) {
                   return fixed("sup x:ball(1). inf y:ball(1). norm(x^* * x * y^* * y) + norm(x^* * x - y*y^*)",
                                "stable", p);
                 },
                 constant(">= 1 on unital algebras (x = 1)")});
    f.push_back({"pi_simple", {}, "", EntryKind::formula,
                 "sup_{x pos} sup_{y pos} min(|x| -. 1/2, inf_z |2zxz* - y|)", "measured",
                 [](const Params& p) {
                   return fixed(
                       "sup x:pos(1). sup y:pos(1). min(norm(x) -. 0.5, inf z:ball(1). norm(2*z*x*z^* - y))",
                       "pi_simple", p);
                 },
                 constant("0 on C; 1/2 on M_2 (x rank one, y = 1), not the 0/1 dichotomy")});
    f.push_back({"matrix_units", {2}, "n in 1..4", EntryKind::formula,
                 "max_{ijkl} |d_kl x_ij - x_ik x_lj| + |x_ij - x_ji*| + ||x_11| - 1|", "witness",
                 [](const Params& p) { return matrix_units(p, false); },
                 [](const Params& p) { return "0 iff some block has size >= " + num(p[0]); }});
    f.push_back({"matrix_units_u", {2}, "n in 1..4", EntryKind::formula, "max(alpha_n, |1 - sum x_ii|)", "witness",
                 [](const Params& p) { return matrix_units(p, true); },
                 [](const Params& p) { return "0 iff every block size is a multiple of " + num(p[0]); }});
    f.push_back({"mvn", {}, "", EntryKind::formula, "inf_u |p - u*u| + |q - uu*|", "analytic",
                 [](const Params& p) {
                   return fixed(
                       "free p:proj(1). free q:proj(1). inf u:pisom(1). norm(p - u^* * u) + norm(q - u*u^*)", "mvn",
                       p);
                 },
                 constant("in {0, 2} on projections; 0 iff blockwise ranks agree"), false});
    f.push_back({"order_zero", {2}, "block sizes of F (1..4)", EntryKind::formula,
                 "b_ij b_mn = d_jm b_ii b_in, plus |sum b_ii| -. 1 and cross terms |b^l_ii b^l'_jj|", "witness",
                 order_zero,
                 constant("0 iff a c.p.c. order zero map F -> A with |x^l_11| = 1 exists")});
    f.push_back({"cuntz_dom", {0.1}, "delta in (0, 1]", EntryKind::formula,
                 "inf_{|x| <= delta^-1/2} |a - xbx*|", "analytic", cuntz_dom,
                 constant("0 when a is dominated by (b - delta)_+ (blockwise ranks)"), false});
    f.push_back({"simple_phi", {2}, "i in 1..4", EntryKind::formula,
                 "inf_{|sum x_j* x_j| <= 2} |x_1* a x_1 + ... + x_i* a x_i - b|", "analytic", simple_phi,
                 constant("0 on M_n for |a| = 1 and i >= rank b"), false});
    f.push_back({"trace_exists", {1}, "n >= 1", EntryKind::formula, "sup_x 1 -. |1 - sum [x_i, x_i*]|",
                 "analytic", trace_exists,
                 constant("0 on every finite-dimensional algebra (commutators have trace zero)")});
    f.push_back({"character_exists", {1}, "n in 1..4", EntryKind::formula,
                 "sup 1 -. |1 - sum b_i [x_i, y_i] c_i|", "witness", character_exists,
                 constant("0 iff some block is 1x1; 1 when all blocks are >= 2")});
    f.push_back({"dixmier", {4}, "n in 1..16", EntryKind::formula, "|mu - (1/n) sum u_i* a u_i|", "witness",
                 dixmier,
                 constant("0 on M_k with n = k^2 (Weyl unitaries), mu = normalized trace of a")});
    f.push_back({"spectrum_member", {}, "", EntryKind::formula, "G(a) = |a| - | |a| 1 - |a| |, min(G(a - l), G((a - l)*))",
                 "analytic", spectrum_member, constant("equals s_min(a - l)/2; 0 iff l is in the spectrum of a"),
                 false});
    f.push_back({"qd_predicate", {2, 2}, "n (target M_n), k (tuple length)", EntryKind::map_predicate,
                 "inf_phi max(|a_j| - |phi(a_j)|, |phi(a_i a_j) - phi(a_i) phi(a_j)|)", "witness",
                 [](const Params& p) {
                   need(p, 2, 2, "qd_predicate");
                   as_int(p[0], "n", 1, 8);
                   as_int(p[1], "k", 1, 8);
                   return std::string();
                 },
                 constant("0 when the tuple lives in a block of size <= n (compression to that block)"), false, true,
                 4.0});
    f.push_back({"excision_alpha", {2}, "l in 1..3", EntryKind::formula,
                 "inf_{f >= 0, |f| = 1} |f^2 (x) b - (f (x) 1)(sum a (x) e_jk (x) e_jk)(f (x) 1)|", "analytic",
                 excision_alpha, constant("0 when b = phi(a) e for a pure state phi and a rank-one f"), false});
    f.push_back({"popa", {1, 1}, "m (tuple length), then block sizes of F", EntryKind::formula,
                 "inf_z max(beta_{F,m}(z y z, z), max_j |[z, y_j]|)", "witness", popa,
                 constant("0 when each y_j is close to a copy of F with unit z commuting with y; measured otherwise"),
                 false});
    f.push_back({"taf", {1, 1}, "m (tuple length), then block sizes of F", EntryKind::formula,
                 "inf_z max(beta_{F,m}(z a z, z), max_j |[z, a_j]|, 1 - z ~< b)", "measured", taf,
                 constant("builder only"), false, false});
    f.push_back({"rr_gt0_alpha", {}, "", EntryKind::formula, "inf_p |ep - p| + |(1 - p)a|", "analytic",
                 rr_gt0_alpha, constant("0 on finite-dimensional algebras (p = q)")});
    return f;
  }();
  return table;
}

const Family& family(std::string_view name) {
  for (const auto& f : families())
    if (f.name == name) return f;
  fail(ErrorKind::unknown_name, "unknown catalog entry '" + std::string(name) + "'");
}

Params with_defaults(const Family& f, std::span<const double> params) {
  return params.empty() ? f.defaults : Params(params.begin(), params.end());
}

}  // namespace

EntryRef parse_entry_ref(std::string_view text) {
  EntryRef ref;
  std::size_t pos = text.find(':');
  ref.name = std::string(text.substr(0, pos));
  if (ref.name.empty()) fail(ErrorKind::parse, "empty catalog entry name");
  while (pos != std::string_view::npos) {
    const std::size_t next = text.find(':', pos + 1);
    const std::string_view tok = text.substr(pos + 1, next == std::string_view::npos ? next : next - pos - 1);
    double v = 0;
    const auto [end, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (tok.empty() || ec != std::errc() || end != tok.data() + tok.size())
      fail(ErrorKind::parse, "bad catalog parameter '" + std::string(tok) + "' in '" + std::string(text) + "'");
    ref.params.push_back(v);
    pos = next;
  }
  return ref;
}

std::string entry_ref(std::string_view name, std::span<const double> params) {
  std::string out(name);
  for (double p : params) out += ":" + num(p);
  return out;
}

std::vector<std::string> catalog_names() {
  std::vector<std::string> out;
  for (const auto& f : families()) out.push_back(f.name);
  return out;
}

CatalogEntry catalog_entry(std::string_view name, std::span<const double> params) {
  const Family& f = family(name);
  CatalogEntry e;
  e.name = f.name;
  e.params = with_defaults(f, params);
  e.param_doc = f.param_doc;
  e.kind = f.kind;
  e.dsl = f.text(e.params);
  e.anchor = f.anchor;
  e.notes = f.notes(e.params);
  e.basis = f.basis;
  e.closed = f.closed;
  e.acceptance = f.acceptance;
  e.map_modulus = f.map_modulus;
  return e;
}

std::string build_text(std::string_view name, std::span<const double> params) {
  const Family& f = family(name);
  return f.text(with_defaults(f, params));
}

Formula build_sentence(std::string_view name, std::span<const double> params) {
  const Family& f = family(name);
  if (f.kind == EntryKind::map_predicate)
    fail(ErrorKind::precondition, std::string(name) + " is a map predicate with no formula text");
  return parse(f.text(with_defaults(f, params)));
}

std::vector<CatalogEntry> catalog_table() {
  std::vector<CatalogEntry> out;
  for (const auto& f : families()) {
    if (f.name == "cstar_axiom") {
      for (int i = 1; i <= 7; ++i) {
        const double p = i;
        out.push_back(catalog_entry(f.name, std::span<const double>(&p, 1)));
      }
    } else {
      out.push_back(catalog_entry(f.name));
    }
  }
  return out;
}

std::string catalog_json(const std::vector<CatalogEntry>& entries) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& e : entries) {
    nlohmann::ordered_json j;
    j["name"] = e.name;
    j["ref"] = entry_ref(e.name, e.params);
    j["params"] = e.params;
    j["param_doc"] = e.param_doc;
    j["kind"] = std::string(to_string(e.kind));
    j["dsl"] = e.dsl;
    j["anchor"] = e.anchor;
    j["notes"] = e.notes;
    j["basis"] = e.basis;
    j["closed"] = e.closed;
    j["acceptance"] = e.acceptance;
    if (e.kind == EntryKind::map_predicate) j["modulus"] = e.map_modulus;
    arr.push_back(std::move(j));
  }
  return arr.dump(2);
}

}  // namespace cstarlogic
