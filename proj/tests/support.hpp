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

// Test-side generators and reference computations. Everything here uses
// Eigen and <random> directly so oracles do not share code with the library.

#pragma once

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "cstarlogic/algebra.hpp"
#include "cstarlogic/logic.hpp"

namespace csltest {

using cstarlogic::Complex;
using cstarlogic::Element;
using cstarlogic::Matrix;
using cstarlogic::Signature;

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : eng_(seed) {}

  double uniform(double lo = 0.0, double hi = 1.0) { return std::uniform_real_distribution<double>(lo, hi)(eng_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(eng_); }
  double normal() { return std::normal_distribution<double>()(eng_); }

  Matrix gaussian(int n) {
    Matrix m(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) m(i, j) = Complex(normal(), normal());
    return m;
  }

  Matrix unitary(int n) {
    Eigen::HouseholderQR<Matrix> qr(gaussian(n));
    Matrix q = qr.householderQ();
    return q;
  }

  // Random projection of rank r.
  Matrix projection(int n, int r) {
    const Matrix u = unitary(n);
    return u.leftCols(r) * u.leftCols(r).adjoint();
  }

  // Positive contraction u diag(ev) u*.
  Matrix positive(const std::vector<double>& ev) {
    const int n = static_cast<int>(ev.size());
    const Matrix u = unitary(n);
    Matrix d = Matrix::Zero(n, n);
    for (int i = 0; i < n; ++i) d(i, i) = ev[static_cast<std::size_t>(i)];
    return u * d * u.adjoint();
  }

  Signature signature(int max_blocks, int max_size) {
    std::vector<int> b;
    const int k = integer(1, max_blocks);
    for (int i = 0; i < k; ++i) b.push_back(integer(1, max_size));
    return Signature(b);
  }

  // Gaussian element scaled to operator norm `radius` (reference norm).
  Element element(const Signature& sig, double radius = 1.0);

 private:
  std::mt19937_64 eng_;
};

inline double ref_norm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues()(0);
}

inline double ref_norm(const Element& a) {
  double out = 0.0;
  for (const Matrix& m : a.blocks()) out = std::max(out, ref_norm(m));
  return out;
}

inline Element Gen::element(const Signature& sig, double radius) {
  std::vector<Matrix> blocks;
  for (int n : sig.blocks()) blocks.push_back(gaussian(n));
  Element e(sig, std::move(blocks));
  const double s = ref_norm(e);
  std::vector<Matrix> scaled;
  for (const Matrix& m : e.blocks()) scaled.push_back(m * (radius / s));
  return Element(sig, std::move(scaled));
}

inline Element block_diag(const Signature& sig, std::vector<Matrix> blocks) { return Element(sig, std::move(blocks)); }

// Weyl unitaries X^i Z^j, i, j < n.
inline std::vector<Matrix> weyl_unitaries(int n) {
  Matrix x = Matrix::Zero(n, n), z = Matrix::Zero(n, n);
  const double pi = std::acos(-1.0);
  for (int i = 0; i < n; ++i) {
    x((i + 1) % n, i) = 1.0;
    z(i, i) = std::polar(1.0, 2.0 * pi * i / n);
  }
  std::vector<Matrix> out;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      Matrix w = Matrix::Identity(n, n);
      for (int k = 0; k < i; ++k) w = w * x;
      for (int k = 0; k < j; ++k) w = w * z;
      out.push_back(w);
    }
  return out;
}

// Blockwise numerical rank at tolerance tol * |a|.
inline std::vector<int> ref_ranks(const Element& a, double tol = 1e-8) {
  const double cut = tol * ref_norm(a);
  std::vector<int> out;
  for (const Matrix& m : a.blocks()) {
    Eigen::JacobiSVD<Matrix> svd(m);
    int r = 0;
    for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i)
      if (svd.singularValues()(i) > cut) ++r;
    out.push_back(r);
  }
  return out;
}

// Minimum over (alpha, beta) and 0 <= h <= 1 of
//   max(|e11 - alpha h|, |P - beta h|),  P = [[1/2, 1/2], [1/2, 1/2]],
// i.e. the factorization defect of (e11, P) through C: phi = tr(rho .),
// psi(t) = t h. Uses |m0 + mx sx + mz sz| = |m0| + |(mx, mz)| for real
// symmetric 2x2 matrices (the imaginary Pauli parts do not help by symmetry
// under complex conjugation, and the objective is convex in h).
struct PairOracle {
  double lower = 0.0;  // certified (grid margin)
  double upper = 0.0;  // attained at a feasible grid point
};

inline double pair_defect(double alpha, double beta, double h0, double hx, double hz) {
  const double f1 = std::abs(0.5 - alpha * h0) + std::hypot(alpha * hx, alpha * hz - 0.5);
  const double f2 = std::abs(0.5 - beta * h0) + std::hypot(beta * hx - 0.5, beta * hz);
  return std::max(f1, f2);
}

template <class F>
double golden_min(double lo, double hi, F&& f, int iters = 48) {
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = f(c), fd = f(d);
  for (int i = 0; i < iters; ++i) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = f(d);
    }
  }
  return std::min({fc, fd, f(lo), f(hi)});
}

// Inner convex minimization over h in the operator interval [0, 1].
inline double pair_inner(double alpha, double beta) {
  return golden_min(0.0, 1.0, [&](double h0) {
    const double r = std::min(h0, 1.0 - h0);
    return golden_min(-r, r, [&](double hx) {
      const double s = std::sqrt(std::max(0.0, r * r - hx * hx));
      return golden_min(-s, s, [&](double hz) { return pair_defect(alpha, beta, h0, hx, hz); }, 36);
    }, 36);
  }, 36);
}

// (alpha, beta) = t ((1 + z)/2, (1 + x)/2) with x^2 + z^2 <= 1, 0 <= t <= 1.
inline bool pair_feasible(double alpha, double beta) {
  if (alpha < 0 || beta < 0) return false;
  if (alpha == 0 && beta == 0) return true;
  for (int k = 1; k <= 400; ++k) {
    const double t = k / 400.0;
    const double x = 2 * beta / t - 1, z = 2 * alpha / t - 1;
    if (x * x + z * z <= 1.0 + 1e-12) return true;
  }
  return false;
}

inline PairOracle pair_oracle(double spacing = 0.02) {
  PairOracle o{1e300, 1e300};
  const int steps = static_cast<int>(std::round(1.0 / spacing));
  for (int i = 0; i <= steps; ++i)
    for (int j = 0; j <= steps; ++j) {
      const double alpha = i * spacing, beta = j * spacing;
      const double v = pair_inner(alpha, beta);
      // The defect is 1-Lipschitz in (alpha, beta) in the max metric since
      // |h| <= 1; every point of [0,1]^2 is within spacing/2 of the grid.
      o.lower = std::min(o.lower, v - spacing / 2 - 1e-6);
      if (pair_feasible(alpha, beta)) o.upper = std::min(o.upper, v);
    }
  return o;
}

// Random well-formed formula for syntax round trips. Variables are drawn
// from the enclosing binders; `free` names stay free.
class FormulaFuzzer {
 public:
  explicit FormulaFuzzer(Gen& g) : g_(g) {}

  cstarlogic::Formula formula(int depth, const std::vector<std::string>& free = {}) {
    scope_.clear();
    for (const auto& v : free) scope_.push_back({v, cstarlogic::SortSpec{}});
    counter_ = 0;
    return fexpr(depth);
  }

 private:
  using Formula = cstarlogic::Formula;
  using Term = cstarlogic::Term;
  using SortSpec = cstarlogic::SortSpec;
  using Connective = cstarlogic::Connective;

  double num() { return std::round(g_.uniform(-4, 4) * 1000.0) / 1000.0; }
  double pos_num() { return std::round(g_.uniform(0.05, 3.0) * 100.0) / 100.0; }

  SortSpec sort() {
    SortSpec s;
    s.radius = pos_num();
    s.constraint = static_cast<cstarlogic::Constraint>(g_.integer(0, 5));
    if (s.constraint == cstarlogic::Constraint::projection || s.constraint == cstarlogic::Constraint::unitary ||
        s.constraint == cstarlogic::Constraint::partial_isometry)
      s.radius = 1.0;
    if (g_.integer(0, 5) == 0 && s.constraint == cstarlogic::Constraint::none) s.scalar = true;
    return s;
  }

  Term term(int depth) {
    const int pick = depth <= 0 ? g_.integer(0, 2) : g_.integer(0, 8);
    switch (pick) {
      case 0:
        if (!scope_.empty()) {
          const auto& v = scope_[static_cast<std::size_t>(g_.integer(0, static_cast<int>(scope_.size()) - 1))];
          return Term::var(v.first, v.second);
        }
        return Term::one();
      case 1: return Term::one();
      case 2: return g_.integer(0, 1) ? Term::zero() : Term::constant("unit", {2, g_.integer(1, 2), g_.integer(1, 2)});
      case 3: return Term::add(term(depth - 1), term(depth - 1));
      case 4: return Term::sub(term(depth - 1), term(depth - 1));
      case 5: return Term::mul(term(depth - 1), term(depth - 1));
      case 6: return Term::adjoint(term(depth - 1));
      case 7: return Term::scalar_mul(Complex(num(), g_.integer(0, 1) ? num() : 0.0), term(depth - 1));
      default: {
        static const char* fns[] = {"sqrt", "abs", "pos", "neg", "cut", "expi"};
        const std::string f = fns[g_.integer(0, 5)];
        std::vector<double> p;
        if (f == "cut") p.push_back(pos_num());
        return Term::fn(f, p, term(depth - 1));
      }
    }
  }

  Formula fexpr(int depth) {
    const int pick = depth <= 0 ? g_.integer(0, 1) : g_.integer(0, 5);
    switch (pick) {
      case 0: return Formula::number(num());
      case 1: return Formula::atomic(term(std::max(depth, 1)));
      case 2:
      case 3: {
        const std::string v = "v" + std::to_string(counter_++);
        const SortSpec s = sort();
        scope_.push_back({v, s});
        Formula body = fexpr(depth - 1);
        scope_.pop_back();
        return g_.integer(0, 1) ? Formula::sup(v, s, body) : Formula::inf(v, s, body);
      }
      default: {
        const auto c = static_cast<Connective>(g_.integer(0, 9));
        const auto& in = cstarlogic::info(c);
        std::vector<double> params;
        if (c == Connective::mul) params = {num()};
        if (c == Connective::sq) params = {-pos_num(), pos_num()};
        if (c == Connective::sqrt) params = {0.01, pos_num() + 0.01};
        if (c == Connective::fproj) params = {0.2};
        const int arity = in.arity < 0 ? g_.integer(1, 3) : in.arity;
        std::vector<Formula> kids;
        for (int i = 0; i < arity; ++i) kids.push_back(fexpr(depth - 1));
        return Formula::conn(c, kids, params);
      }
    }
  }

  Gen& g_;
  std::vector<std::pair<std::string, SortSpec>> scope_;
  int counter_ = 0;
};

}  // namespace csltest
