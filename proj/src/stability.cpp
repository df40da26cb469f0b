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

#include "cstarlogic/stability.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "detail/pool.hpp"
#include "detail/random.hpp"

namespace cstarlogic {

double projection_bound(double delta) { return (1.0 - std::sqrt(1.0 - 4.0 * delta)) / 2.0; }

Element round_projection(const Element& a) {
  const double scale_ = std::max(1.0, op_norm(a));
  if (op_norm(a - adjoint(a)) > 1e-9 * scale_)
    fail(ErrorKind::precondition, "round_projection needs a self-adjoint element");
  const Element h = 0.5 * (a + adjoint(a));
  const double delta = op_norm(h * h - h);
  if (delta >= 0.25)
    fail(ErrorKind::gap, "|a^2 - a| = " + std::to_string(delta) + " >= 1/4: no spectral gap at 1/2");
  std::vector<Matrix> out;
  for (const Matrix& m : h.blocks()) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(m);
    const auto& v = es.eigenvectors();
    Matrix p = Matrix::Zero(m.rows(), m.cols());
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      if (es.eigenvalues()(i) > 0.5) p += v.col(i) * v.col(i).adjoint();
    out.push_back(std::move(p));
  }
  return Element(a.signature(), std::move(out));
}

Element round_unitary(const Element& a) {
  for (const Matrix& m : a.blocks()) {
    Eigen::JacobiSVD<Matrix> svd(m);
    if (svd.singularValues()(m.rows() - 1) <= 1e-8)
      fail(ErrorKind::gap, "round_unitary: element is not invertible");
  }
  return polar(a).v;
}

double matrix_unit_defect(const std::vector<Element>& x, int n) {
  if (n < 1 || x.size() != static_cast<std::size_t>(n * n))
    fail(ErrorKind::structural, "matrix units need n^2 elements");
  auto at = [&](int i, int j) -> const Element& { return x[static_cast<std::size_t>(i * n + j)]; };
  double worst = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double herm = op_norm(at(i, j) - adjoint(at(j, i)));
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          const Element prod = at(i, k) * at(l, j);
          worst = std::max(worst, op_norm(k == l ? at(i, j) - prod : prod) + herm);
        }
    }
  return worst + std::abs(op_norm(at(0, 0)) - 1.0);
}

std::vector<Element> round_matrix_units(const std::vector<Element>& x, int n) {
  const double defect = matrix_unit_defect(x, n);
  if (defect >= kMatrixUnitThreshold)
    fail(ErrorKind::gap, "matrix unit defect " + std::to_string(defect) + " is not below " +
                             std::to_string(kMatrixUnitThreshold));
  const Signature& sig = x[0].signature();
  std::vector<Element> out(x.size(), Element::zero(sig));
  for (std::size_t b = 0; b < sig.size(); ++b) {
    const Matrix& x11 = x[0].block(b);
    Eigen::SelfAdjointEigenSolver<Matrix> es(Matrix((x11 + x11.adjoint()) / 2.0));
    std::vector<Eigen::Index> keep;
    for (Eigen::Index i = 0; i < x11.rows(); ++i)
      if (es.eigenvalues()(i) > 0.5) keep.push_back(i);
    const Eigen::Index r = static_cast<Eigen::Index>(keep.size());
    if (r == 0) continue;
    const Eigen::Index d = x11.rows();
    if (n * r > d) fail(ErrorKind::gap, "rounded x_11 has rank too large for the block");
    Matrix u(d, r);
    for (Eigen::Index c = 0; c < r; ++c) u.col(c) = es.eigenvectors().col(keep[static_cast<std::size_t>(c)]);
    Matrix m(d, n * r);
    for (int j = 0; j < n; ++j) m.middleCols(j * r, r) = x[static_cast<std::size_t>(j * n)].block(b) * u;
    Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    if (svd.singularValues()(n * r - 1) <= 1e-8) fail(ErrorKind::gap, "matrix unit columns are degenerate");
    const Matrix q = svd.matrixU() * svd.matrixV().adjoint();
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        out[static_cast<std::size_t>(i * n + j)].block(b) = q.middleCols(i * r, r) * q.middleCols(j * r, r).adjoint();
  }
  return out;
}

std::vector<int> rank_profile(const Element& a, double tol) {
  const double cut = tol * op_norm(a);
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

bool mvn_oracle(const Element& p, const Element& q) {
  if (p.signature() != q.signature()) fail(ErrorKind::structural, "mvn_oracle: signatures differ");
  if (constraint_defect(p, Constraint::projection) > 1e-9 || constraint_defect(q, Constraint::projection) > 1e-9)
    fail(ErrorKind::precondition, "mvn_oracle needs projections");
  return rank_profile(p) == rank_profile(q);
}

bool cuntz_oracle(const Element& a, const Element& b) {
  if (a.signature() != b.signature()) fail(ErrorKind::structural, "cuntz_oracle: signatures differ");
  if (constraint_defect(a, Constraint::positive) > 1e-9 || constraint_defect(b, Constraint::positive) > 1e-9)
    fail(ErrorKind::precondition, "cuntz_oracle needs positive elements");
  const auto ra = rank_profile(a);
  const auto rb = rank_profile(b);
  for (std::size_t k = 0; k < ra.size(); ++k)
    if (ra[k] > rb[k]) return false;
  return true;
}

namespace {

using Tuple = std::vector<Element>;

struct Relation {
  std::function<Tuple(detail::Rng&)> exact;
  std::function<Tuple(detail::Rng&)> direction;
  std::function<double(const Tuple&)> value;
  std::function<Tuple(const Tuple&)> round;
};

Element gaussian(const Signature& sig, detail::Rng& rng, bool hermitian) {
  std::vector<Matrix> blocks;
  for (int n : sig.blocks()) {
    Matrix m(n, n);
    for (Eigen::Index j = 0; j < n; ++j)
      for (Eigen::Index i = 0; i < n; ++i) m(i, j) = Complex(rng.normal(), rng.normal());
    if (hermitian) m = ((m + m.adjoint()) / 2.0).eval();
    blocks.push_back(std::move(m));
  }
  Element e(sig, std::move(blocks));
  return (1.0 / op_norm(e)) * e;
}

Relation make_relation(const std::string& name, const Signature& sig) {
  Relation r;
  if (name == "projection") {
    r.exact = [sig](detail::Rng& rng) { return Tuple{sample_ball(sig, 1.0, Constraint::projection, rng.next())}; };
    r.direction = [sig](detail::Rng& rng) { return Tuple{gaussian(sig, rng, true)}; };
    r.value = [](const Tuple& t) { return op_norm(t[0] * t[0] - t[0]); };
    r.round = [](const Tuple& t) { return Tuple{round_projection(t[0])}; };
    return r;
  }
  if (name == "unitary") {
    r.exact = [sig](detail::Rng& rng) { return Tuple{sample_ball(sig, 1.0, Constraint::unitary, rng.next())}; };
    r.direction = [sig](detail::Rng& rng) { return Tuple{gaussian(sig, rng, false)}; };
    r.value = [sig](const Tuple& t) {
      const Element one = Element::identity(sig);
      return std::max(op_norm(adjoint(t[0]) * t[0] - one), op_norm(t[0] * adjoint(t[0]) - one));
    };
    r.round = [](const Tuple& t) { return Tuple{round_unitary(t[0])}; };
    return r;
  }
  if (name.rfind("matrix_units", 0) == 0) {
    int n = 2;
    if (name.size() > 12) {
      if (name[12] != ':') fail(ErrorKind::unknown_name, "unknown probe '" + name + "'");
      try {
        n = std::stoi(name.substr(13));
      } catch (const std::exception&) {
        fail(ErrorKind::parse, "bad matrix unit size in '" + name + "'");
      }
    }
    if (n < 1 || n > sig.max_block())
      fail(ErrorKind::precondition, "matrix_units:" + std::to_string(n) + " does not fit in " + sig.str());
    r.exact = [sig, n](detail::Rng& rng) {
      // n x n units tensored with 1_r in one eligible block, randomly rotated
      std::vector<std::size_t> eligible;
      for (std::size_t b = 0; b < sig.size(); ++b)
        if (sig.block(b) >= n) eligible.push_back(b);
      const std::size_t b = eligible[static_cast<std::size_t>(rng.below(static_cast<int>(eligible.size())))];
      const int d = sig.block(b);
      const int copies = d / n;
      const Matrix w = sample_ball(Signature({d}), 1.0, Constraint::unitary, rng.next()).block(0);
      Tuple out;
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          Matrix e = Matrix::Zero(d, d);
          for (int c = 0; c < copies; ++c) e(c * n + i, c * n + j) = 1.0;
          Element x = Element::zero(sig);
          x.block(b) = w * e * w.adjoint();
          out.push_back(std::move(x));
        }
      return out;
    };
    r.direction = [sig, n](detail::Rng& rng) {
      Tuple out;
      for (int i = 0; i < n * n; ++i) out.push_back(gaussian(sig, rng, false));
      return out;
    };
    r.value = [n](const Tuple& t) { return matrix_unit_defect(t, n); };
    r.round = [n](const Tuple& t) { return round_matrix_units(t, n); };
    return r;
  }
  fail(ErrorKind::unknown_name, "no rounding routine registered for '" + name + "'");
}

Tuple along(const Tuple& x, const Tuple& d, double t) {
  Tuple out;
  for (std::size_t i = 0; i < x.size(); ++i) out.push_back(x[i] + scale(t, d[i]));
  return out;
}

double tuple_distance(const Tuple& a, const Tuple& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, distance(a[i], b[i]));
  return worst;
}

}  // namespace

std::vector<std::string> probe_names() { return {"projection", "unitary", "matrix_units:n"}; }

StabilityProbeReport stability_probe(const std::string& name, const Signature& sig, std::vector<double> deltas,
                                     int samples, std::uint64_t seed, int workers) {
  if (deltas.empty()) fail(ErrorKind::precondition, "empty delta grid");
  if (samples < 1) fail(ErrorKind::budget, "samples must be >= 1");
  for (double d : deltas)
    if (!(d > 0)) fail(ErrorKind::precondition, "grid values must be positive");
  std::sort(deltas.begin(), deltas.end());
  const Relation rel = make_relation(name, sig);

  StabilityProbeReport rep;
  rep.name = name;
  rep.signature = sig;
  rep.deltas = deltas;
  rep.samples = samples;
  rep.seed = seed;
  std::vector<double> worst(deltas.size(), 0.0);
  std::vector<double> residual(deltas.size(), 0.0);
  detail::parallel_for(static_cast<int>(deltas.size()), workers, [&](int g) {
    const double delta = deltas[static_cast<std::size_t>(g)];
    for (int s = 0; s < samples; ++s) {
      detail::Rng rng(detail::mix(detail::mix(seed, static_cast<std::uint64_t>(g)), static_cast<std::uint64_t>(s)));
      const Tuple x = rel.exact(rng);
      const Tuple d = rel.direction(rng);
      // bracket, then bisect into [0.95 delta, delta]
      double lo = 0.0, hi = delta;
      for (int k = 0; k < 60 && rel.value(along(x, d, hi)) < delta; ++k) hi *= 2.0;
      Tuple y;
      bool found = false;
      for (int k = 0; k < 200; ++k) {
        const double mid = 0.5 * (lo + hi);
        y = along(x, d, mid);
        const double v = rel.value(y);
        if (v > delta) {
          hi = mid;
        } else if (v < 0.95 * delta) {
          lo = mid;
        } else {
          found = true;
          break;
        }
      }
      if (!found) continue;
      const Tuple z = rel.round(y);
      auto& w = worst[static_cast<std::size_t>(g)];
      w = std::max(w, tuple_distance(y, z));
      auto& res = residual[static_cast<std::size_t>(g)];
      res = std::max(res, rel.value(z));
    }
  });
  double run = 0.0;
  for (std::size_t g = 0; g < deltas.size(); ++g) {
    run = std::max(run, worst[g]);
    rep.eps.push_back(run);
    rep.residual = std::max(rep.residual, residual[g]);
    rep.constant = std::max(rep.constant, run / deltas[g]);
  }
  return rep;
}

}  // namespace cstarlogic
