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

#include "cstarlogic/cpmaps.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "detail/pool.hpp"
#include "detail/random.hpp"

namespace cstarlogic {

ChoiMatrix::ChoiMatrix(Signature source, Signature target, std::vector<Matrix> blocks)
    : source_(std::move(source)), target_(std::move(target)), blocks_(std::move(blocks)) {
  if (blocks_.size() != source_.size() * target_.size())
    fail(ErrorKind::structural, "Choi matrix needs one block per (source, target) block pair");
  for (std::size_t k = 0; k < source_.size(); ++k)
    for (std::size_t l = 0; l < target_.size(); ++l) {
      const Matrix& c = block(k, l);
      const Eigen::Index d = static_cast<Eigen::Index>(source_.block(k)) * target_.block(l);
      if (c.rows() != d || c.cols() != d) fail(ErrorKind::structural, "Choi block has the wrong shape");
    }
}

ChoiMatrix ChoiMatrix::zero(const Signature& source, const Signature& target) {
  std::vector<Matrix> blocks;
  for (int n : source.blocks())
    for (int m : target.blocks()) blocks.push_back(Matrix::Zero(n * m, n * m));
  return ChoiMatrix(source, target, std::move(blocks));
}

ChoiMatrix ChoiMatrix::identity(const Signature& sig) {
  return from_map(sig, sig, [](const Element& a) { return a; });
}

Element matrix_unit(const Signature& sig, std::size_t k, int i, int j) {
  Element e = Element::zero(sig);
  e.block(k)(i, j) = 1.0;
  return e;
}

ChoiMatrix ChoiMatrix::from_map(const Signature& source, const Signature& target,
                                const std::function<Element(const Element&)>& map) {
  ChoiMatrix c = zero(source, target);
  for (std::size_t k = 0; k < source.size(); ++k) {
    const int n = source.block(k);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        const Element img = map(matrix_unit(source, k, i, j));
        if (img.signature() != target) fail(ErrorKind::structural, "map image is not in the target algebra");
        for (std::size_t l = 0; l < target.size(); ++l) {
          const int m = target.block(l);
          c.block(k, l).block(i * m, j * m, m, m) = img.block(l);
        }
      }
  }
  return c;
}

Matrix ChoiMatrix::matrix() const {
  Eigen::Index d = 0;
  for (const Matrix& b : blocks_) d += b.rows();
  Matrix out = Matrix::Zero(d, d);
  Eigen::Index at = 0;
  for (const Matrix& b : blocks_) {
    out.block(at, at, b.rows(), b.cols()) = b;
    at += b.rows();
  }
  return out;
}

Element apply(const ChoiMatrix& c, const Element& a) {
  if (a.signature() != c.source())
    fail(ErrorKind::structural, "element in " + a.signature().str() + ", map source is " + c.source().str());
  std::vector<Matrix> out;
  for (std::size_t l = 0; l < c.target().size(); ++l) {
    const int m = c.target().block(l);
    Matrix acc = Matrix::Zero(m, m);
    for (std::size_t k = 0; k < c.source().size(); ++k) {
      const int n = c.source().block(k);
      const Matrix& ck = c.block(k, l);
      const Matrix& ak = a.block(k);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          if (ak(i, j) != 0.0) acc += ak(i, j) * ck.block(i * m, j * m, m, m);
    }
    out.push_back(std::move(acc));
  }
  return Element(c.target(), std::move(out));
}

CpcCheck is_cpc(const ChoiMatrix& c) {
  CpcCheck r;
  for (const Matrix& b : c.blocks()) {
    const Matrix h = (b + b.adjoint()) / 2.0;
    Eigen::SelfAdjointEigenSolver<Matrix> es(h, Eigen::EigenvaluesOnly);
    r.cp_defect = std::max(r.cp_defect, -es.eigenvalues()(0));
    // a non-Hermitian Choi block is not CP either
    r.cp_defect = std::max(r.cp_defect, op_norm(Matrix((b - b.adjoint()) / 2.0)));
  }
  r.norm_of_unit = op_norm(apply(c, Element::identity(c.source())));
  return r;
}

ChoiMatrix project_cpc(const ChoiMatrix& c) {
  ChoiMatrix out = c;
  for (Matrix& b : out.blocks()) {
    const Matrix h = (b + b.adjoint()) / 2.0;
    Eigen::SelfAdjointEigenSolver<Matrix> es(h);
    const Eigen::VectorXd d = es.eigenvalues().cwiseMax(0.0);
    b = es.eigenvectors() * d.cast<Complex>().asDiagonal() * es.eigenvectors().adjoint();
  }
  const double u = op_norm(apply(out, Element::identity(out.source())));
  if (u > 1.0)
    for (Matrix& b : out.blocks()) b /= u;
  return out;
}

double factorization_defect(const Factorization& f, const std::vector<Element>& tuple) {
  double worst = 0.0;
  for (const Element& a : tuple) worst = std::max(worst, op_norm(a - apply(f.psi, apply(f.phi, a))));
  return worst;
}

Factorization pad(const Factorization& f) {
  const int n = f.phi.target().block(0);
  const Signature big({n + 1});
  const Signature small({n});
  Factorization out;
  out.phi = ChoiMatrix::from_map(f.phi.source(), big, [&](const Element& a) {
    Matrix m = Matrix::Zero(n + 1, n + 1);
    m.topLeftCorner(n, n) = apply(f.phi, a).block(0);
    return Element(big, {m});
  });
  out.psi = ChoiMatrix::from_map(big, f.psi.target(), [&](const Element& c) {
    return apply(f.psi, Element(small, {Matrix(c.block(0).topLeftCorner(n, n))}));
  });
  out.value = f.value;
  return out;
}

namespace {

// Random Hermitian direction with unit Frobenius norm in one Choi block.
void perturb(ChoiMatrix& c, double step, detail::Rng& rng) {
  auto& blocks = c.blocks();
  Matrix& b = blocks[static_cast<std::size_t>(rng.below(static_cast<int>(blocks.size())))];
  Matrix h(b.rows(), b.cols());
  for (Eigen::Index j = 0; j < h.cols(); ++j)
    for (Eigen::Index i = 0; i < h.rows(); ++i) h(i, j) = Complex(rng.normal(), rng.normal());
  h = (h + h.adjoint()).eval();
  const double f = h.norm();
  if (f > 0) b += (step / f) * h;
}

ChoiMatrix random_cpc(const Signature& source, const Signature& target, detail::Rng& rng) {
  ChoiMatrix c = ChoiMatrix::zero(source, target);
  for (Matrix& b : c.blocks()) {
    Matrix g(b.rows(), b.cols());
    for (Eigen::Index j = 0; j < g.cols(); ++j)
      for (Eigen::Index i = 0; i < g.rows(); ++i) g(i, j) = Complex(rng.normal(), rng.normal());
    b = g * g.adjoint() / static_cast<double>(b.rows());
  }
  c = project_cpc(c);
  // spread the scale of phi(1) over [0, 1)
  const double t = rng.uniform();
  for (Matrix& b : c.blocks()) b *= t;
  return c;
}

// Offsets of the chosen source blocks inside M_n; empty when they do not fit.
std::vector<int> corner_offsets(const Signature& sig, unsigned mask, int n) {
  std::vector<int> off(sig.size(), -1);
  int at = 0;
  for (std::size_t k = 0; k < sig.size(); ++k)
    if (mask & (1u << k)) {
      off[k] = at;
      at += sig.block(k);
    }
  if (at > n) return {};
  return off;
}

// a -> (selected blocks of a on the diagonal of M_n); c -> compressions.
Factorization corner_factorization(const Signature& sig, const std::vector<int>& off, int n) {
  const Signature mn({n});
  Factorization f;
  f.phi = ChoiMatrix::from_map(sig, mn, [&](const Element& a) {
    Matrix m = Matrix::Zero(n, n);
    for (std::size_t k = 0; k < sig.size(); ++k)
      if (off[k] >= 0) m.block(off[k], off[k], sig.block(k), sig.block(k)) = a.block(k);
    return Element(mn, {m});
  });
  f.psi = ChoiMatrix::from_map(mn, sig, [&](const Element& c) {
    Element out = Element::zero(sig);
    for (std::size_t k = 0; k < sig.size(); ++k)
      if (off[k] >= 0) out.block(k) = c.block(0).block(off[k], off[k], sig.block(k), sig.block(k));
    return out;
  });
  return f;
}

// Vector state on block k followed by c -> c(0,0) * 1.
Factorization state_factorization(const Signature& sig, std::size_t k, int n) {
  const Signature mn({n});
  Factorization f;
  f.phi = ChoiMatrix::from_map(sig, mn, [&](const Element& a) {
    Matrix m = Matrix::Zero(n, n);
    m(0, 0) = a.block(k)(0, 0);
    return Element(mn, {m});
  });
  f.psi = ChoiMatrix::from_map(mn, sig, [&](const Element& c) { return c.block(0)(0, 0) * Element::identity(sig); });
  return f;
}

struct StepControl {
  double step;
  double max_step;
  double decay;
  void success() { step = std::min(max_step, step / std::pow(decay, 4)); }
  void failure() { step *= decay; }
};

void check_tuple(const Signature& sig, const std::vector<Element>& tuple, int n) {
  if (n < 1) fail(ErrorKind::precondition, "n must be >= 1");
  for (const Element& a : tuple)
    if (a.signature() != sig) fail(ErrorKind::structural, "tuple element outside " + sig.str());
}

}  // namespace

Factorization estimate_Rn(const Signature& sig, const std::vector<Element>& tuple, int n, const EvalConfig& cfg,
                          const Factorization* warm) {
  check_tuple(sig, tuple, n);
  if (cfg.restarts < 1 || cfg.iterations < 1) fail(ErrorKind::budget, "restarts and iterations must be >= 1");
  const Signature mn({n});

  std::vector<Factorization> starts;
  if (warm) {
    if (warm->phi.source() != sig || warm->phi.target() != mn || warm->psi.source() != mn ||
        warm->psi.target() != sig)
      fail(ErrorKind::structural, "warm start has the wrong shape");
    starts.push_back(*warm);
  }
  starts.push_back(Factorization{ChoiMatrix::zero(sig, mn), ChoiMatrix::zero(mn, sig), 0.0});
  for (unsigned mask = 1; mask < (1u << sig.size()); ++mask) {
    auto off = corner_offsets(sig, mask, n);
    if (!off.empty()) starts.push_back(corner_factorization(sig, off, n));
  }
  for (std::size_t k = 0; k < sig.size(); ++k) starts.push_back(state_factorization(sig, k, n));
  for (auto& s : starts) s.value = factorization_defect(s, tuple);
  // best structured starts first; the warm start keeps slot 0
  std::stable_sort(starts.begin() + (warm ? 1 : 0), starts.end(),
                   [](const Factorization& a, const Factorization& b) { return a.value < b.value; });

  std::vector<Factorization> runs(static_cast<std::size_t>(cfg.restarts));
  detail::parallel_for(cfg.restarts, cfg.workers, [&](int r) {
    detail::Rng rng(detail::mix(cfg.seed, static_cast<std::uint64_t>(r)));
    Factorization x;
    if (r < static_cast<int>(starts.size())) {
      x = starts[static_cast<std::size_t>(r)];
    } else {
      x.phi = random_cpc(sig, mn, rng);
      x.psi = random_cpc(mn, sig, rng);
      x.value = factorization_defect(x, tuple);
    }
    StepControl sc{cfg.step, cfg.step, cfg.decay};
    for (int it = 0; it < cfg.iterations && x.value > 0.0; ++it) {
      Factorization cand = x;
      ChoiMatrix& target = it % 2 == 0 ? cand.phi : cand.psi;
      perturb(target, sc.step, rng);
      target = project_cpc(target);
      cand.value = factorization_defect(cand, tuple);
      if (cand.value < x.value) {
        x = std::move(cand);
        sc.success();
        continue;
      }
      if (cand.value == x.value) x = std::move(cand);
      sc.failure();
      if (sc.step < cfg.tolerance) break;
    }
    runs[static_cast<std::size_t>(r)] = std::move(x);
  });
  std::size_t best = 0;
  for (std::size_t r = 1; r < runs.size(); ++r)
    if (runs[r].value < runs[best].value) best = r;
  // structured starts beyond the restart budget still count
  for (std::size_t s = runs.size(); s < starts.size(); ++s)
    if (starts[s].value < runs[best].value) return starts[s];
  return runs[best];
}

double order_zero_defect(const std::vector<std::vector<Element>>& images, const Signature& F) {
  if (images.size() != F.size()) fail(ErrorKind::structural, "one image family per block of F is required");
  for (std::size_t l = 0; l < F.size(); ++l) {
    const std::size_t k = static_cast<std::size_t>(F.block(l));
    if (images[l].size() != k * k)
      fail(ErrorKind::structural, "block " + std::to_string(l + 1) + " of F needs " + std::to_string(k * k) + " images");
  }
  double total = 0.0;
  for (std::size_t l = 0; l < F.size(); ++l) {
    const int k = F.block(l);
    auto x = [&](int i, int j) -> const Element& { return images[l][static_cast<std::size_t>(i * k + j)]; };
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j) total += op_norm(x(i, j) - adjoint(x(j, i)));
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j)
        for (int m = 0; m < k; ++m)
          for (int n = 0; n < k; ++n) {
            Element prod = x(i, j) * x(m, n);
            total += op_norm(j == m ? prod - x(i, i) * x(i, n) : prod);
          }
    Element units = x(0, 0);
    for (int i = 1; i < k; ++i) units = units + x(i, i);
    total += std::max(op_norm(units) - 1.0, 0.0);
  }
  for (std::size_t l = 0; l < F.size(); ++l)
    for (std::size_t m = l + 1; m < F.size(); ++m)
      for (int i = 0; i < F.block(l); ++i)
        for (int j = 0; j < F.block(m); ++j)
          total += op_norm(images[l][static_cast<std::size_t>(i * F.block(l) + i)] *
                           images[m][static_cast<std::size_t>(j * F.block(m) + j)]);
  return total;
}

double qd_defect(const ChoiMatrix& phi, const std::vector<Element>& tuple) {
  std::vector<Element> img;
  double worst = 0.0;
  for (const Element& a : tuple) {
    img.push_back(apply(phi, a));
    worst = std::max(worst, op_norm(a) - op_norm(img.back()));
  }
  for (std::size_t i = 0; i < tuple.size(); ++i)
    for (std::size_t j = 0; j < tuple.size(); ++j)
      worst = std::max(worst, op_norm(apply(phi, tuple[i] * tuple[j]) - img[i] * img[j]));
  return worst;
}

QdEstimate estimate_Qn(const Signature& sig, const std::vector<Element>& tuple, int n, const EvalConfig& cfg) {
  check_tuple(sig, tuple, n);
  if (cfg.restarts < 1 || cfg.iterations < 1) fail(ErrorKind::budget, "restarts and iterations must be >= 1");
  const Signature mn({n});
  std::vector<QdEstimate> starts;
  starts.push_back(QdEstimate{ChoiMatrix::zero(sig, mn), 0.0});
  for (unsigned mask = 1; mask < (1u << sig.size()); ++mask) {
    auto off = corner_offsets(sig, mask, n);
    if (!off.empty()) starts.push_back(QdEstimate{corner_factorization(sig, off, n).phi, 0.0});
  }
  for (auto& s : starts) s.value = qd_defect(s.phi, tuple);
  std::stable_sort(starts.begin(), starts.end(),
                   [](const QdEstimate& a, const QdEstimate& b) { return a.value < b.value; });

  std::vector<QdEstimate> runs(static_cast<std::size_t>(cfg.restarts));
  detail::parallel_for(cfg.restarts, cfg.workers, [&](int r) {
    detail::Rng rng(detail::mix(cfg.seed ^ 0x51d, static_cast<std::uint64_t>(r)));
    QdEstimate x;
    if (r < static_cast<int>(starts.size())) {
      x = starts[static_cast<std::size_t>(r)];
    } else {
      x.phi = random_cpc(sig, mn, rng);
      x.value = qd_defect(x.phi, tuple);
    }
    StepControl sc{cfg.step, cfg.step, cfg.decay};
    for (int it = 0; it < cfg.iterations && x.value > 0.0; ++it) {
      QdEstimate cand = x;
      perturb(cand.phi, sc.step, rng);
      cand.phi = project_cpc(cand.phi);
      cand.value = qd_defect(cand.phi, tuple);
      if (cand.value < x.value) {
        x = std::move(cand);
        sc.success();
        continue;
      }
      if (cand.value == x.value) x = std::move(cand);
      sc.failure();
      if (sc.step < cfg.tolerance) break;
    }
    runs[static_cast<std::size_t>(r)] = std::move(x);
  });
  std::size_t best = 0;
  for (std::size_t r = 1; r < runs.size(); ++r)
    if (runs[r].value < runs[best].value) best = r;
  for (std::size_t s = runs.size(); s < starts.size(); ++s)
    if (starts[s].value < runs[best].value) return starts[s];
  return runs[best];
}

}  // namespace cstarlogic
