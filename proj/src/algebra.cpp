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

#include "cstarlogic/algebra.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstring>
#include <sstream>

#include "detail/random.hpp"

namespace cstarlogic {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::structural: return "structural";
    case ErrorKind::precondition: return "precondition";
    case ErrorKind::domain: return "domain";
    case ErrorKind::sort: return "sort";
    case ErrorKind::parse: return "parse";
    case ErrorKind::modulus: return "modulus";
    case ErrorKind::budget: return "budget";
    case ErrorKind::missing_witness: return "missing-witness";
    case ErrorKind::gap: return "gap";
    case ErrorKind::unknown_name: return "unknown-name";
    case ErrorKind::io: return "io";
  }
  return "unknown";
}

Signature::Signature(std::vector<int> blocks) : blocks_(std::move(blocks)) {
  if (blocks_.empty()) fail(ErrorKind::structural, "signature needs at least one block");
  for (int n : blocks_)
    if (n < 1) fail(ErrorKind::structural, "block dimensions must be positive");
}

Signature Signature::parse(std::string_view text) {
  std::vector<int> blocks;
  std::size_t pos = 0;
  while (true) {
    std::size_t comma = text.find(',', pos);
    std::string_view tok = text.substr(pos, comma == std::string_view::npos ? text.npos : comma - pos);
    while (!tok.empty() && tok.front() == ' ') tok.remove_prefix(1);
    while (!tok.empty() && tok.back() == ' ') tok.remove_suffix(1);
    int v = 0;
    auto [end, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (tok.empty() || ec != std::errc() || end != tok.data() + tok.size() || v < 1)
      fail(ErrorKind::parse, "bad signature token '" + std::string(tok) + "'");
    blocks.push_back(v);
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return Signature(std::move(blocks));
}

int Signature::max_block() const { return *std::max_element(blocks_.begin(), blocks_.end()); }

int Signature::dimension() const {
  int d = 0;
  for (int n : blocks_) d += n * n;
  return d;
}

std::string Signature::str() const {
  std::string out;
  for (std::size_t i = 0; i < blocks_.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(blocks_[i]);
  }
  return out;
}

Signature amplify(const Signature& sig, int m) {
  if (m < 1) fail(ErrorKind::precondition, "amplification must be >= 1");
  std::vector<int> b(sig.blocks().begin(), sig.blocks().end());
  for (int& n : b) n *= m;
  return Signature(std::move(b));
}

std::string_view to_string(Constraint c) {
  switch (c) {
    case Constraint::none: return "none";
    case Constraint::self_adjoint: return "self-adjoint";
    case Constraint::positive: return "positive";
    case Constraint::projection: return "projection";
    case Constraint::unitary: return "unitary";
    case Constraint::partial_isometry: return "partial-isometry";
  }
  return "none";
}

std::string_view keyword(Constraint c) {
  switch (c) {
    case Constraint::none: return "ball";
    case Constraint::self_adjoint: return "sa";
    case Constraint::positive: return "pos";
    case Constraint::projection: return "proj";
    case Constraint::unitary: return "unit";
    case Constraint::partial_isometry: return "pisom";
  }
  return "ball";
}

Constraint constraint_from_keyword(std::string_view kw) {
  for (auto c : {Constraint::none, Constraint::self_adjoint, Constraint::positive,
                 Constraint::projection, Constraint::unitary, Constraint::partial_isometry})
    if (keyword(c) == kw) return c;
  fail(ErrorKind::parse, "unknown sort kind '" + std::string(kw) + "'");
}

Element::Element(Signature sig, std::vector<Matrix> blocks)
    : sig_(std::move(sig)), blocks_(std::move(blocks)) {
  if (blocks_.size() != sig_.size())
    fail(ErrorKind::structural, "block count does not match signature " + sig_.str());
  for (std::size_t i = 0; i < blocks_.size(); ++i) {
    if (blocks_[i].rows() != sig_.block(i) || blocks_[i].cols() != sig_.block(i))
      fail(ErrorKind::structural, "block shape does not match signature " + sig_.str());
  }
}

Element Element::zero(const Signature& sig) {
  std::vector<Matrix> b;
  for (int n : sig.blocks()) b.push_back(Matrix::Zero(n, n));
  return Element(sig, std::move(b));
}

Element Element::identity(const Signature& sig) {
  std::vector<Matrix> b;
  for (int n : sig.blocks()) b.push_back(Matrix::Identity(n, n));
  return Element(sig, std::move(b));
}

Element Element::from_matrix(const Matrix& m) {
  if (m.rows() != m.cols()) fail(ErrorKind::structural, "matrix must be square");
  return Element(Signature({static_cast<int>(m.rows())}), {m});
}

bool Element::operator==(const Element& other) const {
  if (sig_ != other.sig_) return false;
  for (std::size_t i = 0; i < blocks_.size(); ++i) {
    const Matrix& a = blocks_[i];
    const Matrix& b = other.blocks_[i];
    for (Eigen::Index k = 0; k < a.size(); ++k) {
      double x[2] = {a.data()[k].real(), a.data()[k].imag()};
      double y[2] = {b.data()[k].real(), b.data()[k].imag()};
      if (std::memcmp(x, y, sizeof x) != 0) return false;
    }
  }
  return true;
}

Element arith(const Element& a, const Element& b, ArithKind kind) {
  if (a.signature() != b.signature())
    fail(ErrorKind::structural,
         "signature mismatch: " + a.signature().str() + " vs " + b.signature().str());
  std::vector<Matrix> out;
  out.reserve(a.signature().size());
  for (std::size_t i = 0; i < a.signature().size(); ++i) {
    switch (kind) {
      case ArithKind::add: out.push_back(a.block(i) + b.block(i)); break;
      case ArithKind::sub: out.push_back(a.block(i) - b.block(i)); break;
      case ArithKind::mul: out.push_back(a.block(i) * b.block(i)); break;
    }
  }
  return Element(a.signature(), std::move(out));
}

Element adjoint(const Element& a) {
  std::vector<Matrix> out;
  for (const Matrix& m : a.blocks()) out.push_back(m.adjoint());
  return Element(a.signature(), std::move(out));
}

Element scale(Complex lambda, const Element& a) {
  std::vector<Matrix> out;
  for (const Matrix& m : a.blocks()) out.push_back(lambda * m);
  return Element(a.signature(), std::move(out));
}

Element operator+(const Element& a, const Element& b) { return arith(a, b, ArithKind::add); }
Element operator-(const Element& a, const Element& b) { return arith(a, b, ArithKind::sub); }
Element operator*(const Element& a, const Element& b) { return arith(a, b, ArithKind::mul); }
Element operator*(Complex lambda, const Element& a) { return scale(lambda, a); }

namespace {

bool exactly_hermitian(const Matrix& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = i; j < m.cols(); ++j)
      if (m(i, j) != std::conj(m(j, i))) return false;
  return true;
}

Matrix hermitian_part(const Matrix& m) {
  Matrix h = 0.5 * (m + m.adjoint());
  // Force exact symmetry against rounding in the sum above.
  for (Eigen::Index i = 0; i < h.rows(); ++i) {
    h(i, i) = Complex(h(i, i).real(), 0.0);
    for (Eigen::Index j = i + 1; j < h.cols(); ++j) h(j, i) = std::conj(h(i, j));
  }
  return h;
}

Matrix assemble(const Matrix& v, const Eigen::VectorXd& d) {
  return hermitian_part(v * d.cast<Complex>().asDiagonal() * v.adjoint());
}

}  // namespace

double op_norm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  if (m.rows() == 1) return std::abs(m(0, 0));
  if (exactly_hermitian(m)) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
    const auto& ev = es.eigenvalues();
    return std::max(std::abs(ev(0)), std::abs(ev(ev.size() - 1)));
  }
  // largest eigenvalue of the Gram matrix; absolute error stays at eps*|m|
  const Matrix g = m.adjoint() * m;
  Eigen::SelfAdjointEigenSolver<Matrix> es(g, Eigen::EigenvaluesOnly);
  return std::sqrt(std::max(0.0, es.eigenvalues()(g.rows() - 1)));
}

double op_norm(const Element& a) {
  double r = 0.0;
  for (const Matrix& m : a.blocks()) r = std::max(r, op_norm(m));
  return r;
}

double distance(const Element& a, const Element& b) { return op_norm(a - b); }

Element embed_diag(const Element& a, int m) {
  if (m < 1) fail(ErrorKind::precondition, "amplification must be >= 1");
  std::vector<Matrix> out;
  for (const Matrix& b : a.blocks()) {
    Eigen::Index n = b.rows();
    Matrix r = Matrix::Zero(n * m, n * m);
    for (int k = 0; k < m; ++k) r.block(k * n, k * n, n, n) = b;
    out.push_back(std::move(r));
  }
  return Element(amplify(a.signature(), m), std::move(out));
}

Element tensor_scalar(const Matrix& c, const Signature& ambient) {
  const Eigen::Index m = c.rows();
  std::vector<Matrix> out;
  for (int n : ambient.blocks()) {
    Matrix r = Matrix::Zero(m * n, m * n);
    for (Eigen::Index i = 0; i < m; ++i)
      for (Eigen::Index j = 0; j < m; ++j)
        if (c(i, j) != Complex(0.0)) r.block(i * n, j * n, n, n).diagonal().setConstant(c(i, j));
    out.push_back(std::move(r));
  }
  return Element(amplify(ambient, static_cast<int>(m)), std::move(out));
}

Matrix scalar_part(const Element& a, int m) {
  Matrix c = Matrix::Zero(m, m);
  int total = 0;
  for (std::size_t b = 0; b < a.signature().size(); ++b) {
    const int n = a.signature().block(b) / m;
    if (n * m != a.signature().block(b))
      fail(ErrorKind::structural, "element is not in an amplification by " + std::to_string(m));
    total += n;
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) c(i, j) += a.block(b).block(i * n, j * n, n, n).trace();
  }
  return c / static_cast<double>(total);
}

Matrix constrain_block(const Matrix& m, Constraint c) {
  const Eigen::Index n = m.rows();
  switch (c) {
    case Constraint::none:
      return m;
    case Constraint::self_adjoint:
      return hermitian_part(m);
    case Constraint::positive: {
      Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian_part(m));
      Eigen::VectorXd d = es.eigenvalues().cwiseMax(0.0);
      return assemble(es.eigenvectors(), d);
    }
    case Constraint::projection: {
      Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian_part(m));
      Eigen::VectorXd d(n);
      for (Eigen::Index i = 0; i < n; ++i) d(i) = es.eigenvalues()(i) > 0.5 ? 1.0 : 0.0;
      return assemble(es.eigenvectors(), d);
    }
    case Constraint::unitary: {
      Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
      return svd.matrixU() * svd.matrixV().adjoint();
    }
    case Constraint::partial_isometry: {
      // m V_k S_k^{-1} V_k^* over singular values >= 1/2, from the Gram matrix
      Eigen::SelfAdjointEigenSolver<Matrix> es(m.adjoint() * m);
      Eigen::VectorXd d(n);
      for (Eigen::Index i = 0; i < n; ++i) {
        const double s = std::sqrt(std::max(0.0, es.eigenvalues()(i)));
        d(i) = s >= 0.5 ? 1.0 / s : 0.0;
      }
      const Matrix& v = es.eigenvectors();
      return m * v * d.cast<Complex>().asDiagonal() * v.adjoint();
    }
  }
  return m;
}

Element retract(const Element& a, Constraint c, double radius) {
  std::vector<Matrix> out;
  for (const Matrix& m : a.blocks()) out.push_back(constrain_block(m, c));
  Element r(a.signature(), std::move(out));
  // these have norm <= 1 and sorts over them carry radius >= 1
  if ((c == Constraint::projection || c == Constraint::unitary || c == Constraint::partial_isometry) && radius >= 1.0)
    return r;
  double nrm = op_norm(r);
  if (nrm > radius) r = scale(radius / nrm, r);
  return r;
}

double constraint_defect(const Element& a, Constraint c) {
  const Element one = Element::identity(a.signature());
  const Element as = adjoint(a);
  switch (c) {
    case Constraint::none:
      return 0.0;
    case Constraint::self_adjoint:
      return op_norm(a - as);
    case Constraint::positive: {
      double neg = 0.0;
      for (const Matrix& m : a.blocks()) {
        Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian_part(m), Eigen::EigenvaluesOnly);
        neg = std::max(neg, -es.eigenvalues()(0));
      }
      return op_norm(a - as) + neg;
    }
    case Constraint::projection:
      return op_norm(a - as) + op_norm(a * a - a);
    case Constraint::unitary:
      return op_norm(as * a - one) + op_norm(a * as - one);
    case Constraint::partial_isometry: {
      Element e = as * a;
      return op_norm(e * e - e);
    }
  }
  return 0.0;
}

Element sample_ball(const Signature& sig, double radius, Constraint c, std::uint64_t seed) {
  if (!(radius > 0)) fail(ErrorKind::precondition, "radius must be positive");
  detail::Rng rng(seed);
  const double spread = 2.0 * rng.uniform();
  std::vector<Matrix> blocks;
  for (int n : sig.blocks()) {
    const double s = radius * spread / std::sqrt(2.0 * n);
    Matrix m(n, n);
    for (Eigen::Index j = 0; j < n; ++j)
      for (Eigen::Index i = 0; i < n; ++i) {
        double re = rng.normal();
        double im = rng.normal();
        m(i, j) = Complex(s * re, s * im);
      }
    blocks.push_back(std::move(m));
  }
  return retract(Element(sig, std::move(blocks)), c, radius);
}

bool is_normal(const Element& a, double tol) {
  for (const Matrix& m : a.blocks())
    if (op_norm(Matrix(m * m.adjoint() - m.adjoint() * m)) > tol) return false;
  return true;
}

namespace {

Complex apply_checked(const ScalarFunction& f, Complex z) {
  constexpr double tol = 1e-9;
  if (!f.complex_domain) {
    if (std::abs(z.imag()) > tol || !f.domain.contains(z.real(), tol))
      fail(ErrorKind::domain, "spectrum point outside the domain of " + f.id);
    z = Complex(std::clamp(z.real(), f.domain.lo, f.domain.hi), 0.0);
  }
  return f(z);
}

}  // namespace

Element apply_scalar_function(const Element& a, const ScalarFunction& f, Intent intent) {
  std::vector<Matrix> out;
  for (const Matrix& m : a.blocks()) {
    const bool sa = intent == Intent::self_adjoint || exactly_hermitian(m);
    if (sa) {
      Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian_part(m));
      const auto n = m.rows();
      Eigen::VectorXcd d(n);
      for (Eigen::Index i = 0; i < n; ++i) d(i) = apply_checked(f, es.eigenvalues()(i));
      const Matrix& v = es.eigenvectors();
      Matrix r = v * d.asDiagonal() * v.adjoint();
      out.push_back(f.real_valued ? hermitian_part(r) : r);
      continue;
    }
    if (op_norm(Matrix(m * m.adjoint() - m.adjoint() * m)) > 1e-9)
      fail(ErrorKind::precondition, "functional calculus needs a normal element");
    Eigen::ComplexSchur<Matrix> schur(m);
    const Matrix& u = schur.matrixU();
    const auto n = m.rows();
    Eigen::VectorXcd d(n);
    for (Eigen::Index i = 0; i < n; ++i) d(i) = apply_checked(f, schur.matrixT()(i, i));
    out.push_back(u * d.asDiagonal() * u.adjoint());
  }
  return Element(a.signature(), std::move(out));
}

std::vector<std::vector<Complex>> spectrum(const Element& a) {
  std::vector<std::vector<Complex>> out;
  for (const Matrix& m : a.blocks()) {
    std::vector<Complex> ev;
    if (exactly_hermitian(m)) {
      Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
      for (Eigen::Index i = 0; i < m.rows(); ++i) ev.emplace_back(es.eigenvalues()(i), 0.0);
    } else {
      Eigen::ComplexEigenSolver<Matrix> es(m, false);
      for (Eigen::Index i = 0; i < m.rows(); ++i) ev.push_back(es.eigenvalues()(i));
    }
    std::sort(ev.begin(), ev.end(), [](Complex x, Complex y) {
      return x.real() != y.real() ? x.real() < y.real() : x.imag() < y.imag();
    });
    out.push_back(std::move(ev));
  }
  return out;
}

Polar polar(const Element& a) {
  std::vector<Matrix> vs, ps;
  for (const Matrix& m : a.blocks()) {
    const auto n = m.rows();
    Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const auto& s = svd.singularValues();
    const Matrix& u = svd.matrixU();
    const Matrix& v = svd.matrixV();
    ps.push_back(assemble(v, s));
    if (s(n - 1) > 1e-8) {
      vs.push_back(u * v.adjoint());
    } else {
      Eigen::VectorXd d(n);
      for (Eigen::Index i = 0; i < n; ++i) d(i) = s(i) > 1e-10 * std::max(1.0, s(0)) ? 1.0 : 0.0;
      vs.push_back(u * d.cast<Complex>().asDiagonal() * v.adjoint());
    }
  }
  return {Element(a.signature(), std::move(vs)), Element(a.signature(), std::move(ps))};
}

}  // namespace cstarlogic
