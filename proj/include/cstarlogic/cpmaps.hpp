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

#include <functional>
#include <vector>

#include "cstarlogic/evaluator.hpp"

namespace cstarlogic {

// Linear map phi: source -> target. For source block k (size n_k) and target
// block l (size m_l) the Choi block C_kl has size n_k*m_l with
//   C_kl(i*m_l + r, j*m_l + s) = phi(e^k_ij)_l (r, s).
// phi is completely positive iff every C_kl is positive semidefinite.
class ChoiMatrix {
 public:
  ChoiMatrix() = default;
  ChoiMatrix(Signature source, Signature target, std::vector<Matrix> blocks);

  static ChoiMatrix zero(const Signature& source, const Signature& target);
  static ChoiMatrix identity(const Signature& sig);
  static ChoiMatrix from_map(const Signature& source, const Signature& target,
                             const std::function<Element(const Element&)>& map);

  const Signature& source() const { return source_; }
  const Signature& target() const { return target_; }
  const Matrix& block(std::size_t k, std::size_t l) const { return blocks_[k * target_.size() + l]; }
  Matrix& block(std::size_t k, std::size_t l) { return blocks_[k * target_.size() + l]; }
  std::vector<Matrix>& blocks() { return blocks_; }
  const std::vector<Matrix>& blocks() const { return blocks_; }

  // Block-diagonal matrix of dimension dim(source)*dim(target) (sum over k,l
  // of n_k*m_l).
  Matrix matrix() const;

 private:
  Signature source_;
  Signature target_;
  std::vector<Matrix> blocks_;
};

Element apply(const ChoiMatrix& m, const Element& a);

// Unit of the source algebra with the matrix units e^k_ij as an Element.
Element matrix_unit(const Signature& sig, std::size_t k, int i, int j);

struct CpcCheck {
  double cp_defect = 0.0;     // max(0, -lambda_min)
  double norm_of_unit = 0.0;  // |phi(1)|
  bool cpc(double tol = 1e-9) const { return cp_defect <= tol && norm_of_unit <= 1.0 + tol; }
};
CpcCheck is_cpc(const ChoiMatrix& m);

// PSD truncation of every block, then scaling so that |phi(1)| <= 1.
ChoiMatrix project_cpc(const ChoiMatrix& m);

// psi o phi with phi: A -> M_n, psi: M_n -> A.
struct Factorization {
  ChoiMatrix phi;
  ChoiMatrix psi;
  double value = 0.0;
};

// max_i |a_i - psi(phi(a_i))|.
double factorization_defect(const Factorization& f, const std::vector<Element>& tuple);

// Same maps through M_{n+1} (phi into the upper-left corner, psi after compression).
Factorization pad(const Factorization& f);

// Upper bound for R_n(a) = inf over c.p.c. phi, psi of |a - psi(phi(a))|.
// Alternating random search over the two Choi matrices with projection
// after every step. Starts: zero maps, block compressions that fit in M_n,
// and `warm` when given. The returned value never exceeds the best start.
Factorization estimate_Rn(const Signature& sig, const std::vector<Element>& tuple, int n, const EvalConfig& cfg,
                          const Factorization* warm = nullptr);

// Order-zero relations at images[l][i*k_l + j] = phi(e^l_ij) for F with blocks k_l:
//   sum_l (sum_ij |x_ij - x_ji*| + sum_ijmn |x_ij x_mn - d_jm x_ii x_in| + (|sum_i x_ii| -. 1))
//   + sum_{l<l'} sum_ij |x^l_ii x^l'_jj|.
double order_zero_defect(const std::vector<std::vector<Element>>& images, const Signature& F);

struct QdEstimate {
  ChoiMatrix phi;
  double value = 0.0;
};

// max over i, j of |a_j| - |phi(a_j)| and |phi(a_i a_j) - phi(a_i) phi(a_j)|.
double qd_defect(const ChoiMatrix& phi, const std::vector<Element>& tuple);

// Upper bound for Q_n(a) (inf over c.p.c. phi: A -> M_n of qd_defect).
QdEstimate estimate_Qn(const Signature& sig, const std::vector<Element>& tuple, int n, const EvalConfig& cfg);

}  // namespace cstarlogic
