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

#include <cstdint>
#include <string>
#include <vector>

#include "cstarlogic/algebra.hpp"

namespace cstarlogic {

// Admission threshold of round_matrix_units.
inline constexpr double kMatrixUnitThreshold = 0.05;

// (1 - sqrt(1 - 4 delta)) / 2: distance from t to {0, 1} when |t^2 - t| = delta.
double projection_bound(double delta);

// Spectral rounding at 1/2. Requires a self-adjoint (1e-9) and
// |a^2 - a| < 1/4; otherwise a gap error.
Element round_projection(const Element& a);

// Polar unitary; gap error when some singular value is <= 1e-8.
Element round_unitary(const Element& a);

// max_{ijkl} (|d_kl x_ij - x_ik x_lj| + |x_ij - x_ji*|) + ||x_11| - 1|, x row-major (x[i*n + j]).
double matrix_unit_defect(const std::vector<Element>& x, int n);

// Exact matrix units near x. Requires matrix_unit_defect(x) < kMatrixUnitThreshold.
// Per block: range U of the rounded x_11, thin polar factor Q of
// [x_11 U, ..., x_n1 U], then x'_ij = Q_i Q_j*.
std::vector<Element> round_matrix_units(const std::vector<Element>& x, int n);

// Singular values <= tol * |a| count as zero.
std::vector<int> rank_profile(const Element& a, double tol = 1e-8);
// Equal rank profiles; precondition error unless p, q are projections (1e-9).
bool mvn_oracle(const Element& p, const Element& q);
// rank(a_k) <= rank(b_k) in every block; a, b positive (1e-9).
bool cuntz_oracle(const Element& a, const Element& b);

struct StabilityProbeReport {
  std::string name;
  Signature signature;
  std::vector<double> deltas;  // ascending
  // eps[i]: worst rounding distance over samples whose relation value is at
  // most deltas[i] (running maximum, hence nondecreasing).
  std::vector<double> eps;
  // Largest rounding error left in the relation itself.
  double residual = 0.0;
  int samples = 0;
  std::uint64_t seed = 0;
  // max eps / delta.
  double constant = 0.0;
};

// Registered relations: "projection", "unitary", "matrix_units:n".
std::vector<std::string> probe_names();

// For each delta, perturb exact solutions along a Gaussian direction with the
// magnitude found by bisection so that the relation value lands in
// [0.95 delta, delta], round, and record the distance.
StabilityProbeReport stability_probe(const std::string& name, const Signature& sig, std::vector<double> deltas,
                                     int samples, std::uint64_t seed, int workers = 1);

}  // namespace cstarlogic
