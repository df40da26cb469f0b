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

#include <algorithm>
#include <cmath>
#include <limits>

#include "cstarlogic/algebra.hpp"

namespace cstarlogic {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct FnInfo {
  std::string_view name;
  std::size_t params;
};

constexpr FnInfo kFunctions[] = {
    {"sqrt", 0}, {"abs", 0}, {"pos", 0}, {"neg", 0}, {"cut", 1}, {"ramp", 2}, {"expi", 0},
};

double constant(double c, double, double) { return c; }

}  // namespace

bool is_function_name(std::string_view name) {
  return std::any_of(std::begin(kFunctions), std::end(kFunctions),
                     [&](const FnInfo& s) { return s.name == name; });
}

std::size_t function_param_count(std::string_view name) {
  for (const FnInfo& s : kFunctions)
    if (s.name == name) return s.params;
  fail(ErrorKind::unknown_name, "unknown function '" + std::string(name) + "'");
}

double ScalarFunction::sup_abs_on(double lo, double hi) const {
  double r = std::max(std::abs(fn(lo)), std::abs(fn(hi)));
  if (lo < 0 && hi > 0) r = std::max(r, std::abs(fn(0.0)));
  return r;
}

ScalarFunction make_function(std::string_view name, std::span<const double> params) {
  if (params.size() != function_param_count(name))
    fail(ErrorKind::precondition, "wrong number of parameters for '" + std::string(name) + "'");
  using std::placeholders::_1;
  using std::placeholders::_2;
  ScalarFunction f;
  f.id = std::string(name);
  f.domain = {-kInf, kInf};
  f.lipschitz_on = std::bind(constant, 1.0, _1, _2);
  if (name == "sqrt") {
    f.domain = {0.0, kInf};
    f.fn = [](Complex t) { return Complex(std::sqrt(t.real()), 0.0); };
    f.lipschitz_on = [](double lo, double) { return lo > 0 ? 0.5 / std::sqrt(lo) : kInf; };
  } else if (name == "abs") {
    f.complex_domain = true;
    f.fn = [](Complex t) { return Complex(std::abs(t), 0.0); };
  } else if (name == "pos") {
    f.fn = [](Complex t) { return Complex(std::max(t.real(), 0.0), 0.0); };
  } else if (name == "neg") {
    f.fn = [](Complex t) { return Complex(std::max(-t.real(), 0.0), 0.0); };
  } else if (name == "cut") {
    const double d = params[0];
    f.fn = [d](Complex t) { return Complex(std::max(t.real() - d, 0.0), 0.0); };
    f.zero_preserving = d >= 0;
    f.id = "cut{" + std::to_string(d) + "}";
  } else if (name == "ramp") {
    const double a = params[0], b = params[1];
    if (!(b > a)) fail(ErrorKind::precondition, "ramp needs a < b");
    f.fn = [a, b](Complex t) {
      return Complex(std::clamp((t.real() - a) / (b - a), 0.0, 1.0), 0.0);
    };
    f.lipschitz_on = std::bind(constant, 1.0 / (b - a), _1, _2);
    f.zero_preserving = a >= 0;
  } else if (name == "expi") {
    f.real_valued = false;
    f.zero_preserving = false;
    f.fn = [](Complex t) { return std::exp(Complex(0.0, t.real())); };
  }
  return f;
}

}  // namespace cstarlogic
