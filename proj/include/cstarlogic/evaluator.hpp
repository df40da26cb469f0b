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
#include <map>
#include <string>
#include <vector>

#include "cstarlogic/logic.hpp"

namespace cstarlogic {

struct EvalConfig {
  int restarts = 64;
  int iterations = 400;
  double step = 0.3;
  double decay = 0.97;
  double tolerance = 1e-7;
  std::uint64_t seed = 0;
  int workers = default_workers();
  // Optional starting points per variable name; restart r uses hints[name][r]
  // while available instead of a random sample.
  std::map<std::string, std::vector<Element>> hints;

  static int default_workers();
  // Excludes workers.
  std::uint64_t hash() const;
};

enum class Direction { certified_lower, certified_upper, heuristic, exact };
std::string_view to_string(Direction d);
Direction direction_from_string(std::string_view s);

struct Witness {
  std::size_t quantifier;  // preorder index of the Quant node
  std::string var;
  Element value;
};

using Assignment = std::map<std::string, Element>;

struct EvalResult {
  double value = 0.0;
  std::vector<Witness> witnesses;
  Direction direction = Direction::exact;
  std::uint64_t samples = 0;
  std::uint64_t config_hash = 0;
};

EvalResult eval(const Formula& phi, const Signature& ambient, const Assignment& assignment = {},
                const EvalConfig& cfg = {});

// Quantifiers replaced by recorded witnesses.
double replay(const Formula& phi, const Signature& ambient, const std::vector<Witness>& witnesses,
              const Assignment& assignment = {});

// Quantifier-free evaluation; throws on quantifiers.
double evaluate(const Formula& phi, const Signature& ambient, const Assignment& assignment);
Element evaluate(const Term& t, const Signature& ambient, const Assignment& assignment);

Element project_to_sort(const Element& a, const SortSpec& s, const Signature& ambient);
Element sample_sort(const SortSpec& s, const Signature& ambient, std::uint64_t seed);

Direction direction_of(const Formula& phi);

// FNV-1a over the bits of a witness list.
std::uint64_t witness_digest(const std::vector<Witness>& w);

}  // namespace cstarlogic
