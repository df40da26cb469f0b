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
#include <optional>
#include <string>
#include <vector>

#include "cstarlogic/evaluator.hpp"
#include "cstarlogic/stability.hpp"

namespace cstarlogic {

inline constexpr const char* kToolVersion = "0.1.0";

struct Sentence {
  std::string name;  // catalog reference ("AL:2") or file stem
  std::vector<double> params;
  Formula formula;
};

// "name" or "name:p1:p2"; precondition error for predicates with free variables.
Sentence catalog_sentence(const std::string& ref);
Sentence file_sentence(const std::string& path);

struct Record {
  std::string sentence;
  std::vector<double> params;
  std::string text;  // canonical print, re-parsed by replay
  Signature signature;
  double value = 0.0;
  Direction direction = Direction::exact;
  std::uint64_t witness_digest = 0;
  std::vector<Witness> witnesses;
  std::uint64_t samples = 0;
  // Not part of the deterministic report body.
  double wall_time = 0.0;
  bool cached = false;
};

struct SeparationEntry {
  std::string sentence;
  double value_a = 0.0;
  double value_b = 0.0;
  Direction direction_a = Direction::exact;
  Direction direction_b = Direction::exact;
  // Larger side is neither certified-lower nor exact.
  bool evidence_only = false;
  std::string caveat;
};

struct Separation {
  Signature a;
  Signature b;
  double threshold = 0.0;
  std::vector<SeparationEntry> entries;
};

struct Report {
  std::string tool_version = kToolVersion;
  EvalConfig config;
  std::vector<Record> records;  // sorted by (sentence, signature)
  std::optional<Separation> separation;
  std::vector<StabilityProbeReport> probes;
};

// Cache key: canonical print, signature and config hash (workers excluded).
std::uint64_t record_key(const Formula& phi, const Signature& sig, const EvalConfig& cfg);

// Full cross product. With a non-empty cache_dir, records are read from and
// written to cache_dir/<key>.json.
Report run_battery(const std::vector<Sentence>& sentences, const std::vector<Signature>& algebras,
                   const EvalConfig& cfg, const std::string& cache_dir = "");

// Quantifier-alternation-free catalog sentences used by separate().
std::vector<std::string> default_battery();

Report separate(const Signature& a, const Signature& b, double threshold, const EvalConfig& cfg,
                const std::string& cache_dir = "", const std::vector<std::string>& battery = default_battery());

// timing = false drops wall times and cache flags, which makes the text a
// function of (sentences, signatures, config) only.
std::string report_json(const Report& r, bool timing = true);
Report report_from_json(const std::string& text);
// Empty when the text is a well-formed report.
std::vector<std::string> report_schema_errors(const std::string& text);

struct ReplayCheck {
  std::string sentence;
  Signature signature;
  double recorded = 0.0;
  double replayed = 0.0;
  bool digest_ok = false;
  bool value_ok = false;
};
// Re-evaluates each record at its witnesses (value match to 1e-12 relative).
std::vector<ReplayCheck> verify_report(const Report& r);

std::string probe_json(const StabilityProbeReport& p);

// Tuple files: {"signature": [2], "tuple": [element, ...]}, element = list of
// blocks, block = list of rows, entry = number or [re, im].
std::string element_json(const Element& a);
Element element_from_json(const std::string& text, const Signature& sig);
std::vector<Element> read_tuple(const std::string& text, Signature* sig);

}  // namespace cstarlogic
