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

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cstarlogic/logic.hpp"

namespace cstarlogic {

enum class EntryKind { formula, map_predicate };
std::string_view to_string(EntryKind k);

struct CatalogEntry {
  std::string name;
  std::vector<double> params;
  std::string param_doc;  // e.g. "n >= 1"
  EntryKind kind = EntryKind::formula;
  std::string dsl;        // empty for map predicates
  std::string anchor;     // the defining expression, as written in the source
  std::string notes;      // expected values
  std::string basis;      // how the expected values are known
  int min_block = 1;      // smallest max-block for which the entry is meaningful
  bool closed = true;     // sentence (no free variables)
  bool acceptance = true;
  // Lipschitz constant of a map predicate in each tuple entry.
  double map_modulus = 0.0;
};

// "AL:2" -> ("AL", {2}); "popa:1:1" -> ("popa", {1, 1}).
struct EntryRef {
  std::string name;
  std::vector<double> params;
};
EntryRef parse_entry_ref(std::string_view text);
std::string entry_ref(std::string_view name, std::span<const double> params);

std::vector<std::string> catalog_names();

// Full metadata for one instance; missing parameters take defaults.
CatalogEntry catalog_entry(std::string_view name, std::span<const double> params = {});

// DSL text of an instance.
std::string build_text(std::string_view name, std::span<const double> params = {});

// Parsed formula; throws for map predicates.
Formula build_sentence(std::string_view name, std::span<const double> params = {});

// Every family at its default parameters; cstar_axiom expanded over 1..7.
std::vector<CatalogEntry> catalog_table();

// JSON array of {name, params, kind, dsl, anchor, notes, basis, ...}.
std::string catalog_json(const std::vector<CatalogEntry>& entries);

}  // namespace cstarlogic
