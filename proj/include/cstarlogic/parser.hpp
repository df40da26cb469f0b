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

#include <string>
#include <string_view>

#include "cstarlogic/logic.hpp"

namespace cstarlogic {

// Formula DSL.
//
//   formula := {"free" IDENT ":" sort "."} fexpr
//   fexpr   := funary {("+" | "-" | "-.") funary}
//   funary  := ("sup" | "inf") IDENT ":" sort "." fexpr
//            | NUMBER | "-" NUMBER | "norm" "(" term ")" | "(" fexpr ")"
//            | CONN ["{" nums "}"] "(" fexpr {"," fexpr} ")"
//   sort    := KIND "(" num ["," "amp" "=" INT] ["," "scalar"] ")"
//   term    := tmul {("+" | "-") tmul}
//   tmul    := tpre {"*" tpre}
//   tpre    := SCALAR "*" tpre | tpost
//   tpost   := tprim {"^*"}
//   tprim   := IDENT | "one" | "zero" | "$" IDENT ["(" ints ")"] | "(" term ")"
//            | FN ["{" nums "}"] "[" term "]" | "diag" "{" INT "}" "[" term "]"
//   SCALAR  := NUMBER | NUMBER"i" | "(" ["-"] NUMBER["i"] [("+" | "-") NUMBER"i"] ")"
Formula parse(std::string_view text);

// Canonical text; bound variables renamed x0, x1, ... in binding order.
std::string print(const Formula& phi);
std::string print(const Term& t);

// Shortest round-trip decimal form.
std::string format_double(double v);

}  // namespace cstarlogic
