// Copyright 2026 The adaptq Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "adaptq/circuit.hpp"

namespace adaptq {

// Line-oriented circuit text. Header then one instruction per line:
//
//   QUBITS 5
//   CBITS 2
//   H 0
//   CNOT 0 1
//   RZ(0.785398) 2
//   MEASURE 3 -> c0 Z
//   MEASURE 3 -> c0 X ro=0.995,0.983
//   RESET 2
//   DELAY 4 150ns
//   COND c0^c1 : X 2, Z 0
//   BARRIER 0 1 2
//   AMPDAMP 1 0.01
//   DEPHASE 1 0.05
//   DEPOL1 1 0.002
//   DEPOL2 1 2 0.01
//
// '#' starts a comment. Numbers are written with round-trip precision.
std::string to_text(const Circuit& circuit);
Circuit from_text(std::string_view text);

nlohmann::json to_json(const Circuit& circuit);
Circuit circuit_from_json(const nlohmann::json& j);

}  // namespace adaptq
