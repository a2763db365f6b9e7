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

#include "adaptq/gate.hpp"

#include <cmath>
#include <numbers>

#include "adaptq/error.hpp"

namespace adaptq {

namespace {

constexpr std::array<std::pair<GateKind, std::string_view>, 12> kNames{{
    {GateKind::I, "I"},
    {GateKind::X, "X"},
    {GateKind::Y, "Y"},
    {GateKind::Z, "Z"},
    {GateKind::H, "H"},
    {GateKind::S, "S"},
    {GateKind::Sdg, "SDG"},
    {GateKind::RX, "RX"},
    {GateKind::RY, "RY"},
    {GateKind::RZ, "RZ"},
    {GateKind::CNOT, "CNOT"},
    {GateKind::CZ, "CZ"},
}};

}  // namespace

std::string_view gate_name(GateKind kind) {
    for (const auto& [k, name] : kNames) {
        if (k == kind) return name;
    }
    return "?";
}

std::optional<GateKind> gate_from_name(std::string_view name) {
    for (const auto& [k, n] : kNames) {
        if (n == name) return k;
    }
    if (name == "CX") return GateKind::CNOT;
    if (name == "Sdg" || name == "SDAG") return GateKind::Sdg;
    return std::nullopt;
}

bool operator==(const Gate& a, const Gate& b) {
    if (a.kind != b.kind || a.angle != b.angle || a.qubits[0] != b.qubits[0]) return false;
    return !is_two_qubit(a.kind) || a.qubits[1] == b.qubits[1];
}

Mat2 single_qubit_matrix(const Gate& gate) {
    const cplx i{0.0, 1.0};
    const double r = 1.0 / std::numbers::sqrt2;
    const double c = std::cos(gate.angle / 2.0);
    const double s = std::sin(gate.angle / 2.0);
    switch (gate.kind) {
        case GateKind::I: return {1.0, 0.0, 0.0, 1.0};
        case GateKind::X: return {0.0, 1.0, 1.0, 0.0};
        case GateKind::Y: return {0.0, -i, i, 0.0};
        case GateKind::Z: return {1.0, 0.0, 0.0, -1.0};
        case GateKind::H: return {r, r, r, -r};
        case GateKind::S: return {1.0, 0.0, 0.0, i};
        case GateKind::Sdg: return {1.0, 0.0, 0.0, -i};
        case GateKind::RX: return {c, -i * s, -i * s, c};
        case GateKind::RY: return {c, -s, s, c};
        case GateKind::RZ: return {std::exp(-i * (gate.angle / 2.0)), 0.0, 0.0, std::exp(i * (gate.angle / 2.0))};
        case GateKind::CNOT:
        case GateKind::CZ: break;
    }
    throw Error(ErrorCode::InvalidArgument, "single_qubit_matrix: two-qubit gate " + std::string(gate_name(gate.kind)));
}

Mat4 two_qubit_matrix(const Gate& gate) {
    Mat4 m{};
    switch (gate.kind) {
        case GateKind::CNOT:
            // control = bit 0, target = bit 1
            m[0 * 4 + 0] = 1.0;
            m[2 * 4 + 2] = 1.0;
            m[3 * 4 + 1] = 1.0;
            m[1 * 4 + 3] = 1.0;
            return m;
        case GateKind::CZ:
            m[0] = 1.0;
            m[5] = 1.0;
            m[10] = 1.0;
            m[15] = -1.0;
            return m;
        default: break;
    }
    throw Error(ErrorCode::InvalidArgument, "two_qubit_matrix: single-qubit gate " + std::string(gate_name(gate.kind)));
}

std::optional<int> quarter_turns(double angle) {
    const double k = angle / (std::numbers::pi / 2.0);
    const double r = std::round(k);
    if (std::abs(k - r) > 1e-9) return std::nullopt;
    const long long turns = static_cast<long long>(r) % 4;
    return static_cast<int>((turns + 4) % 4);
}

bool is_clifford(const Gate& gate) { return !is_rotation(gate.kind) || quarter_turns(gate.angle).has_value(); }

}  // namespace adaptq
