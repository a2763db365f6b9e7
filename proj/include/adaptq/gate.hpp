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

#include <array>
#include <compare>
#include <complex>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace adaptq {

using cplx = std::complex<double>;

struct QubitId {
    std::uint32_t index = 0;
    friend auto operator<=>(const QubitId&, const QubitId&) = default;
};

struct CbitId {
    std::uint32_t index = 0;
    friend auto operator<=>(const CbitId&, const CbitId&) = default;
};

inline std::vector<QubitId> qubit_ids(std::initializer_list<std::uint32_t> indices) {
    std::vector<QubitId> out;
    out.reserve(indices.size());
    for (auto i : indices) out.push_back(QubitId{i});
    return out;
}

enum class GateKind : std::uint8_t { I, X, Y, Z, H, S, Sdg, RX, RY, RZ, CNOT, CZ };

std::string_view gate_name(GateKind kind);
std::optional<GateKind> gate_from_name(std::string_view name);

constexpr bool is_two_qubit(GateKind kind) {
    return kind == GateKind::CNOT || kind == GateKind::CZ;
}

constexpr bool is_rotation(GateKind kind) {
    return kind == GateKind::RX || kind == GateKind::RY || kind == GateKind::RZ;
}

using Mat2 = std::array<cplx, 4>;   // row-major
using Mat4 = std::array<cplx, 16>;  // row-major, basis index = first_qubit_bit | second_qubit_bit << 1

/// A unitary gate bound to its qubits. For CNOT the first qubit is the control.
struct Gate {
    GateKind kind = GateKind::I;
    std::array<QubitId, 2> qubits{};
    double angle = 0.0;

    std::size_t arity() const { return is_two_qubit(kind) ? 2 : 1; }

    static Gate single(GateKind kind, QubitId q, double angle = 0.0) { return Gate{kind, {q, q}, angle}; }
    static Gate cnot(QubitId control, QubitId target) { return Gate{GateKind::CNOT, {control, target}, 0.0}; }
    static Gate cz(QubitId a, QubitId b) { return Gate{GateKind::CZ, {a, b}, 0.0}; }

    friend bool operator==(const Gate& a, const Gate& b);
};

/// 2x2 unitary of a single-qubit gate.
Mat2 single_qubit_matrix(const Gate& gate);

/// 4x4 unitary of a two-qubit gate, using the Mat4 basis convention.
Mat4 two_qubit_matrix(const Gate& gate);

/// Number of quarter turns if `angle` is a multiple of pi/2, else nullopt.
std::optional<int> quarter_turns(double angle);

bool is_clifford(const Gate& gate);

}  // namespace adaptq
