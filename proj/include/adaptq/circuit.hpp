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
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "adaptq/cond_expr.hpp"
#include "adaptq/gate.hpp"

namespace adaptq {

enum class Basis : std::uint8_t { Z, X };

/// Per-qubit classification probabilities: p00 = P(read 0 | 0), p11 = P(read 1 | 1).
struct ReadoutError {
    double p00 = 1.0;
    double p11 = 1.0;
    bool is_perfect() const { return p00 == 1.0 && p11 == 1.0; }
    friend bool operator==(const ReadoutError&, const ReadoutError&) = default;
};

struct Measure {
    QubitId qubit;
    CbitId cbit;
    Basis basis = Basis::Z;
    std::optional<ReadoutError> readout;
    friend bool operator==(const Measure&, const Measure&) = default;
};

/// Active reset. `readout` is the error of the measurement it desugars into.
struct Reset {
    QubitId qubit;
    std::optional<ReadoutError> readout;
    friend bool operator==(const Reset&, const Reset&) = default;
};

struct Delay {
    QubitId qubit;
    double duration_ns = 0.0;
    friend bool operator==(const Delay&, const Delay&) = default;
};

/// Gates executed iff `condition` evaluates true on the shot's register.
struct Conditional {
    CondExpr condition;
    std::vector<Gate> gates;
    friend bool operator==(const Conditional&, const Conditional&) = default;
};

struct Barrier {
    std::vector<QubitId> qubits;
    friend bool operator==(const Barrier&, const Barrier&) = default;
};

enum class ChannelKind : std::uint8_t { AmplitudeDamping, PhaseFlip, Depolarize1, Depolarize2 };

/// Stochastic error inserted by noise decoration. Depolarize2 acts on both qubits;
/// the others use qubits[0] only.
struct NoiseChannel {
    ChannelKind kind = ChannelKind::PhaseFlip;
    std::array<QubitId, 2> qubits{};
    double probability = 0.0;

    std::size_t arity() const { return kind == ChannelKind::Depolarize2 ? 2 : 1; }
    friend bool operator==(const NoiseChannel&, const NoiseChannel&) = default;
};

using Instruction = std::variant<Gate, Measure, Reset, Delay, Conditional, Barrier, NoiseChannel>;

/// Qubits an instruction touches (for Conditional: union over its gates).
std::vector<QubitId> instruction_qubits(const Instruction& inst);

/// Undirected coupling graph.
class Topology {
public:
    explicit Topology(std::uint32_t num_qubits = 0) : adjacency_(num_qubits) {}

    static Topology ring(std::uint32_t num_qubits);
    static Topology line(std::uint32_t num_qubits);

    void add_edge(QubitId a, QubitId b);
    bool adjacent(QubitId a, QubitId b) const;
    std::uint32_t num_qubits() const { return static_cast<std::uint32_t>(adjacency_.size()); }
    const std::vector<QubitId>& neighbors(QubitId q) const { return adjacency_.at(q.index); }
    std::vector<std::pair<QubitId, QubitId>> edges() const;

    friend bool operator==(const Topology&, const Topology&) = default;

private:
    std::vector<std::vector<QubitId>> adjacency_;
};

/// Ordered instruction list over a fixed qubit and classical-bit register.
class Circuit {
public:
    Circuit() = default;
    Circuit(std::uint32_t num_qubits, std::uint32_t num_cbits) : num_qubits_(num_qubits), num_cbits_(num_cbits) {}

    std::uint32_t num_qubits() const { return num_qubits_; }
    std::uint32_t num_cbits() const { return num_cbits_; }
    std::span<const Instruction> instructions() const { return instructions_; }
    std::size_t size() const { return instructions_.size(); }

    void resize(std::uint32_t num_qubits, std::uint32_t num_cbits) {
        num_qubits_ = num_qubits;
        num_cbits_ = num_cbits;
    }
    CbitId add_cbit() { return CbitId{num_cbits_++}; }

    Circuit& append(Instruction inst) {
        instructions_.push_back(std::move(inst));
        return *this;
    }
    Circuit& append(const Circuit& other);
    Circuit& insert(std::size_t position, std::span<const Instruction> insts);
    Circuit& erase(std::size_t position);

    Circuit& gate(GateKind kind, QubitId q, double angle = 0.0) { return append(Gate::single(kind, q, angle)); }
    Circuit& h(QubitId q) { return gate(GateKind::H, q); }
    Circuit& x(QubitId q) { return gate(GateKind::X, q); }
    Circuit& cnot(QubitId c, QubitId t) { return append(Gate::cnot(c, t)); }
    Circuit& cz(QubitId a, QubitId b) { return append(Gate::cz(a, b)); }
    Circuit& measure(QubitId q, CbitId c, Basis basis = Basis::Z) { return append(Measure{q, c, basis, {}}); }
    Circuit& reset(QubitId q) { return append(Reset{q, {}}); }
    Circuit& delay(QubitId q, double ns) { return append(Delay{q, ns}); }
    Circuit& barrier(std::vector<QubitId> qs) { return append(Barrier{std::move(qs)}); }
    Circuit& conditional(CondExpr cond, std::vector<Gate> gates) {
        return append(Conditional{std::move(cond), std::move(gates)});
    }

    std::size_t count_measurements() const;

    const std::optional<Topology>& topology() const { return topology_; }
    void set_topology(std::optional<Topology> topology) { topology_ = std::move(topology); }

    friend bool operator==(const Circuit&, const Circuit&) = default;

private:
    std::uint32_t num_qubits_ = 0;
    std::uint32_t num_cbits_ = 0;
    std::vector<Instruction> instructions_;
    std::optional<Topology> topology_;
};

struct Violation {
    enum class Kind { QubitOutOfRange, CbitOutOfRange, DuplicateQubit, UnwrittenBit, NonAdjacentPair, TooManyCbits, BadParameter };
    Kind kind;
    std::size_t instruction;
    std::string message;
};

std::string_view to_string(Violation::Kind kind);

/// Empty iff the circuit is well formed and, given a topology (explicitly or attached to
/// the circuit), every two-qubit gate acts on adjacent qubits.
std::vector<Violation> validate(const Circuit& circuit, const Topology* topology = nullptr);

/// Throws Error(InvalidCircuit) listing the first violation.
void require_valid(const Circuit& circuit, const Topology* topology = nullptr);

/// ASAP layer count over disjoint supports. A measurement and any conditional reading its
/// bit land in different layers; Reset counts as measurement plus conditional;
/// Delay, Barrier and noise channels take no layer.
std::size_t depth(const Circuit& circuit);

/// Rewrites X-basis measurements as H, Z-measure, H and Reset as a Z-measure into a
/// scratch cbit (appended after the circuit's own bits) followed by a conditional X.
/// Engines execute the lowered form and report only the original cbits.
Circuit lower(const Circuit& circuit);

}  // namespace adaptq
