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

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "adaptq/circuit.hpp"
#include "adaptq/engines.hpp"
#include "adaptq/states.hpp"

namespace adaptq {

/// Accumulated X/Z corrections, one bit per qubit.
struct PauliFrame {
    std::vector<bool> x_mask;
    std::vector<bool> z_mask;

    static PauliFrame identity(std::uint32_t num_qubits);
    std::uint32_t size() const { return static_cast<std::uint32_t>(x_mask.size()); }
    bool is_identity() const;
    friend bool operator==(const PauliFrame&, const PauliFrame&) = default;
};

/// XOR of all masks. Throws Error(DimensionMismatch) on differing sizes.
PauliFrame compose_frames(std::span<const PauliFrame> frames);

/// Conditions selecting X and Z corrections per qubit.
struct CorrectionRule {
    std::map<std::uint32_t, CondExpr> x;
    std::map<std::uint32_t, CondExpr> z;

    /// Frame selected by a register, over `num_qubits` qubits.
    PauliFrame frame(const ClassicalRegister& reg, std::uint32_t num_qubits) const;
    /// Every referenced cbit.
    std::vector<CbitId> bits() const;
    nlohmann::json to_json() const;
    static CorrectionRule from_json(const nlohmann::json& j);
    friend bool operator==(const CorrectionRule&, const CorrectionRule&) = default;
};

/// A built adaptive circuit with its roles. Input states are spliced in at
/// `input_point` (an instruction index) on `inputs`; the result lives on `outputs`.
struct Protocol {
    std::string name;
    Circuit circuit;
    std::vector<QubitId> inputs;
    std::vector<QubitId> outputs;
    std::size_t input_point = 0;
    CorrectionRule rule;
};

/// Copy of `protocol` with `prep` inserted at the input point.
Protocol with_input_prep(const Protocol& protocol, std::span<const Gate> prep);
/// Copy with the k-th Conditional instruction removed.
Protocol without_conditional(const Protocol& protocol, std::size_t k);
std::size_t count_conditionals(const Circuit& circuit);

// ---------------------------------------------------------------------------
// GHZ
// ---------------------------------------------------------------------------

/// Data qubits with one parity ancilla between each adjacent pair.
struct GHZPlan {
    std::vector<QubitId> data;
    std::vector<QubitId> ancillae;

    /// Data on even positions of a line, ancillae on odd positions.
    static GHZPlan line(std::uint32_t n);
    /// Data on Q1, Q3, Q5, Q7 of the 8-ring (n <= 4).
    static GHZPlan ring8(std::uint32_t n);
};

/// m[0] = 0, m[k] = m[k-1] ^ outcomes[k-1].
std::vector<bool> decode_ghz(const std::vector<bool>& outcomes);

/// H on data, CNOTs into each ancilla from both neighbors, Z-measure ancillae, then one
/// layer of conditional X from the prefix-XOR decoder. Ancilla k writes cbit k.
/// Throws Error(InvalidArgument) on an inconsistent plan or a topology mismatch.
Protocol build_ghz_adaptive(const GHZPlan& plan, const Topology* topology = nullptr);
inline Protocol build_ghz_adaptive(std::uint32_t n) { return build_ghz_adaptive(GHZPlan::line(n)); }

/// Unitary baseline on the same 2n-1 qubit line: H then a CNOT chain through every qubit.
Circuit build_ghz_ladder(std::uint32_t n);

// ---------------------------------------------------------------------------
// Teleported CNOT and fan-out
// ---------------------------------------------------------------------------

enum class BellMode : std::uint8_t { Unitary, Adaptive };

struct TeleCnotLayout {
    QubitId control;
    QubitId target;
    QubitId ancilla_a;  // next to control, measured in Z
    QubitId ancilla_b;  // next to target, measured in X
    std::vector<QubitId> inner;  // adaptive mode: one parity ancilla between a and b
    BellMode mode = BellMode::Unitary;

    static TeleCnotLayout line_unitary();   // c=0 a=1 b=2 t=3
    static TeleCnotLayout line_adaptive();  // c=0 a=1 inner=2 b=3 t=4
    static TeleCnotLayout ring8_q1_q4();    // unitary Bell pair on Q2, Q3
    static TeleCnotLayout ring8_q0_q4();    // adaptive Bell pair on Q1, Q3 via Q2
};

Protocol build_tele_cnot(const TeleCnotLayout& layout, const Topology* topology = nullptr);

struct FanoutLayout {
    QubitId control;
    std::vector<QubitId> targets;
    /// GHZ resource, one per data qubit: resource[0] pairs with the control,
    /// resource[i] with targets[i-1].
    std::vector<QubitId> resource;
    /// Parity ancillae for preparing the resource. Ignored when reuse_reset is set:
    /// the targets then serve as these ancillae and are actively reset afterwards.
    std::vector<QubitId> prep_ancillae;
    bool reuse_reset = true;

    /// Compact layout for N targets; reuse uses 2N+2 qubits, fresh ancillae 3N+2.
    static FanoutLayout line(std::uint32_t n_targets, bool reuse_reset = true);
    /// CXX on the 8-ring: control Q0, targets Q2, Q4, resource Q1, Q3, Q5.
    static FanoutLayout ring8_cxx();
};

/// X on target i iff (resource[0] Z outcome) XOR (prefix parity of the first i
/// resource-prep outcomes); Z on the control iff the parity of the X outcomes of
/// resource[1..N]. This is the rule derive_fanout_rule recovers.
CorrectionRule fanout_rule(const FanoutLayout& layout);

/// `rule` overrides the closed-form rule (used by the search).
Protocol build_fanout(const FanoutLayout& layout, const Topology* topology = nullptr,
                      const CorrectionRule* rule = nullptr);

/// Machine derivation: enumerates the uncorrected circuit, finds for every branch the
/// unique correction (X on targets, Z on control) restoring the ideal Choi state, and
/// then searches parity rules over Z outcomes (for X) and X outcomes (for Z) that
/// reproduce it on every branch. Throws Error(NoValidRule).
CorrectionRule derive_fanout_rule(std::uint32_t n_targets, bool reuse_reset = true);

// ---------------------------------------------------------------------------
// Teleportation and entanglement swapping
// ---------------------------------------------------------------------------

/// `chain` holds the Bell-pair qubits from the input side; its last element is the
/// output. Bell pairs: (chain[0], chain[1]), (chain[2], chain[3]), ...; Bell
/// measurements: (input, chain[0]), (chain[1], chain[2]), ...
Protocol build_teleport(QubitId input, std::span<const QubitId> chain, const Topology* topology = nullptr);

/// Bell pairs along `chain` with Bell measurements on the inner pairs; the ends finish
/// in the Bell state selected by `input_bits`: 00 -> Phi+, 10 -> Phi-, 01 -> Psi+,
/// 11 -> Psi- (first character on chain.front()).
Protocol build_entanglement_swap(std::span<const QubitId> chain, std::string_view input_bits,
                                 const Topology* topology = nullptr);

std::vector<QubitId> ring8_teleport_chain();  // Q1..Q4, input Q0
std::vector<QubitId> ring8_swap_chain();      // Q1..Q4

// ---------------------------------------------------------------------------
// Ideal targets and branch-level verification
// ---------------------------------------------------------------------------

PureState ghz_state(std::uint32_t n);
/// 00 -> Phi+, 10 -> Phi-, 01 -> Psi+, 11 -> Psi-.
PureState bell_state(std::string_view bits);
std::string bell_state_name(std::string_view bits);

struct BranchCheck {
    ClassicalRegister cbits;
    double probability = 0.0;
    double fidelity = 0.0;
};

/// Fidelity of the outputs' reduced state to `target`, per branch.
std::vector<BranchCheck> check_state_protocol(const Protocol& protocol, const PureState& target);

/// Choi check: each input is entangled with a fresh reference qubit and every branch's
/// (outputs, references) state is compared with (U x I)|Phi+> for the unitary `ideal`
/// acting on inputs.size() qubits. Protocols too wide for the reference qubits are probed
/// with inputs |i> and (|0> + |i>)/sqrt(2) instead; a branch reports its worst probe.
std::vector<BranchCheck> check_process_protocol(const Protocol& protocol, const Circuit& ideal);

double min_fidelity(std::span<const BranchCheck> checks);

/// Controlled-X^N on qubits (0; 1..N).
Circuit ideal_fanout(std::uint32_t n_targets);

}  // namespace adaptq
