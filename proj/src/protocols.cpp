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

#include "adaptq/protocols.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <numbers>
#include <set>

#include "adaptq/error.hpp"

namespace adaptq {

// ---------------------------------------------------------------------------
// Frames and rules

PauliFrame PauliFrame::identity(std::uint32_t num_qubits) {
    return PauliFrame{std::vector<bool>(num_qubits, false), std::vector<bool>(num_qubits, false)};
}

bool PauliFrame::is_identity() const {
    return std::none_of(x_mask.begin(), x_mask.end(), [](bool b) { return b; }) &&
           std::none_of(z_mask.begin(), z_mask.end(), [](bool b) { return b; });
}

PauliFrame compose_frames(std::span<const PauliFrame> frames) {
    if (frames.empty()) return PauliFrame{};
    PauliFrame out = PauliFrame::identity(frames.front().size());
    for (const PauliFrame& f : frames) {
        if (f.size() != out.size() || f.z_mask.size() != out.size()) {
            throw Error(ErrorCode::DimensionMismatch, "frames cover different qubit counts");
        }
        for (std::uint32_t q = 0; q < out.size(); ++q) {
            out.x_mask[q] = out.x_mask[q] != f.x_mask[q];
            out.z_mask[q] = out.z_mask[q] != f.z_mask[q];
        }
    }
    return out;
}

PauliFrame CorrectionRule::frame(const ClassicalRegister& reg, std::uint32_t num_qubits) const {
    PauliFrame f = PauliFrame::identity(num_qubits);
    for (const auto& [q, e] : x) {
        if (q >= num_qubits) throw Error(ErrorCode::DimensionMismatch, "rule addresses qubit outside the frame");
        f.x_mask[q] = e.eval(reg);
    }
    for (const auto& [q, e] : z) {
        if (q >= num_qubits) throw Error(ErrorCode::DimensionMismatch, "rule addresses qubit outside the frame");
        f.z_mask[q] = e.eval(reg);
    }
    return f;
}

std::vector<CbitId> CorrectionRule::bits() const {
    std::set<CbitId> all;
    for (const auto* side : {&x, &z}) {
        for (const auto& [q, e] : *side) {
            for (CbitId c : e.bits()) all.insert(c);
        }
    }
    return {all.begin(), all.end()};
}

nlohmann::json CorrectionRule::to_json() const {
    nlohmann::json j{{"x", nlohmann::json::object()}, {"z", nlohmann::json::object()}};
    for (const auto& [q, e] : x) j["x"][std::to_string(q)] = e.to_string();
    for (const auto& [q, e] : z) j["z"][std::to_string(q)] = e.to_string();
    return j;
}

CorrectionRule CorrectionRule::from_json(const nlohmann::json& j) {
    CorrectionRule r;
    try {
        for (const auto& [side, dst] : {std::pair{"x", &r.x}, std::pair{"z", &r.z}}) {
            if (!j.contains(side)) continue;
            for (const auto& [key, value] : j.at(side).items()) {
                dst->emplace(static_cast<std::uint32_t>(std::stoul(key)), CondExpr::parse(value.get<std::string>()));
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::Parse, std::string("correction rule: ") + e.what());
    } catch (const std::logic_error&) {
        throw Error(ErrorCode::Parse, "correction rule: qubit keys must be integers");
    }
    return r;
}

// ---------------------------------------------------------------------------
// Protocol helpers

namespace {

std::uint32_t span_of(std::initializer_list<std::span<const QubitId>> groups, const Topology* topology) {
    std::uint32_t n = topology ? topology->num_qubits() : 0;
    for (auto g : groups) {
        for (QubitId q : g) n = std::max(n, q.index + 1);
    }
    return n;
}

void require_distinct(std::initializer_list<std::span<const QubitId>> groups, std::string_view what) {
    std::set<QubitId> seen;
    for (auto g : groups) {
        for (QubitId q : g) {
            if (!seen.insert(q).second) {
                throw Error(ErrorCode::InvalidArgument, std::string(what) + ": qubit Q" + std::to_string(q.index) + " used twice");
            }
        }
    }
}

void require_edge(const Topology* topology, QubitId a, QubitId b, std::string_view what) {
    if (!topology) return;
    if (a.index >= topology->num_qubits() || b.index >= topology->num_qubits() || !topology->adjacent(a, b)) {
        throw Error(ErrorCode::InvalidArgument, std::string(what) + ": Q" + std::to_string(a.index) + " and Q" +
                                                    std::to_string(b.index) + " are not coupled");
    }
}

void append_rule(Circuit& c, const CorrectionRule& rule) {
    for (const auto& [q, e] : rule.x) c.conditional(e, {Gate::single(GateKind::X, QubitId{q})});
    for (const auto& [q, e] : rule.z) c.conditional(e, {Gate::single(GateKind::Z, QubitId{q})});
}

void finish(Protocol& p, const Topology* topology) {
    if (topology) p.circuit.set_topology(*topology);
    require_valid(p.circuit);
}

CondExpr parity_of(std::vector<CbitId> bits) {
    std::sort(bits.begin(), bits.end());
    return CondExpr::parity(bits);
}

}  // namespace

Protocol with_input_prep(const Protocol& protocol, std::span<const Gate> prep) {
    Protocol out = protocol;
    std::vector<Instruction> insts(prep.begin(), prep.end());
    out.circuit.insert(protocol.input_point, insts);
    return out;
}

std::size_t count_conditionals(const Circuit& circuit) {
    return static_cast<std::size_t>(std::count_if(circuit.instructions().begin(), circuit.instructions().end(),
                                                  [](const Instruction& i) { return std::holds_alternative<Conditional>(i); }));
}

Protocol without_conditional(const Protocol& protocol, std::size_t k) {
    const auto insts = protocol.circuit.instructions();
    std::size_t seen = 0;
    for (std::size_t i = 0; i < insts.size(); ++i) {
        if (!std::holds_alternative<Conditional>(insts[i])) continue;
        if (seen++ == k) {
            Protocol out = protocol;
            out.circuit.erase(i);
            if (i < out.input_point) --out.input_point;
            return out;
        }
    }
    throw Error(ErrorCode::InvalidArgument, "protocol has only " + std::to_string(seen) + " conditionals");
}

// ---------------------------------------------------------------------------
// GHZ

GHZPlan GHZPlan::line(std::uint32_t n) {
    if (n < 2) throw Error(ErrorCode::InvalidArgument, "GHZ needs at least 2 data qubits");
    GHZPlan p;
    for (std::uint32_t k = 0; k < n; ++k) p.data.push_back(QubitId{2 * k});
    for (std::uint32_t k = 0; k + 1 < n; ++k) p.ancillae.push_back(QubitId{2 * k + 1});
    return p;
}

GHZPlan GHZPlan::ring8(std::uint32_t n) {
    if (n < 2 || n > 4) throw Error(ErrorCode::InvalidArgument, "the 8-ring placement holds 2 to 4 data qubits");
    GHZPlan p;
    for (std::uint32_t k = 0; k < n; ++k) p.data.push_back(QubitId{2 * k + 1});
    for (std::uint32_t k = 0; k + 1 < n; ++k) p.ancillae.push_back(QubitId{2 * k + 2});
    return p;
}

std::vector<bool> decode_ghz(const std::vector<bool>& outcomes) {
    std::vector<bool> mask(outcomes.size() + 1, false);
    for (std::size_t k = 1; k < mask.size(); ++k) mask[k] = mask[k - 1] != outcomes[k - 1];
    return mask;
}

Protocol build_ghz_adaptive(const GHZPlan& plan, const Topology* topology) {
    const std::size_t n = plan.data.size();
    if (n < 2) throw Error(ErrorCode::InvalidArgument, "GHZ needs at least 2 data qubits");
    if (plan.ancillae.size() != n - 1) {
        throw Error(ErrorCode::InvalidArgument, "GHZ plan needs exactly one ancilla per adjacent data pair");
    }
    require_distinct({plan.data, plan.ancillae}, "GHZ plan");
    for (std::size_t k = 0; k + 1 < n; ++k) {
        require_edge(topology, plan.data[k], plan.ancillae[k], "GHZ plan");
        require_edge(topology, plan.data[k + 1], plan.ancillae[k], "GHZ plan");
    }

    Protocol p;
    p.name = "ghz";
    p.circuit = Circuit(span_of({plan.data, plan.ancillae}, topology), static_cast<std::uint32_t>(n - 1));
    Circuit& c = p.circuit;
    for (QubitId q : plan.data) c.h(q);
    for (std::size_t k = 0; k + 1 < n; ++k) c.cnot(plan.data[k], plan.ancillae[k]);
    for (std::size_t k = 0; k + 1 < n; ++k) c.cnot(plan.data[k + 1], plan.ancillae[k]);
    for (std::size_t k = 0; k + 1 < n; ++k) c.measure(plan.ancillae[k], CbitId{static_cast<std::uint32_t>(k)});
    std::vector<CbitId> prefix;
    for (std::size_t k = 1; k < n; ++k) {
        prefix.push_back(CbitId{static_cast<std::uint32_t>(k - 1)});
        p.rule.x.emplace(plan.data[k].index, parity_of(prefix));
    }
    append_rule(c, p.rule);
    p.outputs = plan.data;
    finish(p, topology);
    return p;
}

Circuit build_ghz_ladder(std::uint32_t n) {
    if (n < 2) throw Error(ErrorCode::InvalidArgument, "GHZ needs at least 2 data qubits");
    const std::uint32_t width = 2 * n - 1;
    Circuit c(width, 0);
    c.h(QubitId{0});
    for (std::uint32_t q = 0; q + 1 < width; ++q) c.cnot(QubitId{q}, QubitId{q + 1});
    return c;
}

// ---------------------------------------------------------------------------
// Teleported CNOT

TeleCnotLayout TeleCnotLayout::line_unitary() {
    return TeleCnotLayout{QubitId{0}, QubitId{3}, QubitId{1}, QubitId{2}, {}, BellMode::Unitary};
}

TeleCnotLayout TeleCnotLayout::line_adaptive() {
    return TeleCnotLayout{QubitId{0}, QubitId{4}, QubitId{1}, QubitId{3}, {QubitId{2}}, BellMode::Adaptive};
}

TeleCnotLayout TeleCnotLayout::ring8_q1_q4() {
    return TeleCnotLayout{QubitId{1}, QubitId{4}, QubitId{2}, QubitId{3}, {}, BellMode::Unitary};
}

TeleCnotLayout TeleCnotLayout::ring8_q0_q4() {
    return TeleCnotLayout{QubitId{0}, QubitId{4}, QubitId{1}, QubitId{3}, {QubitId{2}}, BellMode::Adaptive};
}

Protocol build_tele_cnot(const TeleCnotLayout& L, const Topology* topology) {
    const std::vector<QubitId> roles{L.control, L.target, L.ancilla_a, L.ancilla_b};
    require_distinct({roles, L.inner}, "tele-CNOT layout");
    if (L.mode == BellMode::Adaptive && L.inner.size() != 1) {
        throw Error(ErrorCode::InvalidArgument, "adaptive Bell preparation needs exactly one inner ancilla");
    }
    if (L.mode == BellMode::Unitary && !L.inner.empty()) {
        throw Error(ErrorCode::InvalidArgument, "unitary Bell preparation takes no inner ancilla");
    }
    require_edge(topology, L.control, L.ancilla_a, "tele-CNOT layout");
    require_edge(topology, L.ancilla_b, L.target, "tele-CNOT layout");
    if (L.mode == BellMode::Unitary) {
        require_edge(topology, L.ancilla_a, L.ancilla_b, "tele-CNOT layout");
    } else {
        require_edge(topology, L.ancilla_a, L.inner[0], "tele-CNOT layout");
        require_edge(topology, L.ancilla_b, L.inner[0], "tele-CNOT layout");
    }

    Protocol p;
    p.name = "tele_cnot";
    const bool adaptive = L.mode == BellMode::Adaptive;
    p.circuit = Circuit(span_of({roles, L.inner}, topology), adaptive ? 3 : 2);
    Circuit& c = p.circuit;
    const CbitId za{0};
    const CbitId xb{1};
    const CbitId zi{2};
    if (adaptive) {
        // Two-data GHZ on (a, b); its X correction on b is folded into the target's.
        c.h(L.ancilla_a).h(L.ancilla_b);
        c.cnot(L.ancilla_a, L.inner[0]).cnot(L.ancilla_b, L.inner[0]);
        c.measure(L.inner[0], zi);
    } else {
        c.h(L.ancilla_a).cnot(L.ancilla_a, L.ancilla_b);
    }
    p.input_point = c.size();
    c.cnot(L.control, L.ancilla_a).cnot(L.ancilla_b, L.target);
    c.measure(L.ancilla_a, za).measure(L.ancilla_b, xb, Basis::X);
    p.rule.x.emplace(L.target.index, adaptive ? parity_of({za, zi}) : CondExpr::bit(za));
    p.rule.z.emplace(L.control.index, CondExpr::bit(xb));
    append_rule(c, p.rule);
    p.inputs = {L.control, L.target};
    p.outputs = {L.control, L.target};
    finish(p, topology);
    return p;
}

// ---------------------------------------------------------------------------
// Fan-out

FanoutLayout FanoutLayout::line(std::uint32_t n_targets, bool reuse_reset) {
    if (n_targets < 1) throw Error(ErrorCode::InvalidArgument, "fan-out needs at least one target");
    FanoutLayout L;
    L.reuse_reset = reuse_reset;
    L.control = QubitId{0};
    if (reuse_reset) {
        // c, r0, t1, r1, t2, r2, ...
        L.resource.push_back(QubitId{1});
        for (std::uint32_t i = 1; i <= n_targets; ++i) {
            L.targets.push_back(QubitId{2 * i});
            L.resource.push_back(QubitId{2 * i + 1});
        }
    } else {
        // c, r0, p1, r1, p2, r2, ..., then the targets.
        L.resource.push_back(QubitId{1});
        for (std::uint32_t i = 1; i <= n_targets; ++i) {
            L.prep_ancillae.push_back(QubitId{2 * i});
            L.resource.push_back(QubitId{2 * i + 1});
        }
        for (std::uint32_t i = 0; i < n_targets; ++i) L.targets.push_back(QubitId{2 * n_targets + 2 + i});
    }
    return L;
}

FanoutLayout FanoutLayout::ring8_cxx() {
    FanoutLayout L;
    L.control = QubitId{0};
    L.targets = qubit_ids({2, 4});
    L.resource = qubit_ids({1, 3, 5});
    L.reuse_reset = true;
    return L;
}

namespace {

std::vector<QubitId> prep_ancillae_of(const FanoutLayout& L) { return L.reuse_reset ? L.targets : L.prep_ancillae; }

void check_fanout_layout(const FanoutLayout& L) {
    const std::size_t n = L.targets.size();
    if (n < 1) throw Error(ErrorCode::InvalidArgument, "fan-out needs at least one target");
    if (L.resource.size() != n + 1) throw Error(ErrorCode::InvalidArgument, "fan-out needs one resource qubit per data qubit");
    if (!L.reuse_reset && L.prep_ancillae.size() != n) {
        throw Error(ErrorCode::InvalidArgument, "fan-out without reuse needs one preparation ancilla per target");
    }
    const std::vector<QubitId> c{L.control};
    if (L.reuse_reset) {
        require_distinct({c, L.targets, L.resource}, "fan-out layout");
    } else {
        require_distinct({c, L.targets, L.resource, L.prep_ancillae}, "fan-out layout");
    }
}

// Cbits: prep outcomes 0..N-1, resource[0] Z outcome N, resource[i] X outcomes N+i.
CbitId prep_bit(std::size_t i) { return CbitId{static_cast<std::uint32_t>(i)}; }

}  // namespace

CorrectionRule fanout_rule(const FanoutLayout& L) {
    check_fanout_layout(L);
    const std::uint32_t n = static_cast<std::uint32_t>(L.targets.size());
    CorrectionRule r;
    std::vector<CbitId> xbits{CbitId{n}};
    for (std::uint32_t i = 0; i < n; ++i) {
        xbits.push_back(prep_bit(i));
        r.x.emplace(L.targets[i].index, parity_of(xbits));
    }
    std::vector<CbitId> zbits;
    for (std::uint32_t i = 1; i <= n; ++i) zbits.push_back(CbitId{n + i});
    r.z.emplace(L.control.index, parity_of(zbits));
    return r;
}

Protocol build_fanout(const FanoutLayout& L, const Topology* topology, const CorrectionRule* rule) {
    check_fanout_layout(L);
    const std::uint32_t n = static_cast<std::uint32_t>(L.targets.size());
    const std::vector<QubitId> prep = prep_ancillae_of(L);
    const std::vector<QubitId> c{L.control};
    for (std::uint32_t i = 1; i <= n; ++i) {
        require_edge(topology, L.resource[i - 1], prep[i - 1], "fan-out layout");
        require_edge(topology, L.resource[i], prep[i - 1], "fan-out layout");
        require_edge(topology, L.resource[i], L.targets[i - 1], "fan-out layout");
    }
    require_edge(topology, L.control, L.resource[0], "fan-out layout");

    Protocol p;
    p.name = "fanout";
    p.circuit = Circuit(span_of({c, L.targets, L.resource, L.prep_ancillae}, topology), 2 * n + 1);
    Circuit& cir = p.circuit;
    // GHZ resource; its X corrections are folded into the target rule.
    for (QubitId r : L.resource) cir.h(r);
    for (std::uint32_t i = 1; i <= n; ++i) cir.cnot(L.resource[i - 1], prep[i - 1]);
    for (std::uint32_t i = 1; i <= n; ++i) cir.cnot(L.resource[i], prep[i - 1]);
    for (std::uint32_t i = 0; i < n; ++i) cir.measure(prep[i], prep_bit(i));
    if (L.reuse_reset) {
        for (QubitId q : prep) cir.reset(q);
    }
    p.input_point = cir.size();
    cir.cnot(L.control, L.resource[0]);
    for (std::uint32_t i = 1; i <= n; ++i) cir.cnot(L.resource[i], L.targets[i - 1]);
    cir.measure(L.resource[0], CbitId{n});
    for (std::uint32_t i = 1; i <= n; ++i) cir.measure(L.resource[i], CbitId{n + i}, Basis::X);
    p.rule = rule ? *rule : fanout_rule(L);
    append_rule(cir, p.rule);
    p.inputs = c;
    p.inputs.insert(p.inputs.end(), L.targets.begin(), L.targets.end());
    p.outputs = p.inputs;
    finish(p, topology);
    return p;
}

namespace {

// One measurement record of a process check. Each case pairs the outputs' reduced state
// with the ideal state for one probe.
struct ProbeBranch {
    ClassicalRegister cbits;
    double probability;
    std::vector<std::pair<DensityMatrix, PureState>> cases;
};

PureState apply_ideal(const Circuit& ideal, PureState psi) {
    for (const Instruction& inst : ideal.instructions()) {
        const auto* g = std::get_if<Gate>(&inst);
        if (!g) throw Error(ErrorCode::InvalidArgument, "ideal process must be gates only");
        psi.apply(*g);
    }
    return psi;
}

// Outputs entangled with one reference qubit per input (the Choi state).
std::vector<ProbeBranch> choi_branches(const Protocol& protocol, const Circuit& ideal) {
    const std::uint32_t m = static_cast<std::uint32_t>(protocol.inputs.size());
    PureState target(2 * m);
    for (std::uint32_t k = 0; k < m; ++k) {
        target.apply(Gate::single(GateKind::H, QubitId{m + k}));
        target.apply(Gate::cnot(QubitId{m + k}, QubitId{k}));
    }
    target = apply_ideal(ideal, std::move(target));

    Protocol ext = protocol;
    const std::uint32_t base = protocol.circuit.num_qubits();
    ext.circuit.resize(base + m, protocol.circuit.num_cbits());
    ext.circuit.set_topology(std::nullopt);
    std::vector<Gate> prep;
    std::vector<QubitId> keep = protocol.outputs;
    for (std::uint32_t k = 0; k < m; ++k) {
        const QubitId ref{base + k};
        prep.push_back(Gate::single(GateKind::H, ref));
        prep.push_back(Gate::cnot(ref, protocol.inputs[k]));
        keep.push_back(ref);
    }
    ext = with_input_prep(ext, prep);
    std::vector<ProbeBranch> out;
    for (auto& b : enumerate_branches(ext.circuit)) {
        out.push_back(ProbeBranch{b.cbits, b.probability, {{reduced_state(b.final_state, keep), target}}});
    }
    return out;
}

// Inputs |i> and (|0> + |i>)/sqrt(2). A branch map that sends all of them to the ideal
// images up to one common scalar equals the ideal process on that branch.
std::vector<ProbeBranch> basis_probe_branches(const Protocol& protocol, const Circuit& ideal) {
    const std::uint32_t m = static_cast<std::uint32_t>(protocol.inputs.size());
    const std::uint64_t dim = std::uint64_t{1} << m;
    std::vector<std::vector<Gate>> preps;
    for (std::uint64_t i = 0; i < dim; ++i) {
        std::vector<Gate> g;
        for (std::uint32_t q = 0; q < m; ++q) {
            if ((i >> q) & 1U) g.push_back(Gate::single(GateKind::X, protocol.inputs[q]));
        }
        preps.push_back(std::move(g));
    }
    for (std::uint64_t i = 1; i < dim; ++i) {
        const auto low = static_cast<std::uint32_t>(std::countr_zero(i));
        std::vector<Gate> g{Gate::single(GateKind::H, protocol.inputs[low])};
        for (std::uint32_t q = low + 1; q < m; ++q) {
            if ((i >> q) & 1U) g.push_back(Gate::cnot(protocol.inputs[low], protocol.inputs[q]));
        }
        preps.push_back(std::move(g));
    }

    std::vector<ProbeBranch> out;
    std::map<std::uint64_t, std::size_t> index;
    for (std::size_t k = 0; k < preps.size(); ++k) {
        PureState input(m);
        for (Gate g : preps[k]) {
            for (auto& q : g.qubits) {
                q = QubitId{static_cast<std::uint32_t>(std::find(protocol.inputs.begin(), protocol.inputs.end(), q) -
                                                       protocol.inputs.begin())};
            }
            input.apply(g);
        }
        const PureState target = apply_ideal(ideal, std::move(input));
        const Protocol probe = with_input_prep(protocol, preps[k]);
        std::size_t seen = 0;
        for (auto& b : enumerate_branches(probe.circuit)) {
            auto it = index.find(b.cbits.values);
            if (it == index.end()) {
                if (k != 0) throw Error(ErrorCode::InvalidArgument, "branch set depends on the input state");
                it = index.emplace(b.cbits.values, out.size()).first;
                out.push_back(ProbeBranch{b.cbits, b.probability, {}});
            }
            out[it->second].cases.emplace_back(reduced_state(b.final_state, protocol.outputs), target);
            ++seen;
        }
        if (seen != out.size()) throw Error(ErrorCode::InvalidArgument, "branch set depends on the input state");
    }
    return out;
}

std::vector<ProbeBranch> process_branches(const Protocol& protocol, const Circuit& ideal) {
    const std::uint32_t m = static_cast<std::uint32_t>(protocol.inputs.size());
    if (protocol.outputs.size() != m) throw Error(ErrorCode::DimensionMismatch, "process check needs as many outputs as inputs");
    if (ideal.num_qubits() != m) throw Error(ErrorCode::DimensionMismatch, "ideal process acts on the wrong qubit count");
    if (protocol.circuit.num_qubits() + m <= kMaxPureQubits) return choi_branches(protocol, ideal);
    return basis_probe_branches(protocol, ideal);
}

}  // namespace

CorrectionRule derive_fanout_rule(std::uint32_t n_targets, bool reuse_reset) {
    const FanoutLayout L = FanoutLayout::line(n_targets, reuse_reset);
    const CorrectionRule none;
    const Protocol bare = build_fanout(L, nullptr, &none);
    const auto branches = process_branches(bare, ideal_fanout(n_targets));

    // Required correction per branch: bit i < N is X on target i, bit N is Z on the control.
    const std::uint32_t n = n_targets;
    std::vector<std::uint32_t> required;
    for (const auto& b : branches) {
        std::vector<std::uint32_t> fits;
        for (std::uint32_t cand = 0; cand < (2U << n); ++cand) {
            bool all = true;
            for (const auto& [state, target] : b.cases) {
                DensityMatrix rho = state;
                for (std::uint32_t i = 0; i < n; ++i) {
                    if ((cand >> i) & 1U) rho.apply(Gate::single(GateKind::X, QubitId{i + 1}));
                }
                if ((cand >> n) & 1U) rho.apply(Gate::single(GateKind::Z, QubitId{0}));
                all = all && state_fidelity(rho, target) > 1.0 - 1e-9;
            }
            if (all) fits.push_back(cand);
        }
        if (fits.size() != 1) {
            throw Error(ErrorCode::NoValidRule, "branch admits " + std::to_string(fits.size()) + " Pauli corrections");
        }
        required.push_back(fits[0]);
    }

    // Minimal parity over a pool of outcome bits matching a correction bit on every branch.
    auto search = [&](const std::vector<CbitId>& pool, std::uint32_t which) -> CondExpr {
        const std::uint32_t size = static_cast<std::uint32_t>(pool.size());
        std::vector<std::uint32_t> subsets((1U << size));
        for (std::uint32_t s = 0; s < subsets.size(); ++s) subsets[s] = s;
        std::stable_sort(subsets.begin(), subsets.end(),
                         [](std::uint32_t a, std::uint32_t b) { return std::popcount(a) < std::popcount(b); });
        for (std::uint32_t s : subsets) {
            bool ok = true;
            for (std::size_t k = 0; k < branches.size() && ok; ++k) {
                bool parity = false;
                for (std::uint32_t j = 0; j < size; ++j) {
                    if ((s >> j) & 1U) parity = parity != branches[k].cbits.get(pool[j]);
                }
                ok = parity == (((required[k] >> which) & 1U) != 0);
            }
            if (!ok) continue;
            std::vector<CbitId> bits;
            for (std::uint32_t j = 0; j < size; ++j) {
                if ((s >> j) & 1U) bits.push_back(pool[j]);
            }
            return parity_of(bits);
        }
        throw Error(ErrorCode::NoValidRule, "no parity rule reproduces the required corrections");
    };

    std::vector<CbitId> z_outcomes;
    for (std::uint32_t i = 0; i <= n; ++i) z_outcomes.push_back(CbitId{i});
    std::vector<CbitId> x_outcomes;
    for (std::uint32_t i = 1; i <= n; ++i) x_outcomes.push_back(CbitId{n + i});

    CorrectionRule rule;
    for (std::uint32_t i = 0; i < n; ++i) rule.x.emplace(L.targets[i].index, search(z_outcomes, i));
    rule.z.emplace(L.control.index, search(x_outcomes, n));

    const Protocol corrected = build_fanout(L, nullptr, &rule);
    if (min_fidelity(check_process_protocol(corrected, ideal_fanout(n))) < 1.0 - 1e-9) {
        throw Error(ErrorCode::NoValidRule, "derived rule fails branch validation");
    }
    return rule;
}

Circuit ideal_fanout(std::uint32_t n_targets) {
    Circuit c(n_targets + 1, 0);
    for (std::uint32_t i = 1; i <= n_targets; ++i) c.cnot(QubitId{0}, QubitId{i});
    return c;
}

// ---------------------------------------------------------------------------
// Teleportation and swapping

namespace {

void check_chain(std::span<const QubitId> chain) {
    if (chain.empty() || chain.size() % 2 != 0) {
        throw Error(ErrorCode::InvalidArgument, "the Bell-pair chain must have even, non-zero length");
    }
}

// Bell pairs along the chain, then Bell measurements on (left, right) pairs. Appends the
// corrections for `out` and returns the rule.
CorrectionRule bell_chain(Circuit& c, std::span<const QubitId> chain, std::span<const std::pair<QubitId, QubitId>> bms,
                          QubitId out, const Topology* topology, std::size_t* input_point) {
    for (std::size_t k = 0; k < chain.size(); k += 2) require_edge(topology, chain[k], chain[k + 1], "Bell pair");
    for (const auto& [a, b] : bms) require_edge(topology, a, b, "Bell measurement");
    for (std::size_t k = 0; k < chain.size(); k += 2) c.h(chain[k]);
    for (std::size_t k = 0; k < chain.size(); k += 2) c.cnot(chain[k], chain[k + 1]);
    if (input_point) *input_point = c.size();
    for (const auto& [a, b] : bms) c.cnot(a, b);
    std::vector<CbitId> xs;
    std::vector<CbitId> zs;
    for (const auto& [a, b] : bms) {
        xs.push_back(c.add_cbit());
        c.measure(a, xs.back(), Basis::X);
        zs.push_back(c.add_cbit());
        c.measure(b, zs.back());
    }
    CorrectionRule rule;
    if (!bms.empty()) {
        rule.x.emplace(out.index, parity_of(zs));
        rule.z.emplace(out.index, parity_of(xs));
    }
    append_rule(c, rule);
    return rule;
}

}  // namespace

Protocol build_teleport(QubitId input, std::span<const QubitId> chain, const Topology* topology) {
    check_chain(chain);
    const std::vector<QubitId> in{input};
    require_distinct({in, chain}, "teleport chain");
    std::vector<std::pair<QubitId, QubitId>> bms{{input, chain[0]}};
    for (std::size_t k = 1; k + 1 < chain.size(); k += 2) bms.emplace_back(chain[k], chain[k + 1]);

    Protocol p;
    p.name = "teleport";
    p.circuit = Circuit(span_of({in, chain}, topology), 0);
    p.rule = bell_chain(p.circuit, chain, bms, chain.back(), topology, nullptr);
    p.input_point = 0;
    p.inputs = in;
    p.outputs = {chain.back()};
    finish(p, topology);
    return p;
}

Protocol build_entanglement_swap(std::span<const QubitId> chain, std::string_view input_bits, const Topology* topology) {
    check_chain(chain);
    if (input_bits.size() != 2 || input_bits.find_first_not_of("01") != std::string_view::npos) {
        throw Error(ErrorCode::InvalidArgument, "swap input must be two bits");
    }
    require_distinct({chain}, "swap chain");
    std::vector<std::pair<QubitId, QubitId>> bms;
    for (std::size_t k = 1; k + 1 < chain.size(); k += 2) bms.emplace_back(chain[k], chain[k + 1]);

    Protocol p;
    p.name = "swap";
    p.circuit = Circuit(span_of({chain}, topology), 0);
    if (input_bits[0] == '1') p.circuit.x(chain.front());
    if (input_bits[1] == '1') p.circuit.x(chain.back());
    p.rule = bell_chain(p.circuit, chain, bms, chain.back(), topology, nullptr);
    p.outputs = {chain.front(), chain.back()};
    finish(p, topology);
    return p;
}

std::vector<QubitId> ring8_teleport_chain() { return qubit_ids({1, 2, 3, 4}); }
std::vector<QubitId> ring8_swap_chain() { return qubit_ids({1, 2, 3, 4}); }

// ---------------------------------------------------------------------------
// Verification

PureState ghz_state(std::uint32_t n) {
    if (n < 1) throw Error(ErrorCode::InvalidArgument, "GHZ needs at least one qubit");
    std::vector<cplx> amps(std::size_t{1} << n, 0.0);
    amps.front() = amps.back() = std::numbers::sqrt2 / 2.0;
    return PureState::from_amplitudes(std::move(amps));
}

PureState bell_state(std::string_view bits) {
    const double h = std::numbers::sqrt2 / 2.0;
    if (bits == "00") return PureState::from_amplitudes({h, 0.0, 0.0, h});
    if (bits == "10") return PureState::from_amplitudes({h, 0.0, 0.0, -h});
    if (bits == "01") return PureState::from_amplitudes({0.0, h, h, 0.0});
    if (bits == "11") return PureState::from_amplitudes({0.0, -h, h, 0.0});
    throw Error(ErrorCode::InvalidArgument, "Bell label must be two bits");
}

std::string bell_state_name(std::string_view bits) {
    if (bits == "00") return "Phi+";
    if (bits == "10") return "Phi-";
    if (bits == "01") return "Psi+";
    if (bits == "11") return "Psi-";
    throw Error(ErrorCode::InvalidArgument, "Bell label must be two bits");
}

std::vector<BranchCheck> check_state_protocol(const Protocol& protocol, const PureState& target) {
    if (target.num_qubits() != protocol.outputs.size()) {
        throw Error(ErrorCode::DimensionMismatch, "target state size differs from the output count");
    }
    std::vector<BranchCheck> out;
    for (const auto& b : enumerate_branches(protocol.circuit)) {
        out.push_back(BranchCheck{b.cbits, b.probability, state_fidelity(reduced_state(b.final_state, protocol.outputs), target)});
    }
    return out;
}

std::vector<BranchCheck> check_process_protocol(const Protocol& protocol, const Circuit& ideal) {
    std::vector<BranchCheck> out;
    for (const auto& b : process_branches(protocol, ideal)) {
        double f = 1.0;
        for (const auto& [state, target] : b.cases) f = std::min(f, state_fidelity(state, target));
        out.push_back(BranchCheck{b.cbits, b.probability, f});
    }
    return out;
}

double min_fidelity(std::span<const BranchCheck> checks) {
    if (checks.empty()) throw Error(ErrorCode::InvalidArgument, "no branches");
    double m = 1.0;
    for (const auto& c : checks) m = std::min(m, c.fidelity);
    return m;
}

}  // namespace adaptq
