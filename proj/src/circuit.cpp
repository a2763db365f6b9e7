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

#include "adaptq/circuit.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "adaptq/error.hpp"

namespace adaptq {

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

std::vector<QubitId> instruction_qubits(const Instruction& inst) {
    return std::visit(
        Overloaded{
            [](const Gate& g) {
                return g.arity() == 2 ? std::vector<QubitId>{g.qubits[0], g.qubits[1]} : std::vector<QubitId>{g.qubits[0]};
            },
            [](const Measure& m) { return std::vector<QubitId>{m.qubit}; },
            [](const Reset& r) { return std::vector<QubitId>{r.qubit}; },
            [](const Delay& d) { return std::vector<QubitId>{d.qubit}; },
            [](const Conditional& c) {
                std::vector<QubitId> out;
                for (const auto& g : c.gates) {
                    for (std::size_t k = 0; k < g.arity(); ++k) {
                        if (std::find(out.begin(), out.end(), g.qubits[k]) == out.end()) out.push_back(g.qubits[k]);
                    }
                }
                return out;
            },
            [](const Barrier& b) { return b.qubits; },
            [](const NoiseChannel& n) {
                return n.arity() == 2 ? std::vector<QubitId>{n.qubits[0], n.qubits[1]} : std::vector<QubitId>{n.qubits[0]};
            },
        },
        inst);
}

// ---------------------------------------------------------------------------
// Topology

Topology Topology::ring(std::uint32_t num_qubits) {
    Topology t(num_qubits);
    if (num_qubits < 2) return t;
    for (std::uint32_t i = 0; i + 1 < num_qubits; ++i) t.add_edge(QubitId{i}, QubitId{i + 1});
    if (num_qubits > 2) t.add_edge(QubitId{num_qubits - 1}, QubitId{0});
    return t;
}

Topology Topology::line(std::uint32_t num_qubits) {
    Topology t(num_qubits);
    for (std::uint32_t i = 0; i + 1 < num_qubits; ++i) t.add_edge(QubitId{i}, QubitId{i + 1});
    return t;
}

void Topology::add_edge(QubitId a, QubitId b) {
    if (a == b) throw Error(ErrorCode::InvalidArgument, "topology self-loop on qubit " + std::to_string(a.index));
    const std::uint32_t need = std::max(a.index, b.index) + 1;
    if (need > adjacency_.size()) adjacency_.resize(need);
    if (adjacent(a, b)) return;
    adjacency_[a.index].push_back(b);
    adjacency_[b.index].push_back(a);
    std::sort(adjacency_[a.index].begin(), adjacency_[a.index].end());
    std::sort(adjacency_[b.index].begin(), adjacency_[b.index].end());
}

bool Topology::adjacent(QubitId a, QubitId b) const {
    if (a.index >= adjacency_.size()) return false;
    const auto& n = adjacency_[a.index];
    return std::find(n.begin(), n.end(), b) != n.end();
}

std::vector<std::pair<QubitId, QubitId>> Topology::edges() const {
    std::vector<std::pair<QubitId, QubitId>> out;
    for (std::uint32_t a = 0; a < adjacency_.size(); ++a) {
        for (QubitId b : adjacency_[a]) {
            if (a < b.index) out.emplace_back(QubitId{a}, b);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Circuit

Circuit& Circuit::append(const Circuit& other) {
    num_qubits_ = std::max(num_qubits_, other.num_qubits_);
    num_cbits_ = std::max(num_cbits_, other.num_cbits_);
    instructions_.insert(instructions_.end(), other.instructions_.begin(), other.instructions_.end());
    return *this;
}

Circuit& Circuit::insert(std::size_t position, std::span<const Instruction> insts) {
    if (position > instructions_.size()) throw Error(ErrorCode::InvalidArgument, "insert position out of range");
    instructions_.insert(instructions_.begin() + static_cast<std::ptrdiff_t>(position), insts.begin(), insts.end());
    return *this;
}

Circuit& Circuit::erase(std::size_t position) {
    if (position >= instructions_.size()) throw Error(ErrorCode::InvalidArgument, "erase position out of range");
    instructions_.erase(instructions_.begin() + static_cast<std::ptrdiff_t>(position));
    return *this;
}

std::size_t Circuit::count_measurements() const {
    return static_cast<std::size_t>(std::count_if(instructions_.begin(), instructions_.end(), [](const Instruction& i) {
        return std::holds_alternative<Measure>(i) || std::holds_alternative<Reset>(i);
    }));
}

// ---------------------------------------------------------------------------
// Validation

std::string_view to_string(Violation::Kind kind) {
    switch (kind) {
        case Violation::Kind::QubitOutOfRange: return "qubit-out-of-range";
        case Violation::Kind::CbitOutOfRange: return "cbit-out-of-range";
        case Violation::Kind::DuplicateQubit: return "duplicate-qubit";
        case Violation::Kind::UnwrittenBit: return "unwritten-bit";
        case Violation::Kind::NonAdjacentPair: return "non-adjacent-pair";
        case Violation::Kind::TooManyCbits: return "too-many-cbits";
        case Violation::Kind::BadParameter: return "bad-parameter";
    }
    return "unknown";
}

namespace {

class Validator {
public:
    Validator(const Circuit& c, const Topology* t) : circuit_(c), topology_(t), written_(c.num_cbits(), false) {}

    std::vector<Violation> run() {
        if (circuit_.num_cbits() > 64) {
            add(Violation::Kind::TooManyCbits, 0, "circuit declares " + std::to_string(circuit_.num_cbits()) + " cbits (max 64)");
        }
        const auto insts = circuit_.instructions();
        for (std::size_t i = 0; i < insts.size(); ++i) {
            index_ = i;
            std::visit(
                Overloaded{
                    [&](const Gate& g) { check_gate(g); },
                    [&](const Measure& m) {
                        check_qubit(m.qubit);
                        check_readout(m.readout);
                        if (check_cbit(m.cbit)) written_[m.cbit.index] = true;
                    },
                    [&](const Reset& r) {
                        check_qubit(r.qubit);
                        check_readout(r.readout);
                    },
                    [&](const Delay& d) {
                        check_qubit(d.qubit);
                        if (!std::isfinite(d.duration_ns) || d.duration_ns < 0.0) {
                            add(Violation::Kind::BadParameter, i, "negative or non-finite delay");
                        }
                    },
                    [&](const Conditional& c) {
                        for (CbitId b : c.condition.bits()) {
                            if (!check_cbit(b)) continue;
                            if (!written_[b.index]) {
                                add(Violation::Kind::UnwrittenBit, i, "condition reads c" + std::to_string(b.index) + " before any measurement writes it");
                            }
                        }
                        for (const Gate& g : c.gates) check_gate(g);
                    },
                    [&](const Barrier& b) {
                        for (QubitId q : b.qubits) check_qubit(q);
                    },
                    [&](const NoiseChannel& n) {
                        check_qubit(n.qubits[0]);
                        if (n.arity() == 2) {
                            check_qubit(n.qubits[1]);
                            if (n.qubits[0] == n.qubits[1]) add(Violation::Kind::DuplicateQubit, i, "two-qubit channel on a single qubit");
                        }
                        if (!(n.probability >= 0.0 && n.probability <= 1.0)) {
                            add(Violation::Kind::BadParameter, i, "channel probability outside [0, 1]");
                        }
                    },
                },
                insts[i]);
        }
        return std::move(out_);
    }

private:
    void add(Violation::Kind k, std::size_t i, std::string msg) { out_.push_back(Violation{k, i, std::move(msg)}); }

    bool check_qubit(QubitId q) {
        if (q.index < circuit_.num_qubits()) return true;
        add(Violation::Kind::QubitOutOfRange, index_, "qubit " + std::to_string(q.index) + " out of range");
        return false;
    }
    bool check_cbit(CbitId c) {
        if (c.index < circuit_.num_cbits() && c.index < 64) return true;
        add(Violation::Kind::CbitOutOfRange, index_, "cbit c" + std::to_string(c.index) + " out of range");
        return false;
    }
    void check_readout(const std::optional<ReadoutError>& ro) {
        if (!ro) return;
        auto ok = [](double p) { return p >= 0.0 && p <= 1.0; };
        if (!ok(ro->p00) || !ok(ro->p11)) add(Violation::Kind::BadParameter, index_, "readout fidelity outside [0, 1]");
    }
    void check_gate(const Gate& g) {
        const bool q0 = check_qubit(g.qubits[0]);
        if (is_rotation(g.kind) && !std::isfinite(g.angle)) add(Violation::Kind::BadParameter, index_, "non-finite rotation angle");
        if (g.arity() != 2) return;
        const bool q1 = check_qubit(g.qubits[1]);
        if (g.qubits[0] == g.qubits[1]) {
            add(Violation::Kind::DuplicateQubit, index_, std::string(gate_name(g.kind)) + " acts twice on qubit " + std::to_string(g.qubits[0].index));
            return;
        }
        if (topology_ && q0 && q1 && !topology_->adjacent(g.qubits[0], g.qubits[1])) {
            add(Violation::Kind::NonAdjacentPair, index_,
                std::string(gate_name(g.kind)) + " on non-adjacent qubits " + std::to_string(g.qubits[0].index) + ", " +
                    std::to_string(g.qubits[1].index));
        }
    }

    const Circuit& circuit_;
    const Topology* topology_;
    std::vector<bool> written_;
    std::vector<Violation> out_;
    std::size_t index_ = 0;
};

}  // namespace

std::vector<Violation> validate(const Circuit& circuit, const Topology* topology) {
    if (!topology && circuit.topology()) topology = &*circuit.topology();
    return Validator(circuit, topology).run();
}

void require_valid(const Circuit& circuit, const Topology* topology) {
    const auto v = validate(circuit, topology);
    if (v.empty()) return;
    throw Error(ErrorCode::InvalidCircuit, "instruction " + std::to_string(v.front().instruction) + ": " +
                                               std::string(to_string(v.front().kind)) + ": " + v.front().message);
}

// ---------------------------------------------------------------------------
// Depth

std::size_t depth(const Circuit& circuit) {
    std::vector<std::size_t> qlayer(circuit.num_qubits(), 0);
    std::map<std::uint32_t, std::size_t> written_at;  // cbit -> layer of its latest write
    std::map<std::uint32_t, std::size_t> read_at;     // cbit -> layer of its latest read
    std::size_t total = 0;

    auto busy_until = [&](const std::vector<QubitId>& qs) {
        std::size_t l = 0;
        for (QubitId q : qs) l = std::max(l, qlayer.at(q.index));
        return l;
    };
    auto occupy = [&](const std::vector<QubitId>& qs, std::size_t layer) {
        for (QubitId q : qs) qlayer.at(q.index) = layer;
        total = std::max(total, layer);
    };

    for (const Instruction& inst : circuit.instructions()) {
        std::visit(Overloaded{
                       [&](const Gate& g) {
                           const auto qs = instruction_qubits(g);
                           occupy(qs, busy_until(qs) + 1);
                       },
                       [&](const Measure& m) {
                           std::size_t l = qlayer.at(m.qubit.index);
                           if (auto it = read_at.find(m.cbit.index); it != read_at.end()) l = std::max(l, it->second);
                           occupy({m.qubit}, l + 1);
                           written_at[m.cbit.index] = l + 1;
                       },
                       [&](const Reset& r) { occupy({r.qubit}, qlayer.at(r.qubit.index) + 2); },
                       [](const Delay&) {},
                       [&](const Conditional& c) {
                           const auto qs = instruction_qubits(c);
                           std::size_t l = busy_until(qs);
                           for (CbitId b : c.condition.bits()) {
                               if (auto it = written_at.find(b.index); it != written_at.end()) l = std::max(l, it->second);
                           }
                           // Gates of one block sharing a qubit run back to back.
                           std::map<std::uint32_t, std::size_t> per_qubit;
                           std::size_t span = 0;
                           for (const Gate& g : c.gates) {
                               for (std::size_t k = 0; k < g.arity(); ++k) span = std::max(span, ++per_qubit[g.qubits[k].index]);
                           }
                           if (span == 0) return;
                           occupy(qs, l + span);
                           for (CbitId b : c.condition.bits()) read_at[b.index] = std::max(read_at[b.index], l + 1);
                       },
                       [&](const Barrier& b) {
                           const std::size_t l = busy_until(b.qubits);
                           for (QubitId q : b.qubits) qlayer.at(q.index) = l;
                       },
                       [](const NoiseChannel&) {},
                   },
                   inst);
    }
    return total;
}

// ---------------------------------------------------------------------------
// Lowering

Circuit lower(const Circuit& circuit) {
    bool has_reset = false;
    for (const auto& inst : circuit.instructions()) has_reset |= std::holds_alternative<Reset>(inst);

    Circuit out(circuit.num_qubits(), circuit.num_cbits());
    out.set_topology(circuit.topology());
    const CbitId scratch{circuit.num_cbits()};
    if (has_reset) out.add_cbit();

    for (const auto& inst : circuit.instructions()) {
        if (const auto* m = std::get_if<Measure>(&inst); m && m->basis == Basis::X) {
            out.h(m->qubit);
            out.append(Measure{m->qubit, m->cbit, Basis::Z, m->readout});
            out.h(m->qubit);
        } else if (const auto* r = std::get_if<Reset>(&inst)) {
            out.append(Measure{r->qubit, scratch, Basis::Z, r->readout});
            out.conditional(CondExpr::bit(scratch), {Gate::single(GateKind::X, r->qubit)});
        } else {
            out.append(inst);
        }
    }
    return out;
}

}  // namespace adaptq
