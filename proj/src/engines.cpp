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

#include "adaptq/engines.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <mutex>
#include <thread>

#include "adaptq/error.hpp"
#include "adaptq/noise.hpp"

namespace adaptq {

namespace {

constexpr std::uint64_t kShotsPerChunk = 1024;

std::uint64_t low_mask(std::uint32_t bits) { return bits >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << bits) - 1; }

ClassicalRegister visible(ClassicalRegister reg, std::uint32_t num_cbits) {
    reg.values &= low_mask(num_cbits);
    reg.written &= low_mask(num_cbits);
    return reg;
}

bool is_trivial(const NoiseChannel& n) { return n.probability == 0.0; }

Mat2 amplitude_damping_op(double p, int k) {
    if (k == 0) return {1.0, 0.0, 0.0, std::sqrt(1.0 - p)};
    return {0.0, std::sqrt(p), 0.0, 0.0};
}

constexpr const char* kPaulis1[3] = {"X", "Y", "Z"};
constexpr const char* kPaulis2[15] = {"IX", "IY", "IZ", "XI", "XX", "XY", "XZ", "YI",
                                      "YX", "YY", "YZ", "ZI", "ZX", "ZY", "ZZ"};

GateKind pauli_gate(char p) {
    switch (p) {
        case 'X': return GateKind::X;
        case 'Y': return GateKind::Y;
        case 'Z': return GateKind::Z;
        default: return GateKind::I;
    }
}

// Applies a sampled Pauli error to any state type exposing apply(Gate).
template <class State>
void apply_pauli_letters(State& s, const NoiseChannel& n, std::string_view letters) {
    for (std::size_t k = 0; k < letters.size(); ++k) {
        if (letters[k] != 'I') s.apply(Gate::single(pauli_gate(letters[k]), n.qubits[k]));
    }
}

// Samples the Pauli applied by a Pauli channel; empty when none fires.
std::string_view sample_pauli(const NoiseChannel& n, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    if (u(rng) >= n.probability) return {};
    switch (n.kind) {
        case ChannelKind::PhaseFlip: return "Z";
        case ChannelKind::Depolarize1: return kPaulis1[std::uniform_int_distribution<int>(0, 2)(rng)];
        case ChannelKind::Depolarize2: return kPaulis2[std::uniform_int_distribution<int>(0, 14)(rng)];
        case ChannelKind::AmplitudeDamping: break;
    }
    return {};
}

void apply_channel(DensityMatrix& rho, const NoiseChannel& n) {
    if (is_trivial(n)) return;
    const double p = n.probability;
    switch (n.kind) {
        case ChannelKind::AmplitudeDamping: {
            const std::array<Mat2, 2> ops{amplitude_damping_op(p, 0), amplitude_damping_op(p, 1)};
            rho.apply_kraus(n.qubits[0], ops);
            return;
        }
        case ChannelKind::PhaseFlip: {
            const std::array<std::string, 2> ps{"I", "Z"};
            const std::array<double, 2> pr{1.0 - p, p};
            rho.apply_pauli_mixture(std::span(n.qubits.data(), 1), ps, pr);
            return;
        }
        case ChannelKind::Depolarize1: {
            const std::array<std::string, 4> ps{"I", "X", "Y", "Z"};
            const std::array<double, 4> pr{1.0 - p, p / 3.0, p / 3.0, p / 3.0};
            rho.apply_pauli_mixture(std::span(n.qubits.data(), 1), ps, pr);
            return;
        }
        case ChannelKind::Depolarize2: {
            std::vector<std::string> ps{"II"};
            std::vector<double> pr{1.0 - p};
            for (const char* s : kPaulis2) {
                ps.emplace_back(s);
                pr.push_back(p / 15.0);
            }
            rho.apply_pauli_mixture(n.qubits, ps, pr);
            return;
        }
    }
}

void apply_channel(PureState& psi, const NoiseChannel& n, std::mt19937_64& rng) {
    if (is_trivial(n)) return;
    if (n.kind == ChannelKind::AmplitudeDamping) {
        const double jump = n.probability * psi.probability_one(n.qubits[0]);
        const int k = std::uniform_real_distribution<double>(0.0, 1.0)(rng) < jump ? 1 : 0;
        psi.apply_matrix(n.qubits[0], amplitude_damping_op(n.probability, k));
        psi.normalize();
        return;
    }
    apply_pauli_letters(psi, n, sample_pauli(n, rng));
}

// Remaps the qubits that are actually used onto 0..k-1.
Circuit compact(const Circuit& circuit) {
    std::vector<bool> used(circuit.num_qubits(), false);
    for (const auto& inst : circuit.instructions()) {
        if (std::holds_alternative<Barrier>(inst) || std::holds_alternative<Delay>(inst)) continue;
        for (QubitId q : instruction_qubits(inst)) used[q.index] = true;
    }
    std::vector<std::uint32_t> map(circuit.num_qubits(), 0);
    std::uint32_t k = 0;
    for (std::uint32_t q = 0; q < circuit.num_qubits(); ++q) {
        if (used[q]) map[q] = k++;
    }
    auto remap_gate = [&](Gate g) {
        g.qubits[0] = QubitId{map[g.qubits[0].index]};
        g.qubits[1] = QubitId{map[g.qubits[1].index]};
        return g;
    };
    Circuit out(k, circuit.num_cbits());
    for (const auto& inst : circuit.instructions()) {
        if (const auto* g = std::get_if<Gate>(&inst)) {
            out.append(remap_gate(*g));
        } else if (const auto* m = std::get_if<Measure>(&inst)) {
            Measure mm = *m;
            mm.qubit = QubitId{map[m->qubit.index]};
            out.append(mm);
        } else if (const auto* r = std::get_if<Reset>(&inst)) {
            out.append(Reset{QubitId{map[r->qubit.index]}, r->readout});
        } else if (const auto* c = std::get_if<Conditional>(&inst)) {
            Conditional cc{c->condition, {}};
            for (const Gate& g : c->gates) cc.gates.push_back(remap_gate(g));
            out.append(std::move(cc));
        } else if (const auto* n = std::get_if<NoiseChannel>(&inst)) {
            NoiseChannel nn = *n;
            nn.qubits[0] = QubitId{map[n->qubits[0].index]};
            nn.qubits[1] = QubitId{map[n->qubits[1].index]};
            out.append(nn);
        }
    }
    return out;
}

bool has_noise(const Circuit& circuit) {
    for (const auto& inst : circuit.instructions()) {
        if (const auto* n = std::get_if<NoiseChannel>(&inst); n && !is_trivial(*n)) return true;
        if (const auto* m = std::get_if<Measure>(&inst); m && m->readout && !m->readout->is_perfect()) return true;
        if (const auto* r = std::get_if<Reset>(&inst); r && r->readout && !r->readout->is_perfect()) return true;
    }
    return false;
}

// ---------------------------------------------------------------------------
// Branch enumeration

class Enumerator {
public:
    Enumerator(const Circuit& lowered, std::uint32_t visible_cbits) : circuit_(lowered), visible_(visible_cbits) {}

    std::vector<OutcomeBranch> run() {
        walk(0, PureState(circuit_.num_qubits()), ClassicalRegister{}, 1.0);
        return std::move(out_);
    }

private:
    void walk(std::size_t pc, PureState psi, ClassicalRegister reg, double prob) {
        const auto insts = circuit_.instructions();
        for (; pc < insts.size(); ++pc) {
            const Instruction& inst = insts[pc];
            if (const auto* g = std::get_if<Gate>(&inst)) {
                psi.apply(*g);
            } else if (const auto* c = std::get_if<Conditional>(&inst)) {
                if (c->condition.eval(reg)) {
                    for (const Gate& g2 : c->gates) psi.apply(g2);
                }
            } else if (const auto* m = std::get_if<Measure>(&inst)) {
                const double p1 = psi.probability_one(m->qubit);
                const double p[2] = {1.0 - p1, p1};
                const bool keep[2] = {prob * p[0] >= kBranchPruneThreshold, prob * p[1] >= kBranchPruneThreshold};
                if (keep[0] && keep[1]) {
                    PureState other = psi;
                    other.project(m->qubit, true);
                    ClassicalRegister r1 = reg;
                    r1.set(m->cbit, true);
                    walk(pc + 1, std::move(other), r1, prob * p[1]);
                }
                const bool outcome = !keep[0];
                if (!keep[0] && !keep[1]) return;
                psi.project(m->qubit, outcome);
                reg.set(m->cbit, outcome);
                prob *= p[outcome ? 1 : 0];
            }
        }
        out_.push_back(OutcomeBranch{visible(reg, visible_), prob, std::move(psi)});
    }

    const Circuit& circuit_;
    std::uint32_t visible_;
    std::vector<OutcomeBranch> out_;
};

// ---------------------------------------------------------------------------
// Density-matrix execution

std::map<std::uint64_t, DensityMatrix> density_paths(const Circuit& lowered) {
    std::map<std::uint64_t, DensityMatrix> paths;
    paths.emplace(0, DensityMatrix(lowered.num_qubits()));
    std::uint64_t written = 0;
    for (const Instruction& inst : lowered.instructions()) {
        if (const auto* g = std::get_if<Gate>(&inst)) {
            for (auto& [k, rho] : paths) rho.apply(*g);
        } else if (const auto* n = std::get_if<NoiseChannel>(&inst)) {
            for (auto& [k, rho] : paths) apply_channel(rho, *n);
        } else if (const auto* c = std::get_if<Conditional>(&inst)) {
            for (auto& [k, rho] : paths) {
                if (c->condition.eval(ClassicalRegister{k, written})) {
                    for (const Gate& g2 : c->gates) rho.apply(g2);
                }
            }
        } else if (const auto* m = std::get_if<Measure>(&inst)) {
            const ReadoutError ro = m->readout.value_or(ReadoutError{});
            // P(recorded b | true t)
            const double confusion[2][2] = {{ro.p00, 1.0 - ro.p11}, {1.0 - ro.p00, ro.p11}};
            const std::uint64_t bit = std::uint64_t{1} << m->cbit.index;
            written |= bit;
            std::map<std::uint64_t, DensityMatrix> next;
            for (auto& [k, rho] : paths) {
                DensityMatrix proj[2] = {rho, rho};
                proj[0].project(m->qubit, false);
                proj[1].project(m->qubit, true);
                for (int b = 0; b < 2; ++b) {
                    DensityMatrix acc(0);
                    bool have = false;
                    for (int t = 0; t < 2; ++t) {
                        const double w = confusion[b][t];
                        if (w == 0.0 || proj[t].trace().real() * w < kBranchPruneThreshold) continue;
                        DensityMatrix term = proj[t];
                        term.scale(w);
                        if (have) {
                            acc += term;
                        } else {
                            acc = std::move(term);
                            have = true;
                        }
                    }
                    if (!have) continue;
                    const std::uint64_t key = b ? (k | bit) : (k & ~bit);
                    if (auto it = next.find(key); it != next.end()) {
                        it->second += acc;
                    } else {
                        next.emplace(key, std::move(acc));
                    }
                }
            }
            paths = std::move(next);
        }
    }
    return paths;
}

// ---------------------------------------------------------------------------
// Sampling helpers

template <class ShotFn>
Distribution sample_chunks(std::uint32_t num_cbits, std::uint64_t shots, std::uint64_t seed, unsigned threads, ShotFn&& shot) {
    const std::uint64_t chunks = (shots + kShotsPerChunk - 1) / kShotsPerChunk;
    std::vector<std::map<std::uint64_t, std::uint64_t>> results(chunks);
    std::atomic<std::uint64_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;

    auto worker = [&] {
        try {
            for (std::uint64_t c = next++; c < chunks; c = next++) {
                std::mt19937_64 rng(derive_seed(seed, c));
                const std::uint64_t n = std::min(kShotsPerChunk, shots - c * kShotsPerChunk);
                auto& counts = results[c];
                for (std::uint64_t s = 0; s < n; ++s) ++counts[shot(rng)];
            }
        } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
            next = chunks;
        }
    };

    if (threads == 0) threads = std::max(1U, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::uint64_t>(threads, std::max<std::uint64_t>(chunks, 1)));
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    if (failure) std::rethrow_exception(failure);

    Distribution d(num_cbits);
    for (const auto& counts : results) {
        for (const auto& [k, n] : counts) d.add_count(k, n);
    }
    return d;
}

}  // namespace

std::vector<OutcomeBranch> enumerate_branches(const Circuit& circuit) {
    require_valid(circuit);
    if (has_noise(circuit)) {
        throw Error(ErrorCode::InvalidArgument, "branch enumeration requires a noiseless circuit");
    }
    const Circuit lowered = lower(circuit);
    if (lowered.count_measurements() > kMaxEnumeratedMeasurements) {
        throw Error(ErrorCode::BranchBoundExceeded, std::to_string(lowered.count_measurements()) +
                                                        " measurements exceed the enumeration bound of " +
                                                        std::to_string(kMaxEnumeratedMeasurements));
    }
    return Enumerator(lowered, circuit.num_cbits()).run();
}

std::vector<DensityBranch> run_density(const Circuit& circuit) {
    require_valid(circuit);
    const Circuit lowered = lower(circuit);
    auto paths = density_paths(lowered);
    const std::uint64_t mask = low_mask(circuit.num_cbits());
    std::uint64_t written = 0;
    for (const auto& inst : circuit.instructions()) {
        if (const auto* m = std::get_if<Measure>(&inst)) written |= std::uint64_t{1} << m->cbit.index;
    }
    std::map<std::uint64_t, DensityMatrix> merged;
    for (auto& [k, rho] : paths) {
        const std::uint64_t key = k & mask;
        if (auto it = merged.find(key); it != merged.end()) {
            it->second += rho;
        } else {
            merged.emplace(key, std::move(rho));
        }
    }
    std::vector<DensityBranch> out;
    for (auto& [k, rho] : merged) {
        const double p = rho.trace().real();
        if (p < kBranchPruneThreshold) continue;
        rho.scale(1.0 / p);
        out.push_back(DensityBranch{ClassicalRegister{k, written & mask}, p, std::move(rho)});
    }
    return out;
}

DensityMatrix mixed_state(std::span<const DensityBranch> branches) {
    if (branches.empty()) throw Error(ErrorCode::InvalidArgument, "no branches to mix");
    DensityMatrix out = branches.front().state;
    out.scale(branches.front().probability);
    for (std::size_t i = 1; i < branches.size(); ++i) {
        DensityMatrix t = branches[i].state;
        t.scale(branches[i].probability);
        out += t;
    }
    return out;
}

Distribution to_distribution(std::uint32_t num_cbits, std::span<const OutcomeBranch> branches) {
    std::map<std::uint64_t, double> probs;
    for (const auto& b : branches) probs[b.cbits.values & low_mask(num_cbits)] += b.probability;
    return Distribution::exact(num_cbits, std::move(probs));
}

Distribution exact_distribution(const Circuit& circuit) {
    require_valid(circuit);
    const Circuit small = compact(circuit);
    if (small.num_qubits() <= kMaxDensityQubits) {
        std::map<std::uint64_t, double> probs;
        for (const auto& b : run_density(small)) probs[b.cbits.values] += b.probability;
        return Distribution::exact(circuit.num_cbits(), std::move(probs));
    }
    if (!has_noise(small) && small.num_qubits() <= kMaxPureQubits) {
        const auto branches = enumerate_branches(small);
        return to_distribution(circuit.num_cbits(), branches);
    }
    throw Error(ErrorCode::InvalidArgument, "exact simulation of " + std::to_string(small.num_qubits()) +
                                                " active noisy qubits exceeds the density-matrix limit");
}

Distribution run_trajectories(const Circuit& circuit, const TrajectoryOptions& options) {
    require_valid(circuit);
    if (options.shots == 0) throw Error(ErrorCode::InvalidArgument, "shots must be at least 1");
    const Circuit lowered = lower(compact(circuit));
    const std::uint32_t visible_bits = circuit.num_cbits();
    const PureState initial(lowered.num_qubits());
    return sample_chunks(visible_bits, options.shots, options.seed, options.threads, [&](std::mt19937_64& rng) {
        PureState psi = initial;
        ClassicalRegister reg;
        for (const Instruction& inst : lowered.instructions()) {
            if (const auto* g = std::get_if<Gate>(&inst)) {
                psi.apply(*g);
            } else if (const auto* m = std::get_if<Measure>(&inst)) {
                bool bit = psi.measure(m->qubit, rng);
                if (m->readout && !m->readout->is_perfect()) bit = apply_readout_confusion(bit, *m->readout, rng);
                reg.set(m->cbit, bit);
            } else if (const auto* c = std::get_if<Conditional>(&inst)) {
                if (c->condition.eval(reg)) {
                    for (const Gate& g2 : c->gates) psi.apply(g2);
                }
            } else if (const auto* n = std::get_if<NoiseChannel>(&inst)) {
                apply_channel(psi, *n, rng);
            }
        }
        return reg.values & low_mask(visible_bits);
    });
}

Distribution run_trajectories(const Circuit& circuit, const NoiseModel* noise, const TrajectoryOptions& options) {
    if (!noise) return run_trajectories(circuit, options);
    return run_trajectories(decorate(circuit, *noise), options);
}

std::pair<ClassicalRegister, StabilizerTableau> stabilizer_run(const Circuit& circuit, std::mt19937_64& rng) {
    require_valid(circuit);
    const Circuit lowered = lower(circuit);
    StabilizerTableau tab(lowered.num_qubits());
    ClassicalRegister reg;
    for (const Instruction& inst : lowered.instructions()) {
        if (const auto* g = std::get_if<Gate>(&inst)) {
            tab.apply(*g);
        } else if (const auto* m = std::get_if<Measure>(&inst)) {
            bool bit = tab.measure(m->qubit.index, rng);
            if (m->readout && !m->readout->is_perfect()) bit = apply_readout_confusion(bit, *m->readout, rng);
            reg.set(m->cbit, bit);
        } else if (const auto* c = std::get_if<Conditional>(&inst)) {
            if (c->condition.eval(reg)) {
                for (const Gate& g2 : c->gates) tab.apply(g2);
            }
        } else if (const auto* n = std::get_if<NoiseChannel>(&inst)) {
            if (is_trivial(*n)) continue;
            if (n->kind == ChannelKind::AmplitudeDamping) {
                throw Error(ErrorCode::UnsupportedGate, "amplitude damping is not a stabilizer channel");
            }
            apply_pauli_letters(tab, *n, sample_pauli(*n, rng));
        }
    }
    return {visible(reg, circuit.num_cbits()), std::move(tab)};
}

Distribution sample_stabilizer(const Circuit& circuit, std::uint64_t shots, std::uint64_t seed) {
    require_valid(circuit);
    if (shots == 0) throw Error(ErrorCode::InvalidArgument, "shots must be at least 1");
    const Circuit small = compact(circuit);
    return sample_chunks(circuit.num_cbits(), shots, seed, 0, [&](std::mt19937_64& rng) {
        return stabilizer_run(small, rng).first.values;
    });
}

Distribution execute(const Circuit& circuit, const NoiseModel* noise, std::uint64_t shots, std::uint64_t seed) {
    const Circuit run = noise ? decorate(circuit, *noise) : circuit;
    if (shots == 0) return exact_distribution(run);
    return run_trajectories(run, TrajectoryOptions{shots, seed, 0});
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

}  // namespace adaptq
