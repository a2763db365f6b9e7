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

#include "adaptq/noise.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <optional>
#include <set>
#include <sstream>

#include "adaptq/error.hpp"

#ifndef ADAPTQ_DEFAULT_DEVICE
#define ADAPTQ_DEFAULT_DEVICE "data/device_8ring.json"
#endif

namespace adaptq {

namespace {

Mat2 mul(const Mat2& a, const Mat2& b) {
    return {a[0] * b[0] + a[1] * b[2], a[0] * b[1] + a[1] * b[3], a[2] * b[0] + a[3] * b[2], a[2] * b[1] + a[3] * b[3]};
}

bool is_zero(const Mat2& m) {
    return std::all_of(m.begin(), m.end(), [](const cplx& v) { return v == 0.0; });
}

KrausChannel phase_flip(double p) {
    if (p == 0.0) return KrausChannel{{Mat2{1.0, 0.0, 0.0, 1.0}}};
    const double a = std::sqrt(1.0 - p);
    const double b = std::sqrt(p);
    return KrausChannel{{Mat2{a, 0.0, 0.0, a}, Mat2{b, 0.0, 0.0, -b}}};
}

}  // namespace

double KrausChannel::completeness_error() const {
    Mat2 sum{};
    for (const Mat2& k : ops) {
        // K^dagger K
        const Mat2 kd{std::conj(k[0]), std::conj(k[2]), std::conj(k[1]), std::conj(k[3])};
        const Mat2 p = mul(kd, k);
        for (int i = 0; i < 4; ++i) sum[i] += p[i];
    }
    sum[0] -= 1.0;
    sum[3] -= 1.0;
    double err = 0.0;
    for (const cplx& v : sum) err = std::max(err, std::abs(v));
    return err;
}

KrausChannel KrausChannel::compose(const KrausChannel& first, const KrausChannel& second) {
    KrausChannel out;
    for (const Mat2& b : second.ops) {
        for (const Mat2& a : first.ops) {
            Mat2 m = mul(b, a);
            if (!is_zero(m)) out.ops.push_back(m);
        }
    }
    return out;
}

double amplitude_damping_probability(double t1_us, double t_ns) {
    if (!(t1_us > 0.0)) throw Error(ErrorCode::InvalidArgument, "T1 must be positive");
    if (t_ns < 0.0) throw Error(ErrorCode::InvalidArgument, "idle time must be non-negative");
    if (std::isinf(t1_us)) return 0.0;
    return -std::expm1(-t_ns / (t1_us * 1000.0));
}

double dephasing_probability(double tphi_us, double t_ns) {
    if (!(tphi_us > 0.0)) throw Error(ErrorCode::InvalidArgument, "Tphi must be positive or infinite");
    if (t_ns < 0.0) throw Error(ErrorCode::InvalidArgument, "idle time must be non-negative");
    if (std::isinf(tphi_us)) return 0.0;
    return -0.5 * std::expm1(-t_ns / (tphi_us * 1000.0));
}

KrausChannel idle_channel(double t1_us, double tphi_us, double t_ns) {
    const double p_amp = amplitude_damping_probability(t1_us, t_ns);
    const double p_phi = dephasing_probability(tphi_us, t_ns);
    KrausChannel ad;
    ad.ops.push_back(Mat2{1.0, 0.0, 0.0, std::sqrt(1.0 - p_amp)});
    if (p_amp > 0.0) ad.ops.push_back(Mat2{0.0, std::sqrt(p_amp), 0.0, 0.0});
    return KrausChannel::compose(ad, phase_flip(p_phi));
}

double tphi_from(double t1_us, double t2_us, bool* warning) {
    if (!(t1_us > 0.0) || !(t2_us > 0.0)) throw Error(ErrorCode::InvalidArgument, "T1 and T2 must be positive");
    if (warning) *warning = false;
    if (std::isinf(t2_us)) return kInfinity;
    const double rate = 1.0 / t2_us - 1.0 / (2.0 * t1_us);
    if (rate <= 0.0) {
        if (warning) *warning = true;
        return kInfinity;
    }
    return 1.0 / rate;
}

KrausChannel mcm_spectator_channel(double lambda, bool dd_active, double dd_suppression) {
    if (!(lambda >= 0.0 && lambda <= 0.5)) throw Error(ErrorCode::InvalidArgument, "lambda must lie in [0, 0.5]");
    if (!(dd_suppression >= 0.0 && dd_suppression <= 1.0)) {
        throw Error(ErrorCode::InvalidArgument, "dd_suppression must lie in [0, 1]");
    }
    return phase_flip(dd_active ? lambda * dd_suppression : lambda);
}

const CrosstalkEntry* MCMCrosstalkModel::find(QubitId measured, QubitId spectator) const {
    auto it = pairs.find({measured.index, spectator.index});
    return it == pairs.end() ? nullptr : &it->second;
}

double GateErrorModel::two_qubit_error(QubitId a, QubitId b) const {
    auto it = two_qubit.find({std::min(a.index, b.index), std::max(a.index, b.index)});
    return it == two_qubit.end() ? 0.0 : it->second;
}

NoiseModel NoiseModel::noiseless(std::uint32_t num_qubits) {
    NoiseModel m;
    m.coherence.qubits.assign(num_qubits, QubitCoherence{});
    m.readout.qubits.assign(num_qubits, ReadoutError{});
    return m;
}

NoiseModel NoiseModel::with_dd(bool active) const {
    NoiseModel m = *this;
    m.dd_active = active;
    return m;
}

double NoiseModel::idle_tphi_us(QubitId q) const {
    const auto& c = coherence.qubits.at(q.index);
    return tphi_from(c.t1_us, dd_active ? c.t2_echo_us : c.t2_star_us);
}

std::vector<std::string> NoiseModel::warnings() const {
    std::vector<std::string> out;
    for (std::uint32_t q = 0; q < coherence.qubits.size(); ++q) {
        const auto& c = coherence.qubits[q];
        const std::string tag = "Q" + std::to_string(q) + ": ";
        for (const auto& [name, t2] : {std::pair{"T2*", c.t2_star_us}, std::pair{"T2E", c.t2_echo_us}}) {
            bool clamped = false;
            if (std::isfinite(t2)) tphi_from(c.t1_us, t2, &clamped);
            if (clamped) out.push_back(tag + name + " >= 2 T1, pure dephasing disabled");
        }
        if (std::isfinite(c.t2_star_us) && c.t2_star_us > c.t2_echo_us) {
            out.push_back(tag + "T2* exceeds T2E (ingested as given)");
        }
        if (std::isfinite(c.t2_star_us) && c.t2_star_us > c.t1_us) out.push_back(tag + "T2* exceeds T1 (ingested as given)");
    }
    return out;
}

// ---------------------------------------------------------------------------
// Readout

Distribution apply_readout_confusion(const Distribution& dist, std::span<const QubitId> qubits, const ReadoutModel& model) {
    if (qubits.size() != dist.num_bits()) throw Error(ErrorCode::DimensionMismatch, "one qubit per distribution bit required");
    std::map<std::uint64_t, double> cur = dist.probabilities();
    for (std::size_t k = 0; k < qubits.size(); ++k) {
        if (qubits[k].index >= model.qubits.size()) {
            throw Error(ErrorCode::Calibration, "no readout entry for qubit " + std::to_string(qubits[k].index));
        }
        const ReadoutError& e = model.qubits[qubits[k].index];
        const std::uint64_t bit = std::uint64_t{1} << k;
        std::map<std::uint64_t, double> next;
        for (const auto& [key, p] : cur) {
            const bool one = key & bit;
            const double stay = one ? e.p11 : e.p00;
            if (stay > 0.0) next[key] += p * stay;
            if (stay < 1.0) next[key ^ bit] += p * (1.0 - stay);
        }
        cur = std::move(next);
    }
    return Distribution::exact(dist.num_bits(), std::move(cur));
}

bool apply_readout_confusion(bool true_bit, const ReadoutError& error, std::mt19937_64& rng) {
    const double stay = true_bit ? error.p11 : error.p00;
    if (stay >= 1.0) return true_bit;
    return std::uniform_real_distribution<double>(0.0, 1.0)(rng) < stay ? true_bit : !true_bit;
}

// ---------------------------------------------------------------------------
// Decoration

namespace {

bool is_op(const Instruction& inst) {
    return std::holds_alternative<Gate>(inst) || std::holds_alternative<Measure>(inst) ||
           std::holds_alternative<Reset>(inst) || std::holds_alternative<Conditional>(inst);
}

bool is_virtual(GateKind k) {
    return k == GateKind::I || k == GateKind::Z || k == GateKind::S || k == GateKind::Sdg || k == GateKind::RZ;
}

constexpr double kEps = 1e-9;

}  // namespace

Circuit decorate(const Circuit& circuit, const NoiseModel& noise) {
    require_valid(circuit);
    const std::uint32_t n = circuit.num_qubits();
    if (noise.num_qubits() < n || noise.readout.qubits.size() < n) {
        throw Error(ErrorCode::Calibration, "noise model covers " + std::to_string(noise.num_qubits()) +
                                                " qubits but the circuit uses " + std::to_string(n));
    }
    const Timeline tl = schedule(circuit, noise.durations);
    const auto insts = circuit.instructions();
    const std::size_t end_slot = insts.size();

    // Program-ordered op instructions per qubit.
    std::vector<std::vector<std::size_t>> ops(n);
    for (std::size_t i = 0; i < insts.size(); ++i) {
        if (!is_op(insts[i])) continue;
        for (QubitId q : instruction_qubits(insts[i])) ops[q.index].push_back(i);
    }
    auto slot_at = [&](std::uint32_t q, double t) {
        for (std::size_t i : ops[q]) {
            if (tl.instruction_start_ns[i] >= t - kEps) return i;
        }
        return end_slot;
    };
    std::vector<double> first_start(n, kInfinity);
    for (std::uint32_t q = 0; q < n; ++q) {
        if (!ops[q].empty()) first_start[q] = tl.instruction_start_ns[ops[q].front()];
    }

    std::vector<std::vector<Instruction>> before(insts.size() + 1);
    std::vector<std::vector<Instruction>> after(insts.size());

    // Idle decoherence over every gap after the qubit's first operation.
    for (std::uint32_t q = 0; q < n; ++q) {
        if (ops[q].empty()) continue;
        const auto& c = noise.coherence.qubits[q];
        const double tphi = noise.idle_tphi_us(QubitId{q});
        double gap_start = -1.0;
        double gap_len = 0.0;
        auto flush = [&] {
            if (gap_len <= 0.0) return;
            const double p_amp = amplitude_damping_probability(c.t1_us, gap_len);
            const double p_phi = dephasing_probability(tphi, gap_len);
            auto& dst = before[slot_at(q, gap_start)];
            if (p_amp > 0.0) dst.push_back(NoiseChannel{ChannelKind::AmplitudeDamping, {QubitId{q}, QubitId{q}}, p_amp});
            if (p_phi > 0.0) dst.push_back(NoiseChannel{ChannelKind::PhaseFlip, {QubitId{q}, QubitId{q}}, p_phi});
            gap_len = 0.0;
        };
        for (const Interval& iv : tl.per_qubit[q]) {
            const bool idle = iv.activity == Activity::Idle || iv.activity == Activity::FeedbackWait;
            if (!idle || iv.start_ns < first_start[q] - kEps) {
                flush();
                continue;
            }
            if (gap_len == 0.0) gap_start = iv.start_ns;
            gap_len += iv.end_ns - iv.start_ns;
        }
        flush();
    }

    // Measurement windows, for spectator dephasing.
    struct Window {
        std::uint32_t qubit;
        double start, end;
    };
    std::vector<Window> windows;
    for (std::size_t i = 0; i < insts.size(); ++i) {
        if (const auto* m = std::get_if<Measure>(&insts[i])) {
            windows.push_back({m->qubit.index, tl.instruction_start_ns[i], tl.instruction_end_ns[i]});
        } else if (const auto* r = std::get_if<Reset>(&insts[i])) {
            windows.push_back({r->qubit.index, tl.instruction_start_ns[i], tl.instruction_end_ns[i]});
        }
    }
    auto measured_during = [&](std::uint32_t s, double a, double b) {
        return std::any_of(windows.begin(), windows.end(), [&](const Window& w) {
            return w.qubit == s && w.start < b - kEps && w.end > a + kEps;
        });
    };

    for (std::size_t i = 0; i < insts.size(); ++i) {
        const Instruction& inst = insts[i];
        if (const auto* g = std::get_if<Gate>(&inst)) {
            if (g->arity() == 2) {
                const double p = noise.gate_errors.two_qubit_error(g->qubits[0], g->qubits[1]);
                if (p > 0.0) after[i].push_back(NoiseChannel{ChannelKind::Depolarize2, g->qubits, p});
            } else if (!is_virtual(g->kind) && g->qubits[0].index < noise.gate_errors.single_qubit.size()) {
                const double p = noise.gate_errors.single_qubit[g->qubits[0].index];
                if (p > 0.0) after[i].push_back(NoiseChannel{ChannelKind::Depolarize1, g->qubits, p});
            }
            continue;
        }
        QubitId measured;
        if (const auto* m = std::get_if<Measure>(&inst)) {
            measured = m->qubit;
        } else if (const auto* r = std::get_if<Reset>(&inst)) {
            measured = r->qubit;
        } else {
            continue;
        }
        const double a = tl.instruction_start_ns[i];
        const double b = tl.instruction_end_ns[i];
        for (const auto& [key, entry] : noise.crosstalk.pairs) {
            if (key.first != measured.index || key.second >= n) continue;
            const std::uint32_t s = key.second;
            if (first_start[s] >= b - kEps || measured_during(s, a, b)) continue;
            const double lam = noise.dd_active ? entry.lambda * entry.dd_suppression : entry.lambda;
            if (lam > 0.0) before[slot_at(s, b)].push_back(NoiseChannel{ChannelKind::PhaseFlip, {QubitId{s}, QubitId{s}}, lam});
        }
    }

    Circuit out(circuit.num_qubits(), circuit.num_cbits());
    out.set_topology(circuit.topology());
    auto readout_for = [&](QubitId q, const std::optional<ReadoutError>& existing) -> std::optional<ReadoutError> {
        if (existing) return existing;
        const ReadoutError& e = noise.readout.qubits[q.index];
        if (e.is_perfect()) return std::nullopt;
        return e;
    };
    for (std::size_t i = 0; i < insts.size(); ++i) {
        for (auto& ch : before[i]) out.append(std::move(ch));
        if (const auto* m = std::get_if<Measure>(&insts[i])) {
            Measure mm = *m;
            mm.readout = readout_for(m->qubit, m->readout);
            out.append(mm);
        } else if (const auto* r = std::get_if<Reset>(&insts[i])) {
            out.append(Reset{r->qubit, readout_for(r->qubit, r->readout)});
        } else {
            out.append(insts[i]);
        }
        for (auto& ch : after[i]) out.append(std::move(ch));
    }
    for (auto& ch : before[end_slot]) out.append(std::move(ch));
    return out;
}

// ---------------------------------------------------------------------------
// Device files

namespace {

[[noreturn]] void calib_fail(const std::string& what) { throw Error(ErrorCode::Calibration, what); }

double positive(const nlohmann::json& j, const char* key, const std::string& where) {
    if (!j.contains(key)) calib_fail(where + ": missing '" + key + "'");
    if (j.at(key).is_string() && j.at(key).get<std::string>() == "inf") return kInfinity;
    if (!j.at(key).is_number()) calib_fail(where + ": '" + key + "' is not a number");
    const double v = j.at(key).get<double>();
    if (!(v > 0.0)) calib_fail(where + ": '" + key + "' must be positive");
    return v;
}

double in_range(const nlohmann::json& j, const char* key, double lo, double hi, const std::string& where) {
    if (!j.contains(key) || !j.at(key).is_number()) calib_fail(where + ": missing or non-numeric '" + key + "'");
    const double v = j.at(key).get<double>();
    if (!(v >= lo && v <= hi)) {
        std::ostringstream s;
        s << where << ": '" << key << "' = " << v << " outside [" << lo << ", " << hi << "]";
        calib_fail(s.str());
    }
    return v;
}

std::uint32_t qubit_of(const nlohmann::json& j, std::uint32_t n, const std::string& where) {
    if (!j.contains("qubit") || !j.at("qubit").is_number_unsigned()) calib_fail(where + ": missing 'qubit'");
    const auto q = j.at("qubit").get<std::uint32_t>();
    if (q >= n) calib_fail(where + ": qubit " + std::to_string(q) + " outside the topology");
    return q;
}

template <class T>
std::vector<T> per_qubit(const nlohmann::json& list, std::uint32_t n, const std::string& section,
                         const std::function<T(const nlohmann::json&, const std::string&)>& parse) {
    if (!list.is_array()) calib_fail(section + ": expected a list of per-qubit entries");
    std::vector<std::optional<T>> seen(n);
    for (const auto& e : list) {
        const auto q = qubit_of(e, n, section);
        const std::string where = section + " Q" + std::to_string(q);
        if (seen[q]) calib_fail(where + ": duplicate entry");
        seen[q] = parse(e, where);
    }
    std::vector<T> out;
    for (std::uint32_t q = 0; q < n; ++q) {
        if (!seen[q]) calib_fail(section + ": missing entry for Q" + std::to_string(q));
        out.push_back(*seen[q]);
    }
    return out;
}

nlohmann::json number_or_inf(double v) { return std::isinf(v) ? nlohmann::json("inf") : nlohmann::json(v); }

}  // namespace

Device device_from_json(const nlohmann::json& j) {
    try {
        for (const char* section : {"topology", "coherence", "readout", "mcm_crosstalk", "durations"}) {
            if (!j.contains(section)) calib_fail(std::string("missing section '") + section + "'");
        }
        Device dev;
        dev.name = j.value("name", std::string("device"));

        const auto& topo = j.at("topology");
        const auto n = topo.at("num_qubits").get<std::uint32_t>();
        dev.topology = Topology(n);
        for (const auto& e : topo.at("edges")) {
            const auto a = e.at(0).get<std::uint32_t>();
            const auto b = e.at(1).get<std::uint32_t>();
            if (a >= n || b >= n || a == b) calib_fail("topology: bad edge");
            dev.topology.add_edge(QubitId{a}, QubitId{b});
        }

        NoiseModel& m = dev.noise;
        m.coherence.qubits = per_qubit<QubitCoherence>(
            j.at("coherence"), n, "coherence", [](const nlohmann::json& e, const std::string& where) {
                return QubitCoherence{positive(e, "t1_us", where), positive(e, "t2_star_us", where),
                                      positive(e, "t2_echo_us", where)};
            });

        const auto& ro = j.at("readout");
        m.readout.measurement_ns = positive(ro, "measurement_ns", "readout");
        m.readout.esp_enabled = ro.value("esp_enabled", true);
        m.readout.qubits = per_qubit<ReadoutError>(ro.at("qubits"), n, "readout",
                                                   [](const nlohmann::json& e, const std::string& where) {
                                                       return ReadoutError{in_range(e, "p00", 0.5, 1.0, where),
                                                                           in_range(e, "p11", 0.5, 1.0, where)};
                                                   });

        const auto& xt = j.at("mcm_crosstalk");
        m.crosstalk.strong_threshold = xt.value("strong_threshold", 0.25);
        for (const auto& e : xt.at("pairs")) {
            const auto a = e.at("measured").get<std::uint32_t>();
            const auto b = e.at("spectator").get<std::uint32_t>();
            const std::string where = "mcm_crosstalk Q" + std::to_string(a) + "->Q" + std::to_string(b);
            if (a >= n || b >= n || a == b) calib_fail(where + ": bad qubit pair");
            CrosstalkEntry c;
            c.lambda = in_range(e, "lambda", 0.0, 0.5, where);
            c.dd_suppression = in_range(e, "dd_suppression", 0.0, 1.0, where);
            c.regime = c.lambda > m.crosstalk.strong_threshold ? DephasingRegime::Strong : DephasingRegime::Weak;
            if (e.contains("regime")) {
                const auto tag = e.at("regime").get<std::string>();
                if (tag != "weak" && tag != "strong") calib_fail(where + ": regime must be 'weak' or 'strong'");
                if ((tag == "strong") != (c.regime == DephasingRegime::Strong)) {
                    calib_fail(where + ": regime tag contradicts lambda and the strong threshold");
                }
            }
            if (!m.crosstalk.pairs.emplace(std::pair{a, b}, c).second) calib_fail(where + ": duplicate pair");
        }

        const auto& du = j.at("durations");
        m.durations = Durations{};
        auto opt = [&](const char* key) -> std::optional<double> {
            if (!du.contains(key)) return std::nullopt;
            return in_range(du, key, 0.0, 1e9, "durations");
        };
        m.durations.single_qubit_gate_ns = opt("single_qubit_gate_ns");
        m.durations.two_qubit_gate_ns = opt("two_qubit_gate_ns");
        m.durations.measurement_ns = opt("measurement_ns");
        m.durations.reset_ns = opt("reset_ns");
        m.durations.feedback_latency_ns = du.contains("feedback_latency_ns") ? in_range(du, "feedback_latency_ns", 0.0, 1e9, "durations") : 150.0;

        if (j.contains("gate_errors")) {
            const auto& ge = j.at("gate_errors");
            if (ge.contains("single_qubit")) {
                m.gate_errors.single_qubit = per_qubit<double>(
                    ge.at("single_qubit"), n, "gate_errors.single_qubit",
                    [](const nlohmann::json& e, const std::string& where) { return in_range(e, "e_f", 0.0, 1.0, where); });
            }
            for (const auto& e : ge.value("two_qubit", nlohmann::json::array())) {
                const auto a = e.at("qubits").at(0).get<std::uint32_t>();
                const auto b = e.at("qubits").at(1).get<std::uint32_t>();
                const std::string where = "gate_errors.two_qubit Q" + std::to_string(a) + "-Q" + std::to_string(b);
                if (a >= n || b >= n || a == b) calib_fail(where + ": bad pair");
                m.gate_errors.two_qubit[{std::min(a, b), std::max(a, b)}] = in_range(e, "e_f", 0.0, 1.0, where);
            }
        }
        return dev;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::Calibration, std::string("malformed calibration: ") + e.what());
    }
}

Device load_device(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::Io, "cannot open calibration file " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::Calibration, path.string() + ": " + e.what());
    }
    return device_from_json(j);
}

nlohmann::json device_to_json(const Device& device) {
    const NoiseModel& m = device.noise;
    nlohmann::json j;
    j["name"] = device.name;
    nlohmann::json edges = nlohmann::json::array();
    for (const auto& [a, b] : device.topology.edges()) edges.push_back({a.index, b.index});
    j["topology"] = {{"num_qubits", device.topology.num_qubits()}, {"edges", edges}};

    nlohmann::json coh = nlohmann::json::array();
    for (std::uint32_t q = 0; q < m.coherence.qubits.size(); ++q) {
        const auto& c = m.coherence.qubits[q];
        coh.push_back({{"qubit", q}, {"t1_us", number_or_inf(c.t1_us)}, {"t2_star_us", number_or_inf(c.t2_star_us)},
                       {"t2_echo_us", number_or_inf(c.t2_echo_us)}});
    }
    j["coherence"] = coh;

    nlohmann::json ro = nlohmann::json::array();
    for (std::uint32_t q = 0; q < m.readout.qubits.size(); ++q) {
        ro.push_back({{"qubit", q}, {"p00", m.readout.qubits[q].p00}, {"p11", m.readout.qubits[q].p11}});
    }
    j["readout"] = {{"measurement_ns", m.readout.measurement_ns}, {"esp_enabled", m.readout.esp_enabled}, {"qubits", ro}};

    nlohmann::json pairs = nlohmann::json::array();
    for (const auto& [key, c] : m.crosstalk.pairs) {
        pairs.push_back({{"measured", key.first},
                         {"spectator", key.second},
                         {"lambda", c.lambda},
                         {"dd_suppression", c.dd_suppression},
                         {"regime", c.regime == DephasingRegime::Strong ? "strong" : "weak"}});
    }
    j["mcm_crosstalk"] = {{"strong_threshold", m.crosstalk.strong_threshold}, {"pairs", pairs}};

    nlohmann::json du = nlohmann::json::object();
    if (m.durations.single_qubit_gate_ns) du["single_qubit_gate_ns"] = *m.durations.single_qubit_gate_ns;
    if (m.durations.two_qubit_gate_ns) du["two_qubit_gate_ns"] = *m.durations.two_qubit_gate_ns;
    if (m.durations.measurement_ns) du["measurement_ns"] = *m.durations.measurement_ns;
    if (m.durations.reset_ns) du["reset_ns"] = *m.durations.reset_ns;
    du["feedback_latency_ns"] = m.durations.feedback_latency_ns;
    j["durations"] = du;

    if (!m.gate_errors.single_qubit.empty() || !m.gate_errors.two_qubit.empty()) {
        nlohmann::json sq = nlohmann::json::array();
        for (std::uint32_t q = 0; q < m.gate_errors.single_qubit.size(); ++q) {
            sq.push_back({{"qubit", q}, {"e_f", m.gate_errors.single_qubit[q]}});
        }
        nlohmann::json tq = nlohmann::json::array();
        for (const auto& [key, e] : m.gate_errors.two_qubit) tq.push_back({{"qubits", {key.first, key.second}}, {"e_f", e}});
        j["gate_errors"] = {{"single_qubit", sq}, {"two_qubit", tq}};
    }
    return j;
}

std::filesystem::path default_device_path() {
    if (const char* env = std::getenv("ADAPTQ_DEVICE"); env && *env) return env;
    return ADAPTQ_DEFAULT_DEVICE;
}

}  // namespace adaptq
