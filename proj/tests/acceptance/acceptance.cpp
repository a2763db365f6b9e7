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

// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "adaptq/circuit.hpp"
#include "adaptq/engines.hpp"
#include "adaptq/error.hpp"
#include "adaptq/metrology.hpp"
#include "adaptq/noise.hpp"
#include "adaptq/protocols.hpp"
#include "oracle.hpp"
#include "protocol_oracle.hpp"
#include "random_circuits.hpp"

namespace {

using namespace adaptq;

constexpr double kExact = 1.0 - 1e-9;

struct Outcome {
    bool pass = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            if (!pass) detail << "; ";
            detail << what;
            pass = false;
        }
    }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::vector<QubitId> line_chain(std::uint32_t length) {
    std::vector<QubitId> chain;
    for (std::uint32_t k = 1; k <= length; ++k) chain.push_back(QubitId{k});
    return chain;
}

// Smallest per-branch fidelity of the oracle's output state to `expected`.
double oracle_state_min(const Protocol& p, const oracle::Vec& expected) {
    double worst = 1.0;
    for (const auto& b : oracle::branches(p.circuit)) {
        const auto rho = oracle::reduced(b.state, p.circuit.num_qubits(), testing_oracle::indices(p.outputs));
        worst = std::min(worst, oracle::fidelity(rho, expected));
    }
    return worst;
}

Circuit two_qubit_cnot() {
    Circuit c(2, 0);
    c.cnot(QubitId{0}, QubitId{1});
    return c;
}

// --- 1 ---------------------------------------------------------------------

Outcome noiseless_exactness() {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    const Topology ring = Topology::ring(8);

    for (std::uint32_t n = 2; n <= 6; ++n) {
        const Protocol p = build_ghz_adaptive(n);
        const double engine = min_fidelity(check_state_protocol(p, ghz_state(n)));
        const double ref = oracle_state_min(p, oracle::ghz(n));
        o.require(engine >= kExact && ref >= kExact, "GHZ n=" + std::to_string(n));
    }

    const std::pair<const char*, TeleCnotLayout> tele[] = {{"line unitary", TeleCnotLayout::line_unitary()},
                                                          {"line adaptive", TeleCnotLayout::line_adaptive()},
                                                          {"ring Q1-Q4", TeleCnotLayout::ring8_q1_q4()},
                                                          {"ring Q0-Q4", TeleCnotLayout::ring8_q0_q4()}};
    const Eigen::MatrixXd cnot_ptm = testing_oracle::unitary_ptm(two_qubit_cnot());
    for (const auto& [name, layout] : tele) {
        const bool on_ring = std::string(name).starts_with("ring");
        const Protocol p = build_tele_cnot(layout, on_ring ? &ring : nullptr);
        bool ok = min_fidelity(check_process_protocol(p, two_qubit_cnot())) >= kExact;
        for (const auto& r : testing_oracle::branch_ptms(p)) ok = ok && (r - cnot_ptm).cwiseAbs().maxCoeff() < 1e-9;
        o.require(ok, std::string("tele-CNOT ") + name);
    }

    for (bool reuse : {true, false}) {
        for (std::uint32_t n = 1; n <= 3; ++n) {
            const Protocol p = build_fanout(FanoutLayout::line(n, reuse));
            const double engine = min_fidelity(check_process_protocol(p, ideal_fanout(n)));
            const double ref = testing_oracle::min_random_input_fidelity(p, ideal_fanout(n), 4, 100 + n);
            o.require(engine >= kExact && ref >= kExact,
                      "fan-out N=" + std::to_string(n) + (reuse ? " (reuse)" : " (fresh ancillae)"));
        }
    }
    {
        const Protocol p = build_fanout(FanoutLayout::ring8_cxx(), &ring);
        o.require(min_fidelity(check_process_protocol(p, ideal_fanout(2))) >= kExact, "fan-out ring CXX");
    }

    // Teleportation: named inputs plus 20 random states, on a short line chain and the ring chain.
    std::vector<std::pair<std::string, std::vector<Gate>>> inputs{
        {"|0>", {}},
        {"|1>", {Gate::single(GateKind::X, QubitId{0})}},
        {"|+>", {Gate::single(GateKind::H, QubitId{0})}},
        {"|+i>", {Gate::single(GateKind::H, QubitId{0}), Gate::single(GateKind::S, QubitId{0})}},
    };
    std::mt19937_64 rng(2026);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
    for (int k = 0; k < 20; ++k) {
        inputs.push_back({"random #" + std::to_string(k),
                          {Gate::single(GateKind::RZ, QubitId{0}, angle(rng)), Gate::single(GateKind::RY, QubitId{0}, angle(rng)),
                           Gate::single(GateKind::RZ, QubitId{0}, angle(rng))}});
    }
    const auto ring_chain = ring8_teleport_chain();
    const std::vector<std::pair<Protocol, std::string>> teleports{
        {build_teleport(QubitId{0}, line_chain(2)), "line"},
        {build_teleport(QubitId{0}, ring_chain, &ring), "ring"},
    };
    for (const auto& [base, where] : teleports) {
        for (const auto& [name, prep] : inputs) {
            Circuit local(1, 0);
            for (const Gate& g : prep) local.append(g);
            const oracle::Vec expected = oracle::unitary(local) * oracle::basis(1, 0);
            PureState target(1);
            for (const Gate& g : prep) target.apply(g);
            std::vector<Gate> placed = prep;
            for (Gate& g : placed) g.qubits[0] = base.inputs[0];
            const Protocol p = with_input_prep(base, placed);
            const double engine = min_fidelity(check_state_protocol(p, target));
            const double ref = oracle_state_min(p, expected);
            o.require(engine >= kExact && ref >= kExact, "teleport " + where + " " + name);
        }
    }

    for (const char* bits : {"00", "10", "01", "11"}) {
        const Protocol p = build_entanglement_swap(ring8_swap_chain(), bits, &ring);
        const double engine = min_fidelity(check_state_protocol(p, bell_state(bits)));
        const double ref = oracle_state_min(p, oracle::bell(bits[0] == '1', bits[1] == '1'));
        o.require(engine >= kExact && ref >= kExact, std::string("swap ") + bits + " -> " + bell_state_name(bits));
    }

    const double elapsed = seconds_since(t0);
    o.require(elapsed < 60.0, "runtime " + std::to_string(elapsed) + " s >= 60 s");
    if (o.pass) o.detail << "all branches exact in " << elapsed << " s";
    return o;
}

// --- 2 ---------------------------------------------------------------------

Outcome constant_depth() {
    Outcome o;
    std::ostringstream depths;
    const std::uint32_t d2 = depth(build_ghz_adaptive(2).circuit);
    for (std::uint32_t n = 2; n <= 8; ++n) {
        const std::uint32_t d = depth(build_ghz_adaptive(n).circuit);
        const std::uint32_t ladder = depth(build_ghz_ladder(n));
        o.require(d == d2, "GHZ n=" + std::to_string(n) + " depth " + std::to_string(d) + " != " + std::to_string(d2));
        if (n >= 4) {
            o.require(d < ladder, "GHZ n=" + std::to_string(n) + " not below ladder " + std::to_string(ladder));
        }
        depths << (n == 2 ? "" : ",") << ladder;
    }
    const std::uint32_t t2 = depth(build_teleport(QubitId{0}, line_chain(2)).circuit);
    for (std::uint32_t len : {4U, 6U}) {
        const std::uint32_t t = depth(build_teleport(QubitId{0}, line_chain(len)).circuit);
        o.require(t == t2, "teleport chain " + std::to_string(len) + " depth " + std::to_string(t) + " != " + std::to_string(t2));
    }
    if (o.pass) o.detail << "GHZ depth " << d2 << " for n=2..8 (ladder " << depths.str() << "), teleport depth " << t2;
    return o;
}

// --- 3 ---------------------------------------------------------------------

Outcome cross_engine() {
    Outcome o;
    std::mt19937_64 rng(3);
    gen::AdaptiveOptions opt;
    opt.max_qubits = 5;
    opt.max_mcms = 4;
    constexpr int kCircuits = 200;
    constexpr std::uint64_t kShots = 10000;
    int failures = 0;
    double worst = 1.0;
    for (int k = 0; k < kCircuits; ++k) {
        const Circuit c = gen::random_adaptive_circuit(rng, opt);
        const auto exact = to_distribution(c.num_cbits(), enumerate_branches(c)).probabilities();
        const auto seed = static_cast<std::uint64_t>(k);
        const double p_stab = gen::chi_squared_p_value(sample_stabilizer(c, kShots, seed), exact);
        const double p_traj = gen::chi_squared_p_value(run_trajectories(c, TrajectoryOptions{kShots, seed, 0}), exact);
        failures += (p_stab <= 1e-3) + (p_traj <= 1e-3);
        worst = std::min({worst, p_stab, p_traj});
    }
    o.require(failures <= 2, std::to_string(failures) + " comparisons with p <= 0.001 (at most 2 allowed)");
    o.detail << (o.pass ? "" : "; ") << kCircuits << " circuits x 2 samplers, " << failures
             << " below p=0.001, smallest p=" << worst;
    return o;
}

// --- 4 ---------------------------------------------------------------------

Outcome arithmetic() {
    Outcome o;
    const double f = ghz_fidelity(0.4, 0.4, 0.2).value;
    o.require(f == 0.5, "ghz_fidelity(0.4, 0.4, 0.2) = " + std::to_string(f));
    const double tt = truth_table_fidelity(TruthTable::identity(2), TruthTable::from_permutation(two_qubit_cnot()));
    o.require(tt == 0.5, "truth_table_fidelity(identity, CNOT) = " + std::to_string(tt));
    const double ef = ef_from_r(0.001, 1);
    o.require(ef == 0.0015, "ef_from_r(0.001, 1) = " + std::to_string(ef));
    double round_trip = 0.0;
    for (std::uint32_t n = 1; n <= 4; ++n) {
        for (double r = 0.0; r <= 0.2; r += 0.001) round_trip = std::max(round_trip, std::abs(ef_from_r(r_from_ef(r, n), n) - r));
    }
    o.require(round_trip <= 1e-15, "round trip error " + std::to_string(round_trip));
    if (o.pass) o.detail << "exact; round-trip error " << round_trip;
    return o;
}

// --- 5 ---------------------------------------------------------------------

NoiseModel readout_only(const NoiseModel& device) {
    NoiseModel m = NoiseModel::noiseless(device.num_qubits());
    m.readout = device.readout;
    m.durations = device.durations;
    return m;
}

Outcome hardware_brackets() {
    Outcome o;
    const Device dev = load_device(default_device_path());
    auto timed = [&](const std::string& name, const std::function<void()>& body) {
        const auto t0 = std::chrono::steady_clock::now();
        body();
        const double s = seconds_since(t0);
        o.require(s <= 300.0, name + " took " + std::to_string(s) + " s");
    };

    double f[3] = {};
    timed("GHZ", [&] {
        for (std::uint32_t n = 2; n <= 4; ++n) {
            const Protocol p = build_ghz_adaptive(GHZPlan::ring8(n), &dev.topology);
            f[n - 2] = estimate_ghz_fidelity(p, &dev.noise, 0, 0).fidelity.value;
        }
    });
    o.require(f[0] > f[1] && f[1] > f[2], "F_GHZ not ordered");

    Ptm ptm{};
    timed("teleport PTM", [&] {
        const Protocol p = build_teleport(QubitId{0}, ring8_teleport_chain(), &dev.topology);
        ptm = qpt_single_qubit(p, &dev.noise, 0, 0);
    });
    o.require(ptm[1][1] < ptm[3][3] && ptm[2][2] < ptm[3][3], "teleport PTM r_x, r_y not below r_z");

    double cxx = 0.0;
    timed("CXX truth table", [&] {
        const Protocol p = build_fanout(FanoutLayout::ring8_cxx(), &dev.topology);
        cxx = truth_table_fidelity(truth_table(p, &dev.noise, 0, 0), TruthTable::from_permutation(ideal_fanout(2)));
    });
    o.require(cxx >= 0.55 && cxx <= 0.95, "F_tt(CXX) outside [0.55, 0.95]");

    double zero[2] = {};
    double plus[2] = {};
    const NoiseModel readout = readout_only(dev.noise);
    timed("teleport 1-TVD", [&] {
        const Protocol p = build_teleport(QubitId{0}, ring8_teleport_chain(), &dev.topology);
        const std::vector<Gate> h{Gate::single(GateKind::H, p.inputs[0])};
        const Distribution ideal_zero = Distribution::exact(1, {{0, 1.0}});
        const Distribution ideal_plus = Distribution::exact(1, {{0, 0.5}, {1, 0.5}});
        const NoiseModel* models[] = {&dev.noise, &readout};
        for (int k = 0; k < 2; ++k) {
            zero[k] = output_success(p, {}, ideal_zero, models[k], 0, 0);
            plus[k] = output_success(p, h, ideal_plus, models[k], 0, 0);
        }
    });
    o.require(plus[0] >= zero[0], "1-TVD(|+>) < 1-TVD(|0>) under packaged defaults");
    o.require(plus[1] >= zero[1], "1-TVD(|+>) < 1-TVD(|0>) under readout-only noise");

    o.detail << (o.pass ? "" : "; ") << "F_GHZ " << f[0] << " > " << f[1] << " > " << f[2] << ", PTM diag (" << ptm[1][1]
             << ", " << ptm[2][2] << ", " << ptm[3][3] << "), F_tt(CXX) " << cxx << ", 1-TVD |+> vs |0> " << plus[0]
             << " vs " << zero[0] << " (readout-only " << plus[1] << " vs " << zero[1] << ")";
    return o;
}

// --- 6 ---------------------------------------------------------------------

Outcome cb_phenomenology() {
    Outcome o;
    CbConfig cfg;
    cfg.spectators = {QubitId{0}};
    cfg.measured = QubitId{1};

    const CbResult clean = cb_mcm_experiment(cfg, NoiseModel::noiseless(2));
    for (char p : {'X', 'Y', 'Z'}) {
        const double rate = clean.get(QubitId{0}, p).fit.rate;
        o.require(std::abs(rate - 1.0) <= 0.02, std::string("noiseless p_") + p + " = " + std::to_string(rate));
    }

    const Device dev = load_device(default_device_path());
    NoiseModel strong = dev.noise;
    strong.crosstalk.pairs.clear();
    strong.crosstalk.pairs[{1, 0}] = CrosstalkEntry{0.5, 1.0, DephasingRegime::Strong};
    const CbResult full = cb_mcm_experiment(cfg, strong);
    const auto& ax = full.get(QubitId{0}, 'X').fit;
    const double pz = full.get(QubitId{0}, 'Z').fit.rate;
    o.require(!ax.reliable, "lambda=0.5: A_X not flagged unreliable");
    o.require(pz >= 0.98, "lambda=0.5: p_Z = " + std::to_string(pz));

    // Packaged weak pair: Q2 measured, Q1 spectator.
    CbConfig weak = cfg;
    weak.spectators = {QubitId{1}};
    weak.measured = QubitId{2};
    const CbResult off = cb_mcm_experiment(weak, dev.noise);
    weak.dd_active = true;
    const CbResult on = cb_mcm_experiment(weak, dev.noise);
    const double px_off = off.get(QubitId{1}, 'X').fit.rate;
    const double px_on = on.get(QubitId{1}, 'X').fit.rate;
    o.require(px_on - px_off >= 0.02, "weak regime DD gain " + std::to_string(px_on - px_off));

    o.detail << (o.pass ? "" : "; ") << "noiseless p = 1; lambda=0.5 A_X=" << ax.amplitude << (ax.reliable ? " (reliable)" : " (unreliable)")
             << ", p_Z=" << pz
             << "; weak p_X " << px_off << " -> " << px_on << " with DD";
    return o;
}

// --- 7 ---------------------------------------------------------------------

Outcome negative_controls() {
    Outcome o;
    const Topology ring = Topology::ring(8);
    struct Case {
        std::string name;
        Protocol protocol;
        std::function<double(const Protocol&)> check;
    };
    std::vector<Case> cases;
    for (std::uint32_t n = 2; n <= 6; ++n) {
        cases.push_back({"GHZ n=" + std::to_string(n), build_ghz_adaptive(n),
                         [n](const Protocol& p) { return min_fidelity(check_state_protocol(p, ghz_state(n))); }});
    }
    auto process = [](Circuit ideal) {
        return [ideal](const Protocol& p) { return min_fidelity(check_process_protocol(p, ideal)); };
    };
    cases.push_back({"tele-CNOT line unitary", build_tele_cnot(TeleCnotLayout::line_unitary()), process(two_qubit_cnot())});
    cases.push_back({"tele-CNOT line adaptive", build_tele_cnot(TeleCnotLayout::line_adaptive()), process(two_qubit_cnot())});
    cases.push_back({"tele-CNOT ring Q1-Q4", build_tele_cnot(TeleCnotLayout::ring8_q1_q4(), &ring), process(two_qubit_cnot())});
    cases.push_back({"tele-CNOT ring Q0-Q4", build_tele_cnot(TeleCnotLayout::ring8_q0_q4(), &ring), process(two_qubit_cnot())});
    for (bool reuse : {true, false}) {
        for (std::uint32_t n = 1; n <= 3; ++n) {
            cases.push_back({"fan-out N=" + std::to_string(n) + (reuse ? "" : " fresh"), build_fanout(FanoutLayout::line(n, reuse)),
                             process(ideal_fanout(n))});
        }
    }
    cases.push_back({"fan-out ring CXX", build_fanout(FanoutLayout::ring8_cxx(), &ring), process(ideal_fanout(2))});
    for (std::uint32_t len : {2U, 4U, 6U}) {
        cases.push_back({"teleport chain " + std::to_string(len), build_teleport(QubitId{0}, line_chain(len)), process(Circuit(1, 0))});
    }
    cases.push_back({"teleport ring", build_teleport(QubitId{0}, ring8_teleport_chain(), &ring), process(Circuit(1, 0))});
    for (const char* bits : {"00", "10", "01", "11"}) {
        const std::string b = bits;
        cases.push_back({"swap " + b, build_entanglement_swap(ring8_swap_chain(), b, &ring),
                         [b](const Protocol& p) { return min_fidelity(check_state_protocol(p, bell_state(b))); }});
    }

    std::size_t removed = 0;
    for (const Case& c : cases) {
        o.require(c.check(c.protocol) >= kExact, c.name + " is not exact with all corrections");
        const std::size_t k = count_conditionals(c.protocol.circuit);
        o.require(k > 0, c.name + " has no conditionals");
        Protocol bare = c.protocol;
        for (std::size_t i = 0; i < k; ++i) {
            o.require(c.check(without_conditional(c.protocol, i)) < 1.0 - 1e-6,
                      c.name + " still exact without conditional " + std::to_string(i));
            bare = without_conditional(bare, 0);
            ++removed;
        }
        if (k > 0) o.require(c.check(bare) < 1.0 - 1e-6, c.name + " still exact with no corrections");
    }
    if (o.pass) o.detail << cases.size() << " protocols, each of " << removed << " conditionals is necessary";
    return o;
}

}  // namespace

int main() {
    const std::pair<const char*, Outcome (*)()> criteria[] = {
        {"noiseless exactness", noiseless_exactness},
        {"constant depth", constant_depth},
        {"cross-engine agreement", cross_engine},
        {"fidelity arithmetic", arithmetic},
        {"hardware brackets", hardware_brackets},
        {"cycle benchmarking", cb_phenomenology},
        {"negative controls", negative_controls},
    };
    int failed = 0;
    int index = 0;
    for (const auto& [name, fn] : criteria) {
        ++index;
        Outcome o;
        try {
            o = fn();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail << "exception: " << e.what();
        }
        failed += !o.pass;
        std::printf("%s criterion %d (%s): %s\n", o.pass ? "PASS" : "FAIL", index, name, o.detail.str().c_str());
        std::fflush(stdout);
    }
    return failed == 0 ? 0 : 1;
}
