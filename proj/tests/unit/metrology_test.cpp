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

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "adaptq/engines.hpp"
#include "adaptq/error.hpp"
#include "adaptq/metrology.hpp"
#include "adaptq/noise.hpp"
#include "adaptq/protocols.hpp"
#include "random_circuits.hpp"

namespace adaptq {
namespace {

constexpr double kPi = std::numbers::pi;

Protocol bare_protocol(Circuit c, std::vector<QubitId> inputs, std::vector<QubitId> outputs) {
    Protocol p;
    p.name = "test";
    p.circuit = std::move(c);
    p.inputs = std::move(inputs);
    p.outputs = std::move(outputs);
    return p;
}

Ptm diag(double a, double b, double c, double d) {
    Ptm r{};
    r[0][0] = a;
    r[1][1] = b;
    r[2][2] = c;
    r[3][3] = d;
    return r;
}

void expect_ptm_near(const Ptm& a, const Ptm& b, double tol) {
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) EXPECT_NEAR(a[i][j], b[i][j], tol) << i << "," << j;
    }
}

TEST(GhzFidelity, Examples) {
    EXPECT_DOUBLE_EQ(ghz_fidelity(0.5, 0.5, 1.0).value, 1.0);
    EXPECT_TRUE(ghz_fidelity(0.5, 0.5, 1.0).genuine);
    const GhzFidelity boundary = ghz_fidelity(0.4, 0.4, 0.2);
    EXPECT_EQ(boundary.value, 0.5);
    EXPECT_FALSE(boundary.genuine);
    EXPECT_THROW(ghz_fidelity(0.7, 0.5, 0.0), Error);
    EXPECT_THROW(ghz_fidelity(0.5, 0.5, 1.5), Error);
}

TEST(Parity, NoiselessGhzHasUnitContrastAtFrequencyN) {
    for (std::uint32_t n = 2; n <= 4; ++n) {
        const Protocol p = build_ghz_adaptive(n);
        const ParityCurve curve = parity_oscillation(p.circuit, p.outputs, uniform_phases(4 * n + 8), nullptr, 0, 0);
        EXPECT_EQ(curve.frequency, n);
        EXPECT_NEAR(curve.amplitude, 1.0, 1e-9);
        EXPECT_NEAR(curve.signed_coherence(), 1.0, 1e-9);
        for (std::size_t k = 0; k < curve.phases.size(); ++k) {
            EXPECT_NEAR(curve.parities[k], std::cos(n * curve.phases[k]), 1e-9);
        }
    }
}

TEST(Parity, ProductStateHasNoContrast) {
    const Circuit zero(3, 0);
    const std::vector<QubitId> data = qubit_ids({0, 1, 2});
    const ParityCurve curve = parity_oscillation(zero, data, uniform_phases(16), nullptr, 0, 0);
    EXPECT_NEAR(curve.amplitude, 0.0, 1e-9);
}

TEST(Parity, SampledGhzWithinThreeSigma) {
    const Protocol p = build_ghz_adaptive(2);
    const GhzEstimate e = estimate_ghz_fidelity(p, nullptr, 4000, 3);
    // Each parity point has sigma <= 1/sqrt(shots); the fitted amplitude averages them.
    EXPECT_NEAR(e.fidelity.value, 1.0, 3.0 / std::sqrt(4000.0));
}

TEST(Parity, TooFewPhasesRejected) {
    const Protocol p = build_ghz_adaptive(2);
    EXPECT_THROW(parity_oscillation(p.circuit, p.outputs, uniform_phases(4), nullptr, 0, 0), Error);
}

TEST(Parity, FitRecoversSyntheticCurve) {
    const auto phases = uniform_phases(24);
    std::vector<double> y;
    for (double phi : phases) y.push_back(0.63 * std::cos(3 * phi + 0.4));
    const ParityCurve c = fit_parity(phases, y, 3);
    EXPECT_NEAR(c.amplitude, 0.63, 1e-12);
    EXPECT_NEAR(c.phase_offset, 0.4, 1e-12);
    EXPECT_TRUE(c.fit_ok);
}

TEST(Parity, StrongSpectatorRemovesContrastOnly) {
    NoiseModel m = NoiseModel::noiseless(3);
    m.crosstalk.pairs[{2, 0}] = CrosstalkEntry{0.5, 1.0, DephasingRegime::Strong};
    Circuit c(3, 1);
    c.h({0}).cnot({0}, {1}).barrier({QubitId{0}, QubitId{1}, QubitId{2}}).measure({2}, CbitId{0});
    const Protocol p = bare_protocol(c, {}, qubit_ids({0, 1}));
    const GhzEstimate e = estimate_ghz_fidelity(p, &m, 0, 0);
    EXPECT_NEAR(e.parity.amplitude, 0.0, 1e-9);
    EXPECT_NEAR(e.p_all0 + e.p_all1, 1.0, 1e-9);
    EXPECT_NEAR(e.fidelity.value, 0.5, 1e-9);
}

TEST(Parity, EstimatorMatchesStateFidelity) {
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        const std::uint32_t n = 2 + trial % 2;
        const Protocol p = build_ghz_adaptive(n);
        const std::uint32_t nq = p.circuit.num_qubits();
        NoiseModel m = NoiseModel::noiseless(nq);
        for (std::uint32_t q = 0; q < nq; ++q) {
            m.coherence.qubits[q].t1_us = 5.0 + 100.0 * u(rng);
            m.coherence.qubits[q].t2_star_us = m.coherence.qubits[q].t1_us * (0.2 + 1.5 * u(rng));
            m.coherence.qubits[q].t2_echo_us = m.coherence.qubits[q].t2_star_us;
        }
        for (std::uint32_t q = 0; q + 1 < nq; ++q) {
            m.gate_errors.two_qubit[{q, q + 1}] = 0.05 * u(rng);
            m.crosstalk.pairs[{q + 1, q}] = CrosstalkEntry{0.5 * u(rng), 1.0, DephasingRegime::Weak};
        }
        const DensityMatrix rho = mixed_state(run_density(decorate(p.circuit, m)));
        const double truth = state_fidelity(rho.reduced(p.outputs), ghz_state(n));
        const GhzEstimate e = estimate_ghz_fidelity(p, &m, 0, 0);
        EXPECT_NEAR(e.fidelity.value, truth, 0.02) << trial;
    }
}

TEST(TruthTable, IdentityCircuit) {
    const Protocol p = bare_protocol(Circuit(2, 0), qubit_ids({0, 1}), qubit_ids({0, 1}));
    const TruthTable t = truth_table(p, nullptr, 0, 0);
    EXPECT_DOUBLE_EQ(truth_table_fidelity(t, TruthTable::identity(2)), 1.0);
}

TEST(TruthTable, TeleportedCnotIsExactPermutation) {
    Circuit cnot(2, 0);
    cnot.cnot({0}, {1});
    const TruthTable t = truth_table(build_tele_cnot(TeleCnotLayout::line_unitary()), nullptr, 0, 0);
    const TruthTable ideal = TruthTable::from_permutation(cnot);
    for (std::uint64_t o = 0; o < 4; ++o) {
        for (std::uint64_t i = 0; i < 4; ++i) EXPECT_NEAR(t.entries[o][i], ideal.entries[o][i], 1e-12);
    }
    EXPECT_NEAR(truth_table_fidelity(t, ideal), 1.0, 1e-12);
}

TEST(TruthTable, FanoutIsExactCxx) {
    const TruthTable t = truth_table(build_fanout(FanoutLayout::line(2)), nullptr, 0, 0);
    EXPECT_NEAR(truth_table_fidelity(t, TruthTable::from_permutation(ideal_fanout(2))), 1.0, 1e-12);
}

TEST(TruthTable, IdentityVersusCnotIsHalf) {
    Circuit cnot(2, 0);
    cnot.cnot({0}, {1});
    EXPECT_EQ(truth_table_fidelity(TruthTable::identity(2), TruthTable::from_permutation(cnot)), 0.5);
    EXPECT_THROW(truth_table_fidelity(TruthTable::identity(2), TruthTable::identity(3)), Error);
}

TEST(TruthTable, SampledColumnsAreDeterministic) {
    const Protocol p = build_tele_cnot(TeleCnotLayout::line_unitary());
    const Device dev{Topology::line(4), NoiseModel::noiseless(4), "line"};
    const TruthTable a = truth_table(p, &dev.noise, 500, 9);
    const TruthTable b = truth_table(p, &dev.noise, 500, 9);
    EXPECT_EQ(a.entries, b.entries);
}

TEST(Tvd, Examples) {
    const Distribution p = Distribution::exact(1, {{0, 0.881}, {1, 0.119}});
    const Distribution ideal = Distribution::exact(1, {{0, 1.0}});
    EXPECT_NEAR(tvd(p, ideal), 0.119, 1e-12);
    EXPECT_DOUBLE_EQ(tvd(p, p), 0.0);
    EXPECT_DOUBLE_EQ(tvd(ideal, Distribution::exact(1, {{1, 1.0}})), 1.0);
    EXPECT_THROW(tvd(Distribution::exact(1, {{0, 0.5}}), ideal), Error);
}

TEST(Tvd, MetricOnRandomTriples) {
    std::mt19937_64 rng(4);
    auto random_dist = [&] {
        std::map<std::uint64_t, std::uint64_t> counts;
        for (std::uint64_t k = 0; k < 8; ++k) {
            const auto c = gen::uniform(rng, 0, 50);
            if (c > 0) counts[k] = c;
        }
        if (counts.empty()) counts[0] = 1;
        return Distribution::counts(3, counts);
    };
    for (int t = 0; t < 500; ++t) {
        const Distribution a = random_dist();
        const Distribution b = random_dist();
        const Distribution c = random_dist();
        EXPECT_NEAR(tvd(a, b), tvd(b, a), 1e-15);
        EXPECT_LE(tvd(a, c), tvd(a, b) + tvd(b, c) + 1e-12);
        EXPECT_GE(tvd(a, b), 0.0);
    }
}

TEST(Ptm, IdentityProcess) {
    const Protocol p = bare_protocol(Circuit(1, 0), qubit_ids({0}), qubit_ids({0}));
    expect_ptm_near(qpt_single_qubit(p, nullptr, 0, 0), identity_ptm(), 1e-12);
    const Ptm sampled = qpt_single_qubit(p, nullptr, 20000, 1);
    expect_ptm_near(sampled, identity_ptm(), 5.0 * 2.0 / std::sqrt(20000.0));
}

TEST(Ptm, NoiselessTeleportIsIdentity) {
    const Protocol p = build_teleport({0}, ring8_teleport_chain());
    expect_ptm_near(qpt_single_qubit(p, nullptr, 0, 0), identity_ptm(), 1e-9);
}

TEST(Ptm, StrongDephasingLowersXAndY) {
    const Device dev = load_device(default_device_path());
    NoiseModel m = NoiseModel::noiseless(8);
    for (const auto& [key, entry] : dev.noise.crosstalk.pairs) {
        m.crosstalk.pairs[key] = CrosstalkEntry{0.5, 1.0, DephasingRegime::Strong};
    }
    const Protocol p = build_teleport({0}, ring8_teleport_chain(), &dev.topology);
    const Ptm r = qpt_single_qubit(p, &m, 0, 0);
    EXPECT_LT(r[1][1], 0.1);
    EXPECT_LT(r[2][2], 0.1);
    EXPECT_NEAR(r[3][3], 1.0, 1e-9);
}

TEST(Ptm, MixtureIsLinear) {
    for (double q : {0.1, 0.3, 0.5}) {
        Circuit c(1, 0);
        c.append(NoiseChannel{ChannelKind::PhaseFlip, {QubitId{0}, QubitId{0}}, q});
        const Ptm r = qpt_single_qubit(bare_protocol(c, qubit_ids({0}), qubit_ids({0})), nullptr, 0, 0);
        const double s = 1.0 - 2.0 * q;
        expect_ptm_near(r, diag(1, s, s, 1), 1e-12);
    }
}

TEST(Ptm, ProcessFidelityExamples) {
    EXPECT_EQ(process_fidelity_from_ptm(identity_ptm(), identity_ptm()), 1.0);
    EXPECT_EQ(process_fidelity_from_ptm(diag(1, 0, 0, 1), identity_ptm()), 0.5);
    EXPECT_NEAR(process_fidelity_from_ptm(diag(1, 0.5, 0.5, 0.9), identity_ptm()), 0.725, 1e-15);
    const Ptm x = diag(1, 1, -1, -1);
    EXPECT_EQ(process_fidelity_from_ptm(x, x), 1.0);
}

TEST(Ptm, FromBlochRoundTrip) {
    const std::array<std::array<double, 3>, 4> outputs{{{0, 0, 1}, {0, 0, -1}, {1, 0, 0}, {0, 1, 0}}};
    expect_ptm_near(ptm_from_bloch(outputs), identity_ptm(), 1e-15);
}

TEST(BellParity, PhiMinusMatchesPhiPlus) {
    EXPECT_DOUBLE_EQ(bell_fidelity_from_parity(0.5, 0.5, 1.0, +1), 1.0);
    EXPECT_DOUBLE_EQ(bell_fidelity_from_parity(0.5, 0.5, 1.0 * std::cos(kPi), -1), 1.0);
    EXPECT_DOUBLE_EQ(bell_fidelity_from_parity(0.45, 0.45, 0.3, +1),
                     bell_fidelity_from_parity(0.45, 0.45, 0.3 * std::cos(kPi), -1));
}

TEST(DecayFit, RecoversExactPoints) {
    const std::vector<double> m{4, 16, 32};
    std::vector<double> y;
    for (double x : m) y.push_back(0.9 * std::pow(0.95, x));
    const DecayFit f = fit_exponential_decay(m, y);
    EXPECT_NEAR(f.amplitude, 0.9, 1e-6);
    EXPECT_NEAR(f.rate, 0.95, 1e-6);
    EXPECT_TRUE(f.reliable);
}

TEST(DecayFit, ConstantCurve) {
    const std::vector<double> m{4, 16, 64};
    const std::vector<double> y{0.8, 0.8, 0.8};
    const DecayFit f = fit_exponential_decay(m, y);
    EXPECT_NEAR(f.rate, 1.0, 1e-9);
    EXPECT_NEAR(f.amplitude, 0.8, 1e-9);
}

TEST(DecayFit, NoiseAroundZeroIsUnreliable) {
    const std::vector<double> m{4, 16, 64, 128};
    const std::vector<double> y{0.01, -0.02, 0.015, -0.01};
    EXPECT_FALSE(fit_exponential_decay(m, y).reliable);
}

TEST(DecayFit, SignalBelowFloorAtShortestLengthIsUnreliable) {
    const std::vector<double> m{4, 16, 64};
    const std::vector<double> y{0.0024, 0.0, -0.0012};
    const DecayFit f = fit_exponential_decay(m, y);
    EXPECT_FALSE(f.reliable);
    EXPECT_EQ(f.rate, 0.0);
}

TEST(Conversion, Examples) {
    EXPECT_EQ(ef_from_r(0.0, 1), 0.0);
    EXPECT_EQ(ef_from_r(0.001, 1), 0.0015);
    EXPECT_NEAR(r_from_ef(0.014, 2), 0.0112, 1e-15);
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(0.0, 0.5);
    for (int k = 0; k < 1000; ++k) {
        const double r = u(rng);
        const auto n = gen::uniform(rng, 1, 3);
        EXPECT_NEAR(r_from_ef(ef_from_r(r, n), n), r, 1e-15);
    }
}

TEST(Cb, NoiselessRatesAreOne) {
    CbConfig cfg;
    cfg.spectators = {QubitId{0}};
    cfg.measured = QubitId{1};
    const CbResult r = cb_mcm_experiment(cfg, NoiseModel::noiseless(2));
    for (char p : {'X', 'Y', 'Z'}) EXPECT_NEAR(r.get({0}, p).fit.rate, 1.0, 0.02) << p;
}

TEST(Cb, FullDephasingFlagsX) {
    NoiseModel m = NoiseModel::noiseless(2);
    m.crosstalk.pairs[{1, 0}] = CrosstalkEntry{0.5, 1.0, DephasingRegime::Strong};
    CbConfig cfg;
    cfg.spectators = {QubitId{0}};
    cfg.measured = QubitId{1};
    const CbResult r = cb_mcm_experiment(cfg, m);
    EXPECT_FALSE(r.get({0}, 'X').fit.reliable);
    EXPECT_FALSE(r.get({0}, 'Y').fit.reliable);
    EXPECT_NEAR(r.get({0}, 'Z').fit.rate, 1.0, 0.02);
    EXPECT_TRUE(r.to_json().is_object());
}

}  // namespace
}  // namespace adaptq
