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

#include "adaptq/circuit.hpp"
#include "adaptq/cond_expr.hpp"
#include "adaptq/error.hpp"
#include "adaptq/protocols.hpp"
#include "adaptq/schedule.hpp"
#include "adaptq/serialize.hpp"
#include "oracle.hpp"
#include "random_circuits.hpp"

namespace adaptq {
namespace {

ClassicalRegister reg_of(std::initializer_list<bool> bits) {
    const std::vector<bool> v(bits);
    ClassicalRegister r;
    for (std::size_t i = 0; i < v.size(); ++i) r.set(CbitId{static_cast<std::uint32_t>(i)}, v[i]);
    return r;
}

const CbitId c0{0};
const CbitId c1{1};

TEST(CondExpr, XorOfEqualBitsIsFalse) {
    EXPECT_FALSE((CondExpr::bit(c0) ^ CondExpr::bit(c1)).eval(reg_of({true, true})));
}

TEST(CondExpr, XorOfDifferentBitsIsTrue) {
    EXPECT_TRUE((CondExpr::bit(c0) ^ CondExpr::bit(c1)).eval(reg_of({true, false})));
}

TEST(CondExpr, ConstantNeedsNoBits) {
    EXPECT_TRUE(CondExpr::constant(true).eval(ClassicalRegister{}));
    EXPECT_TRUE(CondExpr::constant(true).bits().empty());
}

TEST(CondExpr, UnwrittenBitThrows) {
    try {
        CondExpr::bit(CbitId{3}).eval(reg_of({true}));
        FAIL() << "expected an error";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::UnwrittenBit);
    }
}

TEST(CondExpr, EmptyParityIsFalse) {
    EXPECT_FALSE(CondExpr::parity({}).eval(ClassicalRegister{}));
}

TEST(CondExpr, ParseMatchesTruthTable) {
    const CondExpr e = CondExpr::parse("!(c0 & c1) | c2 ^ 1");
    for (int v = 0; v < 8; ++v) {
        const bool a = v & 1;
        const bool b = v & 2;
        const bool c = v & 4;
        const bool expected = !(a && b) || (c != true);
        EXPECT_EQ(e.eval(reg_of({a, b, c})), expected) << v;
    }
}

TEST(CondExpr, TextRoundTrip) {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 200; ++trial) {
        CondExpr e = CondExpr::bit(CbitId{gen::uniform(rng, 0, 5)});
        for (int k = 0; k < 4; ++k) {
            const CondExpr other = CondExpr::bit(CbitId{gen::uniform(rng, 0, 5)});
            switch (gen::uniform(rng, 0, 3)) {
                case 0: e = e ^ other; break;
                case 1: e = e & other; break;
                case 2: e = e | other; break;
                default: e = !e; break;
            }
        }
        const CondExpr back = CondExpr::parse(e.to_string());
        for (std::uint64_t v = 0; v < 64; ++v) {
            ClassicalRegister r{v, 63};
            ASSERT_EQ(e.eval(r), back.eval(r)) << e.to_string();
        }
    }
}

TEST(CondExpr, MalformedTextIsParseError) {
    for (const char* bad : {"", "c", "c0 ^", "(c0", "c0 c1", "x1"}) {
        try {
            CondExpr::parse(bad);
            ADD_FAILURE() << "accepted '" << bad << "'";
        } catch (const Error& e) {
            EXPECT_EQ(e.code(), ErrorCode::Parse) << bad;
        }
    }
}

TEST(Gate, QuarterTurnsAndCliffordCheck) {
    EXPECT_EQ(quarter_turns(std::numbers::pi), 2);
    EXPECT_EQ(quarter_turns(-std::numbers::pi / 2), 3);
    EXPECT_FALSE(quarter_turns(0.3).has_value());
    EXPECT_TRUE(is_clifford(Gate::single(GateKind::RZ, {0}, std::numbers::pi / 2)));
    EXPECT_FALSE(is_clifford(Gate::single(GateKind::RZ, {0}, std::numbers::pi / 3)));
    EXPECT_TRUE(is_clifford(Gate::cnot({0}, {1})));
}

TEST(Gate, MatricesAreUnitary) {
    for (GateKind k : {GateKind::I, GateKind::X, GateKind::Y, GateKind::Z, GateKind::H, GateKind::S, GateKind::Sdg,
                       GateKind::RX, GateKind::RY, GateKind::RZ}) {
        const Mat2 m = single_qubit_matrix(Gate::single(k, {0}, 0.7));
        for (int r = 0; r < 2; ++r) {
            for (int c = 0; c < 2; ++c) {
                cplx dot = 0;
                for (int j = 0; j < 2; ++j) dot += m[r * 2 + j] * std::conj(m[c * 2 + j]);
                EXPECT_NEAR(std::abs(dot - cplx(r == c ? 1.0 : 0.0)), 0.0, 1e-12) << gate_name(k);
            }
        }
    }
}

TEST(Gate, NamesRoundTrip) {
    for (GateKind k : {GateKind::I, GateKind::X, GateKind::Y, GateKind::Z, GateKind::H, GateKind::S, GateKind::Sdg,
                       GateKind::RX, GateKind::RY, GateKind::RZ, GateKind::CNOT, GateKind::CZ}) {
        EXPECT_EQ(gate_from_name(gate_name(k)), k);
    }
    EXPECT_FALSE(gate_from_name("TOFFOLI").has_value());
}

TEST(Validate, EmptyCircuitHasNoViolations) { EXPECT_TRUE(validate(Circuit{}).empty()); }

TEST(Validate, NonAdjacentCnotOnRing) {
    Circuit c(8, 0);
    c.cnot({0}, {4});
    const Topology ring = Topology::ring(8);
    const auto v = validate(c, &ring);
    ASSERT_EQ(v.size(), 1U);
    EXPECT_EQ(v[0].kind, Violation::Kind::NonAdjacentPair);
    c.set_topology(ring);
    EXPECT_EQ(validate(c).size(), 1U);
}

TEST(Validate, ConditionalOnUnwrittenBit) {
    Circuit c(2, 1);
    c.conditional(CondExpr::bit(c0), {Gate::single(GateKind::X, {0})});
    const auto v = validate(c);
    ASSERT_EQ(v.size(), 1U);
    EXPECT_EQ(v[0].kind, Violation::Kind::UnwrittenBit);
}

TEST(Validate, RangeAndDuplicateChecks) {
    Circuit c(2, 1);
    c.h({2});
    c.cnot({1}, {1});
    c.measure({0}, CbitId{4});
    const auto v = validate(c);
    ASSERT_EQ(v.size(), 3U);
    EXPECT_EQ(v[0].kind, Violation::Kind::QubitOutOfRange);
    EXPECT_EQ(v[1].kind, Violation::Kind::DuplicateQubit);
    EXPECT_EQ(v[2].kind, Violation::Kind::CbitOutOfRange);
    EXPECT_THROW(require_valid(c), Error);
}

TEST(Validate, CbitOverwriteIsAllowed) {
    Circuit c(1, 1);
    c.measure({0}, c0).measure({0}, c0);
    EXPECT_TRUE(validate(c).empty());
}

TEST(Depth, EmptyCircuitIsZero) { EXPECT_EQ(depth(Circuit{}), 0U); }

TEST(Depth, DisjointCnotsShareOneLayer) {
    Circuit c(6, 0);
    c.cnot({0}, {1}).cnot({2}, {3}).cnot({4}, {5});
    EXPECT_EQ(depth(c), 1U);
}

TEST(Depth, ConditionalFollowsItsMeasurement) {
    Circuit c(2, 1);
    c.measure({1}, c0).conditional(CondExpr::bit(c0), {Gate::single(GateKind::X, {0})});
    EXPECT_EQ(depth(c), 2U);
}

TEST(Depth, ResetCountsAsMeasurementPlusConditional) {
    Circuit c(1, 0);
    c.reset({0});
    EXPECT_EQ(depth(c), 2U);
}

TEST(Depth, AdaptiveGhzIsConstant) {
    const std::size_t d2 = depth(build_ghz_adaptive(2).circuit);
    for (std::uint32_t n = 3; n <= 8; ++n) EXPECT_EQ(depth(build_ghz_adaptive(n).circuit), d2) << n;
}

TEST(Depth, LadderGrowsStrictly) {
    for (std::uint32_t n = 3; n <= 8; ++n) EXPECT_GT(depth(build_ghz_ladder(n)), depth(build_ghz_ladder(n - 1)));
}

TEST(Depth, DelayInsertionDoesNotChangeDepth) {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 200; ++trial) {
        const Circuit c = gen::random_adaptive_circuit(rng);
        Circuit d(c.num_qubits(), c.num_cbits());
        for (const auto& inst : c.instructions()) {
            if (gen::uniform(rng, 0, 2) == 0) d.delay({gen::uniform(rng, 0, c.num_qubits() - 1)}, 100.0);
            d.append(inst);
        }
        EXPECT_EQ(depth(c), depth(d));
    }
}

TEST(Lower, RewritesXMeasureAndReset) {
    Circuit c(1, 1);
    c.measure({0}, c0, Basis::X).reset({0});
    const Circuit l = lower(c);
    EXPECT_EQ(l.num_cbits(), 2U);
    for (const auto& inst : l.instructions()) {
        EXPECT_FALSE(std::holds_alternative<Reset>(inst));
        if (const auto* m = std::get_if<Measure>(&inst)) EXPECT_EQ(m->basis, Basis::Z);
    }
}

TEST(Lower, PreservesOutcomeDistribution) {
    std::mt19937_64 rng(17);
    gen::AdaptiveOptions opt;
    opt.max_qubits = 3;
    opt.clifford_only = false;
    for (int trial = 0; trial < 100; ++trial) {
        const Circuit c = gen::random_adaptive_circuit(rng, opt);
        const auto before = oracle::distribution(c);
        std::map<std::uint64_t, double> after;
        const std::uint64_t mask = (std::uint64_t{1} << c.num_cbits()) - 1;
        for (const auto& [k, p] : oracle::distribution(lower(c))) after[k & mask] += p;
        ASSERT_EQ(before.size(), after.size()) << to_text(c);
        for (const auto& [k, p] : before) EXPECT_NEAR(after[k], p, 1e-9) << to_text(c);
    }
}

TEST(Schedule, SingleMeasurement) {
    Circuit c(3, 1);
    c.measure({0}, c0);
    const Timeline t = schedule(c, Durations::defaults());
    EXPECT_DOUBLE_EQ(t.end_ns, 700.0);
    ASSERT_EQ(t.per_qubit[0].size(), 1U);
    EXPECT_EQ(t.per_qubit[0][0].activity, Activity::Measure);
    for (std::uint32_t q = 1; q < 3; ++q) {
        ASSERT_EQ(t.per_qubit[q].size(), 1U);
        EXPECT_EQ(t.per_qubit[q][0].activity, Activity::Idle);
        EXPECT_DOUBLE_EQ(t.per_qubit[q][0].end_ns, 700.0);
    }
}

TEST(Schedule, FeedbackLatencyDelaysConditional) {
    Circuit c(2, 1);
    c.measure({1}, c0).conditional(CondExpr::bit(c0), {Gate::single(GateKind::X, {0})});
    const Timeline t = schedule(c, Durations::defaults());
    EXPECT_DOUBLE_EQ(t.instruction_start_ns[1], 850.0);
    EXPECT_DOUBLE_EQ(t.instruction_end_ns[1], 880.0);
    bool saw_wait = false;
    for (const auto& iv : t.per_qubit[0]) saw_wait |= iv.activity == Activity::FeedbackWait;
    EXPECT_TRUE(saw_wait);
}

TEST(Schedule, ParallelMeasurementsShareWindow) {
    Circuit c(2, 2);
    c.measure({0}, c0).measure({1}, c1);
    const Timeline t = schedule(c, Durations::defaults());
    EXPECT_DOUBLE_EQ(t.instruction_start_ns[0], 0.0);
    EXPECT_DOUBLE_EQ(t.instruction_start_ns[1], 0.0);
    EXPECT_DOUBLE_EQ(t.instruction_end_ns[1], 700.0);
}

TEST(Schedule, MissingDurationOnlyWhenUsed) {
    Durations d;
    d.single_qubit_gate_ns = 30.0;
    Circuit c(1, 0);
    c.h({0});
    EXPECT_NO_THROW(schedule(c, d));
    Circuit m(1, 1);
    m.measure({0}, c0);
    try {
        schedule(m, d);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::MissingDuration);
    }
}

TEST(Schedule, TimelinesAreContiguousAndAligned) {
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 200; ++trial) {
        const Circuit c = gen::random_adaptive_circuit(rng);
        const Timeline t = schedule(c, Durations::defaults());
        for (const auto& iv : t.per_qubit) {
            double at = 0.0;
            for (const auto& seg : iv) {
                ASSERT_NEAR(seg.start_ns, at, 1e-9);
                ASSERT_GE(seg.end_ns, seg.start_ns);
                at = seg.end_ns;
            }
            ASSERT_NEAR(at, t.end_ns, 1e-9);
        }
    }
}

Circuit random_decorated_circuit(std::mt19937_64& rng) {
    gen::AdaptiveOptions opt;
    opt.clifford_only = false;
    Circuit c = gen::random_adaptive_circuit(rng, opt);
    const std::uint32_t n = c.num_qubits();
    std::vector<Instruction> extra;
    extra.push_back(Delay{{gen::uniform(rng, 0, n - 1)}, 123.456});
    extra.push_back(Barrier{qubit_ids({0})});
    extra.push_back(NoiseChannel{ChannelKind::AmplitudeDamping, {QubitId{0}, QubitId{0}}, 0.0123456789});
    extra.push_back(NoiseChannel{ChannelKind::PhaseFlip, {QubitId{0}, QubitId{0}}, 1.0 / 3.0});
    extra.push_back(Measure{{0}, {0}, Basis::X, ReadoutError{0.995, 0.983}});
    extra.push_back(Reset{{0}, ReadoutError{0.99, 0.97}});
    if (n >= 2) extra.push_back(NoiseChannel{ChannelKind::Depolarize2, {QubitId{0}, QubitId{1}}, 0.014});
    c.insert(c.size(), extra);
    if (gen::uniform(rng, 0, 1)) c.set_topology(Topology::line(n));
    return c;
}

TEST(Serialize, TextRoundTripIsLossless) {
    std::mt19937_64 rng(29);
    for (int trial = 0; trial < 300; ++trial) {
        const Circuit c = random_decorated_circuit(rng);
        const std::string text = to_text(c);
        EXPECT_EQ(from_text(text), c) << text;
        EXPECT_EQ(to_text(from_text(text)), text);
    }
}

TEST(Serialize, JsonRoundTripIsLossless) {
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 300; ++trial) {
        const Circuit c = random_decorated_circuit(rng);
        EXPECT_EQ(circuit_from_json(to_json(c)), c);
        EXPECT_EQ(circuit_from_json(nlohmann::json::parse(to_json(c).dump())), c);
    }
}

TEST(Serialize, ParsesDocumentedSyntax) {
    const Circuit c = from_text(
        "QUBITS 5\nCBITS 2\n# comment\nH 0\nCNOT 0 1\nMEASURE 3 -> c0 Z\nCOND c0^c1 : X 2, Z 0\nDELAY 4 150ns\n");
    EXPECT_EQ(c.num_qubits(), 5U);
    EXPECT_EQ(c.size(), 5U);
    const auto* cond = std::get_if<Conditional>(&c.instructions()[3]);
    ASSERT_NE(cond, nullptr);
    EXPECT_EQ(cond->gates.size(), 2U);
    const auto* delay = std::get_if<Delay>(&c.instructions()[4]);
    ASSERT_NE(delay, nullptr);
    EXPECT_DOUBLE_EQ(delay->duration_ns, 150.0);
}

TEST(Serialize, BadLineReportsParseError) {
    try {
        from_text("QUBITS 2\nCBITS 0\nFROB 1\n");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::Parse);
    }
}

}  // namespace
}  // namespace adaptq
