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

#include <cstdlib>
#include <fstream>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "adaptq/circuit.hpp"
#include "adaptq/engines.hpp"
#include "adaptq/error.hpp"
#include "adaptq/protocols.hpp"
#include "oracle.hpp"
#include "protocol_oracle.hpp"
#include "random_circuits.hpp"

namespace adaptq {
namespace {

constexpr double kExact = 1.0 - 1e-9;

std::vector<std::uint32_t> indices(const std::vector<QubitId>& qs) {
    std::vector<std::uint32_t> out;
    for (auto q : qs) out.push_back(q.index);
    return out;
}

TEST(Ghz, TwoQubitBranchesAreExact) {
    const Protocol p = build_ghz_adaptive(2);
    const auto checks = check_state_protocol(p, ghz_state(2));
    EXPECT_EQ(checks.size(), 2U);
    EXPECT_GE(min_fidelity(checks), kExact);
}

TEST(Ghz, FourQubitsGiveEightEqualBranches) {
    const Protocol p = build_ghz_adaptive(4);
    const auto checks = check_state_protocol(p, ghz_state(4));
    ASSERT_EQ(checks.size(), 8U);
    for (const auto& c : checks) {
        EXPECT_NEAR(c.probability, 0.125, 1e-12);
        EXPECT_GE(c.fidelity, kExact);
    }
}

TEST(Ghz, OracleAgreesForEverySize) {
    for (std::uint32_t n = 2; n <= 5; ++n) {
        const Protocol p = build_ghz_adaptive(n);
        const auto branches = oracle::branches(p.circuit);
        EXPECT_EQ(branches.size(), std::size_t{1} << (n - 1));
        for (const auto& b : branches) {
            const auto rho = oracle::reduced(b.state, p.circuit.num_qubits(), indices(p.outputs));
            EXPECT_GE(oracle::fidelity(rho, oracle::ghz(n)), kExact) << n;
        }
    }
}

TEST(Ghz, AllPlusOutcomesApplyNoCorrection) {
    const Protocol p = build_ghz_adaptive(2);
    for (const auto& b : enumerate_branches(p.circuit)) {
        if (b.cbits.values != 0) continue;
        EXPECT_TRUE(p.rule.frame(b.cbits, p.circuit.num_qubits()).is_identity());
    }
}

TEST(Ghz, DecoderExamples) {
    EXPECT_EQ(decode_ghz(std::vector<bool>{false, false, false}), (std::vector<bool>{false, false, false, false}));
    EXPECT_EQ(decode_ghz(std::vector<bool>{true, false, false}), (std::vector<bool>{false, true, true, true}));
    EXPECT_EQ(decode_ghz(std::vector<bool>{true, true}), (std::vector<bool>{false, true, false}));
}

TEST(Ghz, DecoderMaskRestoresGhz) {
    // Uncorrected circuit plus the decoder's mask applied by hand on each branch.
    for (std::uint32_t n = 3; n <= 4; ++n) {
        const Protocol p = build_ghz_adaptive(n);
        Circuit bare(p.circuit.num_qubits(), p.circuit.num_cbits());
        for (const auto& inst : p.circuit.instructions()) {
            if (!std::holds_alternative<Conditional>(inst)) bare.append(inst);
        }
        for (const auto& b : oracle::branches(bare)) {
            std::vector<bool> outcomes;
            for (std::uint32_t k = 0; k + 1 < n; ++k) outcomes.push_back((b.cbits >> k) & 1U);
            oracle::Vec psi = b.state;
            const auto mask = decode_ghz(outcomes);
            for (std::uint32_t k = 0; k < n; ++k) {
                if (mask[k]) psi = oracle::gate_matrix(Gate::single(GateKind::X, p.outputs[k]), bare.num_qubits()) * psi;
            }
            const auto rho = oracle::reduced(psi, bare.num_qubits(), indices(p.outputs));
            EXPECT_GE(oracle::fidelity(rho, oracle::ghz(n)), kExact);
        }
    }
}

TEST(Ghz, RingPlacementValidates) {
    const Topology ring = Topology::ring(8);
    for (std::uint32_t n = 2; n <= 4; ++n) {
        const Protocol p = build_ghz_adaptive(GHZPlan::ring8(n), &ring);
        EXPECT_TRUE(validate(p.circuit, &ring).empty());
        EXPECT_GE(min_fidelity(check_state_protocol(p, ghz_state(n))), kExact);
    }
}

TEST(Ghz, InconsistentPlanRejected) {
    GHZPlan plan = GHZPlan::line(3);
    plan.ancillae.pop_back();
    EXPECT_THROW(build_ghz_adaptive(plan), Error);
    const Topology ring = Topology::ring(8);
    GHZPlan far;
    far.data = qubit_ids({0, 4});
    far.ancillae = qubit_ids({2});
    EXPECT_THROW(build_ghz_adaptive(far, &ring), Error);
}

TEST(PauliFrame, ComposeLaws) {
    PauliFrame f = PauliFrame::identity(3);
    f.x_mask[1] = true;
    f.z_mask[2] = true;
    const std::vector<PauliFrame> ff{f, f};
    EXPECT_TRUE(compose_frames(ff).is_identity());
    const std::vector<PauliFrame> idf{PauliFrame::identity(3), f};
    EXPECT_EQ(compose_frames(idf), f);
    PauliFrame x = PauliFrame::identity(1);
    PauliFrame z = PauliFrame::identity(1);
    x.x_mask[0] = true;
    z.z_mask[0] = true;
    const std::vector<PauliFrame> xz{x, z};
    const PauliFrame y = compose_frames(xz);
    EXPECT_TRUE(y.x_mask[0] && y.z_mask[0]);
    const std::vector<PauliFrame> bad{PauliFrame::identity(1), PauliFrame::identity(2)};
    EXPECT_THROW(compose_frames(bad), Error);
}

TEST(TeleCnot, EveryLayoutIsExactOnEveryBranch) {
    const Topology ring = Topology::ring(8);
    Circuit cnot(2, 0);
    cnot.cnot({0}, {1});
    for (const auto& [layout, topo] : {std::pair{TeleCnotLayout::line_unitary(), static_cast<const Topology*>(nullptr)},
                                       std::pair{TeleCnotLayout::line_adaptive(), static_cast<const Topology*>(nullptr)},
                                       std::pair{TeleCnotLayout::ring8_q1_q4(), &ring},
                                       std::pair{TeleCnotLayout::ring8_q0_q4(), &ring}}) {
        const Protocol p = build_tele_cnot(layout, topo);
        if (topo) EXPECT_TRUE(validate(p.circuit, topo).empty());
        EXPECT_GE(min_fidelity(check_process_protocol(p, cnot)), kExact);
        EXPECT_GE(testing_oracle::min_random_input_fidelity(p, cnot, 10, 1), kExact);
    }
}

TEST(TeleCnot, PtmEqualsCnotOnEveryBranch) {
    Circuit cnot(2, 0);
    cnot.cnot({0}, {1});
    const Protocol p = build_tele_cnot(TeleCnotLayout::line_unitary());
    const auto expected = testing_oracle::unitary_ptm(cnot);
    const auto branch_ptms = testing_oracle::branch_ptms(p);
    EXPECT_EQ(branch_ptms.size(), 4U);
    for (const auto& r : branch_ptms) EXPECT_LT((r - expected).cwiseAbs().maxCoeff(), 1e-6);
    EXPECT_LT((testing_oracle::average_ptm(p) - expected).cwiseAbs().maxCoeff(), 1e-6);
}

TEST(TeleCnot, RingPlacementOnlyUsesNeighbours) {
    const Topology ring = Topology::ring(8);
    Circuit direct(8, 0);
    direct.cnot({0}, {4});
    EXPECT_FALSE(validate(direct, &ring).empty());
    EXPECT_TRUE(validate(build_tele_cnot(TeleCnotLayout::ring8_q0_q4(), &ring).circuit, &ring).empty());
}

TEST(Fanout, CxxIsExactOnEveryBranch) {
    for (bool reuse : {true, false}) {
        for (std::uint32_t n = 1; n <= 3; ++n) {
            const Protocol p = build_fanout(FanoutLayout::line(n, reuse));
            EXPECT_GE(min_fidelity(check_process_protocol(p, ideal_fanout(n))), kExact) << n << reuse;
            EXPECT_GE(testing_oracle::min_random_input_fidelity(p, ideal_fanout(n), 6, n), kExact) << n << reuse;
        }
    }
}

TEST(Fanout, RingCxxValidates) {
    const Topology ring = Topology::ring(8);
    const Protocol p = build_fanout(FanoutLayout::ring8_cxx(), &ring);
    EXPECT_TRUE(validate(p.circuit, &ring).empty());
    EXPECT_GE(min_fidelity(check_process_protocol(p, ideal_fanout(2))), kExact);
}

TEST(Fanout, ControlOneFlipsAllTargets) {
    const Protocol p = build_fanout(FanoutLayout::line(2));
    const std::vector<Gate> prep{Gate::single(GateKind::X, p.inputs[0])};
    const Protocol q = with_input_prep(p, prep);
    for (const auto& b : enumerate_branches(q.circuit)) {
        for (auto out : q.outputs) EXPECT_NEAR(b.final_state.probability_one(out), 1.0, 1e-9);
    }
}

TEST(Fanout, BranchCountForTwoTargets) {
    const Protocol p = build_fanout(FanoutLayout::line(2));
    std::size_t mcms = 0;
    for (const auto& inst : p.circuit.instructions()) mcms += std::holds_alternative<Measure>(inst);
    EXPECT_EQ(enumerate_branches(p.circuit).size(), std::size_t{1} << mcms);
}

TEST(Fanout, DerivedRuleMatchesClosedForm) {
    for (bool reuse : {true, false}) {
        for (std::uint32_t n = 1; n <= 3; ++n) {
            EXPECT_EQ(derive_fanout_rule(n, reuse), fanout_rule(FanoutLayout::line(n, reuse))) << n;
        }
    }
}

// Set ADAPTQ_UPDATE_GOLDEN=1 to rewrite the stored rule from the derivation.
TEST(Fanout, GoldenRuleForTwoTargets) {
    const std::string path = std::string(ADAPTQ_TEST_DATA_DIR) + "/fanout_rule_n2.json";
    const nlohmann::json derived = derive_fanout_rule(2).to_json();
    if (std::getenv("ADAPTQ_UPDATE_GOLDEN") != nullptr) {
        std::ofstream(path) << derived.dump(2) << "\n";
    }
    std::ifstream in(path);
    ASSERT_TRUE(in.good()) << path;
    EXPECT_EQ(derived, nlohmann::json::parse(in));
}

TEST(Fanout, SingleTargetActsLikeTeleportedCnot) {
    Circuit cnot(2, 0);
    cnot.cnot({0}, {1});
    const auto a = testing_oracle::average_ptm(build_fanout(FanoutLayout::line(1)));
    const auto b = testing_oracle::average_ptm(build_tele_cnot(TeleCnotLayout::line_unitary()));
    EXPECT_LT((a - b).cwiseAbs().maxCoeff(), 1e-9);
    EXPECT_LT((a - testing_oracle::unitary_ptm(cnot)).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(Teleport, BasisAndPlusInputs) {
    const std::vector<QubitId> chain = qubit_ids({1, 2, 3, 4});
    const Protocol p = build_teleport({0}, chain);
    const QubitId out = p.outputs[0];
    for (const auto& b : enumerate_branches(p.circuit)) EXPECT_NEAR(b.final_state.probability_one(out), 0.0, 1e-9);
    const std::vector<Gate> plus{Gate::single(GateKind::H, p.inputs[0])};
    for (const auto& b : enumerate_branches(with_input_prep(p, plus).circuit)) {
        PauliString x = PauliString::identity(p.circuit.num_qubits());
        x.set(out.index, 'X');
        EXPECT_NEAR(expectation(b.final_state, x), 1.0, 1e-9);
    }
}

TEST(Teleport, IdentityChannelForEveryChainLength) {
    Circuit id(1, 0);
    for (std::uint32_t len : {2U, 4U, 6U}) {
        std::vector<QubitId> chain;
        for (std::uint32_t k = 1; k <= len; ++k) chain.push_back({k});
        const Protocol p = build_teleport({0}, chain);
        EXPECT_GE(min_fidelity(check_process_protocol(p, id)), kExact) << len;
        EXPECT_GE(testing_oracle::min_random_input_fidelity(p, id, 20, len), kExact) << len;
    }
}

TEST(Teleport, DepthIndependentOfChainLength) {
    std::vector<std::size_t> depths;
    for (std::uint32_t len : {2U, 4U, 6U}) {
        std::vector<QubitId> chain;
        for (std::uint32_t k = 1; k <= len; ++k) chain.push_back({k});
        depths.push_back(depth(build_teleport({0}, chain).circuit));
    }
    EXPECT_EQ(depths[0], depths[1]);
    EXPECT_EQ(depths[1], depths[2]);
}

TEST(Teleport, OddChainRejected) {
    const std::vector<QubitId> chain = qubit_ids({1, 2, 3});
    EXPECT_THROW(build_teleport({0}, chain), Error);
}

TEST(Swap, FootnoteMapping) {
    const std::vector<QubitId> chain = ring8_swap_chain();
    const Topology ring = Topology::ring(8);
    for (const char* bits : {"00", "10", "01", "11"}) {
        const Protocol p = build_entanglement_swap(chain, bits, &ring);
        EXPECT_TRUE(validate(p.circuit, &ring).empty());
        EXPECT_GE(min_fidelity(check_state_protocol(p, bell_state(bits))), kExact) << bits;
        const oracle::Vec target = oracle::bell(bits[0] == '1', bits[1] == '1');
        for (const auto& b : oracle::branches(p.circuit)) {
            const auto rho = oracle::reduced(b.state, p.circuit.num_qubits(), indices(p.outputs));
            EXPECT_GE(oracle::fidelity(rho, target), kExact) << bits;
        }
    }
    EXPECT_EQ(bell_state_name("00"), "Phi+");
    EXPECT_EQ(bell_state_name("10"), "Phi-");
    EXPECT_EQ(bell_state_name("01"), "Psi+");
    EXPECT_EQ(bell_state_name("11"), "Psi-");
}

TEST(NegativeControl, DroppingAnyConditionalBreaksABranch) {
    Circuit cnot(2, 0);
    cnot.cnot({0}, {1});
    Circuit id(1, 0);
    const std::vector<QubitId> chain = qubit_ids({1, 2, 3, 4});
    struct Case {
        std::string name;
        Protocol protocol;
        std::function<double(const Protocol&)> score;
    };
    std::vector<Case> cases;
    for (std::uint32_t n = 2; n <= 4; ++n) {
        cases.push_back({"ghz" + std::to_string(n), build_ghz_adaptive(n),
                         [n](const Protocol& p) { return min_fidelity(check_state_protocol(p, ghz_state(n))); }});
    }
    cases.push_back({"tele_cnot", build_tele_cnot(TeleCnotLayout::line_unitary()),
                     [&](const Protocol& p) { return min_fidelity(check_process_protocol(p, cnot)); }});
    cases.push_back({"tele_cnot_adaptive", build_tele_cnot(TeleCnotLayout::line_adaptive()),
                     [&](const Protocol& p) { return min_fidelity(check_process_protocol(p, cnot)); }});
    cases.push_back({"fanout2", build_fanout(FanoutLayout::line(2)),
                     [](const Protocol& p) { return min_fidelity(check_process_protocol(p, ideal_fanout(2))); }});
    cases.push_back({"teleport", build_teleport({0}, chain),
                     [&](const Protocol& p) { return min_fidelity(check_process_protocol(p, id)); }});
    cases.push_back({"swap10", build_entanglement_swap(chain, "10"),
                     [](const Protocol& p) { return min_fidelity(check_state_protocol(p, bell_state("10"))); }});
    for (const auto& c : cases) {
        const std::size_t k = count_conditionals(c.protocol.circuit);
        ASSERT_GT(k, 0U) << c.name;
        EXPECT_GE(c.score(c.protocol), kExact) << c.name;
        for (std::size_t i = 0; i < k; ++i) {
            EXPECT_LT(c.score(without_conditional(c.protocol, i)), 1.0 - 1e-6) << c.name << " conditional " << i;
        }
    }
}

TEST(NegativeControl, SwapWithoutCorrectionsDropsToHalf) {
    for (const char* bits : {"00", "10", "01", "11"}) {
        Protocol p = build_entanglement_swap(ring8_swap_chain(), bits);
        while (count_conditionals(p.circuit) > 0) p = without_conditional(p, 0);
        EXPECT_LE(min_fidelity(check_state_protocol(p, bell_state(bits))), 0.5 + 1e-9) << bits;
    }
}

TEST(Builders, DefaultRingPlacementsValidate) {
    const Topology ring = Topology::ring(8);
    EXPECT_TRUE(validate(build_teleport({0}, ring8_teleport_chain(), &ring).circuit, &ring).empty());
    EXPECT_EQ(ring8_teleport_chain(), qubit_ids({1, 2, 3, 4}));
    EXPECT_EQ(ring8_swap_chain(), qubit_ids({1, 2, 3, 4}));
}

}  // namespace
}  // namespace adaptq
