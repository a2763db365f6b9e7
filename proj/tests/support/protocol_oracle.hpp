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

// Process-level checks of protocols on top of the dense oracle.

#pragma once

#include <algorithm>
#include <random>
#include <vector>

#include "adaptq/protocols.hpp"
#include "oracle.hpp"
#include "random_circuits.hpp"

namespace testing_oracle {

inline std::vector<std::uint32_t> indices(const std::vector<adaptq::QubitId>& qs) {
    std::vector<std::uint32_t> out;
    for (auto q : qs) out.push_back(q.index);
    return out;
}

/// Pauli operator for index a over k qubits (base-4 digit q is the letter on qubit q).
inline oracle::Mat pauli_k(std::uint64_t a, std::uint32_t k) {
    static constexpr char kLetters[] = "IXYZ";
    oracle::Mat out = oracle::Mat::Identity(1, 1);
    for (std::uint32_t q = k; q-- > 0;) {
        const char letter = kLetters[(a >> (2 * q)) & 3U];
        out = Eigen::kroneckerProduct(out, oracle::Mat(oracle::pauli(letter))).eval();
    }
    return out;
}

/// R_ij = Tr(P_i U P_j U^dagger) / d.
inline Eigen::MatrixXd unitary_ptm(const adaptq::Circuit& ideal) {
    const std::uint32_t k = ideal.num_qubits();
    const std::uint64_t m = std::uint64_t{1} << (2 * k);
    const double d = static_cast<double>(std::uint64_t{1} << k);
    const oracle::Mat u = oracle::unitary(ideal);
    Eigen::MatrixXd r(m, m);
    for (std::uint64_t i = 0; i < m; ++i) {
        for (std::uint64_t j = 0; j < m; ++j) {
            r(i, j) = std::real((pauli_k(i, k) * u * pauli_k(j, k) * u.adjoint()).trace()) / d;
        }
    }
    return r;
}

/// Protocol circuit with each input maximally entangled with a fresh reference qubit at
/// the input point.
inline adaptq::Circuit choi_circuit(const adaptq::Protocol& p) {
    const std::uint32_t n = p.circuit.num_qubits();
    const auto k = static_cast<std::uint32_t>(p.inputs.size());
    adaptq::Circuit c(n + k, p.circuit.num_cbits());
    std::vector<adaptq::Instruction> prep;
    for (std::uint32_t i = 0; i < k; ++i) {
        prep.push_back(adaptq::Gate::single(adaptq::GateKind::H, {n + i}));
        prep.push_back(adaptq::Gate::cnot({n + i}, p.inputs[i]));
    }
    const auto insts = p.circuit.instructions();
    for (std::size_t i = 0; i < insts.size(); ++i) {
        if (i == p.input_point) c.insert(c.size(), prep);
        c.append(insts[i]);
    }
    if (p.input_point >= insts.size()) c.insert(c.size(), prep);
    return c;
}

/// R_ij = Tr((P_j^T (x) P_i) J) for a Choi state J over (outputs, references).
inline Eigen::MatrixXd ptm_from_choi(const oracle::Mat& choi, std::uint32_t k) {
    const std::uint64_t m = std::uint64_t{1} << (2 * k);
    Eigen::MatrixXd r(m, m);
    for (std::uint64_t i = 0; i < m; ++i) {
        for (std::uint64_t j = 0; j < m; ++j) {
            const oracle::Mat op = Eigen::kroneckerProduct(oracle::Mat(pauli_k(j, k).transpose()), pauli_k(i, k));
            r(i, j) = std::real((op * choi).trace());
        }
    }
    return r;
}

namespace detail {

inline std::vector<std::pair<double, oracle::Mat>> branch_choi(const adaptq::Protocol& p) {
    const adaptq::Circuit c = choi_circuit(p);
    std::vector<std::uint32_t> keep = indices(p.outputs);
    for (std::uint32_t i = 0; i < p.inputs.size(); ++i) keep.push_back(p.circuit.num_qubits() + i);
    std::vector<std::pair<double, oracle::Mat>> out;
    for (const auto& b : oracle::branches(c)) out.emplace_back(b.probability, oracle::reduced(b.state, c.num_qubits(), keep));
    return out;
}

}  // namespace detail

inline std::vector<Eigen::MatrixXd> branch_ptms(const adaptq::Protocol& p) {
    std::vector<Eigen::MatrixXd> out;
    const auto k = static_cast<std::uint32_t>(p.inputs.size());
    for (const auto& [prob, choi] : detail::branch_choi(p)) out.push_back(ptm_from_choi(choi, k));
    return out;
}

inline Eigen::MatrixXd average_ptm(const adaptq::Protocol& p) {
    const auto k = static_cast<std::uint32_t>(p.inputs.size());
    const std::uint64_t dim = std::uint64_t{1} << (2 * k);
    oracle::Mat choi = oracle::Mat::Zero(dim, dim);
    for (const auto& [prob, j] : detail::branch_choi(p)) choi += prob * j;
    return ptm_from_choi(choi, k);
}

/// Smallest per-branch fidelity between the outputs and ideal(prep)|0> over `trials`
/// random (possibly entangled) input states.
inline double min_random_input_fidelity(const adaptq::Protocol& p, const adaptq::Circuit& ideal, int trials,
                                        std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    const auto k = static_cast<std::uint32_t>(p.inputs.size());
    double worst = 1.0;
    for (int t = 0; t < trials; ++t) {
        adaptq::Circuit local(k, 0);
        std::vector<adaptq::Gate> prep;
        for (int g = 0; g < 6 * static_cast<int>(k); ++g) {
            adaptq::Gate gate = gen::random_gate(rng, k);
            local.append(gate);
            gate.qubits[0] = p.inputs[gate.qubits[0].index];
            gate.qubits[1] = p.inputs[gate.qubits[1].index];
            prep.push_back(gate);
        }
        const oracle::Vec expected = oracle::unitary(ideal) * oracle::unitary(local) * oracle::basis(k, 0);
        const adaptq::Protocol q = adaptq::with_input_prep(p, prep);
        for (const auto& b : oracle::branches(q.circuit)) {
            const auto rho = oracle::reduced(b.state, q.circuit.num_qubits(), indices(q.outputs));
            worst = std::min(worst, oracle::fidelity(rho, expected));
        }
    }
    return worst;
}

}  // namespace testing_oracle
