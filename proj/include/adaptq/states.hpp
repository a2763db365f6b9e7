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
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "adaptq/gate.hpp"

namespace adaptq {

// Qubit 0 is the least-significant bit of basis-state indices everywhere. Bitstrings
// (Pauli strings, distribution keys) print qubit 0 / cbit 0 leftmost.

inline constexpr std::uint32_t kMaxPureQubits = 12;
inline constexpr std::uint32_t kMaxDensityQubits = 8;

/// Tensor product of single-qubit Paulis, one character per qubit from {I, X, Y, Z}.
class PauliString {
public:
    PauliString() = default;
    explicit PauliString(std::string_view letters);
    static PauliString identity(std::uint32_t n) { return PauliString(std::string(n, 'I')); }

    std::uint32_t size() const { return static_cast<std::uint32_t>(letters_.size()); }
    char operator[](std::size_t q) const { return letters_[q]; }
    void set(std::size_t q, char p);
    const std::string& str() const { return letters_; }

    friend bool operator==(const PauliString&, const PauliString&) = default;

private:
    std::string letters_;
};

class PureState {
public:
    /// |0...0> on n qubits.
    explicit PureState(std::uint32_t num_qubits);
    static PureState from_amplitudes(std::vector<cplx> amplitudes);
    static PureState basis(std::uint32_t num_qubits, std::uint64_t index);

    std::uint32_t num_qubits() const { return num_qubits_; }
    std::span<const cplx> amplitudes() const { return amps_; }
    std::span<cplx> mutable_amplitudes() { return amps_; }
    double norm() const;
    void normalize();

    void apply(const Gate& gate);
    void apply_matrix(QubitId q, const Mat2& m);
    void apply_matrix(QubitId q0, QubitId q1, const Mat4& m);

    double probability_one(QubitId q) const;
    /// Projects onto `outcome` and renormalizes. Returns the pre-projection probability.
    double project(QubitId q, bool outcome);
    /// Samples a Born-rule outcome and collapses.
    bool measure(QubitId q, std::mt19937_64& rng);

    friend bool operator==(const PureState&, const PureState&) = default;

private:
    std::uint32_t num_qubits_ = 0;
    std::vector<cplx> amps_;
};

/// 2^n x 2^n density operator stored so entry (row, col) sits at row | col << n.
class DensityMatrix {
public:
    explicit DensityMatrix(std::uint32_t num_qubits);
    explicit DensityMatrix(const PureState& psi);

    std::uint32_t num_qubits() const { return num_qubits_; }
    std::uint64_t dim() const { return std::uint64_t{1} << num_qubits_; }
    cplx at(std::uint64_t row, std::uint64_t col) const { return data_[row | (col << num_qubits_)]; }
    cplx& at(std::uint64_t row, std::uint64_t col) { return data_[row | (col << num_qubits_)]; }

    cplx trace() const;
    void scale(double factor);
    DensityMatrix& operator+=(const DensityMatrix& other);

    void apply(const Gate& gate);
    void apply_unitary(QubitId q, const Mat2& u);
    void apply_unitary(QubitId q0, QubitId q1, const Mat4& u);
    /// rho -> sum_k K rho K^dagger.
    void apply_kraus(QubitId q, std::span<const Mat2> ops);
    /// Mixture of Pauli conjugations; paulis[i] is a two-letter (or one-letter) string.
    void apply_pauli_mixture(std::span<const QubitId> qubits, std::span<const std::string> paulis,
                             std::span<const double> probabilities);

    double probability_one(QubitId q) const;
    /// Unnormalized projection P rho P.
    void project(QubitId q, bool outcome);

    bool is_hermitian(double tol = 1e-10) const;
    /// Ascending eigenvalues of the Hermitian part.
    std::vector<double> eigenvalues() const;

    /// Partial trace keeping `keep` in the given order (first listed becomes qubit 0).
    DensityMatrix reduced(std::span<const QubitId> keep) const;

private:
    std::uint32_t num_qubits_ = 0;
    std::vector<cplx> data_;
};

PureState tensor(const PureState& a, const PureState& b);

/// <psi|P|psi> or Tr(P rho).
double expectation(const PureState& psi, const PauliString& pauli);
double expectation(const DensityMatrix& rho, const PauliString& pauli);

/// |<b|a>|^2 and <b|rho|b>. Throws Error(DimensionMismatch).
double state_fidelity(const PureState& a, const PureState& b);
double state_fidelity(const DensityMatrix& a, const PureState& b);

/// (1/2) ||a - b||_1.
double trace_distance(const DensityMatrix& a, const DensityMatrix& b);

/// Reduced state of the listed qubits (first listed becomes qubit 0).
DensityMatrix reduced_state(const PureState& psi, std::span<const QubitId> keep);

}  // namespace adaptq
