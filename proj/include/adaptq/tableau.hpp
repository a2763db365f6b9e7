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
#include <vector>

#include "adaptq/gate.hpp"
#include "adaptq/states.hpp"

namespace adaptq {

/// Aaronson-Gottesman stabilizer tableau. Rows [0, n) are destabilizers, rows [n, 2n)
/// stabilizers; each row is a signed Pauli in (x, z) symplectic form.
class StabilizerTableau {
public:
    explicit StabilizerTableau(std::uint32_t num_qubits);

    std::uint32_t num_qubits() const { return n_; }

    void h(std::uint32_t q);
    void s(std::uint32_t q);
    void cnot(std::uint32_t control, std::uint32_t target);
    void x(std::uint32_t q);
    void y(std::uint32_t q);
    void z(std::uint32_t q);

    /// Clifford gates only; rotations must be multiples of pi/2. Throws Error(UnsupportedGate).
    void apply(const Gate& gate);

    /// Z-basis measurement. A deterministic outcome consumes no randomness.
    bool measure(std::uint32_t q, std::mt19937_64& rng);
    bool is_deterministic(std::uint32_t q) const;

    /// +1 / -1 when +-P is in the stabilizer group, 0 when P anticommutes with some
    /// stabilizer (or is otherwise not in the group up to sign).
    int peek_expectation(const PauliString& pauli) const;
    bool stabilizes(const PauliString& pauli) const { return peek_expectation(pauli) == 1; }

    PauliString stabilizer(std::uint32_t i) const;
    bool stabilizer_sign(std::uint32_t i) const { return r_[n_ + i] != 0; }

    /// Stabilizer rows commute pairwise and the destabilizer/stabilizer pairing is symplectic.
    bool is_consistent() const;

private:
    using Row = std::vector<std::uint8_t>;

    bool x_at(std::uint32_t row, std::uint32_t q) const { return xs_[row][q] != 0; }
    bool z_at(std::uint32_t row, std::uint32_t q) const { return zs_[row][q] != 0; }
    bool rows_anticommute(std::uint32_t a, std::uint32_t b) const;
    /// row h *= row i, tracking the sign.
    void rowsum(std::uint32_t h, std::uint32_t i);

    std::uint32_t n_;
    std::vector<Row> xs_;
    std::vector<Row> zs_;
    std::vector<std::uint8_t> r_;
};

}  // namespace adaptq
