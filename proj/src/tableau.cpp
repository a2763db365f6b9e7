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

#include "adaptq/tableau.hpp"

#include "adaptq/error.hpp"

namespace adaptq {

StabilizerTableau::StabilizerTableau(std::uint32_t num_qubits)
    : n_(num_qubits),
      xs_(2 * num_qubits + 1, Row(num_qubits, 0)),
      zs_(2 * num_qubits + 1, Row(num_qubits, 0)),
      r_(2 * num_qubits + 1, 0) {
    for (std::uint32_t i = 0; i < n_; ++i) {
        xs_[i][i] = 1;
        zs_[n_ + i][i] = 1;
    }
}

void StabilizerTableau::h(std::uint32_t q) {
    for (std::uint32_t i = 0; i < 2 * n_; ++i) {
        r_[i] ^= xs_[i][q] & zs_[i][q];
        std::swap(xs_[i][q], zs_[i][q]);
    }
}

void StabilizerTableau::s(std::uint32_t q) {
    for (std::uint32_t i = 0; i < 2 * n_; ++i) {
        r_[i] ^= xs_[i][q] & zs_[i][q];
        zs_[i][q] ^= xs_[i][q];
    }
}

void StabilizerTableau::cnot(std::uint32_t control, std::uint32_t target) {
    for (std::uint32_t i = 0; i < 2 * n_; ++i) {
        r_[i] ^= xs_[i][control] & zs_[i][target] & (xs_[i][target] ^ zs_[i][control] ^ 1U);
        xs_[i][target] ^= xs_[i][control];
        zs_[i][control] ^= zs_[i][target];
    }
}

void StabilizerTableau::x(std::uint32_t q) {
    for (std::uint32_t i = 0; i < 2 * n_; ++i) r_[i] ^= zs_[i][q];
}

void StabilizerTableau::y(std::uint32_t q) {
    for (std::uint32_t i = 0; i < 2 * n_; ++i) r_[i] ^= xs_[i][q] ^ zs_[i][q];
}

void StabilizerTableau::z(std::uint32_t q) {
    for (std::uint32_t i = 0; i < 2 * n_; ++i) r_[i] ^= xs_[i][q];
}

void StabilizerTableau::apply(const Gate& gate) {
    const std::uint32_t a = gate.qubits[0].index;
    const std::uint32_t b = gate.qubits[1].index;
    if (a >= n_ || (gate.arity() == 2 && b >= n_)) throw Error(ErrorCode::InvalidArgument, "gate qubit out of range");
    int turns = 0;
    if (is_rotation(gate.kind)) {
        const auto t = quarter_turns(gate.angle);
        if (!t) {
            throw Error(ErrorCode::UnsupportedGate, std::string(gate_name(gate.kind)) + "(" + std::to_string(gate.angle) +
                                                        ") is not Clifford");
        }
        turns = *t;
    }
    auto s_power = [&](int k) {
        for (int i = 0; i < k; ++i) s(a);
    };
    switch (gate.kind) {
        case GateKind::I: break;
        case GateKind::X: x(a); break;
        case GateKind::Y: y(a); break;
        case GateKind::Z: z(a); break;
        case GateKind::H: h(a); break;
        case GateKind::S: s(a); break;
        case GateKind::Sdg: s_power(3); break;
        case GateKind::RZ: s_power(turns); break;
        case GateKind::RX:
            h(a);
            s_power(turns);
            h(a);
            break;
        case GateKind::RY:
            // RY = S RX S^dagger
            s_power(3);
            h(a);
            s_power(turns);
            h(a);
            s(a);
            break;
        case GateKind::CNOT: cnot(a, b); break;
        case GateKind::CZ:
            h(b);
            cnot(a, b);
            h(b);
            break;
    }
}

namespace {

// (x, z, r) *= (xi, zi, ri) with the Aaronson-Gottesman phase bookkeeping.
void multiply_into(std::vector<std::uint8_t>& x, std::vector<std::uint8_t>& z, std::uint8_t& r,
                   const std::vector<std::uint8_t>& xi, const std::vector<std::uint8_t>& zi, std::uint8_t ri) {
    int phase = 2 * r + 2 * ri;
    for (std::size_t q = 0; q < x.size(); ++q) {
        const int x1 = xi[q];
        const int z1 = zi[q];
        const int x2 = x[q];
        const int z2 = z[q];
        if (x1 && z1) {
            phase += z2 - x2;
        } else if (x1) {
            phase += z2 * (2 * x2 - 1);
        } else if (z1) {
            phase += x2 * (1 - 2 * z2);
        }
        x[q] ^= xi[q];
        z[q] ^= zi[q];
    }
    phase = ((phase % 4) + 4) % 4;
    r = phase == 2 ? 1 : 0;
}

bool anticommute(const std::vector<std::uint8_t>& xa, const std::vector<std::uint8_t>& za,
                 const std::vector<std::uint8_t>& xb, const std::vector<std::uint8_t>& zb) {
    unsigned parity = 0;
    for (std::size_t q = 0; q < xa.size(); ++q) parity ^= (xa[q] & zb[q]) ^ (za[q] & xb[q]);
    return parity != 0;
}

}  // namespace

bool StabilizerTableau::rows_anticommute(std::uint32_t a, std::uint32_t b) const {
    return anticommute(xs_[a], zs_[a], xs_[b], zs_[b]);
}

void StabilizerTableau::rowsum(std::uint32_t h, std::uint32_t i) { multiply_into(xs_[h], zs_[h], r_[h], xs_[i], zs_[i], r_[i]); }

bool StabilizerTableau::is_deterministic(std::uint32_t q) const {
    for (std::uint32_t p = n_; p < 2 * n_; ++p) {
        if (xs_[p][q]) return false;
    }
    return true;
}

bool StabilizerTableau::measure(std::uint32_t q, std::mt19937_64& rng) {
    if (q >= n_) throw Error(ErrorCode::InvalidArgument, "measured qubit out of range");
    std::uint32_t p = 2 * n_;
    for (std::uint32_t i = n_; i < 2 * n_; ++i) {
        if (xs_[i][q]) {
            p = i;
            break;
        }
    }
    if (p < 2 * n_) {
        for (std::uint32_t i = 0; i < 2 * n_; ++i) {
            if (i != p && xs_[i][q]) rowsum(i, p);
        }
        xs_[p - n_] = xs_[p];
        zs_[p - n_] = zs_[p];
        r_[p - n_] = r_[p];
        std::fill(xs_[p].begin(), xs_[p].end(), 0);
        std::fill(zs_[p].begin(), zs_[p].end(), 0);
        zs_[p][q] = 1;
        const bool outcome = (rng() >> 63) != 0;
        r_[p] = outcome ? 1 : 0;
        return outcome;
    }
    const std::uint32_t scratch = 2 * n_;
    std::fill(xs_[scratch].begin(), xs_[scratch].end(), 0);
    std::fill(zs_[scratch].begin(), zs_[scratch].end(), 0);
    r_[scratch] = 0;
    for (std::uint32_t i = 0; i < n_; ++i) {
        if (xs_[i][q]) rowsum(scratch, i + n_);
    }
    return r_[scratch] != 0;
}

int StabilizerTableau::peek_expectation(const PauliString& pauli) const {
    if (pauli.size() != n_) throw Error(ErrorCode::DimensionMismatch, "Pauli length differs from qubit count");
    Row px(n_, 0);
    Row pz(n_, 0);
    for (std::uint32_t q = 0; q < n_; ++q) {
        px[q] = (pauli[q] == 'X' || pauli[q] == 'Y') ? 1 : 0;
        pz[q] = (pauli[q] == 'Z' || pauli[q] == 'Y') ? 1 : 0;
    }
    for (std::uint32_t i = n_; i < 2 * n_; ++i) {
        if (anticommute(xs_[i], zs_[i], px, pz)) return 0;
    }
    // P commutes with every stabilizer, so +-P is the product of the stabilizers whose
    // destabilizers anticommute with it.
    Row ax(n_, 0);
    Row az(n_, 0);
    std::uint8_t ar = 0;
    for (std::uint32_t i = 0; i < n_; ++i) {
        if (anticommute(xs_[i], zs_[i], px, pz)) multiply_into(ax, az, ar, xs_[i + n_], zs_[i + n_], r_[i + n_]);
    }
    if (ax != px || az != pz) return 0;
    return ar ? -1 : 1;
}

PauliString StabilizerTableau::stabilizer(std::uint32_t i) const {
    if (i >= n_) throw Error(ErrorCode::InvalidArgument, "stabilizer index out of range");
    std::string s(n_, 'I');
    for (std::uint32_t q = 0; q < n_; ++q) {
        const bool xb = x_at(n_ + i, q);
        const bool zb = z_at(n_ + i, q);
        s[q] = xb ? (zb ? 'Y' : 'X') : (zb ? 'Z' : 'I');
    }
    return PauliString(s);
}

bool StabilizerTableau::is_consistent() const {
    for (std::uint32_t a = 0; a < 2 * n_; ++a) {
        for (std::uint32_t b = a + 1; b < 2 * n_; ++b) {
            const bool expect = (b == a + n_);
            if (rows_anticommute(a, b) != expect) return false;
        }
    }
    return true;
}

}  // namespace adaptq
