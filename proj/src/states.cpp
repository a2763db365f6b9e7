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

#include "adaptq/states.hpp"

#include <bit>
#include <cmath>

#include <Eigen/Dense>

#include "adaptq/error.hpp"

namespace adaptq {

namespace {

void apply_1q(std::span<cplx> amps, std::uint32_t q, const Mat2& m) {
    const std::uint64_t stride = std::uint64_t{1} << q;
    const std::uint64_t dim = amps.size();
    for (std::uint64_t base = 0; base < dim; base += 2 * stride) {
        for (std::uint64_t i = base; i < base + stride; ++i) {
            const cplx a = amps[i];
            const cplx b = amps[i + stride];
            amps[i] = m[0] * a + m[1] * b;
            amps[i + stride] = m[2] * a + m[3] * b;
        }
    }
}

void apply_2q(std::span<cplx> amps, std::uint32_t q0, std::uint32_t q1, const Mat4& m) {
    const std::uint64_t s0 = std::uint64_t{1} << q0;
    const std::uint64_t s1 = std::uint64_t{1} << q1;
    const std::uint64_t dim = amps.size();
    for (std::uint64_t i = 0; i < dim; ++i) {
        if ((i & s0) || (i & s1)) continue;
        const std::uint64_t idx[4] = {i, i | s0, i | s1, i | s0 | s1};
        cplx v[4];
        for (int k = 0; k < 4; ++k) v[k] = amps[idx[k]];
        for (int r = 0; r < 4; ++r) {
            amps[idx[r]] = m[r * 4 + 0] * v[0] + m[r * 4 + 1] * v[1] + m[r * 4 + 2] * v[2] + m[r * 4 + 3] * v[3];
        }
    }
}

template <class M>
M conj_of(const M& m) {
    M out;
    for (std::size_t i = 0; i < m.size(); ++i) out[i] = std::conj(m[i]);
    return out;
}

// Phase and flip mask of a Pauli string acting on basis states: P|k> = phase(k) |k ^ x>.
struct PauliAction {
    std::uint64_t x = 0;
    std::uint64_t z = 0;
    cplx y_phase{1.0, 0.0};

    explicit PauliAction(const PauliString& p) {
        int ny = 0;
        for (std::uint32_t q = 0; q < p.size(); ++q) {
            const std::uint64_t bit = std::uint64_t{1} << q;
            switch (p[q]) {
                case 'X': x |= bit; break;
                case 'Z': z |= bit; break;
                case 'Y':
                    x |= bit;
                    z |= bit;
                    ++ny;
                    break;
                default: break;
            }
        }
        static const cplx powers[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
        y_phase = powers[ny % 4];
    }

    cplx phase(std::uint64_t k) const { return (std::popcount(k & z) & 1) ? -y_phase : y_phase; }
};

std::uint64_t gather(std::uint64_t index, std::span<const QubitId> keep) {
    std::uint64_t out = 0;
    for (std::size_t k = 0; k < keep.size(); ++k) out |= ((index >> keep[k].index) & 1U) << k;
    return out;
}

std::uint64_t scatter(std::uint64_t local, std::span<const QubitId> keep) {
    std::uint64_t out = 0;
    for (std::size_t k = 0; k < keep.size(); ++k) out |= ((local >> k) & 1U) << keep[k].index;
    return out;
}

std::uint64_t mask_of(std::span<const QubitId> keep, std::uint32_t n) {
    std::uint64_t m = 0;
    for (QubitId q : keep) {
        if (q.index >= n) throw Error(ErrorCode::InvalidArgument, "qubit " + std::to_string(q.index) + " out of range");
        if (m & (std::uint64_t{1} << q.index)) throw Error(ErrorCode::InvalidArgument, "qubit listed twice");
        m |= std::uint64_t{1} << q.index;
    }
    return m;
}

void check_qubit(QubitId q, std::uint32_t n) {
    if (q.index >= n) throw Error(ErrorCode::InvalidArgument, "qubit " + std::to_string(q.index) + " out of range");
}

Mat2 pauli_matrix(char p) {
    switch (p) {
        case 'X': return single_qubit_matrix(Gate::single(GateKind::X, QubitId{0}));
        case 'Y': return single_qubit_matrix(Gate::single(GateKind::Y, QubitId{0}));
        case 'Z': return single_qubit_matrix(Gate::single(GateKind::Z, QubitId{0}));
        default: return single_qubit_matrix(Gate::single(GateKind::I, QubitId{0}));
    }
}

}  // namespace

// ---------------------------------------------------------------------------
// PauliString

PauliString::PauliString(std::string_view letters) : letters_(letters) {
    for (char c : letters_) {
        if (c != 'I' && c != 'X' && c != 'Y' && c != 'Z') {
            throw Error(ErrorCode::InvalidArgument, "Pauli string '" + letters_ + "' contains '" + std::string(1, c) + "'");
        }
    }
}

void PauliString::set(std::size_t q, char p) {
    if (p != 'I' && p != 'X' && p != 'Y' && p != 'Z') throw Error(ErrorCode::InvalidArgument, "bad Pauli letter");
    letters_.at(q) = p;
}

// ---------------------------------------------------------------------------
// PureState

PureState::PureState(std::uint32_t num_qubits) : num_qubits_(num_qubits) {
    if (num_qubits > kMaxPureQubits) {
        throw Error(ErrorCode::InvalidArgument, "pure-state engine supports at most " + std::to_string(kMaxPureQubits) + " qubits");
    }
    amps_.assign(std::size_t{1} << num_qubits, cplx{0.0, 0.0});
    amps_[0] = 1.0;
}

PureState PureState::from_amplitudes(std::vector<cplx> amplitudes) {
    const std::size_t dim = amplitudes.size();
    if (dim == 0 || !std::has_single_bit(dim)) throw Error(ErrorCode::DimensionMismatch, "amplitude count is not a power of two");
    PureState psi(static_cast<std::uint32_t>(std::countr_zero(dim)));
    psi.amps_ = std::move(amplitudes);
    if (std::abs(psi.norm() - 1.0) > 1e-9) throw Error(ErrorCode::InvalidArgument, "amplitudes are not normalized");
    return psi;
}

PureState PureState::basis(std::uint32_t num_qubits, std::uint64_t index) {
    PureState psi(num_qubits);
    if (index >= psi.amps_.size()) throw Error(ErrorCode::InvalidArgument, "basis index out of range");
    psi.amps_[0] = 0.0;
    psi.amps_[index] = 1.0;
    return psi;
}

double PureState::norm() const {
    double s = 0.0;
    for (const cplx& a : amps_) s += std::norm(a);
    return std::sqrt(s);
}

void PureState::normalize() {
    const double n = norm();
    if (n == 0.0) throw Error(ErrorCode::InvalidArgument, "cannot normalize the zero vector");
    for (cplx& a : amps_) a /= n;
}

void PureState::apply(const Gate& gate) {
    check_qubit(gate.qubits[0], num_qubits_);
    if (gate.arity() == 2) {
        check_qubit(gate.qubits[1], num_qubits_);
        apply_2q(amps_, gate.qubits[0].index, gate.qubits[1].index, two_qubit_matrix(gate));
    } else {
        apply_1q(amps_, gate.qubits[0].index, single_qubit_matrix(gate));
    }
}

void PureState::apply_matrix(QubitId q, const Mat2& m) {
    check_qubit(q, num_qubits_);
    apply_1q(amps_, q.index, m);
}

void PureState::apply_matrix(QubitId q0, QubitId q1, const Mat4& m) {
    check_qubit(q0, num_qubits_);
    check_qubit(q1, num_qubits_);
    apply_2q(amps_, q0.index, q1.index, m);
}

double PureState::probability_one(QubitId q) const {
    check_qubit(q, num_qubits_);
    const std::uint64_t bit = std::uint64_t{1} << q.index;
    double p = 0.0;
    for (std::uint64_t i = 0; i < amps_.size(); ++i) {
        if (i & bit) p += std::norm(amps_[i]);
    }
    return p;
}

double PureState::project(QubitId q, bool outcome) {
    check_qubit(q, num_qubits_);
    const std::uint64_t bit = std::uint64_t{1} << q.index;
    double p = 0.0;
    for (std::uint64_t i = 0; i < amps_.size(); ++i) {
        if (((i & bit) != 0) == outcome) {
            p += std::norm(amps_[i]);
        } else {
            amps_[i] = 0.0;
        }
    }
    if (p > 0.0) {
        const double s = 1.0 / std::sqrt(p);
        for (cplx& a : amps_) a *= s;
    }
    return p;
}

bool PureState::measure(QubitId q, std::mt19937_64& rng) {
    const double p1 = probability_one(q);
    const bool outcome = std::uniform_real_distribution<double>(0.0, 1.0)(rng) < p1;
    project(q, outcome);
    return outcome;
}

// ---------------------------------------------------------------------------
// DensityMatrix

DensityMatrix::DensityMatrix(std::uint32_t num_qubits) : num_qubits_(num_qubits) {
    if (num_qubits > kMaxDensityQubits) {
        throw Error(ErrorCode::InvalidArgument,
                    "density-matrix engine supports at most " + std::to_string(kMaxDensityQubits) + " qubits");
    }
    data_.assign(std::size_t{1} << (2 * num_qubits), cplx{0.0, 0.0});
    data_[0] = 1.0;
}

DensityMatrix::DensityMatrix(const PureState& psi) : DensityMatrix(psi.num_qubits()) {
    const auto a = psi.amplitudes();
    for (std::uint64_t r = 0; r < dim(); ++r) {
        for (std::uint64_t c = 0; c < dim(); ++c) at(r, c) = a[r] * std::conj(a[c]);
    }
}

cplx DensityMatrix::trace() const {
    cplx t = 0.0;
    for (std::uint64_t i = 0; i < dim(); ++i) t += at(i, i);
    return t;
}

void DensityMatrix::scale(double factor) {
    for (cplx& v : data_) v *= factor;
}

DensityMatrix& DensityMatrix::operator+=(const DensityMatrix& other) {
    if (other.num_qubits_ != num_qubits_) throw Error(ErrorCode::DimensionMismatch, "density matrix sizes differ");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
    return *this;
}

void DensityMatrix::apply(const Gate& gate) {
    if (gate.arity() == 2) {
        apply_unitary(gate.qubits[0], gate.qubits[1], two_qubit_matrix(gate));
    } else {
        apply_unitary(gate.qubits[0], single_qubit_matrix(gate));
    }
}

void DensityMatrix::apply_unitary(QubitId q, const Mat2& u) {
    check_qubit(q, num_qubits_);
    apply_1q(data_, q.index, u);
    apply_1q(data_, q.index + num_qubits_, conj_of(u));
}

void DensityMatrix::apply_unitary(QubitId q0, QubitId q1, const Mat4& u) {
    check_qubit(q0, num_qubits_);
    check_qubit(q1, num_qubits_);
    apply_2q(data_, q0.index, q1.index, u);
    apply_2q(data_, q0.index + num_qubits_, q1.index + num_qubits_, conj_of(u));
}

void DensityMatrix::apply_kraus(QubitId q, std::span<const Mat2> ops) {
    check_qubit(q, num_qubits_);
    if (ops.empty()) return;
    std::vector<cplx> acc(data_.size(), cplx{0.0, 0.0});
    for (const Mat2& k : ops) {
        std::vector<cplx> term = data_;
        apply_1q(term, q.index, k);
        apply_1q(term, q.index + num_qubits_, conj_of(k));
        for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += term[i];
    }
    data_ = std::move(acc);
}

void DensityMatrix::apply_pauli_mixture(std::span<const QubitId> qubits, std::span<const std::string> paulis,
                                        std::span<const double> probabilities) {
    if (paulis.size() != probabilities.size()) throw Error(ErrorCode::DimensionMismatch, "Pauli/probability count mismatch");
    for (QubitId q : qubits) check_qubit(q, num_qubits_);
    std::vector<cplx> acc(data_.size(), cplx{0.0, 0.0});
    for (std::size_t t = 0; t < paulis.size(); ++t) {
        if (probabilities[t] == 0.0) continue;
        if (paulis[t].size() != qubits.size()) throw Error(ErrorCode::DimensionMismatch, "Pauli length mismatch");
        std::vector<cplx> term = data_;
        for (std::size_t k = 0; k < qubits.size(); ++k) {
            if (paulis[t][k] == 'I') continue;
            const Mat2 p = pauli_matrix(paulis[t][k]);
            apply_1q(term, qubits[k].index, p);
            apply_1q(term, qubits[k].index + num_qubits_, conj_of(p));
        }
        for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += probabilities[t] * term[i];
    }
    data_ = std::move(acc);
}

double DensityMatrix::probability_one(QubitId q) const {
    check_qubit(q, num_qubits_);
    const std::uint64_t bit = std::uint64_t{1} << q.index;
    double p = 0.0;
    for (std::uint64_t i = 0; i < dim(); ++i) {
        if (i & bit) p += at(i, i).real();
    }
    return p;
}

void DensityMatrix::project(QubitId q, bool outcome) {
    check_qubit(q, num_qubits_);
    const std::uint64_t bit = std::uint64_t{1} << q.index;
    for (std::uint64_t r = 0; r < dim(); ++r) {
        const bool rk = ((r & bit) != 0) == outcome;
        for (std::uint64_t c = 0; c < dim(); ++c) {
            if (!rk || (((c & bit) != 0) != outcome)) at(r, c) = 0.0;
        }
    }
}

bool DensityMatrix::is_hermitian(double tol) const {
    for (std::uint64_t r = 0; r < dim(); ++r) {
        for (std::uint64_t c = r; c < dim(); ++c) {
            if (std::abs(at(r, c) - std::conj(at(c, r))) > tol) return false;
        }
    }
    return true;
}

std::vector<double> DensityMatrix::eigenvalues() const {
    const auto d = static_cast<Eigen::Index>(dim());
    Eigen::MatrixXcd m(d, d);
    for (Eigen::Index r = 0; r < d; ++r) {
        for (Eigen::Index c = 0; c < d; ++c) {
            m(r, c) = 0.5 * (at(static_cast<std::uint64_t>(r), static_cast<std::uint64_t>(c)) +
                             std::conj(at(static_cast<std::uint64_t>(c), static_cast<std::uint64_t>(r))));
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(m, Eigen::EigenvaluesOnly);
    const auto& ev = solver.eigenvalues();
    return std::vector<double>(ev.data(), ev.data() + ev.size());
}

DensityMatrix DensityMatrix::reduced(std::span<const QubitId> keep) const {
    const std::uint64_t kmask = mask_of(keep, num_qubits_);
    const std::uint64_t traced = (dim() - 1) & ~kmask;
    DensityMatrix out(static_cast<std::uint32_t>(keep.size()));
    out.data_[0] = 0.0;
    const std::uint64_t kdim = out.dim();
    for (std::uint64_t r = 0; r < dim(); ++r) {
        const std::uint64_t rk = gather(r, keep);
        for (std::uint64_t ck = 0; ck < kdim; ++ck) {
            const std::uint64_t c = (r & traced) | scatter(ck, keep);
            out.at(rk, ck) += at(r, c);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Free functions

PureState tensor(const PureState& a, const PureState& b) {
    PureState out(a.num_qubits() + b.num_qubits());
    auto amps = out.mutable_amplitudes();
    const auto aa = a.amplitudes();
    const auto bb = b.amplitudes();
    for (std::uint64_t j = 0; j < bb.size(); ++j) {
        for (std::uint64_t i = 0; i < aa.size(); ++i) amps[i | (j << a.num_qubits())] = aa[i] * bb[j];
    }
    return out;
}

double expectation(const PureState& psi, const PauliString& pauli) {
    if (pauli.size() != psi.num_qubits()) throw Error(ErrorCode::DimensionMismatch, "Pauli length differs from qubit count");
    const PauliAction p(pauli);
    const auto a = psi.amplitudes();
    cplx s = 0.0;
    for (std::uint64_t k = 0; k < a.size(); ++k) s += std::conj(a[k ^ p.x]) * p.phase(k) * a[k];
    return s.real();
}

double expectation(const DensityMatrix& rho, const PauliString& pauli) {
    if (pauli.size() != rho.num_qubits()) throw Error(ErrorCode::DimensionMismatch, "Pauli length differs from qubit count");
    const PauliAction p(pauli);
    cplx s = 0.0;
    for (std::uint64_t k = 0; k < rho.dim(); ++k) s += p.phase(k) * rho.at(k, k ^ p.x);
    return s.real();
}

double state_fidelity(const PureState& a, const PureState& b) {
    if (a.num_qubits() != b.num_qubits()) throw Error(ErrorCode::DimensionMismatch, "state sizes differ");
    cplx s = 0.0;
    const auto x = a.amplitudes();
    const auto y = b.amplitudes();
    for (std::size_t i = 0; i < x.size(); ++i) s += std::conj(y[i]) * x[i];
    return std::min(1.0, std::norm(s));
}

double state_fidelity(const DensityMatrix& a, const PureState& b) {
    if (a.num_qubits() != b.num_qubits()) throw Error(ErrorCode::DimensionMismatch, "state sizes differ");
    const auto y = b.amplitudes();
    cplx s = 0.0;
    for (std::uint64_t r = 0; r < a.dim(); ++r) {
        if (y[r] == 0.0) continue;
        cplx row = 0.0;
        for (std::uint64_t c = 0; c < a.dim(); ++c) row += a.at(r, c) * y[c];
        s += std::conj(y[r]) * row;
    }
    return std::clamp(s.real(), 0.0, 1.0);
}

double trace_distance(const DensityMatrix& a, const DensityMatrix& b) {
    if (a.num_qubits() != b.num_qubits()) throw Error(ErrorCode::DimensionMismatch, "state sizes differ");
    DensityMatrix d = b;
    d.scale(-1.0);
    d += a;
    double s = 0.0;
    for (double ev : d.eigenvalues()) s += std::abs(ev);
    return 0.5 * s;
}

DensityMatrix reduced_state(const PureState& psi, std::span<const QubitId> keep) {
    const std::uint64_t kmask = mask_of(keep, psi.num_qubits());
    const auto a = psi.amplitudes();
    const std::uint64_t traced = (a.size() - 1) & ~kmask;
    DensityMatrix out(static_cast<std::uint32_t>(keep.size()));
    out.at(0, 0) = 0.0;
    const std::uint64_t kdim = out.dim();
    for (std::uint64_t i = 0; i < a.size(); ++i) {
        if (a[i] == 0.0) continue;
        const std::uint64_t r = gather(i, keep);
        for (std::uint64_t ck = 0; ck < kdim; ++ck) {
            const std::uint64_t j = (i & traced) | scatter(ck, keep);
            out.at(r, ck) += a[i] * std::conj(a[j]);
        }
    }
    return out;
}

}  // namespace adaptq
