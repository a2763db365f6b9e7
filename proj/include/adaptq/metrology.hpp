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

#include <array>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "adaptq/circuit.hpp"
#include "adaptq/distribution.hpp"
#include "adaptq/noise.hpp"
#include "adaptq/protocols.hpp"

namespace adaptq {

// All estimators run circuits through execute(): shots == 0 gives exact
// density-matrix expectations, shots > 0 samples trajectories.

struct GhzFidelity {
    double value = 0.0;
    bool genuine = false;  // value > 1/2
};

/// F = (P_0..0 + P_1..1 + C) / 2. Throws Error(InvalidArgument) on out-of-range input.
GhzFidelity ghz_fidelity(double p_all0, double p_all1, double coherence);

/// Analysis pulse for phase phi: a quarter turn about an equatorial axis, oriented so an
/// ideal GHZ_n gives parity cos(n phi).
std::vector<Gate> analysis_rotation(QubitId q, double phi);

/// `count` phases uniformly spaced over [0, 2pi).
std::vector<double> uniform_phases(std::size_t count);

struct ParityCurve {
    std::vector<double> phases;
    std::vector<double> parities;
    std::uint64_t shots = 0;
    std::uint32_t frequency = 0;
    /// parity ~ amplitude * cos(frequency * phi + phase_offset)
    double amplitude = 0.0;
    double phase_offset = 0.0;
    double residual = 0.0;
    bool fit_ok = true;

    /// amplitude * cos(phase_offset): the coherence with its sign relative to cos(n phi).
    double signed_coherence() const;
    std::string to_csv() const;
};

/// Appends the analysis rotation and Z measurements of `data` to `prep` at every phase,
/// estimates the parity and fits C cos(n phi + phi0) by linear least squares. Fewer than
/// 8 phases throws; an RMS residual above `max_residual` marks fit_ok false.
ParityCurve parity_oscillation(const Circuit& prep, std::span<const QubitId> data, std::span<const double> phases,
                               const NoiseModel* noise, std::uint64_t shots, std::uint64_t seed,
                               double max_residual = 0.1);

/// Least-squares fit of y = C cos(n phi + phi0).
ParityCurve fit_parity(std::span<const double> phases, std::span<const double> parities, std::uint32_t frequency,
                       double max_residual = 0.1);

/// Populations of |0..0> and |1..1> of `data` after `prep`.
std::pair<double, double> extreme_populations(const Circuit& prep, std::span<const QubitId> data,
                                              const NoiseModel* noise, std::uint64_t shots, std::uint64_t seed);

struct GhzEstimate {
    double p_all0 = 0.0;
    double p_all1 = 0.0;
    ParityCurve parity;
    GhzFidelity fidelity;
};

/// Populations, parity oscillation and fidelity for a GHZ-preparation protocol (outputs =
/// GHZ qubits).
GhzEstimate estimate_ghz_fidelity(const Protocol& prep, const NoiseModel* noise, std::uint64_t shots,
                                  std::uint64_t seed, std::size_t num_phases = 0);

/// Column j is the output distribution for basis input j (bit k of an index is data
/// qubit k).
struct TruthTable {
    std::uint32_t num_bits = 0;
    std::vector<std::vector<double>> entries;  // entries[out][in]

    static TruthTable identity(std::uint32_t num_bits);
    /// Permutation matrix of a classical reversible circuit (X, CNOT gates only).
    static TruthTable from_permutation(const Circuit& reversible);
    std::uint64_t dim() const { return std::uint64_t{1} << num_bits; }
    nlohmann::json to_json() const;
};

/// Prepares every basis input with X gates at the protocol's input point and records the
/// outputs' Z-basis distribution.
TruthTable truth_table(const Protocol& protocol, const NoiseModel* noise, std::uint64_t shots, std::uint64_t seed);

/// (1/d) Tr(S_exp^T S_ideal). Throws Error(DimensionMismatch).
double truth_table_fidelity(const TruthTable& experimental, const TruthTable& ideal);

/// (1/2) sum |p - q|. Throws Error(InvalidArgument) if either input is unnormalized.
double tvd(const Distribution& p, const Distribution& q);

/// Z-basis distribution of the protocol's outputs (first output is bit 0) after `input_prep`.
Distribution output_distribution(const Protocol& protocol, std::span<const Gate> input_prep, const NoiseModel* noise,
                                 std::uint64_t shots, std::uint64_t seed);

/// 1 - tvd(output_distribution(...), ideal).
double output_success(const Protocol& protocol, std::span<const Gate> input_prep, const Distribution& ideal,
                      const NoiseModel* noise, std::uint64_t shots, std::uint64_t seed);

/// Row-major 4x4 PTM in (I, X, Y, Z) order.
using Ptm = std::array<std::array<double, 4>, 4>;

Ptm identity_ptm();
nlohmann::json ptm_to_json(const Ptm& ptm);

/// Linear-inversion QPT from |0>, |1>, |+>, |+i> inputs on a one-input protocol.
Ptm qpt_single_qubit(const Protocol& protocol, const NoiseModel* noise, std::uint64_t shots, std::uint64_t seed);

/// Reconstruct from output Bloch vectors of the four inputs (order 0, 1, +, +i).
Ptm ptm_from_bloch(const std::array<std::array<double, 3>, 4>& outputs);

/// Tr(R_ideal^T R_exp) / 4.
double process_fidelity_from_ptm(const Ptm& experimental, const Ptm& ideal);

/// (P00 + P11 + target_sign * signed_coherence) / 2 with target_sign +1 for Phi+ and
/// -1 for Phi-.
double bell_fidelity_from_parity(double p00, double p11, double signed_coherence, int target_sign);

struct DecayFit {
    double amplitude = 0.0;
    double rate = 0.0;
    double residual = 0.0;
    bool reliable = false;
};

/// y = A p^m by Levenberg-Marquardt, seeded from a log-linear fit of the positive
/// points; p clamped to [0, 1]. Unreliable when A < `min_amplitude`, when the fitted
/// curve is already below `min_amplitude` at the shortest length (A not identified), or
/// when no y is positive.
DecayFit fit_exponential_decay(std::span<const double> lengths, std::span<const double> values,
                               double min_amplitude = 0.1);

/// e_F = ((d+1)/d) r with d = 2^n.
double ef_from_r(double r, std::uint32_t n);
double r_from_ef(double ef, std::uint32_t n);

// ---------------------------------------------------------------------------
// Cycle benchmarking with an interleaved mid-circuit measurement
// ---------------------------------------------------------------------------

struct CbConfig {
    std::vector<QubitId> spectators;
    QubitId measured;
    std::vector<std::uint32_t> lengths{4, 16, 64};
    std::uint32_t randomizations = 20;
    std::uint64_t shots = 0;  // 0: exact expectations
    std::uint64_t seed = 0;
    bool dd_active = false;
    double min_amplitude = 0.1;
};

struct CbDecay {
    QubitId spectator;
    char pauli = 'X';
    std::vector<double> lengths;
    std::vector<double> means;  // twirl-averaged <P> per length
    DecayFit fit;
};

struct CbResult {
    std::vector<CbDecay> decays;

    const CbDecay& get(QubitId spectator, char pauli) const;
    nlohmann::json to_json() const;
};

/// For P in {X, Y, Z}: rotate spectators into the +1 eigenstate of P, apply m cycles of
/// [random Pauli on every spectator, MCM on `measured`], undo the basis change, and
/// read <P> with the sign fixed by the accumulated twirl. Averaged over randomizations
/// and fitted per spectator.
CbResult cb_mcm_experiment(const CbConfig& config, const NoiseModel& noise);

}  // namespace adaptq
