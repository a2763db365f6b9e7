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

#include <filesystem>
#include <limits>
#include <map>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "adaptq/circuit.hpp"
#include "adaptq/distribution.hpp"
#include "adaptq/schedule.hpp"

namespace adaptq {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Single-qubit channel {K_i}.
struct KrausChannel {
    std::vector<Mat2> ops;

    /// max |sum K^dagger K - I| entry.
    double completeness_error() const;
    /// Composition: apply `first`, then `second`.
    static KrausChannel compose(const KrausChannel& first, const KrausChannel& second);
};

/// Amplitude damping with p = 1 - exp(-t/T1) followed by pure dephasing with
/// p = (1 - exp(-t/Tphi))/2. Throws Error(InvalidArgument) for T1 <= 0 or t < 0.
KrausChannel idle_channel(double t1_us, double tphi_us, double t_ns);
double amplitude_damping_probability(double t1_us, double t_ns);
double dephasing_probability(double tphi_us, double t_ns);

/// 1/Tphi = 1/T2 - 1/(2 T1); infinity when the right side is <= 0 (sets `warning`).
double tphi_from(double t1_us, double t2_us, bool* warning = nullptr);

/// Phase flip with lambda' = lambda * dd_suppression when DD is active.
KrausChannel mcm_spectator_channel(double lambda, bool dd_active, double dd_suppression);

struct QubitCoherence {
    double t1_us = kInfinity;
    double t2_star_us = kInfinity;
    double t2_echo_us = kInfinity;
};

struct CoherenceParams {
    std::vector<QubitCoherence> qubits;
};

struct ReadoutModel {
    std::vector<ReadoutError> qubits;
    double measurement_ns = 700.0;
    bool esp_enabled = true;
};

enum class DephasingRegime : std::uint8_t { Weak, Strong };

struct CrosstalkEntry {
    double lambda = 0.0;
    double dd_suppression = 1.0;
    DephasingRegime regime = DephasingRegime::Weak;
};

struct MCMCrosstalkModel {
    /// Keyed by (measured, spectator).
    std::map<std::pair<std::uint32_t, std::uint32_t>, CrosstalkEntry> pairs;
    double strong_threshold = 0.25;

    const CrosstalkEntry* find(QubitId measured, QubitId spectator) const;
};

/// Depolarizing strengths from benchmarked process infidelities (p = e_F).
struct GateErrorModel {
    std::vector<double> single_qubit;
    std::map<std::pair<std::uint32_t, std::uint32_t>, double> two_qubit;  // unordered pair, low first

    double two_qubit_error(QubitId a, QubitId b) const;
};

/// Device calibration turned into channels. Immutable once loaded.
class NoiseModel {
public:
    CoherenceParams coherence;
    ReadoutModel readout;
    MCMCrosstalkModel crosstalk;
    GateErrorModel gate_errors;
    Durations durations = Durations::defaults();
    bool dd_active = false;

    std::uint32_t num_qubits() const { return static_cast<std::uint32_t>(coherence.qubits.size()); }

    /// Infinite coherence, perfect readout, no crosstalk, no gate errors.
    static NoiseModel noiseless(std::uint32_t num_qubits);

    NoiseModel with_dd(bool active) const;

    /// Tphi used for idle channels (T2_echo under DD, else T2*).
    double idle_tphi_us(QubitId q) const;

    /// Human-readable calibration warnings (e.g. T2 > 2 T1).
    std::vector<std::string> warnings() const;
};

/// Applies the confusion matrix of `model` to a distribution whose bit k was measured on
/// qubits[k]: exact stochastic-matrix product.
Distribution apply_readout_confusion(const Distribution& dist, std::span<const QubitId> qubits,
                                     const ReadoutModel& model);
/// Samples one recorded bit.
bool apply_readout_confusion(bool true_bit, const ReadoutError& error, std::mt19937_64& rng);

/// Inserts noise channels per the circuit's schedule: idle decoherence on every gap
/// (after a qubit's first operation), spectator dephasing for each (measured, spectator)
/// pair at every measurement, readout errors on measurements and resets, and
/// depolarizing gate errors. Zero-strength channels are omitted.
Circuit decorate(const Circuit& circuit, const NoiseModel& noise);

struct Device {
    Topology topology;
    NoiseModel noise;
    std::string name;
};

/// Parses a calibration JSON (sections topology, coherence, readout, mcm_crosstalk,
/// durations, optional gate_errors). Throws Error(Calibration) on missing or malformed
/// entries.
Device device_from_json(const nlohmann::json& j);
Device load_device(const std::filesystem::path& path);
nlohmann::json device_to_json(const Device& device);

/// Packaged 8-qubit ring calibration path: $ADAPTQ_DEVICE if set, else the installed
/// default.
std::filesystem::path default_device_path();

}  // namespace adaptq
