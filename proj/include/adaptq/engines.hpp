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
#include <utility>
#include <vector>

#include "adaptq/circuit.hpp"
#include "adaptq/distribution.hpp"
#include "adaptq/states.hpp"
#include "adaptq/tableau.hpp"

namespace adaptq {

class NoiseModel;

inline constexpr std::size_t kMaxEnumeratedMeasurements = 20;
inline constexpr double kBranchPruneThreshold = 1e-12;

struct OutcomeBranch {
    ClassicalRegister cbits;  // original cbits only
    double probability = 0.0;
    PureState final_state{0};
};

struct DensityBranch {
    ClassicalRegister cbits;
    double probability = 0.0;
    DensityMatrix state{0};  // normalized
};

/// Exact depth-first expansion of every measurement outcome. Noise channels must be
/// trivial (probability zero). Throws Error(BranchBoundExceeded) beyond 20 measurements.
std::vector<OutcomeBranch> enumerate_branches(const Circuit& circuit);

/// Exact density-matrix execution. Paths that end with the same classical register are
/// merged; readout confusion branches on the recorded bit.
std::vector<DensityBranch> run_density(const Circuit& circuit);

/// Probability-weighted mixture of all branches.
DensityMatrix mixed_state(std::span<const DensityBranch> branches);

/// Exact distribution of the final register. Idle qubits are dropped before simulation,
/// so circuits on a large device stay cheap. Uses the density engine when the active
/// qubits fit, else branch enumeration for noiseless circuits.
Distribution exact_distribution(const Circuit& circuit);

/// Distribution of a list of branches over the original cbits.
Distribution to_distribution(std::uint32_t num_cbits, std::span<const OutcomeBranch> branches);

struct TrajectoryOptions {
    std::uint64_t shots = 1;
    std::uint64_t seed = 0;
    /// 0 picks std::thread::hardware_concurrency(). Results do not depend on this.
    unsigned threads = 0;
};

/// Pure-state Monte Carlo. Noise channels are sampled as Kraus operators and readout
/// errors flip recorded bits. Same seed => same counts.
Distribution run_trajectories(const Circuit& circuit, const TrajectoryOptions& options);
/// Decorates with `noise` first (when non-null).
Distribution run_trajectories(const Circuit& circuit, const NoiseModel* noise, const TrajectoryOptions& options);

/// One stabilizer-simulator shot. Throws Error(UnsupportedGate) on non-Clifford input.
std::pair<ClassicalRegister, StabilizerTableau> stabilizer_run(const Circuit& circuit, std::mt19937_64& rng);
Distribution sample_stabilizer(const Circuit& circuit, std::uint64_t shots, std::uint64_t seed);

/// Executes `circuit` (decorated with `noise` when non-null): exact distribution when
/// `shots` is zero, otherwise trajectory sampling.
Distribution execute(const Circuit& circuit, const NoiseModel* noise, std::uint64_t shots, std::uint64_t seed);

/// Independent per-stream seed derived from a master seed (SplitMix64 finalizer).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace adaptq
