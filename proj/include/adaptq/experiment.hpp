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
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "adaptq/noise.hpp"
#include "adaptq/protocols.hpp"

namespace adaptq {

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr int kSchemaVersion = 1;

enum class EngineKind : std::uint8_t { Trajectory, Density, Stabilizer, Enumerate };

std::string_view to_string(EngineKind engine);
EngineKind engine_from_string(std::string_view name);

enum class Placement : std::uint8_t { Auto, Line, Ring8 };

struct ExperimentConfig {
    /// ghz | tele_cnot | fanout | teleport | swap
    std::string protocol = "ghz";
    /// GHZ data qubits, fan-out targets, or Bell-pair chain length; 0 picks the
    /// protocol default (2 for ghz and fanout, 4 for teleport and swap).
    std::uint32_t n = 0;
    /// teleport: zero | one | plus | minus | plus_i; swap: two bits; tele_cnot, fanout:
    /// computational-basis bits for the inputs. Empty means all zeros.
    std::string input;
    Placement placement = Placement::Auto;
    BellMode bell_mode = BellMode::Unitary;
    bool reuse_reset = true;
    EngineKind engine = EngineKind::Trajectory;
    /// Calibration file, or "none".
    std::string noise = "none";
    std::uint64_t shots = 1000;
    std::uint64_t seed = 0;
    bool dd_active = false;
    std::filesystem::path output_dir = "out";

    std::uint32_t size() const;

    /// Throws Error(InvalidArgument) or Error(Io).
    void validate() const;
    nlohmann::json to_json() const;
};

/// Resolves a calibration argument: an existing path, or a bare file name looked up next
/// to the default device file.
std::filesystem::path resolve_device_path(const std::string& name);

/// Protocol for a config (input preparation included), on the ring placement when
/// `topology` is given.
Protocol build_protocol(const ExperimentConfig& config, const Topology* topology);

struct RunManifest {
    nlohmann::json json;
    std::vector<std::filesystem::path> files;
};

/// Runs one experiment and writes distribution.csv, distribution.json, summary.json,
/// circuit.txt and finally manifest.json into the output directory.
RunManifest run(const ExperimentConfig& config);

struct SuiteOptions {
    std::filesystem::path output_dir = "paper";
    std::filesystem::path device;  // empty: default_device_path()
    std::uint64_t shots = 0;       // 0: exact density-matrix estimates
    std::uint64_t seed = 0;
};

/// Runs the GHZ, teleported CNOT, fan-out, teleportation and swapping experiments
/// noiseless (asserting ideal values) and with the packaged noise model, and writes a
/// side-by-side table next to the published hardware numbers.
RunManifest reproduce_paper_suite(const SuiteOptions& options);

/// Writes `content` to `path` through a temporary file and rename.
void write_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace adaptq
