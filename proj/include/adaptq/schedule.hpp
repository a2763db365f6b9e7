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

#include <optional>
#include <vector>

#include "adaptq/circuit.hpp"

namespace adaptq {

/// Operation durations in nanoseconds. A field left empty is a configuration error
/// only if the circuit actually needs it.
struct Durations {
    std::optional<double> single_qubit_gate_ns;
    std::optional<double> two_qubit_gate_ns;
    std::optional<double> measurement_ns;
    std::optional<double> reset_ns;
    double feedback_latency_ns = 150.0;

    /// 30 / 200 / 700 / 850 ns with the 150 ns feedback latency.
    static Durations defaults();
};

enum class Activity : std::uint8_t { Gate, Measure, Idle, FeedbackWait };

struct Interval {
    double start_ns = 0.0;
    double end_ns = 0.0;
    Activity activity = Activity::Idle;
};

struct Timeline {
    std::vector<std::vector<Interval>> per_qubit;
    /// Start time of every instruction, indexed like the circuit.
    std::vector<double> instruction_start_ns;
    std::vector<double> instruction_end_ns;
    double end_ns = 0.0;
};

/// Places every instruction as early as its qubits allow. Conditionals additionally wait
/// for the latest source measurement plus the feedback latency. Gaps become idle (or
/// feedback-wait, when the gap is caused by that latency) and every qubit is padded to
/// the common end time.
Timeline schedule(const Circuit& circuit, const Durations& durations);

}  // namespace adaptq
