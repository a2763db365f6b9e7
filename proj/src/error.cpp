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

#include "adaptq/error.hpp"

namespace adaptq {

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::InvalidArgument: return "invalid-argument";
        case ErrorCode::InvalidCircuit: return "invalid-circuit";
        case ErrorCode::UnwrittenBit: return "unwritten-bit";
        case ErrorCode::UnsupportedGate: return "unsupported-gate";
        case ErrorCode::BranchBoundExceeded: return "branch-bound-exceeded";
        case ErrorCode::DimensionMismatch: return "dimension-mismatch";
        case ErrorCode::MissingDuration: return "missing-duration";
        case ErrorCode::Calibration: return "calibration";
        case ErrorCode::Parse: return "parse";
        case ErrorCode::Io: return "io";
        case ErrorCode::FitFailure: return "fit-failure";
        case ErrorCode::NoValidRule: return "no-valid-rule";
    }
    return "unknown";
}

}  // namespace adaptq
