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
#include <map>
#include <span>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "adaptq/gate.hpp"

namespace adaptq {

/// Outcome statistics over a classical register of `num_bits` bits. Keys store bit i at
/// position i; printed bitstrings put bit 0 leftmost. `shots` is zero for exact
/// (probability-valued) distributions and the total count otherwise.
class Distribution {
public:
    Distribution() = default;
    explicit Distribution(std::uint32_t num_bits) : num_bits_(num_bits) {}

    static Distribution exact(std::uint32_t num_bits, std::map<std::uint64_t, double> probabilities);
    static Distribution counts(std::uint32_t num_bits, std::map<std::uint64_t, std::uint64_t> counts);

    std::uint32_t num_bits() const { return num_bits_; }
    std::uint64_t shots() const { return shots_; }
    bool is_sampled() const { return shots_ > 0; }

    /// Probability (counts divided by shots for sampled distributions).
    double probability(std::uint64_t key) const;
    double probability(std::string_view bitstring) const { return probability(parse_key(bitstring)); }
    std::uint64_t count(std::uint64_t key) const;

    std::map<std::uint64_t, double> probabilities() const;
    const std::map<std::uint64_t, double>& weights() const { return weights_; }
    double total_weight() const;

    /// Keeps the listed bits (first listed becomes bit 0), summing over the rest.
    Distribution marginal(std::span<const CbitId> bits) const;
    /// Keeps only outcomes where `bit` equals `value` and renormalizes.
    Distribution postselect(CbitId bit, bool value) const;

    std::string key_string(std::uint64_t key) const;
    std::uint64_t parse_key(std::string_view bitstring) const;

    /// "bitstring,count,probability" with one header line.
    std::string to_csv() const;
    nlohmann::json to_json() const;

    /// Accumulates another sampled distribution over the same register.
    void merge_counts(const Distribution& other);
    void add_count(std::uint64_t key, std::uint64_t n = 1);
    void add_probability(std::uint64_t key, double p);

private:
    std::uint32_t num_bits_ = 0;
    std::uint64_t shots_ = 0;
    std::map<std::uint64_t, double> weights_;
};

}  // namespace adaptq
