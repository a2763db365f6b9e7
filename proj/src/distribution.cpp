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

#include "adaptq/distribution.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

#include "adaptq/error.hpp"

namespace adaptq {

Distribution Distribution::exact(std::uint32_t num_bits, std::map<std::uint64_t, double> probabilities) {
    Distribution d(num_bits);
    for (const auto& [k, p] : probabilities) {
        if (p < 0.0 || !std::isfinite(p)) throw Error(ErrorCode::InvalidArgument, "negative or non-finite probability");
        if (p > 0.0) d.weights_[k] = p;
    }
    return d;
}

Distribution Distribution::counts(std::uint32_t num_bits, std::map<std::uint64_t, std::uint64_t> counts) {
    Distribution d(num_bits);
    for (const auto& [k, c] : counts) d.add_count(k, c);
    return d;
}

double Distribution::probability(std::uint64_t key) const {
    auto it = weights_.find(key);
    if (it == weights_.end()) return 0.0;
    return shots_ ? it->second / static_cast<double>(shots_) : it->second;
}

std::uint64_t Distribution::count(std::uint64_t key) const {
    if (!shots_) return 0;
    auto it = weights_.find(key);
    return it == weights_.end() ? 0 : static_cast<std::uint64_t>(it->second);
}

std::map<std::uint64_t, double> Distribution::probabilities() const {
    std::map<std::uint64_t, double> out;
    for (const auto& [k, w] : weights_) out[k] = shots_ ? w / static_cast<double>(shots_) : w;
    return out;
}

double Distribution::total_weight() const {
    double s = 0.0;
    for (const auto& [k, w] : weights_) s += w;
    return s;
}

Distribution Distribution::marginal(std::span<const CbitId> bits) const {
    for (CbitId b : bits) {
        if (b.index >= num_bits_) throw Error(ErrorCode::InvalidArgument, "marginal bit c" + std::to_string(b.index) + " out of range");
    }
    Distribution out(static_cast<std::uint32_t>(bits.size()));
    out.shots_ = shots_;
    for (const auto& [k, w] : weights_) {
        std::uint64_t m = 0;
        for (std::size_t i = 0; i < bits.size(); ++i) m |= ((k >> bits[i].index) & 1U) << i;
        out.weights_[m] += w;
    }
    return out;
}

Distribution Distribution::postselect(CbitId bit, bool value) const {
    if (bit.index >= num_bits_) throw Error(ErrorCode::InvalidArgument, "postselect bit out of range");
    Distribution out(num_bits_);
    double kept = 0.0;
    for (const auto& [k, w] : weights_) {
        if (((k >> bit.index) & 1U) == static_cast<unsigned>(value)) {
            out.weights_[k] = w;
            kept += w;
        }
    }
    if (kept == 0.0) throw Error(ErrorCode::InvalidArgument, "postselection keeps no outcomes");
    if (shots_) {
        out.shots_ = static_cast<std::uint64_t>(kept);
    } else {
        for (auto& [k, w] : out.weights_) w /= kept;
    }
    return out;
}

std::string Distribution::key_string(std::uint64_t key) const {
    std::string s(num_bits_, '0');
    for (std::uint32_t i = 0; i < num_bits_; ++i) s[i] = ((key >> i) & 1U) ? '1' : '0';
    return s;
}

std::uint64_t Distribution::parse_key(std::string_view bitstring) const {
    if (bitstring.size() != num_bits_) {
        throw Error(ErrorCode::InvalidArgument, "bitstring '" + std::string(bitstring) + "' has wrong length");
    }
    std::uint64_t k = 0;
    for (std::uint32_t i = 0; i < num_bits_; ++i) {
        if (bitstring[i] == '1') {
            k |= std::uint64_t{1} << i;
        } else if (bitstring[i] != '0') {
            throw Error(ErrorCode::InvalidArgument, "bitstring '" + std::string(bitstring) + "' is not binary");
        }
    }
    return k;
}

namespace {

std::string fmt(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

}  // namespace

std::string Distribution::to_csv() const {
    std::ostringstream out;
    out << "bitstring,count,probability\n";
    for (const auto& [k, w] : weights_) {
        out << key_string(k) << "," << (shots_ ? std::to_string(static_cast<std::uint64_t>(w)) : std::string()) << ","
            << fmt(probability(k)) << "\n";
    }
    return out.str();
}

nlohmann::json Distribution::to_json() const {
    nlohmann::json j;
    j["num_bits"] = num_bits_;
    j["shots"] = shots_;
    j["exact"] = shots_ == 0;
    nlohmann::json outcomes = nlohmann::json::array();
    for (const auto& [k, w] : weights_) {
        nlohmann::json e{{"bitstring", key_string(k)}, {"probability", probability(k)}};
        if (shots_) e["count"] = static_cast<std::uint64_t>(w);
        outcomes.push_back(std::move(e));
    }
    j["outcomes"] = std::move(outcomes);
    return j;
}

void Distribution::merge_counts(const Distribution& other) {
    if (other.num_bits_ != num_bits_) throw Error(ErrorCode::DimensionMismatch, "distributions cover different registers");
    if ((shots_ == 0 && !weights_.empty()) || (other.shots_ == 0 && !other.weights_.empty())) {
        throw Error(ErrorCode::InvalidArgument, "merge_counts needs sampled distributions");
    }
    for (const auto& [k, w] : other.weights_) weights_[k] += w;
    shots_ += other.shots_;
}

void Distribution::add_count(std::uint64_t key, std::uint64_t n) {
    if (n == 0) return;
    weights_[key] += static_cast<double>(n);
    shots_ += n;
}

void Distribution::add_probability(std::uint64_t key, double p) {
    if (shots_) throw Error(ErrorCode::InvalidArgument, "add_probability on a sampled distribution");
    if (p < 0.0) throw Error(ErrorCode::InvalidArgument, "negative probability");
    if (p > 0.0) weights_[key] += p;
}

}  // namespace adaptq
