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
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "adaptq/gate.hpp"

namespace adaptq {

/// Classical bits produced by mid-circuit measurements. Bit i of `values` is cbit i;
/// `written` tracks which bits have been assigned so far.
struct ClassicalRegister {
    std::uint64_t values = 0;
    std::uint64_t written = 0;

    bool get(CbitId c) const { return (values >> c.index) & 1U; }
    bool is_written(CbitId c) const { return (written >> c.index) & 1U; }
    void set(CbitId c, bool v) {
        const std::uint64_t m = std::uint64_t{1} << c.index;
        values = v ? (values | m) : (values & ~m);
        written |= m;
    }

    static ClassicalRegister from_bits(std::span<const bool> bits);
};

/// Immutable boolean expression over classical bits (XOR/AND/OR/NOT/CONST).
class CondExpr {
public:
    enum class Op : std::uint8_t { Const, Bit, Not, Xor, And, Or };

    static CondExpr constant(bool value);
    static CondExpr bit(CbitId c);
    /// XOR of all listed bits; CONST(false) when empty.
    static CondExpr parity(std::span<const CbitId> bits);

    friend CondExpr operator^(const CondExpr& a, const CondExpr& b);
    friend CondExpr operator&(const CondExpr& a, const CondExpr& b);
    friend CondExpr operator|(const CondExpr& a, const CondExpr& b);
    friend CondExpr operator!(const CondExpr& a);

    /// Throws Error(UnwrittenBit) when a referenced bit has not been written.
    bool eval(const ClassicalRegister& reg) const;

    /// Distinct referenced bits, sorted.
    std::vector<CbitId> bits() const;

    Op op() const;
    std::string to_string() const;

    /// Grammar: or := and ('|' and)*; and := xor ('&' xor)*; xor := unary ('^' unary)*;
    /// unary := '!' unary | '(' or ')' | 'c' digits | '0' | '1'.
    static CondExpr parse(std::string_view text);

    friend bool operator==(const CondExpr& a, const CondExpr& b);

    struct Node;  // opaque

private:
    explicit CondExpr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
    std::shared_ptr<const Node> node_;
};

/// Free-function form used throughout the engines.
inline bool eval_cond(const CondExpr& expr, const ClassicalRegister& reg) { return expr.eval(reg); }

}  // namespace adaptq
