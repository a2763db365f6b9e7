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

#include "adaptq/cond_expr.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include "adaptq/error.hpp"

namespace adaptq {

struct CondExpr::Node {
    Op op = Op::Const;
    bool value = false;
    std::uint32_t bit = 0;
    std::shared_ptr<const Node> lhs;
    std::shared_ptr<const Node> rhs;
};

ClassicalRegister ClassicalRegister::from_bits(std::span<const bool> bits) {
    if (bits.size() > 64) throw Error(ErrorCode::InvalidArgument, "classical register holds at most 64 bits");
    ClassicalRegister reg;
    for (std::size_t i = 0; i < bits.size(); ++i) reg.set(CbitId{static_cast<std::uint32_t>(i)}, bits[i]);
    return reg;
}

namespace {

using NodePtr = std::shared_ptr<const CondExpr::Node>;

}  // namespace

CondExpr CondExpr::constant(bool value) {
    auto n = std::make_shared<Node>();
    n->op = Op::Const;
    n->value = value;
    return CondExpr(std::move(n));
}

CondExpr CondExpr::bit(CbitId c) {
    if (c.index >= 64) throw Error(ErrorCode::InvalidArgument, "cbit index exceeds 63");
    auto n = std::make_shared<Node>();
    n->op = Op::Bit;
    n->bit = c.index;
    return CondExpr(std::move(n));
}

CondExpr CondExpr::parity(std::span<const CbitId> bits) {
    if (bits.empty()) return constant(false);
    CondExpr e = bit(bits[0]);
    for (std::size_t i = 1; i < bits.size(); ++i) e = e ^ bit(bits[i]);
    return e;
}

namespace {

CondExpr::Op node_op(const NodePtr& n) { return n->op; }

}  // namespace

CondExpr operator^(const CondExpr& a, const CondExpr& b) {
    auto n = std::make_shared<CondExpr::Node>();
    n->op = CondExpr::Op::Xor;
    n->lhs = a.node_;
    n->rhs = b.node_;
    return CondExpr(std::move(n));
}

CondExpr operator&(const CondExpr& a, const CondExpr& b) {
    auto n = std::make_shared<CondExpr::Node>();
    n->op = CondExpr::Op::And;
    n->lhs = a.node_;
    n->rhs = b.node_;
    return CondExpr(std::move(n));
}

CondExpr operator|(const CondExpr& a, const CondExpr& b) {
    auto n = std::make_shared<CondExpr::Node>();
    n->op = CondExpr::Op::Or;
    n->lhs = a.node_;
    n->rhs = b.node_;
    return CondExpr(std::move(n));
}

CondExpr operator!(const CondExpr& a) {
    auto n = std::make_shared<CondExpr::Node>();
    n->op = CondExpr::Op::Not;
    n->lhs = a.node_;
    return CondExpr(std::move(n));
}

namespace {

bool eval_node(const CondExpr::Node& n, const ClassicalRegister& reg) {
    using Op = CondExpr::Op;
    switch (n.op) {
        case Op::Const: return n.value;
        case Op::Bit:
            if (!reg.is_written(CbitId{n.bit})) {
                throw Error(ErrorCode::UnwrittenBit, "condition reads unwritten bit c" + std::to_string(n.bit));
            }
            return reg.get(CbitId{n.bit});
        case Op::Not: return !eval_node(*n.lhs, reg);
        case Op::Xor: return eval_node(*n.lhs, reg) != eval_node(*n.rhs, reg);
        // Both sides are evaluated so an unwritten bit is always reported.
        case Op::And: {
            const bool l = eval_node(*n.lhs, reg);
            const bool r = eval_node(*n.rhs, reg);
            return l && r;
        }
        case Op::Or: {
            const bool l = eval_node(*n.lhs, reg);
            const bool r = eval_node(*n.rhs, reg);
            return l || r;
        }
    }
    return false;
}

void collect_bits(const CondExpr::Node& n, std::set<std::uint32_t>& out) {
    if (n.op == CondExpr::Op::Bit) out.insert(n.bit);
    if (n.lhs) collect_bits(*n.lhs, out);
    if (n.rhs) collect_bits(*n.rhs, out);
}

int precedence(CondExpr::Op op) {
    switch (op) {
        case CondExpr::Op::Or: return 1;
        case CondExpr::Op::And: return 2;
        case CondExpr::Op::Xor: return 3;
        default: return 4;
    }
}

std::string render(const CondExpr::Node& n) {
    using Op = CondExpr::Op;
    auto child = [](const CondExpr::Node& c, int parent_prec, bool right) {
        std::string s = render(c);
        const int p = precedence(c.op);
        // Binary operators parse left-associatively, so a right child of equal
        // precedence needs parentheses to keep the tree shape.
        if (p < parent_prec || (right && p == parent_prec && p < 4)) return "(" + s + ")";
        return s;
    };
    switch (n.op) {
        case Op::Const: return n.value ? "1" : "0";
        case Op::Bit: return "c" + std::to_string(n.bit);
        case Op::Not: return "!" + child(*n.lhs, 4, false);
        case Op::Xor: return child(*n.lhs, 3, false) + "^" + child(*n.rhs, 3, true);
        case Op::And: return child(*n.lhs, 2, false) + "&" + child(*n.rhs, 2, true);
        case Op::Or: return child(*n.lhs, 1, false) + "|" + child(*n.rhs, 1, true);
    }
    return "";
}

bool same(const NodePtr& a, const NodePtr& b) {
    if (a == b) return true;
    if (!a || !b) return false;
    if (a->op != b->op) return false;
    switch (a->op) {
        case CondExpr::Op::Const: return a->value == b->value;
        case CondExpr::Op::Bit: return a->bit == b->bit;
        default: return same(a->lhs, b->lhs) && same(a->rhs, b->rhs);
    }
}

class Parser {
public:
    explicit Parser(std::string_view text) : text_(text) {}

    CondExpr parse() {
        CondExpr e = parse_or();
        skip_space();
        if (pos_ != text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
        return e;
    }

private:
    void skip_space() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }
    bool accept(char c) {
        skip_space();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }
    [[noreturn]] void fail(const std::string& what) const {
        throw Error(ErrorCode::Parse, "condition '" + std::string(text_) + "': " + what);
    }

    CondExpr parse_or() {
        CondExpr e = parse_and();
        while (accept('|')) e = e | parse_and();
        return e;
    }
    CondExpr parse_and() {
        CondExpr e = parse_xor();
        while (accept('&')) e = e & parse_xor();
        return e;
    }
    CondExpr parse_xor() {
        CondExpr e = parse_unary();
        while (accept('^')) e = e ^ parse_unary();
        return e;
    }
    CondExpr parse_unary() {
        if (accept('!')) return !parse_unary();
        if (accept('(')) {
            CondExpr e = parse_or();
            if (!accept(')')) fail("missing ')'");
            return e;
        }
        skip_space();
        if (pos_ >= text_.size()) fail("unexpected end");
        const char c = text_[pos_];
        if (c == '0' || c == '1') {
            ++pos_;
            return CondExpr::constant(c == '1');
        }
        if (c == 'c') {
            ++pos_;
            const std::size_t start = pos_;
            while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
            if (start == pos_ || pos_ - start > 6) fail("bad bit reference");
            return CondExpr::bit(CbitId{static_cast<std::uint32_t>(std::stoul(std::string(text_.substr(start, pos_ - start))))});
        }
        fail("unexpected '" + std::string(1, c) + "'");
    }

    std::string_view text_;
    std::size_t pos_ = 0;
};

}  // namespace

bool CondExpr::eval(const ClassicalRegister& reg) const { return eval_node(*node_, reg); }

std::vector<CbitId> CondExpr::bits() const {
    std::set<std::uint32_t> s;
    collect_bits(*node_, s);
    std::vector<CbitId> out;
    for (auto b : s) out.push_back(CbitId{b});
    return out;
}

CondExpr::Op CondExpr::op() const { return node_op(node_); }

std::string CondExpr::to_string() const { return render(*node_); }

CondExpr CondExpr::parse(std::string_view text) { return Parser(text).parse(); }

bool operator==(const CondExpr& a, const CondExpr& b) { return same(a.node_, b.node_); }

}  // namespace adaptq
