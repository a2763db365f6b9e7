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

#include "adaptq/serialize.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>

#include "adaptq/error.hpp"

namespace adaptq {

namespace {

std::string fmt(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

constexpr std::array<std::pair<ChannelKind, std::string_view>, 4> kChannelNames{{
    {ChannelKind::AmplitudeDamping, "AMPDAMP"},
    {ChannelKind::PhaseFlip, "DEPHASE"},
    {ChannelKind::Depolarize1, "DEPOL1"},
    {ChannelKind::Depolarize2, "DEPOL2"},
}};

std::string_view channel_name(ChannelKind k) {
    for (const auto& [kind, name] : kChannelNames) {
        if (kind == k) return name;
    }
    return "?";
}

std::optional<ChannelKind> channel_from_name(std::string_view name) {
    for (const auto& [kind, n] : kChannelNames) {
        if (n == name) return kind;
    }
    return std::nullopt;
}

std::string gate_text(const Gate& g) {
    std::string s(gate_name(g.kind));
    if (is_rotation(g.kind)) s += "(" + fmt(g.angle) + ")";
    s += " " + std::to_string(g.qubits[0].index);
    if (g.arity() == 2) s += " " + std::to_string(g.qubits[1].index);
    return s;
}

std::string readout_text(const std::optional<ReadoutError>& ro) {
    if (!ro) return "";
    return " ro=" + fmt(ro->p00) + "," + fmt(ro->p11);
}

[[noreturn]] void parse_fail(std::size_t line, const std::string& what) {
    throw Error(ErrorCode::Parse, "line " + std::to_string(line) + ": " + what);
}

std::vector<std::string> split_ws(std::string_view s) {
    std::vector<std::string> out;
    std::istringstream in{std::string(s)};
    std::string tok;
    while (in >> tok) out.push_back(tok);
    return out;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

double parse_double(std::string_view s, std::size_t line) {
    double v = 0.0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) parse_fail(line, "bad number '" + std::string(s) + "'");
    return v;
}

std::uint32_t parse_index(std::string_view s, std::size_t line) {
    std::uint32_t v = 0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) parse_fail(line, "bad index '" + std::string(s) + "'");
    return v;
}

CbitId parse_cbit(std::string_view s, std::size_t line) {
    if (s.size() < 2 || s[0] != 'c') parse_fail(line, "bad cbit '" + std::string(s) + "'");
    return CbitId{parse_index(s.substr(1), line)};
}

ReadoutError parse_readout(std::string_view s, std::size_t line) {
    if (s.substr(0, 3) != "ro=") parse_fail(line, "expected ro=p00,p11");
    s.remove_prefix(3);
    const auto comma = s.find(',');
    if (comma == std::string_view::npos) parse_fail(line, "expected ro=p00,p11");
    return ReadoutError{parse_double(s.substr(0, comma), line), parse_double(s.substr(comma + 1), line)};
}

// "H 0", "RZ(0.5) 2", "CNOT 0 1"
Gate parse_gate(const std::vector<std::string>& tok, std::size_t line) {
    if (tok.empty()) parse_fail(line, "missing gate");
    std::string_view head = tok[0];
    double angle = 0.0;
    if (const auto open = head.find('('); open != std::string_view::npos) {
        if (head.back() != ')') parse_fail(line, "unterminated angle");
        angle = parse_double(head.substr(open + 1, head.size() - open - 2), line);
        head = head.substr(0, open);
    }
    const auto kind = gate_from_name(head);
    if (!kind) parse_fail(line, "unknown instruction '" + std::string(head) + "'");
    const std::size_t arity = is_two_qubit(*kind) ? 2 : 1;
    if (tok.size() != arity + 1) parse_fail(line, std::string(head) + " expects " + std::to_string(arity) + " qubit(s)");
    if (is_rotation(*kind) == (tok[0].find('(') == std::string::npos)) {
        parse_fail(line, std::string(head) + (is_rotation(*kind) ? " needs an angle" : " takes no angle"));
    }
    Gate g = Gate::single(*kind, QubitId{parse_index(tok[1], line)}, angle);
    if (arity == 2) g.qubits[1] = QubitId{parse_index(tok[2], line)};
    return g;
}

}  // namespace

std::string to_text(const Circuit& circuit) {
    std::ostringstream out;
    out << "QUBITS " << circuit.num_qubits() << "\n";
    out << "CBITS " << circuit.num_cbits() << "\n";
    if (const auto& t = circuit.topology()) {
        out << "TOPOLOGY";
        if (t->num_qubits() != circuit.num_qubits()) out << " n=" << t->num_qubits();
        for (const auto& [a, b] : t->edges()) out << " " << a.index << "-" << b.index;
        out << "\n";
    }
    for (const Instruction& inst : circuit.instructions()) {
        if (const auto* g = std::get_if<Gate>(&inst)) {
            out << gate_text(*g);
        } else if (const auto* m = std::get_if<Measure>(&inst)) {
            out << "MEASURE " << m->qubit.index << " -> c" << m->cbit.index << (m->basis == Basis::X ? " X" : " Z")
                << readout_text(m->readout);
        } else if (const auto* r = std::get_if<Reset>(&inst)) {
            out << "RESET " << r->qubit.index << readout_text(r->readout);
        } else if (const auto* d = std::get_if<Delay>(&inst)) {
            out << "DELAY " << d->qubit.index << " " << fmt(d->duration_ns) << "ns";
        } else if (const auto* c = std::get_if<Conditional>(&inst)) {
            out << "COND " << c->condition.to_string() << " :";
            for (std::size_t i = 0; i < c->gates.size(); ++i) out << (i ? ", " : " ") << gate_text(c->gates[i]);
        } else if (const auto* b = std::get_if<Barrier>(&inst)) {
            out << "BARRIER";
            for (QubitId q : b->qubits) out << " " << q.index;
        } else if (const auto* n = std::get_if<NoiseChannel>(&inst)) {
            out << channel_name(n->kind) << " " << n->qubits[0].index;
            if (n->arity() == 2) out << " " << n->qubits[1].index;
            out << " " << fmt(n->probability);
        }
        out << "\n";
    }
    return out.str();
}

Circuit from_text(std::string_view text) {
    Circuit c;
    bool have_qubits = false;
    bool have_cbits = false;
    std::size_t line_no = 0;
    std::istringstream in{std::string(text)};
    std::string raw;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string_view line = raw;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        auto tok = split_ws(line);
        const std::string& op = tok[0];

        if (op == "QUBITS" || op == "CBITS") {
            if (tok.size() != 2) parse_fail(line_no, op + " expects one count");
            const auto n = parse_index(tok[1], line_no);
            if (op == "QUBITS") {
                c.resize(n, c.num_cbits());
                have_qubits = true;
            } else {
                c.resize(c.num_qubits(), n);
                have_cbits = true;
            }
            continue;
        }
        if (!have_qubits || !have_cbits) parse_fail(line_no, "QUBITS and CBITS must precede instructions");

        if (op == "TOPOLOGY") {
            Topology t(c.num_qubits());
            for (std::size_t i = 1; i < tok.size(); ++i) {
                std::string_view e = tok[i];
                if (e.substr(0, 2) == "n=") {
                    t = Topology(parse_index(e.substr(2), line_no));
                    continue;
                }
                const auto dash = e.find('-');
                if (dash == std::string_view::npos) parse_fail(line_no, "bad edge '" + tok[i] + "'");
                t.add_edge(QubitId{parse_index(e.substr(0, dash), line_no)}, QubitId{parse_index(e.substr(dash + 1), line_no)});
            }
            c.set_topology(std::move(t));
        } else if (op == "MEASURE") {
            if (tok.size() < 5 || tok.size() > 6 || tok[2] != "->") parse_fail(line_no, "expected MEASURE q -> cK Z|X [ro=p00,p11]");
            Measure m{QubitId{parse_index(tok[1], line_no)}, parse_cbit(tok[3], line_no), Basis::Z, {}};
            if (tok[4] == "X") {
                m.basis = Basis::X;
            } else if (tok[4] != "Z") {
                parse_fail(line_no, "measurement basis must be X or Z");
            }
            if (tok.size() == 6) m.readout = parse_readout(tok[5], line_no);
            c.append(m);
        } else if (op == "RESET") {
            if (tok.size() < 2 || tok.size() > 3) parse_fail(line_no, "expected RESET q [ro=p00,p11]");
            Reset r{QubitId{parse_index(tok[1], line_no)}, {}};
            if (tok.size() == 3) r.readout = parse_readout(tok[2], line_no);
            c.append(r);
        } else if (op == "DELAY") {
            if (tok.size() != 3 || tok[2].size() < 3 || tok[2].substr(tok[2].size() - 2) != "ns") {
                parse_fail(line_no, "expected DELAY q <t>ns");
            }
            c.delay(QubitId{parse_index(tok[1], line_no)}, parse_double(std::string_view(tok[2]).substr(0, tok[2].size() - 2), line_no));
        } else if (op == "COND") {
            const auto colon = line.find(':');
            if (colon == std::string_view::npos) parse_fail(line_no, "COND needs ':'");
            const auto expr_text = trim(line.substr(4, colon - 4));
            CondExpr cond = CondExpr::constant(false);
            try {
                cond = CondExpr::parse(expr_text);
            } catch (const Error& e) {
                parse_fail(line_no, e.what());
            }
            std::vector<Gate> gates;
            std::string_view rest = line.substr(colon + 1);
            while (!trim(rest).empty()) {
                const auto comma = rest.find(',');
                gates.push_back(parse_gate(split_ws(rest.substr(0, comma)), line_no));
                if (comma == std::string_view::npos) break;
                rest = rest.substr(comma + 1);
            }
            if (gates.empty()) parse_fail(line_no, "COND without gates");
            c.conditional(std::move(cond), std::move(gates));
        } else if (op == "BARRIER") {
            std::vector<QubitId> qs;
            for (std::size_t i = 1; i < tok.size(); ++i) qs.push_back(QubitId{parse_index(tok[i], line_no)});
            c.barrier(std::move(qs));
        } else if (auto kind = channel_from_name(op)) {
            NoiseChannel n{*kind, {}, 0.0};
            const std::size_t arity = n.arity();
            if (tok.size() != arity + 2) parse_fail(line_no, op + " expects " + std::to_string(arity) + " qubit(s) and a probability");
            n.qubits[0] = QubitId{parse_index(tok[1], line_no)};
            n.qubits[1] = arity == 2 ? QubitId{parse_index(tok[2], line_no)} : n.qubits[0];
            n.probability = parse_double(tok[arity + 1], line_no);
            c.append(n);
        } else {
            c.append(parse_gate(tok, line_no));
        }
    }
    if (!have_qubits || !have_cbits) throw Error(ErrorCode::Parse, "missing QUBITS/CBITS header");
    return c;
}

namespace {

nlohmann::json gate_json(const Gate& g) {
    nlohmann::json j{{"name", gate_name(g.kind)}};
    j["qubits"] = g.arity() == 2 ? nlohmann::json::array({g.qubits[0].index, g.qubits[1].index})
                                 : nlohmann::json::array({g.qubits[0].index});
    if (is_rotation(g.kind)) j["angle"] = g.angle;
    return j;
}

Gate gate_from(const nlohmann::json& j) {
    const auto name = j.at("name").get<std::string>();
    const auto kind = gate_from_name(name);
    if (!kind) throw Error(ErrorCode::Parse, "unknown gate '" + name + "'");
    const auto& qs = j.at("qubits");
    if (qs.size() != (is_two_qubit(*kind) ? 2U : 1U)) throw Error(ErrorCode::Parse, "wrong qubit count for " + name);
    Gate g = Gate::single(*kind, QubitId{qs[0].get<std::uint32_t>()}, j.value("angle", 0.0));
    if (qs.size() == 2) g.qubits[1] = QubitId{qs[1].get<std::uint32_t>()};
    return g;
}

void put_readout(nlohmann::json& j, const std::optional<ReadoutError>& ro) {
    if (ro) j["readout"] = {ro->p00, ro->p11};
}

std::optional<ReadoutError> get_readout(const nlohmann::json& j) {
    if (!j.contains("readout")) return std::nullopt;
    const auto& r = j.at("readout");
    return ReadoutError{r.at(0).get<double>(), r.at(1).get<double>()};
}

}  // namespace

nlohmann::json to_json(const Circuit& circuit) {
    nlohmann::json j;
    j["num_qubits"] = circuit.num_qubits();
    j["num_cbits"] = circuit.num_cbits();
    if (const auto& t = circuit.topology()) {
        nlohmann::json edges = nlohmann::json::array();
        for (const auto& [a, b] : t->edges()) edges.push_back({a.index, b.index});
        j["topology"] = {{"num_qubits", t->num_qubits()}, {"edges", edges}};
    }
    nlohmann::json list = nlohmann::json::array();
    for (const Instruction& inst : circuit.instructions()) {
        nlohmann::json e;
        if (const auto* g = std::get_if<Gate>(&inst)) {
            e = gate_json(*g);
            e["op"] = "gate";
        } else if (const auto* m = std::get_if<Measure>(&inst)) {
            e = {{"op", "measure"}, {"qubit", m->qubit.index}, {"cbit", m->cbit.index}, {"basis", m->basis == Basis::X ? "X" : "Z"}};
            put_readout(e, m->readout);
        } else if (const auto* r = std::get_if<Reset>(&inst)) {
            e = {{"op", "reset"}, {"qubit", r->qubit.index}};
            put_readout(e, r->readout);
        } else if (const auto* d = std::get_if<Delay>(&inst)) {
            e = {{"op", "delay"}, {"qubit", d->qubit.index}, {"duration_ns", d->duration_ns}};
        } else if (const auto* c = std::get_if<Conditional>(&inst)) {
            nlohmann::json gates = nlohmann::json::array();
            for (const Gate& g : c->gates) gates.push_back(gate_json(g));
            e = {{"op", "cond"}, {"condition", c->condition.to_string()}, {"gates", gates}};
        } else if (const auto* b = std::get_if<Barrier>(&inst)) {
            nlohmann::json qs = nlohmann::json::array();
            for (QubitId q : b->qubits) qs.push_back(q.index);
            e = {{"op", "barrier"}, {"qubits", qs}};
        } else if (const auto* n = std::get_if<NoiseChannel>(&inst)) {
            nlohmann::json qs = n->arity() == 2 ? nlohmann::json::array({n->qubits[0].index, n->qubits[1].index})
                                                : nlohmann::json::array({n->qubits[0].index});
            e = {{"op", "channel"}, {"kind", channel_name(n->kind)}, {"qubits", qs}, {"probability", n->probability}};
        }
        list.push_back(std::move(e));
    }
    j["instructions"] = std::move(list);
    return j;
}

Circuit circuit_from_json(const nlohmann::json& j) {
    try {
        Circuit c(j.at("num_qubits").get<std::uint32_t>(), j.at("num_cbits").get<std::uint32_t>());
        if (j.contains("topology")) {
            const auto& t = j.at("topology");
            Topology topo(t.at("num_qubits").get<std::uint32_t>());
            for (const auto& e : t.at("edges")) topo.add_edge(QubitId{e.at(0).get<std::uint32_t>()}, QubitId{e.at(1).get<std::uint32_t>()});
            c.set_topology(std::move(topo));
        }
        for (const auto& e : j.at("instructions")) {
            const auto op = e.at("op").get<std::string>();
            if (op == "gate") {
                c.append(gate_from(e));
            } else if (op == "measure") {
                const auto basis = e.value("basis", std::string("Z"));
                if (basis != "X" && basis != "Z") throw Error(ErrorCode::Parse, "bad basis '" + basis + "'");
                c.append(Measure{QubitId{e.at("qubit").get<std::uint32_t>()}, CbitId{e.at("cbit").get<std::uint32_t>()},
                                 basis == "X" ? Basis::X : Basis::Z, get_readout(e)});
            } else if (op == "reset") {
                c.append(Reset{QubitId{e.at("qubit").get<std::uint32_t>()}, get_readout(e)});
            } else if (op == "delay") {
                c.delay(QubitId{e.at("qubit").get<std::uint32_t>()}, e.at("duration_ns").get<double>());
            } else if (op == "cond") {
                std::vector<Gate> gates;
                for (const auto& g : e.at("gates")) gates.push_back(gate_from(g));
                c.conditional(CondExpr::parse(e.at("condition").get<std::string>()), std::move(gates));
            } else if (op == "barrier") {
                std::vector<QubitId> qs;
                for (const auto& q : e.at("qubits")) qs.push_back(QubitId{q.get<std::uint32_t>()});
                c.barrier(std::move(qs));
            } else if (op == "channel") {
                const auto name = e.at("kind").get<std::string>();
                const auto kind = channel_from_name(name);
                if (!kind) throw Error(ErrorCode::Parse, "unknown channel '" + name + "'");
                NoiseChannel n{*kind, {}, e.at("probability").get<double>()};
                const auto& qs = e.at("qubits");
                if (qs.size() != n.arity()) throw Error(ErrorCode::Parse, "wrong qubit count for " + name);
                n.qubits[0] = QubitId{qs[0].get<std::uint32_t>()};
                n.qubits[1] = qs.size() == 2 ? QubitId{qs[1].get<std::uint32_t>()} : n.qubits[0];
                c.append(n);
            } else {
                throw Error(ErrorCode::Parse, "unknown op '" + op + "'");
            }
        }
        return c;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::Parse, std::string("circuit json: ") + e.what());
    }
}

}  // namespace adaptq
