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

#include <optional>
#include <string>
#include <vector>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "adaptq/circuit.hpp"
#include "adaptq/engines.hpp"
#include "adaptq/error.hpp"
#include "adaptq/experiment.hpp"
#include "adaptq/metrology.hpp"
#include "adaptq/noise.hpp"
#include "adaptq/protocols.hpp"
#include "adaptq/serialize.hpp"

namespace py = pybind11;
using namespace adaptq;

namespace {

std::map<std::string, double> as_dict(const Distribution& d) {
    std::map<std::string, double> out;
    for (const auto& [k, p] : d.probabilities()) out[d.key_string(k)] = p;
    return out;
}

Distribution from_dict(const std::map<std::string, double>& probs) {
    if (probs.empty()) throw Error(ErrorCode::InvalidArgument, "empty distribution");
    const auto bits = static_cast<std::uint32_t>(probs.begin()->first.size());
    Distribution d(bits);
    for (const auto& [s, p] : probs) {
        if (s.size() != bits) throw Error(ErrorCode::InvalidArgument, "bitstrings of different lengths");
        d.add_probability(d.parse_key(s), p);
    }
    return d;
}

std::vector<std::uint32_t> indices(const std::vector<QubitId>& qs) {
    std::vector<std::uint32_t> out;
    for (QubitId q : qs) out.push_back(q.index);
    return out;
}

ExperimentConfig make_config(const std::string& protocol, std::uint32_t n, const std::string& input,
                             const std::string& placement, const std::string& bell_mode, bool reuse_reset) {
    ExperimentConfig cfg;
    cfg.protocol = protocol;
    cfg.n = n;
    cfg.input = input;
    if (placement == "auto") {
        cfg.placement = Placement::Auto;
    } else if (placement == "line") {
        cfg.placement = Placement::Line;
    } else if (placement == "ring8") {
        cfg.placement = Placement::Ring8;
    } else {
        throw Error(ErrorCode::InvalidArgument, "unknown placement: " + placement);
    }
    if (bell_mode != "unitary" && bell_mode != "adaptive") throw Error(ErrorCode::InvalidArgument, "unknown bell mode: " + bell_mode);
    cfg.bell_mode = bell_mode == "adaptive" ? BellMode::Adaptive : BellMode::Unitary;
    cfg.reuse_reset = reuse_reset;
    return cfg;
}

}  // namespace

PYBIND11_MODULE(_adaptq, m) {
    m.doc() = "Adaptive quantum circuit simulation core";
    m.attr("__version__") = std::string(kToolVersion);

    static PyObject* error_type = py::exception<Error>(m, "AdaptqError", PyExc_ValueError).ptr();
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const Error& e) {
            const std::string msg = std::string(to_string(e.code())) + ": " + e.what();
            PyErr_SetString(error_type, msg.c_str());
        }
    });

    py::class_<Circuit>(m, "Circuit")
        .def(py::init<std::uint32_t, std::uint32_t>(), py::arg("num_qubits"), py::arg("num_cbits") = 0)
        .def_static("from_text", [](const std::string& text) { return from_text(text); })
        .def_static("from_json", [](const std::string& text) { return circuit_from_json(nlohmann::json::parse(text)); })
        .def("to_text", [](const Circuit& c) { return to_text(c); })
        .def("to_json", [](const Circuit& c) { return to_json(c).dump(); })
        .def_property_readonly("num_qubits", &Circuit::num_qubits)
        .def_property_readonly("num_cbits", &Circuit::num_cbits)
        .def("__len__", &Circuit::size)
        .def("depth", [](const Circuit& c) { return depth(c); })
        .def("violations",
             [](const Circuit& c) {
                 std::vector<std::string> out;
                 for (const auto& v : validate(c)) out.push_back(v.message);
                 return out;
             })
        .def(
            "gate",
            [](Circuit& c, const std::string& name, std::uint32_t q, double angle) -> Circuit& {
                const auto kind = gate_from_name(name);
                if (!kind) throw Error(ErrorCode::InvalidArgument, "unknown gate: " + name);
                return c.gate(*kind, QubitId{q}, angle);
            },
            py::arg("name"), py::arg("qubit"), py::arg("angle") = 0.0, py::return_value_policy::reference_internal)
        .def("h", [](Circuit& c, std::uint32_t q) -> Circuit& { return c.h(QubitId{q}); }, py::return_value_policy::reference_internal)
        .def("x", [](Circuit& c, std::uint32_t q) -> Circuit& { return c.x(QubitId{q}); }, py::return_value_policy::reference_internal)
        .def("cnot", [](Circuit& c, std::uint32_t a, std::uint32_t b) -> Circuit& { return c.cnot(QubitId{a}, QubitId{b}); },
             py::return_value_policy::reference_internal)
        .def("cz", [](Circuit& c, std::uint32_t a, std::uint32_t b) -> Circuit& { return c.cz(QubitId{a}, QubitId{b}); },
             py::return_value_policy::reference_internal)
        .def(
            "measure",
            [](Circuit& c, std::uint32_t q, std::uint32_t bit, const std::string& basis) -> Circuit& {
                if (basis != "Z" && basis != "X") throw Error(ErrorCode::InvalidArgument, "basis must be Z or X");
                return c.measure(QubitId{q}, CbitId{bit}, basis == "X" ? Basis::X : Basis::Z);
            },
            py::arg("qubit"), py::arg("cbit"), py::arg("basis") = "Z", py::return_value_policy::reference_internal)
        .def("reset", [](Circuit& c, std::uint32_t q) -> Circuit& { return c.reset(QubitId{q}); }, py::return_value_policy::reference_internal)
        .def("delay", [](Circuit& c, std::uint32_t q, double ns) -> Circuit& { return c.delay(QubitId{q}, ns); },
             py::return_value_policy::reference_internal)
        .def(
            "conditional",
            [](Circuit& c, const std::string& condition, const std::string& name, std::uint32_t q) -> Circuit& {
                const auto kind = gate_from_name(name);
                if (!kind) throw Error(ErrorCode::InvalidArgument, "unknown gate: " + name);
                return c.conditional(CondExpr::parse(condition), {Gate::single(*kind, QubitId{q})});
            },
            py::arg("condition"), py::arg("gate"), py::arg("qubit"), py::return_value_policy::reference_internal)
        .def("__repr__", [](const Circuit& c) {
            return "<Circuit qubits=" + std::to_string(c.num_qubits()) + " cbits=" + std::to_string(c.num_cbits()) +
                   " instructions=" + std::to_string(c.size()) + ">";
        });

    py::class_<Protocol>(m, "Protocol")
        .def_readonly("name", &Protocol::name)
        .def_readonly("circuit", &Protocol::circuit)
        .def_property_readonly("inputs", [](const Protocol& p) { return indices(p.inputs); })
        .def_property_readonly("outputs", [](const Protocol& p) { return indices(p.outputs); })
        .def_property_readonly("correction_rule", [](const Protocol& p) { return p.rule.to_json().dump(); })
        .def("__repr__", [](const Protocol& p) { return "<Protocol " + p.name + ">"; });

    m.def(
        "build_protocol",
        [](const std::string& protocol, std::uint32_t n, const std::string& input, const std::string& placement,
           const std::string& bell_mode, bool reuse_reset) {
            const ExperimentConfig cfg = make_config(protocol, n, input, placement, bell_mode, reuse_reset);
            std::optional<Device> device;
            if (cfg.placement == Placement::Ring8) device = load_device(default_device_path());
            return build_protocol(cfg, device ? &device->topology : nullptr);
        },
        py::arg("protocol"), py::arg("n") = 0, py::arg("input") = "", py::arg("placement") = "auto",
        py::arg("bell_mode") = "unitary", py::arg("reuse_reset") = true);

    m.def(
        "enumerate_branches",
        [](const Circuit& c) {
            std::vector<std::pair<std::string, double>> out;
            const Distribution fmt(c.num_cbits());
            for (const auto& b : enumerate_branches(c)) out.emplace_back(fmt.key_string(b.cbits.values), b.probability);
            return out;
        },
        py::arg("circuit"));

    m.def(
        "execute",
        [](const Circuit& c, const std::string& noise, std::uint64_t shots, std::uint64_t seed, bool dd) {
            if (noise == "none") return as_dict(execute(c, nullptr, shots, seed));
            const NoiseModel model = load_device(resolve_device_path(noise)).noise.with_dd(dd);
            return as_dict(execute(c, &model, shots, seed));
        },
        py::arg("circuit"), py::arg("noise") = "none", py::arg("shots") = 0, py::arg("seed") = 0, py::arg("dd") = false,
        py::call_guard<py::gil_scoped_release>());

    m.def(
        "run_json",
        [](const std::string& config_json) {
            const auto j = nlohmann::json::parse(config_json);
            ExperimentConfig cfg = make_config(j.value("protocol", "ghz"), j.value("n", 0U), j.value("input", ""),
                                               j.value("placement", "auto"), j.value("bell_mode", "unitary"),
                                               j.value("reuse_reset", true));
            cfg.engine = engine_from_string(j.value("engine", "trajectory"));
            cfg.noise = j.value("noise", "none");
            cfg.shots = j.value("shots", std::uint64_t{1000});
            cfg.seed = j.value("seed", std::uint64_t{0});
            cfg.dd_active = j.value("dd", false);
            cfg.output_dir = j.value("output_dir", "out");
            py::gil_scoped_release release;
            return run(cfg).json.dump();
        },
        py::arg("config_json"));

    m.def("ghz_fidelity", [](double p0, double p1, double c) { return ghz_fidelity(p0, p1, c).value; }, py::arg("p_all0"),
          py::arg("p_all1"), py::arg("coherence"));
    m.def("ef_from_r", &ef_from_r, py::arg("r"), py::arg("n"));
    m.def("r_from_ef", &r_from_ef, py::arg("ef"), py::arg("n"));
    m.def(
        "tvd", [](const std::map<std::string, double>& p, const std::map<std::string, double>& q) { return tvd(from_dict(p), from_dict(q)); },
        py::arg("p"), py::arg("q"));
    m.def(
        "truth_table_fidelity",
        [](const std::vector<std::vector<double>>& experimental, const std::vector<std::vector<double>>& ideal) {
            auto table = [](const std::vector<std::vector<double>>& rows) {
                TruthTable t;
                std::uint32_t bits = 0;
                while ((std::size_t{1} << bits) < rows.size()) ++bits;
                if ((std::size_t{1} << bits) != rows.size()) throw Error(ErrorCode::DimensionMismatch, "truth table size is not a power of two");
                t.num_bits = bits;
                t.entries = rows;
                return t;
            };
            return truth_table_fidelity(table(experimental), table(ideal));
        },
        py::arg("experimental"), py::arg("ideal"));
    m.def("default_device_path", [] { return default_device_path().string(); });
    m.def("device_warnings", [](const std::string& path) { return load_device(resolve_device_path(path)).noise.warnings(); },
          py::arg("path"));
}
