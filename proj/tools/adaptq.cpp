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

// adaptq: batch runner for adaptive-circuit experiments.

#include <iostream>
#include <map>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "adaptq/error.hpp"
#include "adaptq/experiment.hpp"
#include "adaptq/serialize.hpp"

namespace {

using adaptq::BellMode;
using adaptq::ExperimentConfig;
using adaptq::Placement;

void add_protocol_options(CLI::App* cmd, ExperimentConfig& cfg, std::string& placement, std::string& bell_mode,
                          bool& no_reuse) {
    cmd->add_option("--protocol", cfg.protocol, "ghz | tele_cnot | fanout | teleport | swap")->required();
    cmd->add_option("--n", cfg.n, "GHZ size, fan-out targets, or chain length (0: protocol default)");
    cmd->add_option("--input", cfg.input, "input state: teleport zero|one|plus|minus|plus_i, swap/tele_cnot/fanout bits");
    cmd->add_option("--placement", placement, "auto | line | ring8")
        ->check(CLI::IsMember({"auto", "line", "ring8"}));
    cmd->add_option("--bell-mode", bell_mode, "unitary | adaptive (tele_cnot)")->check(CLI::IsMember({"unitary", "adaptive"}));
    cmd->add_flag("--no-reuse", no_reuse, "fan-out with fresh preparation ancillae instead of active reset");
}

void apply_protocol_options(ExperimentConfig& cfg, const std::string& placement, const std::string& bell_mode, bool no_reuse) {
    static const std::map<std::string, Placement> placements{
        {"auto", Placement::Auto}, {"line", Placement::Line}, {"ring8", Placement::Ring8}};
    cfg.placement = placements.at(placement);
    cfg.bell_mode = bell_mode == "adaptive" ? BellMode::Adaptive : BellMode::Unitary;
    cfg.reuse_reset = !no_reuse;
}

int fail(const std::string& code, const std::string& message) {
    std::cerr << "error: " << code << ": " << message << "\n";
    return 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Simulator and experiment runner for adaptive quantum circuits"};
    app.require_subcommand(1);
    app.set_version_flag("--version", adaptq::kToolVersion);

    ExperimentConfig cfg;
    std::string placement = "auto";
    std::string bell_mode = "unitary";
    bool no_reuse = false;
    std::string engine = "trajectory";

    auto* run = app.add_subcommand("run", "Run one protocol and write results plus a manifest");
    add_protocol_options(run, cfg, placement, bell_mode, no_reuse);
    run->add_option("--engine", engine, "trajectory | density | stabilizer | enumerate")
        ->check(CLI::IsMember({"trajectory", "density", "stabilizer", "enumerate"}));
    run->add_option("--noise", cfg.noise, "calibration file, or none");
    run->add_option("--shots", cfg.shots, "shots (ignored by exact engines)");
    run->add_option("--seed", cfg.seed, "RNG seed");
    run->add_flag("--dd", cfg.dd_active, "dynamical decoupling on idle qubits");
    run->add_option("--out", cfg.output_dir, "output directory");

    adaptq::SuiteOptions suite;
    std::string suite_device;
    auto* reproduce = app.add_subcommand("reproduce-paper", "Noiseless and noisy runs of every experiment with a summary table");
    reproduce->add_option("--out", suite.output_dir, "output directory");
    reproduce->add_option("--device", suite_device, "calibration file (default: packaged device)");
    reproduce->add_option("--shots", suite.shots, "shots per circuit (0: exact)");
    reproduce->add_option("--seed", suite.seed, "RNG seed");

    ExperimentConfig emit_cfg;
    std::string emit_placement = "line";
    std::string emit_bell = "unitary";
    bool emit_no_reuse = false;
    std::string format = "text";
    bool emit_rule = false;
    std::string emit_out;
    auto* emit = app.add_subcommand("emit-circuit", "Print a protocol circuit (or its correction rule)");
    add_protocol_options(emit, emit_cfg, emit_placement, emit_bell, emit_no_reuse);
    emit->add_option("--format", format, "text | json")->check(CLI::IsMember({"text", "json"}));
    emit->add_flag("--rule", emit_rule, "print the correction rule as JSON instead");
    emit->add_option("--out", emit_out, "write to a file instead of stdout");

    std::string device_file;
    auto* validate = app.add_subcommand("validate-device", "Check a calibration file and list warnings");
    validate->add_option("device", device_file, "calibration file (default: packaged device)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        return fail("usage", e.what());
    }

    try {
        if (*run) {
            apply_protocol_options(cfg, placement, bell_mode, no_reuse);
            cfg.engine = adaptq::engine_from_string(engine);
            const auto manifest = adaptq::run(cfg);
            std::cout << manifest.json["summary"].value("summary_line", std::string("done")) << "\n";
            std::cout << "manifest: " << (cfg.output_dir / "manifest.json").string() << "\n";
        } else if (*reproduce) {
            if (!suite_device.empty()) suite.device = adaptq::resolve_device_path(suite_device);
            const auto manifest = adaptq::reproduce_paper_suite(suite);
            std::cout << "experiment,metric,paper,noiseless,simulated\n";
            for (const auto& row : manifest.json["summary"]["rows"]) {
                std::cout << row["experiment"].get<std::string>() << "," << row["metric"].get<std::string>() << ","
                          << row["paper"].get<std::string>() << "," << row["noiseless"].get<double>() << ","
                          << row["simulated"].get<double>() << "\n";
            }
            std::cout << "manifest: " << (suite.output_dir / "manifest.json").string() << "\n";
        } else if (*emit) {
            apply_protocol_options(emit_cfg, emit_placement, emit_bell, emit_no_reuse);
            std::optional<adaptq::Device> device;
            if (emit_cfg.placement == Placement::Ring8) device = adaptq::load_device(adaptq::default_device_path());
            const auto protocol = adaptq::build_protocol(emit_cfg, device ? &device->topology : nullptr);
            std::string text;
            if (emit_rule) {
                text = protocol.rule.to_json().dump(2) + "\n";
            } else if (format == "json") {
                text = adaptq::to_json(protocol.circuit).dump(2) + "\n";
            } else {
                text = adaptq::to_text(protocol.circuit);
            }
            if (emit_out.empty()) {
                std::cout << text;
            } else {
                adaptq::write_atomic(emit_out, text);
            }
        } else if (*validate) {
            const auto path = device_file.empty() ? adaptq::default_device_path() : adaptq::resolve_device_path(device_file);
            const auto device = adaptq::load_device(path);
            for (const auto& w : device.noise.warnings()) std::cout << "warning: " << w << "\n";
            std::cout << "ok: " << path.string() << " (" << device.topology.num_qubits() << " qubits, "
                      << device.noise.crosstalk.pairs.size() << " crosstalk pairs)\n";
        }
    } catch (const adaptq::Error& e) {
        return fail(std::string(adaptq::to_string(e.code())), e.what());
    } catch (const std::exception& e) {
        return fail("internal", e.what());
    }
    return 0;
}
