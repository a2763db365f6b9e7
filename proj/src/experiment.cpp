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

#include "adaptq/experiment.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "adaptq/engines.hpp"
#include "adaptq/error.hpp"
#include "adaptq/metrology.hpp"
#include "adaptq/serialize.hpp"

namespace adaptq {

namespace fs = std::filesystem;

std::string_view to_string(EngineKind engine) {
    switch (engine) {
        case EngineKind::Trajectory: return "trajectory";
        case EngineKind::Density: return "density";
        case EngineKind::Stabilizer: return "stabilizer";
        case EngineKind::Enumerate: return "enumerate";
    }
    return "?";
}

EngineKind engine_from_string(std::string_view name) {
    for (EngineKind e : {EngineKind::Trajectory, EngineKind::Density, EngineKind::Stabilizer, EngineKind::Enumerate}) {
        if (to_string(e) == name) return e;
    }
    throw Error(ErrorCode::InvalidArgument, "unknown engine '" + std::string(name) + "'");
}

namespace {

const std::vector<std::string> kProtocols{"ghz", "tele_cnot", "fanout", "teleport", "swap"};

std::string_view placement_name(Placement p) {
    switch (p) {
        case Placement::Auto: return "auto";
        case Placement::Line: return "line";
        case Placement::Ring8: return "ring8";
    }
    return "?";
}

std::vector<Gate> teleport_prep(const std::string& input, QubitId q) {
    const Gate h = Gate::single(GateKind::H, q);
    const Gate x = Gate::single(GateKind::X, q);
    if (input.empty() || input == "zero" || input == "0") return {};
    if (input == "one" || input == "1") return {x};
    if (input == "plus" || input == "+") return {h};
    if (input == "minus" || input == "-") return {x, h};
    if (input == "plus_i" || input == "+i") return {h, Gate::single(GateKind::S, q)};
    throw Error(ErrorCode::InvalidArgument, "teleport input must be zero, one, plus, minus or plus_i");
}

std::vector<Gate> basis_prep(const std::string& bits, std::span<const QubitId> inputs) {
    if (bits.empty()) return {};
    if (bits.size() != inputs.size() || bits.find_first_not_of("01") != std::string::npos) {
        throw Error(ErrorCode::InvalidArgument, "input must be " + std::to_string(inputs.size()) + " bits");
    }
    std::vector<Gate> out;
    for (std::size_t k = 0; k < bits.size(); ++k) {
        if (bits[k] == '1') out.push_back(Gate::single(GateKind::X, inputs[k]));
    }
    return out;
}

std::vector<QubitId> chain_of(std::uint32_t n, std::uint32_t first) {
    std::vector<QubitId> c;
    for (std::uint32_t i = 0; i < n; ++i) c.push_back(QubitId{first + i});
    return c;
}

std::string fixed(double v, int digits = 6) {
    std::ostringstream s;
    s << std::setprecision(digits) << v;
    std::string out = s.str();
    if (out.find_first_of(".en") == std::string::npos) out += ".0";
    return out;
}

std::string timestamp_utc() {
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::ostringstream s;
    s << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return s.str();
}

}  // namespace

void ExperimentConfig::validate() const {
    if (std::find(kProtocols.begin(), kProtocols.end(), protocol) == kProtocols.end()) {
        throw Error(ErrorCode::InvalidArgument, "unknown protocol '" + protocol + "'");
    }
    const std::uint32_t k = size();
    if ((protocol == "teleport" || protocol == "swap") && (k < 2 || k % 2 != 0)) {
        throw Error(ErrorCode::InvalidArgument, protocol + " needs an even chain length >= 2, got " + std::to_string(k));
    }
    if (protocol == "ghz" && k < 2) throw Error(ErrorCode::InvalidArgument, "ghz needs n >= 2");
    if (noise != "none") {
        const fs::path p = resolve_device_path(noise);
        if (!fs::exists(p)) throw Error(ErrorCode::Io, "calibration file not found: " + noise);
    }
    if (engine == EngineKind::Trajectory && shots == 0) {
        throw Error(ErrorCode::InvalidArgument, "the trajectory engine needs shots >= 1");
    }
    if (engine == EngineKind::Enumerate && noise != "none") {
        throw Error(ErrorCode::InvalidArgument, "branch enumeration is noiseless; use the density or trajectory engine");
    }
    if (output_dir.empty()) throw Error(ErrorCode::InvalidArgument, "output directory is empty");
}

nlohmann::json ExperimentConfig::to_json() const {
    return nlohmann::json{{"protocol", protocol},
                          {"n", size()},
                          {"input", input},
                          {"placement", placement_name(placement)},
                          {"bell_mode", bell_mode == BellMode::Unitary ? "unitary" : "adaptive"},
                          {"reuse_reset", reuse_reset},
                          {"engine", to_string(engine)},
                          {"noise", noise},
                          {"shots", shots},
                          {"seed", seed},
                          {"dd_active", dd_active},
                          {"output_dir", output_dir.string()}};
}

fs::path resolve_device_path(const std::string& name) {
    const fs::path p(name);
    if (fs::exists(p)) return p;
    if (!p.has_parent_path()) {
        const fs::path sibling = default_device_path().parent_path() / p;
        if (fs::exists(sibling)) return sibling;
    }
    return p;
}

std::uint32_t ExperimentConfig::size() const {
    if (n != 0) return n;
    if (protocol == "ghz" || protocol == "fanout") return 2;
    return 4;
}

Protocol build_protocol(const ExperimentConfig& cfg, const Topology* topology) {
    const bool ring = cfg.placement == Placement::Ring8 || (cfg.placement == Placement::Auto && topology);
    if (ring && !topology) throw Error(ErrorCode::InvalidArgument, "the ring placement needs a device topology");
    const Topology* topo = ring ? topology : nullptr;
    Protocol p;
    if (cfg.protocol == "ghz") {
        if (!cfg.input.empty()) throw Error(ErrorCode::InvalidArgument, "ghz takes no input");
        p = build_ghz_adaptive(ring ? GHZPlan::ring8(cfg.size()) : GHZPlan::line(cfg.size()), topo);
    } else if (cfg.protocol == "tele_cnot") {
        TeleCnotLayout L;
        if (ring) {
            L = cfg.bell_mode == BellMode::Unitary ? TeleCnotLayout::ring8_q1_q4() : TeleCnotLayout::ring8_q0_q4();
        } else {
            L = cfg.bell_mode == BellMode::Unitary ? TeleCnotLayout::line_unitary() : TeleCnotLayout::line_adaptive();
        }
        p = build_tele_cnot(L, topo);
        p = with_input_prep(p, basis_prep(cfg.input, p.inputs));
    } else if (cfg.protocol == "fanout") {
        if (ring && !cfg.reuse_reset) throw Error(ErrorCode::InvalidArgument, "the ring placement needs reuse_reset");
        p = build_fanout(FanoutLayout::line(cfg.size(), cfg.reuse_reset), topo);
        p = with_input_prep(p, basis_prep(cfg.input, p.inputs));
    } else if (cfg.protocol == "teleport") {
        const auto chain = chain_of(cfg.size(), 1);
        p = build_teleport(QubitId{0}, chain, topo);
        p = with_input_prep(p, teleport_prep(cfg.input, QubitId{0}));
    } else if (cfg.protocol == "swap") {
        const auto chain = chain_of(cfg.size(), 1);
        p = build_entanglement_swap(chain, cfg.input.empty() ? "00" : cfg.input, topo);
    } else {
        throw Error(ErrorCode::InvalidArgument, "unknown protocol '" + cfg.protocol + "'");
    }
    return p;
}

void write_atomic(const fs::path& path, const std::string& content) {
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(ErrorCode::Io, "cannot write " + tmp.string());
        out << content;
        if (!out) throw Error(ErrorCode::Io, "write failed for " + tmp.string());
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) throw Error(ErrorCode::Io, "cannot move " + tmp.string() + " into place: " + ec.message());
}

namespace {

// Ideal-output check of every noiseless branch; returns (branches, min fidelity, target label).
struct BranchSummary {
    std::size_t branches = 0;
    double min_fidelity = 1.0;
    std::string target;
};

BranchSummary branch_summary(const ExperimentConfig& cfg, const Protocol& p) {
    BranchSummary s;
    std::vector<BranchCheck> checks;
    if (cfg.protocol == "ghz") {
        s.target = "GHZ_" + std::to_string(p.outputs.size());
        checks = check_state_protocol(p, ghz_state(static_cast<std::uint32_t>(p.outputs.size())));
    } else if (cfg.protocol == "swap") {
        const std::string bits = cfg.input.empty() ? "00" : cfg.input;
        s.target = bell_state_name(bits);
        checks = check_state_protocol(p, bell_state(bits));
    } else if (cfg.protocol == "teleport") {
        s.target = cfg.input.empty() ? "zero" : cfg.input;
        PureState psi(1);
        for (const Gate& g : teleport_prep(cfg.input, QubitId{0})) psi.apply(g);
        checks = check_state_protocol(p, psi);
    } else {
        // Process check on the unprepared protocol.
        const Protocol q = cfg.protocol == "fanout" ? build_fanout(FanoutLayout::line(cfg.size(), cfg.reuse_reset))
                                                    : build_tele_cnot(cfg.bell_mode == BellMode::Unitary
                                                                          ? TeleCnotLayout::line_unitary()
                                                                          : TeleCnotLayout::line_adaptive());
        Circuit ideal = cfg.protocol == "fanout" ? ideal_fanout(cfg.size()) : Circuit(2, 0);
        if (cfg.protocol == "tele_cnot") ideal.cnot(QubitId{0}, QubitId{1});
        s.target = cfg.protocol == "fanout" ? "CX^" + std::to_string(cfg.size()) : "CNOT";
        checks = check_process_protocol(q, ideal);
    }
    s.branches = checks.size();
    s.min_fidelity = min_fidelity(checks);
    return s;
}

}  // namespace

RunManifest run(const ExperimentConfig& cfg) {
    if (!cfg.output_dir.empty()) fs::remove(cfg.output_dir / "manifest.json");
    cfg.validate();
    const auto t0 = std::chrono::steady_clock::now();
    const std::string started = timestamp_utc();
    fs::create_directories(cfg.output_dir);
    const fs::path manifest_path = cfg.output_dir / "manifest.json";
    fs::remove(manifest_path);

    std::optional<Device> device;
    if (cfg.noise != "none") device = load_device(resolve_device_path(cfg.noise));
    const NoiseModel* noise = nullptr;
    NoiseModel model;
    if (device) {
        model = device->noise.with_dd(cfg.dd_active);
        noise = &model;
    }
    const Protocol protocol = build_protocol(cfg, device ? &device->topology : nullptr);

    Circuit measured = protocol.circuit;
    std::vector<QubitId> all;
    for (std::uint32_t q = 0; q < measured.num_qubits(); ++q) all.push_back(QubitId{q});
    measured.barrier(std::move(all));
    std::vector<CbitId> out_bits;
    for (QubitId q : protocol.outputs) {
        out_bits.push_back(measured.add_cbit());
        measured.measure(q, out_bits.back());
    }

    nlohmann::json summary{{"schema_version", kSchemaVersion},
                           {"protocol", cfg.protocol},
                           {"engine", to_string(cfg.engine)},
                           {"num_qubits", protocol.circuit.num_qubits()},
                           {"num_cbits", protocol.circuit.num_cbits()},
                           {"depth", depth(protocol.circuit)},
                           {"mid_circuit_measurements", protocol.circuit.count_measurements()},
                           {"conditionals", count_conditionals(protocol.circuit)},
                           {"correction_rule", protocol.rule.to_json()}};

    Distribution full;
    switch (cfg.engine) {
        case EngineKind::Enumerate: {
            full = to_distribution(measured.num_cbits(), enumerate_branches(measured));
            const BranchSummary b = branch_summary(cfg, protocol);
            summary["branches"] = b.branches;
            summary["min_branch_fidelity"] = b.min_fidelity;
            summary["target"] = b.target;
            summary["summary_line"] = "target=" + b.target + ", min branch fidelity=" + fixed(b.min_fidelity);
            break;
        }
        case EngineKind::Density:
            full = exact_distribution(noise ? decorate(measured, *noise) : measured);
            break;
        case EngineKind::Trajectory:
            full = run_trajectories(measured, noise, TrajectoryOptions{cfg.shots, cfg.seed, 0});
            break;
        case EngineKind::Stabilizer:
            full = sample_stabilizer(noise ? decorate(measured, *noise) : measured, std::max<std::uint64_t>(cfg.shots, 1),
                                     cfg.seed);
            break;
    }
    const Distribution outputs = full.marginal(out_bits);
    summary["exact"] = !outputs.is_sampled();
    summary["shots"] = outputs.shots();
    if (measured.num_qubits() <= kMaxPureQubits) {
        const Distribution ideal = exact_distribution(measured).marginal(out_bits);
        summary["output_success"] = 1.0 - tvd(outputs, ideal);
    }
    if (!summary.contains("summary_line") && summary.contains("output_success")) {
        summary["summary_line"] = "protocol=" + cfg.protocol + ", 1-TVD to ideal outputs=" + fixed(summary["output_success"].get<double>());
    }

    const std::vector<std::pair<std::string, std::string>> artifacts{
        {"distribution.csv", outputs.to_csv()},
        {"distribution.json", outputs.to_json().dump(2) + "\n"},
        {"register.csv", full.to_csv()},
        {"summary.json", summary.dump(2) + "\n"},
        {"circuit.txt", to_text(protocol.circuit)},
    };
    RunManifest m;
    nlohmann::json files = nlohmann::json::array();
    for (const auto& [name, content] : artifacts) {
        write_atomic(cfg.output_dir / name, content);
        m.files.push_back(cfg.output_dir / name);
        files.push_back(name);
    }
    const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    m.json = nlohmann::json{{"schema_version", kSchemaVersion},
                            {"tool", "adaptq"},
                            {"version", kToolVersion},
                            {"command", "run"},
                            {"config", cfg.to_json()},
                            {"started_at", started},
                            {"finished_at", timestamp_utc()},
                            {"wall_clock_s", elapsed},
                            {"files", files},
                            {"summary", summary}};
    write_atomic(manifest_path, m.json.dump(2) + "\n");
    return m;
}

// ---------------------------------------------------------------------------
// Reference-result suite

namespace {

struct Row {
    std::string experiment;
    std::string metric;
    std::string paper;
    double noiseless = 0.0;
    double simulated = 0.0;
};

struct SuiteRunner {
    const SuiteOptions& opt;
    const Device& device;
    std::vector<Row> rows;
    std::vector<std::pair<std::string, std::string>> artifacts;
    std::uint64_t stream = 0;

    double tolerance() const { return opt.shots == 0 ? 1e-9 : 6.0 / std::sqrt(static_cast<double>(opt.shots)); }

    void expect_ideal(const std::string& name, double value, double ideal = 1.0) const {
        if (std::abs(value - ideal) > tolerance()) {
            throw Error(ErrorCode::InvalidArgument, "noiseless check failed for " + name + ": got " + fixed(value, 12) +
                                                        ", expected " + fixed(ideal));
        }
    }

    std::uint64_t next_seed() { return derive_seed(opt.seed, stream++); }

    void ghz() {
        const char* paper[] = {"0.92(1)", "0.67(2)", "0.32(3)"};
        for (std::uint32_t n = 2; n <= 4; ++n) {
            const Protocol p = build_ghz_adaptive(GHZPlan::ring8(n), &device.topology);
            const GhzEstimate ideal = estimate_ghz_fidelity(p, nullptr, opt.shots, next_seed());
            expect_ideal("ghz n=" + std::to_string(n), ideal.fidelity.value);
            const GhzEstimate noisy = estimate_ghz_fidelity(p, &device.noise, opt.shots, next_seed());
            rows.push_back({"ghz_n" + std::to_string(n), "F_GHZ", paper[n - 2], ideal.fidelity.value, noisy.fidelity.value});
            artifacts.emplace_back("ghz_n" + std::to_string(n) + "_parity.csv", noisy.parity.to_csv());
        }
    }

    void tele_cnot() {
        Circuit cnot(2, 0);
        cnot.cnot(QubitId{0}, QubitId{1});
        const TruthTable ideal = TruthTable::from_permutation(cnot);
        const std::pair<const char*, TeleCnotLayout> cases[] = {{"tele_cnot_q1_q4", TeleCnotLayout::ring8_q1_q4()},
                                                                 {"tele_cnot_q0_q4", TeleCnotLayout::ring8_q0_q4()}};
        const char* paper[] = {"0.90(1)", "0.75(1)"};
        for (int k = 0; k < 2; ++k) {
            const Protocol p = build_tele_cnot(cases[k].second, &device.topology);
            const double clean = truth_table_fidelity(truth_table(p, nullptr, opt.shots, next_seed()), ideal);
            expect_ideal(cases[k].first, clean);
            const TruthTable noisy = truth_table(p, &device.noise, opt.shots, next_seed());
            rows.push_back({cases[k].first, "F_tt", paper[k], clean, truth_table_fidelity(noisy, ideal)});
            artifacts.emplace_back(std::string(cases[k].first) + "_truth_table.json", noisy.to_json().dump(2) + "\n");
        }
    }

    void fanout() {
        const Protocol p = build_fanout(FanoutLayout::ring8_cxx(), &device.topology);
        const TruthTable ideal = TruthTable::from_permutation(ideal_fanout(2));
        const double clean = truth_table_fidelity(truth_table(p, nullptr, opt.shots, next_seed()), ideal);
        expect_ideal("fanout_cxx", clean);
        const TruthTable noisy = truth_table(p, &device.noise, opt.shots, next_seed());
        rows.push_back({"fanout_cxx", "F_tt", "0.68(2)", clean, truth_table_fidelity(noisy, ideal)});
        artifacts.emplace_back("fanout_cxx_truth_table.json", noisy.to_json().dump(2) + "\n");
    }

    void teleport() {
        const auto chain = ring8_teleport_chain();
        const Protocol p = build_teleport(QubitId{0}, chain, &device.topology);
        const Ptm clean = qpt_single_qubit(p, nullptr, opt.shots, next_seed());
        const double f_clean = process_fidelity_from_ptm(clean, identity_ptm());
        expect_ideal("teleport process", f_clean);
        const Ptm noisy = qpt_single_qubit(p, &device.noise, opt.shots, next_seed());
        rows.push_back({"teleport", "process_fidelity", "0.67(1)", f_clean, process_fidelity_from_ptm(noisy, identity_ptm())});
        artifacts.emplace_back("teleport_ptm.json", ptm_to_json(noisy).dump(2) + "\n");

        const QubitId in{0};
        const std::tuple<const char*, std::vector<Gate>, Distribution, const char*> inputs[] = {
            {"zero", {}, Distribution::exact(1, {{0, 1.0}}), "0.881"},
            {"plus", {Gate::single(GateKind::H, in)}, Distribution::exact(1, {{0, 0.5}, {1, 0.5}}), "0.994"},
            {"one", {Gate::single(GateKind::X, in)}, Distribution::exact(1, {{1, 1.0}}), "0.944"},
        };
        for (const auto& [name, prep, ideal, paper] : inputs) {
            const double clean = output_success(p, prep, ideal, nullptr, opt.shots, next_seed());
            expect_ideal(std::string("teleport ") + name, clean);
            rows.push_back({std::string("teleport_") + name, "1-TVD", paper, clean,
                            output_success(p, prep, ideal, &device.noise, opt.shots, next_seed())});
        }
    }

    void swap() {
        const std::tuple<const char*, int, const char*> cases[] = {{"00", 1, "0.57(1)"}, {"10", -1, "0.55(1)"}};
        for (const auto& [bits, sign, paper] : cases) {
            const Protocol p = build_entanglement_swap(ring8_swap_chain(), bits, &device.topology);
            auto fidelity = [&](const NoiseModel* noise) {
                const GhzEstimate e = estimate_ghz_fidelity(p, noise, opt.shots, next_seed());
                return bell_fidelity_from_parity(e.p_all0, e.p_all1, e.parity.signed_coherence(), sign);
            };
            const double clean = fidelity(nullptr);
            expect_ideal(std::string("swap ") + bits, clean);
            rows.push_back({std::string("swap_") + bits, "F_" + bell_state_name(bits), paper, clean, fidelity(&device.noise)});
        }
    }
};

}  // namespace

RunManifest reproduce_paper_suite(const SuiteOptions& options) {
    const auto t0 = std::chrono::steady_clock::now();
    const std::string started = timestamp_utc();
    fs::create_directories(options.output_dir);
    const fs::path manifest_path = options.output_dir / "manifest.json";
    fs::remove(manifest_path);
    const fs::path device_path = options.device.empty() ? default_device_path() : options.device;
    const Device device = load_device(device_path);

    SuiteRunner r{options, device, {}, {}, 0};
    r.ghz();
    r.tele_cnot();
    r.fanout();
    r.teleport();
    r.swap();

    nlohmann::json table = nlohmann::json::array();
    std::ostringstream csv;
    csv << "experiment,metric,paper,noiseless,simulated\n";
    csv << std::setprecision(6);
    for (const Row& row : r.rows) {
        table.push_back({{"experiment", row.experiment},
                         {"metric", row.metric},
                         {"paper", row.paper},
                         {"noiseless", row.noiseless},
                         {"simulated", row.simulated}});
        csv << row.experiment << "," << row.metric << "," << row.paper << "," << row.noiseless << "," << row.simulated << "\n";
    }
    const nlohmann::json summary{{"schema_version", kSchemaVersion},
                                 {"device", device.name},
                                 {"shots", options.shots},
                                 {"seed", options.seed},
                                 {"rows", table},
                                 {"calibration_warnings", device.noise.warnings()}};
    r.artifacts.emplace_back("summary.json", summary.dump(2) + "\n");
    r.artifacts.emplace_back("summary.csv", csv.str());

    RunManifest m;
    nlohmann::json files = nlohmann::json::array();
    for (const auto& [name, content] : r.artifacts) {
        write_atomic(options.output_dir / name, content);
        m.files.push_back(options.output_dir / name);
        files.push_back(name);
    }
    m.json = nlohmann::json{{"schema_version", kSchemaVersion},
                            {"tool", "adaptq"},
                            {"version", kToolVersion},
                            {"command", "reproduce-paper"},
                            {"config",
                             {{"device", device_path.string()},
                              {"shots", options.shots},
                              {"seed", options.seed},
                              {"output_dir", options.output_dir.string()}}},
                            {"started_at", started},
                            {"finished_at", timestamp_utc()},
                            {"wall_clock_s", std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count()},
                            {"files", files},
                            {"summary", summary}};
    write_atomic(manifest_path, m.json.dump(2) + "\n");
    return m;
}

}  // namespace adaptq
