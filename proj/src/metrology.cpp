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

#include "adaptq/metrology.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

#include <Eigen/Dense>
#include <unsupported/Eigen/NonLinearOptimization>

#include "adaptq/engines.hpp"
#include "adaptq/error.hpp"

namespace adaptq {

namespace {

constexpr double kPi = std::numbers::pi;

// Appends Z measurements of `qubits` into fresh cbits; returns the new bits.
// Readout starts only after every qubit of the preparation has finished.
void sync(Circuit& c) {
    std::vector<QubitId> all;
    for (std::uint32_t q = 0; q < c.num_qubits(); ++q) all.push_back(QubitId{q});
    c.barrier(std::move(all));
}

std::vector<CbitId> measure_all(Circuit& c, std::span<const QubitId> qubits) {
    std::vector<CbitId> bits;
    for (QubitId q : qubits) {
        bits.push_back(c.add_cbit());
        c.measure(q, bits.back());
    }
    return bits;
}

double parity_of(const Distribution& d) {
    double s = 0.0;
    for (const auto& [k, p] : d.probabilities()) s += (std::popcount(k) % 2 ? -p : p);
    return s;
}

double z_expectation(const Distribution& single_bit) { return single_bit.probability(0) - single_bit.probability(1); }

}  // namespace

// ---------------------------------------------------------------------------
// GHZ fidelity and parity oscillations

GhzFidelity ghz_fidelity(double p_all0, double p_all1, double coherence) {
    auto unit = [](double v) { return v >= 0.0 && v <= 1.0; };
    if (!unit(p_all0) || !unit(p_all1) || p_all0 + p_all1 > 1.0 + 1e-9 || !(coherence >= -1.0 && coherence <= 1.0)) {
        throw Error(ErrorCode::InvalidArgument, "populations must lie in [0, 1] with sum <= 1 and |C| <= 1");
    }
    const double f = (p_all0 + p_all1 + coherence) / 2.0;
    return GhzFidelity{f, f > 0.5};
}

std::vector<Gate> analysis_rotation(QubitId q, double phi) {
    // exp(-i pi/4 (cos a X + sin a Y)) = RZ(a) RX(pi/2) RZ(-a), with a = phi - pi/2.
    const double a = phi - kPi / 2.0;
    return {Gate::single(GateKind::RZ, q, -a), Gate::single(GateKind::RX, q, kPi / 2.0), Gate::single(GateKind::RZ, q, a)};
}

std::vector<double> uniform_phases(std::size_t count) {
    std::vector<double> out(count);
    for (std::size_t k = 0; k < count; ++k) out[k] = 2.0 * kPi * static_cast<double>(k) / static_cast<double>(count);
    return out;
}

double ParityCurve::signed_coherence() const { return amplitude * std::cos(phase_offset); }

std::string ParityCurve::to_csv() const {
    std::ostringstream out;
    out.precision(17);
    out << "phase,parity\n";
    for (std::size_t k = 0; k < phases.size(); ++k) out << phases[k] << "," << parities[k] << "\n";
    return out.str();
}

ParityCurve fit_parity(std::span<const double> phases, std::span<const double> parities, std::uint32_t frequency,
                       double max_residual) {
    if (phases.size() != parities.size()) throw Error(ErrorCode::DimensionMismatch, "phase and parity counts differ");
    if (phases.size() < 3) throw Error(ErrorCode::InvalidArgument, "parity fit needs at least 3 points");
    Eigen::MatrixXd a(phases.size(), 2);
    Eigen::VectorXd y(phases.size());
    for (std::size_t k = 0; k < phases.size(); ++k) {
        a(k, 0) = std::cos(frequency * phases[k]);
        a(k, 1) = std::sin(frequency * phases[k]);
        y(k) = parities[k];
    }
    const Eigen::Matrix2d normal = a.transpose() * a;
    if (std::abs(normal.determinant()) < 1e-12) throw Error(ErrorCode::FitFailure, "phase grid does not resolve the oscillation");
    const Eigen::Vector2d coef = normal.ldlt().solve(a.transpose() * y);

    ParityCurve c;
    c.phases.assign(phases.begin(), phases.end());
    c.parities.assign(parities.begin(), parities.end());
    c.frequency = frequency;
    c.amplitude = std::hypot(coef(0), coef(1));
    c.phase_offset = std::atan2(-coef(1), coef(0));
    c.residual = std::sqrt((a * coef - y).squaredNorm() / static_cast<double>(phases.size()));
    c.fit_ok = c.residual <= max_residual;
    return c;
}

ParityCurve parity_oscillation(const Circuit& prep, std::span<const QubitId> data, std::span<const double> phases,
                               const NoiseModel* noise, std::uint64_t shots, std::uint64_t seed, double max_residual) {
    if (phases.size() < 8) throw Error(ErrorCode::InvalidArgument, "parity oscillations need at least 8 phases");
    if (data.empty()) throw Error(ErrorCode::InvalidArgument, "no data qubits");
    std::vector<double> parities;
    for (std::size_t j = 0; j < phases.size(); ++j) {
        Circuit c = prep;
        sync(c);
        for (QubitId q : data) {
            for (const Gate& g : analysis_rotation(q, phases[j])) c.append(g);
        }
        const auto bits = measure_all(c, data);
        const Distribution d = execute(c, noise, shots, derive_seed(seed, j));
        parities.push_back(parity_of(d.marginal(bits)));
    }
    ParityCurve curve = fit_parity(phases, parities, static_cast<std::uint32_t>(data.size()), max_residual);
    curve.shots = shots;
    return curve;
}

std::pair<double, double> extreme_populations(const Circuit& prep, std::span<const QubitId> data, const NoiseModel* noise,
                                              std::uint64_t shots, std::uint64_t seed) {
    Circuit c = prep;
    sync(c);
    const auto bits = measure_all(c, data);
    const Distribution d = execute(c, noise, shots, seed).marginal(bits);
    const std::uint64_t ones = (data.size() >= 64) ? ~std::uint64_t{0} : (std::uint64_t{1} << data.size()) - 1;
    return {d.probability(std::uint64_t{0}), d.probability(ones)};
}

GhzEstimate estimate_ghz_fidelity(const Protocol& prep, const NoiseModel* noise, std::uint64_t shots, std::uint64_t seed,
                                  std::size_t num_phases) {
    const std::size_t n = prep.outputs.size();
    if (num_phases == 0) num_phases = std::max<std::size_t>(16, 4 * n);
    GhzEstimate e;
    std::tie(e.p_all0, e.p_all1) = extreme_populations(prep.circuit, prep.outputs, noise, shots, derive_seed(seed, 0));
    const auto phases = uniform_phases(num_phases);
    e.parity = parity_oscillation(prep.circuit, prep.outputs, phases, noise, shots, derive_seed(seed, 1));
    e.fidelity = ghz_fidelity(e.p_all0, e.p_all1, std::min(1.0, e.parity.amplitude));
    return e;
}

// ---------------------------------------------------------------------------
// Truth tables and distributions

TruthTable TruthTable::identity(std::uint32_t num_bits) {
    TruthTable t;
    t.num_bits = num_bits;
    t.entries.assign(t.dim(), std::vector<double>(t.dim(), 0.0));
    for (std::uint64_t i = 0; i < t.dim(); ++i) t.entries[i][i] = 1.0;
    return t;
}

TruthTable TruthTable::from_permutation(const Circuit& reversible) {
    TruthTable t;
    t.num_bits = reversible.num_qubits();
    t.entries.assign(t.dim(), std::vector<double>(t.dim(), 0.0));
    for (std::uint64_t in = 0; in < t.dim(); ++in) {
        std::uint64_t s = in;
        for (const Instruction& inst : reversible.instructions()) {
            const auto* g = std::get_if<Gate>(&inst);
            if (!g || (g->kind != GateKind::X && g->kind != GateKind::CNOT && g->kind != GateKind::I)) {
                throw Error(ErrorCode::InvalidArgument, "permutation circuits take only X and CNOT gates");
            }
            if (g->kind == GateKind::X) s ^= std::uint64_t{1} << g->qubits[0].index;
            if (g->kind == GateKind::CNOT && ((s >> g->qubits[0].index) & 1U)) s ^= std::uint64_t{1} << g->qubits[1].index;
        }
        t.entries[s][in] = 1.0;
    }
    return t;
}

nlohmann::json TruthTable::to_json() const {
    return nlohmann::json{{"num_bits", num_bits}, {"entries", entries}};
}

Distribution output_distribution(const Protocol& protocol, std::span<const Gate> input_prep, const NoiseModel* noise,
                                 std::uint64_t shots, std::uint64_t seed) {
    Protocol p = with_input_prep(protocol, input_prep);
    sync(p.circuit);
    const auto bits = measure_all(p.circuit, p.outputs);
    return execute(p.circuit, noise, shots, seed).marginal(bits);
}

double output_success(const Protocol& protocol, std::span<const Gate> input_prep, const Distribution& ideal,
                      const NoiseModel* noise, std::uint64_t shots, std::uint64_t seed) {
    return 1.0 - tvd(output_distribution(protocol, input_prep, noise, shots, seed), ideal);
}

TruthTable truth_table(const Protocol& protocol, const NoiseModel* noise, std::uint64_t shots, std::uint64_t seed) {
    const auto n = static_cast<std::uint32_t>(protocol.inputs.size());
    if (protocol.outputs.size() != n) throw Error(ErrorCode::DimensionMismatch, "truth tables need as many outputs as inputs");
    TruthTable t;
    t.num_bits = n;
    t.entries.assign(t.dim(), std::vector<double>(t.dim(), 0.0));
    for (std::uint64_t in = 0; in < t.dim(); ++in) {
        std::vector<Gate> prep;
        for (std::uint32_t k = 0; k < n; ++k) {
            if ((in >> k) & 1U) prep.push_back(Gate::single(GateKind::X, protocol.inputs[k]));
        }
        const Distribution d = output_distribution(protocol, prep, noise, shots, derive_seed(seed, in));
        for (const auto& [out, p] : d.probabilities()) t.entries[out][in] = p;
    }
    return t;
}

double truth_table_fidelity(const TruthTable& experimental, const TruthTable& ideal) {
    if (experimental.num_bits != ideal.num_bits || experimental.entries.size() != ideal.entries.size()) {
        throw Error(ErrorCode::DimensionMismatch, "truth tables differ in size");
    }
    double s = 0.0;
    for (std::size_t i = 0; i < ideal.entries.size(); ++i) {
        for (std::size_t j = 0; j < ideal.entries.size(); ++j) s += experimental.entries[i][j] * ideal.entries[i][j];
    }
    return s / static_cast<double>(ideal.dim());
}

double tvd(const Distribution& p, const Distribution& q) {
    if (p.num_bits() != q.num_bits()) throw Error(ErrorCode::DimensionMismatch, "distributions cover different registers");
    const auto pp = p.probabilities();
    const auto qq = q.probabilities();
    auto total = [](const std::map<std::uint64_t, double>& m) {
        double s = 0.0;
        for (const auto& [k, v] : m) s += v;
        return s;
    };
    if (std::abs(total(pp) - 1.0) > 1e-6 || std::abs(total(qq) - 1.0) > 1e-6) {
        throw Error(ErrorCode::InvalidArgument, "tvd needs normalized distributions");
    }
    std::set<std::uint64_t> keys;
    for (const auto& [k, v] : pp) keys.insert(k);
    for (const auto& [k, v] : qq) keys.insert(k);
    double s = 0.0;
    for (std::uint64_t k : keys) s += std::abs(p.probability(k) - q.probability(k));
    return std::min(1.0, s / 2.0);
}

// ---------------------------------------------------------------------------
// Process tomography

Ptm identity_ptm() {
    Ptm r{};
    for (int i = 0; i < 4; ++i) r[i][i] = 1.0;
    return r;
}

nlohmann::json ptm_to_json(const Ptm& ptm) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : ptm) rows.push_back(row);
    return nlohmann::json{{"basis", "IXYZ"}, {"matrix", rows}};
}

Ptm ptm_from_bloch(const std::array<std::array<double, 3>, 4>& r) {
    Ptm R{};
    R[0] = {1.0, 0.0, 0.0, 0.0};
    for (int i = 0; i < 3; ++i) {
        const double mid = (r[0][i] + r[1][i]) / 2.0;
        R[i + 1][0] = mid;
        R[i + 1][1] = r[2][i] - mid;
        R[i + 1][2] = r[3][i] - mid;
        R[i + 1][3] = (r[0][i] - r[1][i]) / 2.0;
    }
    return R;
}

Ptm qpt_single_qubit(const Protocol& protocol, const NoiseModel* noise, std::uint64_t shots, std::uint64_t seed) {
    if (protocol.inputs.size() != 1 || protocol.outputs.size() != 1) {
        throw Error(ErrorCode::InvalidArgument, "single-qubit tomography needs one input and one output");
    }
    const QubitId in = protocol.inputs[0];
    const QubitId out = protocol.outputs[0];
    // Inputs |0>, |1>, |+>, |+i>.
    const std::vector<std::vector<Gate>> preps{
        {},
        {Gate::single(GateKind::X, in)},
        {Gate::single(GateKind::H, in)},
        {Gate::single(GateKind::H, in), Gate::single(GateKind::S, in)},
    };
    // Rotations taking X, Y, Z to Z.
    const std::vector<std::vector<Gate>> bases{
        {Gate::single(GateKind::H, out)},
        {Gate::single(GateKind::Sdg, out), Gate::single(GateKind::H, out)},
        {},
    };
    std::array<std::array<double, 3>, 4> bloch{};
    std::uint64_t stream = 0;
    for (std::size_t s = 0; s < preps.size(); ++s) {
        for (std::size_t b = 0; b < bases.size(); ++b) {
            Protocol p = with_input_prep(protocol, preps[s]);
            sync(p.circuit);
            for (const Gate& g : bases[b]) p.circuit.append(g);
            const CbitId bit = p.circuit.add_cbit();
            p.circuit.measure(out, bit);
            const std::vector<CbitId> keep{bit};
            bloch[s][b] = z_expectation(execute(p.circuit, noise, shots, derive_seed(seed, stream++)).marginal(keep));
        }
    }
    return ptm_from_bloch(bloch);
}

double process_fidelity_from_ptm(const Ptm& experimental, const Ptm& ideal) {
    double s = 0.0;
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) s += ideal[i][j] * experimental[i][j];
    }
    return s / 4.0;
}

double bell_fidelity_from_parity(double p00, double p11, double signed_coherence, int target_sign) {
    if (target_sign != 1 && target_sign != -1) throw Error(ErrorCode::InvalidArgument, "target sign must be +1 or -1");
    return ghz_fidelity(p00, p11, std::clamp(target_sign * signed_coherence, -1.0, 1.0)).value;
}

// ---------------------------------------------------------------------------
// Decay fits

namespace {

struct DecayFunctor {
    using Scalar = double;
    using InputType = Eigen::VectorXd;
    using ValueType = Eigen::VectorXd;
    using JacobianType = Eigen::MatrixXd;
    enum { InputsAtCompileTime = Eigen::Dynamic, ValuesAtCompileTime = Eigen::Dynamic };

    std::span<const double> m;
    std::span<const double> y;

    int inputs() const { return 2; }
    int values() const { return static_cast<int>(m.size()); }

    int operator()(const Eigen::VectorXd& x, Eigen::VectorXd& f) const {
        for (std::size_t k = 0; k < m.size(); ++k) f(k) = x(0) * std::pow(x(1), m[k]) - y[k];
        return 0;
    }
    int df(const Eigen::VectorXd& x, Eigen::MatrixXd& j) const {
        for (std::size_t k = 0; k < m.size(); ++k) {
            j(k, 0) = std::pow(x(1), m[k]);
            j(k, 1) = m[k] == 0.0 ? 0.0 : x(0) * m[k] * std::pow(x(1), m[k] - 1.0);
        }
        return 0;
    }
};

double rms(std::span<const double> m, std::span<const double> y, double a, double p) {
    double s = 0.0;
    for (std::size_t k = 0; k < m.size(); ++k) s += std::pow(a * std::pow(p, m[k]) - y[k], 2);
    return std::sqrt(s / static_cast<double>(m.size()));
}

// Best amplitude for a fixed rate.
double amplitude_for(std::span<const double> m, std::span<const double> y, double p) {
    double num = 0.0;
    double den = 0.0;
    for (std::size_t k = 0; k < m.size(); ++k) {
        const double b = std::pow(p, m[k]);
        num += b * y[k];
        den += b * b;
    }
    return den > 0.0 ? num / den : 0.0;
}

}  // namespace

DecayFit fit_exponential_decay(std::span<const double> lengths, std::span<const double> values, double min_amplitude) {
    if (lengths.size() != values.size()) throw Error(ErrorCode::DimensionMismatch, "length and value counts differ");
    if (std::set<double>(lengths.begin(), lengths.end()).size() < 3) {
        throw Error(ErrorCode::InvalidArgument, "decay fits need at least 3 distinct lengths");
    }
    DecayFit fit;
    std::vector<double> lm;
    std::vector<double> ly;
    for (std::size_t k = 0; k < values.size(); ++k) {
        if (values[k] > 0.0) {
            lm.push_back(lengths[k]);
            ly.push_back(std::log(values[k]));
        }
    }
    if (lm.empty()) {
        fit.residual = rms(lengths, values, 0.0, 0.0);
        return fit;
    }
    double a0 = std::exp(ly[0]);
    double p0 = 1.0;
    if (lm.size() >= 2) {
        Eigen::MatrixXd a(lm.size(), 2);
        Eigen::VectorXd b(lm.size());
        for (std::size_t k = 0; k < lm.size(); ++k) {
            a(k, 0) = 1.0;
            a(k, 1) = lm[k];
            b(k) = ly[k];
        }
        const Eigen::Vector2d c = a.colPivHouseholderQr().solve(b);
        a0 = std::exp(c(0));
        p0 = std::clamp(std::exp(c(1)), 1e-6, 1.0);
    }

    DecayFunctor f{lengths, values};
    Eigen::VectorXd x(2);
    x << a0, p0;
    Eigen::LevenbergMarquardt<DecayFunctor> solver(f);
    solver.parameters.xtol = 1e-15;
    solver.parameters.ftol = 1e-15;
    solver.parameters.maxfev = 2000;
    solver.minimize(x);
    double a = x(0);
    double p = x(1);
    if (!std::isfinite(a) || !std::isfinite(p) || p < 0.0 || p > 1.0) {
        p = std::isfinite(p) ? std::clamp(p, 0.0, 1.0) : p0;
        a = amplitude_for(lengths, values, p);
    }
    fit.amplitude = a;
    fit.rate = p;
    fit.residual = rms(lengths, values, a, p);
    const double shortest = *std::min_element(lengths.begin(), lengths.end());
    fit.reliable = a >= min_amplitude && a * std::pow(p, shortest) >= min_amplitude;
    if (!fit.reliable) fit.rate = 0.0;
    return fit;
}

double ef_from_r(double r, std::uint32_t n) {
    if (!(r >= 0.0 && r <= 1.0)) throw Error(ErrorCode::InvalidArgument, "average infidelity must lie in [0, 1]");
    const double d = std::ldexp(1.0, static_cast<int>(n));
    return (d + 1.0) * r / d;
}

double r_from_ef(double ef, std::uint32_t n) {
    if (!(ef >= 0.0 && ef <= 1.0)) throw Error(ErrorCode::InvalidArgument, "process infidelity must lie in [0, 1]");
    const double d = std::ldexp(1.0, static_cast<int>(n));
    return d * ef / (d + 1.0);
}

// ---------------------------------------------------------------------------
// Cycle benchmarking with an interleaved mid-circuit measurement

const CbDecay& CbResult::get(QubitId spectator, char pauli) const {
    for (const auto& d : decays) {
        if (d.spectator == spectator && d.pauli == pauli) return d;
    }
    throw Error(ErrorCode::InvalidArgument, std::string("no decay for Q") + std::to_string(spectator.index) + " " + pauli);
}

nlohmann::json CbResult::to_json() const {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& d : decays) {
        out.push_back({{"spectator", d.spectator.index},
                       {"pauli", std::string(1, d.pauli)},
                       {"lengths", d.lengths},
                       {"means", d.means},
                       {"amplitude", d.fit.amplitude},
                       {"rate", d.fit.rate},
                       {"residual", d.fit.residual},
                       {"reliable", d.fit.reliable}});
    }
    return nlohmann::json{{"decays", out}};
}

namespace {

constexpr std::array<GateKind, 4> kTwirl{GateKind::I, GateKind::X, GateKind::Y, GateKind::Z};

bool anticommutes(GateKind twirl, char pauli) {
    if (twirl == GateKind::I) return false;
    const char t = twirl == GateKind::X ? 'X' : twirl == GateKind::Y ? 'Y' : 'Z';
    return t != pauli;
}

}  // namespace

CbResult cb_mcm_experiment(const CbConfig& config, const NoiseModel& noise) {
    if (config.spectators.empty()) throw Error(ErrorCode::InvalidArgument, "no spectator qubits");
    if (std::set<std::uint32_t>(config.lengths.begin(), config.lengths.end()).size() < 3) {
        throw Error(ErrorCode::InvalidArgument, "cycle benchmarking needs at least 3 distinct lengths");
    }
    if (config.randomizations < 10) throw Error(ErrorCode::InvalidArgument, "cycle benchmarking needs at least 10 randomizations");
    for (QubitId s : config.spectators) {
        if (s == config.measured) throw Error(ErrorCode::InvalidArgument, "the measured qubit cannot be a spectator");
    }
    const NoiseModel model = noise.with_dd(config.dd_active);
    std::uint32_t width = config.measured.index + 1;
    for (QubitId s : config.spectators) width = std::max(width, s.index + 1);

    CbResult result;
    const std::string paulis = "XYZ";
    for (std::size_t pi = 0; pi < paulis.size(); ++pi) {
        const char P = paulis[pi];
        std::vector<std::vector<double>> means(config.spectators.size(), std::vector<double>(config.lengths.size(), 0.0));
        for (std::size_t li = 0; li < config.lengths.size(); ++li) {
            for (std::uint32_t r = 0; r < config.randomizations; ++r) {
                std::mt19937_64 rng(derive_seed(config.seed, (pi * config.lengths.size() + li) * 1000003ULL + r));
                Circuit c(width, 1);
                for (QubitId s : config.spectators) {
                    if (P != 'Z') c.h(s);
                    if (P == 'Y') c.gate(GateKind::S, s);
                }
                std::vector<bool> flipped(config.spectators.size(), false);
                for (std::uint32_t m = 0; m < config.lengths[li]; ++m) {
                    for (std::size_t k = 0; k < config.spectators.size(); ++k) {
                        const GateKind t = kTwirl[rng() >> 62];
                        if (t != GateKind::I) c.gate(t, config.spectators[k]);
                        if (anticommutes(t, P)) flipped[k] = !flipped[k];
                    }
                    sync(c);
                    c.measure(config.measured, CbitId{0});
                    sync(c);
                }
                std::vector<CbitId> bits;
                for (QubitId s : config.spectators) {
                    if (P == 'Y') c.gate(GateKind::Sdg, s);
                    if (P != 'Z') c.h(s);
                    bits.push_back(c.add_cbit());
                    c.measure(s, bits.back());
                }
                const Distribution d = execute(c, &model, config.shots, derive_seed(config.seed ^ 0xCB, rng()));
                for (std::size_t k = 0; k < config.spectators.size(); ++k) {
                    const std::vector<CbitId> one{bits[k]};
                    const double e = z_expectation(d.marginal(one));
                    means[k][li] += (flipped[k] ? -e : e) / config.randomizations;
                }
            }
        }
        for (std::size_t k = 0; k < config.spectators.size(); ++k) {
            CbDecay decay;
            decay.spectator = config.spectators[k];
            decay.pauli = P;
            decay.lengths.assign(config.lengths.begin(), config.lengths.end());
            decay.means = means[k];
            decay.fit = fit_exponential_decay(decay.lengths, decay.means, config.min_amplitude);
            result.decays.push_back(std::move(decay));
        }
    }
    return result;
}

}  // namespace adaptq
