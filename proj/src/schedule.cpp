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

#include "adaptq/schedule.hpp"

#include <algorithm>
#include <map>

#include "adaptq/error.hpp"

namespace adaptq {

Durations Durations::defaults() {
    Durations d;
    d.single_qubit_gate_ns = 30.0;
    d.two_qubit_gate_ns = 200.0;
    d.measurement_ns = 700.0;
    d.reset_ns = 850.0;
    d.feedback_latency_ns = 150.0;
    return d;
}

namespace {

double need(const std::optional<double>& value, const char* what) {
    if (!value) throw Error(ErrorCode::MissingDuration, std::string("no duration configured for ") + what);
    if (*value < 0.0) throw Error(ErrorCode::InvalidArgument, std::string("negative duration for ") + what);
    return *value;
}

class Scheduler {
public:
    Scheduler(const Circuit& c, const Durations& d) : circuit_(c), durations_(d), free_(c.num_qubits(), 0.0) {
        timeline_.per_qubit.resize(c.num_qubits());
        timeline_.instruction_start_ns.reserve(c.size());
        timeline_.instruction_end_ns.reserve(c.size());
    }

    Timeline run() {
        if (durations_.feedback_latency_ns < 0.0) throw Error(ErrorCode::InvalidArgument, "negative feedback latency");
        for (const Instruction& inst : circuit_.instructions()) place(inst);
        double end = 0.0;
        for (double f : free_) end = std::max(end, f);
        for (std::uint32_t q = 0; q < circuit_.num_qubits(); ++q) occupy(q, end, end, Activity::Idle);
        timeline_.end_ns = end;
        return std::move(timeline_);
    }

private:
    double gate_duration(const Gate& g) const {
        return g.arity() == 2 ? need(durations_.two_qubit_gate_ns, "two-qubit gates")
                              : need(durations_.single_qubit_gate_ns, "single-qubit gates");
    }

    // Fills [free, start) with `gap` and then [start, end) with `act`.
    void occupy(std::uint32_t q, double start, double end, Activity act, Activity gap = Activity::Idle) {
        auto& iv = timeline_.per_qubit[q];
        auto push = [&iv](double a, double b, Activity k) {
            if (b <= a) return;
            if (!iv.empty() && iv.back().activity == k && k != Activity::Gate && k != Activity::Measure && iv.back().end_ns == a) {
                iv.back().end_ns = b;
                return;
            }
            iv.push_back(Interval{a, b, k});
        };
        push(free_[q], start, gap);
        push(start, end, act);
        free_[q] = std::max(free_[q], end);
    }

    void record(double start, double end) {
        timeline_.instruction_start_ns.push_back(start);
        timeline_.instruction_end_ns.push_back(end);
    }

    void place(const Instruction& inst) {
        if (const auto* g = std::get_if<Gate>(&inst)) {
            const double start = ready(instruction_qubits(inst));
            const double end = start + gate_duration(*g);
            for (QubitId q : instruction_qubits(inst)) occupy(q.index, start, end, Activity::Gate);
            record(start, end);
        } else if (const auto* m = std::get_if<Measure>(&inst)) {
            const double start = free_[m->qubit.index];
            const double end = start + need(durations_.measurement_ns, "measurements");
            occupy(m->qubit.index, start, end, Activity::Measure);
            measured_at_[m->cbit.index] = end;
            record(start, end);
        } else if (const auto* r = std::get_if<Reset>(&inst)) {
            const double start = free_[r->qubit.index];
            const double end = start + need(durations_.reset_ns, "resets");
            occupy(r->qubit.index, start, end, Activity::Measure);
            record(start, end);
        } else if (const auto* d = std::get_if<Delay>(&inst)) {
            const double start = free_[d->qubit.index];
            occupy(d->qubit.index, start, start + d->duration_ns, Activity::Idle);
            record(start, start + d->duration_ns);
        } else if (const auto* c = std::get_if<Conditional>(&inst)) {
            place_conditional(*c);
        } else if (const auto* b = std::get_if<Barrier>(&inst)) {
            const double t = ready(b->qubits);
            for (QubitId q : b->qubits) occupy(q.index, t, t, Activity::Idle);
            record(t, t);
        } else {
            const double t = ready(instruction_qubits(inst));
            record(t, t);
        }
    }

    void place_conditional(const Conditional& c) {
        double signal = 0.0;
        bool has_source = false;
        for (CbitId b : c.condition.bits()) {
            if (auto it = measured_at_.find(b.index); it != measured_at_.end()) {
                signal = std::max(signal, it->second + durations_.feedback_latency_ns);
                has_source = true;
            }
        }
        const auto qs = instruction_qubits(c);
        const double start = std::max(ready(qs), has_source ? signal : 0.0);
        double end = start;
        for (const Gate& g : c.gates) {
            const auto gq = instruction_qubits(g);
            const double gs = std::max(start, ready(gq));
            const double ge = gs + gate_duration(g);
            for (QubitId q : gq) {
                const Activity gap = (has_source && free_[q.index] < signal) ? Activity::FeedbackWait : Activity::Idle;
                occupy(q.index, gs, ge, Activity::Gate, gap);
            }
            end = std::max(end, ge);
        }
        record(start, end);
    }

    double ready(const std::vector<QubitId>& qs) const {
        double t = 0.0;
        for (QubitId q : qs) t = std::max(t, free_.at(q.index));
        return t;
    }

    const Circuit& circuit_;
    const Durations& durations_;
    std::vector<double> free_;
    std::map<std::uint32_t, double> measured_at_;
    Timeline timeline_;
};

}  // namespace

Timeline schedule(const Circuit& circuit, const Durations& durations) {
    require_valid(circuit);
    return Scheduler(circuit, durations).run();
}

}  // namespace adaptq
