// Success-rate estimators over a scheduled, booked and ACE-marked circuit.
//
//   esp   product over ops of gate success, no cell or cycle structure
//   qvf   calibrated error mass of ACE cells, averaged over the cell grid
//   cqv   per-virtual cumulative success with weighted flow across cx
#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "qvul/ace.hpp"
#include "qvul/analysis.hpp"
#include "qvul/booking.hpp"
#include "qvul/calib.hpp"
#include "qvul/circuit.hpp"
#include "qvul/schedule.hpp"

namespace qvul {

// Plain product of gate successes over every op (identity fill excluded,
// simultaneity and crosstalk invisible at this level).
inline double esp(const CompiledCircuit& cc, const CalibrationSnapshot& calib) {
    double p = 1.0;
    for (const Gate& g : cc.circ.ops) {
        switch (g.kind) {
            case GateKind::Barrier: break;
            case GateKind::Cx: p *= 1.0 - calib.cx_error(g.q0, g.q1); break;
            case GateKind::Swap: p *= std::pow(1.0 - calib.cx_error(g.q0, g.q1), 3); break;
            default: p *= 1.0 - calib.single_error(g.kind, g.q0); break;
        }
    }
    return p;
}

namespace estimator_detail {

// cx edges driven in one cycle, the crosstalk context for that cycle.
inline std::vector<std::vector<Edge>> edges_by_cycle(const CycleSchedule& sched) {
    std::vector<std::vector<Edge>> out(size_t(sched.depth));
    for (size_t i = 0; i < sched.ops.size(); ++i)
        if (sched.ops[i].kind == GateKind::Cx)
            out[size_t(sched.op_cycle[i])].push_back(normalized_edge(sched.ops[i].q0, sched.ops[i].q1));
    return out;
}

}  // namespace estimator_detail

struct QvfReport {
    double qvf = 0.0;
    double uqvf = 0.0;
    double total = 0.0;  // summed ACE error mass before averaging
    int used_qubits = 0;
    std::vector<double> per_cycle;  // ACE error mass per cycle / num qubits
};

inline QvfReport qvf(const CycleSchedule& sched, const BookingTable& booking, const AceMap& ace,
                     const CalibrationSnapshot& calib, const std::vector<QubitRole>& roles) {
    const int P = sched.num_qubits, D = sched.depth;
    QvfReport r;
    r.per_cycle.assign(size_t(D), 0.0);
    auto edges = estimator_detail::edges_by_cycle(sched);
    double total = 0.0;

    for (int c = 0; c < D; ++c) {
        double mass = 0.0;
        for (int q = 0; q < P; ++q) {
            if (!ace.ace(q, c)) continue;
            std::int32_t oi = sched.op_at(q, c);
            double err;
            if (oi < 0) {
                err = calib.qubits[size_t(q)].id;
            } else {
                const Gate& g = sched.ops[size_t(oi)];
                err = g.kind == GateKind::Cx ? calib.adjusted_cx_error(g.q0, g.q1, edges[size_t(c)])
                                             : calib.single_error(g.kind, q);
            }
            mass += err;
        }
        r.per_cycle[size_t(c)] = mass / P;
        total += mass;
    }
    r.total = total;
    r.qvf = D > 0 ? total / (double(P) * D) : 0.0;
    for (QubitRole role : roles) r.used_qubits += role != QubitRole::UnusedAncilla;
    r.uqvf = D > 0 && r.used_qubits > 0 ? total / (double(r.used_qubits) * D) : 0.0;
    return r;
}

struct CqvReport {
    double one_minus_cqv = 1.0;
    double cqv = 0.0;
    std::vector<double> final_success;           // per virtual qubit
    std::vector<std::vector<double>> traces;     // [virtual][cycle], only if requested
};

// Per-virtual cumulative success S_v. ACE one-qubit and measure cells scale
// S_v by the gate success; an ACE cx scales both operands and couples them:
// with weight w, partner failure mass (1 - S_partner) bleeds over. Released
// cells leave S_v untouched. 1-CQV is the product over outputting qubits.
inline CqvReport cqv(const CycleSchedule& sched, const BookingTable& booking, const AceMap& ace,
                     const CalibrationSnapshot& calib, const std::vector<QubitRole>& roles, double weight,
                     bool record_traces = false) {
    if (weight < 0.0 || weight > 1.0) throw std::invalid_argument("cqv weight must lie in [0,1]");
    const int P = sched.num_qubits, D = sched.depth;
    auto edges = estimator_detail::edges_by_cycle(sched);

    CqvReport r;
    r.final_success.assign(size_t(P), 1.0);
    std::vector<double>& s = r.final_success;
    if (record_traces) r.traces.assign(size_t(P), std::vector<double>(size_t(D), 1.0));

    for (int c = 0; c < D; ++c) {
        for (int q = 0; q < P; ++q) {
            std::int32_t oi = sched.op_at(q, c);
            if (oi < 0) {
                if (ace.ace(q, c)) {
                    double e = calib.qubits[size_t(q)].id;
                    if (e > 0) s[size_t(booking.virtual_at(q, c))] *= 1.0 - e;
                }
                continue;
            }
            const Gate& g = sched.ops[size_t(oi)];
            if (g.kind == GateKind::Cx) {
                if (q != g.q0) continue;  // one update per op
                if (!ace.ace(g.q0, c) || !ace.ace(g.q1, c)) continue;
                double gs = 1.0 - calib.adjusted_cx_error(g.q0, g.q1, edges[size_t(c)]);
                int va = booking.virtual_at(g.q0, c), vb = booking.virtual_at(g.q1, c);
                double sa = s[size_t(va)], sb = s[size_t(vb)];
                s[size_t(va)] = sa * gs * (1.0 - weight * (1.0 - sb));
                s[size_t(vb)] = sb * gs * (1.0 - weight * (1.0 - sa));
            } else if (ace.ace(q, c)) {
                s[size_t(booking.virtual_at(q, c))] *= 1.0 - calib.single_error(g.kind, q);
            }
        }
        if (record_traces)
            for (int q = 0; q < P; ++q) {
                int v = booking.virtual_at(q, c);
                r.traces[size_t(v)][size_t(c)] = s[size_t(v)];
            }
    }

    r.one_minus_cqv = 1.0;
    for (int v = 0; v < P; ++v)
        if (roles[size_t(v)] == QubitRole::Outputting) r.one_minus_cqv *= s[size_t(v)];
    r.cqv = 1.0 - r.one_minus_cqv;
    return r;
}

inline double esp(const Analysis& a, const CalibrationSnapshot& calib) { return esp(a.compiled, calib); }

inline QvfReport qvf(const Analysis& a, const CalibrationSnapshot& calib) {
    return qvf(a.sched, a.booking, a.ace, calib, a.roles);
}

inline CqvReport cqv(const Analysis& a, const CalibrationSnapshot& calib, double weight, bool record_traces = false) {
    return cqv(a.sched, a.booking, a.ace, calib, a.roles, weight, record_traces);
}

}  // namespace qvul
