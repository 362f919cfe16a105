// Reference oracle: Monte Carlo fault injection over the scheduled circuit
// (depolarizing gate noise plus measurement flips), and exact single-Pauli
// injection for checking that released cells really cannot reach the output.
#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "qvul/calib.hpp"
#include "qvul/circuit.hpp"
#include "qvul/estimators.hpp"
#include "qvul/schedule.hpp"
#include "qvul/sim.hpp"

namespace qvul {

// Deterministic per-trial stream: every trial derives its own generator from
// (seed, trial), so results are independent of thread partitioning.
class TrialRng {
  public:
    TrialRng(std::uint64_t seed, std::uint64_t trial) : s_(seed + 0x9E3779B97F4A7C15ULL * (trial + 1)) {}

    std::uint64_t next() {
        std::uint64_t z = (s_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    double uniform() { return double(next() >> 11) * 0x1.0p-53; }

  private:
    std::uint64_t s_;
};

// Insert a Pauli right after the cell's op (before it for measures, at the
// end of the qubit's past for identity fill) and return the exact output
// distribution. Y is expressed as Z then X, identical up to global phase.
inline Distribution inject_pauli(const CompiledCircuit& cc, const CycleSchedule& sched, int qubit, int cycle,
                                 Pauli pauli, int max_qubits = 22) {
    if (qubit < 0 || qubit >= sched.num_qubits || cycle < 0 || cycle >= sched.depth)
        throw std::invalid_argument("injection cell out of range");
    std::int32_t oi = sched.op_at(qubit, cycle);
    size_t pos;
    if (oi >= 0) {
        pos = sched.ops[size_t(oi)].kind == GateKind::Measure ? size_t(oi) : size_t(oi) + 1;
    } else {
        pos = 0;
        for (size_t i = 0; i < sched.ops.size(); ++i) {
            if (sched.op_cycle[i] > cycle) continue;
            bool touches = false;
            sched.ops[i].for_each_qubit([&](int q) { touches = touches || q == qubit; });
            if (touches) pos = std::max(pos, i + 1);
        }
    }
    Circuit injected(cc.circ.name + "+pauli", sched.num_qubits, cc.circ.num_clbits);
    injected.ops.reserve(sched.ops.size() + 2);
    injected.ops.insert(injected.ops.end(), sched.ops.begin(), sched.ops.begin() + long(pos));
    if (pauli == Pauli::Z || pauli == Pauli::Y) injected.ops.push_back(Gate::z(qubit));
    if (pauli == Pauli::X || pauli == Pauli::Y) injected.ops.push_back(Gate::x(qubit));
    injected.ops.insert(injected.ops.end(), sched.ops.begin() + long(pos), sched.ops.end());
    return simulate_ideal(injected, max_qubits);
}

inline Distribution ideal_output(const CompiledCircuit& cc, int max_qubits = 22) {
    return simulate_ideal(cc.circ, max_qubits);
}

struct OracleOptions {
    std::uint64_t shots = 8192;
    std::uint64_t seed = 1;
    int threads = 1;
    int max_qubits = 14;
    bool collect_counts = false;
};

struct OracleResult {
    std::uint64_t shots = 0;
    std::uint64_t correct = 0;
    double sr = 0.0;
    double ci_half = 0.0;  // normal-approximation 95% half width
    std::map<std::string, std::uint64_t> counts;
};

namespace oracle_detail {

struct TrajectoryPlan {
    std::vector<int> dense;  // physical row -> dense state index, -1 unused
    int num_dense = 0;
    std::vector<std::vector<Edge>> cycle_edges;
};

inline TrajectoryPlan plan(const CycleSchedule& sched, int max_qubits) {
    TrajectoryPlan p;
    p.dense.assign(size_t(sched.num_qubits), -1);
    for (const Gate& g : sched.ops)
        if (is_real_op(g.kind)) g.for_each_qubit([&](int q) {
            if (p.dense[size_t(q)] < 0) p.dense[size_t(q)] = p.num_dense++;
        });
    if (p.num_dense > max_qubits)
        throw std::runtime_error("fault injection needs " + std::to_string(p.num_dense) +
                                 " live qubits, cap is " + std::to_string(max_qubits));
    p.cycle_edges = estimator_detail::edges_by_cycle(sched);
    return p;
}

inline void apply_pauli_pair(StateVector& state, TrialRng& rng, int a, int b) {
    // One of the 15 non-identity two-qubit Paulis, uniformly.
    int idx = 1 + int(rng.next() % 15);
    int pa = idx >> 2, pb = idx & 3;
    if (pa) state.pauli(a, Pauli(pa - 1));
    if (pb) state.pauli(b, Pauli(pb - 1));
}

inline bool run_one_trial(const CycleSchedule& sched, const CalibrationSnapshot& calib, const TrajectoryPlan& plan,
                          const std::string& expected, TrialRng rng, int num_clbits, std::string* outcome) {
    StateVector state(plan.num_dense);
    std::string bits(size_t(num_clbits), '0');

    for (int c = 0; c < sched.depth; ++c) {
        for (int q = 0; q < sched.num_qubits; ++q) {
            int dq = plan.dense[size_t(q)];
            if (dq < 0) continue;
            std::int32_t oi = sched.op_at(q, c);
            if (oi < 0) {
                double e = calib.qubits[size_t(q)].id;
                if (e > 0 && rng.uniform() < e) state.pauli(dq, Pauli(rng.next() % 3));
                continue;
            }
            const Gate& g = sched.ops[size_t(oi)];
            switch (g.kind) {
                case GateKind::Cx: {
                    if (q != g.q0) break;  // handle once, at the control cell
                    int da = dq, db = plan.dense[size_t(g.q1)];
                    state.cx(da, db);
                    double e = calib.adjusted_cx_error(g.q0, g.q1, plan.cycle_edges[size_t(c)]);
                    if (e > 0 && rng.uniform() < e) apply_pauli_pair(state, rng, da, db);
                    break;
                }
                case GateKind::Measure: {
                    double p1 = state.prob_one(dq);
                    int bit = rng.uniform() < p1 ? 1 : 0;
                    state.project(dq, bit);
                    if (rng.uniform() < calib.qubits[size_t(q)].meas) bit ^= 1;
                    bits[size_t(num_clbits - 1 - g.clbit)] = char('0' + bit);
                    break;
                }
                default: {
                    Gate local = g;
                    local.q0 = dq;
                    state.apply(local);
                    double e = calib.single_error(g.kind, q);
                    if (e > 0 && rng.uniform() < e) state.pauli(dq, Pauli(rng.next() % 3));
                    break;
                }
            }
        }
    }
    if (outcome) *outcome = bits;
    return bits == expected;
}

}  // namespace oracle_detail

// Sampled success rate under depolarizing gate noise and measurement flips.
// Byte-reproducible for a given seed, independent of the thread count.
inline OracleResult sample_success_rate(const CompiledCircuit& cc, const CycleSchedule& sched,
                                        const CalibrationSnapshot& calib, const std::string& expected,
                                        const OracleOptions& opt = {}) {
    if (int(expected.size()) != cc.circ.num_clbits)
        throw std::invalid_argument("expected output length must equal the classical register width");
    auto plan = oracle_detail::plan(sched, opt.max_qubits);

    OracleResult r;
    r.shots = opt.shots;
    int threads = std::max(1, opt.threads);

    auto run_range = [&](std::uint64_t lo, std::uint64_t hi, std::uint64_t* correct,
                         std::map<std::string, std::uint64_t>* counts) {
        std::string outcome;
        for (std::uint64_t t = lo; t < hi; ++t) {
            bool ok = oracle_detail::run_one_trial(sched, calib, plan, expected, TrialRng(opt.seed, t),
                                                   cc.circ.num_clbits, counts ? &outcome : nullptr);
            *correct += ok;
            if (counts) ++(*counts)[outcome];
        }
    };

    if (threads == 1 || opt.shots < 256) {
        run_range(0, opt.shots, &r.correct, opt.collect_counts ? &r.counts : nullptr);
    } else {
        std::vector<std::uint64_t> corrects(size_t(threads), 0);
        std::vector<std::map<std::string, std::uint64_t>> maps(static_cast<size_t>(threads));
        std::vector<std::thread> pool;
        for (int i = 0; i < threads; ++i) {
            std::uint64_t lo = opt.shots * std::uint64_t(i) / std::uint64_t(threads);
            std::uint64_t hi = opt.shots * std::uint64_t(i + 1) / std::uint64_t(threads);
            pool.emplace_back(run_range, lo, hi, &corrects[size_t(i)],
                              opt.collect_counts ? &maps[size_t(i)] : nullptr);
        }
        for (auto& t : pool) t.join();
        for (std::uint64_t c : corrects) r.correct += c;
        for (auto& m : maps)
            for (auto& [k, v] : m) r.counts[k] += v;
    }

    r.sr = opt.shots > 0 ? double(r.correct) / double(opt.shots) : 0.0;
    double var = r.sr * (1.0 - r.sr) / double(std::max<std::uint64_t>(opt.shots, 1));
    r.ci_half = 1.96 * std::sqrt(var);
    return r;
}

inline Distribution inject_pauli(const Analysis& a, int qubit, int cycle, Pauli pauli, int max_qubits = 22) {
    return inject_pauli(a.compiled, a.sched, qubit, cycle, pauli, max_qubits);
}

inline Distribution ideal_output(const Analysis& a, int max_qubits = 22) {
    return ideal_output(a.compiled, max_qubits);
}

inline OracleResult sample_success_rate(const Analysis& a, const CalibrationSnapshot& calib,
                                        const std::string& expected, const OracleOptions& opt = {}) {
    return sample_success_rate(a.compiled, a.sched, calib, expected, opt);
}

}  // namespace qvul
