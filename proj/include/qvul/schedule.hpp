// ASAP cycle schedule: at most one op per physical qubit per cycle, idle
// cells filled implicitly with identity. Barriers are zero-duration fences
// and own no cell; measurement takes one cycle.
#pragma once

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "qvul/circuit.hpp"

namespace qvul {

struct CycleSchedule {
    int num_qubits = 0;
    int depth = 0;
    std::vector<Gate> ops;        // compiled ops minus barriers, program order
    std::vector<int> op_cycle;    // cycle of each op
    std::vector<std::int32_t> cell_op;  // (cycle, qubit) -> op index, -1 for identity fill

    size_t cell(int q, int c) const { return size_t(c) * size_t(num_qubits) + size_t(q); }
    std::int32_t op_at(int q, int c) const { return cell_op[cell(q, c)]; }

    GateKind kind_at(int q, int c) const {
        std::int32_t i = op_at(q, c);
        return i < 0 ? GateKind::Id : ops[size_t(i)].kind;
    }
};

inline CycleSchedule schedule_asap(const CompiledCircuit& cc) {
    CycleSchedule s;
    s.num_qubits = cc.device.n;
    std::vector<int> ready(size_t(s.num_qubits), 0);

    for (const Gate& g : cc.circ.ops) {
        if (g.kind == GateKind::Barrier) {
            int fence = 0;
            for (int q : g.fence) fence = std::max(fence, ready[size_t(q)]);
            for (int q : g.fence) ready[size_t(q)] = fence;
            continue;
        }
        int at = 0;
        g.for_each_qubit([&](int q) { at = std::max(at, ready[size_t(q)]); });
        s.ops.push_back(g);
        s.op_cycle.push_back(at);
        g.for_each_qubit([&](int q) { ready[size_t(q)] = at + 1; });
        s.depth = std::max(s.depth, at + 1);
    }

    s.cell_op.assign(size_t(s.depth) * size_t(s.num_qubits), -1);
    for (size_t i = 0; i < s.ops.size(); ++i)
        s.ops[i].for_each_qubit([&](int q) { s.cell_op[s.cell(q, s.op_cycle[i])] = std::int32_t(i); });
    return s;
}

}  // namespace qvul
