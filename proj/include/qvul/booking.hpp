// Circuit booking table: one record per (physical qubit, cycle) cell holding
// the virtual occupant, its entanglement partner (if inside a group
// interval), the swap flag and the outputting flag.
#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "qvul/circuit.hpp"
#include "qvul/entangle.hpp"
#include "qvul/schedule.hpp"

namespace qvul {

struct BookingTable {
    int num_qubits = 0;
    int depth = 0;
    std::vector<std::int16_t> virt;       // virtual occupant per cell
    std::vector<std::int16_t> ent;        // smallest other group member, -1 outside intervals
    std::vector<std::uint8_t> swap_part;  // cell belongs to a lowered swap
    std::vector<std::int16_t> phys_of;    // (virtual, cycle) -> physical row

    size_t cell(int q, int c) const { return size_t(c) * size_t(num_qubits) + size_t(q); }
    size_t vcell(int v, int c) const { return size_t(v) * size_t(depth) + size_t(c); }

    int virtual_at(int q, int c) const { return virt[cell(q, c)]; }
    int entangled_with(int q, int c) const { return ent[cell(q, c)]; }
    bool in_group(int q, int c) const { return ent[cell(q, c)] >= 0; }
    int physical_of(int v, int c) const { return phys_of[vcell(v, c)]; }
};

inline BookingTable build_booking(const CycleSchedule& sched, const CompiledCircuit& cc,
                                  const std::vector<EntGroup>& ents) {
    if (cc.device.n > std::numeric_limits<std::int16_t>::max())
        throw std::invalid_argument("booking table limited to 32767 qubits");
    BookingTable b;
    b.num_qubits = sched.num_qubits;
    b.depth = sched.depth;
    size_t cells = size_t(b.num_qubits) * size_t(b.depth);
    b.virt.assign(cells, -1);
    b.ent.assign(cells, -1);
    b.swap_part.assign(cells, 0);
    b.phys_of.assign(cells, -1);

    // Occupancy: rows exchange virtuals after the third part of a swap.
    std::vector<int> vat(size_t(b.num_qubits));
    for (int v = 0; v < b.num_qubits; ++v) vat[size_t(cc.initial_layout[size_t(v)])] = v;

    // Third swap part per cycle, found by counting parts per group in
    // program order (parts of one swap sit on consecutive cycles).
    std::vector<std::pair<int, const Gate*>> completions;  // (cycle, op)
    {
        int pending_group = -1, parts = 0;
        for (size_t i = 0; i < sched.ops.size(); ++i) {
            const Gate& g = sched.ops[i];
            if (g.kind != GateKind::Cx || g.swap_group < 0) continue;
            if (g.swap_group != pending_group) {
                pending_group = g.swap_group;
                parts = 0;
            }
            if (++parts == 3) completions.emplace_back(sched.op_cycle[i], &g);
        }
        std::sort(completions.begin(), completions.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
    }

    size_t next_completion = 0;
    for (int c = 0; c < b.depth; ++c) {
        for (int q = 0; q < b.num_qubits; ++q) {
            int v = vat[size_t(q)];
            b.virt[b.cell(q, c)] = std::int16_t(v);
            b.phys_of[b.vcell(v, c)] = std::int16_t(q);
            std::int32_t op = sched.op_at(q, c);
            if (op >= 0 && sched.ops[size_t(op)].swap_group >= 0) b.swap_part[b.cell(q, c)] = 1;
        }
        while (next_completion < completions.size() && completions[next_completion].first == c) {
            const Gate* g = completions[next_completion].second;
            std::swap(vat[size_t(g->q0)], vat[size_t(g->q1)]);
            ++next_completion;
        }
    }

    // Stamp group intervals through the occupancy map.
    for (const EntGroup& g : ents) {
        for (int v : g.members) {
            int partner = -1;
            for (int m : g.members)
                if (m != v) {
                    partner = m;
                    break;
                }
            for (int c = g.start_cycle; c <= std::min(g.end_cycle, b.depth - 1); ++c) {
                int q = b.physical_of(v, c);
                std::int16_t& slot = b.ent[b.cell(q, c)];
                if (slot < 0 || partner < slot) slot = std::int16_t(partner);
            }
        }
    }
    return b;
}

}  // namespace qvul
