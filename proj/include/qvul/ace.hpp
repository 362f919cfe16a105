// ACE cell analysis: decides which booking cells can affect the measured
// output. Cells default to ACE; a cell is released only when one of the
// non-spread arguments applies. All row reasoning happens along virtual
// trajectories so routed swaps cannot detach a qubit from its history.
//
// Release reasons, in marking order:
//   unused        whole row of a device qubit no real op ever touches
//   post_measure  cells after a qubit's final measurement
//   trashed       idle tail of an unmeasured, non-entangled qubit
//   non_spread_1  cells after the last cx of an unmeasured, non-entangled
//                 qubit, trailing one-qubit gates included
//   non_spread_2  a cx both of whose operands are released right after it,
//                 plus the one-qubit/idle run leading back to the previous
//                 cx on each operand
//
// Cells inside an entanglement interval are pinned ACE, whether the group
// was detected or annotated, and whether or not it reaches a measurement.
#pragma once

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "qvul/booking.hpp"
#include "qvul/circuit.hpp"
#include "qvul/schedule.hpp"

namespace qvul {

enum class AceReason : std::uint8_t {
    Ace = 0,
    Unused = 1,
    PostMeasure = 2,
    Trashed = 3,
    NonSpread1 = 4,
    NonSpread2 = 5,
};

inline const char* to_string(AceReason r) {
    switch (r) {
        case AceReason::Ace: return "";
        case AceReason::Unused: return "unused";
        case AceReason::PostMeasure: return "post_measure";
        case AceReason::Trashed: return "trashed";
        case AceReason::NonSpread1: return "non_spread_1";
        case AceReason::NonSpread2: return "non_spread_2";
    }
    return "?";
}

struct AceMap {
    int num_qubits = 0;
    int depth = 0;
    std::vector<std::uint8_t> reason;

    size_t cell(int q, int c) const { return size_t(c) * size_t(num_qubits) + size_t(q); }
    bool ace(int q, int c) const { return reason[cell(q, c)] == 0; }
    AceReason reason_at(int q, int c) const { return AceReason(reason[cell(q, c)]); }

    size_t ace_count() const {
        size_t n = 0;
        for (std::uint8_t r : reason) n += r == 0;
        return n;
    }
    size_t released_count() const { return reason.size() - ace_count(); }
};

inline AceMap mark_unace(const CycleSchedule& sched, const BookingTable& booking,
                         const std::vector<QubitRole>& roles) {
    const int P = booking.num_qubits, D = booking.depth;
    AceMap map;
    map.num_qubits = P;
    map.depth = D;
    map.reason.assign(size_t(P) * size_t(D), std::uint8_t(AceReason::Ace));

    // Pass 1: per-virtual row facts, walking trajectories through the cells.
    std::vector<int> last_real(size_t(P), -1), last_cx(size_t(P), -1), last_meas(size_t(P), -1),
        last_ent(size_t(P), -1);
    for (int c = 0; c < D; ++c)
        for (int q = 0; q < P; ++q) {
            int v = booking.virtual_at(q, c);
            if (booking.in_group(q, c)) last_ent[size_t(v)] = std::max(last_ent[size_t(v)], c);
            std::int32_t oi = sched.op_at(q, c);
            if (oi < 0) continue;
            const Gate& g = sched.ops[size_t(oi)];
            if (!is_real_op(g.kind)) continue;
            last_real[size_t(v)] = c;
            if (g.kind == GateKind::Cx) last_cx[size_t(v)] = c;
            if (g.kind == GateKind::Measure) last_meas[size_t(v)] = c;
        }

    // Pass 2: row-level releases. Cells inside group intervals stay ACE.
    for (int v = 0; v < P; ++v) {
        QubitRole role = roles[size_t(v)];
        if (role == QubitRole::UnusedAncilla) {
            for (int c = 0; c < D; ++c) map.reason[map.cell(booking.physical_of(v, c), c)] =
                std::uint8_t(AceReason::Unused);
            continue;
        }
        if (role == QubitRole::Outputting) {
            // A measured-then-reused qubit gets no blanket release.
            if (last_real[size_t(v)] > last_meas[size_t(v)]) continue;
            for (int c = last_meas[size_t(v)] + 1; c < D; ++c) {
                int q = booking.physical_of(v, c);
                if (!booking.in_group(q, c)) map.reason[map.cell(q, c)] = std::uint8_t(AceReason::PostMeasure);
            }
            continue;
        }
        // Assisting, never measured: release past the last spread point.
        int floor = std::max(last_cx[size_t(v)], last_ent[size_t(v)]);
        for (int c = floor + 1; c < D; ++c) {
            int q = booking.physical_of(v, c);
            if (booking.in_group(q, c)) continue;
            map.reason[map.cell(q, c)] = std::uint8_t(
                c <= last_real[size_t(v)] ? AceReason::NonSpread1 : AceReason::Trashed);
        }
    }

    // Suffix-dead boundary per virtual row: all cells at or past dead_from
    // are released.
    std::vector<int> dead_from(size_t(P), D);
    for (int v = 0; v < P; ++v) {
        int c = D;
        while (c > 0 && !map.ace(booking.physical_of(v, c - 1), c - 1)) --c;
        dead_from[size_t(v)] = c;
    }

    // Pass 3: dead-end cx release, latest cycles first so chains cascade in
    // one sweep. A qualifying cx releases its own two cells and the
    // one-qubit/idle run back to each operand's previous interaction.
    std::vector<size_t> cx_ops;
    for (size_t i = 0; i < sched.ops.size(); ++i)
        if (sched.ops[i].kind == GateKind::Cx) cx_ops.push_back(i);
    std::sort(cx_ops.begin(), cx_ops.end(),
              [&](size_t a, size_t b) { return sched.op_cycle[a] > sched.op_cycle[b]; });

    for (size_t i : cx_ops) {
        int t = sched.op_cycle[i];
        int p0 = sched.ops[i].q0, p1 = sched.ops[i].q1;
        if (booking.in_group(p0, t) || booking.in_group(p1, t)) continue;
        int v0 = booking.virtual_at(p0, t), v1 = booking.virtual_at(p1, t);
        if (dead_from[size_t(v0)] > t + 1 || dead_from[size_t(v1)] > t + 1) continue;
        map.reason[map.cell(p0, t)] = std::uint8_t(AceReason::NonSpread2);
        map.reason[map.cell(p1, t)] = std::uint8_t(AceReason::NonSpread2);
        for (int v : {v0, v1}) {
            int c = t - 1;
            while (c >= 0) {
                int q = booking.physical_of(v, c);
                if (booking.in_group(q, c)) break;
                std::int32_t oi = sched.op_at(q, c);
                if (oi >= 0) {
                    GateKind k = sched.ops[size_t(oi)].kind;
                    if (k == GateKind::Cx || k == GateKind::Measure) break;
                }
                map.reason[map.cell(q, c)] = std::uint8_t(AceReason::NonSpread2);
                --c;
            }
            dead_from[size_t(v)] = c + 1;
        }
    }
    return map;
}

}  // namespace qvul
