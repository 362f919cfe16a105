// One-stop pipeline: schedule, roles, entanglement intervals, booking table
// and ACE map for a compiled circuit, plus the table exporters.
#pragma once

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "qvul/ace.hpp"
#include "qvul/booking.hpp"
#include "qvul/circuit.hpp"
#include "qvul/entangle.hpp"
#include "qvul/schedule.hpp"

namespace qvul {

struct Analysis {
    CompiledCircuit compiled;
    CycleSchedule sched;
    std::vector<QubitRole> roles;
    std::vector<EntGroup> groups;
    BookingTable booking;
    AceMap ace;
};

// `source` is the pre-routing circuit when available; detection runs there
// (cleaner patterns) and intervals map onto the schedule through source
// indices. Otherwise detection walks the scheduled ops directly.
inline Analysis analyze(CompiledCircuit compiled, const Circuit* source = nullptr,
                        const std::vector<EntGroup>* annotations = nullptr) {
    Analysis a;
    a.compiled = std::move(compiled);
    a.sched = schedule_asap(a.compiled);
    a.roles = classify_qubits(a.compiled);
    std::vector<EntGroup> detected = source ? detect_entanglement_from_source(*source, a.sched)
                                            : detect_entanglement(a.sched, a.compiled);
    a.groups = annotations ? merge_annotations(detected, *annotations) : detected;
    a.booking = build_booking(a.sched, a.compiled, a.groups);
    a.ace = mark_unace(a.sched, a.booking, a.roles);
    return a;
}

// Booking CSV, one row per cell:
// qubit,cycle,virtual,entangled_with,S,O,ACE,reason,op
inline std::string booking_to_csv(const Analysis& a) {
    std::ostringstream out;
    out << "qubit,cycle,virtual,entangled_with,S,O,ACE,reason,op\n";
    for (int q = 0; q < a.booking.num_qubits; ++q)
        for (int c = 0; c < a.booking.depth; ++c) {
            int v = a.booking.virtual_at(q, c);
            int ent = a.booking.entangled_with(q, c);
            bool outputting = a.roles[size_t(v)] == QubitRole::Outputting;
            AceReason reason = a.ace.reason_at(q, c);
            out << q << ',' << c << ',' << v << ',' << ent << ',' << int(a.booking.swap_part[a.booking.cell(q, c)])
                << ',' << int(outputting) << ',' << int(reason == AceReason::Ace) << ',' << to_string(reason)
                << ',' << to_string(a.sched.kind_at(q, c)) << '\n';
        }
    return out.str();
}

// Full cell dump as json; self-contained enough to recompute the cell-grid
// estimators without the schedule (op kind, partner and angle included).
inline nlohmann::ordered_json booking_to_json(const Analysis& a) {
    nlohmann::ordered_json j;
    j["name"] = a.compiled.circ.name;
    j["device"] = a.compiled.device.name;
    j["num_qubits"] = a.booking.num_qubits;
    j["depth"] = a.booking.depth;
    auto roles = nlohmann::ordered_json::array();
    for (QubitRole r : a.roles) roles.push_back(to_string(r));
    j["roles"] = roles;
    j["groups"] = intervals_to_json(a.groups)["groups"];
    auto cells = nlohmann::ordered_json::array();
    for (int q = 0; q < a.booking.num_qubits; ++q)
        for (int c = 0; c < a.booking.depth; ++c) {
            nlohmann::ordered_json cell;
            cell["q"] = q;
            cell["c"] = c;
            cell["virtual"] = a.booking.virtual_at(q, c);
            cell["entangled_with"] = a.booking.entangled_with(q, c);
            cell["swap"] = bool(a.booking.swap_part[a.booking.cell(q, c)]);
            cell["ace"] = a.ace.ace(q, c);
            cell["reason"] = to_string(a.ace.reason_at(q, c));
            std::int32_t oi = a.sched.op_at(q, c);
            const Gate* g = oi >= 0 ? &a.sched.ops[size_t(oi)] : nullptr;
            cell["op"] = g ? to_string(g->kind) : "id";
            if (g && g->kind == GateKind::Cx) {
                cell["partner"] = g->q0 == q ? g->q1 : g->q0;
                cell["control"] = g->q0 == q;
            }
            if (g && g->kind == GateKind::Rz) cell["angle"] = g->angle;
            if (g && g->kind == GateKind::Measure) cell["clbit"] = g->clbit;
            cells.push_back(std::move(cell));
        }
    j["cells"] = cells;
    return j;
}

inline void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out << content;
}

}  // namespace qvul
