// Entanglement interval finder. Walks the op stream tracking a small
// single-qubit state lattice (computational and X-basis eigenstates) so that
// phase-kickback targets do not open groups, while anything genuinely
// entangling opens, extends or merges a group. Intervals close at the first
// measurement of a member and otherwise run to the end of the circuit.
// Detection is deliberately conservative: when in doubt a group is opened,
// which keeps cells ACE and never hides an error path.
#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "qvul/circuit.hpp"
#include "qvul/schedule.hpp"

namespace qvul {

struct EntGroup {
    std::vector<int> members;  // virtual qubit ids, sorted
    int start_cycle = 0;
    int end_cycle = 0;  // inclusive
    bool annotated = false;
};

namespace entangle_detail {

// Op-stream group before cycles are known. end_op -1 means open at the end.
struct OpGroup {
    std::vector<int> members;
    int start_op = 0;
    int end_op = -1;
};

enum class QState : std::uint8_t { Zero, One, Plus, Minus, Other };

inline void apply_1q(QState& s, const Gate& g) {
    switch (g.kind) {
        case GateKind::Id:
            return;
        case GateKind::X:
            if (s == QState::Zero) s = QState::One;
            else if (s == QState::One) s = QState::Zero;
            return;  // X eigenstates keep their class
        case GateKind::Z:
            if (s == QState::Plus) s = QState::Minus;
            else if (s == QState::Minus) s = QState::Plus;
            return;
        case GateKind::H:
            switch (s) {
                case QState::Zero: s = QState::Plus; return;
                case QState::Plus: s = QState::Zero; return;
                case QState::One: s = QState::Minus; return;
                case QState::Minus: s = QState::One; return;
                default: return;
            }
        case GateKind::Sx:
            // Rx(pi/2) up to phase: keeps X eigenstates, scrambles Z ones.
            if (s == QState::Zero || s == QState::One) s = QState::Other;
            return;
        case GateKind::Rz: {
            double a = std::fmod(std::abs(g.angle), 2 * 3.14159265358979323846);
            bool full = a < 1e-12 || a > 2 * 3.14159265358979323846 - 1e-12;
            bool half = std::abs(a - 3.14159265358979323846) < 1e-12;
            if (s == QState::Plus || s == QState::Minus) {
                if (half) s = s == QState::Plus ? QState::Minus : QState::Plus;
                else if (!full) s = QState::Other;
            }
            return;  // Z eigenstates only pick up phase
        }
        default:
            s = QState::Other;
            return;
    }
}

// Walk virtual-operand ops and report groups as op-index intervals.
inline std::vector<OpGroup> detect_groups(const std::vector<Gate>& ops, int num_virtuals) {
    std::vector<QState> state(size_t(num_virtuals), QState::Zero);
    std::vector<int> group_of(size_t(num_virtuals), -1);
    std::vector<OpGroup> groups;

    auto open_or_join = [&](int a, int b, int at) {
        int ga = group_of[size_t(a)], gb = group_of[size_t(b)];
        if (ga >= 0 && gb >= 0) {
            if (ga == gb) return;
            // Merge the later group into the earlier one.
            if (groups[size_t(ga)].start_op > groups[size_t(gb)].start_op) std::swap(ga, gb);
            for (int m : groups[size_t(gb)].members) {
                group_of[size_t(m)] = ga;
                groups[size_t(ga)].members.push_back(m);
            }
            groups[size_t(gb)].members.clear();
            groups[size_t(gb)].end_op = -2;  // swallowed
            return;
        }
        if (ga >= 0) {
            groups[size_t(ga)].members.push_back(b);
            group_of[size_t(b)] = ga;
            return;
        }
        if (gb >= 0) {
            groups[size_t(gb)].members.push_back(a);
            group_of[size_t(a)] = gb;
            return;
        }
        OpGroup g;
        g.members = {std::min(a, b), std::max(a, b)};
        g.start_op = at;
        groups.push_back(std::move(g));
        group_of[size_t(a)] = group_of[size_t(b)] = int(groups.size()) - 1;
    };

    for (size_t i = 0; i < ops.size(); ++i) {
        const Gate& g = ops[i];
        switch (g.kind) {
            case GateKind::Barrier:
                break;
            case GateKind::Measure: {
                int v = g.q0;
                int gi = group_of[size_t(v)];
                if (gi >= 0) {
                    // First member measurement closes the whole group.
                    groups[size_t(gi)].end_op = int(i);
                    for (int m : groups[size_t(gi)].members) {
                        group_of[size_t(m)] = -1;
                        state[size_t(m)] = QState::Other;
                    }
                }
                state[size_t(v)] = QState::Other;
                break;
            }
            case GateKind::Swap:
                // Source-level swaps move states between lines; treating the
                // pair as entangled from here on is the safe overcount.
                open_or_join(g.q0, g.q1, int(i));
                break;
            case GateKind::Cx: {
                int a = g.q0, b = g.q1;
                QState sa = group_of[size_t(a)] >= 0 ? QState::Other : state[size_t(a)];
                QState sb = group_of[size_t(b)] >= 0 ? QState::Other : state[size_t(b)];
                bool b_member = group_of[size_t(b)] >= 0;
                if (!b_member && (sb == QState::Plus || sb == QState::Minus)) {
                    // X-eigenstate target: phase kickback only, no spread.
                    if (sb == QState::Minus && group_of[size_t(a)] < 0) {
                        if (sa == QState::Plus) state[size_t(a)] = QState::Minus;
                        else if (sa == QState::Minus) state[size_t(a)] = QState::Plus;
                        else if (sa == QState::Other) state[size_t(a)] = QState::Other;
                    }
                    break;
                }
                if (group_of[size_t(a)] < 0 && sa == QState::Zero) break;  // identity action
                if (group_of[size_t(a)] < 0 && sa == QState::One) {
                    // Classical flip of the target, still a product state.
                    if (sb == QState::Zero) state[size_t(b)] = QState::One;
                    else if (sb == QState::One) state[size_t(b)] = QState::Zero;
                    break;
                }
                open_or_join(a, b, int(i));
                break;
            }
            default:
                if (group_of[size_t(g.q0)] < 0) apply_1q(state[size_t(g.q0)], g);
                break;
        }
    }

    std::vector<OpGroup> out;
    for (OpGroup& g : groups) {
        if (g.end_op == -2 || g.members.size() < 2) continue;
        std::sort(g.members.begin(), g.members.end());
        out.push_back(std::move(g));
    }
    return out;
}

// Ops of a schedule rewritten onto virtual qubits. Swap-tagged cx parts are
// dropped (pure relabeling) and the occupancy map is advanced at the third
// part of each swap.
inline std::vector<Gate> virtual_op_stream(const CycleSchedule& sched, const std::vector<int>& initial_layout) {
    std::vector<int> vat(initial_layout.size());
    for (size_t v = 0; v < initial_layout.size(); ++v) vat[size_t(initial_layout[v])] = int(v);
    std::vector<Gate> out;
    out.reserve(sched.ops.size());
    int pending_group = -1, parts_seen = 0;
    for (const Gate& g : sched.ops) {
        if (g.kind == GateKind::Cx && g.swap_group >= 0) {
            if (g.swap_group != pending_group) {
                pending_group = g.swap_group;
                parts_seen = 0;
            }
            if (++parts_seen == 3) std::swap(vat[size_t(g.q0)], vat[size_t(g.q1)]);
            out.push_back(Gate::id(0));  // placeholder keeps indices aligned
            continue;
        }
        Gate v = g;
        v.q0 = g.q0 >= 0 ? vat[size_t(g.q0)] : g.q0;
        if (is_two_qubit(g.kind)) v.q1 = vat[size_t(g.q1)];
        out.push_back(std::move(v));
    }
    return out;
}

}  // namespace entangle_detail

// Detect groups on the scheduled ops themselves; op indices align with the
// schedule so cycle mapping is direct.
inline std::vector<EntGroup> detect_entanglement(const CycleSchedule& sched, const CompiledCircuit& cc) {
    auto stream = entangle_detail::virtual_op_stream(sched, cc.initial_layout);
    auto groups = entangle_detail::detect_groups(stream, cc.device.n);
    std::vector<EntGroup> out;
    for (auto& g : groups) {
        EntGroup e;
        e.members = std::move(g.members);
        e.start_cycle = sched.op_cycle[size_t(g.start_op)];
        e.end_cycle = g.end_op >= 0 ? sched.op_cycle[size_t(g.end_op)] : sched.depth - 1;
        out.push_back(std::move(e));
    }
    return out;
}

// Detect groups on the pre-routing circuit and map the intervals onto the
// schedule through source indices. Survives dropped ops by snapping to the
// nearest surviving source.
inline std::vector<EntGroup> detect_entanglement_from_source(const Circuit& logical, const CycleSchedule& sched) {
    std::vector<Gate> stream;
    stream.reserve(logical.ops.size());
    for (const Gate& g : logical.ops) stream.push_back(g);
    auto groups = entangle_detail::detect_groups(stream, logical.num_qubits);

    // source -> earliest cycle of a surviving op with that source.
    std::vector<std::pair<int, int>> by_source;
    for (size_t i = 0; i < sched.ops.size(); ++i)
        if (sched.ops[i].source >= 0) by_source.emplace_back(sched.ops[i].source, sched.op_cycle[i]);
    std::sort(by_source.begin(), by_source.end());

    auto cycle_at_or_after = [&](int src) {
        auto it = std::lower_bound(by_source.begin(), by_source.end(), std::pair<int, int>{src, -1});
        return it == by_source.end() ? sched.depth - 1 : it->second;
    };

    std::vector<EntGroup> out;
    for (auto& g : groups) {
        EntGroup e;
        e.members = std::move(g.members);
        e.start_cycle = cycle_at_or_after(g.start_op);
        e.end_cycle = g.end_op >= 0 ? cycle_at_or_after(g.end_op) : sched.depth - 1;
        out.push_back(std::move(e));
    }
    return out;
}

// User annotations win over detection: any detected group sharing a member
// and overlapping in cycles with an annotated one is dropped.
inline std::vector<EntGroup> merge_annotations(const std::vector<EntGroup>& detected,
                                               const std::vector<EntGroup>& annotated) {
    std::vector<EntGroup> out = annotated;
    for (auto& g : out) g.annotated = true;
    for (const EntGroup& d : detected) {
        bool clashes = false;
        for (const EntGroup& a : annotated) {
            bool share = std::find_first_of(d.members.begin(), d.members.end(), a.members.begin(),
                                            a.members.end()) != d.members.end();
            bool overlap = d.start_cycle <= a.end_cycle && a.start_cycle <= d.end_cycle;
            if (share && overlap) {
                clashes = true;
                break;
            }
        }
        if (!clashes) out.push_back(d);
    }
    return out;
}

// Annotation file format: {"groups": [{"members": ["q1", 4, ...],
// "start": 3, "end": 17}, ...]}; members take q-prefixed names or plain ints.
inline std::vector<EntGroup> annotations_from_json(const nlohmann::json& j, int num_qubits, int depth) {
    std::vector<EntGroup> out;
    if (!j.contains("groups")) throw std::invalid_argument("annotation json needs a 'groups' array");
    for (const auto& jg : j.at("groups")) {
        EntGroup g;
        g.annotated = true;
        for (const auto& m : jg.at("members")) {
            int v = -1;
            if (m.is_number_integer()) {
                v = m.get<int>();
            } else {
                std::string s = m.get<std::string>();
                if (!s.empty() && (s[0] == 'q' || s[0] == 'Q')) s = s.substr(1);
                v = std::stoi(s);
            }
            if (v < 0 || v >= num_qubits)
                throw std::invalid_argument("annotation member out of range: " + std::to_string(v));
            g.members.push_back(v);
        }
        std::sort(g.members.begin(), g.members.end());
        g.members.erase(std::unique(g.members.begin(), g.members.end()), g.members.end());
        if (g.members.size() < 2) throw std::invalid_argument("annotation group needs at least two members");
        g.start_cycle = jg.at("start").get<int>();
        g.end_cycle = jg.at("end").get<int>();
        if (g.start_cycle < 0 || g.end_cycle < g.start_cycle)
            throw std::invalid_argument("annotation group has a bad cycle range");
        g.end_cycle = std::min(g.end_cycle, depth - 1);
        if (g.start_cycle >= depth)
            throw std::invalid_argument("annotation group starts past the end of the schedule");
        out.push_back(std::move(g));
    }
    return out;
}

inline std::vector<EntGroup> annotations_from_file(const std::string& path, int num_qubits, int depth) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open annotation file '" + path + "'");
    nlohmann::json j;
    in >> j;
    return annotations_from_json(j, num_qubits, depth);
}

inline nlohmann::ordered_json intervals_to_json(const std::vector<EntGroup>& gs) {
    nlohmann::ordered_json groups = nlohmann::ordered_json::array();
    for (const EntGroup& g : gs) {
        nlohmann::ordered_json jg;
        auto members = nlohmann::ordered_json::array();
        for (int m : g.members) members.push_back("q" + std::to_string(m));
        jg["members"] = members;
        jg["start"] = g.start_cycle;
        jg["end"] = g.end_cycle;
        jg["annotated"] = g.annotated;
        groups.push_back(std::move(jg));
    }
    nlohmann::ordered_json j;
    j["groups"] = groups;
    return j;
}

}  // namespace qvul
