// Circuits, swap lowering, and the compiled-circuit bundle with qubit roles.
#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "qvul/gates.hpp"
#include "qvul/topology.hpp"

namespace qvul {

struct Circuit {
    std::string name;
    int num_qubits = 0;
    int num_clbits = 0;
    std::vector<Gate> ops;

    Circuit() = default;
    Circuit(std::string name_, int nq, int nc = 0) : name(std::move(name_)), num_qubits(nq), num_clbits(nc) {}

    Circuit& add(Gate g) {
        ops.push_back(std::move(g));
        return *this;
    }

    void validate() const {
        for (size_t i = 0; i < ops.size(); ++i) {
            const Gate& g = ops[i];
            bool ok = true;
            g.for_each_qubit([&](int q) { ok = ok && q >= 0 && q < num_qubits; });
            if (!ok)
                throw std::invalid_argument(name + ": op " + std::to_string(i) + " (" + to_string(g.kind) +
                                            ") has a qubit operand out of range");
            if (g.kind == GateKind::Measure && (g.clbit < 0 || g.clbit >= num_clbits))
                throw std::invalid_argument(name + ": op " + std::to_string(i) + " measures into a bad clbit");
            if (g.kind == GateKind::Barrier) {
                for (size_t a = 0; a < g.fence.size(); ++a)
                    for (size_t b = a + 1; b < g.fence.size(); ++b)
                        if (g.fence[a] == g.fence[b])
                            throw std::invalid_argument(name + ": barrier lists a qubit twice");
            }
        }
    }

    int count(GateKind k) const {
        int n = 0;
        for (const Gate& g : ops)
            if (g.kind == k) ++n;
        return n;
    }
};

// Lower every swap into its three-cx expansion. The parts keep the swap's
// source index and share a fresh swap_group id so later passes can recover
// both the provenance and the virtual-qubit permutation.
inline Circuit decompose_swaps(const Circuit& in) {
    Circuit out(in.name, in.num_qubits, in.num_clbits);
    out.ops.reserve(in.ops.size());
    int next_group = 0;
    for (const Gate& g : in.ops) {
        if (g.kind != GateKind::Swap) {
            out.ops.push_back(g);
            if (g.swap_group >= 0) next_group = std::max(next_group, g.swap_group + 1);
            continue;
        }
        int group = next_group++;
        for (int part = 0; part < 3; ++part) {
            Gate c = part == 1 ? Gate::cx(g.q1, g.q0) : Gate::cx(g.q0, g.q1);
            c.source = g.source;
            c.swap_group = group;
            out.ops.push_back(c);
        }
    }
    return out;
}

// Role of one virtual qubit in a compiled circuit.
enum class QubitRole : std::uint8_t {
    Outputting,     // measured into a classical bit
    Assisting,      // touched by real ops but never measured
    UnusedAncilla,  // device row never touched by a real op
};

inline const char* to_string(QubitRole r) {
    switch (r) {
        case QubitRole::Outputting: return "outputting";
        case QubitRole::Assisting: return "assisting";
        case QubitRole::UnusedAncilla: return "unused";
    }
    return "?";
}

// A circuit expressed on device qubits. ops must respect the coupling map and
// are stored swap-free (construction lowers them); initial_layout maps virtual
// index -> physical index and covers every device qubit.
struct CompiledCircuit {
    Circuit circ;
    DeviceTopology device;
    std::vector<int> initial_layout;
    int num_logical = 0;  // leading virtual indices that came from the source circuit

    CompiledCircuit() = default;

    CompiledCircuit(Circuit physical, DeviceTopology dev, std::vector<int> layout, int logical)
        : circ(decompose_swaps(physical)), device(std::move(dev)), initial_layout(std::move(layout)),
          num_logical(logical) {
        circ.num_qubits = device.n;
        if (initial_layout.empty()) {
            initial_layout.resize(device.n);
            for (int v = 0; v < device.n; ++v) initial_layout[v] = v;
        }
        validate();
    }

    // Treat an already-placed circuit as compiled with the identity layout.
    static CompiledCircuit from_placed(Circuit physical, DeviceTopology dev) {
        int logical = physical.num_qubits;
        return CompiledCircuit(std::move(physical), std::move(dev), {}, logical);
    }

    void validate() const {
        if (int(initial_layout.size()) != device.n)
            throw std::invalid_argument("initial layout must place every device qubit");
        std::vector<bool> seen(device.n, false);
        for (int p : initial_layout) {
            if (p < 0 || p >= device.n || seen[p])
                throw std::invalid_argument("initial layout is not a permutation of device qubits");
            seen[p] = true;
        }
        if (num_logical < 0 || num_logical > device.n)
            throw std::invalid_argument("logical qubit count out of range");
        circ.validate();
        for (size_t i = 0; i < circ.ops.size(); ++i) {
            const Gate& g = circ.ops[i];
            if (g.kind == GateKind::Swap)
                throw std::invalid_argument("compiled circuits store swaps pre-lowered");
            if (g.kind == GateKind::Cx && !device.connected(g.q0, g.q1))
                throw std::invalid_argument(circ.name + ": op " + std::to_string(i) +
                                            " uses a cx on unconnected qubits " + std::to_string(g.q0) + "," +
                                            std::to_string(g.q1));
        }
    }

    // Virtual qubit sitting on each physical qubit after all ops ran.
    std::vector<int> final_virtual_at() const {
        std::vector<int> vat(device.n);
        for (int v = 0; v < device.n; ++v) vat[initial_layout[v]] = v;
        int parts_seen = -1, pending_group = -1;
        for (const Gate& g : circ.ops) {
            if (g.kind != GateKind::Cx || g.swap_group < 0) continue;
            if (g.swap_group != pending_group) {
                pending_group = g.swap_group;
                parts_seen = 0;
            }
            if (++parts_seen == 3) std::swap(vat[g.q0], vat[g.q1]);
        }
        return vat;
    }
};

// Per-virtual-qubit role over the whole compiled circuit. A qubit is used if
// any real op (swap parts included) touches the physical qubit it occupies.
inline std::vector<QubitRole> classify_qubits(const CompiledCircuit& cc) {
    int n = cc.device.n;
    std::vector<int> vat(n);  // physical -> virtual
    for (int v = 0; v < n; ++v) vat[cc.initial_layout[v]] = v;
    std::vector<bool> touched(n, false), measured(n, false);
    int parts_seen = -1, pending_group = -1;
    for (const Gate& g : cc.circ.ops) {
        if (!is_real_op(g.kind)) continue;
        g.for_each_qubit([&](int p) { touched[vat[p]] = true; });
        if (g.kind == GateKind::Measure) measured[vat[g.q0]] = true;
        if (g.kind == GateKind::Cx && g.swap_group >= 0) {
            if (g.swap_group != pending_group) {
                pending_group = g.swap_group;
                parts_seen = 0;
            }
            if (++parts_seen == 3) std::swap(vat[g.q0], vat[g.q1]);
        }
    }
    std::vector<QubitRole> roles(n);
    for (int v = 0; v < n; ++v)
        roles[v] = measured[v] ? QubitRole::Outputting
                               : (touched[v] ? QubitRole::Assisting : QubitRole::UnusedAncilla);
    return roles;
}

}  // namespace qvul
