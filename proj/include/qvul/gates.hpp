// Gate-level IR: the basis gate set plus swap/measure/barrier markers.
#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace qvul {

enum class GateKind : std::uint8_t {
    Id,
    X,
    Sx,
    Rz,
    H,
    Z,
    Cx,
    Swap,
    Measure,
    Barrier,
};

inline const char* to_string(GateKind k) {
    switch (k) {
        case GateKind::Id: return "id";
        case GateKind::X: return "x";
        case GateKind::Sx: return "sx";
        case GateKind::Rz: return "rz";
        case GateKind::H: return "h";
        case GateKind::Z: return "z";
        case GateKind::Cx: return "cx";
        case GateKind::Swap: return "swap";
        case GateKind::Measure: return "measure";
        case GateKind::Barrier: return "barrier";
    }
    return "?";
}

inline bool is_two_qubit(GateKind k) {
    return k == GateKind::Cx || k == GateKind::Swap;
}

inline bool is_single_qubit_unitary(GateKind k) {
    switch (k) {
        case GateKind::Id:
        case GateKind::X:
        case GateKind::Sx:
        case GateKind::Rz:
        case GateKind::H:
        case GateKind::Z: return true;
        default: return false;
    }
}

// Identity and barrier leave the state alone; everything else counts as a
// computational operation for ancilla-usage and trashed-state purposes.
inline bool is_real_op(GateKind k) {
    return k != GateKind::Id && k != GateKind::Barrier;
}

struct Gate {
    GateKind kind = GateKind::Id;
    int q0 = -1;
    int q1 = -1;              // second operand of cx/swap
    double angle = 0.0;       // rz rotation
    int clbit = -1;           // measure destination
    std::vector<int> fence;   // barrier operand set
    int source = -1;          // index of the originating op before lowering
    int swap_group = -1;      // cx triplets expanded from one swap share an id

    static Gate id(int q) { return make1(GateKind::Id, q); }
    static Gate x(int q) { return make1(GateKind::X, q); }
    static Gate sx(int q) { return make1(GateKind::Sx, q); }
    static Gate h(int q) { return make1(GateKind::H, q); }
    static Gate z(int q) { return make1(GateKind::Z, q); }

    static Gate rz(double angle, int q) {
        if (!std::isfinite(angle)) throw std::invalid_argument("rz angle must be finite");
        Gate g = make1(GateKind::Rz, q);
        g.angle = angle;
        return g;
    }

    static Gate cx(int control, int target) { return make2(GateKind::Cx, control, target); }
    static Gate swap(int a, int b) { return make2(GateKind::Swap, a, b); }

    static Gate measure(int q, int c) {
        Gate g = make1(GateKind::Measure, q);
        g.clbit = c;
        return g;
    }

    static Gate barrier(std::vector<int> qubits) {
        Gate g;
        g.kind = GateKind::Barrier;
        g.fence = std::move(qubits);
        return g;
    }

    int num_operands() const { return is_two_qubit(kind) ? 2 : (kind == GateKind::Barrier ? int(fence.size()) : 1); }

    // Qubits the op touches, barrier included.
    template <typename Fn>
    void for_each_qubit(Fn&& fn) const {
        if (kind == GateKind::Barrier) {
            for (int q : fence) fn(q);
        } else {
            fn(q0);
            if (is_two_qubit(kind)) fn(q1);
        }
    }

  private:
    static Gate make1(GateKind k, int q) {
        Gate g;
        g.kind = k;
        g.q0 = q;
        return g;
    }
    static Gate make2(GateKind k, int a, int b) {
        if (a == b) throw std::invalid_argument(std::string(to_string(k)) + " requires two distinct operands");
        Gate g;
        g.kind = k;
        g.q0 = a;
        g.q1 = b;
        return g;
    }
};

}  // namespace qvul
