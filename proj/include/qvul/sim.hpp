// Dense statevector simulation of the supported gate set, used for ideal
// output distributions and for checking error-propagation claims. Unused
// qubits are compacted away before allocating the state.
#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <iterator>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "qvul/circuit.hpp"

namespace qvul {

enum class Pauli : std::uint8_t { X, Y, Z };

inline const char* to_string(Pauli p) {
    switch (p) {
        case Pauli::X: return "X";
        case Pauli::Y: return "Y";
        case Pauli::Z: return "Z";
    }
    return "?";
}

class StateVector {
  public:
    explicit StateVector(int n) : n_(n), amp_(size_t(1) << n) {
        if (n < 0 || n > 26) throw std::invalid_argument("statevector limited to 26 qubits");
        amp_[0] = 1.0;
    }

    int num_qubits() const { return n_; }
    const std::vector<std::complex<double>>& amplitudes() const { return amp_; }

    void apply(const Gate& g) {
        switch (g.kind) {
            case GateKind::Id:
            case GateKind::Barrier: return;
            case GateKind::X: return pauli(g.q0, Pauli::X);
            case GateKind::Z: return pauli(g.q0, Pauli::Z);
            case GateKind::H: return one_qubit(g.q0, kInvSqrt2, kInvSqrt2, kInvSqrt2, -kInvSqrt2);
            case GateKind::Sx: {
                std::complex<double> p(0.5, 0.5), m(0.5, -0.5);
                return one_qubit(g.q0, p, m, m, p);
            }
            case GateKind::Rz: {
                std::complex<double> e0 = std::polar(1.0, -g.angle / 2), e1 = std::polar(1.0, g.angle / 2);
                return one_qubit(g.q0, e0, 0.0, 0.0, e1);
            }
            case GateKind::Cx: return cx(g.q0, g.q1);
            case GateKind::Swap:
                cx(g.q0, g.q1);
                cx(g.q1, g.q0);
                cx(g.q0, g.q1);
                return;
            case GateKind::Measure:
                throw std::logic_error("measure must be handled by the caller");
        }
    }

    void pauli(int q, Pauli p) {
        size_t bit = size_t(1) << q;
        switch (p) {
            case Pauli::X:
                for (size_t i = 0; i < amp_.size(); ++i)
                    if (!(i & bit)) std::swap(amp_[i], amp_[i | bit]);
                return;
            case Pauli::Y:
                for (size_t i = 0; i < amp_.size(); ++i)
                    if (!(i & bit)) {
                        std::complex<double> a0 = amp_[i], a1 = amp_[i | bit];
                        amp_[i] = std::complex<double>(0, -1) * a1;
                        amp_[i | bit] = std::complex<double>(0, 1) * a0;
                    }
                return;
            case Pauli::Z:
                for (size_t i = 0; i < amp_.size(); ++i)
                    if (i & bit) amp_[i] = -amp_[i];
                return;
        }
    }

    void cx(int control, int target) {
        size_t cb = size_t(1) << control, tb = size_t(1) << target;
        for (size_t i = 0; i < amp_.size(); ++i)
            if ((i & cb) && !(i & tb)) std::swap(amp_[i], amp_[i | tb]);
    }

    double prob_one(int q) const {
        size_t bit = size_t(1) << q;
        double p = 0;
        for (size_t i = 0; i < amp_.size(); ++i)
            if (i & bit) p += std::norm(amp_[i]);
        return p;
    }

    // Collapse qubit q to the given outcome and renormalise. Returns the
    // probability the outcome had; a zero-probability branch empties the state.
    double project(int q, int outcome) {
        size_t bit = size_t(1) << q;
        double p = outcome ? prob_one(q) : 1.0 - prob_one(q);
        double scale = p > 0 ? 1.0 / std::sqrt(p) : 0.0;
        for (size_t i = 0; i < amp_.size(); ++i) {
            bool one = (i & bit) != 0;
            amp_[i] = (one == bool(outcome)) ? amp_[i] * scale : 0.0;
        }
        return p;
    }

  private:
    void one_qubit(int q, std::complex<double> m00, std::complex<double> m01, std::complex<double> m10,
                   std::complex<double> m11) {
        size_t bit = size_t(1) << q;
        for (size_t i = 0; i < amp_.size(); ++i)
            if (!(i & bit)) {
                std::complex<double> a0 = amp_[i], a1 = amp_[i | bit];
                amp_[i] = m00 * a0 + m01 * a1;
                amp_[i | bit] = m10 * a0 + m11 * a1;
            }
    }

    static constexpr double kInvSqrt2 = 0.70710678118654752440;

    int n_;
    std::vector<std::complex<double>> amp_;
};

// Probability distribution over classical bit strings. Keys are printed with
// clbit 0 as the rightmost character.
struct Distribution {
    std::map<std::string, double> probs;

    double at(const std::string& key) const {
        auto it = probs.find(key);
        return it == probs.end() ? 0.0 : it->second;
    }

    std::string most_likely() const {
        std::string best;
        double p = -1;
        for (const auto& [k, v] : probs)
            if (v > p) {
                p = v;
                best = k;
            }
        return best;
    }

    double max_diff(const Distribution& other) const {
        double d = 0;
        for (const auto& [k, v] : probs) d = std::max(d, std::abs(v - other.at(k)));
        for (const auto& [k, v] : other.probs) d = std::max(d, std::abs(v - at(k)));
        return d;
    }
};

namespace sim_detail {

// Dense renumbering of the qubits that real ops touch. Everything else stays
// in |0> and contributes nothing to measured marginals, so it is dropped.
struct Compaction {
    std::vector<int> dense;  // original -> dense index, -1 if dropped
    int count = 0;
};

inline Compaction compact_used(const Circuit& c) {
    Compaction m;
    m.dense.assign(c.num_qubits, -1);
    for (const Gate& g : c.ops)
        if (is_real_op(g.kind)) g.for_each_qubit([&](int q) {
            if (m.dense[q] < 0) m.dense[q] = m.count++;
        });
    return m;
}

}  // namespace sim_detail

// Exact output distribution of a circuit. Measurements with later real ops on
// the same qubit branch the simulation; trailing measurements are resolved by
// marginalising the final state, so wide circuits with one terminal
// measurement layer stay cheap.
inline Distribution simulate_ideal(const Circuit& circuit, int max_qubits = 22) {
    auto cm = sim_detail::compact_used(circuit);
    if (cm.count > max_qubits)
        throw std::runtime_error(circuit.name + ": simulation needs " + std::to_string(cm.count) +
                                 " live qubits, cap is " + std::to_string(max_qubits));

    // Last writer of each clbit decides the final value.
    std::vector<int> last_writer(circuit.num_clbits, -1);
    for (size_t i = 0; i < circuit.ops.size(); ++i)
        if (circuit.ops[i].kind == GateKind::Measure) last_writer[circuit.ops[i].clbit] = int(i);

    // Measure is terminal when nothing real touches the qubit afterwards.
    std::vector<bool> terminal(circuit.ops.size(), false);
    {
        std::vector<bool> live(circuit.num_qubits, false);
        for (size_t i = circuit.ops.size(); i-- > 0;) {
            const Gate& g = circuit.ops[i];
            if (g.kind == GateKind::Measure) terminal[i] = !live[g.q0];
            if (is_real_op(g.kind)) g.for_each_qubit([&](int q) { live[q] = true; });
        }
    }

    struct Branch {
        StateVector state;
        size_t next_op;
        double weight;
        std::vector<char> fixed;  // clbit -> 0/1 written by a non-terminal measure, -1 otherwise
    };

    // (qubit, clbit) pairs resolved from the final state. Terminal measures
    // never collapse anything, so the list is a property of the circuit and
    // is shared by every branch. Qubits no real op ever touches stay |0> and
    // are already covered by the base string.
    std::vector<std::pair<int, int>> marginals;
    for (size_t i = 0; i < circuit.ops.size(); ++i) {
        const Gate& g = circuit.ops[i];
        if (g.kind != GateKind::Measure || !terminal[i]) continue;
        if (int(i) == last_writer[g.clbit] && cm.dense[g.q0] >= 0)
            marginals.emplace_back(cm.dense[g.q0], g.clbit);
    }

    Distribution out;
    std::vector<Branch> stack;
    stack.push_back({StateVector(cm.count), 0, 1.0, std::vector<char>(circuit.num_clbits, -1)});

    while (!stack.empty()) {
        Branch br = std::move(stack.back());
        stack.pop_back();
        bool dead = false;

        for (size_t i = br.next_op; i < circuit.ops.size() && !dead; ++i) {
            const Gate& g = circuit.ops[i];
            if (g.kind == GateKind::Measure) {
                int q = cm.dense[g.q0];
                if (int(i) != last_writer[g.clbit]) {
                    // Overwritten later; still need the collapse if non-terminal.
                    if (!terminal[i]) {
                        double p1 = br.state.prob_one(q);
                        Branch other{br.state, i + 1, br.weight * p1, br.fixed};
                        other.state.project(q, 1);
                        if (p1 > 1e-15) stack.push_back(std::move(other));
                        br.weight *= (1.0 - p1);
                        if (br.weight <= 1e-15) {
                            dead = true;
                            break;
                        }
                        br.state.project(q, 0);
                    }
                    continue;
                }
                if (!terminal[i]) {
                    double p1 = br.state.prob_one(q);
                    Branch other{br.state, i + 1, br.weight * p1, br.fixed};
                    other.state.project(q, 1);
                    other.fixed[g.clbit] = 1;
                    if (p1 > 1e-15) stack.push_back(std::move(other));
                    br.weight *= (1.0 - p1);
                    if (br.weight <= 1e-15) {
                        dead = true;
                        break;
                    }
                    br.state.project(q, 0);
                    br.fixed[g.clbit] = 0;
                }
            } else if (is_real_op(g.kind)) {
                Gate local = g;
                local.q0 = cm.dense[g.q0];
                if (is_two_qubit(g.kind)) local.q1 = cm.dense[g.q1];
                br.state.apply(local);
            }
        }
        if (dead) continue;

        std::string base(size_t(circuit.num_clbits), '0');
        for (int c = 0; c < circuit.num_clbits; ++c)
            if (br.fixed[c] >= 0) base[circuit.num_clbits - 1 - c] = char('0' + br.fixed[c]);

        const auto& amp = br.state.amplitudes();
        std::map<std::string, double> bucket;
        for (size_t idx = 0; idx < amp.size(); ++idx) {
            double p = std::norm(amp[idx]);
            if (p == 0) continue;
            std::string key = base;
            for (const auto& [q, c] : marginals)
                key[circuit.num_clbits - 1 - c] = char('0' + ((idx >> q) & 1));
            bucket[key] += p;
        }
        for (auto& [k, v] : bucket) out.probs[k] += br.weight * v;
    }

    // Drop numerical dust so distribution comparisons stay readable.
    for (auto it = out.probs.begin(); it != out.probs.end();)
        it = it->second < 1e-14 ? out.probs.erase(it) : std::next(it);
    return out;
}

}  // namespace qvul
