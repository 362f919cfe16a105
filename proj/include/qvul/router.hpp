// Layout selection and swap-insertion routing onto a coupling map, plus the
// small optimisation passes (native-basis lowering, adjacent-inverse
// cancellation). Deterministic: ties always break toward lower qubit indices.
#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "qvul/circuit.hpp"
#include "qvul/topology.hpp"

namespace qvul {

enum class LayoutStrategy { Trivial, Dense };
enum class RoutingStrategy { Greedy, Lookahead };

struct TranspileOptions {
    LayoutStrategy layout = LayoutStrategy::Dense;
    RoutingStrategy routing = RoutingStrategy::Lookahead;
    int opt_level = 1;  // 0 none, 1 native basis, 2 basis + cancellation
    // Carried through to run manifests. Both routing strategies break ties
    // deterministically, so the seed steers nothing today; reserved for
    // randomized strategies.
    std::uint64_t seed = 0;
};

struct TranspileStats {
    int swaps_inserted = 0;
    int ops_in = 0;
    int ops_out = 0;  // post-lowering, swaps counted as three cx
};

inline LayoutStrategy layout_from_name(const std::string& s) {
    if (s == "trivial") return LayoutStrategy::Trivial;
    if (s == "dense") return LayoutStrategy::Dense;
    throw std::invalid_argument("unknown layout '" + s + "' (expected trivial or dense)");
}

inline RoutingStrategy routing_from_name(const std::string& s) {
    if (s == "greedy") return RoutingStrategy::Greedy;
    if (s == "lookahead") return RoutingStrategy::Lookahead;
    throw std::invalid_argument("unknown routing '" + s + "' (expected greedy or lookahead)");
}

namespace router_detail {

// Pick a well-connected region of `count` device qubits: seed at the highest
// degree vertex and grow by most-edges-into-region.
inline std::vector<int> dense_region(const DeviceTopology& dev, int count) {
    auto adj = dev.adjacency();
    int seed = 0;
    for (int v = 1; v < dev.n; ++v)
        if (adj[v].size() > adj[seed].size()) seed = v;
    std::vector<bool> in(dev.n, false);
    std::vector<int> region{seed};
    in[seed] = true;
    while (int(region.size()) < count) {
        int best = -1, best_links = -1;
        for (int v = 0; v < dev.n; ++v) {
            if (in[v]) continue;
            int links = 0;
            for (int u : adj[v])
                if (in[u]) ++links;
            if (links == 0) continue;
            if (links > best_links || (links == best_links && adj[v].size() > adj[best].size()))
                std::tie(best, best_links) = std::tie(v, links);
        }
        if (best < 0) throw std::runtime_error("device too fragmented for dense layout");
        region.push_back(best);
        in[best] = true;
    }
    return region;
}

inline std::vector<int> initial_layout(const Circuit& logical, const DeviceTopology& dev, LayoutStrategy strategy) {
    int k = logical.num_qubits;
    std::vector<int> layout(dev.n);
    if (strategy == LayoutStrategy::Trivial) {
        std::iota(layout.begin(), layout.end(), 0);
        return layout;
    }
    std::vector<int> region = dense_region(dev, k);
    // Busier logical qubits go to better-connected region spots.
    std::vector<int> weight(size_t(k), 0);
    for (const Gate& g : logical.ops)
        if (is_two_qubit(g.kind)) {
            ++weight[size_t(g.q0)];
            ++weight[size_t(g.q1)];
        }
    std::vector<int> order(static_cast<size_t>(k));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return weight[size_t(a)] > weight[size_t(b)]; });

    std::vector<bool> in(dev.n, false);
    for (int p : region) in[p] = true;
    auto adj = dev.adjacency();
    std::vector<int> internal(dev.n, 0);
    for (int p : region)
        for (int u : adj[p])
            if (in[u]) ++internal[p];
    std::stable_sort(region.begin(), region.end(), [&](int a, int b) { return internal[a] > internal[b]; });

    for (int i = 0; i < k; ++i) layout[order[size_t(i)]] = region[size_t(i)];
    std::vector<int> rest;
    for (int p = 0; p < dev.n; ++p)
        if (!in[p]) rest.push_back(p);
    size_t r = 0;
    for (int v = k; v < dev.n; ++v) layout[v] = rest[r++];
    return layout;
}

}  // namespace router_detail

// Route a logical circuit onto the device. Ops are processed in program
// order; a blocked two-qubit op triggers swap insertion along a shortest
// path. Lookahead scores candidate swaps against the next few pending
// two-qubit ops with geometrically decaying weights.
inline CompiledCircuit transpile(const Circuit& logical, const DeviceTopology& dev, const TranspileOptions& opt = {},
                                 TranspileStats* stats = nullptr);

namespace router_detail {

inline Circuit route(const Circuit& logical, const DeviceTopology& dev, const std::vector<int>& layout,
                     RoutingStrategy strategy, TranspileStats* stats) {
    auto dist = dev.distance_matrix();
    std::vector<int> l2p = layout;  // virtual -> physical, all device qubits
    Circuit out(logical.name, dev.n, logical.num_clbits);

    // Skip table: next two-qubit op at or after each position.
    std::vector<int> next2q(logical.ops.size() + 1);
    next2q[logical.ops.size()] = int(logical.ops.size());
    for (size_t i = logical.ops.size(); i-- > 0;)
        next2q[i] = is_two_qubit(logical.ops[i].kind) ? int(i) : next2q[i + 1];

    constexpr int kLookahead = 20;
    constexpr double kDecay = 0.5;

    for (size_t i = 0; i < logical.ops.size(); ++i) {
        const Gate& g = logical.ops[i];
        if (!is_two_qubit(g.kind)) {
            Gate placed = g;
            if (g.kind == GateKind::Barrier) {
                for (int& q : placed.fence) q = l2p[q];
            } else {
                placed.q0 = l2p[g.q0];
            }
            placed.source = int(i);
            out.ops.push_back(std::move(placed));
            continue;
        }
        while (dist[l2p[g.q0]][l2p[g.q1]] > 1) {
            int pa = l2p[g.q0], pb = l2p[g.q1];
            // Candidates: edges at either endpoint that shorten this op.
            Edge chosen{-1, -1};
            double chosen_cost = std::numeric_limits<double>::infinity();
            for (const Edge& e : dev.edges) {
                bool at_a = e.first == pa || e.second == pa;
                bool at_b = e.first == pb || e.second == pb;
                if (!at_a && !at_b) continue;
                int qa = pa, qb = pb;
                auto moved = [&](int p) { return p == e.first ? e.second : (p == e.second ? e.first : p); };
                qa = moved(qa);
                qb = moved(qb);
                if (dist[qa][qb] >= dist[pa][pb]) continue;
                double cost = dist[qa][qb];
                if (strategy == RoutingStrategy::Lookahead) {
                    double w = kDecay;
                    int seen = 0;
                    for (int j = next2q[i + 1]; seen < kLookahead && j < int(logical.ops.size());
                         j = next2q[j + 1], ++seen) {
                        const Gate& f = logical.ops[size_t(j)];
                        cost += w * dist[moved(l2p[f.q0])][moved(l2p[f.q1])];
                        w *= kDecay;
                    }
                }
                if (cost < chosen_cost - 1e-12) {
                    chosen_cost = cost;
                    chosen = e;
                }
            }
            if (chosen.first < 0) throw std::runtime_error("routing found no distance-reducing swap");
            Gate sw = Gate::swap(chosen.first, chosen.second);
            sw.source = -1;
            out.ops.push_back(std::move(sw));
            if (stats) ++stats->swaps_inserted;
            // The emitted swap is physical; update which virtuals sit there.
            int va = -1, vb = -1;
            for (int v = 0; v < dev.n; ++v) {
                if (l2p[v] == chosen.first) va = v;
                if (l2p[v] == chosen.second) vb = v;
            }
            std::swap(l2p[va], l2p[vb]);
        }
        Gate placed = g;
        placed.q0 = l2p[g.q0];
        placed.q1 = l2p[g.q1];
        placed.source = int(i);
        out.ops.push_back(std::move(placed));
    }
    return out;
}

// h -> rz(pi/2) sx rz(pi/2), z -> rz(pi); exact up to global phase.
inline Circuit lower_to_native(const Circuit& in) {
    constexpr double kHalfPi = 1.57079632679489661923;
    Circuit out(in.name, in.num_qubits, in.num_clbits);
    out.ops.reserve(in.ops.size());
    for (const Gate& g : in.ops) {
        if (g.kind == GateKind::H) {
            for (Gate part : {Gate::rz(kHalfPi, g.q0), Gate::sx(g.q0), Gate::rz(kHalfPi, g.q0)}) {
                part.source = g.source;
                out.ops.push_back(std::move(part));
            }
        } else if (g.kind == GateKind::Z) {
            Gate part = Gate::rz(2 * kHalfPi, g.q0);
            part.source = g.source;
            out.ops.push_back(std::move(part));
        } else {
            out.ops.push_back(g);
        }
    }
    return out;
}

// Cancel adjacent self-inverse pairs and merge runs of rz on one qubit.
// Adjacent means no intervening op touches any shared qubit; measures and
// barriers fence everything they touch.
inline Circuit cancel_adjacent(const Circuit& in) {
    Circuit out(in.name, in.num_qubits, in.num_clbits);
    std::vector<int> last(size_t(in.num_qubits), -1);  // qubit -> index into out.ops

    auto rebuild = [&] {
        std::fill(last.begin(), last.end(), -1);
        for (size_t j = 0; j < out.ops.size(); ++j)
            out.ops[j].for_each_qubit([&](int q) { last[size_t(q)] = int(j); });
    };

    for (const Gate& g : in.ops) {
        bool cancelled = false;
        if (g.kind == GateKind::X || g.kind == GateKind::H || g.kind == GateKind::Z || g.kind == GateKind::Rz ||
            g.kind == GateKind::Cx || g.kind == GateKind::Swap) {
            int prev = last[size_t(g.q0)];
            bool aligned = prev >= 0;
            if (is_two_qubit(g.kind)) aligned = aligned && last[size_t(g.q1)] == prev;
            if (aligned) {
                Gate& p = out.ops[size_t(prev)];
                bool same_pair = p.q0 == g.q0 && p.q1 == g.q1;
                bool same_edge = same_pair || (p.q0 == g.q1 && p.q1 == g.q0);
                if (p.kind == g.kind && g.kind == GateKind::Rz && p.q0 == g.q0) {
                    p.angle += g.angle;
                    cancelled = true;
                    if (p.angle == 0.0) {
                        out.ops.erase(out.ops.begin() + prev);
                        rebuild();
                    }
                } else if (p.kind == g.kind &&
                           ((g.kind == GateKind::Cx && same_pair) || (g.kind == GateKind::Swap && same_edge) ||
                            (!is_two_qubit(g.kind) && g.kind != GateKind::Rz && p.q0 == g.q0))) {
                    out.ops.erase(out.ops.begin() + prev);
                    rebuild();
                    cancelled = true;
                }
            }
        }
        if (!cancelled) {
            out.ops.push_back(g);
            int idx = int(out.ops.size()) - 1;
            g.for_each_qubit([&](int q) { last[size_t(q)] = idx; });
        }
    }
    return out;
}

}  // namespace router_detail

inline CompiledCircuit transpile(const Circuit& logical, const DeviceTopology& dev, const TranspileOptions& opt,
                                 TranspileStats* stats) {
    logical.validate();
    if (logical.num_qubits > dev.n)
        throw std::invalid_argument(logical.name + " needs " + std::to_string(logical.num_qubits) +
                                    " qubits but " + dev.name + " has " + std::to_string(dev.n));
    if (stats) {
        *stats = {};
        stats->ops_in = int(logical.ops.size());
    }
    std::vector<int> layout = router_detail::initial_layout(logical, dev, opt.layout);
    Circuit routed = router_detail::route(logical, dev, layout, opt.routing, stats);
    if (opt.opt_level >= 2) routed = router_detail::cancel_adjacent(routed);
    if (opt.opt_level >= 1) routed = router_detail::lower_to_native(routed);
    if (opt.opt_level >= 2) routed = router_detail::cancel_adjacent(routed);
    CompiledCircuit cc(std::move(routed), dev, std::move(layout), logical.num_qubits);
    if (stats) stats->ops_out = int(cc.circ.ops.size());
    return cc;
}

}  // namespace qvul
