#include <catch2/catch_amalgamated.hpp>

#include "qvul/circuit.hpp"
#include "qvul/topology.hpp"

using namespace qvul;

namespace {

bool fully_connected(const DeviceTopology& t) {
    auto dist = t.distance_matrix();
    for (int i = 0; i < t.n; ++i)
        for (int j = 0; j < t.n; ++j)
            if (dist[i][j] < 0) return false;
    return true;
}

int max_degree(const DeviceTopology& t) {
    auto adj = t.adjacency();
    size_t d = 0;
    for (auto& a : adj) d = std::max(d, a.size());
    return int(d);
}

}  // namespace

TEST_CASE("built-in topologies are sane") {
    for (const DeviceTopology& t : {line_topology(5), grid_topology(3, 3), hex27_topology(), hex127_topology()}) {
        INFO(t.name);
        CHECK_NOTHROW(t.validate());
        CHECK(fully_connected(t));
    }
    CHECK(hex27_topology().n == 27);
    CHECK(hex127_topology().n == 127);
    CHECK(max_degree(hex27_topology()) <= 3);
    CHECK(max_degree(hex127_topology()) <= 3);
    CHECK(hex127_topology().edges.size() == 144);
    CHECK(grid_topology(3, 3).edges.size() == 12);
}

TEST_CASE("topology resolver accepts names and json round trips") {
    CHECK(resolve_topology("line7").n == 7);
    CHECK(resolve_topology("grid2x4").n == 8);
    CHECK(resolve_topology("hex27").edges.size() == 28);
    CHECK(resolve_topology("complete4").edges.size() == 6);
    DeviceTopology t = grid_topology(2, 3);
    DeviceTopology back = topology_from_json(topology_to_json(t));
    CHECK(back.n == t.n);
    CHECK(back.edges == t.edges);
    CHECK_THROWS(resolve_topology("nonsense9"));
}

TEST_CASE("qubit roles from a compiled circuit") {
    // q0 measured, q1 touched only, q2 idle. Identity fill does not count.
    Circuit c("roles", 3, 1);
    c.add(Gate::h(0)).add(Gate::cx(0, 1)).add(Gate::id(2)).add(Gate::measure(0, 0));
    auto cc = CompiledCircuit::from_placed(c, complete_topology(3));
    auto roles = classify_qubits(cc);
    CHECK(roles[0] == QubitRole::Outputting);
    CHECK(roles[1] == QubitRole::Assisting);
    CHECK(roles[2] == QubitRole::UnusedAncilla);
}

TEST_CASE("roles follow qubits through routed swaps") {
    // Virtual 0 is swapped onto physical 1 before being measured there.
    Circuit c("swapped", 2, 1);
    c.add(Gate::h(0));
    c.add(Gate::swap(0, 1));
    c.add(Gate::measure(1, 0));
    auto cc = CompiledCircuit::from_placed(c, line_topology(2));
    auto roles = classify_qubits(cc);
    CHECK(roles[0] == QubitRole::Outputting);   // virtual 0 ends on physical 1
    CHECK(roles[1] == QubitRole::Assisting);    // virtual 1 took part in the swap
    auto vat = cc.final_virtual_at();
    CHECK(vat[1] == 0);
    CHECK(vat[0] == 1);
}

TEST_CASE("compiled circuits reject gates off the coupling map") {
    Circuit c("bad", 3, 0);
    c.add(Gate::cx(0, 2));
    CHECK_THROWS(CompiledCircuit::from_placed(c, line_topology(3)));
    Circuit ok("ok", 3, 0);
    ok.add(Gate::cx(0, 1));
    CHECK_NOTHROW(CompiledCircuit::from_placed(ok, line_topology(3)));
}
