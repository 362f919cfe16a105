#include <catch2/catch_amalgamated.hpp>

#include "qvul/bench.hpp"
#include "qvul/router.hpp"
#include "qvul/schedule.hpp"
#include "qvul/sim.hpp"

using namespace qvul;

namespace {

TranspileOptions opts(LayoutStrategy l, RoutingStrategy r, int lvl) {
    TranspileOptions o;
    o.layout = l;
    o.routing = r;
    o.opt_level = lvl;
    return o;
}

}  // namespace

TEST_CASE("routing preserves circuit semantics across options") {
    std::vector<BenchCircuit> benches;
    benches.push_back(bench_bv(5, "1011"));
    benches.push_back(bench_dj(4, true));
    benches.push_back(bench_qft(4, 9));
    benches.push_back(bench_qpe(4, 3));
    for (const DeviceTopology& dev : {line_topology(6), grid_topology(3, 3)}) {
        for (const auto& b : benches) {
            for (auto layout : {LayoutStrategy::Trivial, LayoutStrategy::Dense}) {
                for (auto routing : {RoutingStrategy::Greedy, RoutingStrategy::Lookahead}) {
                    for (int lvl : {0, 1, 2}) {
                        INFO(b.circuit.name << " on " << dev.name << " layout " << int(layout) << " routing "
                                            << int(routing) << " opt " << lvl);
                        CompiledCircuit cc = transpile(b.circuit, dev, opts(layout, routing, lvl));
                        REQUIRE_NOTHROW(cc.validate());
                        Distribution d = simulate_ideal(cc.circ);
                        CHECK(d.at(b.expected) == Catch::Approx(1.0).margin(1e-9));
                    }
                }
            }
        }
    }
}

TEST_CASE("transpile reports stats and respects qubit budget") {
    auto b = bench_qft(5, 3);
    TranspileStats stats;
    CompiledCircuit cc = transpile(b.circuit, line_topology(5), opts(LayoutStrategy::Trivial, RoutingStrategy::Greedy, 0),
                                   &stats);
    CHECK(stats.ops_in == int(b.circuit.ops.size()));
    CHECK(stats.swaps_inserted > 0);  // line topology forces movement
    CHECK(cc.circ.count(GateKind::Swap) == 0);
    CHECK_THROWS(transpile(b.circuit, line_topology(4), opts(LayoutStrategy::Trivial, RoutingStrategy::Greedy, 0)));
}

TEST_CASE("opt level one lowers to the native basis") {
    auto b = bench_bv(4, "111");
    CompiledCircuit cc = transpile(b.circuit, grid_topology(2, 2), opts(LayoutStrategy::Trivial, RoutingStrategy::Greedy, 1));
    for (const Gate& g : cc.circ.ops) {
        CHECK(g.kind != GateKind::H);
        CHECK(g.kind != GateKind::Z);
    }
}

TEST_CASE("cancellation removes adjacent inverse pairs") {
    Circuit c("redundant", 2, 1);
    c.add(Gate::h(0)).add(Gate::h(0));          // cancels
    c.add(Gate::x(1)).add(Gate::x(1));          // cancels
    c.add(Gate::cx(0, 1)).add(Gate::cx(0, 1));  // cancels
    c.add(Gate::rz(0.5, 0)).add(Gate::rz(-0.5, 0));
    c.add(Gate::x(0));
    c.add(Gate::measure(0, 0));
    CompiledCircuit cc = transpile(c, line_topology(2), opts(LayoutStrategy::Trivial, RoutingStrategy::Greedy, 2));
    REQUIRE(cc.circ.ops.size() == 2);
    CHECK(cc.circ.ops[0].kind == GateKind::X);
    CHECK(cc.circ.ops[1].kind == GateKind::Measure);
}

TEST_CASE("cancellation respects intervening ops") {
    Circuit c("guarded", 2, 2);
    c.add(Gate::x(0)).add(Gate::cx(0, 1)).add(Gate::x(0));  // cx blocks the pair
    c.add(Gate::measure(0, 0)).add(Gate::measure(1, 1));
    CompiledCircuit cc = transpile(c, line_topology(2), opts(LayoutStrategy::Trivial, RoutingStrategy::Greedy, 2));
    CHECK(cc.circ.ops.size() == 5);
}

TEST_CASE("asap schedule packs independent ops and fences on barriers") {
    Circuit c("sched", 3, 1);
    c.add(Gate::h(0)).add(Gate::h(1));
    c.add(Gate::cx(0, 1));
    c.add(Gate::barrier({0, 1, 2}));
    c.add(Gate::x(2));
    c.add(Gate::measure(0, 0));
    CompiledCircuit cc = CompiledCircuit::from_placed(c, complete_topology(3));
    CycleSchedule s = schedule_asap(cc);
    REQUIRE(s.ops.size() == 5);  // barrier owns no slot
    CHECK(s.op_cycle[0] == 0);
    CHECK(s.op_cycle[1] == 0);
    CHECK(s.op_cycle[2] == 1);
    CHECK(s.op_cycle[3] == 2);  // x after barrier fences to cycle 2
    CHECK(s.op_cycle[4] == 2);
    CHECK(s.depth == 3);
    CHECK(s.kind_at(2, 0) == GateKind::Id);  // identity fill
    CHECK(s.kind_at(0, 1) == GateKind::Cx);
}

TEST_CASE("swap parts schedule on consecutive cycles") {
    Circuit c("swapped", 3, 1);
    c.add(Gate::swap(0, 1));
    c.add(Gate::measure(1, 0));
    CompiledCircuit cc = CompiledCircuit::from_placed(c, line_topology(3));
    CycleSchedule s = schedule_asap(cc);
    REQUIRE(s.ops.size() == 4);
    CHECK(s.op_cycle[0] == 0);
    CHECK(s.op_cycle[1] == 1);
    CHECK(s.op_cycle[2] == 2);
    CHECK(s.op_cycle[3] == 3);
    CHECK(s.depth == 4);
}
