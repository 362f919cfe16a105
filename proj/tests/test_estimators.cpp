#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "qvul/analysis.hpp"
#include "qvul/estimators.hpp"
#include "qvul/qasm.hpp"

using namespace qvul;

namespace {

Analysis analyze_source(const std::string& qasm, const DeviceTopology& dev) {
    Circuit c = parse_qasm(qasm);
    CompiledCircuit cc = CompiledCircuit::from_placed(c, dev);
    return analyze(cc);
}

}  // namespace

TEST_CASE("esp multiplies per-op success rates") {
    DeviceTopology dev = complete_topology(2);
    CalibrationSnapshot cal = CalibrationSnapshot::uniform(dev, 0.01, 0.02, 0.05);
    Analysis a = analyze_source("qreg q[2]; creg c[2]; h q[0]; cx q[0],q[1]; measure q[0] -> c[0]; measure q[1] -> c[1];",
                                dev);
    double expect = (1 - 0.01) * (1 - 0.05) * (1 - 0.02) * (1 - 0.02);
    CHECK(esp(a, cal) == Catch::Approx(expect).epsilon(1e-12));
}

TEST_CASE("esp counts ops the analysis discards") {
    DeviceTopology dev = complete_topology(2);
    CalibrationSnapshot cal = CalibrationSnapshot::uniform(dev, 0.25, 0.0, 0.0);
    // the trailing x lands on a dead row; esp has no notion of that
    Analysis a = analyze_source("qreg q[2]; creg c[1]; h q[0]; x q[1]; measure q[0] -> c[0];", dev);
    CHECK_FALSE(a.ace.ace(1, 0));
    CHECK(esp(a, cal) == Catch::Approx(0.75 * 0.75).epsilon(1e-12));
}

TEST_CASE("qvf averages calibrated error over counted cells only") {
    DeviceTopology dev = complete_topology(3);
    CalibrationSnapshot cal = CalibrationSnapshot::uniform(dev, 0.001, 0.02, 0.01);
    Analysis a = analyze_source(
        "qreg q[3]; creg c[2];\n"
        "x q[2]; cx q[2],q[1]; x q[2]; cx q[1],q[0];\n"
        "measure q[0] -> c[0]; measure q[1] -> c[1];\n",
        dev);
    // 12 cells, 2 discarded on the assist row; idle cells carry zero here
    QvfReport r = qvf(a, cal);
    double mass = 0.001          // x q2 @0
                  + 0.01 * 2     // cx q2,q1 @1, both cells
                  + 0.01 * 2     // cx q1,q0 @2
                  + 0.02 * 2;    // two measures @3
    CHECK(r.total == Catch::Approx(mass).epsilon(1e-12));
    CHECK(r.qvf == Catch::Approx(mass / (3.0 * 4.0)).epsilon(1e-12));
    CHECK(r.uqvf == Catch::Approx(mass / (3.0 * 4.0)).epsilon(1e-12));  // all rows used
    REQUIRE(r.per_cycle.size() == 4);
    CHECK(r.per_cycle[0] == Catch::Approx(0.001 / 3.0).epsilon(1e-12));
    CHECK(r.per_cycle[3] == Catch::Approx(0.04 / 3.0).epsilon(1e-12));
}

TEST_CASE("uqvf skips rows that never participate") {
    DeviceTopology dev = complete_topology(4);
    CalibrationSnapshot cal = CalibrationSnapshot::uniform(dev, 0.1, 0.0, 0.0);
    Analysis a = analyze_source("qreg q[4]; creg c[1]; x q[0]; measure q[0] -> c[0];", dev);
    QvfReport r = qvf(a, cal);
    CHECK(r.qvf == Catch::Approx(0.1 / (4.0 * 2.0)).epsilon(1e-12));
    CHECK(r.uqvf == Catch::Approx(0.1 / (1.0 * 2.0)).epsilon(1e-12));
}

TEST_CASE("idle cells contribute their calibrated identity error") {
    DeviceTopology dev = complete_topology(2);
    CalibrationSnapshot cal = CalibrationSnapshot::uniform(dev, 0.0, 0.0, 0.0);
    cal.qubits[1].id = 0.5;
    Analysis a = analyze_source(
        "qreg q[2]; creg c[2]; x q[0]; x q[0]; barrier q; measure q[0] -> c[0]; measure q[1] -> c[1];", dev);
    // the barrier holds q1's measure back, so it idles for two live cycles
    QvfReport r = qvf(a, cal);
    CHECK(r.total == Catch::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("cqv with full spread reproduces the shared-fate square") {
    DeviceTopology dev = complete_topology(2);
    CalibrationSnapshot cal = CalibrationSnapshot::uniform(dev, 0.0, 0.0, 0.0);
    cal.qubits[0].sx = 0.1;  // h draws on the sx rate
    Analysis a = analyze_source("qreg q[2]; creg c[2]; h q[0]; cx q[0],q[1]; measure q[0] -> c[0]; measure q[1] -> c[1];",
                                dev);
    CqvReport full = cqv(a, cal, 1.0);
    // w=1: the h error propagates wholesale across the cx, both survive at 0.9
    CHECK(full.final_success[0] == Catch::Approx(0.9).epsilon(1e-12));
    CHECK(full.final_success[1] == Catch::Approx(0.9).epsilon(1e-12));
    CHECK(full.one_minus_cqv == Catch::Approx(0.81).epsilon(1e-12));

    CqvReport none = cqv(a, cal, 0.0);
    // w=0: nothing crosses the cx, q1 never degrades
    CHECK(none.final_success[0] == Catch::Approx(0.9).epsilon(1e-12));
    CHECK(none.final_success[1] == Catch::Approx(1.0).epsilon(1e-12));
    CHECK(none.one_minus_cqv == Catch::Approx(0.9).epsilon(1e-12));
}

TEST_CASE("cqv interaction uses both pre-update survivals") {
    DeviceTopology dev = complete_topology(2);
    CalibrationSnapshot cal = CalibrationSnapshot::uniform(dev, 0.2, 0.0, 0.1);
    Analysis a = analyze_source("qreg q[2]; creg c[2]; x q[0]; x q[1]; cx q[0],q[1]; measure q[0] -> c[0]; measure q[1] -> c[1];",
                                dev);
    double w = 0.3;
    double gs = 1 - 0.1;
    double s0 = 0.8, s1 = 0.8;
    double n0 = s0 * gs * (1 - w * (1 - s1));
    double n1 = s1 * gs * (1 - w * (1 - s0));
    CqvReport r = cqv(a, cal, w);
    CHECK(r.final_success[0] == Catch::Approx(n0).epsilon(1e-12));
    CHECK(r.final_success[1] == Catch::Approx(n1).epsilon(1e-12));
    CHECK(r.one_minus_cqv == Catch::Approx(n0 * n1).epsilon(1e-12));
}

TEST_CASE("cqv skips discarded cells and non-outputting rows") {
    DeviceTopology dev = complete_topology(3);
    CalibrationSnapshot cal = CalibrationSnapshot::uniform(dev, 0.25, 0.0, 0.0);
    // the x on q2 feeds nothing; its error must not leak into the product
    Analysis a = analyze_source(
        "qreg q[3]; creg c[1]; h q[0]; x q[2]; measure q[0] -> c[0];", dev);
    CqvReport r = cqv(a, cal, 0.5);
    CHECK(r.final_success[0] == Catch::Approx(0.75).epsilon(1e-12));
    CHECK(r.final_success[2] == Catch::Approx(1.0).epsilon(1e-12));
    CHECK(r.one_minus_cqv == Catch::Approx(0.75).epsilon(1e-12));
}

TEST_CASE("cqv prediction decreases as the spread weight grows") {
    DeviceTopology dev = line_topology(4);
    CalibrationSnapshot cal = CalibrationSnapshot::uniform(dev, 0.003, 0.02, 0.015);
    Analysis a = analyze_source(
        "qreg q[4]; creg c[4];\n"
        "h q[0]; cx q[0],q[1]; cx q[1],q[2]; cx q[2],q[3];\n"
        "measure q[0] -> c[0]; measure q[1] -> c[1]; measure q[2] -> c[2]; measure q[3] -> c[3];\n",
        dev);
    double prev = 2.0;
    for (int i = 0; i <= 100; ++i) {
        double w = i / 100.0;
        double v = cqv(a, cal, w).one_minus_cqv;
        CHECK(v < prev);
        prev = v;
    }
}

TEST_CASE("crosstalk multiplier inflates simultaneous cx error") {
    DeviceTopology dev = line_topology(4);
    CalibrationSnapshot cal = CalibrationSnapshot::uniform(dev, 0.0, 0.0, 0.1);
    CrosstalkEntry ct;
    ct.aggressor = normalized_edge(2, 3);
    ct.victim = normalized_edge(0, 1);
    ct.multiplier = 3.0;
    cal.crosstalk.push_back(ct);
    // both cx fire in the same cycle; edge (0,1) takes the inflated rate
    Analysis sim = analyze_source(
        "qreg q[4]; creg c[4];\n"
        "cx q[0],q[1]; cx q[2],q[3];\n"
        "measure q[0] -> c[0]; measure q[1] -> c[1]; measure q[2] -> c[2]; measure q[3] -> c[3];\n",
        dev);
    CHECK(cal.crosstalk_multiplier(normalized_edge(0, 1), {normalized_edge(2, 3)}) == Catch::Approx(3.0));
    CqvReport r = cqv(sim, cal, 0.0);
    CHECK(r.final_success[0] == Catch::Approx(1 - 0.3).epsilon(1e-12));
    CHECK(r.final_success[2] == Catch::Approx(1 - 0.1).epsilon(1e-12));

    // sequential execution leaves the base rate in place
    Analysis seq = analyze_source(
        "qreg q[4]; creg c[4];\n"
        "cx q[0],q[1]; barrier q; cx q[2],q[3];\n"
        "measure q[0] -> c[0]; measure q[1] -> c[1]; measure q[2] -> c[2]; measure q[3] -> c[3];\n",
        dev);
    CqvReport r2 = cqv(seq, cal, 0.0);
    CHECK(r2.final_success[0] == Catch::Approx(1 - 0.1).epsilon(1e-12));

    QvfReport q1 = qvf(sim, cal);
    QvfReport q2 = qvf(seq, cal);
    CHECK(q1.total > q2.total);
}

TEST_CASE("adjusted cx error saturates at one") {
    DeviceTopology dev = line_topology(3);
    CalibrationSnapshot cal = CalibrationSnapshot::uniform(dev, 0.0, 0.0, 0.6);
    CrosstalkEntry ct;
    ct.aggressor = normalized_edge(1, 2);
    ct.victim = normalized_edge(0, 1);
    ct.multiplier = 2.0;
    cal.crosstalk.push_back(ct);
    CHECK(cal.adjusted_cx_error(0, 1, {normalized_edge(1, 2)}) == Catch::Approx(1.0));
    CHECK(cal.adjusted_cx_error(0, 1, {}) == Catch::Approx(0.6));
}
