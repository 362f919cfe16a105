#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "qvul/analysis.hpp"
#include "qvul/bench.hpp"
#include "qvul/oracle.hpp"
#include "qvul/qasm.hpp"

using namespace qvul;

namespace {

Analysis analyze_source(const std::string& qasm, const DeviceTopology& dev) {
    Circuit c = parse_qasm(qasm);
    CompiledCircuit cc = CompiledCircuit::from_placed(c, dev);
    return analyze(cc);
}

}  // namespace

TEST_CASE("noiseless sampling reproduces the ideal outcome") {
    DeviceTopology dev = complete_topology(3);
    CalibrationSnapshot cal = CalibrationSnapshot::uniform(dev, 0.0, 0.0, 0.0);
    auto b = bench_bv(3, "11");
    Analysis a = analyze(CompiledCircuit::from_placed(b.circuit, dev));
    OracleOptions opt;
    opt.shots = 200;
    OracleResult r = sample_success_rate(a, cal, b.expected, opt);
    CHECK(r.correct == 200);
    CHECK(r.sr == Catch::Approx(1.0));
}

TEST_CASE("sampled rate matches the analytic value for one noisy gate") {
    // x then measure: a depolarizing fault after the x flips the outcome
    // with probability 2e/3, so sr = 1 - 2e/3
    DeviceTopology dev = complete_topology(1);
    CalibrationSnapshot cal = CalibrationSnapshot::uniform(dev, 0.3, 0.0, 0.0);
    Analysis a = analyze_source("qreg q[1]; creg c[1]; x q[0]; measure q[0] -> c[0];", dev);
    OracleOptions opt;
    opt.shots = 100000;
    opt.seed = 7;
    OracleResult r = sample_success_rate(a, cal, "1", opt);
    double expect = 1.0 - 2.0 * 0.3 / 3.0;
    double sigma = std::sqrt(expect * (1 - expect) / opt.shots);
    CHECK(std::abs(r.sr - expect) < 3 * sigma);
    CHECK(r.ci_half == Catch::Approx(1.96 * std::sqrt(r.sr * (1 - r.sr) / opt.shots)).epsilon(1e-9));
}

TEST_CASE("measurement flips obey the calibrated readout error") {
    DeviceTopology dev = complete_topology(1);
    CalibrationSnapshot cal = CalibrationSnapshot::uniform(dev, 0.0, 0.25, 0.0);
    Analysis a = analyze_source("qreg q[1]; creg c[1]; measure q[0] -> c[0];", dev);
    OracleOptions opt;
    opt.shots = 100000;
    opt.seed = 11;
    OracleResult r = sample_success_rate(a, cal, "0", opt);
    double sigma = std::sqrt(0.75 * 0.25 / opt.shots);
    CHECK(std::abs(r.sr - 0.75) < 3 * sigma);
}

TEST_CASE("sampling is reproducible and thread count invariant") {
    DeviceTopology dev = complete_topology(3);
    CalibrationSnapshot cal = CalibrationSnapshot::uniform(dev, 0.02, 0.03, 0.04);
    auto b = bench_dj(3, true);
    Analysis a = analyze(CompiledCircuit::from_placed(b.circuit, dev));
    OracleOptions one;
    one.shots = 4000;
    one.seed = 42;
    one.threads = 1;
    OracleOptions four = one;
    four.threads = 4;
    OracleResult r1 = sample_success_rate(a, cal, b.expected, one);
    OracleResult r2 = sample_success_rate(a, cal, b.expected, four);
    CHECK(r1.correct == r2.correct);
    OracleResult r3 = sample_success_rate(a, cal, b.expected, one);
    CHECK(r1.correct == r3.correct);
    OracleOptions other = one;
    other.seed = 43;
    OracleResult r4 = sample_success_rate(a, cal, b.expected, other);
    CHECK(r1.correct != r4.correct);  // distinct seed, distinct stream
    CHECK(r1.sr < 1.0);
    CHECK(r1.sr > 0.5);
}

TEST_CASE("fault injection leaves discarded cells inert") {
    Analysis a = analyze_source(
        "qreg q[3]; creg c[2];\n"
        "x q[2]; cx q[2],q[1]; x q[2]; cx q[1],q[0];\n"
        "measure q[0] -> c[0]; measure q[1] -> c[1];\n",
        complete_topology(3));
    Distribution clean = ideal_output(a);
    CHECK(clean.at("11") == Catch::Approx(1.0).margin(1e-12));
    for (int cyc = 0; cyc < a.sched.depth; ++cyc) {
        for (int q = 0; q < 3; ++q) {
            if (a.ace.ace(q, cyc)) continue;
            for (Pauli p : {Pauli::X, Pauli::Y, Pauli::Z}) {
                Distribution d = inject_pauli(a, q, cyc, p);
                INFO("cycle " << cyc << " qubit " << q << " pauli " << int(p));
                CHECK(clean.max_diff(d) < 1e-12);
            }
        }
    }
}

TEST_CASE("fault injection flips counted cells somewhere") {
    Analysis a = analyze_source(
        "qreg q[2]; creg c[2];\n"
        "x q[0]; cx q[0],q[1];\n"
        "measure q[0] -> c[0]; measure q[1] -> c[1];\n",
        complete_topology(2));
    Distribution clean = ideal_output(a);
    Distribution hit = inject_pauli(a, 0, 0, Pauli::X);  // undoes the x
    CHECK(hit.at("00") == Catch::Approx(1.0).margin(1e-12));
    CHECK(clean.max_diff(hit) == Catch::Approx(1.0).margin(1e-12));
}

TEST_CASE("phase faults on a kickback ancilla do reach the output") {
    // the ancilla sits in |->: a z between the two oracle cx ops kicks a
    // phase onto the second query, which is why those cells stay counted
    Analysis a = analyze(CompiledCircuit::from_placed(bench_bv(3, "11").circuit, complete_topology(3)));
    Distribution clean = ideal_output(a);
    CHECK(clean.at("11") == Catch::Approx(1.0).margin(1e-12));
    int anc = 2;
    int first_cx = -1;
    for (size_t i = 0; i < a.sched.ops.size(); ++i) {
        if (a.sched.ops[i].kind == GateKind::Cx) {
            first_cx = a.sched.op_cycle[i];
            break;
        }
    }
    REQUIRE(first_cx >= 0);
    REQUIRE(a.ace.ace(anc, first_cx));
    Distribution hit = inject_pauli(a, anc, first_cx, Pauli::Z);
    CHECK(clean.max_diff(hit) > 0.5);
}

TEST_CASE("oracle respects the qubit budget") {
    auto b = bench_qft(3, 5);
    DeviceTopology dev = complete_topology(3);
    Analysis a = analyze(CompiledCircuit::from_placed(b.circuit, dev));
    CalibrationSnapshot cal = CalibrationSnapshot::uniform(dev, 0.01, 0.01, 0.01);
    OracleOptions opt;
    opt.shots = 10;
    opt.max_qubits = 2;
    CHECK_THROWS(sample_success_rate(a, cal, b.expected, opt));
}
