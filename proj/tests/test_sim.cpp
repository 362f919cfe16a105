#include <catch2/catch_amalgamated.hpp>

#include "qvul/bench.hpp"
#include "qvul/qasm.hpp"
#include "qvul/sim.hpp"

using namespace qvul;

TEST_CASE("bell pair gives the two correlated outcomes") {
    Circuit c("bell", 2, 2);
    c.add(Gate::h(0)).add(Gate::cx(0, 1));
    c.add(Gate::measure(0, 0)).add(Gate::measure(1, 1));
    Distribution d = simulate_ideal(c);
    REQUIRE(d.probs.size() == 2);
    CHECK(d.at("00") == Catch::Approx(0.5));
    CHECK(d.at("11") == Catch::Approx(0.5));
}

TEST_CASE("sx twice equals x") {
    Circuit c("sxsx", 1, 1);
    c.add(Gate::sx(0)).add(Gate::sx(0)).add(Gate::measure(0, 0));
    CHECK(simulate_ideal(c).at("1") == Catch::Approx(1.0));
}

TEST_CASE("rz between hadamards rotates the outcome") {
    // h, rz(theta), h sends |0> to cos(theta/2)|0> - i sin(theta/2)|1>.
    double theta = 0.731;
    Circuit c("hrzh", 1, 1);
    c.add(Gate::h(0)).add(Gate::rz(theta, 0)).add(Gate::h(0)).add(Gate::measure(0, 0));
    Distribution d = simulate_ideal(c);
    CHECK(d.at("0") == Catch::Approx(std::cos(theta / 2) * std::cos(theta / 2)));
    CHECK(d.at("1") == Catch::Approx(std::sin(theta / 2) * std::sin(theta / 2)));
}

TEST_CASE("intermediate measurement branches the state") {
    // Measure a plus state, then flip conditioned on nothing: both branches
    // survive to the second measurement of the same qubit.
    Circuit c("mid", 1, 2);
    c.add(Gate::h(0));
    c.add(Gate::measure(0, 0));
    c.add(Gate::x(0));
    c.add(Gate::measure(0, 1));
    Distribution d = simulate_ideal(c);
    CHECK(d.at("10") == Catch::Approx(0.5));  // measured 0 then flipped to 1
    CHECK(d.at("01") == Catch::Approx(0.5));
}

TEST_CASE("branching keeps earlier trailing measurements") {
    // Bell pair, both measured; a later x on q1 makes its measurement branch
    // while q0's stays trailing. The correlation must survive the split.
    Circuit c("bellx", 2, 2);
    c.add(Gate::h(0)).add(Gate::cx(0, 1));
    c.add(Gate::measure(0, 0)).add(Gate::measure(1, 1));
    c.add(Gate::x(1));
    Distribution d = simulate_ideal(c);
    REQUIRE(d.probs.size() == 2);
    CHECK(d.at("00") == Catch::Approx(0.5));
    CHECK(d.at("11") == Catch::Approx(0.5));
}

TEST_CASE("measuring an untouched qubit reads zero") {
    Circuit c("idlem", 2, 2);
    c.add(Gate::x(0)).add(Gate::measure(0, 0)).add(Gate::measure(1, 1));
    CHECK(simulate_ideal(c).at("01") == Catch::Approx(1.0));
}

TEST_CASE("unused qubits do not enter the state") {
    Circuit c("wide", 25, 1);  // above the raw statevector cap
    c.add(Gate::x(3)).add(Gate::measure(3, 0));
    CHECK(simulate_ideal(c).at("1") == Catch::Approx(1.0));
}

TEST_CASE("pauli injection identities") {
    // Z before a hadamard flips the X-basis outcome; X before measure flips.
    Circuit c("zh", 1, 1);
    c.add(Gate::h(0)).add(Gate::z(0)).add(Gate::h(0)).add(Gate::measure(0, 0));
    CHECK(simulate_ideal(c).at("1") == Catch::Approx(1.0));

    Circuit m("xm", 1, 1);
    m.add(Gate::x(0)).add(Gate::x(0)).add(Gate::x(0)).add(Gate::measure(0, 0));
    CHECK(simulate_ideal(m).at("1") == Catch::Approx(1.0));
}

TEST_CASE("benchmarks produce their advertised outputs") {
    for (int size : {2, 3, 5, 7}) {
        auto bv = bench_bv(size, default_hidden_string(size - 1));
        INFO("bv size " << size);
        CHECK(simulate_ideal(bv.circuit).at(bv.expected) == Catch::Approx(1.0));
    }
    for (bool balanced : {false, true}) {
        auto dj = bench_dj(5, balanced);
        CHECK(simulate_ideal(dj.circuit).at(dj.expected) == Catch::Approx(1.0));
    }
    for (std::uint64_t v : {0ull, 1ull, 5ull, 12ull}) {
        auto qft = bench_qft(4, v);
        INFO("qft value " << v);
        CHECK(simulate_ideal(qft.circuit).at(qft.expected) == Catch::Approx(1.0));
    }
    for (std::uint64_t k : {0ull, 1ull, 3ull, 7ull}) {
        auto qpe = bench_qpe(4, k);
        INFO("qpe numerator " << k);
        CHECK(simulate_ideal(qpe.circuit).at(qpe.expected) == Catch::Approx(1.0));
    }
}

TEST_CASE("benchmark expectations match specific strings") {
    CHECK(bench_bv(4, "101").expected == "101");
    CHECK(bench_dj(4, false).expected == "000");
    CHECK(bench_dj(4, true).expected == "001");
    CHECK(bench_qft(4, 5).expected == "0101");
    CHECK(bench_qpe(4, 5).expected == "1101");
    CHECK(make_bench("bv", 4, "110").expected == "110");
}
