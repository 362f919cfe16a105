#include <catch2/catch_amalgamated.hpp>

#include "qvul/qasm.hpp"

using namespace qvul;

TEST_CASE("parser handles registers, gates and angle arithmetic") {
    const char* src = R"(
OPENQASM 2.0;
include "qelib1.inc";
// two quantum registers, flattened in declaration order
qreg q[3];
qreg anc[1];
creg c[3];
h q[0];
sx q[1];
rz(pi/2) q[2];
rz(-3*pi/4) q[0];
rz(0.25) q[1];
rz(2*(pi - 1)/4) q[2];
cx q[0],anc[0];
swap q[1],q[2];
id anc[0];
barrier q[0],q[1];
measure q[0] -> c[0];
)";
    Circuit c = parse_qasm(src);
    REQUIRE(c.num_qubits == 4);
    REQUIRE(c.num_clbits == 3);
    REQUIRE(c.ops.size() == 11);
    CHECK(c.ops[0].kind == GateKind::H);
    CHECK(c.ops[2].angle == Catch::Approx(M_PI / 2));
    CHECK(c.ops[3].angle == Catch::Approx(-3 * M_PI / 4));
    CHECK(c.ops[4].angle == Catch::Approx(0.25));
    CHECK(c.ops[5].angle == Catch::Approx((M_PI - 1) / 2));
    CHECK(c.ops[6].kind == GateKind::Cx);
    CHECK(c.ops[6].q1 == 3);  // anc[0] flattened after q
    CHECK(c.ops[7].kind == GateKind::Swap);
    CHECK(c.ops[9].fence == std::vector<int>{0, 1});
    CHECK(c.ops[10].clbit == 0);
    // source indices are the op positions in the file
    for (size_t i = 0; i < c.ops.size(); ++i) CHECK(c.ops[i].source == int(i));
}

TEST_CASE("whole-register broadcast") {
    Circuit c = parse_qasm("qreg q[3]; creg c[3]; h q; measure q -> c;");
    REQUIRE(c.ops.size() == 6);
    CHECK(c.ops[0].kind == GateKind::H);
    CHECK(c.ops[3].kind == GateKind::Measure);
    CHECK(c.ops[3].q0 == 0);
    CHECK(c.ops[3].clbit == 0);
    CHECK(c.ops[5].clbit == 2);
}

TEST_CASE("parse errors carry line and column") {
    auto parse = [](const char* s) { return parse_qasm(s); };
    CHECK_THROWS_AS(parse("qreg q[2]; cx q[0],q[0];"), QasmError);
    CHECK_THROWS_AS(parse("qreg q[2]; h q[5];"), QasmError);
    CHECK_THROWS_AS(parse("qreg q[2]; cz q[0],q[1];"), QasmError);
    CHECK_THROWS_AS(parse("qreg q[2]; rz q[0];"), QasmError);
    CHECK_THROWS_AS(parse("qreg q[2]; h q[0]"), QasmError);
    CHECK_THROWS_AS(parse("qreg q[2]; qreg q[3];"), QasmError);
    CHECK_THROWS_AS(parse("qreg q[1]; creg c[1];\nmeasure q[0] -> c[4];"), QasmError);
    try {
        parse_qasm("qreg q[2];\nh r[0];");
    } catch (const QasmError& e) {
        CHECK(e.line == 2);
        CHECK(e.col == 3);
    }
}

TEST_CASE("round trip through the serializer") {
    const char* src =
        "qreg q[4]; creg c[2];\n"
        "h q[0]; rz(pi/4) q[1]; cx q[0],q[1]; swap q[1],q[2];\n"
        "x q[3]; barrier q[0],q[3]; measure q[1] -> c[0]; measure q[2] -> c[1];\n";
    Circuit a = parse_qasm(src);
    Circuit b = parse_qasm(to_qasm(a));
    REQUIRE(a.ops.size() == b.ops.size());
    for (size_t i = 0; i < a.ops.size(); ++i) {
        CHECK(a.ops[i].kind == b.ops[i].kind);
        CHECK(a.ops[i].q0 == b.ops[i].q0);
        CHECK(a.ops[i].q1 == b.ops[i].q1);
        CHECK(a.ops[i].angle == b.ops[i].angle);
        CHECK(a.ops[i].clbit == b.ops[i].clbit);
    }
}

TEST_CASE("swap lowering is reversible and tracks the permutation") {
    Circuit c = parse_qasm("qreg q[3]; h q[0]; swap q[0],q[1]; swap q[1],q[2]; x q[1];");
    Circuit low = decompose_swaps(c);
    REQUIRE(low.ops.size() == 2 + 6);
    CHECK(low.ops[1].kind == GateKind::Cx);
    CHECK(low.ops[1].swap_group == 0);
    CHECK(low.ops[2].q0 == 1);  // middle part reversed
    CHECK(low.ops[4].swap_group == 1);
    CHECK(low.ops[1].source == c.ops[1].source);
    Circuit back = recombine_swaps(low);
    REQUIRE(back.ops.size() == c.ops.size());
    CHECK(back.ops[1].kind == GateKind::Swap);
    CHECK(back.ops[2].kind == GateKind::Swap);
}
