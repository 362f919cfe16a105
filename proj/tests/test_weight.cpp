#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "qvul/analysis.hpp"
#include "qvul/qasm.hpp"
#include "qvul/weight.hpp"

using namespace qvul;

TEST_CASE("weight sweep walks the unit interval in percent steps") {
    DeviceTopology dev = line_topology(3);
    CalibrationSnapshot cal = CalibrationSnapshot::uniform(dev, 0.004, 0.02, 0.012);
    Circuit c = parse_qasm(
        "qreg q[3]; creg c[3];\n"
        "h q[0]; cx q[0],q[1]; cx q[1],q[2];\n"
        "measure q[0] -> c[0]; measure q[1] -> c[1]; measure q[2] -> c[2];\n");
    Analysis a = analyze(CompiledCircuit::from_placed(c, dev));
    SweepResult sweep = sweep_weights(a, cal, 0.88);
    REQUIRE(sweep.curve.size() == 101);
    CHECK(sweep.curve.front().weight == Catch::Approx(0.0));
    CHECK(sweep.curve.back().weight == Catch::Approx(1.0));
    CHECK(sweep.curve[37].weight == Catch::Approx(0.37));
    CHECK(sweep.real_sr == Catch::Approx(0.88));
    double best_err = 2.0;
    for (const auto& p : sweep.curve) {
        CHECK(p.abs_error == Catch::Approx(std::abs(p.prediction - 0.88)).margin(1e-15));
        best_err = std::min(best_err, p.abs_error);
    }
    for (const auto& p : sweep.curve)
        if (p.weight == sweep.best_weight) CHECK(p.abs_error == Catch::Approx(best_err));
}

TEST_CASE("sweep tie breaks toward the smaller weight") {
    DeviceTopology dev = complete_topology(2);
    CalibrationSnapshot cal = CalibrationSnapshot::uniform(dev, 0.0, 0.0, 0.0);
    // no error anywhere: every weight predicts exactly 1.0
    Circuit c = parse_qasm("qreg q[2]; creg c[1]; h q[0]; cx q[0],q[1]; measure q[0] -> c[0];");
    Analysis a = analyze(CompiledCircuit::from_placed(c, dev));
    SweepResult sweep = sweep_weights(a, cal, 0.5);
    CHECK(sweep.best_weight == Catch::Approx(0.0));
    CHECK(sweep.best_prediction == Catch::Approx(1.0));
}

TEST_CASE("depth bins are twenty five cycles wide") {
    CHECK(depth_bin(1) == 0);
    CHECK(depth_bin(25) == 0);
    CHECK(depth_bin(26) == 1);
    CHECK(depth_bin(50) == 1);
    CHECK(depth_bin(51) == 2);
    CHECK(depth_bin(312) == 12);
}

TEST_CASE("model fits the geometric mean per bin") {
    std::vector<WeightExperiment> exps;
    auto add = [&](const std::string& label, int depth, double w) {
        WeightExperiment e;
        e.label = label;
        e.depth = depth;
        e.best_weight = w;
        e.real_sr = 0.5;
        exps.push_back(e);
    };
    add("a", 10, 0.04);
    add("b", 20, 0.09);    // same bin: sqrt(0.04 * 0.09) = 0.06
    add("c", 30, 0.16);
    add("d", 40, 0.25);    // bin 1: 0.2
    add("e", 80, 0.0);     // clamps to 1e-3 before the mean
    WeightModel m = fit_weight_model(exps);
    REQUIRE(m.bins.size() == 3);
    CHECK(m.bins[0].index == 0);
    CHECK(m.bins[0].weight == Catch::Approx(0.06).epsilon(1e-12));
    CHECK(m.bins[1].weight == Catch::Approx(0.2).epsilon(1e-12));
    CHECK(m.bins[2].index == 3);
    CHECK(m.bins[2].weight == Catch::Approx(1e-3).epsilon(1e-12));
    CHECK(m.bins[0].experiments == 2);
}

TEST_CASE("weight lookup prefers exact bin then nearest") {
    WeightModel m;
    m.bins.push_back({0, 0.06, 2});
    m.bins.push_back({2, 0.01, 1});
    CHECK(choose_weight(m, 12) == Catch::Approx(0.06));    // bin 0 exact
    CHECK(choose_weight(m, 60) == Catch::Approx(0.01));    // bin 2 exact
    CHECK(choose_weight(m, 30) == Catch::Approx(0.06));    // bin 1 ties, lower wins
    CHECK(choose_weight(m, 90) == Catch::Approx(0.01));    // bin 3, nearest is 2
    WeightModel empty;
    CHECK(choose_weight(empty, 40) == Catch::Approx(kFallbackWeight));
}

TEST_CASE("weight model survives a json round trip") {
    WeightModel m;
    m.bin_width = 25;
    m.bins.push_back({0, 0.05, 4});
    m.bins.push_back({2, 0.002, 1});
    std::string s = weight_model_to_json(m).dump();
    WeightModel back = weight_model_from_json(nlohmann::json::parse(s));
    REQUIRE(back.bins.size() == 2);
    CHECK(back.bin_width == 25);
    CHECK(back.bins[0].weight == Catch::Approx(0.05));
    CHECK(back.bins[1].index == 2);
    CHECK(back.bins[1].experiments == 1);
}
