// Flow-weight selection for the cumulative estimator: exhaustive 1% sweep
// against a measured success rate, and a depth-binned geometric-mean model
// fitted over many sweep results.
#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "qvul/analysis.hpp"
#include "qvul/estimators.hpp"

namespace qvul {

constexpr double kFallbackWeight = 0.1;
constexpr double kWeightClamp = 1e-3;  // floor before taking logs
constexpr int kDefaultBinWidth = 25;

struct SweepPoint {
    double weight = 0.0;
    double prediction = 0.0;  // 1 - cqv at this weight
    double abs_error = 0.0;
};

struct SweepResult {
    double best_weight = 0.0;
    double best_prediction = 0.0;
    double real_sr = 0.0;
    std::vector<SweepPoint> curve;  // 101 points, weight 0.00 .. 1.00
};

// Evaluate all weights on the 1% grid; ties go to the smaller weight.
inline SweepResult sweep_weights(const Analysis& a, const CalibrationSnapshot& calib, double real_sr) {
    if (real_sr < 0.0 || real_sr > 1.0) throw std::invalid_argument("real success rate must lie in [0,1]");
    SweepResult r;
    r.real_sr = real_sr;
    r.curve.reserve(101);
    for (int i = 0; i <= 100; ++i) {
        SweepPoint p;
        p.weight = i / 100.0;
        p.prediction = cqv(a.sched, a.booking, a.ace, calib, a.roles, p.weight).one_minus_cqv;
        p.abs_error = std::abs(p.prediction - real_sr);
        r.curve.push_back(p);
    }
    const SweepPoint* best = &r.curve[0];
    for (const SweepPoint& p : r.curve)
        if (p.abs_error < best->abs_error - 1e-15) best = &p;
    r.best_weight = best->weight;
    r.best_prediction = best->prediction;
    return r;
}

struct WeightExperiment {
    std::string label;
    int depth = 0;
    double best_weight = 0.0;
    double real_sr = 0.0;
};

struct WeightBin {
    int index = 0;  // covers depths [index*width + 1, (index+1)*width]
    double weight = 0.0;
    int experiments = 0;
};

struct WeightModel {
    int bin_width = kDefaultBinWidth;
    std::vector<WeightBin> bins;  // sorted by index, only populated bins
};

inline int depth_bin(int depth, int bin_width = kDefaultBinWidth) {
    if (depth < 1) throw std::invalid_argument("circuit depth must be positive");
    return (depth - 1) / bin_width;
}

// Geometric mean of best weights per depth bin, clamped away from zero so a
// single zero sample cannot force the whole bin to zero.
inline WeightModel fit_weight_model(const std::vector<WeightExperiment>& runs, int bin_width = kDefaultBinWidth) {
    if (bin_width < 1) throw std::invalid_argument("bin width must be positive");
    WeightModel m;
    m.bin_width = bin_width;
    std::map<int, std::pair<double, int>> acc;  // bin -> (sum of logs, count)
    for (const WeightExperiment& e : runs) {
        int b = depth_bin(e.depth, bin_width);
        acc[b].first += std::log(std::max(e.best_weight, kWeightClamp));
        acc[b].second += 1;
    }
    for (const auto& [index, sums] : acc)
        m.bins.push_back({index, std::exp(sums.first / sums.second), sums.second});
    return m;
}

// Exact bin when fitted, otherwise the nearest fitted bin (ties toward the
// shallower one); the fallback constant when the model is empty.
inline double choose_weight(const WeightModel& m, int depth) {
    if (m.bins.empty()) return kFallbackWeight;
    int want = depth_bin(depth, m.bin_width);
    const WeightBin* best = &m.bins[0];
    for (const WeightBin& b : m.bins) {
        int d_best = std::abs(best->index - want), d_b = std::abs(b.index - want);
        if (d_b < d_best || (d_b == d_best && b.index < best->index)) best = &b;
    }
    return best->weight;
}

inline nlohmann::ordered_json weight_model_to_json(const WeightModel& m) {
    nlohmann::ordered_json j;
    j["bin_width"] = m.bin_width;
    j["fallback"] = kFallbackWeight;
    auto bins = nlohmann::ordered_json::array();
    for (const WeightBin& b : m.bins) {
        nlohmann::ordered_json jb;
        jb["index"] = b.index;
        jb["depth_min"] = b.index * m.bin_width + 1;
        jb["depth_max"] = (b.index + 1) * m.bin_width;
        jb["weight"] = b.weight;
        jb["experiments"] = b.experiments;
        bins.push_back(std::move(jb));
    }
    j["bins"] = bins;
    return j;
}

inline WeightModel weight_model_from_json(const nlohmann::json& j) {
    WeightModel m;
    m.bin_width = j.value("bin_width", kDefaultBinWidth);
    if (m.bin_width < 1) throw std::invalid_argument("weight model has a bad bin width");
    for (const auto& jb : j.value("bins", nlohmann::json::array())) {
        WeightBin b;
        b.index = jb.at("index").get<int>();
        b.weight = jb.at("weight").get<double>();
        b.experiments = jb.value("experiments", 0);
        if (b.index < 0 || b.weight < 0 || b.weight > 1)
            throw std::invalid_argument("weight model bin out of range");
        m.bins.push_back(b);
    }
    std::sort(m.bins.begin(), m.bins.end(), [](const WeightBin& a, const WeightBin& b) { return a.index < b.index; });
    return m;
}

inline nlohmann::ordered_json experiments_to_json(const std::vector<WeightExperiment>& runs) {
    auto arr = nlohmann::ordered_json::array();
    for (const WeightExperiment& e : runs) {
        nlohmann::ordered_json je;
        je["label"] = e.label;
        je["depth"] = e.depth;
        je["best_weight"] = e.best_weight;
        je["real_sr"] = e.real_sr;
        arr.push_back(std::move(je));
    }
    nlohmann::ordered_json j;
    j["experiments"] = arr;
    return j;
}

inline std::vector<WeightExperiment> experiments_from_json(const nlohmann::json& j) {
    std::vector<WeightExperiment> runs;
    for (const auto& je : j.value("experiments", nlohmann::json::array())) {
        WeightExperiment e;
        e.label = je.value("label", "");
        e.depth = je.at("depth").get<int>();
        e.best_weight = je.at("best_weight").get<double>();
        e.real_sr = je.value("real_sr", 0.0);
        runs.push_back(std::move(e));
    }
    return runs;
}

}  // namespace qvul
