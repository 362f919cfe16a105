// Calibration snapshots: per-qubit and per-edge error rates plus optional
// crosstalk multipliers between simultaneously driven edge pairs. Loading
// fills gaps from the snapshot's own averages (or bundled defaults) and
// collects human-readable warnings instead of failing.
#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "qvul/gates.hpp"
#include "qvul/topology.hpp"

namespace qvul {

// Bundled fallback rates: averages observed on a 27-qubit production device.
constexpr double kDefaultSingleQubitError = 5.04e-4;
constexpr double kDefaultMeasureError = 3.05e-2;
constexpr double kDefaultCxError = 2.11e-2;

struct QubitCalibration {
    double id = 0.0;
    double x = kDefaultSingleQubitError;
    double sx = kDefaultSingleQubitError;
    double rz = 0.0;  // virtual-frame rotation, error-free on most stacks
    double meas = kDefaultMeasureError;
};

struct CrosstalkEntry {
    Edge aggressor;  // "edge" in the file
    Edge victim;     // "victim_edge"
    double multiplier = 1.0;
};

struct CalibrationSnapshot {
    std::string date;
    std::vector<QubitCalibration> qubits;
    std::map<Edge, double> cx;
    std::vector<CrosstalkEntry> crosstalk;
    std::vector<std::string> warnings;

    static CalibrationSnapshot uniform(const DeviceTopology& dev, double sq, double meas, double cx_err,
                                       double id_err = 0.0) {
        CalibrationSnapshot s;
        s.date = "uniform";
        s.qubits.assign(size_t(dev.n), QubitCalibration{id_err, sq, sq, 0.0, meas});
        for (const Edge& e : dev.edges) s.cx[e] = cx_err;
        return s;
    }

    int num_qubits() const { return int(qubits.size()); }

    double single_error(GateKind k, int q) const {
        const QubitCalibration& c = qubits.at(size_t(q));
        switch (k) {
            case GateKind::Id: return c.id;
            case GateKind::X: return c.x;
            case GateKind::Sx: return c.sx;
            case GateKind::Rz: return c.rz;
            case GateKind::H: return c.sx;  // nearest native class
            case GateKind::Z: return c.rz;
            case GateKind::Measure: return c.meas;
            default: throw std::invalid_argument("single_error asked for a two-qubit kind");
        }
    }

    double cx_error(int a, int b) const {
        auto it = cx.find(normalized_edge(a, b));
        if (it == cx.end()) throw std::invalid_argument("no cx calibration for edge " + std::to_string(a) + "," +
                                                        std::to_string(b));
        return it->second;
    }

    // Combined multiplier on the victim edge's error given the other cx
    // edges driven in the same cycle.
    double crosstalk_multiplier(const Edge& victim, const std::vector<Edge>& simultaneous) const {
        double m = 1.0;
        for (const CrosstalkEntry& e : crosstalk) {
            if (e.victim != victim) continue;
            for (const Edge& other : simultaneous)
                if (other == e.aggressor && other != victim) m *= e.multiplier;
        }
        return m;
    }

    double adjusted_cx_error(int a, int b, const std::vector<Edge>& simultaneous) const {
        Edge e = normalized_edge(a, b);
        return std::min(1.0, cx_error(a, b) * crosstalk_multiplier(e, simultaneous));
    }
};

namespace calib_detail {

inline Edge edge_from_json(const nlohmann::json& j) {
    if (!j.is_array() || j.size() != 2) throw std::invalid_argument("calibration edge must be a pair");
    return normalized_edge(j[0].get<int>(), j[1].get<int>());
}

}  // namespace calib_detail

// Schema:
// {
//   "date": "...",
//   "qubits": [{"id": 0, "errors": {"x":..,"sx":..,"rz":..,"id":..}, "meas": ..}, ...],
//   "edges":  [{"pair": [a,b], "cx": ..}, ...],
//   "crosstalk": [{"edge": [a,b], "victim_edge": [c,d], "multiplier": m}, ...]
// }
// Qubits or edges the file misses are filled from the file's own averages
// (bundled defaults when the file has none at all) with a warning.
inline CalibrationSnapshot calibration_from_json(const nlohmann::json& j, const DeviceTopology& dev) {
    CalibrationSnapshot s;
    s.date = j.value("date", "unknown");

    double avg_x = 0, avg_sx = 0, avg_rz = 0, avg_id = 0, avg_meas = 0;
    int seen = 0;
    std::vector<std::optional<QubitCalibration>> given(size_t(dev.n));
    for (const auto& jq : j.value("qubits", nlohmann::json::array())) {
        int id = jq.at("id").get<int>();
        if (id < 0 || id >= dev.n)
            throw std::invalid_argument("calibration qubit id " + std::to_string(id) + " not on device");
        QubitCalibration c;
        const auto& err = jq.value("errors", nlohmann::json::object());
        c.x = err.value("x", kDefaultSingleQubitError);
        c.sx = err.value("sx", c.x);
        c.rz = err.value("rz", 0.0);
        c.id = err.value("id", 0.0);
        c.meas = jq.value("meas", kDefaultMeasureError);
        for (double e : {c.x, c.sx, c.rz, c.id, c.meas})
            if (e < 0 || e > 1 || !std::isfinite(e))
                throw std::invalid_argument("calibration error rates must lie in [0,1]");
        given[size_t(id)] = c;
        avg_x += c.x;
        avg_sx += c.sx;
        avg_rz += c.rz;
        avg_id += c.id;
        avg_meas += c.meas;
        ++seen;
    }
    QubitCalibration fill;
    if (seen > 0)
        fill = QubitCalibration{avg_id / seen, avg_x / seen, avg_sx / seen, avg_rz / seen, avg_meas / seen};
    s.qubits.resize(size_t(dev.n));
    for (int q = 0; q < dev.n; ++q) {
        if (given[size_t(q)]) {
            s.qubits[size_t(q)] = *given[size_t(q)];
        } else {
            s.qubits[size_t(q)] = fill;
            s.warnings.push_back("qubit " + std::to_string(q) + " missing from calibration, using averages");
        }
    }

    double avg_cx = 0;
    int seen_cx = 0;
    for (const auto& je : j.value("edges", nlohmann::json::array())) {
        Edge e = calib_detail::edge_from_json(je.at("pair"));
        double err = je.at("cx").get<double>();
        if (err < 0 || err > 1 || !std::isfinite(err))
            throw std::invalid_argument("cx error rates must lie in [0,1]");
        if (std::find(dev.edges.begin(), dev.edges.end(), e) == dev.edges.end())
            throw std::invalid_argument("calibration lists edge " + std::to_string(e.first) + "," +
                                        std::to_string(e.second) + " absent from the coupling map");
        s.cx[e] = err;
        avg_cx += err;
        ++seen_cx;
    }
    double cx_fill = seen_cx > 0 ? avg_cx / seen_cx : kDefaultCxError;
    for (const Edge& e : dev.edges)
        if (!s.cx.count(e)) {
            s.cx[e] = cx_fill;
            s.warnings.push_back("edge " + std::to_string(e.first) + "," + std::to_string(e.second) +
                                 " missing from calibration, using average cx error");
        }

    auto dist = dev.distance_matrix();
    for (const auto& jx : j.value("crosstalk", nlohmann::json::array())) {
        CrosstalkEntry e;
        e.aggressor = calib_detail::edge_from_json(jx.at("edge"));
        e.victim = calib_detail::edge_from_json(jx.at("victim_edge"));
        e.multiplier = jx.at("multiplier").get<double>();
        if (e.multiplier < 0 || !std::isfinite(e.multiplier))
            throw std::invalid_argument("crosstalk multiplier must be non-negative");
        if (e.aggressor == e.victim) throw std::invalid_argument("crosstalk entry pairs an edge with itself");
        // Entries only make sense for distinct edges physically near each
        // other; a shared endpoint is impossible to drive simultaneously.
        int nearest = dev.n;
        for (int a : {e.aggressor.first, e.aggressor.second})
            for (int v : {e.victim.first, e.victim.second}) nearest = std::min(nearest, dist[a][v]);
        if (nearest != 1)
            throw std::invalid_argument("crosstalk entry pairs edges that are not physically adjacent");
        s.crosstalk.push_back(e);
    }
    return s;
}

inline CalibrationSnapshot calibration_from_file(const std::string& path, const DeviceTopology& dev) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open calibration file '" + path + "'");
    nlohmann::json j;
    in >> j;
    return calibration_from_json(j, dev);
}

inline nlohmann::ordered_json calibration_to_json(const CalibrationSnapshot& s) {
    nlohmann::ordered_json j;
    j["date"] = s.date;
    auto qs = nlohmann::ordered_json::array();
    for (size_t q = 0; q < s.qubits.size(); ++q) {
        const QubitCalibration& c = s.qubits[q];
        nlohmann::ordered_json jq;
        jq["id"] = int(q);
        jq["errors"] = {{"x", c.x}, {"sx", c.sx}, {"rz", c.rz}, {"id", c.id}};
        jq["meas"] = c.meas;
        qs.push_back(std::move(jq));
    }
    j["qubits"] = qs;
    auto es = nlohmann::ordered_json::array();
    for (const auto& [e, err] : s.cx) {
        nlohmann::ordered_json je;
        je["pair"] = {e.first, e.second};
        je["cx"] = err;
        es.push_back(std::move(je));
    }
    j["edges"] = es;
    auto xs = nlohmann::ordered_json::array();
    for (const CrosstalkEntry& e : s.crosstalk) {
        nlohmann::ordered_json jx;
        jx["edge"] = {e.aggressor.first, e.aggressor.second};
        jx["victim_edge"] = {e.victim.first, e.victim.second};
        jx["multiplier"] = e.multiplier;
        xs.push_back(std::move(jx));
    }
    j["crosstalk"] = xs;
    return j;
}

}  // namespace qvul
