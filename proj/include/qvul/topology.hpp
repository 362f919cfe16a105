// Device coupling maps: built-in layouts, JSON load/save, distance matrix.
#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <fstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

namespace qvul {

using Edge = std::pair<int, int>;

inline Edge normalized_edge(int a, int b) { return a < b ? Edge{a, b} : Edge{b, a}; }

struct DeviceTopology {
    std::string name;
    int n = 0;
    std::vector<Edge> edges;  // undirected, stored with first < second

    bool connected(int a, int b) const {
        Edge e = normalized_edge(a, b);
        return std::find(edges.begin(), edges.end(), e) != edges.end();
    }

    std::vector<std::vector<int>> adjacency() const {
        std::vector<std::vector<int>> adj(n);
        for (const Edge& e : edges) {
            adj[e.first].push_back(e.second);
            adj[e.second].push_back(e.first);
        }
        return adj;
    }

    // All-pairs shortest path lengths by BFS; disconnected pairs get -1.
    std::vector<std::vector<int>> distance_matrix() const {
        auto adj = adjacency();
        std::vector<std::vector<int>> dist(n, std::vector<int>(n, -1));
        for (int s = 0; s < n; ++s) {
            dist[s][s] = 0;
            std::deque<int> queue{s};
            while (!queue.empty()) {
                int u = queue.front();
                queue.pop_front();
                for (int v : adj[u]) {
                    if (dist[s][v] < 0) {
                        dist[s][v] = dist[s][u] + 1;
                        queue.push_back(v);
                    }
                }
            }
        }
        return dist;
    }

    void validate() const {
        if (n <= 0) throw std::invalid_argument("topology must have at least one qubit");
        for (const Edge& e : edges) {
            if (e.first < 0 || e.first >= n || e.second < 0 || e.second >= n)
                throw std::invalid_argument("topology edge endpoint out of range");
            if (e.first == e.second) throw std::invalid_argument("topology edge endpoints must differ");
        }
        for (size_t i = 0; i < edges.size(); ++i)
            for (size_t j = i + 1; j < edges.size(); ++j)
                if (edges[i] == edges[j]) throw std::invalid_argument("duplicate topology edge");
    }
};

inline DeviceTopology line_topology(int n) {
    DeviceTopology t;
    t.name = "line" + std::to_string(n);
    t.n = n;
    for (int i = 0; i + 1 < n; ++i) t.edges.push_back({i, i + 1});
    t.validate();
    return t;
}

inline DeviceTopology grid_topology(int rows, int cols) {
    DeviceTopology t;
    t.name = "grid" + std::to_string(rows) + "x" + std::to_string(cols);
    t.n = rows * cols;
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) {
            int q = r * cols + c;
            if (c + 1 < cols) t.edges.push_back({q, q + 1});
            if (r + 1 < rows) t.edges.push_back({q, q + cols});
        }
    t.validate();
    return t;
}

inline DeviceTopology complete_topology(int n) {
    DeviceTopology t;
    t.name = "complete" + std::to_string(n);
    t.n = n;
    for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b) t.edges.push_back({a, b});
    t.validate();
    return t;
}

// 27-qubit heavy-hex lattice as found on the Falcon generation of devices.
inline DeviceTopology hex27_topology() {
    DeviceTopology t;
    t.name = "hex27";
    t.n = 27;
    t.edges = {{0, 1},   {1, 2},   {1, 4},   {2, 3},   {3, 5},   {4, 7},   {5, 8},
               {6, 7},   {7, 10},  {8, 9},   {8, 11},  {10, 12}, {11, 14}, {12, 13},
               {12, 15}, {13, 14}, {14, 16}, {15, 18}, {16, 19}, {17, 18}, {18, 21},
               {19, 20}, {19, 22}, {21, 23}, {22, 25}, {23, 24}, {24, 25}, {25, 26}};
    t.validate();
    return t;
}

// 127-qubit heavy-hex lattice (Eagle generation). Rows of 15 qubits joined by
// bridge qubits every fourth column, with the bridge offset shifting by two
// per long row, plus the short first and last rows.
inline DeviceTopology hex127_topology() {
    DeviceTopology t;
    t.name = "hex127";
    t.n = 127;
    auto row = [&](int first, int count) {
        for (int i = 0; i < count - 1; ++i) t.edges.push_back({first + i, first + i + 1});
    };
    row(0, 14);
    row(18, 15);
    row(37, 15);
    row(56, 15);
    row(75, 15);
    row(94, 15);
    row(113, 14);
    auto bridges = [&](int bridge_first, int top_first, int bottom_first, int top_offset, int bottom_offset) {
        for (int i = 0; i < 4; ++i) {
            int b = bridge_first + i;
            t.edges.push_back({top_first + top_offset + 4 * i, b});
            t.edges.push_back({b, bottom_first + bottom_offset + 4 * i});
        }
    };
    bridges(14, 0, 18, 0, 0);
    bridges(33, 18, 37, 2, 2);
    bridges(52, 37, 56, 0, 0);
    bridges(71, 56, 75, 2, 2);
    bridges(90, 75, 94, 0, 0);
    bridges(109, 94, 113, 2, 1);
    for (Edge& e : t.edges) e = normalized_edge(e.first, e.second);
    t.validate();
    return t;
}

inline nlohmann::ordered_json topology_to_json(const DeviceTopology& t) {
    nlohmann::ordered_json j;
    j["name"] = t.name;
    j["n"] = t.n;
    auto edges = nlohmann::ordered_json::array();
    for (const Edge& e : t.edges) edges.push_back({e.first, e.second});
    j["edges"] = edges;
    return j;
}

inline DeviceTopology topology_from_json(const nlohmann::json& j) {
    DeviceTopology t;
    t.name = j.value("name", "device");
    if (!j.contains("n") || !j.contains("edges"))
        throw std::invalid_argument("topology json requires fields 'n' and 'edges'");
    t.n = j.at("n").get<int>();
    for (const auto& e : j.at("edges")) {
        if (!e.is_array() || e.size() != 2) throw std::invalid_argument("topology edge must be a pair");
        t.edges.push_back(normalized_edge(e[0].get<int>(), e[1].get<int>()));
    }
    t.validate();
    return t;
}

// Accepts a built-in name (lineN, gridRxC, hex27, hex127, completeN) or a
// path to a topology json file.
inline DeviceTopology resolve_topology(const std::string& spec) {
    auto starts = [&](const char* p) { return spec.rfind(p, 0) == 0; };
    try {
        if (spec == "hex27") return hex27_topology();
        if (spec == "hex127") return hex127_topology();
        if (starts("line")) return line_topology(std::stoi(spec.substr(4)));
        if (starts("complete")) return complete_topology(std::stoi(spec.substr(8)));
        if (starts("grid")) {
            auto x = spec.find('x');
            if (x != std::string::npos)
                return grid_topology(std::stoi(spec.substr(4, x - 4)), std::stoi(spec.substr(x + 1)));
        }
    } catch (const std::invalid_argument&) {
        // fall through to file lookup
    }
    std::ifstream in(spec);
    if (!in) throw std::invalid_argument("unknown topology '" + spec + "' (not a built-in name or readable file)");
    nlohmann::json j;
    in >> j;
    return topology_from_json(j);
}

}  // namespace qvul
