// qvul command line front end.
//
// Wires the pipeline: bench -> transpile -> analyze -> estimate -> weight
// sweep/fit -> oracle -> compare. Every JSON report embeds a run manifest so
// a result can be traced back to its exact inputs and replayed.
//
// Exit codes: 0 success, 1 estimation failure, 2 input error.

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "qvul/analysis.hpp"
#include "qvul/bench.hpp"
#include "qvul/calib.hpp"
#include "qvul/estimators.hpp"
#include "qvul/oracle.hpp"
#include "qvul/qasm.hpp"
#include "qvul/router.hpp"
#include "qvul/weight.hpp"

namespace {

constexpr const char* kVersion = "0.1.0";

using nlohmann::json;
using nlohmann::ordered_json;

// ---------------------------------------------------------------- manifest

std::uint64_t fnv1a64(const std::string& bytes) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::invalid_argument("cannot open '" + path + "'");
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

std::string utc_now() {
    std::time_t t = std::time(nullptr);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    return buf;
}

// Every emitted report carries one of these; identical inputs and options
// reproduce identical reports apart from the timestamp field.
struct Manifest {
    std::string command;
    ordered_json options = ordered_json::object();
    ordered_json inputs = ordered_json::object();
    std::uint64_t seed = 0;
    bool has_seed = false;

    void input_file(const std::string& role, const std::string& path) {
        inputs[role] = {{"path", path}, {"fnv1a64", hex64(fnv1a64(read_file(path)))}};
    }
    void input_inline(const std::string& role, const std::string& text) {
        inputs[role] = {{"fnv1a64", hex64(fnv1a64(text))}};
    }

    ordered_json to_json() const {
        ordered_json m;
        m["command"] = command;
        m["version"] = kVersion;
        m["timestamp"] = utc_now();
        if (has_seed) m["seed"] = seed;
        m["options"] = options;
        m["inputs"] = inputs;
        return m;
    }
};

void emit_report(const ordered_json& report, const std::string& json_path) {
    std::string text = report.dump(2) + "\n";
    if (json_path.empty()) {
        std::cout << text;
    } else {
        qvul::write_text_file(json_path, text);
    }
}

// ------------------------------------------------------------- worker cap

int effective_threads(int requested) {
    int cap = std::numeric_limits<int>::max();
    if (const char* env = std::getenv("QVUL_THREADS")) {
        try {
            cap = std::max(1, std::stoi(env));
        } catch (const std::exception&) {
            throw std::invalid_argument("QVUL_THREADS must be a positive integer");
        }
    }
    return std::max(1, std::min(requested, cap));
}

// ------------------------------------------------------- circuit plumbing

struct CircuitInput {
    qvul::Circuit circuit;
    std::string label;
    std::string expected;  // known correct output, empty when unknown
};

// "name:size" or "name:size:param", e.g. qft:5:11 or bv:4:101
CircuitInput bench_from_spec(const std::string& spec) {
    std::vector<std::string> parts;
    std::string cur;
    for (char c : spec) {
        if (c == ':') {
            parts.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    parts.push_back(cur);
    if (parts.size() < 2 || parts.size() > 3)
        throw std::invalid_argument("benchmark spec must be name:size or name:size:param");
    int size = std::stoi(parts[1]);
    auto b = qvul::make_bench(parts[0], size, parts.size() == 3 ? parts[2] : "");
    CircuitInput in;
    in.label = b.circuit.name;
    in.expected = b.expected;
    in.circuit = std::move(b.circuit);
    return in;
}

CircuitInput load_circuit(const std::string& circuit_path, const std::string& bench_spec, Manifest& m) {
    if (circuit_path.empty() == bench_spec.empty())
        throw std::invalid_argument("pass exactly one of --circuit and --bench");
    if (!bench_spec.empty()) {
        CircuitInput in = bench_from_spec(bench_spec);
        m.options["bench"] = bench_spec;
        m.input_inline("circuit", qvul::to_qasm(in.circuit));
        return in;
    }
    CircuitInput in;
    in.circuit = qvul::parse_qasm_file(circuit_path);
    in.label = in.circuit.name.empty() ? circuit_path : in.circuit.name;
    m.input_file("circuit", circuit_path);
    return in;
}

struct TranspileFlags {
    std::string layout = "dense";
    std::string routing = "lookahead";
    int opt_level = 1;
    std::uint64_t seed = 0;

    qvul::TranspileOptions to_options() const {
        qvul::TranspileOptions o;
        o.layout = qvul::layout_from_name(layout);
        o.routing = qvul::routing_from_name(routing);
        if (opt_level < 0 || opt_level > 2) throw std::invalid_argument("--opt must be 0, 1 or 2");
        o.opt_level = opt_level;
        o.seed = seed;
        return o;
    }
    void record(Manifest& m) const {
        m.options["layout"] = layout;
        m.options["routing"] = routing;
        m.options["opt"] = opt_level;
        m.options["transpile_seed"] = seed;
    }
};

// with_seed is false for subcommands whose --seed means something else
void add_transpile_flags(CLI::App* cmd, TranspileFlags& f, bool with_seed = true) {
    cmd->add_option("--layout", f.layout, "initial layout: trivial or dense")->capture_default_str();
    cmd->add_option("--routing", f.routing, "routing: greedy or lookahead")->capture_default_str();
    cmd->add_option("--opt", f.opt_level, "optimization level 0, 1 or 2")->capture_default_str();
    if (with_seed)
        cmd->add_option("--seed", f.seed, "transpiler seed, recorded in the manifest")->capture_default_str();
}

// A circuit that already fits the coupling map is taken as placed;
// anything else goes through the transpiler with the given flags.
qvul::CompiledCircuit prepare(const qvul::Circuit& c, const qvul::DeviceTopology& dev, const TranspileFlags& f,
                              bool* transpiled = nullptr) {
    qvul::Circuit lowered = qvul::decompose_swaps(c);
    bool fits = c.num_qubits <= dev.n;
    if (fits) {
        auto dist = dev.distance_matrix();
        for (const qvul::Gate& g : lowered.ops)
            if (qvul::is_two_qubit(g.kind) && dist[size_t(g.q0)][size_t(g.q1)] != 1) {
                fits = false;
                break;
            }
    }
    if (transpiled) *transpiled = !fits;
    if (fits) return qvul::CompiledCircuit::from_placed(c, dev);
    return qvul::transpile(c, dev, f.to_options());
}

ordered_json summarize(const qvul::Analysis& a) {
    ordered_json s;
    s["physical_qubits"] = a.sched.num_qubits;
    s["depth"] = a.sched.depth;
    s["ops"] = a.sched.ops.size();
    s["cx"] = a.compiled.circ.count(qvul::GateKind::Cx);
    int outputting = 0, assisting = 0, unused = 0;
    for (qvul::QubitRole r : a.roles) {
        outputting += r == qvul::QubitRole::Outputting;
        assisting += r == qvul::QubitRole::Assisting;
        unused += r == qvul::QubitRole::UnusedAncilla;
    }
    s["outputting"] = outputting;
    s["assisting"] = assisting;
    s["unused_ancilla"] = unused;
    s["entangled_groups"] = a.groups.size();
    s["cells"] = a.booking.virt.size();
    s["ace_cells"] = a.ace.ace_count();
    s["released_cells"] = a.ace.released_count();
    return s;
}

// --------------------------------------------------------------- commands

struct BenchArgs {
    std::string name;
    int size = 0;
    std::string param;
    std::string out, json_path;
};

int cmd_bench(const BenchArgs& a) {
    auto b = qvul::make_bench(a.name, a.size, a.param);
    std::string qasm = qvul::to_qasm(b.circuit);
    Manifest m;
    m.command = "bench";
    m.options = {{"name", a.name}, {"size", a.size}, {"param", a.param}};
    m.input_inline("circuit", qasm);

    if (!a.out.empty())
        qvul::write_qasm_file(b.circuit, a.out);
    else if (a.json_path.empty())
        std::cout << qasm;

    if (!a.json_path.empty() || !a.out.empty()) {
        ordered_json report;
        report["manifest"] = m.to_json();
        report["name"] = b.circuit.name;
        report["qubits"] = b.circuit.num_qubits;
        report["clbits"] = b.circuit.num_clbits;
        report["ops"] = b.circuit.ops.size();
        report["expected"] = b.expected;
        if (!a.out.empty()) report["qasm"] = a.out;
        if (!a.json_path.empty()) emit_report(report, a.json_path);
    }
    return 0;
}

struct TranspileArgs {
    std::string circuit, bench, topology;
    TranspileFlags flags;
    std::string out, json_path;
};

int cmd_transpile(const TranspileArgs& a) {
    Manifest m;
    m.command = "transpile";
    CircuitInput in = load_circuit(a.circuit, a.bench, m);
    qvul::DeviceTopology dev = qvul::resolve_topology(a.topology);
    m.options["topology"] = a.topology;
    a.flags.record(m);
    m.seed = a.flags.seed;
    m.has_seed = true;

    qvul::TranspileStats stats;
    qvul::CompiledCircuit cc = qvul::transpile(in.circuit, dev, a.flags.to_options(), &stats);
    qvul::Circuit out_circ = qvul::recombine_swaps(cc.circ);
    out_circ.name = in.circuit.name;
    if (!a.out.empty()) qvul::write_qasm_file(out_circ, a.out);

    ordered_json report;
    report["manifest"] = m.to_json();
    report["device"] = dev.name;
    report["ops_in"] = stats.ops_in;
    report["ops_out"] = stats.ops_out;
    report["swaps_inserted"] = stats.swaps_inserted;
    report["depth"] = qvul::schedule_asap(cc).depth;
    ordered_json layout = ordered_json::array();
    for (int v = 0; v < int(cc.initial_layout.size()); ++v) layout.push_back(cc.initial_layout[size_t(v)]);
    report["initial_layout"] = layout;
    if (!a.out.empty()) report["qasm"] = a.out;
    emit_report(report, a.json_path);
    return 0;
}

struct AnalyzeArgs {
    std::string circuit, bench, topology, annotations;
    TranspileFlags flags;
    std::string csv, json_path, booking_json;
};

int cmd_analyze(const AnalyzeArgs& a) {
    Manifest m;
    m.command = "analyze";
    CircuitInput in = load_circuit(a.circuit, a.bench, m);
    qvul::DeviceTopology dev = qvul::resolve_topology(a.topology);
    m.options["topology"] = a.topology;
    a.flags.record(m);
    m.seed = a.flags.seed;
    m.has_seed = true;

    bool transpiled = false;
    qvul::CompiledCircuit cc = prepare(in.circuit, dev, a.flags, &transpiled);

    std::vector<qvul::EntGroup> user;
    bool have_user = false;
    qvul::CycleSchedule pre = qvul::schedule_asap(cc);
    if (!a.annotations.empty()) {
        user = qvul::annotations_from_file(a.annotations, cc.device.n, pre.depth);
        m.input_file("annotations", a.annotations);
        have_user = true;
    }
    qvul::Analysis an = qvul::analyze(cc, transpiled ? &in.circuit : nullptr, have_user ? &user : nullptr);

    if (!a.csv.empty()) qvul::write_text_file(a.csv, qvul::booking_to_csv(an));
    if (!a.booking_json.empty()) {
        ordered_json full = qvul::booking_to_json(an);
        full["manifest"] = m.to_json();
        qvul::write_text_file(a.booking_json, full.dump(2) + "\n");
    }

    ordered_json report;
    report["manifest"] = m.to_json();
    report["transpiled"] = transpiled;
    report["summary"] = summarize(an);
    report["groups"] = qvul::intervals_to_json(an.groups)["groups"];
    ordered_json reasons;
    size_t counts[6] = {0, 0, 0, 0, 0, 0};
    for (std::uint8_t r : an.ace.reason) ++counts[r];
    reasons["ace"] = counts[0];
    reasons["unused"] = counts[1];
    reasons["post_measure"] = counts[2];
    reasons["trashed"] = counts[3];
    reasons["non_spread_1"] = counts[4];
    reasons["non_spread_2"] = counts[5];
    report["cells_by_reason"] = reasons;
    if (!a.csv.empty()) report["csv"] = a.csv;
    emit_report(report, a.json_path);
    return 0;
}

struct EstimateArgs {
    std::string circuit, bench, topology, calib, model;
    TranspileFlags flags;
    double weight = qvul::kFallbackWeight;
    bool weight_set = false;
    double real_sr = -1.0;
    std::string label;
    std::string csv, json_path;
};

int cmd_estimate(const EstimateArgs& a) {
    Manifest m;
    m.command = "estimate";
    CircuitInput in = load_circuit(a.circuit, a.bench, m);
    qvul::DeviceTopology dev = qvul::resolve_topology(a.topology);
    m.options["topology"] = a.topology;
    a.flags.record(m);
    m.seed = a.flags.seed;
    m.has_seed = true;
    qvul::CalibrationSnapshot cal = qvul::calibration_from_file(a.calib, dev);
    m.input_file("calibration", a.calib);

    bool transpiled = false;
    qvul::CompiledCircuit cc = prepare(in.circuit, dev, a.flags, &transpiled);
    qvul::Analysis an = qvul::analyze(cc, transpiled ? &in.circuit : nullptr);

    double w = a.weight;
    std::string weight_source = a.weight_set ? "flag" : "fallback";
    if (!a.model.empty()) {
        if (a.weight_set) throw std::invalid_argument("pass --weight or --model, not both");
        qvul::WeightModel model = qvul::weight_model_from_json(json::parse(read_file(a.model)));
        m.input_file("model", a.model);
        w = qvul::choose_weight(model, an.sched.depth);
        weight_source = "model";
    }
    m.options["weight"] = w;

    double esp_v = qvul::esp(an, cal);
    qvul::QvfReport qv = qvul::qvf(an, cal);
    qvul::CqvReport cq = qvul::cqv(an, cal, w);

    std::string label = a.label.empty() ? in.label : a.label;
    ordered_json report;
    report["manifest"] = m.to_json();
    report["label"] = label;
    report["summary"] = summarize(an);
    report["weight"] = w;
    report["weight_source"] = weight_source;
    report["esp"] = esp_v;
    report["qvf"] = qv.qvf;
    report["uqvf"] = qv.uqvf;
    report["ace_error_mass"] = qv.total;
    report["one_minus_cqv"] = cq.one_minus_cqv;
    report["cqv"] = cq.cqv;
    if (a.real_sr >= 0.0) report["real_sr"] = a.real_sr;

    if (!a.csv.empty()) {
        std::ostringstream csv;
        csv << "label,real_sr,esp,one_minus_cqv\n" << label << ',';
        if (a.real_sr >= 0.0) csv << a.real_sr;
        csv << ',' << esp_v << ',' << cq.one_minus_cqv << '\n';
        qvul::write_text_file(a.csv, csv.str());
        report["csv"] = a.csv;
    }
    emit_report(report, a.json_path);
    return 0;
}

struct SweepArgs {
    std::string circuit, bench, topology, calib;
    TranspileFlags flags;
    double real_sr = -1.0;
    std::string csv, json_path;
};

int cmd_weight_sweep(const SweepArgs& a) {
    Manifest m;
    m.command = "weight sweep";
    CircuitInput in = load_circuit(a.circuit, a.bench, m);
    qvul::DeviceTopology dev = qvul::resolve_topology(a.topology);
    m.options["topology"] = a.topology;
    a.flags.record(m);
    m.seed = a.flags.seed;
    m.has_seed = true;
    qvul::CalibrationSnapshot cal = qvul::calibration_from_file(a.calib, dev);
    m.input_file("calibration", a.calib);
    m.options["real_sr"] = a.real_sr;

    bool transpiled = false;
    qvul::CompiledCircuit cc = prepare(in.circuit, dev, a.flags, &transpiled);
    qvul::Analysis an = qvul::analyze(cc, transpiled ? &in.circuit : nullptr);
    qvul::SweepResult sweep = qvul::sweep_weights(an, cal, a.real_sr);

    if (!a.csv.empty()) {
        std::ostringstream csv;
        csv << "weight,prediction,abs_error\n";
        for (const qvul::SweepPoint& p : sweep.curve)
            csv << p.weight << ',' << p.prediction << ',' << p.abs_error << '\n';
        qvul::write_text_file(a.csv, csv.str());
    }

    ordered_json report;
    report["manifest"] = m.to_json();
    report["label"] = in.label;
    report["depth"] = an.sched.depth;
    report["real_sr"] = a.real_sr;
    report["best_weight"] = sweep.best_weight;
    report["best_prediction"] = sweep.best_prediction;
    ordered_json curve = ordered_json::array();
    for (const qvul::SweepPoint& p : sweep.curve)
        curve.push_back({{"weight", p.weight}, {"prediction", p.prediction}, {"abs_error", p.abs_error}});
    report["curve"] = curve;
    if (!a.csv.empty()) report["csv"] = a.csv;
    emit_report(report, a.json_path);
    return 0;
}

struct FitArgs {
    std::string in_path, out_path;
    int bin_width = qvul::kDefaultBinWidth;
};

int cmd_weight_fit(const FitArgs& a) {
    Manifest m;
    m.command = "weight fit";
    m.options["bin_width"] = a.bin_width;
    m.input_file("runs", a.in_path);
    auto runs = qvul::experiments_from_json(json::parse(read_file(a.in_path)));
    qvul::WeightModel model = qvul::fit_weight_model(runs, a.bin_width);

    ordered_json report;
    report["manifest"] = m.to_json();
    report["experiments"] = runs.size();
    report["model"] = qvul::weight_model_to_json(model);
    if (!a.out_path.empty()) {
        qvul::write_text_file(a.out_path, qvul::weight_model_to_json(model).dump(2) + "\n");
        report["out"] = a.out_path;
    }
    emit_report(report, "");
    return 0;
}

struct OracleArgs {
    std::string circuit, bench, topology, calib;
    TranspileFlags flags;
    std::uint64_t shots = 8192;
    std::uint64_t seed = 1;
    int threads = 1;
    int max_qubits = 14;
    std::string correct;
    bool counts = false;
    std::string json_path;
};

int cmd_oracle(const OracleArgs& a) {
    Manifest m;
    m.command = "oracle";
    CircuitInput in = load_circuit(a.circuit, a.bench, m);
    qvul::DeviceTopology dev = qvul::resolve_topology(a.topology);
    m.options["topology"] = a.topology;
    a.flags.record(m);
    m.seed = a.flags.seed;
    m.has_seed = true;
    qvul::CalibrationSnapshot cal = qvul::calibration_from_file(a.calib, dev);
    m.input_file("calibration", a.calib);
    m.options["shots"] = a.shots;
    m.seed = a.seed;
    m.has_seed = true;

    bool transpiled = false;
    qvul::CompiledCircuit cc = prepare(in.circuit, dev, a.flags, &transpiled);
    qvul::Analysis an = qvul::analyze(cc, transpiled ? &in.circuit : nullptr);

    std::string expected = a.correct.empty() ? in.expected : a.correct;
    std::string expected_source = a.correct.empty() ? "benchmark" : "flag";
    if (expected.empty()) {
        // non-benchmark circuit: infer from the noiseless distribution when
        // it is effectively deterministic
        qvul::Distribution ideal = qvul::ideal_output(an, a.max_qubits);
        std::string bits = ideal.most_likely();
        double prob = ideal.at(bits);
        if (prob < 0.999)
            throw std::invalid_argument("circuit output is not deterministic (top probability " +
                                        std::to_string(prob) + "); pass --correct");
        expected = bits;
        expected_source = "noiseless_sim";
    }

    qvul::OracleOptions opt;
    opt.shots = a.shots;
    opt.seed = a.seed;
    opt.threads = effective_threads(a.threads);
    opt.max_qubits = a.max_qubits;
    opt.collect_counts = a.counts;
    qvul::OracleResult r = qvul::sample_success_rate(an, cal, expected, opt);

    ordered_json report;
    report["manifest"] = m.to_json();
    report["label"] = in.label;
    report["expected"] = expected;
    report["expected_source"] = expected_source;
    report["shots"] = r.shots;
    report["correct"] = r.correct;
    report["sr"] = r.sr;
    report["ci_half"] = r.ci_half;
    if (a.counts) {
        ordered_json counts;
        for (const auto& [k, v] : r.counts) counts[k] = v;
        report["counts"] = counts;
    }
    emit_report(report, a.json_path);
    return 0;
}

// ---------------------------------------------------------------- compare

struct CompareRow {
    std::string label;
    int depth = 0, cx = 0;
    double sr = 0, ci_half = 0, esp = 0, one_minus_cqv = 0, weight = 0;
    std::string error;  // nonempty when this entry failed
};

struct CompareArgs {
    std::string suite;
    int threads = 1;
    std::string csv, json_path;
};

// Relative paths inside a suite file resolve against the suite's directory,
// so a suite travels with its data; anything not found there is left for the
// working directory.
std::string suite_relative(const std::string& suite_path, const std::string& p) {
    namespace fs = std::filesystem;
    if (fs::path(p).is_absolute()) return p;
    fs::path cand = fs::path(suite_path).parent_path() / p;
    std::error_code ec;
    return fs::exists(cand, ec) ? cand.string() : p;
}

int cmd_compare(const CompareArgs& a) {
    Manifest m;
    m.command = "compare";
    m.input_file("suite", a.suite);
    json suite = json::parse(read_file(a.suite));

    std::string topo_spec = suite_relative(a.suite, suite.at("topology").get<std::string>());
    qvul::DeviceTopology dev = qvul::resolve_topology(topo_spec);
    std::string calib_path = suite_relative(a.suite, suite.at("calibration").get<std::string>());
    qvul::CalibrationSnapshot cal = qvul::calibration_from_file(calib_path, dev);
    m.input_file("calibration", calib_path);
    m.options["topology"] = topo_spec;

    TranspileFlags flags;
    if (suite.contains("transpile")) {
        const json& t = suite["transpile"];
        flags.layout = t.value("layout", flags.layout);
        flags.routing = t.value("routing", flags.routing);
        flags.opt_level = t.value("opt", flags.opt_level);
        flags.seed = t.value("seed", flags.seed);
    }
    flags.record(m);

    qvul::OracleOptions base;
    if (suite.contains("oracle")) {
        const json& o = suite["oracle"];
        base.shots = o.value("shots", base.shots);
        base.seed = o.value("seed", base.seed);
        base.max_qubits = o.value("max_qubits", base.max_qubits);
    }
    m.options["shots"] = base.shots;
    m.seed = base.seed;
    m.has_seed = true;

    // weight: constant, or a fitted model applied per circuit depth
    double const_weight = qvul::kFallbackWeight;
    qvul::WeightModel model;
    bool use_model = false;
    if (suite.contains("weight")) {
        if (suite["weight"].is_number()) {
            const_weight = suite["weight"].get<double>();
        } else {
            std::string path = suite_relative(a.suite, suite["weight"].at("model").get<std::string>());
            model = qvul::weight_model_from_json(json::parse(read_file(path)));
            m.input_file("model", path);
            use_model = true;
        }
    }
    m.options["weight"] = use_model ? ordered_json("model") : ordered_json(const_weight);

    const json& entries = suite.at("circuits");
    if (!entries.is_array() || entries.empty()) throw std::invalid_argument("suite needs a 'circuits' array");

    std::vector<CompareRow> rows(entries.size());
    std::atomic<size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            size_t i = next.fetch_add(1);
            if (i >= entries.size()) return;
            const json& e = entries[size_t(i)];
            CompareRow& row = rows[i];
            try {
                CircuitInput in;
                if (e.contains("bench")) {
                    const json& b = e["bench"];
                    auto bc = qvul::make_bench(b.at("name").get<std::string>(), b.at("size").get<int>(),
                                               b.value("param", std::string()));
                    in.label = bc.circuit.name;
                    in.expected = bc.expected;
                    in.circuit = std::move(bc.circuit);
                } else {
                    in.circuit = qvul::parse_qasm_file(suite_relative(a.suite, e.at("qasm").get<std::string>()));
                    in.label = in.circuit.name;
                }
                if (e.contains("label")) in.label = e["label"].get<std::string>();
                if (e.contains("correct")) in.expected = e["correct"].get<std::string>();

                bool transpiled = false;
                qvul::CompiledCircuit cc = prepare(in.circuit, dev, flags, &transpiled);
                qvul::Analysis an = qvul::analyze(cc, transpiled ? &in.circuit : nullptr);

                row.label = in.label;
                row.depth = an.sched.depth;
                row.cx = cc.circ.count(qvul::GateKind::Cx);
                row.weight = use_model ? qvul::choose_weight(model, an.sched.depth) : const_weight;
                row.esp = qvul::esp(an, cal);
                row.one_minus_cqv = qvul::cqv(an, cal, row.weight).one_minus_cqv;

                std::string expected = in.expected;
                if (expected.empty()) {
                    qvul::Distribution ideal = qvul::ideal_output(an, base.max_qubits);
                    expected = ideal.most_likely();
                    if (ideal.at(expected) < 0.999)
                        throw std::runtime_error("output not deterministic; add 'correct' to the entry");
                }
                qvul::OracleOptions opt = base;
                opt.threads = 1;  // parallelism lives at the suite level
                qvul::OracleResult r = qvul::sample_success_rate(an, cal, expected, opt);
                row.sr = r.sr;
                row.ci_half = r.ci_half;
            } catch (const std::exception& ex) {
                row.label = row.label.empty() ? ("entry " + std::to_string(i)) : row.label;
                row.error = ex.what();
            }
        }
    };
    int threads = effective_threads(a.threads);
    if (threads == 1 || entries.size() == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    for (const CompareRow& row : rows)
        if (!row.error.empty()) throw std::runtime_error(row.label + ": " + row.error);

    auto rel = [](double pred, double sr) { return sr > 0 ? std::abs(pred - sr) / sr : 0.0; };
    ordered_json jrows = ordered_json::array();
    double sum_rel_esp = 0, sum_rel_cqv = 0, sum_abs_esp = 0, sum_abs_cqv = 0;
    std::ostringstream csv;
    csv << "label,depth,cx,sr,ci_half,esp,one_minus_cqv,weight,abs_err_esp,rel_err_esp,abs_err_cqv,rel_err_cqv\n";
    for (const CompareRow& r : rows) {
        double abs_esp = std::abs(r.esp - r.sr), abs_cqv = std::abs(r.one_minus_cqv - r.sr);
        double rel_esp = rel(r.esp, r.sr), rel_cqv = rel(r.one_minus_cqv, r.sr);
        sum_abs_esp += abs_esp;
        sum_abs_cqv += abs_cqv;
        sum_rel_esp += rel_esp;
        sum_rel_cqv += rel_cqv;
        ordered_json jr;
        jr["label"] = r.label;
        jr["depth"] = r.depth;
        jr["cx"] = r.cx;
        jr["sr"] = r.sr;
        jr["ci_half"] = r.ci_half;
        jr["esp"] = r.esp;
        jr["one_minus_cqv"] = r.one_minus_cqv;
        jr["weight"] = r.weight;
        jr["abs_err_esp"] = abs_esp;
        jr["rel_err_esp"] = rel_esp;
        jr["abs_err_cqv"] = abs_cqv;
        jr["rel_err_cqv"] = rel_cqv;
        jrows.push_back(std::move(jr));
        csv << r.label << ',' << r.depth << ',' << r.cx << ',' << r.sr << ',' << r.ci_half << ',' << r.esp << ','
            << r.one_minus_cqv << ',' << r.weight << ',' << abs_esp << ',' << rel_esp << ',' << abs_cqv << ','
            << rel_cqv << '\n';
    }
    double n = double(rows.size());

    ordered_json report;
    report["manifest"] = m.to_json();
    report["rows"] = jrows;
    ordered_json agg;
    agg["circuits"] = rows.size();
    agg["mean_abs_err_esp"] = sum_abs_esp / n;
    agg["mean_abs_err_cqv"] = sum_abs_cqv / n;
    agg["mean_rel_err_esp"] = sum_rel_esp / n;
    agg["mean_rel_err_cqv"] = sum_rel_cqv / n;
    report["aggregate"] = agg;
    if (!a.csv.empty()) {
        qvul::write_text_file(a.csv, csv.str());
        report["csv"] = a.csv;
    }
    emit_report(report, a.json_path);
    return 0;
}

void add_circuit_flags(CLI::App* cmd, std::string& circuit, std::string& bench, std::string& topology) {
    cmd->add_option("--circuit", circuit, "OpenQASM 2 circuit file");
    cmd->add_option("--bench", bench, "benchmark spec name:size[:param], e.g. qft:5:11");
    cmd->add_option("--topology", topology, "device: lineN, gridRxC, hex27, hex127, completeN or a JSON file")
        ->required();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"quantum circuit vulnerability analysis and success-rate prediction"};
    app.set_version_flag("--version", std::string("qvul ") + kVersion);
    app.require_subcommand(1);

    BenchArgs bench;
    auto* cb = app.add_subcommand("bench", "generate a benchmark circuit");
    cb->add_option("--name", bench.name, "bv, dj, qft or qpe")->required();
    cb->add_option("--size", bench.size, "total qubit count")->required();
    cb->add_option("--param", bench.param, "hidden string (bv), constant|balanced (dj) or encoded value (qft, qpe)");
    cb->add_option("--out", bench.out, "write OpenQASM here instead of stdout");
    cb->add_option("--json", bench.json_path, "write a JSON report here");

    TranspileArgs tr;
    auto* ct = app.add_subcommand("transpile", "map a circuit onto a device topology");
    add_circuit_flags(ct, tr.circuit, tr.bench, tr.topology);
    add_transpile_flags(ct, tr.flags);
    ct->add_option("--out", tr.out, "write the routed OpenQASM here");
    ct->add_option("--json", tr.json_path, "write the stats report here instead of stdout");

    AnalyzeArgs an;
    auto* ca = app.add_subcommand("analyze", "schedule, entanglement intervals, booking table and cell analysis");
    add_circuit_flags(ca, an.circuit, an.bench, an.topology);
    add_transpile_flags(ca, an.flags);
    ca->add_option("--annotations", an.annotations, "entanglement annotation JSON overriding detection");
    ca->add_option("--csv", an.csv, "write the booking table CSV here");
    ca->add_option("--booking-json", an.booking_json, "write the full booking export here");
    ca->add_option("--json", an.json_path, "write the summary report here instead of stdout");

    EstimateArgs es;
    auto* ce = app.add_subcommand("estimate", "ESP, QVF/UQVF and 1-CQV predictions");
    add_circuit_flags(ce, es.circuit, es.bench, es.topology);
    add_transpile_flags(ce, es.flags);
    ce->add_option("--calib", es.calib, "calibration snapshot JSON")->required();
    auto* wopt = ce->add_option("--weight", es.weight, "error spread weight in [0,1]");
    ce->add_option("--model", es.model, "fitted weight model JSON; picks the weight by depth");
    ce->add_option("--real-sr", es.real_sr, "measured success rate, echoed into the report and CSV");
    ce->add_option("--label", es.label, "configuration label for the CSV row");
    ce->add_option("--csv", es.csv, "write a plot-ready CSV row here");
    ce->add_option("--json", es.json_path, "write the report here instead of stdout");
    ce->callback([&es, wopt]() { es.weight_set = wopt->count() > 0; });

    auto* cw = app.add_subcommand("weight", "error spread weight tooling");
    cw->require_subcommand(1);
    SweepArgs sw;
    auto* cws = cw->add_subcommand("sweep", "evaluate 1-CQV on the 101-point weight grid");
    add_circuit_flags(cws, sw.circuit, sw.bench, sw.topology);
    add_transpile_flags(cws, sw.flags);
    cws->add_option("--calib", sw.calib, "calibration snapshot JSON")->required();
    cws->add_option("--real-sr", sw.real_sr, "measured success rate to match")->required();
    cws->add_option("--csv", sw.csv, "write the sweep curve CSV here");
    cws->add_option("--json", sw.json_path, "write the report here instead of stdout");

    FitArgs fit;
    auto* cwf = cw->add_subcommand("fit", "fit per-depth-bin weights from sweep runs");
    cwf->add_option("--in", fit.in_path, "weight experiment JSON (from sweep runs)")->required();
    cwf->add_option("--out", fit.out_path, "write the fitted model JSON here");
    cwf->add_option("--bin-width", fit.bin_width, "depth bin width in cycles")->capture_default_str();

    OracleArgs orc;
    auto* co = app.add_subcommand("oracle", "Monte Carlo fault injection success rate");
    add_circuit_flags(co, orc.circuit, orc.bench, orc.topology);
    add_transpile_flags(co, orc.flags, false);
    co->add_option("--calib", orc.calib, "calibration snapshot JSON")->required();
    co->add_option("--shots", orc.shots, "number of trials")->capture_default_str();
    co->add_option("--seed", orc.seed, "master seed; trials derive their own streams")->capture_default_str();
    co->add_option("--threads", orc.threads, "worker threads, capped by QVUL_THREADS")->capture_default_str();
    co->add_option("--max-qubits", orc.max_qubits, "simulable qubit cap")->capture_default_str();
    co->add_option("--correct", orc.correct, "expected output bits; inferred when deterministic");
    co->add_flag("--counts", orc.counts, "include the outcome histogram");
    co->add_option("--json", orc.json_path, "write the report here instead of stdout");

    CompareArgs cmp;
    auto* cc = app.add_subcommand("compare", "run a suite and tabulate oracle SR vs ESP and 1-CQV");
    cc->add_option("--suite", cmp.suite, "suite manifest JSON")->required();
    cc->add_option("--threads", cmp.threads, "per-circuit workers, capped by QVUL_THREADS")->capture_default_str();
    cc->add_option("--csv", cmp.csv, "write the comparison table CSV here");
    cc->add_option("--json", cmp.json_path, "write the report here instead of stdout");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (cb->parsed()) return cmd_bench(bench);
        if (ct->parsed()) return cmd_transpile(tr);
        if (ca->parsed()) return cmd_analyze(an);
        if (ce->parsed()) return cmd_estimate(es);
        if (cw->parsed()) {
            if (cws->parsed()) return cmd_weight_sweep(sw);
            return cmd_weight_fit(fit);
        }
        if (co->parsed()) return cmd_oracle(orc);
        if (cc->parsed()) return cmd_compare(cmp);
    } catch (const qvul::QasmError& e) {
        std::cerr << "qvul: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "qvul: " << e.what() << "\n";
        return 2;
    } catch (const std::runtime_error& e) {
        std::cerr << "qvul: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "qvul: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
