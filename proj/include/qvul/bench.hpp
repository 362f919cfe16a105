// Benchmark circuit generators with known correct outputs. Every generator
// ends in a measurement layer and leaves only deliberately-unmeasured helper
// qubits unmeasured, so the ideal output is a single bit string.
#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

#include "qvul/circuit.hpp"

namespace qvul {

struct BenchCircuit {
    Circuit circuit;
    std::string expected;  // ideal output string, clbit 0 rightmost
};

namespace bench_detail {

constexpr int kMaxBenchSize = 160;

inline void check_size(const char* bench, int size, int lo, int hi = kMaxBenchSize) {
    if (size < lo || size > hi)
        throw std::invalid_argument(std::string(bench) + " size must be in [" + std::to_string(lo) + "," +
                                    std::to_string(hi) + "], got " + std::to_string(size));
}

// Controlled phase via the rz/cx basis; equal to cp(theta) up to global phase.
inline void append_cp(Circuit& c, double theta, int a, int b) {
    c.add(Gate::rz(theta / 2, a));
    c.add(Gate::rz(theta / 2, b));
    c.add(Gate::cx(a, b));
    c.add(Gate::rz(-theta / 2, b));
    c.add(Gate::cx(a, b));
}

// Inverse Fourier transform on qubits [first, first+count), no terminal
// qubit reversal. Qubit first+j carries bit j of the decoded value.
inline void append_iqft(Circuit& c, int first, int count) {
    constexpr double kPi = 3.14159265358979323846;
    for (int j = 0; j < count; ++j) {
        for (int k = 0; k < j; ++k) append_cp(c, -kPi / double(std::uint64_t(1) << (j - k)), first + k, first + j);
        c.add(Gate::h(first + j));
    }
}

inline double fraction_angle(std::uint64_t value, int bits) {
    constexpr double kTau = 6.28318530717958647692;
    if (bits >= 64) return kTau * double(value) * std::pow(0.5, bits);
    std::uint64_t mask = (std::uint64_t(1) << bits) - 1;
    return kTau * double(value & mask) / double(std::uint64_t(1) << bits);
}

inline std::string binary_string(std::uint64_t value, int bits) {
    std::string s(size_t(bits), '0');
    for (int i = 0; i < bits && i < 64; ++i)
        if ((value >> i) & 1) s[size_t(bits - 1 - i)] = '1';
    return s;
}

}  // namespace bench_detail

// Hidden-string search: size-1 inputs plus one phase ancilla. The printed
// output reproduces the hidden string.
inline BenchCircuit bench_bv(int size, const std::string& hidden) {
    bench_detail::check_size("bv", size, 2);
    int inputs = size - 1, anc = size - 1;
    if (int(hidden.size()) != inputs)
        throw std::invalid_argument("bv hidden string must have length " + std::to_string(inputs));
    for (char ch : hidden)
        if (ch != '0' && ch != '1') throw std::invalid_argument("bv hidden string must be binary");

    Circuit c("bv" + std::to_string(size), size, inputs);
    c.add(Gate::x(anc));
    c.add(Gate::h(anc));
    for (int j = 0; j < inputs; ++j) c.add(Gate::h(j));
    std::vector<int> all(size);
    for (int q = 0; q < size; ++q) all[q] = q;
    c.add(Gate::barrier(all));
    for (int j = 0; j < inputs; ++j)
        if (hidden[size_t(j)] == '1') c.add(Gate::cx(j, anc));
    c.add(Gate::barrier(all));
    for (int j = 0; j < inputs; ++j) c.add(Gate::h(j));
    for (int j = 0; j < inputs; ++j) c.add(Gate::measure(j, inputs - 1 - j));
    return {std::move(c), hidden};
}

inline std::string default_hidden_string(int inputs) {
    std::string s(size_t(inputs), '0');
    for (int i = 0; i < inputs; i += 2) s[size_t(i)] = '1';
    return s;
}

// Constant-vs-balanced decision: all zeros means constant. The balanced
// oracle is f(x) = x_last, so the expected string is 0...01.
inline BenchCircuit bench_dj(int size, bool balanced) {
    bench_detail::check_size("dj", size, 2);
    int inputs = size - 1, anc = size - 1;
    Circuit c("dj" + std::to_string(size), size, inputs);
    c.add(Gate::x(anc));
    c.add(Gate::h(anc));
    for (int j = 0; j < inputs; ++j) c.add(Gate::h(j));
    std::vector<int> all(size);
    for (int q = 0; q < size; ++q) all[q] = q;
    c.add(Gate::barrier(all));
    if (balanced) c.add(Gate::cx(inputs - 1, anc));
    c.add(Gate::barrier(all));
    for (int j = 0; j < inputs; ++j) c.add(Gate::h(j));
    for (int j = 0; j < inputs; ++j) c.add(Gate::measure(j, inputs - 1 - j));
    std::string expected(size_t(inputs), '0');
    if (balanced) expected[size_t(inputs - 1)] = '1';
    return {std::move(c), expected};
}

// Fourier-basis encode of `value` followed by the inverse transform, so the
// ideal output is just the binary encoding of value.
inline BenchCircuit bench_qft(int size, std::uint64_t value) {
    bench_detail::check_size("qft", size, 1);
    Circuit c("qft" + std::to_string(size), size, size);
    for (int j = 0; j < size; ++j) {
        c.add(Gate::h(j));
        c.add(Gate::rz(bench_detail::fraction_angle(value, j + 1), j));
    }
    bench_detail::append_iqft(c, 0, size);
    for (int q = 0; q < size; ++q) c.add(Gate::measure(q, q));
    return {std::move(c), bench_detail::binary_string(value, size)};
}

// Phase estimation of a phase gate with eigenphase k / 2^(size-1) on the
// |1> eigenstate. All qubits are measured; the leading output bit is the
// eigenqubit and always reads 1.
inline BenchCircuit bench_qpe(int size, std::uint64_t k) {
    bench_detail::check_size("qpe", size, 2, 60);
    int counting = size - 1, eigen = size - 1;
    if (counting < 64 && k >= (std::uint64_t(1) << counting))
        throw std::invalid_argument("qpe phase numerator must fit the counting register");
    Circuit c("qpe" + std::to_string(size), size, size);
    c.add(Gate::x(eigen));
    for (int j = 0; j < counting; ++j) c.add(Gate::h(j));
    // Qubit j reads fraction bit j, so it controls the 2^(m-1-j) power.
    for (int j = 0; j < counting; ++j)
        bench_detail::append_cp(c, bench_detail::fraction_angle(k << (counting - 1 - j), counting), j, eigen);
    bench_detail::append_iqft(c, 0, counting);
    for (int q = 0; q < size; ++q) c.add(Gate::measure(q, q));
    return {std::move(c), "1" + bench_detail::binary_string(k, counting)};
}

// Dispatcher used by the command line and the test suites.
// Parameter meaning by bench: bv -> hidden string, dj -> "constant"|"balanced",
// qft -> encoded value, qpe -> phase numerator over 2^(size-1).
inline BenchCircuit make_bench(const std::string& name, int size, const std::string& param = "") {
    if (name == "bv") return bench_bv(size, param.empty() ? default_hidden_string(size - 1) : param);
    if (name == "dj") {
        if (!param.empty() && param != "constant" && param != "balanced")
            throw std::invalid_argument("dj oracle must be 'constant' or 'balanced'");
        return bench_dj(size, param != "constant");
    }
    if (name == "qft") return bench_qft(size, param.empty() ? 1 : std::stoull(param));
    if (name == "qpe") return bench_qpe(size, param.empty() ? 1 : std::stoull(param));
    throw std::invalid_argument("unknown benchmark '" + name + "' (expected bv, dj, qft, qpe)");
}

}  // namespace qvul
