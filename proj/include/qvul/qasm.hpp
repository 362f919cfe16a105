// OpenQASM 2 subset reader/writer for the basis set id,x,sx,rz,h,z,cx plus
// swap, measure and barrier. Angles accept pi arithmetic (+ - * / and
// parentheses). Whole-register broadcast works for one-qubit gates, barrier
// and measure.
#pragma once

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "qvul/circuit.hpp"

namespace qvul {

struct QasmError : std::runtime_error {
    int line;
    int col;
    QasmError(int line_, int col_, const std::string& msg)
        : std::runtime_error("qasm:" + std::to_string(line_) + ":" + std::to_string(col_) + ": " + msg),
          line(line_), col(col_) {}
};

namespace qasm_detail {

enum class TokKind { Ident, Number, Symbol, String, End };

struct Token {
    TokKind kind = TokKind::End;
    std::string text;
    int line = 1;
    int col = 1;
};

class Lexer {
  public:
    explicit Lexer(const std::string& src) : src_(src) { advance(); }

    const Token& peek() const { return tok_; }

    Token take() {
        Token t = tok_;
        advance();
        return t;
    }

  private:
    void advance() {
        skip_space_and_comments();
        tok_.line = line_;
        tok_.col = col_;
        if (pos_ >= src_.size()) {
            tok_.kind = TokKind::End;
            tok_.text.clear();
            return;
        }
        char c = src_[pos_];
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            size_t start = pos_;
            while (pos_ < src_.size() &&
                   (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
                bump();
            tok_.kind = TokKind::Ident;
            tok_.text = src_.substr(start, pos_ - start);
            return;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || (c == '.' && digit_at(pos_ + 1))) {
            size_t start = pos_;
            while (pos_ < src_.size() && (std::isdigit(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '.'))
                bump();
            if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
                bump();
                if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) bump();
                while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) bump();
            }
            tok_.kind = TokKind::Number;
            tok_.text = src_.substr(start, pos_ - start);
            return;
        }
        if (c == '"') {
            bump();
            size_t start = pos_;
            while (pos_ < src_.size() && src_[pos_] != '"') bump();
            if (pos_ >= src_.size()) throw QasmError(tok_.line, tok_.col, "unterminated string");
            tok_.kind = TokKind::String;
            tok_.text = src_.substr(start, pos_ - start);
            bump();
            return;
        }
        if (c == '-' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '>') {
            tok_.kind = TokKind::Symbol;
            tok_.text = "->";
            bump();
            bump();
            return;
        }
        tok_.kind = TokKind::Symbol;
        tok_.text = std::string(1, c);
        bump();
    }

    bool digit_at(size_t i) const { return i < src_.size() && std::isdigit(static_cast<unsigned char>(src_[i])); }

    void skip_space_and_comments() {
        while (pos_ < src_.size()) {
            char c = src_[pos_];
            if (c == '/' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '/') {
                while (pos_ < src_.size() && src_[pos_] != '\n') bump();
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                bump();
            } else {
                break;
            }
        }
    }

    void bump() {
        if (src_[pos_] == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        ++pos_;
    }

    const std::string& src_;
    size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;
    Token tok_;
};

struct Reg {
    int offset = 0;
    int size = 0;
};

class Parser {
  public:
    Parser(const std::string& src, std::string name) : lex_(src) { circ_.name = std::move(name); }

    Circuit run() {
        if (at_ident("OPENQASM")) {
            lex_.take();
            expect_number("version");
            expect_symbol(";");
        }
        while (lex_.peek().kind != TokKind::End) statement();
        circ_.validate();
        return circ_;
    }

  private:
    bool at_ident(const char* s) const { return lex_.peek().kind == TokKind::Ident && lex_.peek().text == s; }

    [[noreturn]] void fail(const Token& t, const std::string& msg) { throw QasmError(t.line, t.col, msg); }

    Token expect_ident(const char* what) {
        Token t = lex_.take();
        if (t.kind != TokKind::Ident) fail(t, std::string("expected ") + what);
        return t;
    }

    Token expect_number(const char* what) {
        Token t = lex_.take();
        if (t.kind != TokKind::Number) fail(t, std::string("expected ") + what);
        return t;
    }

    void expect_symbol(const char* s) {
        Token t = lex_.take();
        if (t.kind != TokKind::Symbol || t.text != s) fail(t, std::string("expected '") + s + "'");
    }

    void statement() {
        Token t = lex_.peek();
        if (t.kind != TokKind::Ident) fail(t, "expected a statement");
        const std::string& head = t.text;
        if (head == "include") {
            lex_.take();
            Token path = lex_.take();
            if (path.kind != TokKind::String) fail(path, "expected include path string");
            expect_symbol(";");
        } else if (head == "qreg" || head == "creg") {
            lex_.take();
            Token name = expect_ident("register name");
            expect_symbol("[");
            int size = to_int(expect_number("register size"));
            expect_symbol("]");
            expect_symbol(";");
            auto& table = head == "qreg" ? qregs_ : cregs_;
            int& total = head == "qreg" ? circ_.num_qubits : circ_.num_clbits;
            if (table.count(name.text)) fail(name, "register '" + name.text + "' redeclared");
            if (size <= 0) fail(name, "register size must be positive");
            table[name.text] = Reg{total, size};
            total += size;
        } else if (head == "measure") {
            lex_.take();
            auto qs = operand(qregs_, "qubit");
            Token arrow = lex_.take();
            if (arrow.kind != TokKind::Symbol || arrow.text != "->") fail(arrow, "expected '->'");
            auto cs = operand(cregs_, "clbit");
            expect_symbol(";");
            if (qs.size() != cs.size()) fail(t, "measure operand sizes differ");
            for (size_t i = 0; i < qs.size(); ++i) circ_.add(tag(Gate::measure(qs[i], cs[i])));
        } else if (head == "barrier") {
            lex_.take();
            std::vector<int> qubits = operand(qregs_, "qubit");
            while (lex_.peek().kind == TokKind::Symbol && lex_.peek().text == ",") {
                lex_.take();
                auto more = operand(qregs_, "qubit");
                qubits.insert(qubits.end(), more.begin(), more.end());
            }
            expect_symbol(";");
            circ_.add(tag(Gate::barrier(std::move(qubits))));
        } else {
            gate_application();
        }
    }

    void gate_application() {
        Token name = expect_ident("gate name");
        double angle = 0.0;
        bool has_angle = false;
        if (lex_.peek().kind == TokKind::Symbol && lex_.peek().text == "(") {
            lex_.take();
            angle = expr();
            expect_symbol(")");
            has_angle = true;
        }
        std::vector<std::vector<int>> args;
        args.push_back(operand(qregs_, "qubit"));
        while (lex_.peek().kind == TokKind::Symbol && lex_.peek().text == ",") {
            lex_.take();
            args.push_back(operand(qregs_, "qubit"));
        }
        expect_symbol(";");

        const std::string& g = name.text;
        if (g == "rz") {
            if (!has_angle) fail(name, "rz needs an angle");
        } else if (has_angle) {
            fail(name, "gate '" + g + "' takes no angle");
        }
        if (g == "cx" || g == "swap") {
            if (args.size() != 2 || args[0].size() != 1 || args[1].size() != 1)
                fail(name, "'" + g + "' needs two single-qubit operands");
            if (args[0][0] == args[1][0]) fail(name, "'" + g + "' operands must be distinct");
            circ_.add(tag(g == "cx" ? Gate::cx(args[0][0], args[1][0]) : Gate::swap(args[0][0], args[1][0])));
            return;
        }
        GateKind kind;
        if (g == "id") kind = GateKind::Id;
        else if (g == "x") kind = GateKind::X;
        else if (g == "sx") kind = GateKind::Sx;
        else if (g == "rz") kind = GateKind::Rz;
        else if (g == "h") kind = GateKind::H;
        else if (g == "z") kind = GateKind::Z;
        else fail(name, "unsupported gate '" + g + "'");
        if (args.size() != 1) fail(name, "'" + g + "' takes one operand");
        for (int q : args[0]) {
            Gate gate;
            gate.kind = kind;
            gate.q0 = q;
            gate.angle = angle;
            circ_.add(tag(std::move(gate)));
        }
    }

    // A register reference, either indexed (one bit) or bare (all bits).
    std::vector<int> operand(const std::map<std::string, Reg>& table, const char* what) {
        Token name = expect_ident(what);
        auto it = table.find(name.text);
        if (it == table.end()) fail(name, std::string("unknown ") + what + " register '" + name.text + "'");
        const Reg& reg = it->second;
        if (lex_.peek().kind == TokKind::Symbol && lex_.peek().text == "[") {
            lex_.take();
            Token idx = expect_number("index");
            int i = to_int(idx);
            expect_symbol("]");
            if (i < 0 || i >= reg.size) fail(idx, "index " + idx.text + " out of range for '" + name.text + "'");
            return {reg.offset + i};
        }
        std::vector<int> all(reg.size);
        for (int i = 0; i < reg.size; ++i) all[i] = reg.offset + i;
        return all;
    }

    int to_int(const Token& t) {
        try {
            size_t used = 0;
            int v = std::stoi(t.text, &used);
            if (used != t.text.size()) throw std::invalid_argument(t.text);
            return v;
        } catch (const std::exception&) {
            fail(t, "expected an integer, got '" + t.text + "'");
        }
    }

    double expr() { return additive(); }

    double additive() {
        double v = multiplicative();
        while (lex_.peek().kind == TokKind::Symbol && (lex_.peek().text == "+" || lex_.peek().text == "-")) {
            bool plus = lex_.take().text == "+";
            double rhs = multiplicative();
            v = plus ? v + rhs : v - rhs;
        }
        return v;
    }

    double multiplicative() {
        double v = unary();
        while (lex_.peek().kind == TokKind::Symbol && (lex_.peek().text == "*" || lex_.peek().text == "/")) {
            Token op = lex_.take();
            double rhs = unary();
            if (op.text == "/" && rhs == 0.0) fail(op, "division by zero in angle");
            v = op.text == "*" ? v * rhs : v / rhs;
        }
        return v;
    }

    double unary() {
        Token t = lex_.peek();
        if (t.kind == TokKind::Symbol && t.text == "-") {
            lex_.take();
            return -unary();
        }
        if (t.kind == TokKind::Symbol && t.text == "(") {
            lex_.take();
            double v = expr();
            expect_symbol(")");
            return v;
        }
        if (t.kind == TokKind::Ident && t.text == "pi") {
            lex_.take();
            return M_PI;
        }
        if (t.kind == TokKind::Number) {
            lex_.take();
            return std::stod(t.text);
        }
        fail(t, "expected a number, 'pi', or '('");
    }

    Gate tag(Gate g) {
        g.source = next_source_++;
        return g;
    }

    Lexer lex_;
    Circuit circ_;
    std::map<std::string, Reg> qregs_;
    std::map<std::string, Reg> cregs_;
    int next_source_ = 0;
};

}  // namespace qasm_detail

inline Circuit parse_qasm(const std::string& text, const std::string& name = "circuit") {
    return qasm_detail::Parser(text, name).run();
}

inline Circuit parse_qasm_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open qasm file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    std::string stem = path;
    if (auto slash = stem.find_last_of("/\\"); slash != std::string::npos) stem = stem.substr(slash + 1);
    if (auto dot = stem.find_last_of('.'); dot != std::string::npos) stem = stem.substr(0, dot);
    return parse_qasm(ss.str(), stem);
}

// Collapse cx triplets that carry a swap_group tag back into swap statements.
inline Circuit recombine_swaps(const Circuit& in) {
    Circuit out(in.name, in.num_qubits, in.num_clbits);
    for (size_t i = 0; i < in.ops.size(); ++i) {
        const Gate& g = in.ops[i];
        if (g.kind == GateKind::Cx && g.swap_group >= 0 && i + 2 < in.ops.size()) {
            const Gate& b = in.ops[i + 1];
            const Gate& c = in.ops[i + 2];
            bool whole = b.kind == GateKind::Cx && c.kind == GateKind::Cx && b.swap_group == g.swap_group &&
                         c.swap_group == g.swap_group && b.q0 == g.q1 && b.q1 == g.q0 && c.q0 == g.q0 &&
                         c.q1 == g.q1;
            if (whole) {
                Gate s = Gate::swap(g.q0, g.q1);
                s.source = g.source;
                out.ops.push_back(std::move(s));
                i += 2;
                continue;
            }
        }
        out.ops.push_back(g);
    }
    return out;
}

inline std::string format_angle(double a) {
    if (a == M_PI) return "pi";
    if (a == -M_PI) return "-pi";
    if (a == M_PI / 2) return "pi/2";
    if (a == -M_PI / 2) return "-pi/2";
    if (a == M_PI / 4) return "pi/4";
    if (a == -M_PI / 4) return "-pi/4";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", a);
    return buf;
}

inline std::string to_qasm(const Circuit& circuit) {
    Circuit c = recombine_swaps(circuit);
    std::ostringstream out;
    out << "OPENQASM 2.0;\n";
    out << "include \"qelib1.inc\";\n";
    out << "qreg q[" << c.num_qubits << "];\n";
    if (c.num_clbits > 0) out << "creg c[" << c.num_clbits << "];\n";
    for (const Gate& g : c.ops) {
        switch (g.kind) {
            case GateKind::Rz:
                out << "rz(" << format_angle(g.angle) << ") q[" << g.q0 << "];\n";
                break;
            case GateKind::Cx:
                out << "cx q[" << g.q0 << "],q[" << g.q1 << "];\n";
                break;
            case GateKind::Swap:
                out << "swap q[" << g.q0 << "],q[" << g.q1 << "];\n";
                break;
            case GateKind::Measure:
                out << "measure q[" << g.q0 << "] -> c[" << g.clbit << "];\n";
                break;
            case GateKind::Barrier: {
                out << "barrier";
                for (size_t i = 0; i < g.fence.size(); ++i) out << (i ? "," : " ") << "q[" << g.fence[i] << "]";
                out << ";\n";
                break;
            }
            default:
                out << to_string(g.kind) << " q[" << g.q0 << "];\n";
                break;
        }
    }
    return out.str();
}

inline void write_qasm_file(const Circuit& c, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write qasm file '" + path + "'");
    out << to_qasm(c);
}

}  // namespace qvul
