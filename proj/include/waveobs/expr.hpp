#pragma once

// Arithmetic expression language for user-supplied coefficients and data.
// Variables t, x, u, v, w, r; functions sin, cos, exp, log, sqrt, abs, tanh;
// operators + - * / ^ and unary minus. '^' binds tightest and is
// right-associative, then unary minus, then * /, then + -.
//
// An Expression is parsed once into an AST and compiled to a flat postfix
// program; evaluation walks the program with a small value stack and does
// no allocation, so concurrent evaluation of one Expression is safe.

#include <array>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "waveobs/errors.hpp"

namespace waveobs::expr {

enum class Var : std::uint8_t { t = 0, x, u, v, w, r };
inline constexpr std::array<std::string_view, 6> kVarNames{"t", "x", "u",
                                                           "v", "w", "r"};

enum class Fun : std::uint8_t { sin, cos, exp, log, sqrt, abs, tanh };
inline constexpr std::array<std::string_view, 7> kFunNames{
    "sin", "cos", "exp", "log", "sqrt", "abs", "tanh"};

struct Env {
    std::array<double, 6> vals{};
    std::uint8_t bound = 0;

    Env& set(Var v, double x) {
        vals[static_cast<int>(v)] = x;
        bound |= std::uint8_t(1u << static_cast<int>(v));
        return *this;
    }
    static Env full(double t, double x, double u, double v, double w,
                    double r = 0.0) {
        Env e;
        e.set(Var::t, t).set(Var::x, x).set(Var::u, u);
        e.set(Var::v, v).set(Var::w, w).set(Var::r, r);
        return e;
    }
};

class SyntaxError : public ValidationError {
public:
    SyntaxError(std::size_t offset, const std::string& expected)
        : ValidationError("expr",
                          "syntax error at offset " + std::to_string(offset) +
                              ": expected " + expected,
                          ErrorCode::expr_syntax),
          offset_(offset) {}
    std::size_t offset() const { return offset_; }

private:
    std::size_t offset_;
};

class UnknownIdentifierError : public ValidationError {
public:
    UnknownIdentifierError(std::size_t offset, const std::string& name)
        : ValidationError("expr",
                          "unknown identifier '" + name + "' at offset " +
                              std::to_string(offset),
                          ErrorCode::expr_unknown_identifier),
          offset_(offset) {}
    std::size_t offset() const { return offset_; }

private:
    std::size_t offset_;
};

class Expression {
public:
    static Expression parse(std::string_view source);

    // Checked evaluation: every variable used by the expression must be
    // bound in env.
    double eval(const Env& env) const {
        if (std::uint8_t missing = std::uint8_t(used_ & ~env.bound); missing) {
            for (int i = 0; i < 6; ++i)
                if (missing & (1u << i))
                    throw ValidationError(
                        "expr",
                        "unbound variable '" + std::string(kVarNames[i]) + "'",
                        ErrorCode::expr_unbound_variable);
        }
        return eval_raw(env.vals.data());
    }

    // Hot-path evaluation: caller guarantees all six slots are set.
    double eval_raw(const double* vals) const {
        double stack[kMaxStack];
        int sp = 0;
        for (const Instr& in : program_) {
            switch (in.op) {
            case Op::push_const: stack[sp++] = in.value; break;
            case Op::push_var: stack[sp++] = vals[in.arg]; break;
            case Op::neg: stack[sp - 1] = -stack[sp - 1]; break;
            case Op::add: --sp; stack[sp - 1] += stack[sp]; break;
            case Op::sub: --sp; stack[sp - 1] -= stack[sp]; break;
            case Op::mul: --sp; stack[sp - 1] *= stack[sp]; break;
            case Op::div:
                --sp;
                if (stack[sp] == 0.0) domain_error("division by zero");
                stack[sp - 1] /= stack[sp];
                break;
            case Op::pow: {
                --sp;
                double b = stack[sp - 1], e = stack[sp];
                double y = std::pow(b, e);
                if (!std::isfinite(y))
                    domain_error("pow(" + std::to_string(b) + ", " +
                                 std::to_string(e) + ") out of domain");
                stack[sp - 1] = y;
                break;
            }
            case Op::fun: {
                double a = stack[sp - 1];
                switch (static_cast<Fun>(in.arg)) {
                case Fun::sin: stack[sp - 1] = std::sin(a); break;
                case Fun::cos: stack[sp - 1] = std::cos(a); break;
                case Fun::exp: stack[sp - 1] = std::exp(a); break;
                case Fun::log:
                    if (a <= 0.0) domain_error("log of non-positive value");
                    stack[sp - 1] = std::log(a);
                    break;
                case Fun::sqrt:
                    if (a < 0.0) domain_error("sqrt of negative value");
                    stack[sp - 1] = std::sqrt(a);
                    break;
                case Fun::abs: stack[sp - 1] = std::fabs(a); break;
                case Fun::tanh: stack[sp - 1] = std::tanh(a); break;
                }
                break;
            }
            }
        }
        return stack[0];
    }

    std::string to_string() const { return print(root_); }
    std::uint8_t used_mask() const { return used_; }
    const std::string& source() const { return source_; }

    bool operator==(const Expression& o) const {
        return equal(root_, o, o.root_);
    }
    bool operator!=(const Expression& o) const { return !(*this == o); }

private:
    enum class NodeKind : std::uint8_t { number, variable, unary_neg, binary, call };
    struct Node {
        NodeKind kind;
        double value = 0.0; // number
        Var var{};          // variable
        char op = 0;        // binary
        Fun fun{};          // call
        int a = -1, b = -1; // children
    };
    enum class Op : std::uint8_t { push_const, push_var, neg, add, sub, mul, div, pow, fun };
    struct Instr {
        Op op;
        int arg = 0;
        double value = 0.0;
    };
    static constexpr int kMaxStack = 64;

    std::vector<Node> nodes_;
    std::vector<Instr> program_;
    int root_ = -1;
    std::uint8_t used_ = 0;
    std::string source_;

    [[noreturn]] static void domain_error(const std::string& what) {
        throw PipelineError("expr", "domain error: " + what,
                            ErrorCode::expr_domain);
    }

    std::string print(int i) const {
        const Node& n = nodes_[std::size_t(i)];
        switch (n.kind) {
        case NodeKind::number: {
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.17g", n.value);
            return buf;
        }
        case NodeKind::variable:
            return std::string(kVarNames[static_cast<int>(n.var)]);
        case NodeKind::unary_neg: return "(-" + print(n.a) + ")";
        case NodeKind::binary:
            return "(" + print(n.a) + " " + n.op + " " + print(n.b) + ")";
        case NodeKind::call:
            return std::string(kFunNames[static_cast<int>(n.fun)]) + "(" +
                   print(n.a) + ")";
        }
        return {};
    }

    bool equal(int i, const Expression& o, int j) const {
        const Node& a = nodes_[std::size_t(i)];
        const Node& b = o.nodes_[std::size_t(j)];
        if (a.kind != b.kind) return false;
        switch (a.kind) {
        case NodeKind::number: return a.value == b.value;
        case NodeKind::variable: return a.var == b.var;
        case NodeKind::unary_neg: return equal(a.a, o, b.a);
        case NodeKind::binary:
            return a.op == b.op && equal(a.a, o, b.a) && equal(a.b, o, b.b);
        case NodeKind::call:
            return a.fun == b.fun && equal(a.a, o, b.a);
        }
        return false;
    }

    // Postfix compilation; returns the stack depth needed below each node.
    int compile(int i, int depth) {
        const Node& n = nodes_[std::size_t(i)];
        if (depth + 1 > kMaxStack)
            throw ValidationError("expr", "expression too deeply nested");
        switch (n.kind) {
        case NodeKind::number:
            program_.push_back({Op::push_const, 0, n.value});
            return depth + 1;
        case NodeKind::variable:
            program_.push_back({Op::push_var, static_cast<int>(n.var), 0.0});
            return depth + 1;
        case NodeKind::unary_neg: {
            int d = compile(n.a, depth);
            program_.push_back({Op::neg, 0, 0.0});
            return d;
        }
        case NodeKind::binary: {
            compile(n.a, depth);
            int d = compile(n.b, depth + 1);
            Op op = n.op == '+'   ? Op::add
                    : n.op == '-' ? Op::sub
                    : n.op == '*' ? Op::mul
                    : n.op == '/' ? Op::div
                                  : Op::pow;
            program_.push_back({op, 0, 0.0});
            return d - 1;
        }
        case NodeKind::call: {
            int d = compile(n.a, depth);
            program_.push_back({Op::fun, static_cast<int>(n.fun), 0.0});
            return d;
        }
        }
        return depth;
    }

    struct Parser {
        std::string_view src;
        std::size_t pos = 0;
        Expression* out;

        void skip_ws() {
            while (pos < src.size() &&
                   (src[pos] == ' ' || src[pos] == '\t' || src[pos] == '\n' ||
                    src[pos] == '\r'))
                ++pos;
        }
        bool peek(char c) {
            skip_ws();
            return pos < src.size() && src[pos] == c;
        }
        bool consume(char c) {
            if (peek(c)) {
                ++pos;
                return true;
            }
            return false;
        }

        int add(Expression::Node n) {
            out->nodes_.push_back(n);
            return int(out->nodes_.size()) - 1;
        }

        int parse_expr() {
            int lhs = parse_term();
            for (;;) {
                if (consume('+')) {
                    Node n{NodeKind::binary};
                    n.op = '+'; n.a = lhs; n.b = parse_term();
                    lhs = add(n);
                } else if (consume('-')) {
                    Node n{NodeKind::binary};
                    n.op = '-'; n.a = lhs; n.b = parse_term();
                    lhs = add(n);
                } else {
                    return lhs;
                }
            }
        }

        int parse_term() {
            int lhs = parse_unary();
            for (;;) {
                if (consume('*')) {
                    Node n{NodeKind::binary};
                    n.op = '*'; n.a = lhs; n.b = parse_unary();
                    lhs = add(n);
                } else if (consume('/')) {
                    Node n{NodeKind::binary};
                    n.op = '/'; n.a = lhs; n.b = parse_unary();
                    lhs = add(n);
                } else {
                    return lhs;
                }
            }
        }

        int parse_unary() {
            if (consume('-')) {
                Node n{NodeKind::unary_neg};
                n.a = parse_unary();
                return add(n);
            }
            return parse_power();
        }

        int parse_power() {
            int base = parse_primary();
            if (consume('^')) {
                Node n{NodeKind::binary};
                n.op = '^';
                n.a = base;
                n.b = parse_unary(); // right-associative, exponent may be negated
                return add(n);
            }
            return base;
        }

        int parse_primary() {
            skip_ws();
            if (pos >= src.size()) throw SyntaxError(pos, "operand");
            char c = src[pos];
            if (c == '(') {
                ++pos;
                int e = parse_expr();
                skip_ws();
                if (!consume(')')) throw SyntaxError(pos, "')'");
                return e;
            }
            if ((c >= '0' && c <= '9') || c == '.') return parse_number();
            if ((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_')
                return parse_ident();
            throw SyntaxError(pos, "operand");
        }

        int parse_number() {
            const char* begin = src.data() + pos;
            const char* end = src.data() + src.size();
            double value = 0.0;
            auto [ptr, ec] = std::from_chars(begin, end, value);
            if (ec != std::errc() || ptr == begin)
                throw SyntaxError(pos, "number");
            pos += std::size_t(ptr - begin);
            Node n{NodeKind::number};
            n.value = value;
            return add(n);
        }

        int parse_ident() {
            std::size_t start = pos;
            while (pos < src.size() &&
                   (std::isalnum(static_cast<unsigned char>(src[pos])) ||
                    src[pos] == '_'))
                ++pos;
            std::string name(src.substr(start, pos - start));
            if (peek('(')) {
                for (std::size_t f = 0; f < kFunNames.size(); ++f) {
                    if (name == kFunNames[f]) {
                        ++pos; // '('
                        Node n{NodeKind::call};
                        n.fun = static_cast<Fun>(f);
                        n.a = parse_expr();
                        skip_ws();
                        if (!consume(')')) throw SyntaxError(pos, "')'");
                        return add(n);
                    }
                }
                throw UnknownIdentifierError(start, name);
            }
            for (std::size_t v = 0; v < kVarNames.size(); ++v) {
                if (name == kVarNames[v]) {
                    Node n{NodeKind::variable};
                    n.var = static_cast<Var>(v);
                    out->used_ |= std::uint8_t(1u << v);
                    return add(n);
                }
            }
            throw UnknownIdentifierError(start, name);
        }
    };
};

inline Expression Expression::parse(std::string_view source) {
    Expression e;
    e.source_ = std::string(source);
    Parser p{source, 0, &e};
    e.root_ = p.parse_expr();
    p.skip_ws();
    if (p.pos != source.size())
        throw SyntaxError(p.pos, "end of input or operator");
    e.program_.reserve(e.nodes_.size());
    e.compile(e.root_, 0);
    return e;
}

} // namespace waveobs::expr
