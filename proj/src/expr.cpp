#include "nugap/expr.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <sstream>

namespace nugap {

const char* to_cstring(EvalStatus status) {
    switch (status) {
        case EvalStatus::ok: return "ok";
        case EvalStatus::pole_hit: return "pole-hit";
        case EvalStatus::branch_cut_hit: return "branch-cut-hit";
        case EvalStatus::overflow: return "overflow";
        case EvalStatus::invalid: return "invalid";
        case EvalStatus::not_coprime_at_point: return "not-coprime-at-point";
    }
    return "unknown";
}

ParseError::ParseError(const std::string& message, std::size_t offset,
                       std::vector<std::string> expected)
    : std::runtime_error(message), offset_(offset), expected_(std::move(expected)) {}

namespace {

ExprPtr node(Expr e) { return std::make_shared<const Expr>(std::move(e)); }

class Parser {
public:
    explicit Parser(std::string_view text) : text_(text) {}

    ExprPtr parse() {
        ExprPtr e = parse_expr_rule();
        skip_ws();
        if (pos_ != text_.size()) {
            fail("unexpected trailing input", {"end of input", "+", "-", "*", "/", "^"});
        }
        return e;
    }

private:
    std::string_view text_;
    std::size_t pos_ = 0;

    [[noreturn]] void fail(const std::string& what, std::vector<std::string> expected) {
        std::ostringstream msg;
        msg << "syntax error at offset " << pos_ << ": " << what;
        if (!expected.empty()) {
            msg << " (expected ";
            for (std::size_t i = 0; i < expected.size(); ++i) {
                msg << (i ? ", " : "") << expected[i];
            }
            msg << ")";
        }
        throw ParseError(msg.str(), pos_, std::move(expected));
    }

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) {
            ++pos_;
        }
    }

    char peek() {
        skip_ws();
        return pos_ < text_.size() ? text_[pos_] : '\0';
    }

    bool consume(char c) {
        if (peek() == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    void expect(char c, const char* spelling) {
        if (!consume(c)) {
            fail(std::string("missing '") + c + "'", {spelling});
        }
    }

    ExprPtr parse_expr_rule() {
        ExprPtr e = parse_term();
        for (;;) {
            if (consume('+')) {
                e = make_binary(ExprKind::add, e, parse_term());
            } else if (consume('-')) {
                e = make_binary(ExprKind::sub, e, parse_term());
            } else {
                return e;
            }
        }
    }

    ExprPtr parse_term() {
        ExprPtr e = parse_factor();
        for (;;) {
            if (consume('*')) {
                e = make_binary(ExprKind::mul, e, parse_factor());
            } else if (consume('/')) {
                e = make_binary(ExprKind::div, e, parse_factor());
            } else {
                return e;
            }
        }
    }

    ExprPtr parse_factor() {
        if (peek() == '-') {
            ++pos_;
            return make_neg(parse_factor());
        }
        ExprPtr base = parse_base();
        if (consume('^')) {
            return make_pow(base, parse_integer());
        }
        return base;
    }

    int parse_integer() {
        skip_ws();
        std::size_t start = pos_;
        if (pos_ < text_.size() && (text_[pos_] == '-' || text_[pos_] == '+')) {
            ++pos_;
        }
        std::size_t digits_begin = pos_;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
            ++pos_;
        }
        if (pos_ == digits_begin) {
            pos_ = start;
            fail("exponent must be an integer", {"integer"});
        }
        int value = 0;
        auto res = std::from_chars(text_.data() + start, text_.data() + pos_, value);
        if (res.ec != std::errc{} || value > 9999 || value < -9999) {
            pos_ = start;
            fail("exponent out of range", {"integer in [-9999, 9999]"});
        }
        return value;
    }

    ExprPtr parse_base() {
        char c = peek();
        if (c == '(') {
            ++pos_;
            ExprPtr e = parse_expr_rule();
            expect(')', ")");
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            return parse_number();
        }
        if (std::isalpha(static_cast<unsigned char>(c))) {
            return parse_ident();
        }
        fail("expected a value", {"number", "i", "s", "pi", "euler", "function", "("});
    }

    ExprPtr parse_number() {
        std::size_t start = pos_;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
            ++pos_;
        }
        if (pos_ < text_.size() && text_[pos_] == '.') {
            ++pos_;
            while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
                ++pos_;
            }
        }
        if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
            std::size_t mark = pos_;
            ++pos_;
            if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) {
                ++pos_;
            }
            if (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
                while (pos_ < text_.size() &&
                       std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
                    ++pos_;
                }
            } else {
                pos_ = mark;  // the 'e' belongs to a following token, not this number
            }
        }
        double value = 0.0;
        auto res = std::from_chars(text_.data() + start, text_.data() + pos_, value);
        if (res.ec != std::errc{}) {
            pos_ = start;
            fail("malformed number", {"number"});
        }
        return make_constant(Complex(value, 0.0));
    }

    ExprPtr parse_ident() {
        std::size_t start = pos_;
        while (pos_ < text_.size() && std::isalpha(static_cast<unsigned char>(text_[pos_]))) {
            ++pos_;
        }
        std::string_view name = text_.substr(start, pos_ - start);
        if (name == "i") return node({.kind = ExprKind::imaginary_unit});
        if (name == "s") return make_variable();
        if (name == "pi") return make_constant(Complex(M_PI, 0.0));
        if (name == "euler") return make_constant(Complex(M_E, 0.0));

        FuncId func;
        if (name == "sqrt") func = FuncId::sqrt_fn;
        else if (name == "log") func = FuncId::log_fn;
        else if (name == "exp") func = FuncId::exp_fn;
        else if (name == "sinh") func = FuncId::sinh_fn;
        else if (name == "cosh") func = FuncId::cosh_fn;
        else if (name == "tanh") func = FuncId::tanh_fn;
        else {
            pos_ = start;
            std::ostringstream msg;
            msg << "unknown identifier '" << name << "' at offset " << start;
            throw ParseError(msg.str(), start, {});
        }
        expect('(', "(");
        ExprPtr arg = parse_expr_rule();
        expect(')', ")");
        return make_apply(func, arg);
    }
};

// Principal-branch convention: Arg in (-pi, pi]. A -0.0 imaginary part on the
// negative real axis would flip std::arg to -pi, so normalize it away before
// sqrt/log.
Complex normalize_branch_arg(Complex v) {
    if (v.imag() == 0.0) {
        return Complex(v.real(), 0.0);
    }
    return v;
}

EvalOutcome eval_node(const Expr& e, Complex s) {
    switch (e.kind) {
        case ExprKind::constant:
            return classify_value(e.constant);
        case ExprKind::variable_s:
            return classify_value(s);
        case ExprKind::imaginary_unit:
            return EvalOutcome::success(Complex(0.0, 1.0));
        case ExprKind::add: {
            auto a = eval_node(*e.lhs, s);
            if (!a.ok()) return a;
            auto b = eval_node(*e.rhs, s);
            if (!b.ok()) return b;
            return classify_value(a.value + b.value);
        }
        case ExprKind::sub: {
            auto a = eval_node(*e.lhs, s);
            if (!a.ok()) return a;
            auto b = eval_node(*e.rhs, s);
            if (!b.ok()) return b;
            return classify_value(a.value - b.value);
        }
        case ExprKind::mul: {
            auto a = eval_node(*e.lhs, s);
            if (!a.ok()) return a;
            auto b = eval_node(*e.rhs, s);
            if (!b.ok()) return b;
            return classify_value(a.value * b.value);
        }
        case ExprKind::div: {
            auto a = eval_node(*e.lhs, s);
            if (!a.ok()) return a;
            auto b = eval_node(*e.rhs, s);
            if (!b.ok()) return b;
            if (std::abs(b.value) < kPoleTolerance) {
                return EvalOutcome::failure(EvalStatus::pole_hit);
            }
            return classify_value(a.value / b.value);
        }
        case ExprKind::neg: {
            auto a = eval_node(*e.lhs, s);
            if (!a.ok()) return a;
            return classify_value(-a.value);
        }
        case ExprKind::pow_int: {
            auto a = eval_node(*e.lhs, s);
            if (!a.ok()) return a;
            int n = e.exponent;
            if (n == 0) return EvalOutcome::success(Complex(1.0, 0.0));
            if (n < 0 && std::abs(a.value) < kPoleTolerance) {
                return EvalOutcome::failure(EvalStatus::pole_hit);
            }
            Complex base = n > 0 ? a.value : 1.0 / a.value;
            unsigned k = static_cast<unsigned>(n > 0 ? n : -n);
            Complex acc(1.0, 0.0);
            while (k > 0) {
                if (k & 1u) {
                    acc *= base;
                    auto chk = classify_value(acc);
                    if (!chk.ok()) return chk;
                }
                k >>= 1u;
                if (k > 0) {
                    base *= base;
                    auto chk = classify_value(base);
                    if (!chk.ok()) return chk;
                }
            }
            return classify_value(acc);
        }
        case ExprKind::apply: {
            auto a = eval_node(*e.lhs, s);
            if (!a.ok()) return a;
            Complex v = a.value;
            switch (e.func) {
                case FuncId::sqrt_fn:
                    return classify_value(std::sqrt(normalize_branch_arg(v)));
                case FuncId::log_fn:
                    if (std::abs(v) < kPoleTolerance) {
                        return EvalOutcome::failure(EvalStatus::pole_hit);
                    }
                    return classify_value(std::log(normalize_branch_arg(v)));
                case FuncId::exp_fn:
                    return classify_value(std::exp(v));
                case FuncId::sinh_fn:
                    return classify_value(std::sinh(v));
                case FuncId::cosh_fn:
                    return classify_value(std::cosh(v));
                case FuncId::tanh_fn:
                    return classify_value(std::tanh(v));
            }
            return EvalOutcome::failure(EvalStatus::invalid);
        }
    }
    return EvalOutcome::failure(EvalStatus::invalid);
}

std::string format_number(double x) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

int precedence_of(const Expr& e) {
    switch (e.kind) {
        case ExprKind::add:
        case ExprKind::sub:
            return 1;
        case ExprKind::mul:
        case ExprKind::div:
            return 2;
        case ExprKind::neg:
            return 3;
        case ExprKind::pow_int:
            return 4;
        default:
            return 5;
    }
}

void print_node(const Expr& e, std::string& out);

void print_child(const Expr& child, int min_prec, std::string& out) {
    bool parens = precedence_of(child) < min_prec;
    // a negative or complex constant needs parens wherever a bare atom is expected
    if (child.kind == ExprKind::constant &&
        (child.constant.real() < 0.0 || child.constant.imag() != 0.0)) {
        parens = true;
    }
    if (parens) out += '(';
    print_node(child, out);
    if (parens) out += ')';
}

void print_node(const Expr& e, std::string& out) {
    switch (e.kind) {
        case ExprKind::constant: {
            Complex c = e.constant;
            if (c.imag() == 0.0) {
                out += format_number(c.real());
            } else {
                out += '(';
                out += format_number(c.real());
                out += '+';
                out += format_number(c.imag());
                out += "*i)";
            }
            return;
        }
        case ExprKind::variable_s:
            out += 's';
            return;
        case ExprKind::imaginary_unit:
            out += 'i';
            return;
        case ExprKind::add:
            print_child(*e.lhs, 1, out);
            out += '+';
            print_child(*e.rhs, 2, out);
            return;
        case ExprKind::sub:
            print_child(*e.lhs, 1, out);
            out += '-';
            print_child(*e.rhs, 2, out);
            return;
        case ExprKind::mul:
            print_child(*e.lhs, 2, out);
            out += '*';
            print_child(*e.rhs, 3, out);
            return;
        case ExprKind::div:
            print_child(*e.lhs, 2, out);
            out += '/';
            print_child(*e.rhs, 3, out);
            return;
        case ExprKind::neg:
            out += '-';
            print_child(*e.lhs, 3, out);
            return;
        case ExprKind::pow_int: {
            print_child(*e.lhs, 5, out);
            out += '^';
            char buf[16];
            auto res = std::to_chars(buf, buf + sizeof(buf), e.exponent);
            out.append(buf, res.ptr);
            return;
        }
        case ExprKind::apply: {
            switch (e.func) {
                case FuncId::sqrt_fn: out += "sqrt"; break;
                case FuncId::log_fn: out += "log"; break;
                case FuncId::exp_fn: out += "exp"; break;
                case FuncId::sinh_fn: out += "sinh"; break;
                case FuncId::cosh_fn: out += "cosh"; break;
                case FuncId::tanh_fn: out += "tanh"; break;
            }
            out += '(';
            print_node(*e.lhs, out);
            out += ')';
            return;
        }
    }
}

}  // namespace

ExprPtr parse_expr(std::string_view text) { return Parser(text).parse(); }

std::string to_string(const Expr& e) {
    std::string out;
    print_node(e, out);
    return out;
}

EvalOutcome eval(const Expr& e, Complex s) { return eval_node(e, s); }

EvalOutcome conj_eval(const Expr& e, Complex s) {
    auto r = eval_node(e, s);
    if (!r.ok()) return r;
    return EvalOutcome::success(std::conj(r.value));
}

ExprPtr make_constant(Complex c) {
    return node({.kind = ExprKind::constant, .constant = c});
}
ExprPtr make_variable() { return node({.kind = ExprKind::variable_s}); }
ExprPtr make_binary(ExprKind kind, ExprPtr lhs, ExprPtr rhs) {
    return node({.kind = kind, .lhs = std::move(lhs), .rhs = std::move(rhs)});
}
ExprPtr make_neg(ExprPtr child) {
    return node({.kind = ExprKind::neg, .lhs = std::move(child)});
}
ExprPtr make_pow(ExprPtr base, int exponent) {
    return node({.kind = ExprKind::pow_int, .exponent = exponent, .lhs = std::move(base)});
}
ExprPtr make_apply(FuncId func, ExprPtr child) {
    return node({.kind = ExprKind::apply, .func = func, .lhs = std::move(child)});
}

}  // namespace nugap
