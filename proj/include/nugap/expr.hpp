#pragma once

// Scalar complex-analytic expressions in one variable s, with principal-branch
// sqrt/log. Grammar (whitespace insignificant, ASCII):
//
//   expr   := term { ("+"|"-") term } ;
//   term   := factor { ("*"|"/") factor } ;
//   factor := base [ "^" integer ] ;
//   base   := number | "i" | "s" | "pi" | "euler"
//           | ident "(" expr ")" | "(" expr ")" | "-" factor ;
//   ident  := "sqrt" | "log" | "exp" | "sinh" | "cosh" | "tanh" ;
//
// "^" binds tighter than unary minus (-s^2 is -(s^2)) and accepts integer
// exponents only; general powers must be written exp(w*log(s)).

#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "nugap/types.hpp"

namespace nugap {

enum class ExprKind {
    constant,
    variable_s,
    imaginary_unit,
    add,
    sub,
    mul,
    div,
    neg,
    pow_int,
    apply,
};

enum class FuncId { sqrt_fn, log_fn, exp_fn, sinh_fn, cosh_fn, tanh_fn };

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

// Immutable after construction; freely shareable across threads.
struct Expr {
    ExprKind kind{};
    Complex constant{};   // ExprKind::constant
    int exponent = 0;     // ExprKind::pow_int
    FuncId func{};        // ExprKind::apply
    ExprPtr lhs;          // left child / only child of unary nodes
    ExprPtr rhs;          // right child of binary nodes
};

class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& message, std::size_t offset,
               std::vector<std::string> expected);

    // Byte offset of the first offending character.
    std::size_t offset() const { return offset_; }
    // Token spellings that would have been accepted at offset(); empty for
    // unknown-identifier errors.
    const std::vector<std::string>& expected() const { return expected_; }

private:
    std::size_t offset_;
    std::vector<std::string> expected_;
};

ExprPtr parse_expr(std::string_view text);

// Prints an expression that parses back to an evaluation-equivalent tree.
std::string to_string(const Expr& e);

EvalOutcome eval(const Expr& e, Complex s);

// Pointwise complex conjugation of eval (the boundary-algebra involution).
EvalOutcome conj_eval(const Expr& e, Complex s);

// Convenience constructors for programmatic trees (used by tests/tools).
ExprPtr make_constant(Complex c);
ExprPtr make_variable();
ExprPtr make_binary(ExprKind kind, ExprPtr lhs, ExprPtr rhs);
ExprPtr make_neg(ExprPtr child);
ExprPtr make_pow(ExprPtr base, int exponent);
ExprPtr make_apply(FuncId func, ExprPtr child);

}  // namespace nugap
