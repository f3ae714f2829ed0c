#pragma once

// Arithmetic expressions in x1, x2 and r = |x|, compiled once and evaluated
// with forward-mode derivatives.
//
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := ('-' | '+') unary | power
//   power   := primary ('^' unary)?
//   primary := number | variable | function '(' expr ')' | '(' expr ')'
//
// Functions: exp, sin, cos, sqrt, log.

#include <string>
#include <vector>

#include "randers/autodiff.hpp"
#include "randers/fields.hpp"

namespace randers {

class Expression {
public:
    // Throws ParseError; `line` and `column` locate the first character of
    // `text` in an enclosing document.
    static Expression parse(const std::string& text, std::size_t line = 1, std::size_t column = 1);

    const std::string& text() const noexcept { return text_; }
    // True when the expression depends on position only through r.
    bool radial() const noexcept { return radial_; }
    bool uses_position() const noexcept { return uses_position_; }

    double value(const Vec2& x) const;
    Dual dual(const Vec2& x) const;
    Jet2 jet(const Vec2& x) const;

    ScalarField field() const;

    enum class Op { number, x1, x2, r, add, sub, mul, div, pow, neg, exp, sin, cos, sqrt, log };
    struct Instruction {
        Op op;
        double value = 0.0;
    };

private:
    template <class T>
    T evaluate(const T& x1, const T& x2) const;

    std::string text_;
    std::vector<Instruction> program_;
    bool radial_ = true;
    bool uses_position_ = false;
};

// 1-form / vector field whose components are two expressions.
OneFormField expression_form(const Expression& first, const Expression& second);

}  // namespace randers
