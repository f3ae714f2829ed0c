#include "randers/expression.hpp"

#include <cctype>
#include <cmath>
#include <string_view>

#include "randers/errors.hpp"
#include "randers/numeric_text.hpp"

namespace randers {

namespace {

class Parser {
public:
    Parser(std::string_view text, std::size_t line, std::size_t column)
        : text_(text), line_(line), column_(column) {}

    std::vector<Expression::Instruction> run() {
        expr();
        skip_space();
        if (pos_ != text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
        return std::move(out_);
    }

    bool uses_cartesian = false;
    bool uses_position = false;

private:
    using Op = Expression::Op;

    [[noreturn]] void fail(const std::string& what) const { throw ParseError(what, static_cast<int>(line_), static_cast<int>(column_ + pos_)); }

    void skip_space() {
        while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t')) ++pos_;
    }

    bool accept(std::string_view token) {
        skip_space();
        if (text_.substr(pos_, token.size()) == token) {
            pos_ += token.size();
            return true;
        }
        return false;
    }

    void emit(Op op, double value = 0.0) { out_.push_back({op, value}); }

    void expr() {
        term();
        while (true) {
            if (accept("+")) {
                term();
                emit(Op::add);
            } else if (accept("-")) {
                term();
                emit(Op::sub);
            } else {
                return;
            }
        }
    }

    void term() {
        unary();
        while (true) {
            if (accept("*") || accept("·")) {
                unary();
                emit(Op::mul);
            } else if (accept("/")) {
                unary();
                emit(Op::div);
            } else {
                return;
            }
        }
    }

    void unary() {
        if (accept("-")) {
            unary();
            emit(Op::neg);
        } else if (accept("+")) {
            unary();
        } else {
            power();
        }
    }

    void power() {
        primary();
        if (accept("^")) {
            unary();
            emit(Op::pow);
        }
    }

    void primary() {
        skip_space();
        if (pos_ >= text_.size()) fail("unexpected end of expression");
        const char ch = text_[pos_];
        if (ch == '(') {
            ++pos_;
            expr();
            if (!accept(")")) fail("expected ')'");
            return;
        }
        if (std::isdigit(static_cast<unsigned char>(ch)) || ch == '.') {
            const std::size_t start = pos_;
            while (pos_ < text_.size() &&
                   (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.'))
                ++pos_;
            if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
                std::size_t p = pos_ + 1;
                if (p < text_.size() && (text_[p] == '+' || text_[p] == '-')) ++p;
                if (p < text_.size() && std::isdigit(static_cast<unsigned char>(text_[p]))) {
                    pos_ = p;
                    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
                }
            }
            const auto v = parse_double(text_.substr(start, pos_ - start));
            if (!v) {
                pos_ = start;
                fail("malformed number");
            }
            emit(Op::number, *v);
            return;
        }
        if (std::isalpha(static_cast<unsigned char>(ch)) || ch == '_') {
            const std::size_t start = pos_;
            while (pos_ < text_.size() &&
                   (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
                ++pos_;
            const std::string_view name = text_.substr(start, pos_ - start);
            if (name == "x1" || name == "x2" || name == "r") {
                uses_position = true;
                if (name != "r") uses_cartesian = true;
                emit(name == "x1" ? Op::x1 : name == "x2" ? Op::x2 : Op::r);
                return;
            }
            Op fn;
            if (name == "exp") fn = Op::exp;
            else if (name == "sin") fn = Op::sin;
            else if (name == "cos") fn = Op::cos;
            else if (name == "sqrt") fn = Op::sqrt;
            else if (name == "log") fn = Op::log;
            else {
                pos_ = start;
                fail("unknown identifier '" + std::string(name) + "' (variables: x1, x2, r; functions: exp, sin, cos, sqrt, log)");
            }
            if (!accept("(")) fail("expected '(' after function name");
            expr();
            if (!accept(")")) fail("expected ')'");
            emit(fn);
            return;
        }
        fail("unexpected '" + std::string(1, ch) + "'");
    }

    std::string_view text_;
    std::size_t line_, column_;
    std::size_t pos_ = 0;
    std::vector<Expression::Instruction> out_;
};

template <class T>
T power_of(const T& base, const T& exponent) {
    return pow(base, exponent);
}

}  // namespace

Expression Expression::parse(const std::string& text, std::size_t line, std::size_t column) {
    Parser parser(text, line, column);
    Expression e;
    e.text_ = text;
    e.program_ = parser.run();
    e.radial_ = !parser.uses_cartesian;
    e.uses_position_ = parser.uses_position;
    return e;
}

template <class T>
T Expression::evaluate(const T& x1, const T& x2) const {
    std::vector<T> stack;
    stack.reserve(program_.size());
    auto pop = [&stack]() {
        T v = stack.back();
        stack.pop_back();
        return v;
    };
    for (const Instruction& in : program_) {
        switch (in.op) {
            case Op::number: stack.push_back(T(in.value)); break;
            case Op::x1: stack.push_back(x1); break;
            case Op::x2: stack.push_back(x2); break;
            case Op::r: stack.push_back(sqrt(x1 * x1 + x2 * x2)); break;
            case Op::neg: stack.back() = -stack.back(); break;
            case Op::exp: stack.back() = exp(stack.back()); break;
            case Op::sin: stack.back() = sin(stack.back()); break;
            case Op::cos: stack.back() = cos(stack.back()); break;
            case Op::sqrt: stack.back() = sqrt(stack.back()); break;
            case Op::log: stack.back() = log(stack.back()); break;
            default: {
                const T b = pop();
                T& a = stack.back();
                switch (in.op) {
                    case Op::add: a = a + b; break;
                    case Op::sub: a = a - b; break;
                    case Op::mul: a = a * b; break;
                    case Op::div: a = a / b; break;
                    case Op::pow: a = power_of(a, b); break;
                    default: break;
                }
            }
        }
    }
    return stack.back();
}

double Expression::value(const Vec2& x) const { return dual(x).val; }

Dual Expression::dual(const Vec2& x) const {
    return evaluate(Dual::variable(x[0], 0), Dual::variable(x[1], 1));
}

Jet2 Expression::jet(const Vec2& x) const {
    return evaluate(Jet2::variable(x[0], 0), Jet2::variable(x[1], 1));
}

ScalarField Expression::field() const {
    const Expression self = *this;
    return ScalarField([self](const Vec2& x) { return self.jet(x); }, "\"" + text_ + "\"");
}

OneFormField expression_form(const Expression& first, const Expression& second) {
    return OneFormField([first, second](const Vec2& x) { return DualVec2{first.dual(x), second.dual(x)}; },
                        "field(\"" + first.text() + "\", \"" + second.text() + "\")");
}

}  // namespace randers
