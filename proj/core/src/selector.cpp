#include "fem/selector.hpp"

#include "fem/error.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <vector>

namespace fem {

namespace detail {

enum class Op { Num, X, Y, Neg, Add, Sub, Mul, Div, Pow, Eq, Le, Ge, Lt, Gt, And, Or, Sin, Cos, Sqrt, Abs, Exp };

struct SelectorNode {
    Op op;
    double number = 0.0;
    std::shared_ptr<const SelectorNode> lhs;
    std::shared_ptr<const SelectorNode> rhs;

    [[nodiscard]] double eval(double x, double y) const
    {
        switch (op) {
        case Op::Num: return number;
        case Op::X: return x;
        case Op::Y: return y;
        case Op::Neg: return -lhs->eval(x, y);
        case Op::Add: return lhs->eval(x, y) + rhs->eval(x, y);
        case Op::Sub: return lhs->eval(x, y) - rhs->eval(x, y);
        case Op::Mul: return lhs->eval(x, y) * rhs->eval(x, y);
        case Op::Div: return lhs->eval(x, y) / rhs->eval(x, y);
        case Op::Pow: return std::pow(lhs->eval(x, y), rhs->eval(x, y));
        case Op::Eq: return lhs->eval(x, y) == rhs->eval(x, y) ? 1.0 : 0.0;
        case Op::Le: return lhs->eval(x, y) <= rhs->eval(x, y) ? 1.0 : 0.0;
        case Op::Ge: return lhs->eval(x, y) >= rhs->eval(x, y) ? 1.0 : 0.0;
        case Op::Lt: return lhs->eval(x, y) < rhs->eval(x, y) ? 1.0 : 0.0;
        case Op::Gt: return lhs->eval(x, y) > rhs->eval(x, y) ? 1.0 : 0.0;
        case Op::And: return (lhs->eval(x, y) != 0.0 && rhs->eval(x, y) != 0.0) ? 1.0 : 0.0;
        case Op::Or: return (lhs->eval(x, y) != 0.0 || rhs->eval(x, y) != 0.0) ? 1.0 : 0.0;
        case Op::Sin: return std::sin(lhs->eval(x, y));
        case Op::Cos: return std::cos(lhs->eval(x, y));
        case Op::Sqrt: return std::sqrt(lhs->eval(x, y));
        case Op::Abs: return std::abs(lhs->eval(x, y));
        case Op::Exp: return std::exp(lhs->eval(x, y));
        }
        return 0.0;
    }
};

} // namespace detail

namespace {

using detail::Op;
using NodePtr = std::shared_ptr<const detail::SelectorNode>;

NodePtr make(Op op, NodePtr lhs = nullptr, NodePtr rhs = nullptr, double number = 0.0)
{
    return std::make_shared<const detail::SelectorNode>(detail::SelectorNode{op, number, std::move(lhs), std::move(rhs)});
}

// Recursive descent over
//   or := and ('|' and)* ; and := cmp ('&' cmp)* ; cmp := sum (relop sum)?
//   sum := prod (('+'|'-') prod)* ; prod := unary (('*'|'/'|'.*'|'./') unary)*
//   unary := '-' unary | pow ; pow := atom (('^'|'.^') unary)?
class Parser {
public:
    explicit Parser(std::string_view src) : src_(src) {}

    NodePtr parse()
    {
        NodePtr n = parse_or();
        skip_ws();
        if (pos_ != src_.size()) {
            fail("unexpected '" + std::string(1, src_[pos_]) + "'");
        }
        return n;
    }

private:
    std::string_view src_;
    std::size_t pos_ = 0;

    [[noreturn]] void fail(const std::string& msg) const { throw ParseError("selector: " + msg, pos_); }

    void skip_ws()
    {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) {
            ++pos_;
        }
    }

    bool accept(std::string_view tok)
    {
        skip_ws();
        if (src_.substr(pos_, tok.size()) == tok) {
            pos_ += tok.size();
            return true;
        }
        return false;
    }

    NodePtr parse_or()
    {
        NodePtr n = parse_and();
        while (accept("|")) {
            n = make(Op::Or, n, parse_and());
        }
        return n;
    }

    NodePtr parse_and()
    {
        NodePtr n = parse_cmp();
        while (accept("&")) {
            n = make(Op::And, n, parse_cmp());
        }
        return n;
    }

    NodePtr parse_cmp()
    {
        NodePtr n = parse_sum();
        if (accept("==")) return make(Op::Eq, n, parse_sum());
        if (accept("<=")) return make(Op::Le, n, parse_sum());
        if (accept(">=")) return make(Op::Ge, n, parse_sum());
        if (accept("<")) return make(Op::Lt, n, parse_sum());
        if (accept(">")) return make(Op::Gt, n, parse_sum());
        skip_ws();
        if (pos_ < src_.size() && src_[pos_] == '=') {
            fail("expected '==' for comparison");
        }
        return n;
    }

    NodePtr parse_sum()
    {
        NodePtr n = parse_prod();
        for (;;) {
            if (accept("+")) {
                n = make(Op::Add, n, parse_prod());
            } else if (accept("-")) {
                n = make(Op::Sub, n, parse_prod());
            } else {
                return n;
            }
        }
    }

    NodePtr parse_prod()
    {
        NodePtr n = parse_unary();
        for (;;) {
            if (accept(".*") || accept("*")) {
                n = make(Op::Mul, n, parse_unary());
            } else if (accept("./") || accept("/")) {
                n = make(Op::Div, n, parse_unary());
            } else {
                return n;
            }
        }
    }

    NodePtr parse_unary()
    {
        if (accept("-")) {
            return make(Op::Neg, parse_unary());
        }
        return parse_pow();
    }

    NodePtr parse_pow()
    {
        NodePtr base = parse_atom();
        if (accept(".^") || accept("^")) {
            return make(Op::Pow, base, parse_unary());
        }
        return base;
    }

    NodePtr parse_atom()
    {
        skip_ws();
        if (pos_ >= src_.size()) {
            fail("unexpected end of expression");
        }
        const char c = src_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) ||
            (c == '.' && pos_ + 1 < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_ + 1])))) {
            return parse_number();
        }
        if (c == '(') {
            ++pos_;
            NodePtr n = parse_or();
            if (!accept(")")) fail("expected ')'");
            return n;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            const std::size_t start = pos_;
            while (pos_ < src_.size() &&
                   (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) {
                ++pos_;
            }
            const std::string_view id = src_.substr(start, pos_ - start);
            if (id == "x") return make(Op::X);
            if (id == "y") return make(Op::Y);
            if (id == "pi") return make(Op::Num, nullptr, nullptr, std::numbers::pi);
            Op fn;
            if (id == "sin") fn = Op::Sin;
            else if (id == "cos") fn = Op::Cos;
            else if (id == "sqrt") fn = Op::Sqrt;
            else if (id == "abs") fn = Op::Abs;
            else if (id == "exp") fn = Op::Exp;
            else {
                pos_ = start;
                fail("unknown identifier '" + std::string(id) + "'");
            }
            if (!accept("(")) fail("expected '(' after function name");
            NodePtr arg = parse_or();
            if (!accept(")")) fail("expected ')'");
            return make(fn, arg);
        }
        fail("unexpected '" + std::string(1, c) + "'");
    }

    NodePtr parse_number()
    {
        const std::size_t start = pos_;
        while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
        // a '.' followed by an operator belongs to '.*', './' or '.^'
        if (pos_ < src_.size() && src_[pos_] == '.' &&
            !(pos_ + 1 < src_.size() && (src_[pos_ + 1] == '*' || src_[pos_ + 1] == '/' || src_[pos_ + 1] == '^'))) {
            ++pos_;
            while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
        }
        if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
            std::size_t p = pos_ + 1;
            if (p < src_.size() && (src_[p] == '+' || src_[p] == '-')) ++p;
            if (p < src_.size() && std::isdigit(static_cast<unsigned char>(src_[p]))) {
                pos_ = p;
                while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
            }
        }
        const std::string text(src_.substr(start, pos_ - start));
        return make(Op::Num, nullptr, nullptr, std::strtod(text.c_str(), nullptr));
    }
};

} // namespace

Selector::Selector(std::string_view expr) : source_(expr), root_(Parser(expr).parse()) {}

double Selector::value(double x, double y) const
{
    return root_->eval(x, y);
}

Selector parse_selector(std::string_view expr)
{
    return Selector(expr);
}

} // namespace fem
