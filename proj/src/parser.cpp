#include "jetflow/parser.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>

namespace jetflow {

namespace {

class Parser {
public:
    Parser(const std::string& text, int dim) : text_(text), dim_(dim) {}

    ExprPtr run() {
        ExprPtr e = parse_expr();
        skip_ws();
        if (pos_ < text_.size()) fail("unexpected trailing input");
        return e;
    }

private:
    const std::string& text_;
    int dim_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;

    [[noreturn]] void fail(const std::string& msg) { throw ParseError(msg, line_, col_); }

    void bump(std::size_t n = 1) {
        for (std::size_t i = 0; i < n && pos_ < text_.size(); ++i) {
            if (text_[pos_] == '\n') {
                ++line_;
                col_ = 1;
            } else {
                ++col_;
            }
            ++pos_;
        }
    }

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_])))
            bump();
    }

    char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }

    bool accept(char c) {
        skip_ws();
        if (peek() == c) {
            bump();
            return true;
        }
        return false;
    }

    void expect(char c) {
        if (!accept(c)) fail(std::string("expected '") + c + "'");
    }

    ExprPtr parse_expr() {
        ExprPtr e = parse_term();
        for (;;) {
            skip_ws();
            if (accept('+'))
                e = add(e, parse_term());
            else if (accept('-'))
                e = sub(e, parse_term());
            else
                return e;
        }
    }

    ExprPtr parse_term() {
        ExprPtr e = parse_unary();
        for (;;) {
            skip_ws();
            if (accept('*'))
                e = mul(e, parse_unary());
            else if (accept('/'))
                e = div(e, parse_unary());
            else
                return e;
        }
    }

    ExprPtr parse_unary() {
        skip_ws();
        if (accept('-')) return neg(parse_unary());
        return parse_power();
    }

    ExprPtr parse_power() {
        ExprPtr base = parse_atom();
        skip_ws();
        if (accept('^')) return pow(base, parse_unary());
        return base;
    }

    ExprPtr parse_atom() {
        skip_ws();
        char c = peek();
        if (c == '(') {
            bump();
            ExprPtr e = parse_expr();
            expect(')');
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
        if (std::isalpha(static_cast<unsigned char>(c))) return parse_name();
        if (c == '\0') fail("unexpected end of input");
        fail(std::string("unexpected character '") + c + "'");
    }

    ExprPtr parse_number() {
        const char* begin = text_.c_str() + pos_;
        char* end = nullptr;
        double value = std::strtod(begin, &end);
        if (end == begin) fail("malformed number");
        if (!std::isfinite(value)) fail("literal is not a finite number");
        bump(static_cast<std::size_t>(end - begin));
        return constant(value);
    }

    ExprPtr parse_name() {
        std::size_t start = pos_;
        while (pos_ < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
            bump();
        std::string name = text_.substr(start, pos_ - start);

        if (name == "sin") return sin(parse_call_arg());
        if (name == "cos") return cos(parse_call_arg());
        if (name == "exp") return exp(parse_call_arg());
        if (name == "log") return log(parse_call_arg());
        if (name == "sqrt") return sqrt(parse_call_arg());
        if (name == "atan") return atan(parse_call_arg());

        if (name == "t") return variable(sym_t());
        if (name == "xdot0") return variable(sym_vt());
        if ((name[0] == 'q' || name[0] == 'v') && name.size() > 1) {
            bool digits = true;
            for (std::size_t i = 1; i < name.size(); ++i)
                if (!std::isdigit(static_cast<unsigned char>(name[i]))) digits = false;
            if (digits) {
                int idx = std::atoi(name.c_str() + 1);
                if (idx < 1 || idx > dim_)
                    throw UnknownSymbol("variable " + name + " outside chart of dimension " +
                                        std::to_string(dim_));
                return variable(name[0] == 'q' ? sym_q(idx) : sym_v(idx));
            }
        }
        fail("unknown name '" + name + "'");
    }

    ExprPtr parse_call_arg() {
        expect('(');
        ExprPtr e = parse_expr();
        expect(')');
        return e;
    }
};

}  // namespace

ScalarField parse_field(const std::string& text, int dim) {
    return ScalarField(dim, Parser(text, dim).run());
}

}  // namespace jetflow
