#include "odegeom/parse.hpp"

#include <cctype>

namespace odegeom {

namespace {

class Parser {
public:
    Parser(const std::string& s, const ParseOptions& o) : s_(s), opts_(o) {}

    Expr run() {
        Expr e = expr();
        skip();
        if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
        return e;
    }

private:
    [[noreturn]] void fail(const std::string& msg) const { throw ParseError("syntax error: " + msg, pos_); }

    void skip() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skip();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    void expect(char c) {
        if (!accept(c)) fail(std::string("expected '") + c + "'");
    }

    Expr expr() {
        std::vector<Expr> terms{term()};
        for (;;) {
            if (accept('+'))
                terms.push_back(term());
            else if (accept('-'))
                terms.push_back(-term());
            else
                break;
        }
        return terms.size() == 1 ? terms.front() : add(std::move(terms));
    }

    Expr term() {
        Expr acc = unary();
        for (;;) {
            if (accept('*')) {
                acc = acc * unary();
            } else if (accept('/')) {
                std::size_t at = pos_;
                Expr d = unary();
                if (d.is_zero()) throw ParseError("division by zero", at);
                acc = acc / d;
            } else {
                break;
            }
        }
        return acc;
    }

    Expr unary() {
        if (accept('-')) return -unary();
        if (accept('+')) return unary();
        return power();
    }

    Expr power() {
        Expr b = primary();
        if (accept('^')) {
            std::size_t at = pos_;
            Expr e = unary();
            try {
                return pow(b, e);
            } catch (const std::domain_error& err) {
                throw ParseError(err.what(), at);
            }
        }
        return b;
    }

    Expr number() {
        std::size_t start = pos_;
        Integer num = 0, den = 1;
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_])))
            num = num * 10 + (s_[pos_++] - '0');
        if (pos_ < s_.size() && s_[pos_] == '.') {
            ++pos_;
            bool any = false;
            while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
                num = num * 10 + (s_[pos_++] - '0');
                den *= 10;
                any = true;
            }
            if (!any) throw ParseError("syntax error: malformed number", start);
        }
        return Expr(Rational(num, den));
    }

    std::string identifier() {
        std::size_t start = pos_;
        while (pos_ < s_.size() &&
               (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
            ++pos_;
        return s_.substr(start, pos_ - start);
    }

    Expr primary() {
        skip();
        if (pos_ >= s_.size()) fail("unexpected end of input");
        char c = s_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (c == '(') {
            ++pos_;
            Expr e = expr();
            expect(')');
            return e;
        }
        if (std::isalpha(static_cast<unsigned char>(c))) {
            std::size_t start = pos_;
            std::string id = identifier();
            skip();
            if (pos_ < s_.size() && s_[pos_] == '(') {
                ++pos_;
                if (id == "sqrt" || id == "exp" || id == "log") {
                    Expr a = expr();
                    expect(')');
                    if (id == "sqrt") return sqrt(a);
                    if (id == "exp") return exp(a);
                    return log(a);
                }
                if (id == "Int") {
                    Expr body = expr();
                    expect(',');
                    skip();
                    std::size_t vpos = pos_;
                    std::string var = identifier();
                    if (var.empty() || !std::isalpha(static_cast<unsigned char>(var[0])))
                        throw ParseError("syntax error: expected integration variable", vpos);
                    check_symbol(var, vpos);
                    expect(')');
                    return integral(body, Expr::symbol(var));
                }
                throw ParseError("unknown function '" + id + "'", start);
            }
            check_symbol(id, start);
            return Expr::symbol(id);
        }
        fail("unexpected '" + std::string(1, c) + "'");
    }

    void check_symbol(const std::string& id, std::size_t at) const {
        if (!opts_.allowed_symbols.empty() && !opts_.allowed_symbols.count(id))
            throw ParseError("unknown identifier '" + id + "'", at);
    }

    const std::string& s_;
    const ParseOptions& opts_;
    std::size_t pos_ = 0;
};

}  // namespace

Expr parse(const std::string& text, const ParseOptions& opts) {
    Parser p(text, opts);
    return p.run();
}

}  // namespace odegeom
