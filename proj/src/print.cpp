#include "odegeom/print.hpp"

#include <sstream>

namespace odegeom {

namespace {

enum Prec { kAdd = 1, kMul = 2, kNeg = 3, kPow = 4, kAtom = 5 };

struct Piece {
    std::string text;
    int prec;
};

Piece print(const Expr& e);

std::string wrap(const Piece& p, int ctx) { return p.prec < ctx ? "(" + p.text + ")" : p.text; }

Piece print_number(const Rational& r) {
    std::string s = r.str();
    if (r < 0) return {s, kNeg};
    if (denominator(r) != 1) return {s, kMul};
    return {s, kAtom};
}

bool is_denominator(const Expr& f) {
    return f.kind() == Kind::Pow && f.args()[1].is_number() && f.args()[1].value() < 0;
}

std::string power_text(const Expr& base, const Rational& ex) {
    std::string b = wrap(print(base), kAtom);
    if (ex == 1) return b;
    if (ex > 0 && denominator(ex) == 1) return b + "^" + ex.str();
    return b + "^(" + ex.str() + ")";
}

Piece print_product(const Rational& c, const std::vector<Expr>& factors) {
    std::vector<std::string> num, den;
    Rational a = c < 0 ? Rational(-c) : c;
    for (const auto& f : factors) {
        if (is_denominator(f)) {
            Rational ex = -f.args()[1].value();
            Expr base = f.args()[0];
            den.push_back(ex == 1 ? wrap(print(base), kNeg) : power_text(base, ex));
        } else {
            num.push_back(wrap(print(f), kNeg));
        }
    }
    Integer an = numerator(a), ad = denominator(a);
    if (an != 1 || num.empty()) num.insert(num.begin(), an.str());
    if (ad != 1) den.insert(den.begin(), ad.str());
    std::string s;
    for (std::size_t i = 0; i < num.size(); ++i) s += (i ? "*" : "") + num[i];
    if (!den.empty()) {
        std::string d;
        for (std::size_t i = 0; i < den.size(); ++i) d += (i ? "*" : "") + den[i];
        s += "/" + (den.size() > 1 ? "(" + d + ")" : d);
    }
    if (c < 0) return {"-" + s, kNeg};
    return {s, (den.empty() && num.size() == 1) ? kPow : kMul};
}

Piece print_term_abs(const Expr& t, bool& negative) {
    auto [c, rest] = split_coefficient(t);
    negative = c < 0;
    Rational a = negative ? Rational(-c) : c;
    if (t.is_number()) return print_number(a);
    if (!negative) return print(t);
    std::vector<Expr> factors;
    if (rest.kind() == Kind::Mul)
        factors = rest.args();
    else
        factors.push_back(rest);
    return print_product(a, factors);
}

Piece print(const Expr& e) {
    switch (e.kind()) {
    case Kind::Number: return print_number(e.value());
    case Kind::Symbol: return {e.name(), kAtom};
    case Kind::Add: {
        std::string s;
        bool first = true;
        for (const auto& t : e.args()) {
            if (first) {
                s = print(t).text;
                first = false;
                continue;
            }
            bool neg = false;
            Piece p = print_term_abs(t, neg);
            s += (neg ? " - " : " + ") + wrap(p, kMul);
        }
        return {s, kAdd};
    }
    case Kind::Mul: {
        const auto& a = e.args();
        Rational c = 1;
        std::vector<Expr> factors;
        for (const auto& f : a) {
            if (f.is_number())
                c = f.value();
            else
                factors.push_back(f);
        }
        return print_product(c, factors);
    }
    case Kind::Pow: {
        const Expr& ex = e.args()[1];
        if (ex.is_number()) {
            if (ex.value() < 0) return print_product(1, {e});
            Piece p{power_text(e.args()[0], ex.value()), kPow};
            return p;
        }
        return {wrap(print(e.args()[0]), kAtom) + "^(" + print(ex).text + ")", kPow};
    }
    case Kind::Sqrt: return {"sqrt(" + print(e.args()[0]).text + ")", kAtom};
    case Kind::Exp: return {"exp(" + print(e.args()[0]).text + ")", kAtom};
    case Kind::Log: return {"log(" + print(e.args()[0]).text + ")", kAtom};
    case Kind::Int:
        return {"Int(" + print(e.args()[0]).text + ", " + e.args()[1].name() + ")", kAtom};
    }
    return {"?", kAtom};
}

}  // namespace

std::string to_string(const Expr& e) { return print(e).text; }

}  // namespace odegeom
