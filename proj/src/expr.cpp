#include "odegeom/expr.hpp"
#include "odegeom/print.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <unordered_map>

namespace odegeom {

namespace {

std::size_t mix(std::size_t h, std::size_t v) {
    std::uint64_t x = h ^ (v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
    x ^= x >> 31;
    x *= 0xbf58476d1ce4e5b9ULL;
    x ^= x >> 29;
    return static_cast<std::size_t>(x);
}

std::size_t hash_rational(const Rational& r) {
    if (numerator(r) < Integer(1000000000000LL) && numerator(r) > Integer(-1000000000000LL) &&
        denominator(r) < Integer(1000000000000LL)) {
        auto n = static_cast<long long>(numerator(r));
        auto d = static_cast<long long>(denominator(r));
        return mix(std::hash<long long>{}(n), std::hash<long long>{}(d));
    }
    return std::hash<std::string>{}(r.str());
}

int kind_rank(Kind k) {
    switch (k) {
    case Kind::Number: return 0;
    case Kind::Symbol: return 1;
    case Kind::Pow: return 2;
    case Kind::Sqrt: return 3;
    case Kind::Exp: return 4;
    case Kind::Log: return 5;
    case Kind::Mul: return 6;
    case Kind::Add: return 7;
    case Kind::Int: return 8;
    }
    return 9;
}

bool deep_equal(const Node* a, const Node* b) {
    if (a == b) return true;
    if (a->hash != b->hash || a->kind != b->kind) return false;
    switch (a->kind) {
    case Kind::Number: return a->num == b->num;
    case Kind::Symbol: return a->name == b->name;
    default: break;
    }
    if (a->args.size() != b->args.size()) return false;
    for (std::size_t i = 0; i < a->args.size(); ++i)
        if (!deep_equal(a->args[i].id(), b->args[i].id())) return false;
    return true;
}

}  // namespace

Expr make_node(Kind kind, std::vector<Expr> args, Rational num, std::string name) {
    auto n = std::make_shared<Node>();
    n->kind = kind;
    std::size_t h = static_cast<std::size_t>(kind) * 0x100000001b3ULL + 7;
    if (kind == Kind::Number) h = mix(h, hash_rational(num));
    if (kind == Kind::Symbol) h = mix(h, std::hash<std::string>{}(name));
    for (const auto& a : args) h = mix(h, a.hash());
    n->hash = h;
    n->num = std::move(num);
    n->name = std::move(name);
    n->args = std::move(args);
    return Expr(std::shared_ptr<const Node>(std::move(n)));
}

Expr::Expr() : Expr(Rational(0)) {}
Expr::Expr(int v) : Expr(Rational(v)) {}
Expr::Expr(long long v) : Expr(Rational(v)) {}
Expr::Expr(const Rational& v) : p_(make_node(Kind::Number, {}, v, {}).p_) {}

Expr Expr::symbol(const std::string& name) {
    if (name.empty()) throw std::invalid_argument("empty symbol name");
    return make_node(Kind::Symbol, {}, Rational(0), name);
}

Kind Expr::kind() const { return p_->kind; }
bool Expr::is_zero() const { return p_->kind == Kind::Number && p_->num == 0; }
bool Expr::is_one() const { return p_->kind == Kind::Number && p_->num == 1; }
bool Expr::is_integer() const {
    return p_->kind == Kind::Number && denominator(p_->num) == 1;
}
const Rational& Expr::value() const { return p_->num; }
const std::string& Expr::name() const { return p_->name; }
const std::vector<Expr>& Expr::args() const { return p_->args; }
std::size_t Expr::hash() const { return p_->hash; }
bool Expr::operator==(const Expr& o) const { return deep_equal(p_.get(), o.p_.get()); }
std::string Expr::str() const { return to_string(*this); }

int compare(const Expr& a, const Expr& b) {
    if (a.id() == b.id()) return 0;
    int ra = kind_rank(a.kind()), rb = kind_rank(b.kind());
    if (ra != rb) return ra < rb ? -1 : 1;
    switch (a.kind()) {
    case Kind::Number:
        if (a.value() == b.value()) return 0;
        return a.value() < b.value() ? -1 : 1;
    case Kind::Symbol:
        if (a.name() == b.name()) return 0;
        return a.name() < b.name() ? -1 : 1;
    case Kind::Pow:
    case Kind::Sqrt:
    case Kind::Exp:
    case Kind::Log:
        for (std::size_t i = 0; i < a.args().size(); ++i)
            if (int c = compare(a.args()[i], b.args()[i])) return c;
        return 0;
    default:
        break;
    }
    if (a.hash() != b.hash()) return a.hash() < b.hash() ? -1 : 1;
    if (a.args().size() != b.args().size()) return a.args().size() < b.args().size() ? -1 : 1;
    for (std::size_t i = 0; i < a.args().size(); ++i)
        if (int c = compare(a.args()[i], b.args()[i])) return c;
    return 0;
}

std::pair<Rational, Expr> split_coefficient(const Expr& term) {
    if (term.is_number()) return {term.value(), Expr(1)};
    if (term.kind() == Kind::Mul && term.args().front().is_number()) {
        const auto& a = term.args();
        if (a.size() == 2) return {a[0].value(), a[1]};
        return {a[0].value(), make_node(Kind::Mul, std::vector<Expr>(a.begin() + 1, a.end()), 0, {})};
    }
    return {Rational(1), term};
}

namespace {

Expr scale_term(const Rational& c, const Expr& rest) {
    if (c == 1) return rest;
    std::vector<Expr> args{Expr(c)};
    if (rest.kind() == Kind::Mul)
        args.insert(args.end(), rest.args().begin(), rest.args().end());
    else
        args.push_back(rest);
    return make_node(Kind::Mul, std::move(args), 0, {});
}

bool less_expr(const Expr& a, const Expr& b) { return compare(a, b) < 0; }

// b^(1/n) for a nonnegative integer b, if exact
bool exact_root(const Integer& b, unsigned n, Integer& out) {
    if (b == 0 || b == 1) {
        out = b;
        return true;
    }
    double approx = std::pow(static_cast<double>(b), 1.0 / n);
    if (!std::isfinite(approx)) return false;
    Integer guess(static_cast<long long>(std::llround(approx)));
    for (int d = -1; d <= 1; ++d) {
        Integer g = guess + d;
        if (g < 0) continue;
        if (boost::multiprecision::pow(g, n) == b) {
            out = g;
            return true;
        }
    }
    return false;
}

Rational rational_pow(const Rational& b, long long e) {
    if (e >= 0) {
        Integer n = boost::multiprecision::pow(numerator(b), static_cast<unsigned>(e));
        Integer d = boost::multiprecision::pow(denominator(b), static_cast<unsigned>(e));
        return Rational(n, d);
    }
    if (b == 0) throw std::domain_error("division by zero");
    Integer n = boost::multiprecision::pow(denominator(b), static_cast<unsigned>(-e));
    Integer d = boost::multiprecision::pow(numerator(b), static_cast<unsigned>(-e));
    if (d < 0) {
        n = -n;
        d = -d;
    }
    return Rational(n, d);
}

Expr number_pow(const Rational& b, const Rational& e) {
    if (denominator(e) == 1) {
        Integer n = numerator(e);
        if (n > 4096 || n < -4096) return make_node(Kind::Pow, {Expr(b), Expr(e)}, 0, {});
        return Expr(rational_pow(b, static_cast<long long>(n)));
    }
    if (b < 0) return make_node(Kind::Pow, {Expr(b), Expr(e)}, 0, {});
    // b^e = b^floor(e) * b^(e - floor(e))
    Integer fl = numerator(e) / denominator(e);
    if (numerator(e) < 0 && fl * denominator(e) != numerator(e)) fl -= 1;
    Rational frac = e - Rational(fl);
    Expr whole(1);
    if (fl != 0) {
        if (fl > 4096 || fl < -4096) return make_node(Kind::Pow, {Expr(b), Expr(e)}, 0, {});
        whole = Expr(rational_pow(b, static_cast<long long>(fl)));
    }
    Expr part;
    Integer den = denominator(frac);
    if (den < 64) {
        unsigned n = static_cast<unsigned>(den);
        Integer rn, rd;
        if (exact_root(numerator(b), n, rn) && exact_root(denominator(b), n, rd)) {
            part = Expr(rational_pow(Rational(rn, rd), static_cast<long long>(numerator(frac))));
            return Expr(whole.value() * part.value());
        }
    }
    part = make_node(Kind::Pow, {Expr(b), Expr(frac)}, 0, {});
    if (whole.is_one()) return part;
    return make_node(Kind::Mul, {whole, part}, 0, {});
}

void flatten_into(Kind k, const Expr& e, std::vector<Expr>& out) {
    if (e.kind() == k)
        for (const auto& a : e.args()) out.push_back(a);
    else
        out.push_back(e);
}

}  // namespace

Expr add(std::vector<Expr> terms) {
    std::vector<Expr> flat;
    flat.reserve(terms.size());
    for (const auto& t : terms) flatten_into(Kind::Add, t, flat);

    Rational constant = 0;
    std::unordered_map<Expr, std::size_t, ExprHash> index;
    std::vector<std::pair<Expr, Rational>> groups;
    for (const auto& t : flat) {
        if (t.is_number()) {
            constant += t.value();
            continue;
        }
        auto [c, rest] = split_coefficient(t);
        auto it = index.find(rest);
        if (it == index.end()) {
            index.emplace(rest, groups.size());
            groups.emplace_back(rest, c);
        } else {
            groups[it->second].second += c;
        }
    }
    std::vector<Expr> out;
    for (auto& [rest, c] : groups)
        if (c != 0) out.push_back(scale_term(c, rest));
    std::sort(out.begin(), out.end(), less_expr);
    if (out.empty()) return Expr(constant);
    if (constant == 0 && out.size() == 1) return out.front();
    if (constant != 0) out.insert(out.begin(), Expr(constant));
    return make_node(Kind::Add, std::move(out), 0, {});
}

Expr mul(std::vector<Expr> factors) {
    std::vector<Expr> flat;
    flat.reserve(factors.size());
    for (const auto& f : factors) flatten_into(Kind::Mul, f, flat);

    Rational constant = 1;
    std::unordered_map<Expr, std::size_t, ExprHash> index;
    std::vector<std::pair<Expr, std::vector<Expr>>> groups;
    for (const auto& f : flat) {
        if (f.is_number()) {
            constant *= f.value();
            if (constant == 0) return Expr(0);
            continue;
        }
        Expr base = f, ex(1);
        if (f.kind() == Kind::Pow) {
            base = f.args()[0];
            ex = f.args()[1];
        }
        auto it = index.find(base);
        if (it == index.end()) {
            index.emplace(base, groups.size());
            groups.push_back({base, {ex}});
        } else {
            groups[it->second].second.push_back(ex);
        }
    }
    std::vector<Expr> out;
    bool reflatten = false;
    for (auto& [base, exps] : groups) {
        Expr p = exps.size() == 1 && exps.front().is_one() ? base : pow(base, add(exps));
        if (p.is_number()) {
            constant *= p.value();
            if (constant == 0) return Expr(0);
        } else {
            if (p.kind() == Kind::Mul) reflatten = true;
            out.push_back(p);
        }
    }
    if (reflatten) {
        out.push_back(Expr(constant));
        return mul(std::move(out));
    }
    std::sort(out.begin(), out.end(), less_expr);
    if (out.empty()) return Expr(constant);
    if (constant == 1 && out.size() == 1) return out.front();
    if (constant != 1) out.insert(out.begin(), Expr(constant));
    return make_node(Kind::Mul, std::move(out), 0, {});
}

Expr pow(const Expr& base, const Expr& exponent) {
    if (exponent.is_number()) {
        const Rational& e = exponent.value();
        if (e == 0) return Expr(1);
        if (e == 1) return base;
        bool integral_exp = denominator(e) == 1;
        if (base.is_number()) {
            if (base.value() == 0) {
                if (e < 0) throw std::domain_error("division by zero");
                return Expr(0);
            }
            if (base.value() == 1) return Expr(1);
            return number_pow(base.value(), e);
        }
        if (base.kind() == Kind::Pow) {
            const Expr& inner = base.args()[1];
            if (integral_exp || (inner.is_number() && denominator(inner.value()) != 1))
                return pow(base.args()[0], mul({inner, exponent}));
        }
        if (base.kind() == Kind::Mul && integral_exp) {
            std::vector<Expr> parts;
            for (const auto& f : base.args()) parts.push_back(pow(f, exponent));
            return mul(std::move(parts));
        }
        if (base.kind() == Kind::Sqrt && integral_exp && numerator(e) % 2 == 0)
            return pow(base.args()[0], Expr(e / 2));
        return make_node(Kind::Pow, {base, exponent}, 0, {});
    }
    if (base.is_one()) return Expr(1);
    if (base.kind() == Kind::Pow) {
        const Expr& inner = base.args()[1];
        if (inner.is_number() && denominator(inner.value()) != 1)
            return pow(base.args()[0], mul({inner, exponent}));
    }
    return make_node(Kind::Pow, {base, exponent}, 0, {});
}

Expr sqrt(const Expr& e) {
    if (e.is_number() && e.value() >= 0) {
        Integer rn, rd;
        if (exact_root(numerator(e.value()), 2, rn) && exact_root(denominator(e.value()), 2, rd))
            return Expr(Rational(rn, rd));
    }
    return make_node(Kind::Sqrt, {e}, 0, {});
}

Expr exp(const Expr& e) {
    if (e.is_zero()) return Expr(1);
    if (e.kind() == Kind::Log) return e.args()[0];
    return make_node(Kind::Exp, {e}, 0, {});
}

Expr log(const Expr& e) {
    if (e.is_one()) return Expr(0);
    if (e.kind() == Kind::Exp) return e.args()[0];
    return make_node(Kind::Log, {e}, 0, {});
}

Expr integral(const Expr& body, const Expr& var) {
    if (!var.is_symbol()) throw std::invalid_argument("integration variable must be a symbol");
    if (body.is_zero()) return Expr(0);
    return make_node(Kind::Int, {body, var}, 0, {});
}

Expr rational(long long p, long long q) { return Expr(Rational(p, q)); }

Expr operator+(const Expr& a, const Expr& b) { return add({a, b}); }
Expr operator-(const Expr& a, const Expr& b) { return add({a, mul({Expr(-1), b})}); }
Expr operator-(const Expr& a) { return mul({Expr(-1), a}); }
Expr operator*(const Expr& a, const Expr& b) { return mul({a, b}); }
Expr operator/(const Expr& a, const Expr& b) { return mul({a, pow(b, Expr(-1))}); }
Expr& operator+=(Expr& a, const Expr& b) { return a = a + b; }
Expr& operator-=(Expr& a, const Expr& b) { return a = a - b; }
Expr& operator*=(Expr& a, const Expr& b) { return a = a * b; }

std::string jet_symbol(const std::string& prefix, int k) { return prefix + "_" + std::to_string(k); }

const DerivativeRules& DerivativeRules::standard() {
    static const DerivativeRules rules = [] {
        DerivativeRules r;
        r.add_family("w", "t");
        r.add_family("Ups", "q");
        return r;
    }();
    return rules;
}

DerivativeRules& DerivativeRules::add_family(std::string prefix, std::string var) {
    families_.push_back({std::move(prefix), std::move(var)});
    return *this;
}

std::string DerivativeRules::jet_step(const std::string& sym, const std::string& var) const {
    for (const auto& f : families_) {
        if (f.var != var) continue;
        if (sym.size() <= f.prefix.size() + 1 || sym.compare(0, f.prefix.size(), f.prefix) != 0 ||
            sym[f.prefix.size()] != '_')
            continue;
        auto digits = sym.substr(f.prefix.size() + 1);
        if (digits.empty() || !std::all_of(digits.begin(), digits.end(), ::isdigit)) continue;
        return jet_symbol(f.prefix, std::stoi(digits) + 1);
    }
    return {};
}

Expr substitute(const Expr& e, const std::map<std::string, Expr>& bindings) {
    std::unordered_map<const Node*, Expr> memo;
    std::function<Expr(const Expr&, const std::string&)> go = [&](const Expr& x,
                                                                const std::string& bound) -> Expr {
        if (x.is_number()) return x;
        if (x.is_symbol()) {
            if (x.name() == bound) return x;
            auto it = bindings.find(x.name());
            return it == bindings.end() ? x : it->second;
        }
        bool cacheable = bound.empty();
        if (cacheable) {
            auto it = memo.find(x.id());
            if (it != memo.end()) return it->second;
        }
        std::vector<Expr> a;
        a.reserve(x.args().size());
        Expr r;
        switch (x.kind()) {
        case Kind::Add:
            for (const auto& c : x.args()) a.push_back(go(c, bound));
            r = add(std::move(a));
            break;
        case Kind::Mul:
            for (const auto& c : x.args()) a.push_back(go(c, bound));
            r = mul(std::move(a));
            break;
        case Kind::Pow: r = pow(go(x.args()[0], bound), go(x.args()[1], bound)); break;
        case Kind::Sqrt: r = sqrt(go(x.args()[0], bound)); break;
        case Kind::Exp: r = exp(go(x.args()[0], bound)); break;
        case Kind::Log: r = log(go(x.args()[0], bound)); break;
        case Kind::Int: r = integral(go(x.args()[0], x.args()[1].name()), x.args()[1]); break;
        default: r = x;
        }
        if (cacheable) memo.emplace(x.id(), r);
        return r;
    };
    return go(e, {});
}

std::set<std::string> free_symbols(const Expr& e) {
    std::set<std::string> out;
    std::unordered_map<const Node*, bool> seen;
    std::function<void(const Expr&)> go = [&](const Expr& x) {
        if (!seen.emplace(x.id(), true).second) return;
        if (x.is_symbol()) out.insert(x.name());
        for (const auto& a : x.args()) go(a);
    };
    go(e);
    return out;
}

bool contains_integral(const Expr& e) {
    std::unordered_map<const Node*, bool> seen;
    std::function<bool(const Expr&)> go = [&](const Expr& x) {
        if (x.kind() == Kind::Int) return true;
        if (!seen.emplace(x.id(), true).second) return false;
        for (const auto& a : x.args())
            if (go(a)) return true;
        return false;
    };
    return go(e);
}

std::size_t node_count(const Expr& e) {
    std::unordered_map<const Node*, bool> seen;
    std::function<void(const Expr&)> go = [&](const Expr& x) {
        if (!seen.emplace(x.id(), true).second) return;
        for (const auto& a : x.args()) go(a);
    };
    go(e);
    return seen.size();
}

}  // namespace odegeom
