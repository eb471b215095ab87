#include "odegeom/expr.hpp"

#include <stdexcept>
#include <unordered_map>

namespace odegeom {

namespace {

class Differentiator {
public:
    Differentiator(const std::string& var, const DerivativeRules& rules) : var_(var), rules_(rules) {}

    Expr run(const Expr& e) {
        if (e.is_number()) return Expr(0);
        if (e.is_symbol()) {
            if (e.name() == var_) return Expr(1);
            auto next = rules_.jet_step(e.name(), var_);
            return next.empty() ? Expr(0) : Expr::symbol(next);
        }
        auto it = memo_.find(e.id());
        if (it != memo_.end()) return it->second;
        Expr r = compute(e);
        memo_.emplace(e.id(), r);
        return r;
    }

private:
    Expr compute(const Expr& e) {
        const auto& a = e.args();
        switch (e.kind()) {
        case Kind::Add: {
            std::vector<Expr> terms;
            terms.reserve(a.size());
            for (const auto& t : a) terms.push_back(run(t));
            return add(std::move(terms));
        }
        case Kind::Mul: {
            std::vector<Expr> terms;
            for (std::size_t i = 0; i < a.size(); ++i) {
                Expr di = run(a[i]);
                if (di.is_zero()) continue;
                std::vector<Expr> f;
                f.reserve(a.size());
                for (std::size_t j = 0; j < a.size(); ++j) f.push_back(j == i ? di : a[j]);
                terms.push_back(mul(std::move(f)));
            }
            return add(std::move(terms));
        }
        case Kind::Pow: {
            const Expr& b = a[0];
            const Expr& x = a[1];
            Expr db = run(b);
            Expr dx = run(x);
            if (dx.is_zero()) {
                if (db.is_zero()) return Expr(0);
                return mul({x, pow(b, add({x, Expr(-1)})), db});
            }
            // b^x (x' log b + x b'/b)
            return mul({e, add({mul({dx, log(b)}), mul({x, db, pow(b, Expr(-1))})})});
        }
        case Kind::Sqrt: {
            Expr du = run(a[0]);
            if (du.is_zero()) return Expr(0);
            return mul({Expr(Rational(1, 2)), du, pow(e, Expr(-1))});
        }
        case Kind::Exp: {
            Expr du = run(a[0]);
            if (du.is_zero()) return Expr(0);
            return mul({e, du});
        }
        case Kind::Log: {
            Expr du = run(a[0]);
            if (du.is_zero()) return Expr(0);
            return mul({du, pow(a[0], Expr(-1))});
        }
        case Kind::Int: {
            if (a[1].name() == var_) return a[0];
            Expr db = run(a[0]);
            if (db.is_zero()) return Expr(0);
            return integral(db, a[1]);
        }
        default: break;
        }
        throw std::logic_error("unhandled node kind in differentiate");
    }

    const std::string& var_;
    const DerivativeRules& rules_;
    std::unordered_map<const Node*, Expr> memo_;
};

}  // namespace

Expr differentiate(const Expr& e, const std::string& var, const DerivativeRules& rules) {
    Differentiator d(var, rules);
    return d.run(e);
}

Expr differentiate(const Expr& e, const Expr& var, const DerivativeRules& rules) {
    if (!var.is_symbol()) throw std::invalid_argument("differentiation variable must be a symbol");
    return differentiate(e, var.name(), rules);
}

}  // namespace odegeom
