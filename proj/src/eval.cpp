#include "odegeom/eval.hpp"
#include "odegeom/print.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <unordered_map>

namespace odegeom {

namespace {

constexpr real kNearZero = 1e-14L;

[[noreturn]] void domain(const std::string& what) {
    throw EvalError(EvalError::Reason::Domain, "domain violation: " + what);
}

real to_real(const Rational& r) {
    return static_cast<real>(numerator(r).convert_to<long double>() /
                             denominator(r).convert_to<long double>());
}

real ipow(real b, long long n) {
    real r = 1;
    unsigned long long k = n < 0 ? -n : n;
    real x = b;
    while (k) {
        if (k & 1) r *= x;
        x *= x;
        k >>= 1;
    }
    return n < 0 ? 1 / r : r;
}

}  // namespace

Program::Program(const std::vector<Expr>& roots) {
    std::set<std::string> syms;
    for (const auto& r : roots) {
        if (contains_integral(r))
            throw EvalError(EvalError::Reason::ResidualIntegral,
                            "cannot evaluate antiderivative node in " + to_string(r).substr(0, 200));
        auto s = free_symbols(r);
        syms.insert(s.begin(), s.end());
    }
    symbols_.assign(syms.begin(), syms.end());
    std::unordered_map<std::string, std::size_t> slot;
    for (std::size_t i = 0; i < symbols_.size(); ++i) slot[symbols_[i]] = i;

    std::unordered_map<const Node*, std::size_t> index;
    std::function<std::size_t(const Expr&)> compile = [&](const Expr& e) -> std::size_t {
        auto it = index.find(e.id());
        if (it != index.end()) return it->second;
        Op op;
        op.kind = e.kind();
        switch (e.kind()) {
        case Kind::Number: op.constant = to_real(e.value()); break;
        case Kind::Symbol: op.slot = slot.at(e.name()); break;
        default:
            for (const auto& a : e.args()) op.args.push_back(compile(a));
            break;
        }
        if (e.kind() == Kind::Pow && e.args()[1].is_number()) {
            op.const_exponent = true;
            op.exponent = to_real(e.args()[1].value());
            op.integer_exponent = e.args()[1].is_integer();
        }
        ops_.push_back(std::move(op));
        std::size_t id = ops_.size() - 1;
        index.emplace(e.id(), id);
        return id;
    };
    for (const auto& r : roots) roots_.push_back(compile(r));
}

std::vector<Tracked> Program::run(const std::vector<real>& values) const {
    std::vector<Tracked> t(ops_.size());
    for (std::size_t i = 0; i < ops_.size(); ++i) {
        const Op& op = ops_[i];
        Tracked& out = t[i];
        switch (op.kind) {
        case Kind::Number:
            out = {op.constant, std::fabs(op.constant)};
            break;
        case Kind::Symbol:
            out = {values[op.slot], std::fabs(values[op.slot])};
            break;
        case Kind::Add: {
            real v = 0, m = 0;
            for (auto a : op.args) {
                v += t[a].value;
                m += t[a].magnitude;
            }
            out = {v, m};
            break;
        }
        case Kind::Mul: {
            real v = 1, m = 1;
            for (auto a : op.args) {
                v *= t[a].value;
                m *= t[a].magnitude;
            }
            out = {v, m};
            break;
        }
        case Kind::Pow: {
            const Tracked& b = t[op.args[0]];
            if (op.const_exponent) {
                real e = op.exponent;
                if (op.integer_exponent) {
                    auto n = static_cast<long long>(e);
                    if (n < 0 && std::fabs(b.value) <= kNearZero * (1 + b.magnitude))
                        domain("division by ~0");
                    real v = ipow(b.value, n);
                    if (n >= 0) {
                        out = {v, ipow(b.magnitude, n)};
                    } else {
                        real kappa = b.magnitude / std::fabs(b.value);
                        out = {v, std::fabs(v) * std::max<real>(1, -e * kappa)};
                    }
                } else {
                    if (b.value < 0) domain("negative base under fractional power");
                    if (b.value == 0) {
                        if (e < 0) domain("division by ~0");
                        out = {0, std::pow(b.magnitude, e)};
                    } else if (e > 0) {
                        out = {std::pow(b.value, e), std::pow(b.magnitude, e)};
                    } else {
                        if (b.value <= kNearZero * (1 + b.magnitude)) domain("division by ~0");
                        real v = std::pow(b.value, e);
                        out = {v, v * std::max<real>(1, -e * b.magnitude / b.value)};
                    }
                }
            } else {
                const Tracked& x = t[op.args[1]];
                if (b.value <= 0) domain("nonpositive base under symbolic power");
                real lb = std::log(b.value);
                real v = std::exp(x.value * lb);
                out = {v, std::fabs(v) * (1 + x.magnitude * std::fabs(lb) +
                                          std::fabs(x.value) * b.magnitude / b.value)};
            }
            break;
        }
        case Kind::Sqrt: {
            const Tracked& b = t[op.args[0]];
            if (b.value < 0) domain("sqrt of negative value");
            out = {std::sqrt(b.value), std::sqrt(b.magnitude)};
            break;
        }
        case Kind::Exp: {
            const Tracked& u = t[op.args[0]];
            real v = std::exp(u.value);
            out = {v, v * (1 + u.magnitude)};
            break;
        }
        case Kind::Log: {
            const Tracked& u = t[op.args[0]];
            if (u.value <= 0) domain("log of nonpositive value");
            real v = std::log(u.value);
            out = {v, std::fabs(v) + u.magnitude / u.value};
            break;
        }
        case Kind::Int:
            throw EvalError(EvalError::Reason::ResidualIntegral, "cannot evaluate antiderivative node");
        }
        if (!std::isfinite(out.value) || !std::isfinite(out.magnitude)) domain("non-finite value");
    }
    std::vector<Tracked> res;
    res.reserve(roots_.size());
    for (auto r : roots_) res.push_back(t[r]);
    return res;
}

std::vector<Tracked> Program::run(const Point& point) const {
    std::vector<real> v(symbols_.size());
    for (std::size_t i = 0; i < symbols_.size(); ++i) {
        auto it = point.find(symbols_[i]);
        if (it == point.end())
            throw EvalError(EvalError::Reason::Unbound, "unbound symbol '" + symbols_[i] + "'");
        v[i] = it->second;
    }
    return run(v);
}

real eval_numeric(const Expr& e, const Point& point) { return Program(e).run(point).front().value; }

Tracked eval_tracked(const Expr& e, const Point& point) { return Program(e).run(point).front(); }

}  // namespace odegeom
