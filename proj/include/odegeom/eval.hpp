#pragma once

#include "odegeom/expr.hpp"

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace odegeom {

using real = long double;

// Value together with the magnitude of the terms that produced it. The
// magnitude bounds the absolute value of every intermediate sum, so rounding
// error in `value` is of order eps * magnitude.
struct Tracked {
    real value = 0;
    real magnitude = 0;
};

class EvalError : public std::runtime_error {
public:
    enum class Reason { Unbound, Domain, ResidualIntegral };
    EvalError(Reason r, const std::string& msg) : std::runtime_error(msg), reason_(r) {}
    Reason reason() const { return reason_; }

private:
    Reason reason_;
};

using Point = std::map<std::string, real>;

// Flattened evaluation tape for a set of expressions that share subtrees.
class Program {
public:
    explicit Program(const std::vector<Expr>& roots);
    explicit Program(const Expr& root) : Program(std::vector<Expr>{root}) {}

    const std::vector<std::string>& symbols() const { return symbols_; }
    std::size_t size() const { return roots_.size(); }
    std::size_t instructions() const { return ops_.size(); }

    // values are given in the order of symbols()
    std::vector<Tracked> run(const std::vector<real>& values) const;
    std::vector<Tracked> run(const Point& point) const;

private:
    struct Op {
        Kind kind;
        real constant = 0;
        std::vector<std::size_t> args;
        std::size_t slot = 0;
        bool const_exponent = false;
        real exponent = 0;
        bool integer_exponent = false;
    };
    std::vector<Op> ops_;
    std::vector<std::size_t> roots_;
    std::vector<std::string> symbols_;
};

real eval_numeric(const Expr& e, const Point& point);
Tracked eval_tracked(const Expr& e, const Point& point);

}  // namespace odegeom
