#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

namespace odegeom {

using Rational = boost::multiprecision::cpp_rational;
using Integer = boost::multiprecision::cpp_int;

enum class Kind : std::uint8_t { Number, Symbol, Pow, Mul, Add, Sqrt, Exp, Log, Int };

class Node;

// Immutable handle to a node of an expression DAG. Construction goes through
// the builders below, which keep sums and products flattened and sorted.
class Expr {
public:
    Expr();
    Expr(int v);
    Expr(long long v);
    Expr(const Rational& v);

    static Expr symbol(const std::string& name);
    static Expr number(const Rational& v) { return Expr(v); }

    Kind kind() const;
    bool is_number() const { return kind() == Kind::Number; }
    bool is_symbol() const { return kind() == Kind::Symbol; }
    bool is_zero() const;
    bool is_one() const;
    bool is_integer() const;
    const Rational& value() const;
    const std::string& name() const;
    const std::vector<Expr>& args() const;
    std::size_t hash() const;
    const Node* id() const { return p_.get(); }

    bool operator==(const Expr& o) const;
    bool operator!=(const Expr& o) const { return !(*this == o); }

    std::string str() const;

private:
    explicit Expr(std::shared_ptr<const Node> p) : p_(std::move(p)) {}
    std::shared_ptr<const Node> p_;
    friend Expr make_node(Kind, std::vector<Expr>, Rational, std::string);
};

class Node {
public:
    Kind kind;
    std::size_t hash = 0;
    Rational num;
    std::string name;
    std::vector<Expr> args;
};

// total order used for canonical sorting
int compare(const Expr& a, const Expr& b);

struct ExprHash {
    std::size_t operator()(const Expr& e) const { return e.hash(); }
};

Expr add(std::vector<Expr> terms);
Expr mul(std::vector<Expr> factors);
Expr pow(const Expr& base, const Expr& exponent);
Expr sqrt(const Expr& e);
Expr exp(const Expr& e);
Expr log(const Expr& e);
Expr integral(const Expr& body, const Expr& var);
Expr rational(long long p, long long q);

Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator-(const Expr& a);
Expr operator*(const Expr& a, const Expr& b);
Expr operator/(const Expr& a, const Expr& b);
Expr& operator+=(Expr& a, const Expr& b);
Expr& operator-=(Expr& a, const Expr& b);
Expr& operator*=(Expr& a, const Expr& b);

// A family of symbols prefix_0, prefix_1, ... where d/dvar prefix_k = prefix_{k+1}.
struct JetFamily {
    std::string prefix;
    std::string var;
};

class DerivativeRules {
public:
    DerivativeRules() = default;
    static const DerivativeRules& standard();  // w_k along t, Ups_k along q

    DerivativeRules& add_family(std::string prefix, std::string var);
    // returns the name of d/dvar(sym), or empty when sym is constant in var
    std::string jet_step(const std::string& sym, const std::string& var) const;

private:
    std::vector<JetFamily> families_;
};

std::string jet_symbol(const std::string& prefix, int k);

Expr differentiate(const Expr& e, const std::string& var,
                   const DerivativeRules& rules = DerivativeRules::standard());
Expr differentiate(const Expr& e, const Expr& var,
                   const DerivativeRules& rules = DerivativeRules::standard());

Expr substitute(const Expr& e, const std::map<std::string, Expr>& bindings);

std::set<std::string> free_symbols(const Expr& e);
bool contains_integral(const Expr& e);
std::size_t node_count(const Expr& e);

// Split a term into its rational coefficient and the remaining factor.
std::pair<Rational, Expr> split_coefficient(const Expr& term);

}  // namespace odegeom
