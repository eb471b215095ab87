#pragma once

#include "odegeom/expr.hpp"
#include "odegeom/zero_test.hpp"

#include <map>
#include <string>
#include <vector>

namespace odegeom {

class Chart {
public:
    Chart() = default;
    Chart(std::string name, std::vector<std::string> coords);

    static Chart j2_third();  // x, y, p, q
    static Chart j1_ext();    // x, y, p, phi
    static Chart monge1();    // x, y, p, z
    static Chart monge2();    // x, y, p, q, z
    static Chart dkp();       // x, y, t, v

    const std::string& name() const { return name_; }
    const std::vector<std::string>& coords() const { return coords_; }
    std::size_t dim() const { return coords_.size(); }
    int index(const std::string& c) const;  // -1 when absent
    Expr coord(std::size_t i) const { return Expr::symbol(coords_[i]); }

    bool operator==(const Chart& o) const { return coords_ == o.coords_; }
    bool operator!=(const Chart& o) const { return !(*this == o); }

private:
    std::string name_;
    std::vector<std::string> coords_;
};

class VectorField {
public:
    VectorField(Chart chart, std::vector<Expr> comps);

    const Chart& chart() const { return chart_; }
    const std::vector<Expr>& components() const { return comps_; }
    const Expr& operator[](std::size_t i) const { return comps_[i]; }
    Expr apply(const Expr& f) const;  // X(f)

private:
    Chart chart_;
    std::vector<Expr> comps_;
};

using Indices = std::vector<int>;

// Exterior form; coefficients live on strictly increasing index tuples.
class Form {
public:
    Form(Chart chart, int degree);

    static Form function(const Chart& chart, const Expr& f);
    static Form differential(const Chart& chart, const std::string& coord);  // d(coord)
    static Form one_form(const Chart& chart, const std::vector<Expr>& coeffs);

    const Chart& chart() const { return chart_; }
    int degree() const { return degree_; }
    const std::map<Indices, Expr>& terms() const { return terms_; }

    // coefficient on an arbitrary index tuple, with the antisymmetry sign
    Expr coeff(Indices idx) const;
    void add_term(Indices idx, const Expr& c);
    Expr scalar() const;                   // degree-0 value
    std::vector<Expr> one_form_coeffs() const;  // degree 1, dense
    std::vector<Expr> coefficients() const;     // stored values
    bool structurally_zero() const { return terms_.empty(); }

    Form operator+(const Form& o) const;
    Form operator-(const Form& o) const;
    Form operator-() const;
    Form scaled(const Expr& f) const;
    Form map(const std::function<Expr(const Expr&)>& fn) const;

private:
    Chart chart_;
    int degree_;
    std::map<Indices, Expr> terms_;
};

inline Form operator*(const Expr& f, const Form& w) { return w.scaled(f); }

Form d(const Form& w);
Form wedge(const Form& a, const Form& b);
Form wedge(const std::vector<Form>& forms);
Form interior(const VectorField& X, const Form& w);
Form lie_derivative(const VectorField& X, const Form& w);
// component formula, used to cross-check the Cartan formula
Form lie_derivative_components(const VectorField& X, const Form& w);

ZeroVerdict is_zero(const Form& w, const DomainBox& box = {}, const ZeroTestOptions& opts = {});

// Symmetric bilinear form, possibly degenerate; products follow the
// convention ab = (a (x) b + b (x) a) / 2.
class SymmetricForm {
public:
    explicit SymmetricForm(Chart chart);

    static SymmetricForm product(const Form& a, const Form& b);
    static SymmetricForm from_matrix(const Chart& chart, const std::vector<std::vector<Expr>>& m);

    const Chart& chart() const { return chart_; }
    std::size_t dim() const { return chart_.dim(); }
    const Expr& operator()(std::size_t i, std::size_t j) const { return m_[i][j]; }
    void set(std::size_t i, std::size_t j, const Expr& v);
    const std::vector<std::vector<Expr>>& matrix() const { return m_; }
    std::vector<Expr> upper() const;  // i <= j entries in row order

    Form contract(const VectorField& X) const;  // g(X, .)
    Expr apply(const VectorField& X, const VectorField& Y) const;

    SymmetricForm operator+(const SymmetricForm& o) const;
    SymmetricForm operator-(const SymmetricForm& o) const;
    SymmetricForm scaled(const Expr& f) const;
    SymmetricForm map(const std::function<Expr(const Expr&)>& fn) const;

private:
    Chart chart_;
    std::vector<std::vector<Expr>> m_;
};

inline SymmetricForm operator*(const Expr& f, const SymmetricForm& g) { return g.scaled(f); }

SymmetricForm lie_derivative(const VectorField& X, const SymmetricForm& g);

struct TransportResult {
    bool success = false;
    Expr factor;                 // candidate lambda
    std::size_t pivot_row = 0, pivot_col = 0;
    std::vector<std::pair<std::size_t, std::size_t>> slots;  // residual component slots
    ZeroVerdict verdict;         // zero test of L_X g - lambda g
};

// Tests L_X g = lambda g; throws std::invalid_argument if g vanishes at the box center.
TransportResult conformal_transport_factor(const VectorField& X, const SymmetricForm& g,
                                           const DomainBox& box = {}, const ZeroTestOptions& opts = {});

enum class OdeClass { Third, Second, Monge1, Monge2 };

Chart chart_for(OdeClass c);
// 3rd order: d_x + p d_y + q d_p + f d_q;  2nd order on J1ext: d_x + p d_y + f d_p;
// Monge1: d_x + p d_y + f d_z;  Monge2: d_x + p d_y + q d_p + f d_z
VectorField total_derivative(OdeClass c, const Expr& f);
// contact forms annihilated by the total derivative
std::vector<Form> contact_forms(OdeClass c, const Expr& f);

// Exterior derivative on forms written in a frame of invariant 1-forms with
// constant coefficients: d is fixed by the images of the basis forms.
class StructureDifferential {
public:
    explicit StructureDifferential(std::vector<Form> d_basis);
    Form operator()(const Form& w) const;
    const Chart& chart() const { return chart_; }

private:
    Chart chart_;
    std::vector<Form> d_basis_;
};

}  // namespace odegeom
