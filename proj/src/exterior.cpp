#include "odegeom/exterior.hpp"
#include "odegeom/print.hpp"

#include <cmath>
#include <stdexcept>

namespace odegeom {

namespace {

// sorts idx in place; returns the permutation sign, or 0 on a repeated index
int sort_sign(Indices& idx) {
    int sign = 1;
    for (std::size_t i = 1; i < idx.size(); ++i)
        for (std::size_t j = i; j > 0 && idx[j - 1] >= idx[j]; --j) {
            if (idx[j - 1] == idx[j]) return 0;
            std::swap(idx[j - 1], idx[j]);
            sign = -sign;
        }
    for (std::size_t i = 1; i < idx.size(); ++i)
        if (idx[i - 1] == idx[i]) return 0;
    return sign;
}

void require_same_chart(const Chart& a, const Chart& b) {
    if (a != b) throw std::invalid_argument("chart mismatch: " + a.name() + " vs " + b.name());
}

}  // namespace

Chart::Chart(std::string name, std::vector<std::string> coords) : name_(std::move(name)), coords_(std::move(coords)) {
    for (std::size_t i = 0; i < coords_.size(); ++i)
        for (std::size_t j = i + 1; j < coords_.size(); ++j)
            if (coords_[i] == coords_[j]) throw std::invalid_argument("duplicate chart coordinate " + coords_[i]);
}

Chart Chart::j2_third() { return {"J2_3rd", {"x", "y", "p", "q"}}; }
Chart Chart::j1_ext() { return {"J1ext", {"x", "y", "p", "phi"}}; }
Chart Chart::monge1() { return {"Monge1", {"x", "y", "p", "z"}}; }
Chart Chart::monge2() { return {"Monge2", {"x", "y", "p", "q", "z"}}; }
Chart Chart::dkp() { return {"DKP", {"x", "y", "t", "v"}}; }

int Chart::index(const std::string& c) const {
    for (std::size_t i = 0; i < coords_.size(); ++i)
        if (coords_[i] == c) return static_cast<int>(i);
    return -1;
}

VectorField::VectorField(Chart chart, std::vector<Expr> comps) : chart_(std::move(chart)), comps_(std::move(comps)) {
    if (comps_.size() != chart_.dim()) throw std::invalid_argument("vector field length does not match chart");
}

Expr VectorField::apply(const Expr& f) const {
    std::vector<Expr> terms;
    for (std::size_t i = 0; i < comps_.size(); ++i) {
        if (comps_[i].is_zero()) continue;
        Expr df = differentiate(f, chart_.coords()[i]);
        if (!df.is_zero()) terms.push_back(comps_[i] * df);
    }
    return add(std::move(terms));
}

Form::Form(Chart chart, int degree) : chart_(std::move(chart)), degree_(degree) {
    if (degree < 0 || degree > static_cast<int>(chart_.dim())) throw std::invalid_argument("form degree out of range");
}

Form Form::function(const Chart& chart, const Expr& f) {
    Form w(chart, 0);
    w.add_term({}, f);
    return w;
}

Form Form::differential(const Chart& chart, const std::string& coord) {
    int i = chart.index(coord);
    if (i < 0) throw std::invalid_argument("no coordinate " + coord + " in chart " + chart.name());
    Form w(chart, 1);
    w.add_term({i}, Expr(1));
    return w;
}

Form Form::one_form(const Chart& chart, const std::vector<Expr>& coeffs) {
    if (coeffs.size() != chart.dim()) throw std::invalid_argument("1-form length does not match chart");
    Form w(chart, 1);
    for (std::size_t i = 0; i < coeffs.size(); ++i) w.add_term({static_cast<int>(i)}, coeffs[i]);
    return w;
}

Expr Form::coeff(Indices idx) const {
    if (static_cast<int>(idx.size()) != degree_) throw std::invalid_argument("index tuple length != degree");
    int s = sort_sign(idx);
    if (s == 0) return Expr(0);
    auto it = terms_.find(idx);
    if (it == terms_.end()) return Expr(0);
    return s > 0 ? it->second : -it->second;
}

void Form::add_term(Indices idx, const Expr& c) {
    if (static_cast<int>(idx.size()) != degree_) throw std::invalid_argument("index tuple length != degree");
    for (int i : idx)
        if (i < 0 || i >= static_cast<int>(chart_.dim())) throw std::out_of_range("form index out of range");
    if (c.is_zero()) return;
    int s = sort_sign(idx);
    if (s == 0) return;
    Expr v = s > 0 ? c : -c;
    auto it = terms_.find(idx);
    if (it == terms_.end()) {
        terms_.emplace(std::move(idx), v);
    } else {
        it->second = it->second + v;
        if (it->second.is_zero()) terms_.erase(it);
    }
}

Expr Form::scalar() const {
    if (degree_ != 0) throw std::invalid_argument("not a 0-form");
    auto it = terms_.find({});
    return it == terms_.end() ? Expr(0) : it->second;
}

std::vector<Expr> Form::one_form_coeffs() const {
    if (degree_ != 1) throw std::invalid_argument("not a 1-form");
    std::vector<Expr> out(chart_.dim(), Expr(0));
    for (const auto& [idx, c] : terms_) out[idx[0]] = c;
    return out;
}

std::vector<Expr> Form::coefficients() const {
    std::vector<Expr> out;
    for (const auto& [idx, c] : terms_) out.push_back(c);
    return out;
}

Form Form::operator+(const Form& o) const {
    require_same_chart(chart_, o.chart_);
    if (degree_ != o.degree_) throw std::invalid_argument("adding forms of different degree");
    Form r = *this;
    for (const auto& [idx, c] : o.terms_) r.add_term(idx, c);
    return r;
}

Form Form::operator-(const Form& o) const { return *this + (-o); }

Form Form::operator-() const { return scaled(Expr(-1)); }

Form Form::scaled(const Expr& f) const {
    Form r(chart_, degree_);
    for (const auto& [idx, c] : terms_) r.add_term(idx, f * c);
    return r;
}

Form Form::map(const std::function<Expr(const Expr&)>& fn) const {
    Form r(chart_, degree_);
    for (const auto& [idx, c] : terms_) r.add_term(idx, fn(c));
    return r;
}

Form d(const Form& w) {
    const Chart& ch = w.chart();
    if (w.degree() >= static_cast<int>(ch.dim())) throw std::invalid_argument("d of a top-degree form");
    Form r(ch, w.degree() + 1);
    for (const auto& [idx, c] : w.terms()) {
        for (std::size_t j = 0; j < ch.dim(); ++j) {
            Expr dc = differentiate(c, ch.coords()[j]);
            if (dc.is_zero()) continue;
            Indices ni{static_cast<int>(j)};
            ni.insert(ni.end(), idx.begin(), idx.end());
            r.add_term(std::move(ni), dc);
        }
    }
    return r;
}

Form wedge(const Form& a, const Form& b) {
    require_same_chart(a.chart(), b.chart());
    if (a.degree() + b.degree() > static_cast<int>(a.chart().dim()))
        throw std::invalid_argument("wedge degree exceeds chart dimension");
    Form r(a.chart(), a.degree() + b.degree());
    for (const auto& [ia, ca] : a.terms())
        for (const auto& [ib, cb] : b.terms()) {
            Indices idx = ia;
            idx.insert(idx.end(), ib.begin(), ib.end());
            r.add_term(std::move(idx), ca * cb);
        }
    return r;
}

Form wedge(const std::vector<Form>& forms) {
    if (forms.empty()) throw std::invalid_argument("empty wedge");
    Form r = forms.front();
    for (std::size_t i = 1; i < forms.size(); ++i) r = wedge(r, forms[i]);
    return r;
}

Form interior(const VectorField& X, const Form& w) {
    require_same_chart(X.chart(), w.chart());
    if (w.degree() == 0) return Form(w.chart(), 0);
    Form r(w.chart(), w.degree() - 1);
    for (const auto& [idx, c] : w.terms()) {
        for (std::size_t m = 0; m < idx.size(); ++m) {
            const Expr& xm = X[idx[m]];
            if (xm.is_zero()) continue;
            Indices rest;
            for (std::size_t k = 0; k < idx.size(); ++k)
                if (k != m) rest.push_back(idx[k]);
            Expr term = xm * c;
            r.add_term(std::move(rest), m % 2 ? -term : term);
        }
    }
    return r;
}

Form lie_derivative(const VectorField& X, const Form& w) {
    require_same_chart(X.chart(), w.chart());
    Form a = interior(X, d(w));
    if (w.degree() == 0) return a;
    return a + d(interior(X, w));
}

Form lie_derivative_components(const VectorField& X, const Form& w) {
    require_same_chart(X.chart(), w.chart());
    const Chart& ch = w.chart();
    Form r(ch, w.degree());
    for (const auto& [idx, c] : w.terms()) {
        r.add_term(idx, X.apply(c));
        // omega_{..j..} d_{i_m} X^j contributes to the slot i_m
        for (std::size_t m = 0; m < idx.size(); ++m)
            for (std::size_t i = 0; i < ch.dim(); ++i) {
                Expr dX = differentiate(X[idx[m]], ch.coords()[i]);
                if (dX.is_zero()) continue;
                Indices ni = idx;
                ni[m] = static_cast<int>(i);
                r.add_term(std::move(ni), c * dX);
            }
    }
    return r;
}

ZeroVerdict is_zero(const Form& w, const DomainBox& box, const ZeroTestOptions& opts) {
    return is_zero(w.coefficients(), box, opts);
}

SymmetricForm::SymmetricForm(Chart chart)
    : chart_(std::move(chart)), m_(chart_.dim(), std::vector<Expr>(chart_.dim(), Expr(0))) {}

SymmetricForm SymmetricForm::product(const Form& a, const Form& b) {
    require_same_chart(a.chart(), b.chart());
    auto ca = a.one_form_coeffs(), cb = b.one_form_coeffs();
    SymmetricForm g(a.chart());
    Expr half(Rational(1, 2));
    for (std::size_t i = 0; i < ca.size(); ++i)
        for (std::size_t j = i; j < ca.size(); ++j) g.set(i, j, half * (ca[i] * cb[j] + ca[j] * cb[i]));
    return g;
}

SymmetricForm SymmetricForm::from_matrix(const Chart& chart, const std::vector<std::vector<Expr>>& m) {
    SymmetricForm g(chart);
    if (m.size() != chart.dim()) throw std::invalid_argument("matrix size does not match chart");
    for (std::size_t i = 0; i < m.size(); ++i)
        for (std::size_t j = i; j < m.size(); ++j) {
            if (m[i][j] != m[j][i]) throw std::invalid_argument("matrix is not symmetric");
            g.set(i, j, m[i][j]);
        }
    return g;
}

void SymmetricForm::set(std::size_t i, std::size_t j, const Expr& v) {
    m_[i][j] = v;
    m_[j][i] = v;
}

std::vector<Expr> SymmetricForm::upper() const {
    std::vector<Expr> out;
    for (std::size_t i = 0; i < dim(); ++i)
        for (std::size_t j = i; j < dim(); ++j) out.push_back(m_[i][j]);
    return out;
}

Form SymmetricForm::contract(const VectorField& X) const {
    require_same_chart(chart_, X.chart());
    std::vector<Expr> c(dim());
    for (std::size_t j = 0; j < dim(); ++j) {
        std::vector<Expr> terms;
        for (std::size_t i = 0; i < dim(); ++i) terms.push_back(X[i] * m_[i][j]);
        c[j] = add(std::move(terms));
    }
    return Form::one_form(chart_, c);
}

Expr SymmetricForm::apply(const VectorField& X, const VectorField& Y) const {
    auto w = contract(X).one_form_coeffs();
    std::vector<Expr> terms;
    for (std::size_t j = 0; j < dim(); ++j) terms.push_back(w[j] * Y[j]);
    return add(std::move(terms));
}

SymmetricForm SymmetricForm::operator+(const SymmetricForm& o) const {
    require_same_chart(chart_, o.chart_);
    SymmetricForm r(chart_);
    for (std::size_t i = 0; i < dim(); ++i)
        for (std::size_t j = i; j < dim(); ++j) r.set(i, j, m_[i][j] + o.m_[i][j]);
    return r;
}

SymmetricForm SymmetricForm::operator-(const SymmetricForm& o) const { return *this + o.scaled(Expr(-1)); }

SymmetricForm SymmetricForm::scaled(const Expr& f) const { return map([&](const Expr& e) { return f * e; }); }

SymmetricForm SymmetricForm::map(const std::function<Expr(const Expr&)>& fn) const {
    SymmetricForm r(chart_);
    for (std::size_t i = 0; i < dim(); ++i)
        for (std::size_t j = i; j < dim(); ++j) r.set(i, j, fn(m_[i][j]));
    return r;
}

SymmetricForm lie_derivative(const VectorField& X, const SymmetricForm& g) {
    require_same_chart(X.chart(), g.chart());
    const Chart& ch = g.chart();
    std::size_t n = ch.dim();
    std::vector<std::vector<Expr>> dX(n, std::vector<Expr>(n));
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t i = 0; i < n; ++i) dX[k][i] = differentiate(X[k], ch.coords()[i]);
    SymmetricForm r(ch);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) {
            std::vector<Expr> terms{X.apply(g(i, j))};
            for (std::size_t k = 0; k < n; ++k) {
                terms.push_back(g(k, j) * dX[k][i]);
                terms.push_back(g(i, k) * dX[k][j]);
            }
            r.set(i, j, add(std::move(terms)));
        }
    return r;
}

TransportResult conformal_transport_factor(const VectorField& X, const SymmetricForm& g, const DomainBox& box,
                                           const ZeroTestOptions& opts) {
    std::size_t n = g.dim();
    auto syms = std::set<std::string>{};
    for (const auto& e : g.upper())
        for (const auto& s : free_symbols(e)) syms.insert(s);
    Point center = box.center(std::vector<std::string>(syms.begin(), syms.end()));
    std::vector<real> vals;
    real scale = 0;
    for (const auto& e : g.upper()) {
        real v = e.is_zero() ? 0 : std::fabs(eval_numeric(e, center));
        vals.push_back(v);
        scale = std::max(scale, v);
    }
    if (scale == 0) throw std::invalid_argument("all components of the bilinear form vanish at the box center");
    TransportResult res;
    std::size_t k = 0;
    bool found = false;
    for (std::size_t i = 0; i < n && !found; ++i)
        for (std::size_t j = i; j < n && !found; ++j, ++k)
            if (vals[k] > 1e-6L * scale) {
                res.pivot_row = i;
                res.pivot_col = j;
                found = true;
            }
    SymmetricForm L = lie_derivative(X, g);
    res.factor = L(res.pivot_row, res.pivot_col) / g(res.pivot_row, res.pivot_col);
    std::vector<Expr> resid;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) {
            resid.push_back(L(i, j) - res.factor * g(i, j));
            res.slots.emplace_back(i, j);
        }
    res.verdict = is_zero(resid, box, opts);
    res.success = res.verdict.zero;
    return res;
}

Chart chart_for(OdeClass c) {
    switch (c) {
    case OdeClass::Third: return Chart::j2_third();
    case OdeClass::Second: return Chart::j1_ext();
    case OdeClass::Monge1: return Chart::monge1();
    case OdeClass::Monge2: return Chart::monge2();
    }
    throw std::invalid_argument("unknown ODE class");
}

VectorField total_derivative(OdeClass c, const Expr& f) {
    Chart ch = chart_for(c);
    Expr p = Expr::symbol("p");
    switch (c) {
    case OdeClass::Third:
        return VectorField(ch, {Expr(1), p, Expr::symbol("q"), f});
    case OdeClass::Second:
        return VectorField(ch, {Expr(1), p, f, Expr(0)});
    case OdeClass::Monge1:
        return VectorField(ch, {Expr(1), p, Expr(0), f});
    case OdeClass::Monge2:
        return VectorField(ch, {Expr(1), p, Expr::symbol("q"), Expr(0), f});
    }
    throw std::invalid_argument("unknown ODE class");
}

std::vector<Form> contact_forms(OdeClass c, const Expr& f) {
    Chart ch = chart_for(c);
    auto dx = Form::differential(ch, "x");
    auto p = Expr::symbol("p");
    std::vector<Form> out{Form::differential(ch, "y") - p * dx};
    switch (c) {
    case OdeClass::Third:
        out.push_back(Form::differential(ch, "p") - Expr::symbol("q") * dx);
        out.push_back(Form::differential(ch, "q") - f * dx);
        break;
    case OdeClass::Second:
        out.push_back(Form::differential(ch, "p") - f * dx);
        break;
    case OdeClass::Monge1:
        out.push_back(Form::differential(ch, "z") - f * dx);
        break;
    case OdeClass::Monge2:
        out.push_back(Form::differential(ch, "p") - Expr::symbol("q") * dx);
        out.push_back(Form::differential(ch, "z") - f * dx);
        break;
    }
    return out;
}

StructureDifferential::StructureDifferential(std::vector<Form> d_basis) : d_basis_(std::move(d_basis)) {
    if (d_basis_.empty()) throw std::invalid_argument("empty frame");
    chart_ = d_basis_.front().chart();
    if (d_basis_.size() != chart_.dim()) throw std::invalid_argument("one differential per basis form required");
    for (const auto& w : d_basis_) {
        require_same_chart(chart_, w.chart());
        if (w.degree() != 2) throw std::invalid_argument("basis differentials must be 2-forms");
    }
}

Form StructureDifferential::operator()(const Form& w) const {
    require_same_chart(chart_, w.chart());
    if (w.degree() >= static_cast<int>(chart_.dim())) return Form(chart_, w.degree());
    Form r(chart_, w.degree() + 1);
    for (const auto& [idx, c] : w.terms()) {
        // d(c th^{i1} ^ ... ^ th^{ik}) = c sum_m (-1)^m th^{i1} ^ .. ^ d th^{im} ^ .. (c constant)
        for (std::size_t m = 0; m < idx.size(); ++m) {
            Form left = Form::function(chart_, m % 2 ? -c : c);
            for (std::size_t k = 0; k < m; ++k) left = wedge(left, Form::differential(chart_, chart_.coords()[idx[k]]));
            Form piece = wedge(left, d_basis_[idx[m]]);
            for (std::size_t k = m + 1; k < idx.size(); ++k)
                piece = wedge(piece, Form::differential(chart_, chart_.coords()[idx[k]]));
            r = r + piece;
        }
    }
    return r;
}

}  // namespace odegeom
