#include "odegeom/ode3.hpp"
#include "odegeom/print.hpp"

#include <stdexcept>

namespace odegeom {

namespace {

Expr r(long long p, long long q = 1) { return Expr(Rational(p, q)); }

Expr D3(const Expr& F, const Expr& f) { return total_derivative(OdeClass::Third, F).apply(f); }

Expr pd(const Expr& f, const char* v) { return differentiate(f, v); }

void require_symbols(const Expr& e, const std::vector<std::string>& forbidden, const char* what) {
    for (const auto& s : free_symbols(e))
        for (const auto& f : forbidden)
            if (s == f) throw std::invalid_argument(std::string(what) + " must not depend on " + s);
}

}  // namespace

Ode3Invariants ode3_invariants(const Expr& F) {
    require_symbols(F, {"z", "v", "t", "phi"}, "F");
    Ode3Invariants I;
    Expr Fq = pd(F, "q");
    Expr Fqq = pd(Fq, "q");
    I.K = r(1, 6) * D3(F, Fq) - r(1, 9) * Fq * Fq - r(1, 2) * pd(F, "p");
    I.A = pd(F, "y") + D3(F, I.K) - r(2, 3) * Fq * I.K;
    I.G = D3(F, D3(F, Fqq)) - D3(F, pd(Fq, "p")) + pd(Fq, "y");
    const Expr& K = I.K;
    Expr Kq = pd(K, "q"), Kqq = pd(Kq, "q");
    I.L = -r(1, 3) * pd(Fq, "y") + r(1, 3) * Fqq * K - pd(K, "p") - r(1, 3) * Fq * Kq;
    const Expr& L = I.L;
    Expr Lq = pd(L, "q");
    I.N = r(1, 3) * Fqq * L - r(2, 3) * Fq * Lq - Expr(2) * pd(L, "p") + K * Kqq - pd(Kq, "y") - r(1, 2) * Kq * Kq;
    Expr Nq = pd(I.N, "q");
    I.C[0] = pd(pd(Fqq, "q"), "q");
    I.C[1] = pd(Kqq, "q");
    I.C[2] = pd(Lq, "q");
    I.C[3] = Nq;
    I.C[4] = -Expr(3) * Kqq * L + Expr(3) * Kq * Lq - Expr(3) * K * pd(Lq, "q") + Expr(3) * pd(Lq, "y") +
             Expr(3) * pd(I.N, "p") + Fq * Nq;
    return I;
}

SymmetricForm metric_tilde(const Expr& F) {
    const Chart ch = Chart::j2_third();
    Expr Fq = pd(F, "q");
    Expr K = ode3_invariants(F).K;
    Expr p = Expr::symbol("p"), q = Expr::symbol("q");
    Form w1 = Form::one_form(ch, {-p, Expr(1), Expr(0), Expr(0)});
    Form w2 = Form::one_form(ch, {-q, Expr(0), Expr(1), Expr(0)});
    Form b = Form::one_form(ch, {r(1, 3) * q * Fq - F - p * K, K, -r(1, 3) * Fq, Expr(1)});
    return Expr(2) * SymmetricForm::product(w1, b) - SymmetricForm::product(w2, w2);
}

Form nu_tilde(const Expr& F) {
    const Chart ch = Chart::j2_third();
    Expr Fq = pd(F, "q");
    Expr Fqq = pd(Fq, "q");
    Expr p = Expr::symbol("p"), q = Expr::symbol("q");
    Expr c1 = -r(2, 3) * (pd(Fq, "p") - D3(F, Fqq));
    Expr c2 = -r(2, 3) * Fqq;
    Expr c4 = -r(2, 3) * Fq;
    return Form::one_form(ch, {c4 - c1 * p - c2 * q, c1, c2, Expr(0)});
}

Form nu_transport_curl(const Expr& F) {
    return d(lie_derivative(total_derivative(OdeClass::Third, F), nu_tilde(F)));
}

std::string to_string(Ode3Class c) {
    switch (c) {
        case Ode3Class::Generic: return "generic";
        case Ode3Class::Wuenschmann: return "wuenschmann";
        case Ode3Class::EinsteinWeyl: return "einstein-weyl";
    }
    return "?";
}

Ode3Class ode3_class(const InvariantReport& r) {
    if (r.verdict == "einstein-weyl") return Ode3Class::EinsteinWeyl;
    if (r.verdict == "wuenschmann") return Ode3Class::Wuenschmann;
    return Ode3Class::Generic;
}

InvariantReport classify3(const ThirdOrderODE& ode, const ZeroTestOptions& opts) {
    const Expr& F = ode.F;
    const DomainBox box = domain_for(F, ode.box);
    auto I = ode3_invariants(F);
    InvariantReport rep;
    rep.subject = "ode3";
    rep.input = to_string(F);
    auto scalar = [&](const std::string& name, const Expr& e) {
        rep.checks.push_back({name, is_zero(e, box, opts), e});
        return rep.checks.back().verdict.zero;
    };
    bool a_zero = scalar("A", I.A);
    bool g_zero = scalar("G", I.G);

    auto Dv = total_derivative(OdeClass::Third, F);
    auto g = metric_tilde(F);
    rep.checks.push_back({"kernel", is_zero(g.contract(Dv), box, opts), std::nullopt});
    auto tr = conformal_transport_factor(Dv, g, box, opts);
    rep.checks.push_back({"transport", tr.verdict, std::nullopt});
    rep.notes.emplace_back("transport pivot", "(" + Chart::j2_third().coords()[tr.pivot_row] + "," +
                                                  Chart::j2_third().coords()[tr.pivot_col] + ")");
    if (tr.success) rep.notes.emplace_back("transport factor", to_string(tr.factor));
    rep.checks.push_back({"nu-closed", is_zero(nu_transport_curl(F), box, opts), std::nullopt});
    rep.notes.emplace_back("nu gauge", "beta = 1");

    if (a_zero) {
        bool flat = true;
        for (int i = 0; i < 5; ++i) flat = scalar("C" + std::to_string(i + 1), I.C[i]) && flat;
        rep.notes.emplace_back("cotton", flat ? "vanishes" : "nonzero");
    }
    rep.verdict = to_string(!a_zero ? Ode3Class::Generic : g_zero ? Ode3Class::EinsteinWeyl : Ode3Class::Wuenschmann);
    rep.consistent = rep.zero("kernel") && tr.success == a_zero && rep.zero("nu-closed") == g_zero;
    if (a_zero && rep.zero("C1")) {
        for (int i = 2; i <= 5; ++i) rep.consistent = rep.consistent && rep.zero("C" + std::to_string(i));
    }
    return rep;
}

namespace {

Form dkp_w1(const Chart& ch, const Expr& u) {
    Expr v = Expr::symbol("v");
    return Form::one_form(ch, {Expr(1), v, u + v * v, Expr(0)});
}

Form dkp_w4(const Chart& ch, const Expr& u) {
    Expr v = Expr::symbol("v");
    Expr ux = pd(u, "x"), uy = pd(u, "y");
    return Form::one_form(ch, {Expr(0), -ux, -(uy + ux * v), Expr(1)});
}

}  // namespace

DkpResidual dkp_residual(const Expr& u) {
    require_symbols(u, {"v", "p", "q", "z"}, "u");
    const Chart ch = Chart::dkp();
    Form w1 = dkp_w1(ch, u), w4 = dkp_w4(ch, u);
    Expr ux = pd(u, "x");
    DkpResidual res{pd(pd(u, "y"), "y") + ux * ux - pd(ux, "t") + u * pd(ux, "x"), wedge({d(w1), w1, w4}),
                    wedge({d(w4), w1, w4})};
    return res;
}

std::pair<ZeroVerdict, ZeroVerdict> dkp_factor_check(const DkpResidual& r, const DomainBox& box,
                                                     const ZeroTestOptions& opts) {
    DomainBox b = domain_for(r.scalar, box);
    const Indices vol{0, 1, 2, 3};
    Expr f1 = r.frobenius1.coeff(vol) - Expr(kFrobenius1Factor) * r.scalar;
    Expr f4 = r.frobenius4.coeff(vol) - Expr(kFrobenius4Factor) * r.scalar;
    return {is_zero(f1, b, opts), is_zero(f4, b, opts)};
}

std::vector<Form> dkp_coframe(const Expr& u, const DomainBox& box, const ZeroTestOptions& opts) {
    auto res = dkp_residual(u);
    auto verdict = is_zero(res.scalar, domain_for(res.scalar, box), opts);
    if (!verdict.zero) throw std::invalid_argument("u is not a dKP solution: " + describe(verdict));
    const Chart ch = Chart::dkp();
    Expr v = Expr::symbol("v");
    Expr uxx = pd(pd(u, "x"), "x"), uxy = pd(pd(u, "x"), "y");
    Form w2 = Form::one_form(ch, {-uxx, -uxy, -u * uxx - Expr(2) * uxy * v + uxx * v * v, Expr(0)});
    Form w3 = Form::one_form(ch, {-uxx * uxx, uxx * (-Expr(2) * uxy + uxx * v),
                                  -u * uxx * uxx - Expr(4) * uxy * uxy + Expr(4) * uxx * uxy * v - uxx * uxx * v * v,
                                  Expr(0)});
    return {dkp_w1(ch, u), w2, w3, dkp_w4(ch, u)};
}

Form dkp_membership_form(const std::vector<Form>& coframe, const Expr& X) {
    if (coframe.size() != 4) throw std::invalid_argument("expected the four dKP 1-forms");
    const Chart& ch = coframe[0].chart();
    return wedge({d(Form::function(ch, X)), coframe[3], coframe[0]});
}

}  // namespace odegeom
