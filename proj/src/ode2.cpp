#include "odegeom/ode2.hpp"
#include "odegeom/print.hpp"

#include <stdexcept>

namespace odegeom {

namespace {

Expr pd(const Expr& f, const char* v) { return differentiate(f, v); }

}  // namespace

MetricTensor fefferman_metric(const SecondOrderODE& ode) {
    for (const auto& s : free_symbols(ode.Q))
        if (s == "phi" || s == "q") throw std::invalid_argument("Q must not depend on " + s);
    const Chart ch = Chart::j1_ext();
    const Expr& Q = ode.Q;
    Expr p = Expr::symbol("p");
    Expr Qp = pd(Q, "p"), Qpp = pd(Qp, "p");
    Form contact_p = Form::one_form(ch, {-Q, Expr(0), Expr(1), Expr(0)});
    Form contact_y = Form::one_form(ch, {-p, Expr(1), Expr(0), Expr(0)});
    Form fiber = Form::one_form(
        ch, {Expr(Rational(2, 3)) * Qp - Expr(Rational(1, 6)) * Qpp * p, Expr(Rational(1, 6)) * Qpp, Expr(0), Expr(1)});
    Form dx = Form::differential(ch, "x");
    SymmetricForm g = Expr(2) * (SymmetricForm::product(contact_p, dx) - SymmetricForm::product(contact_y, fiber));
    MetricTensor m(g, domain_for(Q, ode.box));
    m.known_signature = Signature{2, 2, 0};
    return m;
}

Ode2Invariants ode2_invariants(const Expr& Q) {
    auto D = total_derivative(OdeClass::Second, Q);
    Expr Qp = pd(Q, "p"), Qy = pd(Q, "y"), Qpp = pd(Qp, "p"), Qpy = pd(Qp, "y");
    Expr DQpp = D.apply(Qpp);
    Expr w1 = D.apply(DQpp) - Expr(4) * D.apply(Qpy) - DQpp * Qp + Expr(4) * Qp * Qpy - Expr(3) * Qpp * Qy +
              Expr(6) * pd(Qy, "y");
    return {w1, pd(pd(Qpp, "p"), "p")};
}

InvariantReport fefferman_flatness_check(const SecondOrderODE& ode, const ZeroTestOptions& opts) {
    InvariantReport rep;
    rep.subject = "ode2";
    rep.input = to_string(ode.Q);
    auto inv = ode2_invariants(ode.Q);
    auto g = fefferman_metric(ode);
    rep.checks.push_back({"w1", is_zero(inv.w1, g.box(), opts), inv.w1});
    rep.checks.push_back({"w2", is_zero(inv.w2, g.box(), opts), inv.w2});
    rep.checks.push_back({"weyl", pointwise_zero_test(g, [](const PointCurvature& c) { return c.weyl; }, {}, opts),
                          std::nullopt});
    auto sig = signature_at(g, g.box().center(g.chart().coords()));
    rep.notes.emplace_back("signature at center", "(" + std::to_string(sig.positive) + "," +
                                                       std::to_string(sig.negative) + ")");
    bool w_zero = rep.zero("w1") && rep.zero("w2");
    rep.verdict = rep.zero("weyl") ? "conformally-flat" : "weyl-nonzero";
    rep.consistent = rep.zero("weyl") == w_zero && sig == Signature{2, 2, 0};
    return rep;
}

}  // namespace odegeom
