#include "odegeom/ode2.hpp"
#include "odegeom/parse.hpp"
#include "odegeom/print.hpp"

#include <gtest/gtest.h>

using namespace odegeom;

namespace {

const std::vector<const char*> kCatalog{"0", "y", "p^2", "p^3", "p^4"};

Expr D(const Expr& Q, const Expr& e) {
    return differentiate(e, "x") + Expr::symbol("p") * differentiate(e, "y") + Q * differentiate(e, "p");
}

// point invariants written out again from the defining formula
std::pair<Expr, Expr> invariants_by_hand(const Expr& Q) {
    auto d = [](const Expr& e, const char* v) { return differentiate(e, v); };
    const Expr Qp = d(Q, "p"), Qy = d(Q, "y"), Qpp = d(Qp, "p"), Qpy = d(Qp, "y");
    const Expr w1 = D(Q, D(Q, Qpp)) - Expr(4) * D(Q, Qpy) - D(Q, Qpp) * Qp + Expr(4) * Qp * Qpy -
                    Expr(3) * Qpp * Qy + Expr(6) * d(Qy, "y");
    return {w1, d(d(Qpp, "p"), "p")};
}

DomainBox sample_box() {
    DomainBox b;
    b.set("x", -1, 1).set("y", -1, 1).set("p", -1, 1).set("phi", -1, 1);
    return b;
}

}  // namespace

TEST(Fefferman, SignatureAtEverySample) {
    for (const char* q : kCatalog) {
        const auto g = fefferman_metric({parse(q), {}});
        PointSampler sampler(sample_box(), g.chart().coords(), 0);
        for (int i = 0; i < 20; ++i) {
            const auto pt = sampler.draw();
            ASSERT_TRUE(pt.has_value());
            EXPECT_EQ(signature_at(g, *pt), (Signature{2, 2, 0})) << q;
        }
    }
}

TEST(Fefferman, InvariantsMatchHandFormula) {
    for (const char* q : {"0", "y", "p^2", "p^3", "p^4", "x*p^3 + y^2*p", "exp(y)*p^2", "log(2 + x)*p + y^3"}) {
        const Expr Q = parse(q);
        const auto inv = ode2_invariants(Q);
        const auto [w1, w2] = invariants_by_hand(Q);
        EXPECT_TRUE(is_zero(inv.w1 - w1, sample_box()).zero) << q;
        EXPECT_TRUE(is_zero(inv.w2 - w2, sample_box()).zero) << q;
    }
}

TEST(Fefferman, QuarticInvariantsExact) {
    const auto inv = ode2_invariants(parse("p^4"));
    EXPECT_EQ(inv.w1, parse("24*p^8"));
    EXPECT_EQ(inv.w2, Expr(24));
}

TEST(Fefferman, WeylVanishesExactlyWithInvariants) {
    for (const char* q : kCatalog) {
        const auto rep = fefferman_flatness_check({parse(q), sample_box()});
        const bool w_zero = rep.zero("w1") && rep.zero("w2");
        EXPECT_EQ(rep.zero("weyl"), w_zero) << q;
        EXPECT_TRUE(rep.consistent) << q;
    }
    const auto quartic = fefferman_flatness_check({parse("p^4"), sample_box()});
    EXPECT_FALSE(quartic.zero("weyl"));
    EXPECT_EQ(quartic.verdict, "weyl-nonzero");
    EXPECT_TRUE(quartic.find("weyl")->verdict.witness.has_value());
    EXPECT_EQ(fefferman_flatness_check({parse("p^2"), sample_box()}).verdict, "conformally-flat");
}

TEST(Fefferman, TrivialEquationIsConformallyFlatOnly) {
    // curved but scalar-flat, with Ricci along the fiber only
    const auto g = fefferman_metric({Expr(0), {}});
    const auto pkg = curvature_package(g);
    EXPECT_FALSE(is_zero(pkg.riemann, sample_box()).zero);
    EXPECT_TRUE(pkg.scalar.is_zero());
    EXPECT_TRUE(is_zero(weyl(g), sample_box()).zero);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            EXPECT_EQ(pkg.ricci({i, j}), i == 3 && j == 3 ? Expr(rational(-1, 2)) : Expr(0)) << i << j;
}

TEST(Fefferman, CurvatureIdentitiesOnQuartic) {
    const auto g = fefferman_metric({parse("p^4"), {}});
    const auto rep = curvature_identities(g, sample_box());
    EXPECT_EQ(rep.verdict, "identities-hold");
    for (const char* name : {"bianchi", "metric-compatible", "weyl-traceless", "conformal-covariance"})
        EXPECT_TRUE(rep.zero(name)) << name;
}

TEST(Fefferman, RejectsFiberDependence) {
    EXPECT_THROW(fefferman_metric({parse("phi*p"), {}}), std::invalid_argument);
}
