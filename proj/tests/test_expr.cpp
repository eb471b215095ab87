#include "odegeom/eval.hpp"
#include "odegeom/parse.hpp"
#include "odegeom/print.hpp"
#include "odegeom/report.hpp"
#include "odegeom/zero_test.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace odegeom;

namespace {

Expr S(const char* n) { return Expr::symbol(n); }

// random expressions over x, y, z that stay finite on [0.5, 2]^3
Expr random_expr(std::mt19937& rng, int depth) {
    std::uniform_int_distribution<int> pick(0, depth <= 0 ? 1 : 8);
    std::uniform_int_distribution<int> small(-4, 4);
    static const char* names[] = {"x", "y", "z"};
    switch (pick(rng)) {
    case 0: return Expr(Rational(small(rng), 1 + std::abs(small(rng))));
    case 1: return S(names[rng() % 3]);
    case 2: return random_expr(rng, depth - 1) + random_expr(rng, depth - 1);
    case 3: return random_expr(rng, depth - 1) * random_expr(rng, depth - 1);
    case 4: return random_expr(rng, depth - 1) - random_expr(rng, depth - 1);
    case 5: return pow(S(names[rng() % 3]), Expr(Rational(small(rng), 3)));
    case 6: return sqrt(S(names[rng() % 3]) + Expr(1));
    case 7: return exp(random_expr(rng, depth - 1) * Expr(rational(1, 8)));
    default: return log(S(names[rng() % 3]) * Expr(2));
    }
}

Point random_point(std::mt19937& rng) {
    std::uniform_real_distribution<double> u(0.5, 2);
    return {{"x", u(rng)}, {"y", u(rng)}, {"z", u(rng)}};
}

}  // namespace

TEST(Parse, Precedence) {
    EXPECT_EQ(parse("1+2*3^2"), Expr(19));
    EXPECT_EQ(parse("-x^2"), -pow(S("x"), Expr(2)));
    EXPECT_EQ(parse("2^3^2"), Expr(512));
    EXPECT_EQ(parse("x/y/z"), S("x") / (S("y") * S("z")));
}

TEST(Parse, FunctionsAndIntegral) {
    EXPECT_EQ(parse("sqrt(x)"), sqrt(S("x")));
    EXPECT_EQ(parse("exp(log(x))"), exp(log(S("x"))));
    const Expr in = parse("Int(t^(1/2)*w_2^2, t)");
    EXPECT_EQ(in.kind(), Kind::Int);
    EXPECT_TRUE(contains_integral(in));
}

TEST(Parse, Errors) {
    EXPECT_THROW(parse("q^("), ParseError);
    EXPECT_THROW(parse("x +* y"), ParseError);
    EXPECT_THROW(parse(""), ParseError);
    try {
        parse("x + )");
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_EQ(e.position(), 4u);
    }
    ParseOptions only_q;
    only_q.allowed_symbols = {"q"};
    EXPECT_NO_THROW(parse("q^2", only_q));
    EXPECT_THROW(parse("p*q", only_q), ParseError);
}

TEST(Normalize, NumericFactorStaysOutsideSum) {
    const Expr e = parse("(t*w_2 - w_1)/2");
    EXPECT_EQ(e.kind(), Kind::Mul);
    EXPECT_EQ(e, parse("(1/2)*(t*w_2 - w_1)"));
}

TEST(Normalize, NegativeBaseNegativeExponent) {
    EXPECT_EQ(pow(Expr(-2), Expr(-3)), Expr(rational(-1, 8)));
    EXPECT_EQ(pow(Expr(rational(-2, 3)), Expr(-1)), Expr(rational(-3, 2)));
    EXPECT_EQ(pow(Expr(8), Expr(rational(2, 3))), Expr(4));
}

TEST(Normalize, LikeTermsCollect) {
    EXPECT_TRUE((S("x") + S("y") - S("x") - S("y")).is_zero());
    EXPECT_EQ(S("x") * S("x") * S("x"), pow(S("x"), Expr(3)));
    EXPECT_EQ(S("y") + S("x"), S("x") + S("y"));
}

TEST(Print, RoundTripsRandomExpressions) {
    std::mt19937 rng(7);
    for (int i = 0; i < 300; ++i) {
        const Expr e = random_expr(rng, 4);
        const std::string text = to_string(e);
        EXPECT_EQ(parse(text), e) << text;
    }
}

TEST(Print, RoundTripsCatalogFormulas) {
    for (const char* f :
         {"alpha*(q^2+(1-p^2)^2)^(3/2)/(1-p^2)^(3/2) - 3*p*q^2/(1-p^2) - p*(1-p^2)", "(sqrt(2*q*y - p^2))^3/y^2",
          "q^(3/2)", "(p*q*(-12 + 3*p*q - 8*sqrt(1 - p*q)) + 8*(1 + sqrt(1 - p*q)))/p^3", "-(56/25)*q^(-20/3)",
          "t+v^2/2+sqrt(2*x)", "Int(t^(1/2)*w_2^2, t)"}) {
        const Expr e = parse(f);
        EXPECT_EQ(parse(to_string(e)), e) << f;
    }
}

TEST(Differentiate, MatchesCentralDifferences) {
    std::mt19937 rng(11);
    for (int i = 0; i < 200; ++i) {
        const Expr e = random_expr(rng, 3);
        const Point p = random_point(rng);
        for (const char* v : {"x", "y", "z"}) {
            const real h = 1e-6L;
            Point lo = p, hi = p;
            lo[v] -= h;
            hi[v] += h;
            const real fd = (eval_numeric(e, hi) - eval_numeric(e, lo)) / (2 * h);
            const Tracked exact = eval_tracked(differentiate(e, v), p);
            EXPECT_NEAR(static_cast<double>(exact.value), static_cast<double>(fd),
                        1e-6 * (1 + static_cast<double>(exact.magnitude)))
                << to_string(e) << " d/d" << v;
        }
    }
}

TEST(Differentiate, PartialsCommute) {
    std::mt19937 rng(13);
    DomainBox box;
    box.set("x", 0.5, 2).set("y", 0.5, 2).set("z", 0.5, 2);
    for (int i = 0; i < 60; ++i) {
        const Expr e = random_expr(rng, 3);
        const Expr mixed = differentiate(differentiate(e, "x"), "y") - differentiate(differentiate(e, "y"), "x");
        EXPECT_TRUE(is_zero(mixed, box).zero) << to_string(e);
    }
}

TEST(Differentiate, JetFamilies) {
    EXPECT_EQ(differentiate(S("w_1"), "t"), S("w_2"));
    EXPECT_EQ(differentiate(S("w_0") * S("t"), "t"), S("w_1") * S("t") + S("w_0"));
    EXPECT_EQ(differentiate(S("Ups_1"), "q"), S("Ups_2"));
    EXPECT_TRUE(differentiate(S("w_3"), "q").is_zero());
}

TEST(Differentiate, AntiderivativeCancels) {
    const Expr body = parse("t^(1/2)*w_2^2");
    EXPECT_EQ(differentiate(integral(body, S("t")), "t"), body);
    const Expr d = differentiate(parse("t*Int(w_2^2, t)"), "t");
    EXPECT_TRUE(contains_integral(d));
}

TEST(Evaluate, TrackedMagnitudeBoundsCancellation) {
    const Expr e = parse("(x + 1)^2 - x^2 - 2*x - 1");
    const Tracked t = eval_tracked(e, {{"x", 1e6}});
    EXPECT_LE(std::fabs(t.value), 1e-12L * t.magnitude);
    EXPECT_GE(t.magnitude, 1e12L);
}

TEST(Evaluate, DomainAndUnbound) {
    try {
        eval_numeric(parse("sqrt(x)"), {{"x", -1}});
        FAIL();
    } catch (const EvalError& e) {
        EXPECT_EQ(e.reason(), EvalError::Reason::Domain);
    }
    try {
        eval_numeric(parse("x + y"), {{"x", 1}});
        FAIL();
    } catch (const EvalError& e) {
        EXPECT_EQ(e.reason(), EvalError::Reason::Unbound);
    }
    try {
        eval_numeric(parse("Int(w_2, t)"), {{"t", 1}, {"w_2", 1}});
        FAIL();
    } catch (const EvalError& e) {
        EXPECT_EQ(e.reason(), EvalError::Reason::ResidualIntegral);
    }
}

TEST(ZeroTest, IdentitiesAreZero) {
    DomainBox box;
    box.set("x", 0.1, 3);
    for (const char* id : {"exp(log(x)) - x", "sqrt(x)^2 - x", "log(x^3) - 3*log(x)", "(x^(1/3))^3 - x"}) {
        const auto v = is_zero(parse(id), box);
        EXPECT_TRUE(v.zero) << id << ": " << describe(v);
        EXPECT_EQ(v.samples, 20);
    }
}

TEST(ZeroTest, NonzeroCarriesWitness) {
    DomainBox box;
    box.set("x", 0.5, 2);
    const Expr e = parse("x^2 - x");
    const auto v = is_zero(e, box);
    ASSERT_FALSE(v.zero);
    ASSERT_TRUE(v.witness.has_value());
    EXPECT_NEAR(static_cast<double>(eval_numeric(e, v.witness->point)), static_cast<double>(v.witness->value), 1e-15);
    EXPECT_GT(v.worst_ratio, v.tol);
}

TEST(ZeroTest, SeedDeterminesSamples) {
    DomainBox box;
    box.set("x", 0.5, 2);
    const Expr e = parse("x^3 - 2*x");
    ZeroTestOptions a, b;
    b.seed = 5;
    EXPECT_EQ(is_zero(e, box, a).witness->point, is_zero(e, box, a).witness->point);
    EXPECT_NE(is_zero(e, box, a).witness->point, is_zero(e, box, b).witness->point);
}

TEST(ZeroTest, ToleranceIsRelativeToMagnitude) {
    DomainBox box;
    box.set("x", 1e5, 2e5);
    // exact zero written with large cancelling terms
    EXPECT_TRUE(is_zero(parse("(x + 1)^3 - x^3 - 3*x^2 - 3*x - 1"), box).zero);
    EXPECT_FALSE(is_zero(parse("(x + 1)^3 - x^3 - 3*x - 1"), box).zero);
}

TEST(ZeroTest, InferredMarginsAvoidSingularities) {
    const Expr e = parse("sqrt(1 - p*q)/p - sqrt(1 - p*q)/p");
    const DomainBox box = domain_for(parse("sqrt(1 - p*q)/p"), {});
    PointSampler sampler(box, {"p", "q"}, 0);
    int ok = 0;
    for (int i = 0; i < 200; ++i)
        if (auto pt = sampler.draw()) {
            EXPECT_GT(1 - (*pt)["p"] * (*pt)["q"], 0);
            EXPECT_GT(std::fabs((*pt)["p"]), 0);
            ++ok;
        }
    EXPECT_GT(ok, 50);
    EXPECT_TRUE(is_zero(e, box).zero);
}

TEST(ZeroTest, UnusableBoxThrows) {
    DomainBox box;
    box.set("x", -2, -1);
    box.require_positive(S("x"), 0.1);
    EXPECT_THROW(is_zero(parse("x^2 - x"), box), BoxUnusable);
}

TEST(DomainBox, Specs) {
    const auto b = DomainBox::from_specs({"q:0.1:10", "alpha:2:2"});
    EXPECT_DOUBLE_EQ(static_cast<double>(b.range("q").lo), 0.1);
    EXPECT_DOUBLE_EQ(static_cast<double>(b.range("alpha").hi), 2);
    EXPECT_THROW(DomainBox::from_specs({"q:2:1"}), std::invalid_argument);
    EXPECT_THROW(DomainBox::from_specs({"q:1"}), std::invalid_argument);
    EXPECT_THROW(DomainBox::from_specs({"q:a:1"}), std::invalid_argument);
}
