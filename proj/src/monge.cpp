#include "odegeom/monge.hpp"
#include "odegeom/parse.hpp"
#include "odegeom/print.hpp"

#include <regex>
#include <stdexcept>

namespace odegeom {

namespace {

Expr pd(const Expr& f, const std::string& v) { return differentiate(f, v); }
Expr r(long long p, long long q = 1) { return Expr(Rational(p, q)); }
Expr w(int k) { return Expr::symbol(jet_symbol("w", k)); }

void require_q_only(const Expr& F) {
    for (const auto& s : free_symbols(F))
        if (s != "q") throw std::invalid_argument("F must depend on q alone, found " + s);
}

// F'' through F^(6)
std::array<Expr, 7> q_derivatives(const Expr& F) {
    std::array<Expr, 7> d;
    d[0] = F;
    for (int k = 1; k < 7; ++k) d[k] = pd(d[k - 1], "q");
    return d;
}

void require_nonvanishing(const Expr& e, const DomainBox& box, const ZeroTestOptions& opts, const char* what) {
    if (e.is_zero() || is_zero(e, box, opts).zero) throw std::invalid_argument(std::string(what) + " vanishes on the box");
}

}  // namespace

InvariantReport classify_monge1(const MongeFirst& m, const ZeroTestOptions& opts) {
    const Expr& F = m.F;
    for (const auto& s : free_symbols(F))
        if (s == "q") throw std::invalid_argument("first-order Monge F must not depend on q");
    DomainBox box = domain_for(F, m.box);
    auto D = total_derivative(OdeClass::Monge1, F);
    Expr Fp = pd(F, "p");
    Expr c1 = pd(Fp, "p");
    Expr c2 = D.apply(Fp) - pd(F, "y") - Fp * pd(F, "z");
    InvariantReport rep;
    rep.subject = "monge1";
    rep.input = to_string(F);
    rep.checks.push_back({"Fpp", is_zero(c1, box, opts), c1});
    rep.checks.push_back({"DFp-Fy-FpFz", is_zero(c2, box, opts), c2});
    bool cc2 = rep.zero("Fpp") && rep.zero("DFp-Fy-FpFz");
    rep.verdict = cc2 ? "branch-cc2" : "branch-cc1";
    rep.notes.emplace_back("solution shape", cc2 ? "x, y, z in t, w, w'" : "x, y, z in t, w, w', w''");
    return rep;
}

InvariantReport classify_monge2(const MongeSecond& m, const ZeroTestOptions& opts) {
    Expr Fqq = pd(pd(m.F, "q"), "q");
    InvariantReport rep;
    rep.subject = "monge2";
    rep.input = to_string(m.F);
    rep.checks.push_back({"Fqq", is_zero(Fqq, domain_for(m.F, m.box), opts), Fqq});
    rep.verdict = rep.zero("Fqq") ? "integral-free" : "g2";
    return rep;
}

ParametrizedSolution example4_solution() {
    Expr t = Expr::symbol("t");
    return {r(1, 2) * w(2), r(1, 2) * (t * w(2) - w(1)), r(1, 2) * t * t * w(2) - t * w(1) + w(0)};
}

ParametrizedSolution example5_solution(const Rational& k) {
    if (k == 0 || k == 1) throw std::invalid_argument("k must differ from 0 and 1");
    Expr t = Expr::symbol("t");
    Expr km1{Rational(k - 1)};
    Expr t1 = pow(t, Expr(Rational((k - 2) / (k - 1))));
    Expr t2 = pow(t, Expr(Rational((2 * k - 3) / (k - 1))));
    Expr x = km1 * t1 * w(2);
    Expr y = r(1, 2) * km1 * km1 * t2 * w(2) * w(2) - km1 * t1 * w(1) * w(2) +
             r(1, 2) * km1 * integral(t1 * w(2) * w(2), t);
    Expr z = Expr(Rational((k - 1) / k)) * t * t * w(2) - t * w(1) + w(0);
    return {x, y, z};
}

Expr parametrized_residual(OdeClass cls, const Expr& F, const ParametrizedSolution& sol) {
    if (cls != OdeClass::Monge1 && cls != OdeClass::Monge2)
        throw std::invalid_argument("parametrized solutions apply to Monge equations");
    auto dt = [](const Expr& e) { return differentiate(e, "t"); };
    Expr xt = dt(sol.x);
    Expr p = dt(sol.y) / xt;
    Expr zp = dt(sol.z) / xt;
    std::map<std::string, Expr> at{{"x", sol.x}, {"y", sol.y}, {"z", sol.z}, {"p", p}};
    if (cls == OdeClass::Monge2) at["q"] = dt(p) / xt;
    Expr res = zp - substitute(F, at);
    if (contains_integral(res)) throw std::invalid_argument("an antiderivative survives in the residual");
    return res;
}

namespace {

// top-level summands, with a numeric factor distributed over a single sum
std::vector<Expr> summands(const Expr& e) {
    if (e.kind() == Kind::Add) return e.args();
    if (e.kind() == Kind::Mul) {
        auto [c, rest] = split_coefficient(e);
        if (rest.kind() == Kind::Add) {
            std::vector<Expr> out;
            for (const auto& t : rest.args()) out.push_back(Expr(c) * t);
            return out;
        }
    }
    return {e};
}

std::vector<Expr> bumped(const Expr& e) {
    auto terms = summands(e);
    std::vector<Expr> out;
    for (std::size_t k = 0; k < terms.size(); ++k) {
        std::vector<Expr> t = terms;
        auto [c, rest] = split_coefficient(t[k]);
        t[k] = Expr(c + 1) * rest;
        out.push_back(add(t));
    }
    return out;
}

}  // namespace

std::vector<ParametrizedSolution> coefficient_mutations(const ParametrizedSolution& sol) {
    std::vector<ParametrizedSolution> out;
    for (const auto& x : bumped(sol.x)) out.push_back({x, sol.y, sol.z});
    for (const auto& y : bumped(sol.y)) out.push_back({sol.x, y, sol.z});
    for (const auto& z : bumped(sol.z)) out.push_back({sol.x, sol.y, z});
    return out;
}

ZeroVerdict verify_parametrized_solution(OdeClass cls, const Expr& F, const ParametrizedSolution& sol,
                                         const DomainBox& box, const ZeroTestOptions& opts) {
    Expr xt = differentiate(sol.x, "t");
    if (contains_integral(xt)) throw std::invalid_argument("x_t contains an antiderivative");
    DomainBox b = domain_for(xt, box);
    if (xt.is_zero() || is_zero(xt, b, opts).zero) throw std::invalid_argument("x_t vanishes on the box");
    Expr res = parametrized_residual(cls, F, sol);
    b = domain_for(res, b);
    b.require_nonzero(xt, 1e-6L);
    return is_zero(res, b, opts);
}

const std::vector<MetricSlot>& g32_table() {
    static const std::vector<MetricSlot> table{
        {0, 0,
         "DFqq^2*Fqq^2 + 6*DFq*DFqqq*Fqq^2 - 6*DFqqq*Fp*Fqq^2 - 3*DDFqq*Fqq^3 + 9*DFqp*Fqq^3 - 9*Fpp*Fqq^3"
         " + 9*DFqz*Fq*Fqq^3 - 18*Fpz*Fq*Fqq^3 + 3*DFz*Fqq^4 - 6*DFq*Fqq^2*Fqqp + 6*Fp*Fqq^2*Fqqp"
         " - 8*DFq*DFqq*Fqq*Fqqq + 8*DFqq*Fp*Fqq*Fqqq + 3*DDFq*Fqq^2*Fqqq - 3*DFp*Fqq^2*Fqqq - 3*DFz*Fq*Fqq^2*Fqqq"
         " + 4*DFq^2*Fqqq^2 - 8*DFq*Fp*Fqqq^2 - 3*DFq^2*Fqq*Fqqqq + 4*Fp^2*Fqqq^2 + 6*DFq*Fp*Fqq*Fqqqq"
         " - 3*Fp^2*Fqq*Fqqqq - 6*DFq*Fq*Fqq^2*Fqqz + 6*Fp*Fq*Fqq^2*Fqqz - 3*DFq*Fqq^3*Fqz + 12*Fp*Fqq^3*Fqz"
         " + 3*Fqq^2*Fqqq*Fy - 6*DFqqq*Fq*Fqq^2*Fz + 4*DFqq*Fqq^3*Fz + 6*Fq*Fqq^2*Fqqp*Fz + 8*DFqq*Fq*Fqq*Fqqq*Fz"
         " - 4*DFq*Fqq^2*Fqqq*Fz - 9*Fqp*Fqq^3*Fz + Fp*Fqq^2*Fqqq*Fz - 8*DFq*Fq*Fqqq^2*Fz + 8*Fp*Fq*Fqqq^2*Fz"
         " + 6*DFq*Fq*Fqq*Fqqqq*Fz - 6*Fp*Fq*Fqq*Fqqqq*Fz + 18*Fqq^3*Fqy + 6*Fq^2*Fqq^2*Fqqz*Fz + 3*Fq*Fqq^3*Fqz*Fz"
         " - 2*Fqq^4*Fz^2 + Fq*Fqq^2*Fqqq*Fz^2 + 4*Fq^2*Fqqq^2*Fz^2 - 3*Fq^2*Fqq*Fqqqq*Fz^2 - 9*Fq^2*Fqq^3*Fzz"},
        {0, 1,
         "6*DFqqq*Fqq^2 - 6*Fqq^2*Fqqp - 8*DFqq*Fqq*Fqqq + 8*DFq*Fqqq^2 - 8*Fp*Fqqq^2 - 6*DFq*Fqq*Fqqqq"
         " + 6*Fp*Fqq*Fqqqq - 6*Fq*Fqq^2*Fqqz + 6*Fqq^3*Fqz + 2*Fqq^2*Fqqq*Fz - 8*Fq*Fqqq^2*Fz + 6*Fq*Fqq*Fqqqq*Fz"},
        {0, 2, "10*DFqq*Fqq^3 - 10*DFq*Fqq^2*Fqqq + 10*Fp*Fqq^2*Fqqq - 10*Fqq^4*Fz + 10*Fq*Fqq^2*Fqqq*Fz"},
        {0, 3, "30*Fqq^4"},
        {0, 4, "30*DFq*Fqq^3 - 30*Fp*Fqq^3 - 30*Fq*Fqq^3*Fz"},
        {1, 1, "4*Fqqq^2 - 3*Fqq*Fqqqq"},
        {1, 2, "-10*Fqq^2*Fqqq"},
        {1, 4, "30*Fqq^3"},
        {2, 2, "-20*Fqq^4"},
    };
    return table;
}

const std::vector<MetricSlot>& example6_table() {
    // basis dx, dy, dp, dq, dz
    static const std::vector<MetricSlot> table{
        {1, 3, "30*Fqq^4"},
        {0, 3, "-30*Fqq^4*p"},
        {4, 4, "4*Fqqq^2 - 3*Fqq*Fqqqq"},
        {2, 4, "2*(-5*Fqq^2*Fqqq - 4*Fq*Fqqq^2 + 3*Fq*Fqq*Fqqqq)"},
        {0, 4,
         "2*(15*Fqq^3 + 5*q*Fqq^2*Fqqq - 4*F*Fqqq^2 + 4*q*Fq*Fqqq^2 + 3*F*Fqq*Fqqqq - 3*q*Fq*Fqq*Fqqqq)"},
        {2, 2, "-20*Fqq^4 + 10*Fq*Fqq^2*Fqqq + 4*Fq^2*Fqqq^2 - 3*Fq^2*Fqq*Fqqqq"},
        {0, 2,
         "2*(-15*Fq*Fqq^3 + 20*q*Fqq^4 + 5*F*Fqq^2*Fqqq - 10*q*Fq*Fqq^2*Fqqq + 4*F*Fq*Fqqq^2 - 4*q*Fq^2*Fqqq^2"
         " - 3*F*Fq*Fqq*Fqqqq + 3*q*Fq^2*Fqq*Fqqqq)"},
        {0, 0,
         "-30*F*Fqq^3 + 30*q*Fq*Fqq^3 - 20*q^2*Fqq^4 - 10*q*F*Fqq^2*Fqqq + 10*q^2*Fq*Fqq^2*Fqqq + 4*F^2*Fqqq^2"
         " - 8*q*F*Fq*Fqqq^2 + 4*q^2*Fq^2*Fqqq^2 - 3*F^2*Fqq*Fqqqq + 6*q*F*Fq*Fqq*Fqqqq - 3*q^2*Fq^2*Fqq*Fqqqq"},
    };
    return table;
}

Expr expand_atoms(const std::string& text, const Expr& F) {
    static const std::regex atom("^(D*)F([xypqz]*)$");
    Expr e = parse(text);
    auto D = total_derivative(OdeClass::Monge2, F);
    std::map<std::string, Expr> bind;
    for (const auto& s : free_symbols(e)) {
        std::smatch m;
        if (!std::regex_match(s, m, atom)) continue;
        Expr v = F;
        for (char c : m[2].str()) v = pd(v, std::string(1, c));
        for (std::size_t k = 0; k < static_cast<std::size_t>(m[1].length()); ++k) v = D.apply(v);
        bind[s] = v;
    }
    return substitute(e, bind);
}

std::vector<Form> tilde_coframe(const Expr& F) {
    const Chart ch = Chart::monge2();
    Expr p = Expr::symbol("p"), q = Expr::symbol("q");
    Expr Fq = pd(F, "q");
    return {Form::one_form(ch, {-p, Expr(1), Expr(0), Expr(0), Expr(0)}),
            Form::one_form(ch, {Fq * q - F, Expr(0), -Fq, Expr(0), Expr(1)}),
            Form::one_form(ch, {-q, Expr(0), Expr(1), Expr(0), Expr(0)}), Form::differential(ch, "q"),
            Form::differential(ch, "x")};
}

MetricTensor metric_from_table(const std::vector<MetricSlot>& table, const std::vector<Form>& basis, const Expr& F,
                               DomainBox box) {
    SymmetricForm g(basis.at(0).chart());
    for (const auto& s : table) g = g + expand_atoms(s.text, F) * SymmetricForm::product(basis.at(s.i), basis.at(s.j));
    return MetricTensor(g, std::move(box));
}

MetricTensor g32_metric(const MongeSecond& m, const ZeroTestOptions& opts) {
    DomainBox box = domain_for(m.F, m.box);
    require_nonvanishing(pd(pd(m.F, "q"), "q"), box, opts, "F_qq");
    auto g = metric_from_table(g32_table(), tilde_coframe(m.F), m.F, box);
    g.known_signature = Signature{3, 2, 0};
    return g;
}

MetricTensor example6_metric(const Expr& F, const DomainBox& box) {
    require_q_only(F);
    const Chart ch = Chart::monge2();
    std::vector<Form> basis;
    for (const auto& c : {"x", "y", "p", "q", "z"}) basis.push_back(Form::differential(ch, c));
    return metric_from_table(example6_table(), basis, F, domain_for(F, box));
}

Example6Coframe example6_coframe(const Expr& F) {
    require_q_only(F);
    auto d = q_derivatives(F);
    if (d[2].is_zero()) throw std::invalid_argument("F'' vanishes");
    auto wt = tilde_coframe(F);
    Expr c = pow(d[2], r(1, 3));
    Expr corr = r(1, 30) * (-Expr(3) * d[2] * d[4] + Expr(4) * d[3] * d[3]);
    Example6Coframe out{{}, {}, Form(Chart::monge2(), 1), Form(Chart::monge2(), 1)};
    out.theta = {wt[0], wt[1], -c * wt[2],
                 pow(c, Expr(-1)) * (wt[4] - r(1, 3) * d[3] * pow(d[2], Expr(-1)) * wt[2] +
                                     corr * pow(d[2], Expr(-3)) * wt[1]),
                 -(c * c) * wt[3]};
    out.alpha = out.theta;
    out.alpha[2] = Expr(2) * pow(Expr(3), r(-1, 2)) * out.theta[2];
    Expr o2a = r(1, 90) *
               (-Expr(45) * d[2] * d[3] * d[4] + Expr(40) * d[3] * d[3] * d[3] + Expr(9) * d[2] * d[2] * d[5]) *
               pow(d[2], Expr(-5));
    Expr o2b = corr * pow(d[2], r(-10, 3));
    out.Omega2 = o2a * out.theta[1] + o2b * out.theta[2];
    out.Omega6 = -o2b * out.theta[4];
    return out;
}

MetricTensor frame_metric(const Example6Coframe& c, const DomainBox& box) {
    const auto& th = c.theta;
    SymmetricForm g = Expr(2) * SymmetricForm::product(th[0], th[4]) - Expr(2) * SymmetricForm::product(th[1], th[3]) +
                      r(4, 3) * SymmetricForm::product(th[2], th[2]);
    return MetricTensor(g, box);
}

Expr example6_a5(const Expr& F) {
    require_q_only(F);
    auto d = q_derivatives(F);
    if (d[2].is_zero()) throw std::invalid_argument("F'' vanishes");
    Expr num = -Expr(224) * pow(d[3], Expr(4)) + Expr(336) * d[2] * d[3] * d[3] * d[4] -
               Expr(80) * d[2] * d[2] * d[3] * d[5] + d[2] * d[2] * (-Expr(51) * d[4] * d[4] + Expr(10) * d[2] * d[6]);
    return num * pow(Expr(100) * pow(d[2], r(20, 3)), Expr(-1));
}

Expr einstein_scale_relation(const Expr& F, bool mutated) {
    require_q_only(F);
    auto d = q_derivatives(F);
    Expr u1 = Expr::symbol(jet_symbol("Ups", 1));
    Expr f4 = mutated ? Expr(0) : Expr(17) * d[2] * d[4];
    // 10 F''^2 (U'' - U'^2) - 40 F'' F''' U' + 17 F'' F'''' - 56 F'''^2 = 0
    return u1 * u1 + (Expr(40) * d[2] * d[3] * u1 - f4 + Expr(56) * d[3] * d[3]) / (Expr(10) * d[2] * d[2]);
}

ZeroVerdict einstein_scale_residual(const Expr& F, const Expr& ups2, const DomainBox& box,
                                    const ZeroTestOptions& opts) {
    auto base = example6_metric(F, box);
    Expr scale = exp(Expr(2) * Expr::symbol(jet_symbol("Ups", 0)));
    Matrix m = base.matrix();
    for (auto& row : m)
        for (auto& e : row) e = scale * e;
    MetricTensor g(base.chart(), m, base.box());
    const std::string u2 = jet_symbol("Ups", 2), u3 = jet_symbol("Ups", 3), u4 = jet_symbol("Ups", 4);
    Expr s3 = substitute(differentiate(ups2, "q"), {{u2, ups2}});
    Expr s4 = substitute(differentiate(s3, "q"), {{u2, ups2}});
    PointwiseCurvature pc(g, {{u4, s4}, {u3, s3}, {u2, ups2}});
    const std::size_t n = g.dim();
    return pointwise_zero_test(
        pc,
        [n](const PointCurvature& c) {
            std::vector<Tracked> out(n * n);
            Tracked k = c.scalar * tracked(real(1) / n);
            for (std::size_t i = 0; i < n * n; ++i) out[i] = c.ricci[i] - k * c.g[i];
            return out;
        },
        base.box(), opts);
}

Expr psi_invariant(const std::array<Expr, 5>& a) {
    return Expr(6) * a[2] * a[2] - Expr(8) * a[1] * a[3] + Expr(2) * a[0] * a[4];
}

namespace {

class FrameWeyl {
public:
    explicit FrameWeyl(const Expr& F)
        : coframe_(example6_coframe(F)), pc_(frame_metric(coframe_)), a5_(example6_a5(F)) {}

    std::vector<Tracked> at(const Point& p) const {
        return frame_transform(pc_.at(p).weyl, 5, 4, coframe_.alpha, p);
    }
    Tracked a5(const Point& p) const { return a5_.run(p)[0]; }
    const std::vector<std::string>& symbols() const { return pc_.symbols(); }

private:
    Example6Coframe coframe_;
    PointwiseCurvature pc_;
    Program a5_;
};

// +1 / -1 on the orbit of (2,5,2,5) (1-based) under the Weyl symmetries, 0 elsewhere
int a5_orbit_sign(std::size_t idx) {
    std::size_t a = idx / 125, b = idx / 25 % 5, c = idx / 5 % 5, d = idx % 5;
    auto pair_sign = [](std::size_t i, std::size_t j) { return i == 1 && j == 4 ? 1 : i == 4 && j == 1 ? -1 : 0; };
    return pair_sign(a, b) * pair_sign(c, d);
}

}  // namespace

std::vector<Tracked> example6_frame_weyl(const Expr& F, const Point& p) { return FrameWeyl(F).at(p); }

InvariantReport weyl_frame_pattern_check(const Expr& F, const DomainBox& user, const ZeroTestOptions& opts) {
    FrameWeyl fw(F);
    DomainBox box = domain_for(F, user);
    InvariantReport rep;
    rep.subject = "example6";
    rep.input = to_string(F);
    auto select = [&](bool orbit) {
        return [&fw, orbit](const Point& p) {
            auto C = fw.at(p);
            Tracked a5 = fw.a5(p);
            std::vector<Tracked> out;
            for (std::size_t i = 0; i < C.size(); ++i) {
                int s = a5_orbit_sign(i);
                if (orbit && s != 0) out.push_back(C[i] - tracked(real(kWeylA5Sign * s)) * a5);
                if (!orbit && s == 0) out.push_back(C[i]);
            }
            return out;
        };
    };
    rep.checks.push_back({"confined", zero_test(select(false), fw.symbols(), box, opts), std::nullopt});
    rep.checks.push_back({"a5-slot", zero_test(select(true), fw.symbols(), box, opts), std::nullopt});
    Expr a5 = example6_a5(F);
    rep.checks.push_back({"a5", is_zero(a5, box, opts), a5});
    rep.notes.emplace_back("convention", "C_2525 = " + std::to_string(kWeylA5Sign) + " * a5");
    rep.consistent = rep.zero("confined") && rep.zero("a5-slot");
    rep.verdict = !rep.consistent ? "pattern-violated" : rep.zero("a5") ? "conformally-flat" : "a5-only";
    return rep;
}

TranscriptionReport transcription_check(const Expr& F, const DomainBox& user, const ZeroTestOptions& opts) {
    require_q_only(F);
    DomainBox box = domain_for(F, user);
    const Chart tilde("tilde", {"e1", "e2", "e3", "e4", "e5"});
    auto d = q_derivatives(F);
    auto e = [&](int i) {
        std::vector<Expr> c(5, Expr(0));
        c[i] = Expr(1);
        return Form::one_form(tilde, c);
    };
    Expr c = pow(d[2], r(1, 3));
    Expr corr = r(1, 30) * (-Expr(3) * d[2] * d[4] + Expr(4) * d[3] * d[3]);
    std::vector<Form> th{e(0), e(1), -c * e(2),
                         pow(c, Expr(-1)) * (e(4) - r(1, 3) * d[3] * pow(d[2], Expr(-1)) * e(2) +
                                             corr * pow(d[2], Expr(-3)) * e(1)),
                         -(c * c) * e(3)};
    SymmetricForm frame = Expr(2) * SymmetricForm::product(th[0], th[4]) -
                          Expr(2) * SymmetricForm::product(th[1], th[3]) + r(4, 3) * SymmetricForm::product(th[2], th[2]);

    std::map<std::pair<int, int>, const MetricSlot*> printed;
    for (const auto& s : g32_table()) printed[{s.i, s.j}] = &s;
    auto table_entry = [&](int i, int j) -> Expr {
        auto it = printed.find({i, j});
        if (it == printed.end()) return Expr(0);
        Expr v = expand_atoms(it->second->text, F);
        return i == j ? v : r(1, 2) * v;
    };

    TranscriptionReport rep;
    rep.factor = table_entry(0, 3) / frame(0, 3);
    for (int i = 0; i < 5; ++i)
        for (int j = i; j < 5; ++j) {
            Expr res = table_entry(i, j) - rep.factor * frame(i, j);
            SlotComparison sc{i, j, is_zero(res, box, opts), {}};
            if (!sc.verdict.zero) {
                rep.ok = false;
                auto it = printed.find({i, j});
                if (it != printed.end() && sc.verdict.witness) {
                    Expr printed_expr = parse(it->second->text);
                    std::vector<Expr> terms =
                        printed_expr.kind() == Kind::Add ? printed_expr.args() : std::vector<Expr>{printed_expr};
                    for (const auto& t : terms) {
                        real v = eval_numeric(expand_atoms(to_string(t), F), sc.verdict.witness->point);
                        sc.monomials.emplace_back(to_string(t), i == j ? v : v / 2);
                    }
                }
            }
            rep.slots.push_back(std::move(sc));
        }
    return rep;
}

}  // namespace odegeom
