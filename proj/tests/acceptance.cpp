// Acceptance criteria, one PASS/FAIL line each.
#include "odegeom/lie.hpp"
#include "odegeom/monge.hpp"
#include "odegeom/ode2.hpp"
#include "odegeom/ode3.hpp"
#include "odegeom/parse.hpp"
#include "odegeom/print.hpp"

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

using namespace odegeom;

namespace {

class Log {
public:
    void fail(const std::string& what) { failures_.push_back(what); }
    void expect(bool ok, const std::string& what) {
        if (!ok) fail(what);
    }
    void zero(const ZeroVerdict& v, const std::string& what) {
        if (!v.zero) fail(what + ": " + describe(v));
    }
    void nonzero(const ZeroVerdict& v, const std::string& what) {
        if (v.zero || !v.witness) fail(what + ": expected a witness, got " + describe(v));
    }
    const std::vector<std::string>& failures() const { return failures_; }

private:
    std::vector<std::string> failures_;
};

ZeroTestOptions at_tol(real tol) {
    ZeroTestOptions o;
    o.tol = tol;
    return o;
}

DomainBox box(std::vector<std::string> specs) { return DomainBox::from_specs(specs); }

struct Ode3Fixture {
    std::string name, F;
    std::vector<std::string> box;
    bool a_zero, g_zero;
};

const char* kExample1 = "alpha*(q^2+(1-p^2)^2)^(3/2)/(1-p^2)^(3/2) - 3*p*q^2/(1-p^2) - p*(1-p^2)";
const char* kSqrtFamily = "(sqrt(2*q*y - p^2))^3/y^2";
const char* kDkpReduction = "(p*q*(-12 + 3*p*q - 8*sqrt(1 - p*q)) + 8*(1 + sqrt(1 - p*q)))/p^3";

std::vector<Ode3Fixture> ode3_catalog() {
    return {
        {"zero", "0", {}, true, true},
        {"q^(3/2)", "q^(3/2)", {"q:0.1:10"}, true, true},
        {"sqrt family a=1", kSqrtFamily, {"y:0.5:2", "q:0.5:2", "p:-0.5:0.5"}, true, true},
        {"example 1 alpha=1", kExample1, {"p:-0.9:0.9", "q:-1:1", "alpha:1:1"}, true, false},
        {"dKP reduction", kDkpReduction, {"p:0.2:0.9"}, true, true},
        {"q^3", "q^3", {}, true, false},
        {"q^2", "q^2", {}, false, true},
    };
}

void wuenschmann_suite(Log& log) {
    for (const char* a : {"0.5", "1", "2"}) {
        const Expr F = parse(kExample1);
        const auto b = domain_for(F, box({"p:-0.9:0.9", "q:-1:1", std::string("alpha:") + a + ":" + a}));
        log.zero(is_zero(ode3_invariants(F).A, b), std::string("A, example 1, alpha=") + a);
    }
    for (const auto& f : ode3_catalog()) {
        if (f.name == "zero" || f.name == "q^3" || f.name == "q^2" || f.name.rfind("example", 0) == 0) continue;
        const Expr F = parse(f.F);
        log.zero(is_zero(ode3_invariants(F).A, domain_for(F, box(f.box))), "A, " + f.name);
    }
    const auto rep = classify3({parse("q^2"), {}});
    const auto* A = rep.find("A");
    if (!A || A->verdict.zero || !A->verdict.witness) {
        log.fail("A for q^2 should be nonzero with a witness");
        return;
    }
    const auto& w = *A->verdict.witness;
    const real q = w.point.at("q");
    const real expected = -2.0L / 27 * q * q * q;
    log.expect(std::fabs(w.value - expected) <= 1e-9L * std::fabs(expected), "q^2 witness value off -(2/27) q^3");
}

void cartan_suite(Log& log) {
    for (const auto& f : ode3_catalog()) {
        if (f.name != "q^(3/2)" && f.name != "sqrt family a=1" && f.name != "dKP reduction") continue;
        const Expr F = parse(f.F);
        log.zero(is_zero(ode3_invariants(F).G, domain_for(F, box(f.box))), "G, " + f.name);
        const auto rep = classify3({F, box(f.box)});
        log.expect(ode3_class(rep) == Ode3Class::EinsteinWeyl, f.name + " classified " + rep.verdict);
    }
}

void transport_suite(Log& log) {
    for (const auto& f : ode3_catalog()) {
        const Expr F = parse(f.F);
        const auto b = domain_for(F, box(f.box));
        const auto tr = conformal_transport_factor(total_derivative(OdeClass::Third, F), metric_tilde(F), b);
        log.expect(tr.success == f.a_zero, "transport " + std::string(tr.success ? "succeeds" : "fails") + " on " + f.name);
        const auto curl = is_zero(nu_transport_curl(F), b);
        log.expect(curl.zero == f.g_zero, "d(L nu) " + std::string(curl.zero ? "vanishes" : "survives") + " on " + f.name);
        if (f.name == "q^3") log.nonzero(curl, "d(L nu) for q^3");
    }
}

std::string random_cubic(unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_int_distribution<int> coeff(-5, 5);
    std::ostringstream s;
    s << "0";
    for (int i = 0; i <= 3; ++i)
        for (int j = 0; i + j <= 3; ++j)
            for (int k = 0; i + j + k <= 3; ++k) {
                const int c = coeff(rng);
                if (c != 0) s << " + (" << c << ")*x^" << i << "*y^" << j << "*t^" << k;
            }
    return s.str();
}

void dkp_suite(Log& log) {
    const auto b = box({"x:0.1:2"});
    log.zero(is_zero(dkp_residual(parse("sqrt(2*x)")).scalar, b), "dKP residual of sqrt(2x)");
    const auto cf = dkp_coframe(parse("sqrt(2*x)"), b);
    log.zero(is_zero(dkp_membership_form(cf, parse("t+v^2/2+sqrt(2*x)")), b), "membership of t+v^2/2+sqrt(2x)");
    log.nonzero(is_zero(dkp_membership_form(cf, parse("t")), b), "membership control X=t");
    for (unsigned seed : {1u, 2u, 3u}) {
        const std::string u = random_cubic(seed);
        const auto r = dkp_residual(parse(u));
        const auto [f1, f4] = dkp_factor_check(r);
        log.zero(f1, "first 4-form factor for " + u);
        log.zero(f4, "second 4-form factor for " + u);
        log.expect(!is_zero(r.scalar).zero, "random cubic should not solve dKP: " + u);
    }
}

DomainBox fefferman_box() { return box({"x:-1:1", "y:-1:1", "p:-1:1", "phi:-1:1"}); }

void fefferman_suite(Log& log) {
    for (const char* q : {"0", "y", "p^2", "p^3", "p^4"}) {
        const Expr Q = parse(q);
        const auto g = fefferman_metric({Q, {}});
        const auto b = fefferman_box();
        PointSampler sampler(b, g.chart().coords(), 0);
        for (int i = 0; i < 20; ++i) {
            const auto pt = sampler.draw();
            if (!pt || !(signature_at(g, *pt) == Signature{2, 2, 0}))
                log.fail(std::string("signature not (2,2) for Q=") + q);
        }
        const auto rep = fefferman_flatness_check({Q, b});
        const bool w_zero = rep.zero("w1") && rep.zero("w2");
        log.expect(rep.zero("weyl") == w_zero, std::string("Weyl vs w1,w2 disagree for Q=") + q);
        log.expect(rep.consistent, std::string("flatness report inconsistent for Q=") + q);
    }
    const auto inv = ode2_invariants(parse("p^4"));
    log.expect(inv.w1 == parse("24*p^8"), "w1(p^4) = " + to_string(inv.w1));
    log.expect(inv.w2 == Expr(24), "w2(p^4) = " + to_string(inv.w2));
}

DomainBox curve_box() {
    DomainBox b = box({"t:0.5:2"});
    for (int k = 0; k <= 5; ++k) b.set("w_" + std::to_string(k), 0.5, 2);
    return b;
}

void monge1_suite(Log& log) {
    const std::vector<std::pair<const char*, const char*>> branches{
        {"z", "branch-cc2"}, {"y", "branch-cc1"}, {"p^2", "branch-cc1"}};
    for (const auto& [f, v] : branches) {
        const auto rep = classify_monge1({parse(f), {}});
        log.expect(rep.verdict == v, std::string("F=") + f + " gave " + rep.verdict);
    }
    const Expr sq = parse("p^2");
    log.zero(verify_parametrized_solution(OdeClass::Monge1, sq, example4_solution(), curve_box()), "example 4 solution");
    const auto m4 = coefficient_mutations(example4_solution());
    log.expect(!m4.empty(), "no mutations of example 4");
    for (const auto& m : m4)
        log.nonzero(verify_parametrized_solution(OdeClass::Monge1, sq, m, curve_box()),
                    "example 4 mutation " + to_string(m.x) + " | " + to_string(m.y) + " | " + to_string(m.z));
    const auto s5 = example5_solution(3);
    const Expr cube = parse("q^3/3");
    log.expect(contains_integral(s5.y), "example 5 solution should carry an antiderivative");
    log.expect(!contains_integral(parametrized_residual(OdeClass::Monge2, cube, s5)), "antiderivative survives");
    log.zero(verify_parametrized_solution(OdeClass::Monge2, cube, s5, curve_box()), "example 5 solution, k=3");
}

std::vector<Tracked> weyl_of(const PointCurvature& c) { return c.weyl; }

void flat_model_suite(Log& log) {
    const auto g = g32_metric({parse("q^2"), {}});
    const auto v = pointwise_zero_test(g, weyl_of, {}, at_tol(1e-8L));
    log.zero(v, "Weyl of G32 for q^2");
    log.expect(v.samples == 20, "expected 20 samples");
    log.expect(example6_a5(parse("q^2")).is_zero(), "a5(q^2) not zero");
}

void example6_suite(Log& log) {
    const Expr F = parse("q^3/6");
    const auto qb = box({"q:0.5:2"});
    log.expect(example6_a5(F) == parse("-(56/25)*q^(-20/3)"), "a5 = " + to_string(example6_a5(F)));
    const auto g = example6_metric(F, qb);
    log.zero(pointwise_zero_test(g, [](const PointCurvature& c) { return std::vector<Tracked>{c.weyl_square}; }, qb),
             "weyl square");
    log.expect(psi_invariant({Expr(0), Expr(0), Expr(0), Expr(0), example6_a5(F)}).is_zero(), "I_Psi not zero");
    DomainBox ub = qb;
    ub.set("Ups_0", -1, 1).set("Ups_1", -1, 1);
    log.zero(einstein_scale_residual(F, einstein_scale_relation(F), ub), "Einstein-scale residual");
    const auto rep = weyl_frame_pattern_check(F, qb);
    log.expect(rep.verdict == "a5-only", "frame pattern verdict " + rep.verdict);
    for (const auto& c : rep.checks)
        if (c.name != "a5") log.zero(c.verdict, "frame pattern " + c.name);
    const auto C = example6_frame_weyl(F, {{"x", 0.3}, {"y", -0.2}, {"p", 0.1}, {"q", 1}, {"z", 0.4}});
    const real c2525 = C[1 * 125 + 4 * 25 + 1 * 5 + 4].value;
    log.expect(std::fabs(c2525 - 2.24L) <= 1e-9L * 2.24L, "C_2525 at q=1 is " + std::to_string(static_cast<double>(c2525)));
}

void transcription_suite(Log& log) {
    for (const char* f : {"q^3/6", "exp(q)", "q^(5/2)", "q^4"}) {
        const auto rep = transcription_check(parse(f), box({"q:0.5:2"}), at_tol(1e-8L));
        for (const auto& s : rep.slots) {
            if (s.verdict.zero) continue;
            std::string line = std::string("F=") + f + " slot (" + std::to_string(s.i + 1) + "," + std::to_string(s.j + 1) + ")";
            for (const auto& [m, v] : s.monomials) line += "; " + m + " = " + std::to_string(static_cast<double>(v));
            log.fail(line);
        }
        log.expect(rep.ok, std::string("transcription report not ok for F=") + f);
    }
}

bool either_sign(const Signature& s, int p, int q) {
    return s.zero == 0 && ((s.positive == p && s.negative == q) || (s.positive == q && s.negative == p));
}

void lie_suite(Log& log) {
    for (auto s : {FlatSystem::Syspoint, FlatSystem::G2})
        log.expect(jacobi_check(flat_structure_constants(s)).ok, "Jacobi fails for " + to_string(s));
    const auto g2 = flat_structure_constants(FlatSystem::G2);
    const auto ccg2 = matrix_rep(Connection::Ccg2);
    const auto closure = commutator_closure_check(ccg2);
    log.expect(closure.closed, "ccg2 basis does not close");
    log.expect(closure.closed && same_bracket(closure.constants, g2), "ccg2 bracket differs from the flat table");
    const auto k = killing_analysis(g2);
    log.expect(k.nondegenerate, "Killing form of the 14-dim algebra is degenerate");
    log.expect(k.signature == Signature{8, 6, 0}, "Killing signature differs from the oracle (8,6,0)");
    const auto b = invariant_bilinear_form(ccg2);
    log.expect(b.solutions.size() == 1, "ccg2 invariant bilinear form is not unique up to scale");
    log.expect(either_sign(b.signature, 4, 3), "ccg2 bilinear form signature is not (4,3)");
    const auto phi = invariant_three_form(ccg2);
    log.expect(!phi.solutions.empty() && phi.generic, "no generic invariant 3-form for ccg2");
    const auto caln = invariant_bilinear_form(matrix_rep(Connection::Caln));
    log.expect(caln.signature == Signature{4, 4, 0}, "caln invariant form is not of signature (4,4)");
}

std::string run_cli(const std::string& args, int& code) {
    const std::string cmd = std::string("'") + ODEGEOM_CLI_PATH + "' " + args + " 2>&1";
    FILE* pipe = popen(cmd.c_str(), "r");
    std::string out;
    if (!pipe) {
        code = -1;
        return out;
    }
    char buf[4096];
    std::size_t n;
    while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) out.append(buf, n);
    const int status = pclose(pipe);
    code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return out;
}

void identities_of(Log& log, const std::string& name, const MetricTensor& g, const DomainBox& b, real tol = 1e-9L) {
    const auto rep = curvature_identities(g, b, at_tol(tol));
    for (const auto& c : rep.checks) log.zero(c.verdict, name + " " + c.name);
}

void infrastructure_suite(Log& log) {
    for (auto cls : {OdeClass::Third, OdeClass::Second, OdeClass::Monge1, OdeClass::Monge2}) {
        const Expr f = cls == OdeClass::Second ? parse("p^4") : cls == OdeClass::Monge1 ? parse("p^2") : parse("q^3");
        for (const auto& w : contact_forms(cls, f)) log.zero(is_zero(d(d(w))), "d^2 on a contact form");
    }
    for (const auto& w : dkp_coframe(parse("sqrt(2*x)"), box({"x:0.1:2"})))
        log.zero(is_zero(d(d(w)), box({"x:0.1:2"})), "d^2 on the dKP coframe");
    for (auto s : {FlatSystem::Syspoint, FlatSystem::G2})
        log.expect(d_squared_failures(flat_structure_constants(s)).empty(), "left-invariant d^2 fails for " + to_string(s));

    for (const char* q : {"0", "y", "p^2", "p^3", "p^4"})
        identities_of(log, std::string("Fefferman Q=") + q, fefferman_metric({parse(q), {}}), fefferman_box());
    identities_of(log, "G32 q^2", g32_metric({parse("q^2"), {}}), {});
    const Expr F = parse("q^3/6");
    const auto qb = box({"q:0.5:2"});
    identities_of(log, "Example 6 metric", example6_metric(F, qb), qb);
    identities_of(log, "Example 6 frame metric", frame_metric(example6_coframe(F), qb), qb);

    std::vector<nlohmann::json> runs;
    for (const char* seed : {"0", "1", "2"}) {
        int code = 0;
        const std::string out = run_cli(std::string("--json --seed ") + seed + " verify paper", code);
        log.expect(code == 0, std::string("verify paper exits ") + std::to_string(code) + " at seed " + seed);
        try {
            const auto j = nlohmann::json::parse(out);
            nlohmann::json v = nlohmann::json::array();
            for (const auto& c : j["results"]["claims"]) v.push_back({c["id"], c["verdict"], c["pass"]});
            runs.push_back(v);
        } catch (const std::exception& e) {
            log.fail(std::string("verify paper output is not JSON: ") + e.what());
            return;
        }
    }
    log.expect(runs[0] == runs[1] && runs[0] == runs[2], "verify paper verdicts depend on the seed");
}

struct Criterion {
    int id;
    const char* title;
    std::function<void(Log&)> run;
};

}  // namespace

int main() {
    const std::vector<Criterion> criteria{
        {1, "Wuenschmann suite", wuenschmann_suite},
        {2, "Cartan-condition suite", cartan_suite},
        {3, "transport equivalences", transport_suite},
        {4, "dKP bridge", dkp_suite},
        {5, "Fefferman suite", fefferman_suite},
        {6, "first-order Monge suite", monge1_suite},
        {7, "G2/Hilbert flat model", flat_model_suite},
        {8, "Example 6 suite", example6_suite},
        {9, "transcription integrity", transcription_suite},
        {10, "Lie-algebra suite", lie_suite},
        {11, "infrastructure", infrastructure_suite},
    };
    int failed = 0;
    for (const auto& c : criteria) {
        Log log;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            c.run(log);
        } catch (const std::exception& e) {
            log.fail(std::string("exception: ") + e.what());
        }
        const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const bool ok = log.failures().empty();
        failed += ok ? 0 : 1;
        std::printf("%s criterion %2d: %s (%.1f s)\n", ok ? "PASS" : "FAIL", c.id, c.title, s);
        for (const auto& f : log.failures()) std::printf("     %s\n", f.c_str());
        std::fflush(stdout);
    }
    std::printf("%zu/%zu criteria pass\n", criteria.size() - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
