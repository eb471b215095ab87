#include "CLI11.hpp"
#include "cli.hpp"
#include "odegeom/lie.hpp"
#include "odegeom/monge.hpp"
#include "odegeom/ode2.hpp"
#include "odegeom/ode3.hpp"
#include "odegeom/parse.hpp"
#include "odegeom/print.hpp"

#include <cmath>

namespace cli {

using namespace odegeom;

namespace {


Expr formula(const std::string& text) { return parse(text); }

void expect_verdict(Outcome& out, const std::string& expect) {
    if (expect.empty()) return;
    out.report["expected"] = expect;
    if (out.report.value("verdict", "") != expect) {
        out.pass = false;
        out.lines.push_back("expected " + expect);
    }
}

void add_check(Outcome& out, const std::string& name, const ZeroVerdict& v) {
    json cj = verdict_json(v);
    cj["name"] = name;
    if (!out.report.contains("checks")) out.report["checks"] = json::array();
    out.report["checks"].push_back(std::move(cj));
    out.lines.push_back(check_line(name, v));
}

json form_json(const Form& w) {
    json j = json::array();
    for (const auto& [idx, c] : w.terms()) {
        std::string slot;
        for (int i : idx) slot += (slot.empty() ? "" : "^") + std::string("d") + w.chart().coords()[i];
        j.push_back({{"slot", slot}, {"coefficient", to_string(c)}});
    }
    return j;
}

json metric_json(const Matrix& m, const Chart& chart) {
    json entries = json::array();
    for (std::size_t i = 0; i < m.size(); ++i)
        for (std::size_t j = i; j < m.size(); ++j)
            if (!m[i][j].is_zero()) entries.push_back({{"i", chart.coords()[i]}, {"j", chart.coords()[j]}, {"value", to_string(m[i][j])}});
    return {{"chart", chart.coords()}, {"entries", entries}};
}

std::vector<std::string> center_symbols(const Chart& chart, const Expr& f) {
    std::vector<std::string> syms = chart.coords();
    for (const auto& s : free_symbols(f))
        if (chart.index(s) < 0) syms.push_back(s);
    return syms;
}

Signature signature_at_center(const Matrix& m, const Chart& chart, const Expr& f, const DomainBox& box) {
    return signature_of(evaluate_matrix(m, box.center(center_symbols(chart, f))));
}

// signatures at the sample points of the run; `uniform` when they all agree
struct SampledSignature {
    Signature first;
    int points = 0;
    bool uniform = true;
    std::optional<Point> outlier;
};

SampledSignature sampled_signature(const Matrix& m, const Chart& chart, const Expr& f, const DomainBox& box,
                                   const RunConfig& cfg) {
    SampledSignature out;
    PointSampler sampler(box, center_symbols(chart, f), cfg.seed);
    for (int attempt = 0; out.points < cfg.samples && attempt < 2 * cfg.samples; ++attempt) {
        auto p = sampler.draw();
        if (!p) continue;
        Signature s;
        try {
            s = signature_of(evaluate_matrix(m, *p));
        } catch (const EvalError&) {
            continue;
        }
        if (out.points++ == 0)
            out.first = s;
        else if (!(s == out.first) && out.uniform) {
            out.uniform = false;
            out.outlier = *p;
        }
    }
    if (out.points < cfg.samples) throw BoxUnusable("box unusable for the metric signature");
    return out;
}

json sampled_json(const SampledSignature& s) {
    json j{{"signature", signature_json(s.first)}, {"points", s.points}, {"uniform", s.uniform}};
    if (s.outlier) j["outlier"] = point_json(*s.outlier);
    return j;
}

// ---- ode3 ----

Outcome ode3_invariants_cmd(const RunConfig&, const std::string& F) {
    Outcome out;
    Expr f = formula(F);
    auto I = ode3_invariants(f);
    out.report["inputs"] = {{"F", to_string(f)}};
    json r = json::object();
    auto put = [&](const std::string& k, const Expr& e) {
        r[k] = to_string(e);
        out.lines.push_back(k + " = " + to_string(e));
    };
    put("K", I.K);
    put("A", I.A);
    put("G", I.G);
    put("L", I.L);
    put("N", I.N);
    for (int i = 0; i < 5; ++i) put("C" + std::to_string(i + 1), I.C[i]);
    out.report["results"] = r;
    return out;
}

Outcome ode3_classify_cmd(const RunConfig& cfg, const std::string& F, const std::string& expect) {
    Outcome out;
    Expr f = formula(F);
    out.report["inputs"] = {{"F", to_string(f)}};
    merge_report(out, classify3({f, cfg.user_box()}, cfg.options()));
    expect_verdict(out, expect);
    return out;
}

Outcome ode3_metric_cmd(const RunConfig& cfg, const std::string& F) {
    Outcome out;
    Expr f = formula(F);
    DomainBox box = domain_for(f, cfg.user_box());
    out.report["inputs"] = {{"F", to_string(f)}};
    auto g = metric_tilde(f);
    auto sig = signature_at_center(g.matrix(), g.chart(), f, box);
    out.report["results"] = {{"metric", metric_json(g.matrix(), g.chart())}, {"signature", signature_json(sig)}};
    out.lines.push_back("signature at box center " + signature_text(sig));
    auto kernel = is_zero(g.contract(total_derivative(OdeClass::Third, f)), box, cfg.options());
    add_check(out, "kernel", kernel);
    out.report["verdict"] = kernel.zero ? "degenerate-along-total-derivative" : "kernel-violated";
    out.pass = kernel.zero;
    return out;
}

Outcome ode3_nu_cmd(const RunConfig& cfg, const std::string& F, const std::string& expect) {
    Outcome out;
    Expr f = formula(F);
    DomainBox box = domain_for(f, cfg.user_box());
    out.report["inputs"] = {{"F", to_string(f)}};
    auto nu = nu_tilde(f);
    out.report["results"] = {{"nu", form_json(nu)}};
    auto v = is_zero(nu_transport_curl(f), box, cfg.options());
    add_check(out, "nu-closed", v);
    out.report["verdict"] = v.zero ? "closed" : "not-closed";
    out.lines.insert(out.lines.begin(), "nu transport: " + out.report["verdict"].get<std::string>());
    expect_verdict(out, expect);
    return out;
}

// ---- dkp ----

Outcome dkp_residual_cmd(const RunConfig& cfg, const std::string& U, const std::string& expect) {
    Outcome out;
    Expr u = formula(U);
    DomainBox box = domain_for(u, cfg.user_box());
    out.report["inputs"] = {{"u", to_string(u)}};
    auto r = dkp_residual(u);
    out.report["results"] = {{"residual", to_string(r.scalar)},
                             {"frobenius1_factor", kFrobenius1Factor},
                             {"frobenius4_factor", kFrobenius4Factor}};
    out.lines.push_back("residual = " + to_string(r.scalar));
    auto v = is_zero(r.scalar, domain_for(r.scalar, box), cfg.options());
    add_check(out, "residual", v);
    auto [f1, f4] = dkp_factor_check(r, box, cfg.options());
    add_check(out, "frobenius1-factor", f1);
    add_check(out, "frobenius4-factor", f4);
    out.report["verdict"] = v.zero ? "solution" : "not-solution";
    out.report["consistent"] = f1.zero && f4.zero;
    if (!f1.zero || !f4.zero) out.pass = false;
    expect_verdict(out, expect);
    return out;
}

Outcome dkp_coframe_cmd(const RunConfig& cfg, const std::string& U, const std::string& X, const std::string& expect) {
    Outcome out;
    Expr u = formula(U);
    DomainBox box = domain_for(u, cfg.user_box());
    out.report["inputs"] = {{"u", to_string(u)}};
    auto cf = dkp_coframe(u, box, cfg.options());
    json forms = json::array();
    for (const auto& w : cf) forms.push_back(form_json(w));
    out.report["results"] = {{"coframe", forms}};
    out.lines.push_back("coframe of four 1-forms on (x, y, t, v)");
    if (!X.empty()) {
        Expr x = formula(X);
        out.report["inputs"]["X"] = to_string(x);
        auto v = is_zero(dkp_membership_form(cf, x), domain_for(x, box), cfg.options());
        add_check(out, "membership", v);
        out.report["verdict"] = v.zero ? "member" : "not-member";
        expect_verdict(out, expect);
    }
    return out;
}

// ---- ode2 ----

Outcome ode2_metric_cmd(const RunConfig& cfg, const std::string& Q) {
    Outcome out;
    Expr q = formula(Q);
    out.report["inputs"] = {{"Q", to_string(q)}};
    auto g = fefferman_metric({q, cfg.user_box()});
    auto sig = sampled_signature(g.matrix(), g.chart(), q, g.box(), cfg);
    out.report["results"] = {{"metric", metric_json(g.matrix(), g.chart())}, {"sampled", sampled_json(sig)}};
    out.lines.push_back("signature " + signature_text(sig.first) + " at " + std::to_string(sig.points) + " points" +
                        (sig.uniform ? "" : ", not uniform"));
    out.report["verdict"] = sig.uniform ? signature_text(sig.first) : "mixed";
    out.pass = sig.uniform && sig.first == Signature{2, 2, 0};
    return out;
}

Outcome ode2_invariants_cmd(const RunConfig&, const std::string& Q) {
    Outcome out;
    Expr q = formula(Q);
    out.report["inputs"] = {{"Q", to_string(q)}};
    auto w = ode2_invariants(q);
    out.report["results"] = {{"w1", to_string(w.w1)}, {"w2", to_string(w.w2)}};
    out.lines.push_back("w1 = " + to_string(w.w1));
    out.lines.push_back("w2 = " + to_string(w.w2));
    return out;
}

Outcome ode2_flatness_cmd(const RunConfig& cfg, const std::string& Q, const std::string& expect) {
    Outcome out;
    Expr q = formula(Q);
    out.report["inputs"] = {{"Q", to_string(q)}};
    merge_report(out, fefferman_flatness_check({q, cfg.user_box()}, cfg.options()));
    expect_verdict(out, expect);
    return out;
}

// ---- monge ----

Outcome monge_classify_cmd(const RunConfig& cfg, const std::string& F, const std::string& expect, bool second) {
    Outcome out;
    Expr f = formula(F);
    out.report["inputs"] = {{"F", to_string(f)}};
    merge_report(out, second ? classify_monge2({f, cfg.user_box()}, cfg.options())
                                  : classify_monge1({f, cfg.user_box()}, cfg.options()));
    expect_verdict(out, expect);
    return out;
}

Outcome monge_solution_cmd(const RunConfig& cfg, int example, const std::string& k_text, bool mutations) {
    Outcome out;
    OdeClass cls;
    Expr F;
    ParametrizedSolution sol;
    DomainBox box = cfg.user_box();
    if (example == 4) {
        cls = OdeClass::Monge1;
        F = parse("p^2");
        sol = example4_solution();
    } else {
        Rational k(static_cast<long long>(std::stoll(k_text)));
        if (k < 2) throw UsageError("--k must be an integer >= 2");
        cls = OdeClass::Monge2;
        F = pow(Expr::symbol("q"), Expr(k)) / Expr(k);
        sol = example5_solution(k);
        if (!box.has_range("t")) box.set("t", 0.1, 2);
    }
    out.report["inputs"] = {{"F", to_string(F)},
                            {"x", to_string(sol.x)},
                            {"y", to_string(sol.y)},
                            {"z", to_string(sol.z)}};
    auto v = verify_parametrized_solution(cls, F, sol, box, cfg.options());
    add_check(out, "residual", v);
    out.report["verdict"] = v.zero ? "verified" : "not-verified";
    out.lines.insert(out.lines.begin(), "solution: " + out.report["verdict"].get<std::string>());
    out.pass = v.zero;
    if (mutations) {
        int caught = 0, total = 0;
        for (const auto& m : coefficient_mutations(sol)) {
            ++total;
            try {
                if (!verify_parametrized_solution(cls, F, m, box, cfg.options()).zero) ++caught;
            } catch (const std::invalid_argument&) {
                ++caught;  // the mutation broke a precondition, so it is not a solution either
            }
        }
        out.report["results"] = {{"mutations", total}, {"mutations_rejected", caught}};
        out.lines.push_back("  mutations rejected: " + std::to_string(caught) + "/" + std::to_string(total));
        if (caught != total) out.pass = false;
    }
    return out;
}

Outcome monge_g32_cmd(const RunConfig& cfg, const std::string& F) {
    Outcome out;
    Expr f = formula(F);
    out.report["inputs"] = {{"F", to_string(f)}};
    auto g = g32_metric({f, cfg.user_box()}, cfg.options());
    auto sig = sampled_signature(g.matrix(), g.chart(), f, g.box(), cfg);
    out.report["results"] = {{"metric", metric_json(g.matrix(), g.chart())}, {"sampled", sampled_json(sig)}};
    out.lines.push_back("signature " + signature_text(sig.first) + " at " + std::to_string(sig.points) + " points" +
                        (sig.uniform ? "" : ", not uniform"));
    auto v = pointwise_zero_test(g, [](const PointCurvature& c) { return c.weyl; }, {}, cfg.options());
    add_check(out, "weyl", v);
    out.report["verdict"] = v.zero ? "conformally-flat" : "weyl-nonzero";
    bool sig_ok = sig.uniform && (sig.first == Signature{3, 2, 0} || sig.first == Signature{2, 3, 0});
    out.report["consistent"] = sig_ok;
    out.pass = sig_ok;
    return out;
}

DomainBox q_box(const RunConfig& cfg) {
    DomainBox b = cfg.user_box();
    if (!b.has_range("q")) b.set("q", 0.5, 2);
    return b;
}

Outcome example6_a5_cmd(const RunConfig&, const std::string& F, const std::string& expect) {
    Outcome out;
    Expr f = formula(F);
    out.report["inputs"] = {{"F", to_string(f)}};
    Expr a5 = example6_a5(f);
    out.report["results"] = {{"a5", to_string(a5)}};
    out.lines.push_back("a5 = " + to_string(a5));
    if (!expect.empty()) {
        Expr e = formula(expect);
        bool same = (a5 - e).is_zero();
        out.report["expected"] = to_string(e);
        out.report["verdict"] = same ? "matches" : "differs";
        out.pass = same;
        out.lines.push_back(same ? "matches the expected expression exactly" : "differs from " + to_string(e));
    }
    return out;
}

Outcome example6_einstein_cmd(const RunConfig& cfg, const std::string& F, bool mutated, const std::string& expect) {
    Outcome out;
    Expr f = formula(F);
    out.report["inputs"] = {{"F", to_string(f)}, {"mutated", mutated}};
    Expr ups2 = einstein_scale_relation(f, mutated);
    out.report["results"] = {{"Ups_2", to_string(ups2)}};
    out.lines.push_back("Ups_2 = " + to_string(ups2));
    auto v = einstein_scale_residual(f, ups2, q_box(cfg), cfg.options());
    add_check(out, "einstein", v);
    out.report["verdict"] = v.zero ? "einstein" : "not-einstein";
    expect_verdict(out, expect);
    return out;
}

Outcome example6_weyl_square_cmd(const RunConfig& cfg, const std::string& F) {
    Outcome out;
    Expr f = formula(F);
    out.report["inputs"] = {{"F", to_string(f)}};
    auto g = example6_metric(f, q_box(cfg));
    auto v = pointwise_zero_test(g, [](const PointCurvature& c) { return std::vector<Tracked>{c.weyl_square}; }, {},
                                 cfg.options());
    add_check(out, "weyl-square", v);
    out.report["verdict"] = v.zero ? "null-weyl-square" : "nonzero-weyl-square";
    return out;
}

Outcome example6_pattern_cmd(const RunConfig& cfg, const std::string& F, const std::string& expect) {
    Outcome out;
    Expr f = formula(F);
    out.report["inputs"] = {{"F", to_string(f)}};
    merge_report(out, weyl_frame_pattern_check(f, q_box(cfg), cfg.options()));
    expect_verdict(out, expect);
    return out;
}

Outcome example6_transcription_cmd(const RunConfig& cfg, const std::string& F) {
    Outcome out;
    Expr f = formula(F);
    out.report["inputs"] = {{"F", to_string(f)}};
    auto rep = transcription_check(f, q_box(cfg), cfg.options());
    json slots = json::array();
    out.lines.push_back("table = factor * frame construction, factor " + to_string(rep.factor));
    for (const auto& s : rep.slots) {
        json sj = verdict_json(s.verdict);
        sj["i"] = s.i + 1;
        sj["j"] = s.j + 1;
        json mons = json::array();
        for (const auto& [text, value] : s.monomials) mons.push_back({{"monomial", text}, {"value", number_json(value)}});
        sj["monomials"] = mons;
        slots.push_back(sj);
        if (!s.verdict.zero) {
            out.lines.push_back(check_line("slot " + std::to_string(s.i + 1) + std::to_string(s.j + 1), s.verdict));
            for (const auto& [text, value] : s.monomials)
                out.lines.push_back("    " + text + " = " + std::to_string(static_cast<double>(value)));
        }
    }
    out.report["results"] = {{"factor", to_string(rep.factor)}, {"slots", slots}};
    out.report["verdict"] = rep.ok ? "transcription-consistent" : "transcription-mismatch";
    out.lines.push_back(out.report["verdict"].get<std::string>());
    out.pass = rep.ok;
    return out;
}

// ---- lie ----

Outcome lie_verify_cmd(const std::string& system) {
    Outcome out;
    out.report["inputs"] = {{"system", system}};
    json r = json::object();
    auto table_part = [&](const StructureConstantTable& t, const std::string& prefix) {
        auto j = jacobi_check(t);
        auto k = killing_analysis(t);
        json jj{{"ok", j.ok}};
        if (!j.ok)
            jj["violation"] = {{"triple", {t.labels()[j.triple[0]], t.labels()[j.triple[1]], t.labels()[j.triple[2]]}},
                               {"component", t.labels()[j.component]},
                               {"value", j.value.str()}};
        r[prefix + "jacobi"] = jj;
        r[prefix + "killing"] = {{"rank", k.rank}, {"nondegenerate", k.nondegenerate}, {"signature", signature_json(k.signature)}};
        out.lines.push_back(prefix + "jacobi: " + (j.ok ? "holds" : "violated"));
        out.lines.push_back(prefix + "killing: rank " + std::to_string(k.rank) + ", signature " + signature_text(k.signature));
        if (!j.ok) out.pass = false;
    };
    if (system == "syspoint" || system == "g2-flat") {
        auto t = flat_structure_constants(system == "syspoint" ? FlatSystem::Syspoint : FlatSystem::G2);
        r["dimension"] = t.dim();
        table_part(t, "");
        auto bad = d_squared_failures(t);
        r["d_squared_zero"] = bad.empty();
        out.lines.push_back(std::string("d^2 on the basis: ") + (bad.empty() ? "zero" : "nonzero"));
        if (!bad.empty()) out.pass = false;
    } else {
        Connection c;
        if (system == "conpoint")
            c = Connection::Conpoint;
        else if (system == "caln")
            c = Connection::Caln;
        else if (system == "ccg2")
            c = Connection::Ccg2;
        else
            throw UsageError("unknown system " + system + "; expected syspoint, g2-flat, conpoint, caln or ccg2");
        auto b = matrix_rep(c);
        r["generators"] = b.generators.size();
        r["matrix_size"] = b.generators.front().rows();
        r["independent"] = linearly_independent(b);
        auto cl = commutator_closure_check(b);
        auto flat = flat_structure_constants(c == Connection::Ccg2 ? FlatSystem::G2 : FlatSystem::Syspoint);
        bool matches = cl.closed && same_bracket(cl.constants, flat);
        r["closure"] = {{"closed", cl.closed}, {"matches", to_string(c == Connection::Ccg2 ? FlatSystem::G2 : FlatSystem::Syspoint)},
                        {"equal_after_relabeling", matches}};
        out.lines.push_back(std::to_string(b.generators.size()) + " generators of size " + std::to_string(b.generators.front().rows()));
        out.lines.push_back(std::string("closure: ") + (cl.closed ? "closed" : "not closed") +
                            (matches ? ", brackets equal the flat table" : ", brackets differ from the flat table"));
        if (!matches) out.pass = false;
        if (cl.closed) table_part(cl.constants, "induced_");
        auto bf = invariant_bilinear_form(b);
        r["bilinear_form"] = {{"dimension", bf.solutions.size()}, {"signature", signature_json(bf.signature)}};
        out.lines.push_back("invariant symmetric forms: dimension " + std::to_string(bf.solutions.size()) +
                            (bf.generic ? ", signature " + signature_text(bf.signature) : ""));
        if (b.generators.front().rows() == 7) {
            auto tf = invariant_three_form(b);
            bool prop = tf.induced && bf.solutions.size() == 1 && proportional(*tf.induced, bf.solutions[0]);
            json phi = json::array();
            if (!tf.solutions.empty())
                for (const auto& x : tf.solutions[0]) phi.push_back(x.str());
            r["three_form"] = {{"dimension", tf.solutions.size()},
                               {"generic", tf.generic},
                               {"proportional_to_bilinear", prop},
                               {"coefficients", phi}};
            out.lines.push_back("invariant 3-forms: dimension " + std::to_string(tf.solutions.size()) +
                                (tf.generic ? ", generic" : ""));
        }
    }
    out.report["results"] = r;
    out.report["verdict"] = out.pass ? "consistent" : "inconsistent";
    return out;
}


Outcome example6_value_cmd(const RunConfig& cfg, const std::string& F, double at_q, const std::string& expect) {
    Outcome out;
    Expr f = formula(F);
    out.report["inputs"] = {{"F", to_string(f)}, {"q", at_q}};
    Point p;
    const Chart chart = Chart::monge2();
    for (const auto& c : chart.coords()) p[c] = 0;
    p["q"] = at_q;
    const auto C = example6_frame_weyl(f, p);
    const Tracked v = C[1 * 125 + 4 * 25 + 1 * 5 + 4];
    out.report["results"] = {{"C2525", number_json(v.value)}};
    out.lines.push_back("C_2525 at q = " + std::to_string(at_q) + ": " + std::to_string(static_cast<double>(v.value)));
    if (!expect.empty()) {
        const real want = std::stold(expect);
        const bool ok = std::fabs(v.value - want) <= static_cast<real>(cfg.tol) * (1 + std::fabs(want)) + 1e-12L * v.magnitude;
        out.report["expected"] = expect;
        out.report["verdict"] = ok ? "matches" : "differs";
        out.pass = ok;
    }
    return out;
}

Outcome identities_cmd(const RunConfig& cfg, const std::string& which, const std::string& F) {
    Outcome out;
    Expr f = formula(F);
    out.report["inputs"] = {{"metric", which}, {"F", to_string(f)}};
    auto run = [&](const MetricTensor& g) { merge_report(out, curvature_identities(g, g.box(), cfg.options())); };
    if (which == "fefferman")
        run(fefferman_metric({f, cfg.user_box()}));
    else if (which == "g32")
        run(g32_metric({f, cfg.user_box()}, cfg.options()));
    else if (which == "example6")
        run(example6_metric(f, q_box(cfg)));
    else
        throw UsageError("unknown metric " + which + "; expected fefferman, g32 or example6");
    out.pass = out.report.value("verdict", "") == "identities-hold";
    return out;
}

}  // namespace

CommandSet::CommandSet() : app_("Invariants of ODEs under point and contact transformations, checked by randomized zero tests") {
    app_.name("odegeom");
    app_.require_subcommand(1);
    app_.fallthrough();

    auto leaf = [this](CLI::App* parent, const std::string& name, const std::string& help,
                       std::function<Outcome(const RunConfig&)> run) {
        auto* s = parent->add_subcommand(name, help);
        leaves_.emplace_back(s, std::move(run));
        return s;
    };
    auto with_F = [this](CLI::App* s) { s->add_option("--F", F_, "defining function")->required(); };
    auto with_expect = [this](CLI::App* s) { s->add_option("--expect", expect_, "expected verdict; mismatch exits 1"); };

    auto* ode3 = app_.add_subcommand("ode3", "third-order ODEs y''' = F(x, y, p, q)");
    ode3->require_subcommand(1);
    with_F(leaf(ode3, "invariants", "K, A, G, L, N and the Cotton components",
                [this](const RunConfig& c) { return ode3_invariants_cmd(c, F_); }));
    auto* c3 = leaf(ode3, "classify", "generic, wuenschmann or einstein-weyl",
                    [this](const RunConfig& c) { return ode3_classify_cmd(c, F_, expect_); });
    with_F(c3);
    with_expect(c3);
    with_F(leaf(ode3, "metric", "the degenerate metric on J2", [this](const RunConfig& c) { return ode3_metric_cmd(c, F_); }));
    auto* n3 = leaf(ode3, "nu", "Weyl 1-form and its transport", [this](const RunConfig& c) { return ode3_nu_cmd(c, F_, expect_); });
    with_F(n3);
    with_expect(n3);

    auto* dkp = app_.add_subcommand("dkp", "dispersionless KP bridge");
    dkp->require_subcommand(1);
    auto* dr = leaf(dkp, "residual", "dKP residual and Frobenius factors",
                    [this](const RunConfig& c) { return dkp_residual_cmd(c, U_, expect_); });
    dr->alias("check");
    dr->add_option("--u", U_, "u(x, y, t)")->required();
    with_expect(dr);
    auto* dc = leaf(dkp, "coframe", "coframe of a solution; optional membership test of dX",
                    [this](const RunConfig& c) { return dkp_coframe_cmd(c, U_, X_, expect_); });
    dc->add_option("--u", U_, "u(x, y, t)")->required();
    dc->add_option("--X", X_, "function whose differential is tested");
    with_expect(dc);

    auto* ode2 = app_.add_subcommand("ode2", "second-order ODEs y'' = Q(x, y, p)");
    ode2->require_subcommand(1);
    leaf(ode2, "metric", "split-signature metric on (x, y, p, phi)", [this](const RunConfig& c) { return ode2_metric_cmd(c, Q_); })
        ->add_option("--Q", Q_, "right-hand side")
        ->required();
    leaf(ode2, "invariants", "w1 and w2", [this](const RunConfig& c) { return ode2_invariants_cmd(c, Q_); })
        ->add_option("--Q", Q_, "right-hand side")
        ->required();
    auto* f2 = leaf(ode2, "flatness", "Weyl tensor against w1, w2",
                    [this](const RunConfig& c) { return ode2_flatness_cmd(c, Q_, expect_); });
    f2->add_option("--Q", Q_, "right-hand side")->required();
    with_expect(f2);

    auto* monge = app_.add_subcommand("monge", "Monge equations z' = F");
    monge->require_subcommand(1);
    auto* m1 = leaf(monge, "classify1", "z' = F(x, y, p, z)",
                    [this](const RunConfig& c) { return monge_classify_cmd(c, F_, expect_, false); });
    with_F(m1);
    with_expect(m1);
    auto* m2 = leaf(monge, "classify2", "z' = F(x, y, p, q, z)",
                    [this](const RunConfig& c) { return monge_classify_cmd(c, F_, expect_, true); });
    with_F(m2);
    with_expect(m2);
    auto* vs = leaf(monge, "verify-solution", "integral-free parametrized solutions",
                    [this](const RunConfig& c) { return monge_solution_cmd(c, example_, k_text_, mutations_); });
    vs->add_option("--example", example_, "4: z' = (y')^2, 5: z' = (y'')^k / k")->check(CLI::IsMember({4, 5}));
    vs->add_option("--k", k_text_, "exponent for example 5");
    vs->add_flag("--mutations", mutations_, "also check that +1 coefficient mutations fail");
    with_F(leaf(monge, "g32", "conformal (3,2) metric and its Weyl tensor", [this](const RunConfig& c) { return monge_g32_cmd(c, F_); }));
    auto* e6 = monge->add_subcommand("example6", "F = F(q) family");
    e6->require_subcommand(1);
    auto* a5 = leaf(e6, "a5", "the surviving Weyl scalar", [this](const RunConfig& c) { return example6_a5_cmd(c, F_, expect_); });
    with_F(a5);
    a5->add_option("--expect", expect_, "expected expression, compared exactly");
    auto* ein = leaf(e6, "einstein", "Einstein scale residual",
                     [this](const RunConfig& c) { return example6_einstein_cmd(c, F_, mutated_, expect_); });
    with_F(ein);
    ein->add_flag("--mutated", mutated_, "drop the F'' F'''' term of the scale relation");
    with_expect(ein);
    auto* wp = leaf(e6, "weyl-pattern", "frame Weyl components",
                    [this](const RunConfig& c) { return example6_pattern_cmd(c, F_, expect_); });
    with_F(wp);
    with_expect(wp);
    auto* wv = leaf(e6, "weyl-value", "frame component C_2525 at a point",
                    [this](const RunConfig& c) { return example6_value_cmd(c, F_, at_q_, expect_); });
    with_F(wv);
    wv->add_option("--q", at_q_, "value of q");
    wv->add_option("--expect", expect_, "expected value, compared at the run tolerance");
    with_F(leaf(e6, "weyl-square", "square of the Weyl tensor", [this](const RunConfig& c) { return example6_weyl_square_cmd(c, F_); }));
    with_F(leaf(e6, "transcription", "printed (3,2) metric against the frame construction",
                [this](const RunConfig& c) { return example6_transcription_cmd(c, F_); }));

    auto* lie = app_.add_subcommand("lie", "exact Lie-algebra checks");
    lie->require_subcommand(1);
    leaf(lie, "verify", "syspoint, g2-flat, conpoint, caln or ccg2", [this](const RunConfig&) { return lie_verify_cmd(system_); })
        ->add_option("system", system_, "system name")
        ->required();

    auto* ids = leaf(&app_, "identities", "Bianchi, compatibility and conformal identities of a constructed metric",
                     [this](const RunConfig& c) { return identities_cmd(c, system_, F_); });
    ids->add_option("metric", system_, "fefferman (with --F as Q), g32 or example6")->required();
    with_F(ids);

    auto* verify = app_.add_subcommand("verify", "catalog runs");
    verify->require_subcommand(1);
    leaf(verify, "paper", "every catalog claim", [this](const RunConfig& c) { return run_verify_paper(c, catalog_); })
        ->add_option("--catalog", catalog_, "catalog file");
}

const CLI::App* CommandSet::chosen() const {
    for (const auto& [sub, run] : leaves_)
        if (sub->parsed()) return sub;
    return nullptr;
}

std::string CommandSet::command() const {
    std::string path;
    for (const CLI::App* s = chosen(); s && s != &app_; s = s->get_parent())
        path = s->get_name() + (path.empty() ? "" : " " + path);
    return path;
}

Outcome CommandSet::run(const RunConfig& cfg) {
    for (auto& [sub, run] : leaves_)
        if (sub->parsed()) return run(cfg);
    throw UsageError("no command given");
}

}  // namespace cli
