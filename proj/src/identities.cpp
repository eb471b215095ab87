#include "odegeom/curvature.hpp"
#include "odegeom/print.hpp"

#include <cmath>

namespace odegeom {

Expr identity_test_scale(const Chart& chart) {
    Expr s(0);
    for (std::size_t i = 0; i < chart.dim(); ++i) s += rational(1, 5 + static_cast<long long>(i)) * chart.coord(i);
    return s;
}

namespace {

std::vector<Tracked> bianchi_terms(const PointCurvature& c) {
    const std::size_t n = c.n;
    auto R = [&](std::size_t a, std::size_t b, std::size_t cc, std::size_t d) {
        return c.riemann[((a * n + b) * n + cc) * n + d];
    };
    std::vector<Tracked> out;
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b)
            for (std::size_t cc = 0; cc < n; ++cc)
                for (std::size_t d = 0; d < n; ++d) out.push_back(R(a, b, cc, d) + R(a, cc, d, b) + R(a, d, b, cc));
    return out;
}

std::vector<Tracked> weyl_traces(const PointCurvature& c) {
    const std::size_t n = c.n;
    std::vector<Tracked> out;
    for (std::size_t b = 0; b < n; ++b)
        for (std::size_t d = 0; d < n; ++d) {
            Tracked s{0, 0};
            for (std::size_t a = 0; a < n; ++a)
                for (std::size_t cc = 0; cc < n; ++cc)
                    s += c.ginv[a * n + cc] * c.weyl[((a * n + b) * n + cc) * n + d];
            out.push_back(s);
        }
    return out;
}

}  // namespace

InvariantReport curvature_identities(const MetricTensor& g, const DomainBox& user, const ZeroTestOptions& opts) {
    const std::size_t n = g.dim();
    const DomainBox box = g.box().merged(user);
    InvariantReport rep;
    rep.subject = "metric";
    rep.input = g.chart().name();
    PointwiseCurvature pc(g);
    rep.checks.push_back({"bianchi", pointwise_zero_test(pc, bianchi_terms, box, opts), std::nullopt});
    rep.checks.push_back(
        {"metric-compatible",
         pointwise_zero_test(pc, [](const PointCurvature& c) { return c.metric_derivative; }, box, opts), std::nullopt});
    const Expr ups = identity_test_scale(g.chart());
    rep.notes.emplace_back("test scale", to_string(ups));
    if (n >= 4) {
        rep.checks.push_back({"weyl-traceless", pointwise_zero_test(pc, weyl_traces, box, opts), std::nullopt});
        PointwiseCurvature scaled(conformal_rescale(g, ups));
        Program scale_at({exp(Expr(2) * ups)});
        auto f = [&](const Point& p) {
            auto a = pc.at(p), b = scaled.at(p);
            Tracked e2 = scale_at.run(p)[0];
            std::vector<Tracked> out(a.weyl.size());
            for (std::size_t i = 0; i < out.size(); ++i) out[i] = b.weyl[i] - e2 * a.weyl[i];
            return out;
        };
        rep.checks.push_back({"conformal-covariance", zero_test(f, scaled.symbols(), box, opts), std::nullopt});
    }
    if (n == 3) {
        auto C = cotton3(g);
        auto ginv = g.inverse();
        std::vector<Expr> traces;
        for (int k = 0; k < 3; ++k) {
            Expr s(0);
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j) s += ginv[i][j] * C({i, j, k});
            traces.push_back(s);
        }
        rep.checks.push_back({"cotton-traceless", is_zero(traces, box, opts), std::nullopt});
        auto Cs = cotton3(conformal_rescale(g, ups));
        std::vector<Expr> diff;
        for (std::size_t i = 0; i < C.components().size(); ++i) diff.push_back(Cs.components()[i] - C.components()[i]);
        rep.checks.push_back({"cotton-invariant", is_zero(diff, box, opts), std::nullopt});
    }
    bool ok = true;
    for (const auto& c : rep.checks) ok = ok && c.verdict.zero;
    rep.verdict = ok ? "identities-hold" : "identity-violated";
    rep.consistent = ok;
    return rep;
}

}  // namespace odegeom
