#include "odegeom/curvature.hpp"
#include "curvature_kernel.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>

namespace odegeom {

namespace {

using MatL = Eigen::Matrix<real, Eigen::Dynamic, Eigen::Dynamic>;

// numeric inverse of a tracked matrix; magnitudes follow |A^-1| m_A |A^-1|
std::vector<Tracked> tracked_inverse(const std::vector<Tracked>& a, std::size_t n) {
    MatL A(n, n), M(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            A(i, j) = a[i * n + j].value;
            M(i, j) = a[i * n + j].magnitude;
        }
    Eigen::FullPivLU<MatL> lu(A);
    if (!lu.isInvertible() || lu.rcond() < 1e-15L)
        throw EvalError(EvalError::Reason::Domain, "matrix numerically singular");
    MatL inv = lu.inverse();
    MatL absinv = inv.cwiseAbs();
    MatL mag = absinv * M * absinv;
    std::vector<Tracked> out(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            real v = inv(i, j);
            out[i * n + j] = {v, std::max(mag(i, j), std::fabs(v))};
        }
    return out;
}

std::vector<Expr> jet_roots(const MetricTensor& g) {
    const std::size_t n = g.dim();
    const auto& coords = g.chart().coords();
    std::vector<Expr> roots;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) {
            roots.push_back(g(i, j));
            for (std::size_t l = 0; l < n; ++l) {
                Expr d1 = differentiate(g(i, j), coords[l]);
                roots.push_back(d1);
                for (std::size_t m = l; m < n; ++m) roots.push_back(differentiate(d1, coords[m]));
            }
        }
    return roots;
}

}  // namespace

PointwiseCurvature::PointwiseCurvature(const MetricTensor& g) : n_(g.dim()), program_(jet_roots(g)) {}

PointwiseCurvature::PointwiseCurvature(const MetricTensor& g, const std::map<std::string, Expr>& jet_substitution)
    : n_(g.dim()), program_([&] {
          auto roots = jet_roots(g);
          for (auto& e : roots) e = substitute(e, jet_substitution);
          return roots;
      }()) {}

PointCurvature PointwiseCurvature::at(const Point& p) const {
    const std::size_t n = n_;
    auto vals = program_.run(p);
    detail::Jet<Tracked> J;
    J.n = n;
    J.g.resize(n * n);
    J.dg.resize(n * n * n);
    J.ddg.resize(n * n * n * n);
    std::size_t k = 0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) {
            J.g[i * n + j] = J.g[j * n + i] = vals[k++];
            for (std::size_t l = 0; l < n; ++l) {
                J.dg[(l * n + i) * n + j] = J.dg[(l * n + j) * n + i] = vals[k++];
                for (std::size_t m = l; m < n; ++m) {
                    const Tracked& v = vals[k++];
                    for (auto [a, b] : {std::pair{l, m}, std::pair{m, l}}) {
                        J.ddg[((a * n + b) * n + i) * n + j] = v;
                        J.ddg[((a * n + b) * n + j) * n + i] = v;
                    }
                }
            }
        }
    J.ginv = tracked_inverse(J.g, n);

    PointCurvature pc;
    pc.n = n;
    pc.g = J.g;
    pc.ginv = J.ginv;
    auto C = detail::levi_civita(J);
    pc.christoffel = C.gam;
    pc.riemann = detail::riemann_from(C);
    pc.riemann_lower = detail::lower_first(J, pc.riemann);
    pc.ricci = detail::ricci_from(n, pc.riemann);
    pc.scalar = detail::trace_with_inverse(J, pc.ricci);
    if (n >= 3) pc.schouten = detail::schouten_from(J, pc.ricci, pc.scalar);
    if (n >= 4) {
        pc.weyl = detail::weyl_from(J, pc.riemann_lower, pc.schouten);
        pc.weyl_square = detail::full_square(J, pc.weyl);
    }
    pc.metric_derivative = detail::metric_derivative(J, C);
    return pc;
}

ZeroVerdict pointwise_zero_test(const MetricTensor& g,
                                const std::function<std::vector<Tracked>(const PointCurvature&)>& select,
                                const DomainBox& box, const ZeroTestOptions& opts) {
    return pointwise_zero_test(PointwiseCurvature(g), select, g.box().merged(box), opts);
}

ZeroVerdict pointwise_zero_test(const PointwiseCurvature& pc,
                                const std::function<std::vector<Tracked>(const PointCurvature&)>& select,
                                const DomainBox& box, const ZeroTestOptions& opts) {
    return zero_test([&](const Point& p) { return select(pc.at(p)); }, pc.symbols(), box, opts);
}

std::vector<Tracked> frame_transform(const std::vector<Tracked>& lower, std::size_t n, int rank,
                                     const std::vector<Form>& coframe, const Point& p) {
    if (coframe.size() != n) throw std::invalid_argument("coframe size does not match dimension");
    std::vector<Expr> coeffs;
    for (const auto& w : coframe) {
        auto c = w.one_form_coeffs();
        coeffs.insert(coeffs.end(), c.begin(), c.end());
    }
    auto A = Program(coeffs).run(p);
    auto E = tracked_inverse(A, n);  // E[a][mu]
    std::vector<Tracked> cur = lower;
    for (int slot = 0; slot < rank; ++slot) {
        std::size_t stride = 1;
        for (int s = rank - 1; s > slot; --s) stride *= n;
        std::vector<Tracked> next(cur.size());
        for (std::size_t idx = 0; idx < cur.size(); ++idx) {
            std::size_t mu = (idx / stride) % n;
            std::size_t base = idx - mu * stride;
            Tracked s{0, 0};
            for (std::size_t a = 0; a < n; ++a) s += cur[base + a * stride] * E[a * n + mu];
            next[idx] = s;
        }
        cur = std::move(next);
    }
    return cur;
}

std::vector<std::vector<real>> evaluate_matrix(const Matrix& m, const Point& p) {
    std::vector<Expr> flat;
    for (const auto& row : m) flat.insert(flat.end(), row.begin(), row.end());
    auto vals = Program(flat).run(p);
    std::vector<std::vector<real>> out(m.size());
    std::size_t k = 0;
    for (std::size_t i = 0; i < m.size(); ++i)
        for (std::size_t j = 0; j < m[i].size(); ++j) out[i].push_back(vals[k++].value);
    return out;
}

Signature signature_of(const std::vector<std::vector<real>>& m, real rel_zero) {
    const auto n = static_cast<Eigen::Index>(m.size());
    MatL A(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) A(i, j) = (m[i][j] + m[j][i]) / 2;
    Eigen::SelfAdjointEigenSolver<MatL> es(A, Eigen::EigenvaluesOnly);
    const auto& ev = es.eigenvalues();
    real scale = n ? ev.cwiseAbs().maxCoeff() : 0;
    Signature s;
    for (Eigen::Index i = 0; i < n; ++i) {
        if (std::fabs(ev(i)) <= rel_zero * scale || scale == 0)
            ++s.zero;
        else if (ev(i) > 0)
            ++s.positive;
        else
            ++s.negative;
    }
    return s;
}

Signature signature_at(const MetricTensor& g, const Point& p, real rel_zero) {
    return signature_of(evaluate_matrix(g.matrix(), p), rel_zero);
}

}  // namespace odegeom
