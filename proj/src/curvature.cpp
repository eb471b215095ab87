#include "odegeom/curvature.hpp"
#include "curvature_kernel.hpp"

#include <stdexcept>

namespace odegeom {

namespace {

using detail::Jet;

Expr det_minor(const Matrix& m, std::size_t row, unsigned mask, std::vector<std::vector<std::optional<Expr>>>& memo,
               const std::vector<std::size_t>& rows) {
    if (mask == 0) return Expr(1);
    auto& slot = memo[row][mask];
    if (slot) return *slot;
    std::vector<Expr> terms;
    int pos = 0;
    for (std::size_t c = 0; c < m.size(); ++c) {
        if (!(mask & (1u << c))) continue;
        const Expr& a = m[rows[row]][c];
        if (!a.is_zero()) {
            Expr sub = det_minor(m, row + 1, mask & ~(1u << c), memo, rows);
            if (!sub.is_zero()) terms.push_back(pos % 2 ? -(a * sub) : a * sub);
        }
        ++pos;
    }
    slot = add(std::move(terms));
    return *slot;
}

// determinant of m with row `skip_row` and column `skip_col` removed (none when >= n)
Expr determinant_of(const Matrix& m, std::size_t skip_row, std::size_t skip_col) {
    std::size_t n = m.size();
    std::vector<std::size_t> rows;
    for (std::size_t r = 0; r < n; ++r)
        if (r != skip_row) rows.push_back(r);
    unsigned mask = 0;
    for (std::size_t c = 0; c < n; ++c)
        if (c != skip_col) mask |= 1u << c;
    std::vector<std::vector<std::optional<Expr>>> memo(rows.size() + 1, std::vector<std::optional<Expr>>(1u << n));
    return det_minor(m, 0, mask, memo, rows);
}

Matrix symbolic_inverse(const Matrix& m) {
    std::size_t n = m.size();
    Expr det = determinant_of(m, n, n);
    if (det.is_zero()) throw std::domain_error("singular matrix");
    Expr inv = pow(det, Expr(-1));
    Matrix out(n, std::vector<Expr>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            Expr cof = determinant_of(m, j, i);
            out[i][j] = (i + j) % 2 ? -(cof * inv) : cof * inv;
        }
    return out;
}

Jet<Expr> symbolic_jet(const MetricTensor& g) {
    const std::size_t n = g.dim();
    const auto& coords = g.chart().coords();
    Jet<Expr> J;
    J.n = n;
    J.g.resize(n * n);
    J.ginv.resize(n * n);
    J.dg.resize(n * n * n);
    J.ddg.resize(n * n * n * n);
    Matrix inv = g.inverse();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            J.g[i * n + j] = g(i, j);
            J.ginv[i * n + j] = inv[i][j];
        }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j)
            for (std::size_t l = 0; l < n; ++l) {
                Expr d1 = differentiate(g(i, j), coords[l]);
                J.dg[(l * n + i) * n + j] = J.dg[(l * n + j) * n + i] = d1;
                for (std::size_t m = l; m < n; ++m) {
                    Expr d2 = differentiate(d1, coords[m]);
                    for (auto [a, b] : {std::pair{l, m}, std::pair{m, l}}) {
                        J.ddg[((a * n + b) * n + i) * n + j] = d2;
                        J.ddg[((a * n + b) * n + j) * n + i] = d2;
                    }
                }
            }
    return J;
}

TensorField pack(const Chart& ch, int up, int down, std::vector<Expr> v) {
    return TensorField(ch, up, down, std::move(v));
}

void require_dim(const MetricTensor& g, std::size_t lo, std::size_t hi, const char* what) {
    if (g.dim() < lo || g.dim() > hi) throw std::invalid_argument(std::string(what) + ": unsupported dimension");
}

}  // namespace

MetricTensor::MetricTensor(Chart chart, Matrix g, DomainBox box)
    : chart_(std::move(chart)), g_(std::move(g)), box_(std::move(box)) {
    if (g_.size() != chart_.dim()) throw std::invalid_argument("metric size does not match chart");
    for (std::size_t i = 0; i < g_.size(); ++i) {
        if (g_[i].size() != g_.size()) throw std::invalid_argument("metric must be square");
        for (std::size_t j = 0; j < i; ++j)
            if (g_[i][j] != g_[j][i]) throw std::invalid_argument("metric must be symmetric");
    }
}

MetricTensor::MetricTensor(const SymmetricForm& g, DomainBox box) : MetricTensor(g.chart(), g.matrix(), std::move(box)) {}

Expr MetricTensor::determinant() const { return determinant_of(g_, dim(), dim()); }

Matrix MetricTensor::inverse() const { return symbolic_inverse(g_); }

std::vector<Expr> MetricTensor::upper() const {
    std::vector<Expr> out;
    for (std::size_t i = 0; i < dim(); ++i)
        for (std::size_t j = i; j < dim(); ++j) out.push_back(g_[i][j]);
    return out;
}

TensorField::TensorField(Chart chart, int contravariant, int covariant)
    : chart_(std::move(chart)), up_(contravariant), down_(covariant) {
    std::size_t size = 1;
    for (int i = 0; i < up_ + down_; ++i) size *= chart_.dim();
    comps_.assign(size, Expr(0));
}

TensorField::TensorField(Chart chart, int contravariant, int covariant, std::vector<Expr> comps)
    : TensorField(std::move(chart), contravariant, covariant) {
    if (comps.size() != comps_.size()) throw std::invalid_argument("component count does not match arity");
    comps_ = std::move(comps);
}

std::size_t TensorField::offset(const std::vector<int>& idx) const {
    if (static_cast<int>(idx.size()) != rank()) throw std::invalid_argument("wrong number of indices");
    std::size_t o = 0;
    for (int i : idx) {
        if (i < 0 || i >= static_cast<int>(dim())) throw std::out_of_range("tensor index out of range");
        o = o * dim() + i;
    }
    return o;
}

ZeroVerdict is_zero(const TensorField& t, const DomainBox& box, const ZeroTestOptions& opts) {
    return is_zero(t.components(), box, opts);
}

CurvaturePackage curvature_package(const MetricTensor& g) {
    auto J = symbolic_jet(g);
    auto C = detail::levi_civita(J);
    auto R = detail::riemann_from(C);
    auto Ric = detail::ricci_from(J.n, R);
    Expr scal = detail::trace_with_inverse(J, Ric);
    return {pack(g.chart(), 1, 2, C.gam), pack(g.chart(), 1, 3, R), pack(g.chart(), 0, 2, Ric), scal};
}

TensorField riemann_lower(const MetricTensor& g) {
    auto J = symbolic_jet(g);
    auto R = detail::riemann_from(detail::levi_civita(J));
    return pack(g.chart(), 0, 4, detail::lower_first(J, R));
}

TensorField schouten(const MetricTensor& g) {
    require_dim(g, 3, 16, "schouten");
    auto J = symbolic_jet(g);
    auto R = detail::riemann_from(detail::levi_civita(J));
    auto Ric = detail::ricci_from(J.n, R);
    return pack(g.chart(), 0, 2, detail::schouten_from(J, Ric, detail::trace_with_inverse(J, Ric)));
}

namespace {

std::vector<Expr> weyl_lower(const Jet<Expr>& J) {
    auto R = detail::riemann_from(detail::levi_civita(J));
    auto Ric = detail::ricci_from(J.n, R);
    auto P = detail::schouten_from(J, Ric, detail::trace_with_inverse(J, Ric));
    return detail::weyl_from(J, detail::lower_first(J, R), P);
}

}  // namespace

TensorField weyl(const MetricTensor& g) {
    require_dim(g, 4, 5, "weyl");
    return pack(g.chart(), 0, 4, weyl_lower(symbolic_jet(g)));
}

Expr weyl_square(const MetricTensor& g) {
    require_dim(g, 4, 5, "weyl_square");
    auto J = symbolic_jet(g);
    return detail::full_square(J, weyl_lower(J));
}

TensorField cotton3(const MetricTensor& g) {
    require_dim(g, 3, 3, "cotton3");
    const std::size_t n = 3;
    auto J = symbolic_jet(g);
    auto C = detail::levi_civita(J);
    auto R = detail::riemann_from(C);
    auto Ric = detail::ricci_from(n, R);
    auto S = detail::schouten_from(J, Ric, detail::trace_with_inverse(J, Ric));
    const auto& coords = g.chart().coords();
    // nabla_k S_ij stored [k][i][j]
    std::vector<Expr> nab(n * n * n);
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                std::vector<Expr> t{differentiate(S[i * n + j], coords[k])};
                for (std::size_t m = 0; m < n; ++m) {
                    t.push_back(-(C.G(m, k, i) * S[m * n + j]));
                    t.push_back(-(C.G(m, k, j) * S[i * n + m]));
                }
                nab[(k * n + i) * n + j] = add(std::move(t));
            }
    std::vector<Expr> out(n * n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t k = 0; k < n; ++k)
                out[(i * n + j) * n + k] = nab[(k * n + i) * n + j] - nab[(j * n + i) * n + k];
    return pack(g.chart(), 0, 3, out);
}

TensorField weyl_connection_residual(const MetricTensor& g, const Form& nu) {
    require_dim(g, 3, 3, "weyl_connection_residual");
    if (nu.chart() != g.chart() || nu.degree() != 1) throw std::invalid_argument("nu must be a 1-form on the metric chart");
    const std::size_t n = g.dim();
    auto J = symbolic_jet(g);
    auto C = detail::levi_civita(J);
    auto nv = nu.one_form_coeffs();
    std::vector<Expr> dnu(n * n);
    for (std::size_t l = 0; l < n; ++l)
        for (std::size_t m = 0; m < n; ++m) dnu[l * n + m] = differentiate(nv[m], g.chart().coords()[l]);
    return pack(g.chart(), 0, 2, detail::weyl_connection_residual(J, C, nv, dnu));
}

TensorField einstein_residual(const MetricTensor& g) {
    auto J = symbolic_jet(g);
    auto R = detail::riemann_from(detail::levi_civita(J));
    auto Ric = detail::ricci_from(J.n, R);
    Expr scal = detail::trace_with_inverse(J, Ric);
    Expr c(Rational(1, static_cast<long long>(J.n)));
    std::vector<Expr> out(J.n * J.n);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = Ric[i] - c * scal * J.g[i];
    return pack(g.chart(), 0, 2, out);
}

TensorField metric_covariant_derivative(const MetricTensor& g) {
    auto J = symbolic_jet(g);
    return pack(g.chart(), 0, 3, detail::metric_derivative(J, detail::levi_civita(J)));
}

MetricTensor conformal_rescale(const MetricTensor& g, const Expr& ups) {
    Expr f = exp(Expr(2) * ups);
    Matrix m = g.matrix();
    for (auto& row : m)
        for (auto& e : row) e = f * e;
    return MetricTensor(g.chart(), m, g.box());
}

TensorField frame_components(const TensorField& t, const std::vector<Form>& coframe) {
    if (t.contravariant() != 0) throw std::invalid_argument("frame_components expects a covariant tensor");
    const std::size_t n = t.dim();
    if (coframe.size() != n) throw std::invalid_argument("coframe size does not match chart");
    Matrix A(n);
    for (std::size_t mu = 0; mu < n; ++mu) {
        if (coframe[mu].chart() != t.chart()) throw std::invalid_argument("coframe chart mismatch");
        A[mu] = coframe[mu].one_form_coeffs();
    }
    Matrix E = symbolic_inverse(A);  // E[a][mu]
    std::vector<Expr> cur = t.components();
    const int rank = t.rank();
    for (int slot = 0; slot < rank; ++slot) {
        std::size_t stride = 1;
        for (int s = rank - 1; s > slot; --s) stride *= n;
        std::vector<Expr> next(cur.size());
        for (std::size_t idx = 0; idx < cur.size(); ++idx) {
            std::size_t mu = (idx / stride) % n;
            std::size_t base = idx - mu * stride;
            std::vector<Expr> terms;
            for (std::size_t a = 0; a < n; ++a)
                if (!E[a][mu].is_zero() && !cur[base + a * stride].is_zero())
                    terms.push_back(cur[base + a * stride] * E[a][mu]);
            next[idx] = add(std::move(terms));
        }
        cur = std::move(next);
    }
    return TensorField(t.chart(), 0, rank, cur);
}

}  // namespace odegeom
