#pragma once

// Curvature formulas shared by the symbolic (Expr) and pointwise (Tracked)
// paths. Everything is expressed through the 2-jet of the metric and its
// inverse; derivatives of the inverse use d g^-1 = -g^-1 dg g^-1.

#include "odegeom/expr.hpp"
#include "odegeom/tracked.hpp"

#include <vector>

namespace odegeom::detail {

inline Expr sum_of(std::vector<Expr>& v) { return add(std::move(v)); }
inline Tracked sum_of(std::vector<Tracked>& v) { return sum(v); }
inline bool nonzero(const Expr& e) { return !e.is_zero(); }
inline bool nonzero(const Tracked&) { return true; }

template <class S>
S constant(long long p, long long q = 1);
template <>
inline Expr constant<Expr>(long long p, long long q) { return Expr(Rational(p, q)); }
template <>
inline Tracked constant<Tracked>(long long p, long long q) { return tracked(static_cast<real>(p) / q); }

template <class S>
struct Jet {
    std::size_t n = 0;
    std::vector<S> g, ginv, dg, ddg;
    const S& G(std::size_t i, std::size_t j) const { return g[i * n + j]; }
    const S& Gi(std::size_t i, std::size_t j) const { return ginv[i * n + j]; }
    const S& D(std::size_t l, std::size_t i, std::size_t j) const { return dg[(l * n + i) * n + j]; }
    const S& DD(std::size_t l, std::size_t m, std::size_t i, std::size_t j) const {
        return ddg[((l * n + m) * n + i) * n + j];
    }
};

template <class S>
struct Connection {
    std::size_t n = 0;
    std::vector<S> gam;   // [k][i][j] = Gamma^k_ij
    std::vector<S> dgam;  // [l][k][i][j] = d_l Gamma^k_ij
    std::vector<S> dginv; // [l][k][m] = d_l g^km
    const S& G(std::size_t k, std::size_t i, std::size_t j) const { return gam[(k * n + i) * n + j]; }
    const S& DG(std::size_t l, std::size_t k, std::size_t i, std::size_t j) const {
        return dgam[((l * n + k) * n + i) * n + j];
    }
};

template <class S>
Connection<S> levi_civita(const Jet<S>& J) {
    const std::size_t n = J.n;
    const S half = constant<S>(1, 2);
    Connection<S> C;
    C.n = n;
    std::vector<S> first(n * n * n), dfirst(n * n * n * n);
    for (std::size_t m = 0; m < n; ++m)
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                std::vector<S> t{J.D(i, m, j), J.D(j, m, i), -J.D(m, i, j)};
                first[(m * n + i) * n + j] = half * sum_of(t);
                for (std::size_t l = 0; l < n; ++l) {
                    std::vector<S> u{J.DD(l, i, m, j), J.DD(l, j, m, i), -J.DD(l, m, i, j)};
                    dfirst[((l * n + m) * n + i) * n + j] = half * sum_of(u);
                }
            }
    C.dginv.resize(n * n * n);
    for (std::size_t l = 0; l < n; ++l)
        for (std::size_t k = 0; k < n; ++k)
            for (std::size_t m = 0; m < n; ++m) {
                std::vector<S> terms;
                for (std::size_t a = 0; a < n; ++a) {
                    if (!nonzero(J.Gi(k, a))) continue;
                    for (std::size_t b = 0; b < n; ++b)
                        if (nonzero(J.D(l, a, b)) && nonzero(J.Gi(b, m)))
                            terms.push_back(J.Gi(k, a) * J.D(l, a, b) * J.Gi(b, m));
                }
                C.dginv[(l * n + k) * n + m] = -sum_of(terms);
            }
    C.gam.resize(n * n * n);
    C.dgam.resize(n * n * n * n);
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                if (j < i) {
                    C.gam[(k * n + i) * n + j] = C.gam[(k * n + j) * n + i];
                    continue;
                }
                std::vector<S> terms;
                for (std::size_t m = 0; m < n; ++m)
                    if (nonzero(J.Gi(k, m)) && nonzero(first[(m * n + i) * n + j]))
                        terms.push_back(J.Gi(k, m) * first[(m * n + i) * n + j]);
                C.gam[(k * n + i) * n + j] = sum_of(terms);
            }
    for (std::size_t l = 0; l < n; ++l)
        for (std::size_t k = 0; k < n; ++k)
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j) {
                    if (j < i) {
                        C.dgam[((l * n + k) * n + i) * n + j] = C.dgam[((l * n + k) * n + j) * n + i];
                        continue;
                    }
                    std::vector<S> terms;
                    for (std::size_t m = 0; m < n; ++m) {
                        const S& a = C.dginv[(l * n + k) * n + m];
                        const S& b = first[(m * n + i) * n + j];
                        if (nonzero(a) && nonzero(b)) terms.push_back(a * b);
                        const S& c = J.Gi(k, m);
                        const S& d = dfirst[((l * n + m) * n + i) * n + j];
                        if (nonzero(c) && nonzero(d)) terms.push_back(c * d);
                    }
                    C.dgam[((l * n + k) * n + i) * n + j] = sum_of(terms);
                }
    return C;
}

// R^a_bcd of an arbitrary (not necessarily symmetric) connection
template <class S>
std::vector<S> riemann_from(const Connection<S>& C) {
    const std::size_t n = C.n;
    std::vector<S> R(n * n * n * n);
    auto at = [n](std::size_t a, std::size_t b, std::size_t c, std::size_t d) { return ((a * n + b) * n + c) * n + d; };
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b)
            for (std::size_t c = 0; c < n; ++c)
                for (std::size_t d = 0; d < n; ++d) {
                    if (d < c) {
                        R[at(a, b, c, d)] = -R[at(a, b, d, c)];
                        continue;
                    }
                    if (d == c) {
                        R[at(a, b, c, d)] = constant<S>(0);
                        continue;
                    }
                    std::vector<S> terms{C.DG(c, a, d, b), -C.DG(d, a, c, b)};
                    for (std::size_t e = 0; e < n; ++e) {
                        if (nonzero(C.G(a, c, e)) && nonzero(C.G(e, d, b))) terms.push_back(C.G(a, c, e) * C.G(e, d, b));
                        if (nonzero(C.G(a, d, e)) && nonzero(C.G(e, c, b))) terms.push_back(-(C.G(a, d, e) * C.G(e, c, b)));
                    }
                    R[at(a, b, c, d)] = sum_of(terms);
                }
    return R;
}

template <class S>
std::vector<S> lower_first(const Jet<S>& J, const std::vector<S>& R) {
    const std::size_t n = J.n;
    std::vector<S> out(R.size());
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t rest = 0; rest < n * n * n; ++rest) {
            std::vector<S> terms;
            for (std::size_t e = 0; e < n; ++e)
                if (nonzero(J.G(a, e)) && nonzero(R[e * n * n * n + rest])) terms.push_back(J.G(a, e) * R[e * n * n * n + rest]);
            out[a * n * n * n + rest] = sum_of(terms);
        }
    return out;
}

template <class S>
std::vector<S> ricci_from(std::size_t n, const std::vector<S>& R) {
    std::vector<S> Ric(n * n);
    for (std::size_t b = 0; b < n; ++b)
        for (std::size_t d = 0; d < n; ++d) {
            std::vector<S> terms;
            for (std::size_t a = 0; a < n; ++a) {
                const S& v = R[((a * n + b) * n + a) * n + d];
                if (nonzero(v)) terms.push_back(v);
            }
            Ric[b * n + d] = sum_of(terms);
        }
    return Ric;
}

template <class S>
S trace_with_inverse(const Jet<S>& J, const std::vector<S>& T) {
    std::vector<S> terms;
    for (std::size_t i = 0; i < J.n; ++i)
        for (std::size_t j = 0; j < J.n; ++j)
            if (nonzero(J.Gi(i, j)) && nonzero(T[i * J.n + j])) terms.push_back(J.Gi(i, j) * T[i * J.n + j]);
    return sum_of(terms);
}

template <class S>
std::vector<S> schouten_from(const Jet<S>& J, const std::vector<S>& Ric, const S& R) {
    const std::size_t n = J.n;
    const auto nn = static_cast<long long>(n);
    S c = constant<S>(1, 2 * (nn - 1));
    S inv = constant<S>(1, nn - 2);
    std::vector<S> P(n * n);
    for (std::size_t i = 0; i < n * n; ++i) P[i] = inv * (Ric[i] - c * R * J.g[i]);
    return P;
}

template <class S>
std::vector<S> weyl_from(const Jet<S>& J, const std::vector<S>& Rl, const std::vector<S>& P) {
    const std::size_t n = J.n;
    std::vector<S> W(Rl.size());
    auto g = [&](std::size_t i, std::size_t j) -> const S& { return J.G(i, j); };
    auto p = [&](std::size_t i, std::size_t j) -> const S& { return P[i * n + j]; };
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b)
            for (std::size_t c = 0; c < n; ++c)
                for (std::size_t d = 0; d < n; ++d) {
                    std::vector<S> terms{Rl[((a * n + b) * n + c) * n + d]};
                    if (nonzero(g(a, c)) && nonzero(p(b, d))) terms.push_back(-(g(a, c) * p(b, d)));
                    if (nonzero(g(a, d)) && nonzero(p(b, c))) terms.push_back(g(a, d) * p(b, c));
                    if (nonzero(g(b, d)) && nonzero(p(a, c))) terms.push_back(-(g(b, d) * p(a, c)));
                    if (nonzero(g(b, c)) && nonzero(p(a, d))) terms.push_back(g(b, c) * p(a, d));
                    W[((a * n + b) * n + c) * n + d] = sum_of(terms);
                }
    return W;
}

// raises one slot (position `slot`) of a rank-4 all-lower tensor
template <class S>
std::vector<S> raise_slot(const Jet<S>& J, const std::vector<S>& T, int slot) {
    const std::size_t n = J.n;
    std::vector<S> out(T.size());
    std::size_t stride = 1;
    for (int s = 3; s > slot; --s) stride *= n;
    for (std::size_t idx = 0; idx < T.size(); ++idx) {
        std::size_t i = (idx / stride) % n;
        std::size_t base = idx - i * stride;
        std::vector<S> terms;
        for (std::size_t m = 0; m < n; ++m)
            if (nonzero(J.Gi(i, m)) && nonzero(T[base + m * stride])) terms.push_back(J.Gi(i, m) * T[base + m * stride]);
        out[idx] = sum_of(terms);
    }
    return out;
}

template <class S>
S full_square(const Jet<S>& J, const std::vector<S>& W) {
    std::vector<S> up = W;
    for (int s = 0; s < 4; ++s) up = raise_slot(J, up, s);
    std::vector<S> terms;
    for (std::size_t i = 0; i < W.size(); ++i)
        if (nonzero(W[i]) && nonzero(up[i])) terms.push_back(W[i] * up[i]);
    return sum_of(terms);
}

// nabla_k g_ij = d_k g_ij - G^m_ki g_mj - G^m_kj g_im, stored [k][i][j]
template <class S>
std::vector<S> metric_derivative(const Jet<S>& J, const Connection<S>& C) {
    const std::size_t n = J.n;
    std::vector<S> out(n * n * n);
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                std::vector<S> terms{J.D(k, i, j)};
                for (std::size_t m = 0; m < n; ++m) {
                    if (nonzero(C.G(m, k, i)) && nonzero(J.G(m, j))) terms.push_back(-(C.G(m, k, i) * J.G(m, j)));
                    if (nonzero(C.G(m, k, j)) && nonzero(J.G(i, m))) terms.push_back(-(C.G(m, k, j) * J.G(i, m)));
                }
                out[(k * n + i) * n + j] = sum_of(terms);
            }
    return out;
}

// Weyl connection G^k_ij = LC^k_ij + (d^k_i nu_j + d^k_j nu_i - g_ij nu^k)/2 and
// the trace-free part of its symmetrized Ricci tensor
template <class S>
std::vector<S> weyl_connection_residual(const Jet<S>& J, const Connection<S>& LC, const std::vector<S>& nu,
                                        const std::vector<S>& dnu) {
    const std::size_t n = J.n;
    const S half = constant<S>(1, 2);
    std::vector<S> nu_up(n), dnu_up(n * n);
    for (std::size_t k = 0; k < n; ++k) {
        std::vector<S> t;
        for (std::size_t m = 0; m < n; ++m)
            if (nonzero(J.Gi(k, m)) && nonzero(nu[m])) t.push_back(J.Gi(k, m) * nu[m]);
        nu_up[k] = sum_of(t);
    }
    for (std::size_t l = 0; l < n; ++l)
        for (std::size_t k = 0; k < n; ++k) {
            std::vector<S> t;
            for (std::size_t m = 0; m < n; ++m) {
                const S& a = LC.dginv[(l * n + k) * n + m];
                if (nonzero(a) && nonzero(nu[m])) t.push_back(a * nu[m]);
                if (nonzero(J.Gi(k, m)) && nonzero(dnu[l * n + m])) t.push_back(J.Gi(k, m) * dnu[l * n + m]);
            }
            dnu_up[l * n + k] = sum_of(t);
        }
    Connection<S> W = LC;
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                std::vector<S> t{-(J.G(i, j) * nu_up[k])};
                if (k == i) t.push_back(nu[j]);
                if (k == j) t.push_back(nu[i]);
                W.gam[(k * n + i) * n + j] = LC.G(k, i, j) + half * sum_of(t);
                for (std::size_t l = 0; l < n; ++l) {
                    std::vector<S> u{-(J.D(l, i, j) * nu_up[k]), -(J.G(i, j) * dnu_up[l * n + k])};
                    if (k == i) u.push_back(dnu[l * n + j]);
                    if (k == j) u.push_back(dnu[l * n + i]);
                    W.dgam[((l * n + k) * n + i) * n + j] = LC.DG(l, k, i, j) + half * sum_of(u);
                }
            }
    auto R = riemann_from(W);
    auto Ric = ricci_from(n, R);
    std::vector<S> sym(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) sym[i * n + j] = half * (Ric[i * n + j] + Ric[j * n + i]);
    S scal = trace_with_inverse(J, sym);
    S c = constant<S>(1, static_cast<long long>(n));
    std::vector<S> out(n * n);
    for (std::size_t i = 0; i < n * n; ++i) out[i] = sym[i] - c * scal * J.g[i];
    return out;
}

}  // namespace odegeom::detail
