#pragma once

#include "odegeom/exterior.hpp"
#include "odegeom/report.hpp"
#include "odegeom/tracked.hpp"
#include "odegeom/zero_test.hpp"

#include <map>
#include <optional>
#include <tuple>
#include <vector>

namespace odegeom {

using Matrix = std::vector<std::vector<Expr>>;

struct Signature {
    int positive = 0, negative = 0, zero = 0;
    bool operator==(const Signature& o) const {
        return positive == o.positive && negative == o.negative && zero == o.zero;
    }
};

class MetricTensor {
public:
    MetricTensor(Chart chart, Matrix g, DomainBox box = {});
    explicit MetricTensor(const SymmetricForm& g, DomainBox box = {});

    const Chart& chart() const { return chart_; }
    std::size_t dim() const { return chart_.dim(); }
    const Expr& operator()(std::size_t i, std::size_t j) const { return g_[i][j]; }
    const Matrix& matrix() const { return g_; }
    const DomainBox& box() const { return box_; }
    void set_box(DomainBox b) { box_ = std::move(b); }
    std::optional<Signature> known_signature;

    Expr determinant() const;
    Matrix inverse() const;  // symbolic adjugate / det
    std::vector<Expr> upper() const;

private:
    Chart chart_;
    Matrix g_;
    DomainBox box_;
};

// Dense components; covariant slots last. Index order matches the chart.
class TensorField {
public:
    TensorField(Chart chart, int contravariant, int covariant);
    TensorField(Chart chart, int contravariant, int covariant, std::vector<Expr> comps);

    const Chart& chart() const { return chart_; }
    int contravariant() const { return up_; }
    int covariant() const { return down_; }
    int rank() const { return up_ + down_; }
    std::size_t dim() const { return chart_.dim(); }
    const std::vector<Expr>& components() const { return comps_; }
    const Expr& operator()(const std::vector<int>& idx) const { return comps_[offset(idx)]; }
    void set(const std::vector<int>& idx, const Expr& v) { comps_[offset(idx)] = v; }
    std::size_t offset(const std::vector<int>& idx) const;

private:
    Chart chart_;
    int up_, down_;
    std::vector<Expr> comps_;
};

ZeroVerdict is_zero(const TensorField& t, const DomainBox& box = {}, const ZeroTestOptions& opts = {});

struct CurvaturePackage {
    TensorField christoffel;  // Gamma^k_ij
    TensorField riemann;      // R^a_bcd
    TensorField ricci;        // R_bd = R^a_bad
    Expr scalar;
};

// R^a_bcd = d_c G^a_db - d_d G^a_cb + G^a_ce G^e_db - G^a_de G^e_cb
CurvaturePackage curvature_package(const MetricTensor& g);
TensorField riemann_lower(const MetricTensor& g);  // R_abcd = g_ae R^e_bcd
TensorField schouten(const MetricTensor& g);
TensorField weyl(const MetricTensor& g);  // all indices down, dim 4 or 5
Expr weyl_square(const MetricTensor& g);
TensorField cotton3(const MetricTensor& g);  // C_ijk = nabla_k S_ij - nabla_j S_ik
TensorField weyl_connection_residual(const MetricTensor& g, const Form& nu);
TensorField einstein_residual(const MetricTensor& g);
TensorField metric_covariant_derivative(const MetricTensor& g);  // nabla_k g_ij, should vanish
MetricTensor conformal_rescale(const MetricTensor& g, const Expr& ups);
// covariant tensor to components in the frame dual to the coframe
TensorField frame_components(const TensorField& t, const std::vector<Form>& coframe);

// Numeric curvature at a point from the symbolic 2-jet of the metric.
struct PointCurvature {
    std::size_t n = 0;
    std::vector<Tracked> g, ginv;
    std::vector<Tracked> christoffel;  // [k][i][j]
    std::vector<Tracked> riemann;      // R^a_bcd
    std::vector<Tracked> riemann_lower;
    std::vector<Tracked> ricci;
    Tracked scalar;
    std::vector<Tracked> schouten;
    std::vector<Tracked> weyl;  // lower, empty when n < 4
    Tracked weyl_square;
    std::vector<Tracked> metric_derivative;  // nabla_k g_ij as [k][i][j]
};

class PointwiseCurvature {
public:
    explicit PointwiseCurvature(const MetricTensor& g);
    // substitution applied to the metric 2-jet after differentiation
    PointwiseCurvature(const MetricTensor& g, const std::map<std::string, Expr>& jet_substitution);
    PointCurvature at(const Point& p) const;
    const std::vector<std::string>& symbols() const { return program_.symbols(); }
    std::size_t dim() const { return n_; }

private:
    std::size_t n_;
    Program program_;
};

// zero test of a selection of pointwise quantities over the metric's box
ZeroVerdict pointwise_zero_test(const MetricTensor& g,
                                const std::function<std::vector<Tracked>(const PointCurvature&)>& select,
                                const DomainBox& box, const ZeroTestOptions& opts = {});
ZeroVerdict pointwise_zero_test(const PointwiseCurvature& pc,
                                const std::function<std::vector<Tracked>(const PointCurvature&)>& select,
                                const DomainBox& box, const ZeroTestOptions& opts = {});

// numeric inverse of the coframe at a point, with tensor transformation
std::vector<Tracked> frame_transform(const std::vector<Tracked>& lower, std::size_t n, int rank,
                                     const std::vector<Form>& coframe, const Point& p);

Signature signature_at(const MetricTensor& g, const Point& p, real rel_zero = 1e-12L);
Signature signature_of(const std::vector<std::vector<real>>& m, real rel_zero = 1e-12L);
std::vector<std::vector<real>> evaluate_matrix(const Matrix& m, const Point& p);

// Spot checks of identities every metric must satisfy:
// bianchi, metric-compatible; weyl-traceless and conformal-covariance when n >= 4;
// cotton-traceless and cotton-invariant when n == 3. The conformal test scale is
// a fixed linear function of the coordinates.
InvariantReport curvature_identities(const MetricTensor& g, const DomainBox& box = {}, const ZeroTestOptions& opts = {});
Expr identity_test_scale(const Chart& chart);

}  // namespace odegeom
