#pragma once

#include "odegeom/curvature.hpp"
#include "odegeom/report.hpp"

#include <array>

namespace odegeom {

// z' = F(x, y, y', z)
struct MongeFirst {
    Expr F;
    DomainBox box;
};

// z' = F(x, y, y', y'', z)
struct MongeSecond {
    Expr F;
    DomainBox box;
};

// checks: Fpp, DFp-Fy-FpFz; verdict branch-cc2 when both vanish, else branch-cc1
InvariantReport classify_monge1(const MongeFirst& m, const ZeroTestOptions& opts = {});
// checks: Fqq; verdict integral-free or g2
InvariantReport classify_monge2(const MongeSecond& m, const ZeroTestOptions& opts = {});

// curve x(t), y(t), z(t) built from t and the jet family w_k; may contain Int nodes
struct ParametrizedSolution {
    Expr x, y, z;
};

ParametrizedSolution example4_solution();                 // for z' = (y')^2
ParametrizedSolution example5_solution(const Rational& k);  // for z' = (y'')^k / k

// residual of the equation along the curve; throws when x_t vanishes on the box
// or an antiderivative survives
Expr parametrized_residual(OdeClass cls, const Expr& F, const ParametrizedSolution& sol);
// every variant of sol with one numeric term coefficient raised by 1
std::vector<ParametrizedSolution> coefficient_mutations(const ParametrizedSolution& sol);
ZeroVerdict verify_parametrized_solution(OdeClass cls, const Expr& F, const ParametrizedSolution& sol,
                                         const DomainBox& box = {}, const ZeroTestOptions& opts = {});

// A printed metric as a table of symmetric-product coefficients. Each slot text
// uses the formula grammar with derivative atoms: F, Fq, Fqq, Fpz, ..., DFq, DDFqq
// (leading D's apply the total derivative).
struct MetricSlot {
    int i, j;  // 0-based basis indices, i <= j
    const char* text;
};

const std::vector<MetricSlot>& g32_table();       // over the tilded coframe
const std::vector<MetricSlot>& example6_table();  // over dx, dy, dp, dq, dz, for F = F(q)

Expr expand_atoms(const std::string& text, const Expr& F);
std::vector<Form> tilde_coframe(const Expr& F);
// sum of slot coefficients times the symmetric products of the basis
MetricTensor metric_from_table(const std::vector<MetricSlot>& table, const std::vector<Form>& basis, const Expr& F,
                               DomainBox box);

MetricTensor g32_metric(const MongeSecond& m, const ZeroTestOptions& opts = {});
MetricTensor example6_metric(const Expr& F, const DomainBox& box = {});

struct Example6Coframe {
    std::vector<Form> theta;  // theta^1..theta^5
    std::vector<Form> alpha;  // null coframe (theta1, theta2, 2/sqrt(3) theta3, theta4, theta5)
    Form Omega2, Omega6;
};

Example6Coframe example6_coframe(const Expr& F);
// 2 th1 th5 - 2 th2 th4 + 4/3 th3 th3
MetricTensor frame_metric(const Example6Coframe& c, const DomainBox& box = {});

Expr example6_a5(const Expr& F);

// Ups_2 in terms of Ups_1 and F from the conformal-scale ODE; the mutated
// variant drops the F'' F'''' term
Expr einstein_scale_relation(const Expr& F, bool mutated = false);
// Einstein residual of e^{2 Ups_0} * example6_metric(F) with Ups_4, Ups_3, Ups_2 eliminated
ZeroVerdict einstein_scale_residual(const Expr& F, const Expr& ups2, const DomainBox& box = {},
                                    const ZeroTestOptions& opts = {});

Expr psi_invariant(const std::array<Expr, 5>& a);

// frame Weyl component C_2525 (1-based) equals kWeylA5Sign * a5
inline constexpr int kWeylA5Sign = -1;

// all-lower Weyl components of the frame metric in the alpha coframe at a point
std::vector<Tracked> example6_frame_weyl(const Expr& F, const Point& p);
// checks: confined (components off the 2525 orbit), a5-slot
InvariantReport weyl_frame_pattern_check(const Expr& F, const DomainBox& box = {}, const ZeroTestOptions& opts = {});

struct SlotComparison {
    int i, j;
    ZeroVerdict verdict;
    // monomial text and value at the witness point, filled when the slot disagrees
    std::vector<std::pair<std::string, real>> monomials;
};

struct TranscriptionReport {
    Expr factor;  // table = factor * frame construction
    std::vector<SlotComparison> slots;
    bool ok = true;
};

// compares every slot of g32_table against the frame construction for F = F(q)
TranscriptionReport transcription_check(const Expr& F, const DomainBox& box = {}, const ZeroTestOptions& opts = {});

}  // namespace odegeom
