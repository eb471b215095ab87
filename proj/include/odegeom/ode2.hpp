#pragma once

#include "odegeom/curvature.hpp"
#include "odegeom/report.hpp"

namespace odegeom {

// y'' = Q(x, y, p)
struct SecondOrderODE {
    Expr Q;
    DomainBox box;
};

// split-signature metric on (x, y, p, phi)
MetricTensor fefferman_metric(const SecondOrderODE& ode);

struct Ode2Invariants {
    Expr w1, w2;
};

Ode2Invariants ode2_invariants(const Expr& Q);

// checks: w1, w2, weyl; consistent when weyl vanishes exactly when both w's do
InvariantReport fefferman_flatness_check(const SecondOrderODE& ode, const ZeroTestOptions& opts = {});

}  // namespace odegeom
