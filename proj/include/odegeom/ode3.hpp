#pragma once

#include "odegeom/exterior.hpp"
#include "odegeom/report.hpp"

#include <array>

namespace odegeom {

// y''' = F(x, y, p, q)
struct ThirdOrderODE {
    Expr F;
    DomainBox box;
};

struct Ode3Invariants {
    Expr K, A, G, L, N;
    std::array<Expr, 5> C;  // Cotton components of the solution-space conformal structure
};

Ode3Invariants ode3_invariants(const Expr& F);

// degenerate form on J2 with the total derivative in its kernel
SymmetricForm metric_tilde(const Expr& F);
// Weyl 1-form in the gauge where the fiber scale is 1
Form nu_tilde(const Expr& F);
// d of the Lie derivative of nu_tilde along the total derivative
Form nu_transport_curl(const Expr& F);

enum class Ode3Class { Generic, Wuenschmann, EinsteinWeyl };
std::string to_string(Ode3Class c);

// checks: A, G, kernel, transport, nu-closed, and C1..C5 when A vanishes
InvariantReport classify3(const ThirdOrderODE& ode, const ZeroTestOptions& opts = {});
Ode3Class ode3_class(const InvariantReport& r);

// dKP Frobenius system on (x, y, t, v) for u = u(x, y, t)
struct DkpResidual {
    Expr scalar;       // u_yy + u_x^2 - u_xt + u u_xx
    Form frobenius1;   // d w1 ^ w1 ^ w4
    Form frobenius4;   // d w4 ^ w1 ^ w4
};

DkpResidual dkp_residual(const Expr& u);
// the fixed per-form factors: frobenius1 = 0, frobenius4 = -scalar dx^dy^dt^dv
inline constexpr int kFrobenius1Factor = 0;
inline constexpr int kFrobenius4Factor = -1;
std::pair<ZeroVerdict, ZeroVerdict> dkp_factor_check(const DkpResidual& r, const DomainBox& box = {},
                                                     const ZeroTestOptions& opts = {});

// w1..w4; throws std::invalid_argument when u does not solve dKP on the box
std::vector<Form> dkp_coframe(const Expr& u, const DomainBox& box = {}, const ZeroTestOptions& opts = {});
// dX ^ w4 ^ w1, zero iff dX lies in the class of w4 modulo w1
Form dkp_membership_form(const std::vector<Form>& coframe, const Expr& X);

}  // namespace odegeom
