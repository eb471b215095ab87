#pragma once

#include "odegeom/eval.hpp"

#include <cmath>
#include <vector>

namespace odegeom {

// Arithmetic on values that carry a term-magnitude scale (see Tracked).
inline Tracked tracked(real v) { return {v, std::fabs(v)}; }

inline Tracked operator+(const Tracked& a, const Tracked& b) { return {a.value + b.value, a.magnitude + b.magnitude}; }
inline Tracked operator-(const Tracked& a, const Tracked& b) { return {a.value - b.value, a.magnitude + b.magnitude}; }
inline Tracked operator-(const Tracked& a) { return {-a.value, a.magnitude}; }
inline Tracked operator*(const Tracked& a, const Tracked& b) { return {a.value * b.value, a.magnitude * b.magnitude}; }
inline Tracked operator/(const Tracked& a, const Tracked& b) {
    real v = 1 / b.value;
    real kappa = b.magnitude / std::fabs(b.value);
    Tracked inv{v, std::fabs(v) * (kappa > 1 ? kappa : 1)};
    return a * inv;
}
inline Tracked& operator+=(Tracked& a, const Tracked& b) { return a = a + b; }
inline Tracked& operator-=(Tracked& a, const Tracked& b) { return a = a - b; }
inline Tracked& operator*=(Tracked& a, const Tracked& b) { return a = a * b; }

inline Tracked sum(const std::vector<Tracked>& v) {
    Tracked s{0, 0};
    for (const auto& x : v) s += x;
    return s;
}

}  // namespace odegeom
