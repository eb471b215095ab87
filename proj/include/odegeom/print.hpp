#pragma once

#include "odegeom/expr.hpp"

#include <ostream>
#include <string>

namespace odegeom {

// Emits the same grammar the parser accepts.
std::string to_string(const Expr& e);

inline std::ostream& operator<<(std::ostream& os, const Expr& e) { return os << to_string(e); }

}  // namespace odegeom
