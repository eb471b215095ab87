#pragma once

#include "odegeom/expr.hpp"

#include <set>
#include <stdexcept>
#include <string>

namespace odegeom {

class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& msg, std::size_t pos)
        : std::runtime_error(msg + " at position " + std::to_string(pos)), pos_(pos) {}
    std::size_t position() const { return pos_; }

private:
    std::size_t pos_;
};

struct ParseOptions {
    // when non-empty, identifiers outside this set are rejected
    std::set<std::string> allowed_symbols;
};

Expr parse(const std::string& text, const ParseOptions& opts = {});

}  // namespace odegeom
