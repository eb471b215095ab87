#pragma once

#include "odegeom/expr.hpp"
#include "odegeom/zero_test.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace odegeom {

struct NamedVerdict {
    std::string name;
    ZeroVerdict verdict;
    std::optional<Expr> residual;  // the tested expression when it is a single scalar
};

// Classification outcome with every zero test that produced it.
struct InvariantReport {
    std::string subject;  // e.g. "ode3", "monge1"
    std::string input;    // printed defining function
    std::string verdict;
    std::vector<NamedVerdict> checks;
    std::vector<std::pair<std::string, std::string>> notes;
    bool consistent = true;  // internal equivalences asserted by the construction held

    const NamedVerdict* find(const std::string& name) const {
        for (const auto& c : checks)
            if (c.name == name) return &c;
        return nullptr;
    }
    bool zero(const std::string& name) const {
        const auto* c = find(name);
        return c && c->verdict.zero;
    }
};

// the user box plus margins inferred from the singular locus of e
inline DomainBox domain_for(const Expr& e, const DomainBox& user) { return DomainBox::inferred(e).merged(user); }

}  // namespace odegeom
