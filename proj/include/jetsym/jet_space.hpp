#pragma once

#include <map>
#include <string>
#include <vector>

#include "jetsym/expr.hpp"

namespace jetsym {

/// Independent variables t, x1..xn, named dependent variables, and the
/// highest derivative order in use.
struct JetSpace {
    int n = 1;
    std::vector<std::string> dependents;
    int max_order = 2;

    /// psi, cpsi, W plus V1..Vn, cV1..cVn when `with_velocity` is set.
    static JetSpace schrodinger(int n, bool with_potential = true, bool with_velocity = false, int max_order = 2);

    bool declares(const std::string &dependent) const;
    /// Throws std::invalid_argument for undeclared dependents or orders above
    /// max_order + extra.
    void validate(const Expr &e, int extra_order = 0) const;
};

/// Identifiers the parser accepts beyond the jet space.
struct SymbolTable {
    JetSpace space;
    std::map<std::string, bool> constants; // name -> complex-valued
    std::map<std::string, bool> functions; // name -> complex-valued

    /// Space plus the usual arbitrary functions (U1..Un, A, B, E_ab, F, F1,
    /// F2) and constants (lambda, lambda1, lambda2, gamma, nu, k, mu, theta,
    /// alpha, beta1.., C complex).
    static SymbolTable standard(const JetSpace &space);
};

} // namespace jetsym
