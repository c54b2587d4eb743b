#pragma once

#include "jetsym/expr.hpp"

namespace jetsym::detail {

Expr finish(Node n);
Expr make_number(const Complex &c);
Expr make_raw(Kind kind, std::vector<Expr> args);
Expr make_pow_raw(const Expr &base, const Rational &q);
const Expr &zero();
const Expr &one();
int degree(const Expr &monomial);
Expr with_conjugated(const Expr &atom, bool conjugated, std::vector<Expr> args);
Expr rebuild_func(const Expr &f, std::vector<Expr> args);
/// Rebuilds a compound node with new children through the canonical
/// constructors.
Expr rebuild(const Expr &e, std::vector<Expr> args);

} // namespace jetsym::detail
