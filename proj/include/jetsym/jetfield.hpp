#pragma once

#include <string>
#include <utility>
#include <vector>

#include "jetsym/expr.hpp"
#include "jetsym/jet_space.hpp"

namespace jetsym {

enum class FieldClass { Point, Contact };

/// First-order operator sum_d coeff_d * d/d(d). Directions are atoms:
/// t, x_a, order-zero jets (psi, cpsi, W, V_a, ...) and, for contact fields,
/// the first-order jets psi_t and psi_x.
struct VectorField {
    std::string name;
    FieldClass cls = FieldClass::Point;
    ExprMap<Expr> coeffs;
    /// Prolonged coefficients keyed by jet coordinate (order >= 1, or >= 2
    /// for the seeded first-order contact directions).
    ExprMap<Expr> prolonged;

    /// Coefficient on a direction or a prolonged jet; zero when absent.
    Expr coefficient(const Expr &direction) const;
    bool has_coefficient(const Expr &direction) const;
};

class FieldError : public std::invalid_argument
{
  public:
    using std::invalid_argument::invalid_argument;
};

VectorField make_field(std::string name, const std::vector<std::pair<Expr, Expr>> &terms,
                       FieldClass cls = FieldClass::Point);

/// Prolongs every declared dependent variable up to `order`.
VectorField prolong(const VectorField &X, const JetSpace &space, int order);
/// Prolongs only what is needed for the listed jet coordinates.
VectorField prolong_for(const VectorField &X, const std::vector<Expr> &jets);

/// Applies the (prolonged) field to e. Throws FieldError when e contains a
/// jet coordinate without a coefficient.
Expr act(const VectorField &X, const Expr &e);

VectorField lie_bracket(const VectorField &X, const VectorField &Y);
/// sum_k c_k X_k on the base coefficients.
VectorField combine(const std::vector<std::pair<Expr, VectorField>> &terms, std::string name = {});
bool is_zero_field(const VectorField &X);

/// Contact field of a generating function W(t, x, psi, psi_t, psi_x) in one
/// space dimension; `v_coefficient` is the coefficient on the dependent V.
VectorField contact_field(std::string name, const Expr &generating, const Expr &v_coefficient);
/// eta - psi_nu xi^nu, which reproduces the generating function.
Expr generating_function(const VectorField &X);

/// Printed direction name: t, x1, psi, cV2, psi_t, psi_x1.
std::string direction_name(const Expr &direction);
/// Parses "coef*@dir + ...". Directions: @t @x1.. @psi @cpsi @W @V1 @cV1
/// @psi_t @psi_x (alias of @psi_x1).
VectorField parse_field(const std::string &text, const SymbolTable &symbols, std::string name = {});
std::string print_field(const VectorField &X);

} // namespace jetsym
