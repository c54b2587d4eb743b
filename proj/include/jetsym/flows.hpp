#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "jetsym/invariance.hpp"

namespace jetsym {

class FlowError : public std::invalid_argument
{
  public:
    using std::invalid_argument::invalid_argument;
};

/// Flow name plus DSL parameter values. Recognized: a (component index for
/// qa, galilei, convection-galilei), U (qa), B (qb), lambda1 (kdv-galilei).
struct FlowKey {
    std::string name;
    int n = 1;
    std::map<std::string, std::string> params;
};

/// One-parameter group of point (or contact) transformations. `forward`
/// gives each moved coordinate's image as an expression in the unprimed
/// coordinates and the parameter; unlisted coordinates are fixed.
struct FlowMap {
    std::string name;
    Expr parameter;
    JetSpace space;
    std::vector<Rule> forward;
    std::vector<Rule> inverse;
    VectorField generator;
    /// Expressions that must stay nonzero (poles of the closed form).
    std::vector<Expr> domain;
    std::vector<std::string> notes;

    /// Image of a coordinate (the coordinate itself when not moved).
    Expr image(const Expr &coordinate) const;
    /// Forward rules with the parameter replaced by `value`.
    std::vector<Rule> at(const Expr &value) const;
};

/// qb, qa, galilei, dilation, projective, kdv-galilei, convection-galilei,
/// contact-special, identity.
const std::vector<std::string> &flow_names();
FlowMap build_flow(const FlowKey &key);
/// The same flow with its parameter replaced by `value` (for example p + p').
FlowMap with_parameter(const FlowMap &flow, const Expr &value);

/// d/dparameter of each image equals the generator coefficient evaluated at
/// the images, and every image reduces to its coordinate at parameter 0.
CheckReport verify_lie_equations(const FlowMap &flow, const VectorField &X);
CheckReport verify_lie_equations(const FlowMap &flow);
/// forward o inverse and inverse o forward are the identity.
CheckReport verify_inverse(const FlowMap &flow);
/// Flow at p followed by the flow at p' equals the flow at p + p'.
CheckReport verify_group_law(const FlowMap &flow);

/// New potential in the transformed coordinates (renamed back to t, x):
/// W-rule with W -> W0, then base coordinates replaced by their preimages.
Expr transform_potential(const FlowMap &flow, const Expr &W0);

struct Solution {
    Expr psi;
    Expr W; // zero for systems without a potential
};
Solution pushforward_solution(const FlowMap &flow, const Solution &s);

/// Replaces every jet of psi, cpsi and W by the matching derivative of the
/// given closed forms.
Expr evaluate_on(const Expr &e, const Solution &s);

/// The three potential chains generated from 1/(x_c x_c): the QB chain, the
/// Q_a chain (two applications each) and invariance under dilation and
/// projective flows.
CheckReport potential_chains(int n);

/// Symbolic solution mapping for qb and galilei on the Schrodinger equation
/// with an arbitrary psi and the potential it determines.
CheckReport verify_solution_mapping(int n);

} // namespace jetsym
