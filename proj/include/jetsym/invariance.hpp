#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "jetsym/expr.hpp"
#include "jetsym/jet_space.hpp"
#include "jetsym/jetfield.hpp"

namespace jetsym {

/// lead -> rhs, where lead is a jet coordinate occurring linearly in a residual.
struct SolvedForm {
    Expr lead;
    Expr rhs;
};

struct EquationSystem {
    std::string name;
    JetSpace space;
    std::vector<Expr> residuals;
    std::vector<std::string> labels;
    std::vector<SolvedForm> solved;
    /// Extra rewrite rules applied after the solved forms.
    std::vector<Rule> constraints;
    std::vector<std::string> parameters;
    std::vector<std::string> notes;
    /// False for user-supplied systems whose solved-form set is unchecked.
    bool curated = true;
};

/// Appends the complex conjugate of every residual and solved form that is not
/// already present (W is real, so its equations are their own conjugates).
void adjoin_conjugates(EquationSystem &sys);

/// Checks the structural invariants: distinct leads, residuals vanishing under
/// their own solved forms, and termination of the reduction.
void validate_system(const EquationSystem &sys);

class ReductionError : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

/// Replaces every jet extending a lead by the matching total derivative of
/// its solved form until none remains, then applies the constraints.
/// Throws ReductionError after 10 * max_order * #residuals passes.
Expr residual_reduce(const Expr &e, const EquationSystem &sys);

struct CheckItem {
    std::string id;
    /// Canonical text of the reduced residual ("0" on success).
    std::string residual;
    bool zero = false;
    std::string note;
};

struct CheckReport {
    std::string subject;
    bool pass = true;
    std::vector<CheckItem> items;
    double timing_ms = 0;
    std::vector<std::string> notes;

    void add(CheckItem item);
    void append(const CheckReport &other);
};

CheckReport check_invariance(const VectorField &X, const EquationSystem &sys);
/// Checks each generator independently, using up to `jobs` threads. Items are
/// ordered as the generators.
CheckReport check_family(const std::vector<VectorField> &fields, const EquationSystem &sys, int jobs = 1);

// ---------------------------------------------------------------------------
// Determining equations

struct DeterminingEquation {
    Expr expr;
    /// Residual label and the jet monomial whose coefficient this is.
    std::string origin;
};

struct DeterminingSystem {
    std::vector<DeterminingEquation> equations;
    /// Names of the unknown coefficient functions.
    std::vector<std::string> unknowns;
};

/// Applies the prolonged ansatz to each residual, reduces on solutions and
/// splits the result by monomials in jets of order >= 1. Unknowns are the
/// function symbols occurring in the ansatz coefficients.
DeterminingSystem extract_determining(const VectorField &ansatz, const EquationSystem &sys);

struct RowMembership {
    std::string label;
    /// Smallest differentiation depth at which the row lies in the span of
    /// the other side; -1 when it does not at the maximal depth.
    int depth = -1;
};

struct EquivalenceReport {
    bool equivalent = false;
    /// Rows of `reference` against the closure of `candidate`.
    std::vector<RowMembership> reference_rows;
    /// Rows of `candidate` against the closure of `reference`.
    std::vector<RowMembership> candidate_rows;
    int max_depth = 0;
};

/// Decides whether two linear systems in the unknown functions generate the
/// same equations, allowing recombination with function coefficients and
/// partial derivatives along `vars` up to `max_depth`. The test evaluates
/// coefficients at random points over a prime field, with the unknown
/// derivative symbols as columns.
EquivalenceReport compare_systems(const std::vector<Expr> &candidate, const std::vector<Expr> &reference,
                                  const std::vector<std::string> &reference_labels,
                                  const std::vector<std::string> &unknowns, const std::vector<Expr> &vars,
                                  int max_depth = 2, std::uint64_t seed = 1);

/// Substitutes a closed-form solution for the unknowns into every equation.
CheckReport verify_solution(const DeterminingSystem &system, const std::vector<FuncRule> &solution,
                            const std::string &subject);

} // namespace jetsym
