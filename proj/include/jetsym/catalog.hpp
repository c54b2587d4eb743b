#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "jetsym/invariance.hpp"
#include "jetsym/jetfield.hpp"

namespace jetsym {

class CatalogError : public std::invalid_argument
{
  public:
    using std::invalid_argument::invalid_argument;
};

/// Family name plus parameters. Parameter values are DSL text ("0", "1/2",
/// "lambda"); absent parameters stay symbolic.
///
/// Recognized parameters: lambda (heat, hj), lambda1 lambda2 F=const|arbitrary
/// (kdv), gamma (subalg-exp), nu (subalg-trig), k (subalg-poly degree; euler
/// case-2 exponent), case=1..5 (euler), reading=index|literal (convection).
struct CatalogKey {
    std::string family;
    int n = 1;
    std::map<std::string, std::string> params;
};

/// theorem1, laplace-system, heat-system, wave-system, hj-system, kdv-system,
/// convection, euler-system, contact, subalg-exp, subalg-trig, subalg-poly.
const std::vector<std::string> &family_names();
/// Report section id: sec2-theorem1, sec3-heat, sec5-euler, ...
std::string section_of(const std::string &family);
/// Normalizes aliases (heat -> heat-system, kdv -> kdv-system, ...).
std::string canonical_family(const std::string &name);

/// Symbols the family's equations and fields use, for DSL input.
SymbolTable symbols_for(const CatalogKey &key);

EquationSystem build_equation(const CatalogKey &key);
std::vector<VectorField> build_family(const CatalogKey &key);
/// Generators of one family that are expected to FAIL on build_equation(key),
/// with the reason (case separations, lambda1 = 0, F arbitrary).
struct ExpectedFailure {
    VectorField field;
    std::string reason;
};
std::vector<ExpectedFailure> build_negative_checks(const CatalogKey &key);

// ---------------------------------------------------------------------------
// Closure

struct StructureConstant {
    std::size_t i = 0, j = 0, k = 0; // [X_i, X_j] = sum_k c X_k
    Expr c;
};

struct ClosureResult {
    CheckReport report;
    std::vector<StructureConstant> constants;
};

/// Expresses every bracket [X_i, X_j], i < j, as a constant-coefficient
/// combination of the generators. A bracket outside the span is a failed item.
ClosureResult closure_check(const std::vector<VectorField> &generators);
/// Antisymmetry and the Jacobi identity on `samples` pseudo-random triples.
CheckReport bracket_identities(const std::vector<VectorField> &generators, std::size_t samples = 20,
                               std::uint64_t seed = 1);

// ---------------------------------------------------------------------------
// theorem1 family: determining system

/// General point ansatz: xi0..xin, eta, ceta of (t, x, psi, cpsi) and rho of
/// (t, x, psi, cpsi, W).
VectorField theorem1_ansatz(int n);

/// How "2 W xi^n_n" in the order-zero equations is read: with n the spatial
/// dimension (literal), or as the summed trace xi^c_c.
enum class TraceReading { Literal, Summed };

struct LabeledEquation {
    std::string label;
    Expr expr;
};
/// Reference determining system, as expressions in the ansatz unknowns.
std::vector<LabeledEquation> theorem1_reference_system(int n, TraceReading reading = TraceReading::Literal);
/// Variables along which differential consequences are formed.
std::vector<Expr> theorem1_closure_vars(int n);

enum class ProofMutation { None, SymmetricC, EEqualsB };
/// Closed-form general solution of the determining system as function rules
/// for the ansatz unknowns; mutations break it on purpose.
std::vector<FuncRule> theorem1_proof_solution(int n, ProofMutation mutation = ProofMutation::None);

/// Extraction on the theorem1 equation followed by substitution of the
/// closed-form solution.
CheckReport verify_proof_solution(int n, ProofMutation mutation = ProofMutation::None);

} // namespace jetsym
