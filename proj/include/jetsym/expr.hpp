#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "jetsym/number.hpp"

namespace jetsym {

/// Node kinds, in canonical sort rank.
///
/// sin and cos are accepted by the builders but never stored: they are
/// rewritten through exp so that trigonometric identities become exponent
/// arithmetic.
enum class Kind : std::uint8_t {
    Number,
    Constant,
    Indep,
    Jet,
    Func,
    Log,
    Exp,
    Pow,
    Mul,
    Add,
};

class Expr;
struct Node;

/// Thrown for arithmetic that has no canonical value (1/0, 0^-k, log 0).
class MathError : public std::domain_error
{
  public:
    using std::domain_error::domain_error;
};

/// Immutable, canonical symbolic expression. Every constructor canonicalizes,
/// so structural equality is the equality of canonical forms.
class Expr
{
  public:
    Expr();                      // zero
    Expr(long v);                // NOLINT: integer literal
    Expr(const Complex &v);      // NOLINT
    explicit Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

    const Node &node() const { return *node_; }
    const Node *get() const { return node_.get(); }
    Kind kind() const;
    std::size_t hash() const;

    bool is_number() const { return kind() == Kind::Number; }
    bool is_zero() const;
    bool is_one() const;
    const Complex &number() const;

    /// Children: terms of Add, factors of Mul, [base] of Pow, [arg] of
    /// Exp/Log, arguments of Func.
    const std::vector<Expr> &args() const;
    const std::string &name() const;

    friend bool operator==(const Expr &a, const Expr &b);
    friend bool operator!=(const Expr &a, const Expr &b) { return !(a == b); }

  private:
    std::shared_ptr<const Node> node_;
};

struct Node {
    Kind kind = Kind::Number;
    Complex value;                 // Number
    std::string name;              // Constant, Indep, Jet (dependent name), Func
    std::vector<int> index;        // Indep: {0}=t, {a}=x_a; Jet: multi-index
                                   // over (t, x1, ...); Func: derivative counts
    bool complex_valued = false;   // Constant, Func
    bool conjugated = false;       // Constant, Func: conj marker on opaque symbols
    Rational exponent;             // Pow
    std::vector<Expr> args;
    std::size_t hash = 0;
    std::uint64_t signature = 0;   // bloom filter of free atoms
};

/// Total order on canonical expressions; 0 iff structurally identical.
int compare(const Expr &a, const Expr &b);

struct ExprLess {
    bool operator()(const Expr &a, const Expr &b) const { return compare(a, b) < 0; }
};
struct ExprHash {
    std::size_t operator()(const Expr &e) const { return e.hash(); }
};

template <class V>
using ExprMap = std::map<Expr, V, ExprLess>;

// ---------------------------------------------------------------------------
// Atoms

Expr num(const Complex &c);
Expr rat(long p, long q = 1);
Expr imag_unit();
/// Independent variable: index 0 is t, index a >= 1 is x_a.
Expr indep(int index);
Expr t_var();
Expr x_var(int a);
/// Symbolic constant (group parameter, coupling, ...).
Expr constant(const std::string &name, bool complex_valued = false);
/// Jet coordinate u_J. The multi-index counts derivatives in (t, x1, ..., xn);
/// trailing zeros are dropped so that the index is the sole identity.
Expr jet(const std::string &dependent, std::vector<int> multi_index = {});
/// Arbitrary function application with partial-derivative counts per slot.
Expr func(const std::string &name, std::vector<Expr> args, std::vector<int> derivs = {},
          bool complex_valued = false);

/// Name of the complex conjugate of a dependent variable (psi <-> cpsi,
/// V1 <-> cV1, W real).
std::string conjugate_dependent(const std::string &dependent);

// ---------------------------------------------------------------------------
// Canonicalizing constructors

Expr add(std::vector<Expr> terms);
Expr mul(std::vector<Expr> factors);
Expr pow(const Expr &base, const Rational &exponent);
Expr exp(const Expr &arg);
Expr log(const Expr &arg);
Expr sin(const Expr &arg);
Expr cos(const Expr &arg);
/// Throws MathError on a syntactically zero denominator.
Expr div(const Expr &a, const Expr &b);

Expr operator+(const Expr &a, const Expr &b);
Expr operator-(const Expr &a, const Expr &b);
Expr operator-(const Expr &a);
Expr operator*(const Expr &a, const Expr &b);
Expr operator/(const Expr &a, const Expr &b);
Expr &operator+=(Expr &a, const Expr &b);
Expr &operator*=(Expr &a, const Expr &b);

/// Rebuilds e bottom-up through the canonical constructors. Idempotent.
Expr canonicalize(const Expr &e);

/// Splits a term into its numeric coefficient and the remaining monomial.
std::pair<Complex, Expr> split_coefficient(const Expr &term);
/// Terms of a sum (a non-sum is a single term).
std::vector<Expr> terms_of(const Expr &e);
/// Factors of a product with numeric coefficient removed.
std::vector<Expr> factors_of(const Expr &monomial);
/// (base, exponent) of a factor: Pow(b, q) -> (b, q), other -> (f, 1).
std::pair<Expr, Rational> base_exponent(const Expr &factor);

// ---------------------------------------------------------------------------
// Structure queries

bool is_atom(const Expr &e); // Constant, Indep, Jet
bool contains(const Expr &e, const Expr &atom);
/// Free atoms (Constant, Indep, Jet), descending into Func arguments.
std::vector<Expr> free_atoms(const Expr &e);
/// Jet coordinates occurring in e.
std::vector<Expr> jets_of(const Expr &e);
/// Func applications occurring in e (outermost and nested).
std::vector<Expr> funcs_of(const Expr &e);
int jet_order(const Expr &jet_atom);
bool depends_on_jets(const Expr &e);

// ---------------------------------------------------------------------------
// Calculus

/// Partial derivative with respect to an atom (independent variable,
/// constant, or jet coordinate), all other atoms held fixed.
Expr diff(const Expr &e, const Expr &atom);
/// Total derivative D_i, i = 0 for t and i = a for x_a.
Expr total_derivative(const Expr &e, int indep_index);
/// Applies D_{i1} D_{i2} ... for a multi-index of counts.
Expr total_derivative(const Expr &e, std::span<const int> multi_index);

// ---------------------------------------------------------------------------
// Substitution

enum class SubstMode {
    /// Atoms are replaced only on exact match.
    Exact,
    /// A jet rule u_J -> R also rewrites u_K for K >= J by D^{K-J} R.
    Propagate,
};

struct Rule {
    Expr lhs; // atom or Func application
    Expr rhs;
};

/// Binds an arbitrary function: name(params...) := body, derivatives follow
/// by differentiating body with respect to the parameter atoms.
struct FuncRule {
    std::string name;
    std::vector<Expr> params; // Constant atoms used as slots
    Expr body;
};

/// Thrown when rules form a cycle through distinct left-hand sides.
class SubstitutionError : public std::invalid_argument
{
  public:
    using std::invalid_argument::invalid_argument;
};

/// Simultaneous substitution followed by canonicalization. A rule may refer
/// to its own left-hand side (single-pass semantics); chains of two or more
/// rules that reach each other are rejected.
Expr substitute(const Expr &e, const std::vector<Rule> &rules, SubstMode mode = SubstMode::Exact,
                const std::vector<FuncRule> &func_rules = {});
Expr substitute(const Expr &e, const Expr &lhs, const Expr &rhs);
/// Change of variables: all left-hand sides are replaced in a single pass, so
/// right-hand sides may freely mention other left-hand sides (x -> x + t,
/// t -> 2t). Exact matching only.
Expr change_variables(const Expr &e, const std::vector<Rule> &rules);
Expr substitute_functions(const Expr &e, const std::vector<FuncRule> &func_rules);

// ---------------------------------------------------------------------------
// Conjugation

/// i -> -i, psi <-> cpsi, V_a <-> cV_a, complex constants and functions get
/// the conjugation marker toggled; real symbols are fixed.
Expr conj(const Expr &e);

// ---------------------------------------------------------------------------
// Zero test and rational normalization

/// Numerator/denominator form: e = numerator / prod(base^power), with the
/// numerator free of negative powers (fractional exponents are reduced into
/// [0, 1) for bases that also occur in the denominator).
struct Fraction {
    Expr numerator;
    std::vector<std::pair<Expr, Rational>> denominator;
};
Fraction together(const Expr &e);

/// Semantic zero test for rational-exponential expressions: brings to a
/// common denominator and unifies atoms whose arguments agree semantically.
bool is_zero(const Expr &e);
bool equivalent(const Expr &a, const Expr &b);

// ---------------------------------------------------------------------------
// Printing and parsing

std::string print(const Expr &e);

struct SymbolTable;
class ParseError : public std::runtime_error
{
  public:
    ParseError(const std::string &msg, int line, int column);
    int line() const { return line_; }
    int column() const { return column_; }

  private:
    int line_;
    int column_;
};

Expr parse(const std::string &text, const SymbolTable &symbols);

// ---------------------------------------------------------------------------
// Numeric evaluation

using FunctionSample = std::function<std::complex<double>(
    std::span<const std::complex<double>> args, std::span<const int> derivs)>;

struct Bindings {
    /// Keyed by printed atom: "t", "x1", "lambda", "psi", "D(psi;x1)".
    std::unordered_map<std::string, std::complex<double>> values;
    std::unordered_map<std::string, FunctionSample> functions;
};

class EvalError : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

std::complex<double> eval_numeric(const Expr &e, const Bindings &bindings);

/// Flattened evaluator for repeated evaluation at many points. Atoms are
/// read from slots in the order of `atoms`.
class CompiledExpr
{
  public:
    CompiledExpr(const Expr &e, const std::vector<Expr> &atoms, const Bindings &fixed = {});
    std::complex<double> operator()(std::span<const std::complex<double>> slots) const;

  private:
    struct Op {
        Kind kind;
        int slot = -1;
        std::complex<double> value;
        double exponent = 0;
        long int_exponent = 0;
        bool integer_exponent = false;
        std::vector<int> operands;
        FunctionSample function;
        std::vector<int> derivs;
        bool conjugated = false;
    };
    std::vector<Op> ops_;
    Bindings fixed_;
};

} // namespace jetsym
