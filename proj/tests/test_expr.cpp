#include <catch2/catch_amalgamated.hpp>

#include "jetsym/expr.hpp"
#include "jetsym/jet_space.hpp"
#include "support/laws.hpp"

using namespace jetsym;

namespace {

const SymbolTable &sym()
{
    static SymbolTable s = SymbolTable::standard(JetSpace::schrodinger(2));
    return s;
}

Expr P(const std::string &text) { return parse(text, sym()); }

} // namespace

TEST_CASE("Q(i) arithmetic is exact", "[expr][number]")
{
    Complex a(make_rational(1, 3), make_rational(-2, 5));
    Complex b(make_rational(-3, 4), 2);
    Complex q = a / b;
    CHECK(q * b == a);
    CHECK((a * a.conj()).is_real());
    CHECK(Complex::i().pow(4).is_one());
    CHECK(Complex(2).pow(-3) == Complex(make_rational(1, 8)));
    CHECK_THROWS_AS(a / Complex(0), std::domain_error);

    Rational out;
    CHECK(exact_rational_power(make_rational(9, 4), make_rational(3, 2), out));
    CHECK(out == make_rational(27, 8));
    CHECK_FALSE(exact_rational_power(Rational(2), make_rational(1, 2), out));
}

TEST_CASE("constructors produce canonical forms", "[expr]")
{
    Expr x = x_var(1), t = t_var();
    CHECK(x + t == t + x);
    CHECK(x * t * 2 == rat(2) * (t * x));
    CHECK(x - x == Expr(0));
    CHECK(x * pow(x, -1) == Expr(1));
    CHECK(pow(pow(x, 2), make_rational(1, 2)) == x);
    CHECK(exp(t) * exp(-t) == Expr(1));
    CHECK(exp(log(x) * 3) == pow(x, 3));
    CHECK(pow(rat(4), make_rational(1, 2)) == rat(2));
    // sin and cos are stored through exp
    CHECK(sin(t) * sin(t) + cos(t) * cos(t) == Expr(1));
    CHECK(pow(rat(2), make_rational(2, 2)) == rat(2));
    CHECK_THROWS_AS(div(x, Expr(0)), MathError);
    CHECK_THROWS_AS(log(Expr(0)), MathError);
}

TEST_CASE("fractional powers keep principal branches", "[expr][conj]")
{
    // pulling -1 out of a sum under a square root would change the branch
    CHECK(P("(x2 - x1)^(1/2)") != P("(-1)^(1/2)*(x1 - x2)^(1/2)"));
    CHECK(P("(4*x1 + 4*x2)^(1/2)") == P("2*(x1 + x2)^(1/2)"));
    Expr r = P("(-2)^(3/2)");
    auto v = eval_numeric(r, {}), w = eval_numeric(conj(r), {});
    CHECK(std::abs(w - std::conj(v)) < 1e-12);
}

TEST_CASE("semantic zero test", "[expr][zero]")
{
    CHECK(is_zero(P("1/(1-mu*t) + 1/(1+mu*t) - 2/(1-mu^2*t^2)")));
    CHECK(is_zero(P("(x1+x2)^2 - x1^2 - 2*x1*x2 - x2^2")));
    CHECK(is_zero(P("exp(2*i*t) - (cos(t) + i*sin(t))^2")));
    CHECK(is_zero(P("1/(x1^2+x2^2) - (x1^2+x2^2)^(-1)")));
    CHECK_FALSE(is_zero(P("1/(1-mu*t) - 1/(1+mu*t)")));
    CHECK(equivalent(P("x1/(x1*t)"), P("1/t")));

    Fraction f = together(P("1/x1 + 1/x2"));
    CHECK(f.denominator.size() == 2);
    CHECK(f.numerator == P("x1 + x2"));
}

TEST_CASE("partial derivatives against hand-derived forms", "[expr][calculus]")
{
    Expr phase = P("exp(i*mu*x1^2/(4*(1-mu*t)))");
    Expr expected = P("(i/2)*mu*x1/(1-mu*t)") * phase;
    CHECK(is_zero(diff(phase, x_var(1)) - expected));
    CHECK(diff(P("lambda*x1^3"), constant("lambda")) == P("x1^3"));
    CHECK(diff(P("psi*cpsi"), jet("psi")) == jet("cpsi"));
    CHECK(is_zero(diff(P("log(x1^2 + t)"), t_var()) - P("1/(x1^2 + t)")));
    // derivative slots of arbitrary functions
    Expr u = func("U1", {t_var()});
    CHECK(diff(u * u, t_var()) == rat(2) * u * func("U1", {t_var()}, {1}));
}

TEST_CASE("total derivatives on the jet", "[expr][calculus]")
{
    Expr psi = jet("psi");
    CHECK(total_derivative(psi * psi, 1) == rat(2) * psi * jet("psi", {0, 1}));
    CHECK(total_derivative(jet("psi", {1, 1}), 2) == jet("psi", {1, 1, 1}));
    std::vector<int> xx{0, 2};
    CHECK(total_derivative(psi, xx) == jet("psi", {0, 2}));
    // chain rule through an arbitrary function of |psi|^2
    Expr F = func("F", {psi * jet("cpsi")});
    Expr got = total_derivative(F, 0);
    Expr want = func("F", {psi * jet("cpsi")}, {1}) * (jet("psi", {1}) * jet("cpsi") + psi * jet("cpsi", {1}));
    CHECK(is_zero(got - want));
    CHECK(total_derivative(P("x1*t"), 0) == x_var(1));
}

TEST_CASE("substitution modes", "[expr][subst]")
{
    Expr psi = jet("psi"), psix = jet("psi", {0, 1});
    Rule r{psi, P("exp(x1)")};
    CHECK(substitute(psix, {r}) == psix);
    CHECK(substitute(psix, {r}, SubstMode::Propagate) == P("exp(x1)"));
    CHECK(substitute(jet("psi", {1, 2}), {Rule{psi, P("t^2*x1^3")}}, SubstMode::Propagate) == P("12*t*x1"));

    // a rule may mention its own left-hand side
    CHECK(substitute(P("x1^2"), x_var(1), P("x1 + 1")) == P("x1^2 + 2*x1 + 1"));
    CHECK_THROWS_AS(substitute(P("psi"), {Rule{psi, jet("W")}, Rule{jet("W"), psi}}), SubstitutionError);

    // simultaneous change of variables
    Expr moved = change_variables(P("x1*t"), {{x_var(1), P("x1 + t")}, {t_var(), P("2*t")}});
    CHECK(moved == P("2*t*x1 + 2*t^2"));

    FuncRule u{"U1", {constant("_s")}, pow(constant("_s"), 2)};
    Expr e = func("U1", {t_var()}, {1}) + func("U1", {x_var(1)});
    CHECK(substitute_functions(e, {u}) == P("2*t + x1^2"));
}

TEST_CASE("conjugation", "[expr][conj]")
{
    CHECK(conj(P("i*psi + W")) == P("-i*cpsi + W"));
    CHECK(conj(jet("psi", {1, 1})) == jet("cpsi", {1, 1}));
    CHECK(conj(P("C*psi")) == P("conj(C)*cpsi"));
    CHECK(conj(conj(P("C*exp(i*x1)"))) == P("C*exp(i*x1)"));
    CHECK(conjugate_dependent("psi") == "cpsi");
    CHECK(conjugate_dependent("cV2") == "V2");
    CHECK(conjugate_dependent("W") == "W");
}

TEST_CASE("printing", "[expr][print]")
{
    CHECK(print(P("i*D(psi;t) + D(psi;x1,x1) + W*psi")) == "i*D(psi;t) + D(psi;x1,x1) + W*psi");
    CHECK(print(P("1/(x1^2 + x2^2)")) == "1/(x1^2 + x2^2)");
    CHECK(print(P("(1/2 + i)*W")) == "(1/2 + i)*W");
    CHECK(print(Expr(0)) == "0");
}

TEST_CASE("parse errors carry positions", "[expr][parse]")
{
    auto where = [](const std::string &text) {
        try {
            P(text);
        } catch (const ParseError &e) {
            return std::pair{e.line(), e.column()};
        }
        return std::pair{0, 0};
    };
    CHECK(where("x1 +") == std::pair{1, 5});
    CHECK(where("foo") == std::pair{1, 1});
    CHECK(where("(x1") == std::pair{1, 4});
    CHECK(where("1/0").first == 1);
    CHECK(where("x1 +\n  * t") == std::pair{2, 3});
    CHECK_THROWS_AS(P("D(psi;psi)"), ParseError);
    CHECK_THROWS_AS(P("D(t;x1)"), ParseError);
    CHECK_THROWS_AS(P("D(psi;x3)"), ParseError);
}

TEST_CASE("numeric evaluation", "[expr][eval]")
{
    Expr e = P("exp(i*(k*x1 - k^2*t)) + U1(t)*W");
    Bindings b;
    b.values = {{"k", 2.0}, {"x1", 0.3}, {"t", 0.7}, {"W", -1.5}};
    b.functions["U1"] = [](std::span<const std::complex<double>> a, std::span<const int>) { return std::sin(a[0]); };
    auto want = std::exp(std::complex<double>(0, 2 * 0.3 - 4 * 0.7)) + std::sin(0.7) * -1.5;
    CHECK(std::abs(eval_numeric(e, b) - want) < 1e-14);

    CompiledExpr c(e, {t_var(), x_var(1)}, b);
    std::complex<double> slots[] = {0.7, 0.3};
    CHECK(std::abs(c(slots) - want) < 1e-14);
    CHECK_THROWS_AS(eval_numeric(P("x2"), b), EvalError);
}

TEST_CASE("kernel laws on random expressions", "[expr][property]")
{
    using namespace jetsym::testing;
    auto check = [](const char *name, const LawResult &r) {
        INFO(name << ": " << r.first_failure);
        CHECK(r.ok());
    };
    check("round trip", law_round_trip(300, 101));
    check("canonical", law_canonical(300, 102));
    check("conj", law_conj(300, 103));
    check("derivation", law_derivation(300, 104));
}
