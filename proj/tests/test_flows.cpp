#include <catch2/catch_amalgamated.hpp>

#include "jetsym/catalog.hpp"
#include "jetsym/flows.hpp"

using namespace jetsym;

namespace {

SymbolTable sym(int n) { return SymbolTable::standard(JetSpace::schrodinger(n)); }

Expr schrodinger_residual()
{
    return imag_unit() * jet("psi", {1}) + jet("psi", {0, 2}) + jet("W") * jet("psi");
}

} // namespace

TEST_CASE("every flow integrates its generator", "[flows]")
{
    for (const auto &name : flow_names())
        for (int n = 1; n <= 2; ++n) {
            if (n > 1 && (name == "kdv-galilei" || name == "contact-special"))
                continue;
            INFO(name << " n=" << n);
            FlowMap f = build_flow({name, n, {}});
            CHECK(verify_lie_equations(f).pass);
            CHECK(verify_inverse(f).pass);
            CHECK(verify_group_law(f).pass);
        }
}

TEST_CASE("the flow at parameter zero is the identity", "[flows]")
{
    for (const char *name : {"qb", "galilei", "dilation", "projective", "contact-special"}) {
        FlowMap f = build_flow({name, 1, {}});
        FlowMap zero = with_parameter(f, Expr(0));
        for (const auto &r : zero.forward) {
            INFO(name << ": " << print(r.lhs));
            CHECK(is_zero(r.rhs - r.lhs));
        }
    }
}

TEST_CASE("a Lie check against the wrong generator fails", "[flows][negative]")
{
    FlowMap f = build_flow({"galilei", 1, {}});
    VectorField wrong = parse_field("t*@x1", sym(1), "G-bare");
    CHECK_FALSE(verify_lie_equations(f, wrong).pass);
}

TEST_CASE("Galilei boost of a plane wave shifts the wave number by beta/2", "[flows][oracle]")
{
    FlowMap f = build_flow({"galilei", 1, {}});
    SymbolTable s = sym(1);
    Solution wave{parse("exp(i*(k*x1 - k^2*t))", s), 0};
    Solution moved = pushforward_solution(f, wave);
    Expr kk = parse("k + beta1/2", s);
    Expr expected = exp(imag_unit() * (kk * x_var(1) - kk * kk * t_var()));
    CHECK(is_zero(moved.psi - expected));
    CHECK(is_zero(moved.W));
}

TEST_CASE("pushforwards solve the transformed equation", "[flows]")
{
    SymbolTable s = sym(1);
    Solution wave{parse("exp(i*(k*x1 - k^2*t))", s), 0};
    CHECK(is_zero(evaluate_on(schrodinger_residual(), wave)));
    for (const char *name : {"galilei", "dilation", "projective", "qb"}) {
        INFO(name);
        Solution moved = pushforward_solution(build_flow({name, 1, {}}), wave);
        CHECK(is_zero(evaluate_on(schrodinger_residual(), moved)));
    }
    Solution wrong{parse("exp(i*(k*x1 - k*t))", s), 0};
    CHECK_FALSE(is_zero(evaluate_on(schrodinger_residual(), wrong)));
}

TEST_CASE("potentials under the flows", "[flows][potential]")
{
    SymbolTable s = sym(2);
    Expr W0 = parse("1/(x1^2 + x2^2)", s);
    FlowMap qb = build_flow({"qb", 2, {}});
    CHECK(is_zero(transform_potential(qb, W0) - W0 - parse("alpha*D(B(t);t)", s)));
    // the inverse square potential is scale and projective invariant
    CHECK(is_zero(transform_potential(build_flow({"dilation", 2, {}}), W0) - W0));
    CHECK(is_zero(transform_potential(build_flow({"projective", 2, {}}), W0) - W0));
    // a harmonic well is not scale invariant
    Expr well = parse("x1^2", s);
    CHECK_FALSE(is_zero(transform_potential(build_flow({"dilation", 2, {}}), well) - well));
    CHECK_THROWS_AS(transform_potential(build_flow({"contact-special", 1, {}}), W0), FlowError);
}

TEST_CASE("potential chains and symbolic solution mapping", "[flows][potential]")
{
    for (int n = 1; n <= 2; ++n) {
        INFO("n=" << n);
        CheckReport chains = potential_chains(n);
        CHECK(chains.pass);
        CHECK(chains.items.size() == 10);
        CHECK(verify_solution_mapping(n).pass);
    }
}

TEST_CASE("flow errors", "[flows][errors]")
{
    CHECK_THROWS_AS(build_flow({"nope", 1, {}}), FlowError);
    CHECK_THROWS_AS(build_flow({"kdv-galilei", 1, {{"lambda1", "0"}}}), FlowError);
    CHECK_THROWS_AS(build_flow({"galilei", 0, {}}), FlowError);
}

TEST_CASE("flows move the catalog equations into themselves", "[flows][catalog]")
{
    // the KdV and convection boosts reproduce the catalog generators
    FlowMap kdv = build_flow({"kdv-galilei", 1, {}});
    CHECK(kdv.generator.name == "G");
    CHECK(verify_lie_equations(kdv).pass);
    FlowMap conv = build_flow({"convection-galilei", 2, {}});
    CHECK(conv.space.declares("V1"));
    CHECK(verify_group_law(conv).pass);
}
