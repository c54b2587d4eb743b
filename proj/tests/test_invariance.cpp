#include <catch2/catch_amalgamated.hpp>

#include "jetsym/invariance.hpp"

using namespace jetsym;

namespace {

// i psi_t + psi_x1x1 = 0 in one space dimension, built by hand
EquationSystem free_schrodinger()
{
    EquationSystem sys;
    sys.name = "free";
    sys.space = JetSpace::schrodinger(1, false);
    Expr psi_t = jet("psi", {1}), psi_xx = jet("psi", {0, 2});
    sys.residuals = {imag_unit() * psi_t + psi_xx};
    sys.labels = {"free"};
    sys.solved = {{psi_xx, -imag_unit() * psi_t}};
    adjoin_conjugates(sys);
    validate_system(sys);
    return sys;
}

SymbolTable sym1() { return SymbolTable::standard(JetSpace::schrodinger(1, false)); }

VectorField field(const std::string &text, const std::string &name)
{
    return parse_field(text, sym1(), name);
}

std::vector<VectorField> schrodinger_algebra()
{
    return {field("@t", "P0"),
            field("@x1", "P1"),
            field("t*@x1 + (i/2)*x1*psi*@psi - (i/2)*x1*cpsi*@cpsi", "G"),
            field("2*t*@t + x1*@x1 - (1/2)*psi*@psi - (1/2)*cpsi*@cpsi", "D"),
            field("t^2*@t + t*x1*@x1 + ((i/4)*x1^2 - (1/2)*t)*psi*@psi + (-(i/4)*x1^2 - (1/2)*t)*cpsi*@cpsi",
                  "A"),
            field("i*psi*@psi - i*cpsi*@cpsi", "M"),
            field("psi*@psi + cpsi*@cpsi", "I")};
}

} // namespace

TEST_CASE("system construction", "[invariance]")
{
    EquationSystem sys = free_schrodinger();
    REQUIRE(sys.residuals.size() == 2);
    CHECK(sys.residuals[1] == conj(sys.residuals[0]));
    CHECK(sys.solved[1].lead == jet("cpsi", {0, 2}));

    EquationSystem dup = sys;
    dup.solved.push_back(dup.solved[0]);
    CHECK_THROWS(validate_system(dup));
    EquationSystem wrong = sys;
    wrong.solved[0].rhs = imag_unit() * jet("psi", {1});
    CHECK_THROWS(validate_system(wrong));
}

TEST_CASE("reduction on solutions", "[invariance]")
{
    EquationSystem sys = free_schrodinger();
    // psi_x1x1t -> -i psi_tt, psi_x1x1x1x1 -> -psi_tt
    CHECK(residual_reduce(jet("psi", {1, 2}), sys) == -imag_unit() * jet("psi", {2}));
    CHECK(residual_reduce(jet("psi", {0, 4}), sys) == -jet("psi", {2}));
    CHECK(residual_reduce(jet("psi", {1, 1}), sys) == jet("psi", {1, 1}));
}

TEST_CASE("Schrodinger algebra leaves the free equation invariant", "[invariance]")
{
    EquationSystem sys = free_schrodinger();
    CheckReport r = check_family(schrodinger_algebra(), sys, 2);
    CHECK(r.pass);
    CHECK(r.items.size() == 14);
}

TEST_CASE("a non-symmetry leaves the hand-computed residual", "[invariance][oracle]")
{
    // pr(x d/dx) acts on psi_xx as -2 psi_xx = 2i psi_t on solutions
    CheckReport r = check_invariance(field("x1*@x1", "S"), free_schrodinger());
    CHECK_FALSE(r.pass);
    REQUIRE_FALSE(r.items.empty());
    Expr got = parse(r.items[0].residual, sym1());
    CHECK(is_zero(got - rat(2) * imag_unit() * jet("psi", {1})));
}

TEST_CASE("check_family is ordered and independent of the thread count", "[invariance][concurrency]")
{
    auto fields = schrodinger_algebra();
    fields.push_back(field("x1*@x1", "S"));
    CheckReport a = check_family(fields, free_schrodinger(), 1);
    CheckReport b = check_family(fields, free_schrodinger(), 4);
    REQUIRE(a.items.size() == b.items.size());
    for (std::size_t i = 0; i < a.items.size(); ++i) {
        CHECK(a.items[i].id == b.items[i].id);
        CHECK(a.items[i].residual == b.items[i].residual);
    }
    CHECK(a.items.front().id.rfind("P0", 0) == 0);
    CHECK(a.items.back().id.rfind("S", 0) == 0);
}

TEST_CASE("every known symmetry solves the extracted determining system", "[invariance][determining]")
{
    Expr t = t_var(), x = x_var(1), psi = jet("psi"), cpsi = jet("cpsi");
    std::vector<Expr> args{t, x, psi, cpsi};
    VectorField ansatz = make_field("ansatz", {{t, func("xi0", args)},
                                               {x, func("xi1", args)},
                                               {psi, func("eta", args, {}, true)},
                                               {cpsi, func("ceta", args, {}, true)}});
    DeterminingSystem det = extract_determining(ansatz, free_schrodinger());
    REQUIRE_FALSE(det.equations.empty());
    CHECK(det.unknowns.size() == 4);

    std::vector<Expr> slots{constant("_t"), constant("_x"), constant("_p"), constant("_c")};
    auto as_rules = [&](const VectorField &X) {
        std::vector<Rule> to_slots{{t, slots[0]}, {x, slots[1]}, {psi, slots[2]}, {cpsi, slots[3]}};
        auto body = [&](const Expr &dir) { return change_variables(X.coefficient(dir), to_slots); };
        return std::vector<FuncRule>{{"xi0", slots, body(t)},
                                     {"xi1", slots, body(x)},
                                     {"eta", slots, body(psi)},
                                     {"ceta", slots, body(cpsi)}};
    };
    for (const auto &X : schrodinger_algebra()) {
        INFO(X.name);
        CHECK(verify_solution(det, as_rules(X), X.name).pass);
    }
    CHECK_FALSE(verify_solution(det, as_rules(field("x1*@x1", "S")), "S").pass);
    CHECK_FALSE(verify_solution(det, as_rules(field("psi^2*@psi", "N")), "N").pass);
}

TEST_CASE("linear systems compared up to recombination and differentiation", "[invariance][equivalence]")
{
    Expr x = x_var(1);
    Expr f = func("f", {x}), g = func("g", {x});
    Expr fx = func("f", {x}, {1}), gx = func("g", {x}, {1});
    std::vector<std::string> unknowns{"f", "g"};

    // g_x = D_x(g - f) + f_x, so {f_x, g - f} implies {f_x, g_x} but not conversely
    EquivalenceReport r = compare_systems({fx, g - f}, {fx, gx}, {"f_x", "g_x"}, unknowns, {x});
    CHECK_FALSE(r.equivalent);
    REQUIRE(r.reference_rows.size() == 2);
    CHECK(r.reference_rows[0].depth == 0);
    CHECK(r.reference_rows[1].depth == 1);
    CHECK(r.candidate_rows[1].depth == -1);

    // function coefficients are allowed in the recombination
    EquivalenceReport s = compare_systems({fx + x * gx, gx}, {fx, gx}, {"f_x", "g_x"}, unknowns, {x});
    CHECK(s.equivalent);
}
