#include <catch2/catch_amalgamated.hpp>

#include "jetsym/catalog.hpp"

using namespace jetsym;

namespace {

const VectorField &by_name(const std::vector<VectorField> &gens, const std::string &name)
{
    for (const auto &X : gens)
        if (X.name == name)
            return X;
    throw std::runtime_error("no generator " + name);
}

bool same_field(const VectorField &a, const VectorField &b) { return is_zero_field(combine({{1, a}, {-1, b}})); }

Expr structure_constant(const ClosureResult &c, const std::vector<VectorField> &gens, const std::string &x,
                        const std::string &y, const std::string &z)
{
    auto index = [&](const std::string &name) {
        for (std::size_t i = 0; i < gens.size(); ++i)
            if (gens[i].name == name)
                return i;
        throw std::runtime_error("no generator " + name);
    };
    std::size_t i = index(x), j = index(y), k = index(z);
    for (const auto &s : c.constants)
        if (s.i == i && s.j == j && s.k == k)
            return s.c;
        else if (s.i == j && s.j == i && s.k == k)
            return -s.c;
    return 0;
}

} // namespace

TEST_CASE("every family passes on its own system", "[catalog]")
{
    std::vector<CatalogKey> keys = {
        {"theorem1", 1, {}},           {"theorem1", 2, {}},       {"laplace-system", 2, {}},
        {"heat-system", 2, {}},        {"wave-system", 2, {}},    {"hj-system", 2, {}},
        {"kdv-system", 1, {}},         {"convection", 2, {}},     {"contact", 1, {}},
        {"subalg-exp", 2, {}},         {"subalg-trig", 1, {}},    {"subalg-poly", 1, {{"k", "3"}}},
        {"euler-system", 2, {{"case", "1"}}}, {"euler-system", 2, {{"case", "5"}}},
    };
    for (const auto &key : keys) {
        INFO(key.family << " n=" << key.n);
        CheckReport r = check_family(build_family(key), build_equation(key), 2);
        CHECK(r.pass);
        CHECK_FALSE(r.items.empty());
    }
}

TEST_CASE("expected failures fail", "[catalog][negative]")
{
    std::vector<CatalogKey> keys = {
        {"theorem1", 2, {}},
        {"kdv-system", 1, {}},
        {"kdv-system", 1, {{"lambda1", "0"}}},
        {"convection", 2, {}},
        {"euler-system", 1, {{"case", "1"}}},
        {"euler-system", 1, {{"case", "4"}}},
    };
    for (const auto &key : keys) {
        auto negs = build_negative_checks(key);
        REQUIRE_FALSE(negs.empty());
        for (const auto &neg : negs) {
            INFO(key.family << ": " << neg.field.name << " (" << neg.reason << ")");
            CHECK_FALSE(check_invariance(neg.field, build_equation(key)).pass);
        }
    }
}

TEST_CASE("Galilei on KdV needs a nonzero coupling", "[catalog][kdv]")
{
    CatalogKey zero{"kdv-system", 1, {{"lambda1", "0"}}};
    CheckReport r = check_family(build_family(zero), build_equation(zero));
    CHECK_FALSE(r.pass);
    bool galilei_fails = false;
    for (const auto &it : r.items) {
        bool galilei = it.id.rfind("G:", 0) == 0;
        if (!galilei)
            CHECK(it.zero);
        galilei_fails = galilei_fails || (galilei && !it.zero);
    }
    CHECK(galilei_fails);

    // Z1 and Z2 belong to the algebra exactly when F is constant
    CatalogKey constant_f{"kdv-system", 1, {{"F", "const"}}};
    auto gens = build_family(constant_f);
    CHECK(check_invariance(by_name(gens, "Z1"), build_equation(constant_f)).pass);
    CHECK(check_invariance(by_name(gens, "Z2"), build_equation(constant_f)).pass);
}

TEST_CASE("builders reject invalid keys", "[catalog][errors]")
{
    CHECK_THROWS_AS(build_equation({"euler-system", 1, {{"case", "2"}, {"k", "0"}}}), CatalogError);
    CHECK_THROWS_AS(build_equation({"euler-system", 1, {{"case", "2"}, {"k", "-1"}}}), CatalogError);
    CHECK_NOTHROW(build_equation({"euler-system", 1, {{"case", "2"}, {"k", "3/2"}}}));
    CHECK_THROWS_AS(build_equation({"euler-system", 1, {{"case", "6"}}}), CatalogError);
    CHECK_THROWS_AS(build_equation({"no-such-system", 1, {}}), CatalogError);
    CHECK_THROWS_AS(build_family({"theorem1", 0, {}}), CatalogError);
    CHECK_THROWS_AS(build_family({"subalg-poly", 1, {{"k", "0"}}}), CatalogError);
    CHECK(canonical_family("heat") == "heat-system");
    CHECK(section_of("euler-system") == "sec5-euler");
    CHECK(section_of("subalg-trig") == "sec4-trig");
}

TEST_CASE("exponential subalgebra brackets", "[catalog][closure]")
{
    // [P0, Q_a] = gamma Q_a, [P_a, Q_a] = (gamma/2) Q_B
    CatalogKey key{"subalg-exp", 2, {}};
    auto gens = build_family(key);
    ClosureResult c = closure_check(gens);
    REQUIRE(c.report.pass);
    Expr gamma = constant("gamma");
    CHECK(structure_constant(c, gens, "P0", "Q1", "Q1") == gamma);
    CHECK(structure_constant(c, gens, "P1", "Q1", "QB") == gamma / 2);
    CHECK(structure_constant(c, gens, "P1", "Q2", "QB") == Expr(0));
    CHECK(same_field(lie_bracket(by_name(gens, "P2"), by_name(gens, "Q2")),
                     combine({{gamma / 2, by_name(gens, "QB")}})));
}

TEST_CASE("trigonometric subalgebra brackets", "[catalog][closure]")
{
    // [Q_U, Q_V] = Q_B with B = (U V' - U' V)/2, here nu/2
    CatalogKey key{"subalg-trig", 1, {}};
    auto gens = build_family(key);
    ClosureResult c = closure_check(gens);
    REQUIRE(c.report.pass);
    Expr nu = constant("nu");
    Expr half_i_nu = imag_unit() * nu / 2;
    CHECK(structure_constant(c, gens, "Q1_1", "Q2_1", "Z1") == half_i_nu);
    CHECK(structure_constant(c, gens, "Q1_1", "Q2_1", "Z2") == -half_i_nu);
    CHECK(structure_constant(c, gens, "P0", "Q1_1", "Q2_1") == -nu);
    CHECK(structure_constant(c, gens, "P1", "Q1_1", "X1") == -nu / 2);
}

TEST_CASE("polynomial subalgebra brackets", "[catalog][closure]")
{
    for (int k = 1; k <= 3; ++k) {
        CatalogKey key{"subalg-poly", 1, {{"k", std::to_string(k)}}};
        auto gens = build_family(key);
        ClosureResult c = closure_check(gens);
        INFO("k=" << k);
        REQUIRE(c.report.pass);
        // d/dt lowers the degree: [P0, Q^(1)] = k Q^(2), and Q^(k+1) is P_a
        std::string next = k == 1 ? "P1" : "Q2_1";
        CHECK(structure_constant(c, gens, "P0", "Q1_1", next) == Expr(k));
        CHECK(bracket_identities(gens, 10, static_cast<std::uint64_t>(k)).pass);
    }
}

TEST_CASE("structure constants satisfy the Jacobi identity", "[catalog][closure][property]")
{
    for (const char *fam : {"subalg-exp", "subalg-trig", "subalg-poly"}) {
        CatalogKey key{fam, 1, {{"k", "2"}}};
        if (std::string(fam) != "subalg-poly")
            key.params.clear();
        auto gens = build_family(key);
        ClosureResult c = closure_check(gens);
        REQUIRE(c.report.pass);
        std::size_t m = gens.size();
        std::vector<Expr> C(m * m * m, Expr(0));
        auto at = [&](std::size_t i, std::size_t j, std::size_t k) -> Expr & { return C[(i * m + j) * m + k]; };
        for (const auto &s : c.constants) {
            at(s.i, s.j, s.k) = s.c;
            at(s.j, s.i, s.k) = -s.c;
        }
        // sum_l c_ij^l c_lk^p + c_jk^l c_li^p + c_ki^l c_lj^p = 0
        bool ok = true;
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < m; ++j)
                for (std::size_t k = 0; k < m; ++k)
                    for (std::size_t p = 0; p < m; ++p) {
                        Expr sum = 0;
                        for (std::size_t l = 0; l < m; ++l)
                            sum += at(i, j, l) * at(l, k, p) + at(j, k, l) * at(l, i, p) + at(k, i, l) * at(l, j, p);
                        ok = ok && is_zero(sum);
                    }
        INFO(fam);
        CHECK(ok);
    }
}

TEST_CASE("a family that does not close is reported", "[catalog][closure]")
{
    SymbolTable s = SymbolTable::standard(JetSpace::schrodinger(1));
    std::vector<VectorField> gens = {parse_field("@t", s, "P0"), parse_field("t^2*@x1", s, "X")};
    ClosureResult c = closure_check(gens);
    CHECK_FALSE(c.report.pass);
}

TEST_CASE("determining system for the theorem1 ansatz", "[catalog][determining]")
{
    for (int n = 1; n <= 2; ++n) {
        INFO("n=" << n);
        DeterminingSystem det = extract_determining(theorem1_ansatz(n), build_equation({"theorem1", n, {}}));
        std::vector<Expr> cand;
        for (const auto &e : det.equations)
            cand.push_back(e.expr);
        std::vector<Expr> ref;
        std::vector<std::string> labels;
        for (const auto &r : theorem1_reference_system(n)) {
            ref.push_back(r.expr);
            labels.push_back(r.label);
        }
        EquivalenceReport eq = compare_systems(cand, ref, labels, det.unknowns, theorem1_closure_vars(n));
        CHECK(eq.equivalent);
        CHECK(verify_proof_solution(n).pass);
        CHECK_FALSE(verify_proof_solution(n, ProofMutation::EEqualsB).pass);
    }
    CHECK_FALSE(verify_proof_solution(2, ProofMutation::SymmetricC).pass);
}
