#include "catalog_internal.hpp"
#include "jetsym/catalog.hpp"

namespace jetsym {

using namespace cat;

namespace {

std::vector<Expr> base_args(int n, bool with_W)
{
    std::vector<Expr> args{t_var()};
    for (int a = 1; a <= n; ++a)
        args.push_back(x_var(a));
    args.push_back(psi());
    args.push_back(cpsi());
    if (with_W)
        args.push_back(W());
    return args;
}

Expr xi(int n, int j) { return func("xi" + std::to_string(j), base_args(n, false)); }
Expr eta(int n) { return func("eta", base_args(n, false)); }
Expr ceta(int n) { return func("ceta", base_args(n, false)); }
Expr rho(int n) { return func("rho", base_args(n, true)); }

Expr D(const Expr &e, const Expr &v) { return diff(e, v); }

} // namespace

VectorField theorem1_ansatz(int n)
{
    FieldBuilder b;
    b.on(t_var(), xi(n, 0));
    for (int a = 1; a <= n; ++a)
        b.on(x_var(a), xi(n, a));
    b.on(psi(), eta(n));
    b.on(cpsi(), ceta(n));
    b.on(W(), rho(n));
    return b.build("ansatz");
}

std::vector<Expr> theorem1_closure_vars(int n)
{
    return base_args(n, true);
}

std::vector<LabeledEquation> theorem1_reference_system(int n, TraceReading reading)
{
    std::vector<LabeledEquation> out;
    const Expr t = t_var();
    auto x = [](int a) { return x_var(a); };
    auto s = [](int a) { return std::to_string(a); };
    for (int j = 0; j <= n; ++j) {
        out.push_back({"xi" + s(j) + "_psi", D(xi(n, j), psi())});
        out.push_back({"xi" + s(j) + "_cpsi", D(xi(n, j), cpsi())});
    }
    for (int a = 1; a <= n; ++a)
        out.push_back({"xi0_" + s(a), D(xi(n, 0), x(a))});
    for (int a = 1; a <= n; ++a)
        for (int b = a + 1; b <= n; ++b) {
            out.push_back({"xi" + s(a) + "_" + s(a) + " = xi" + s(b) + "_" + s(b),
                           D(xi(n, a), x(a)) - D(xi(n, b), x(b))});
            out.push_back({"xi" + s(a) + "_" + s(b) + " + xi" + s(b) + "_" + s(a),
                           D(xi(n, a), x(b)) + D(xi(n, b), x(a))});
        }
    for (int a = 1; a <= n; ++a)
        out.push_back({"xi0_0 = 2 xi" + s(a) + "_" + s(a), D(xi(n, 0), t) - 2 * D(xi(n, a), x(a))});
    out.push_back({"eta_cpsi", D(eta(n), cpsi())});
    out.push_back({"eta_psipsi", D(D(eta(n), psi()), psi())});
    for (int a = 1; a <= n; ++a)
        out.push_back({"eta_psi" + s(a) + " = (i/2) xi" + s(a) + "_0",
                       D(D(eta(n), psi()), x(a)) - I() * rat(1, 2) * D(xi(n, a), t)});
    out.push_back({"ceta_psi", D(ceta(n), psi())});
    out.push_back({"ceta_cpsicpsi", D(D(ceta(n), cpsi()), cpsi())});
    for (int a = 1; a <= n; ++a)
        out.push_back({"ceta_cpsi" + s(a) + " = -(i/2) xi" + s(a) + "_0",
                       D(D(ceta(n), cpsi()), x(a)) + I() * rat(1, 2) * D(xi(n, a), t)});

    Expr trace = D(xi(n, n), x(n));
    if (reading == TraceReading::Summed) {
        std::vector<Expr> tr;
        for (int c = 1; c <= n; ++c)
            tr.push_back(D(xi(n, c), x(c)));
        trace = add(std::move(tr));
    }
    auto lap = [&](const Expr &f) {
        std::vector<Expr> terms;
        for (int c = 1; c <= n; ++c)
            terms.push_back(D(D(f, x(c)), x(c)));
        return add(std::move(terms));
    };
    out.push_back({"order zero (psi)", I() * D(eta(n), t) + lap(eta(n)) - D(eta(n), psi()) * W() * psi() +
                                           2 * W() * trace * psi() + W() * eta(n) + rho(n) * psi()});
    out.push_back({"order zero (cpsi)", -(I() * D(ceta(n), t)) + lap(ceta(n)) - D(ceta(n), cpsi()) * W() * cpsi() +
                                            2 * W() * trace * cpsi() + W() * ceta(n) + rho(n) * cpsi()});
    out.push_back({"rho_psi", D(rho(n), psi())});
    out.push_back({"rho_cpsi", D(rho(n), cpsi())});
    return out;
}

std::vector<FuncRule> theorem1_proof_solution(int n, ProofMutation mutation)
{
    // slots: t, x1..xn, psi, cpsi (+ W for rho)
    std::vector<Expr> p{constant("_t")};
    for (int a = 1; a <= n; ++a)
        p.push_back(constant("_x" + std::to_string(a)));
    p.push_back(constant("_psi"));
    p.push_back(constant("_cpsi"));
    const Expr &T = p[0];
    const Expr Psi = p[n + 1], CPsi = p[n + 2], Wp = constant("_W");
    auto X = [&](int a) { return p[a]; };
    auto f = [&](const std::string &name, int k) {
        Expr e = func(name, {T});
        for (int j = 0; j < k; ++j)
            e = diff(e, T);
        return e;
    };
    auto Cab = [&](int a, int b) -> Expr {
        if (a == b)
            return Expr(0);
        int lo = std::min(a, b), hi = std::max(a, b);
        Expr c = constant("C" + std::to_string(lo) + std::to_string(hi));
        if (a < b || mutation == ProofMutation::SymmetricC)
            return c;
        return -c;
    };

    Expr r2 = Expr(0), udot = Expr(0), uddot = Expr(0);
    for (int c = 1; c <= n; ++c) {
        r2 = r2 + X(c) * X(c);
        udot = udot + f("U" + std::to_string(c), 1) * X(c);
        uddot = uddot + f("U" + std::to_string(c), 2) * X(c);
    }
    Expr B = f("B", 0);
    Expr E = mutation == ProofMutation::EEqualsB ? B : B - 2 * I() * n * f("A", 1) + constant("C1");

    std::vector<FuncRule> rules;
    rules.push_back({"xi0", p, 2 * f("A", 0)});
    for (int a = 1; a <= n; ++a) {
        Expr body = f("A", 1) * X(a) + f("U" + std::to_string(a), 0);
        for (int b = 1; b <= n; ++b)
            body = body + Cab(a, b) * X(b);
        rules.push_back({"xi" + std::to_string(a), p, body});
    }
    Expr common = rat(1, 2) * f("A", 2) * r2 + udot;
    rules.push_back({"eta", p, I() * rat(1, 2) * (common + B) * Psi});
    rules.push_back({"ceta", p, -(I() * rat(1, 2) * (common + E) * CPsi)});
    std::vector<Expr> prho = p;
    prho.push_back(Wp);
    rules.push_back({"rho", prho,
                     rat(1, 2) * (rat(1, 2) * f("A", 3) * r2 + uddot + f("B", 1)) - rat(n, 2) * I() * f("A", 2) -
                         2 * Wp * f("A", 1)});
    return rules;
}

CheckReport verify_proof_solution(int n, ProofMutation mutation)
{
    CatalogKey key{"theorem1", n, {}};
    EquationSystem sys = build_equation(key);
    DeterminingSystem det = extract_determining(theorem1_ansatz(n), sys);
    std::string tag = mutation == ProofMutation::None        ? "solution"
                      : mutation == ProofMutation::SymmetricC ? "solution with symmetric C"
                                                              : "solution with E = B";
    return verify_solution(det, theorem1_proof_solution(n, mutation), tag + ", n=" + std::to_string(n));
}

} // namespace jetsym
