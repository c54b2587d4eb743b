#include "jetsym/catalog.hpp"

#include <algorithm>
#include <chrono>
#include <optional>
#include <random>

#include "catalog_internal.hpp"

namespace jetsym {

namespace cat {

Expr psi() { return jet("psi"); }
Expr cpsi() { return jet("cpsi"); }
Expr W() { return jet("W"); }
Expr V(int a) { return jet("V" + std::to_string(a)); }
Expr cV(int a) { return jet("cV" + std::to_string(a)); }
Expr I() { return imag_unit(); }

Expr djet(const std::string &dep, std::vector<int> counts) { return jet(dep, std::move(counts)); }

Expr d1(const std::string &dep, int i)
{
    std::vector<int> idx(i + 1, 0);
    idx[i] = 1;
    return jet(dep, idx);
}

Expr d2(const std::string &dep, int i, int j)
{
    std::vector<int> idx(std::max(i, j) + 1, 0);
    idx[i] += 1;
    idx[j] += 1;
    return jet(dep, idx);
}

Expr laplacian(const std::string &dep, int n)
{
    std::vector<Expr> terms;
    for (int a = 1; a <= n; ++a)
        terms.push_back(d2(dep, a, a));
    return add(std::move(terms));
}

Expr xsq(int n)
{
    std::vector<Expr> terms;
    for (int c = 1; c <= n; ++c)
        terms.push_back(x_var(c) * x_var(c));
    return add(std::move(terms));
}

Expr tfunc(const std::string &name) { return func(name, {t_var()}); }

Expr dt(const Expr &e, int k)
{
    Expr out = e;
    for (int j = 0; j < k; ++j)
        out = diff(out, t_var());
    return out;
}

FieldBuilder &FieldBuilder::on(const Expr &dir, const Expr &c)
{
    terms_.emplace_back(dir, c);
    return *this;
}

FieldBuilder &FieldBuilder::phase(const Expr &c)
{
    on(psi(), c * psi());
    return on(cpsi(), -(c * cpsi()));
}

FieldBuilder &FieldBuilder::scale(const Expr &c)
{
    on(psi(), c * psi());
    return on(cpsi(), c * cpsi());
}

VectorField FieldBuilder::build(std::string name, FieldClass cls) const { return make_field(std::move(name), terms_, cls); }

} // namespace cat

using namespace cat;

namespace {
std::string idx(int a) { return std::to_string(a); }
} // namespace

namespace cat {

// Fields of the Schrodinger family with potential ----------------------------

VectorField P0() { return FieldBuilder().on(t_var(), 1).build("P0"); }
VectorField Pa(int a) { return FieldBuilder().on(x_var(a), 1).build("P" + idx(a)); }
VectorField Z1() { return FieldBuilder().on(psi(), psi()).build("Z1"); }
VectorField Z2() { return FieldBuilder().on(cpsi(), cpsi()).build("Z2"); }

VectorField J(int a, int b)
{
    return FieldBuilder().on(x_var(b), x_var(a)).on(x_var(a), -x_var(b)).build("J" + idx(a) + idx(b));
}

VectorField Qa(int a, const Expr &U, std::string name)
{
    return FieldBuilder()
        .on(x_var(a), U)
        .phase(I() * dt(U) * x_var(a) * rat(1, 2))
        .on(W(), dt(U, 2) * x_var(a) * rat(1, 2))
        .build(std::move(name));
}

VectorField QA(int n, const Expr &A, std::string name)
{
    FieldBuilder b;
    b.on(t_var(), 2 * A);
    for (int c = 1; c <= n; ++c)
        b.on(x_var(c), dt(A) * x_var(c));
    b.phase(I() * rat(1, 4) * dt(A, 2) * xsq(n));
    b.scale(-rat(n, 2) * dt(A));
    b.on(W(), rat(1, 4) * dt(A, 3) * xsq(n) - 2 * W() * dt(A));
    return b.build(std::move(name));
}

VectorField QB(const Expr &B, std::string name)
{
    return FieldBuilder().phase(I() * B).on(W(), dt(B)).build(std::move(name));
}

void add_euclid(std::vector<VectorField> &out, int n)
{
    out.push_back(P0());
    for (int a = 1; a <= n; ++a)
        out.push_back(Pa(a));
    for (int a = 1; a <= n; ++a)
        for (int b = a + 1; b <= n; ++b)
            out.push_back(J(a, b));
}

// Fields of the convection / Euler family ------------------------------------

VectorField J_conv(int a, int b, const Expr &E, std::string name)
{
    return FieldBuilder()
        .on(x_var(b), E * x_var(a))
        .on(x_var(a), -(E * x_var(b)))
        .on(V(b), E * V(a))
        .on(V(a), -(E * V(b)))
        .on(cV(b), E * cV(a))
        .on(cV(a), -(E * cV(b)))
        .on(V(b), -(I() * dt(E) * x_var(a)))
        .on(V(a), I() * dt(E) * x_var(b))
        .on(cV(b), I() * dt(E) * x_var(a))
        .on(cV(a), -(I() * dt(E) * x_var(b)))
        .build(std::move(name));
}

VectorField Q_conv(int n, int a, const Expr &U, bool literal, std::string name)
{
    FieldBuilder b;
    if (literal)
        for (int c = 1; c <= n; ++c)
            b.on(x_var(c), U);
    else
        b.on(x_var(a), U);
    b.on(V(a), -(I() * dt(U)));
    b.on(cV(a), I() * dt(U));
    return b.build(std::move(name));
}

VectorField QA_conv(int n, const Expr &A, std::string name)
{
    FieldBuilder b;
    b.on(t_var(), 2 * A);
    for (int c = 1; c <= n; ++c) {
        b.on(x_var(c), dt(A) * x_var(c));
        b.on(V(c), -(I() * dt(A, 2) * x_var(c)) - dt(A) * V(c));
        b.on(cV(c), I() * dt(A, 2) * x_var(c) - dt(A) * cV(c));
    }
    return b.build(std::move(name));
}

VectorField Z3_conv() { return FieldBuilder().on(psi(), 1).build("Z3"); }
VectorField Z4_conv() { return FieldBuilder().on(cpsi(), 1).build("Z4"); }

VectorField euler_dilation(int n, const Expr *k, std::string name)
{
    FieldBuilder b;
    b.on(t_var(), 2 * t_var());
    for (int c = 1; c <= n; ++c) {
        b.on(x_var(c), x_var(c));
        b.on(V(c), -V(c));
        b.on(cV(c), -cV(c));
    }
    if (k)
        b.scale(-(Expr(2) / (1 + *k)));
    return b.build(std::move(name));
}

VectorField euler_projective(int n)
{
    FieldBuilder b;
    b.on(t_var(), t_var() * t_var());
    for (int c = 1; c <= n; ++c) {
        b.on(x_var(c), t_var() * x_var(c));
        b.on(V(c), -(I() * x_var(c) + t_var() * V(c)));
        b.on(cV(c), I() * x_var(c) - t_var() * cV(c));
    }
    return b.build("A");
}

} // namespace cat

namespace {

// Parameters -----------------------------------------------------------------

Expr param(const CatalogKey &key, const std::string &name, const Expr &fallback)
{
    auto it = key.params.find(name);
    if (it == key.params.end())
        return fallback;
    try {
        return parse(it->second, symbols_for(key));
    } catch (const std::exception &err) {
        throw CatalogError("parameter " + name + "=" + it->second + ": " + err.what());
    }
}

std::string param_text(const CatalogKey &key, const std::string &name, const std::string &fallback)
{
    auto it = key.params.find(name);
    return it == key.params.end() ? fallback : it->second;
}

int euler_case(const CatalogKey &key)
{
    std::string c = param_text(key, "case", "1");
    if (c.size() != 1 || c[0] < '1' || c[0] > '5')
        throw CatalogError("euler-system case must be 1..5, got " + c);
    return c[0] - '0';
}

Expr euler_k(const CatalogKey &key)
{
    Expr k = param(key, "k", constant("k"));
    if (k.is_zero())
        throw CatalogError("euler-system case 2 requires k != 0; F = C|psi|^0 is case 4 (F = C)");
    if (k == Expr(-1))
        throw CatalogError("euler-system case 2 requires k != -1; F = C|psi|^-1 is case 3 (F = C/|psi|)");
    return k;
}

bool kdv_const_F(const CatalogKey &key)
{
    std::string f = param_text(key, "F", "arbitrary");
    if (f != "const" && f != "arbitrary")
        throw CatalogError("kdv-system F must be const or arbitrary, got " + f);
    return f == "const";
}

bool literal_reading(const CatalogKey &key)
{
    std::string r = param_text(key, "reading", "index");
    if (r != "index" && r != "literal")
        throw CatalogError("convection reading must be index or literal, got " + r);
    return r == "literal";
}

void check_n(const CatalogKey &key)
{
    if (key.n < 1 || key.n > 6)
        throw CatalogError("spatial dimension n must be in 1..6, got " + std::to_string(key.n));
}

// Equations ------------------------------------------------------------------

EquationSystem schrodinger_with_potential(int n, const std::string &name, int max_order = 2)
{
    EquationSystem sys;
    sys.name = name;
    sys.space = JetSpace::schrodinger(n, true, false, max_order);
    sys.residuals.push_back(I() * d1("psi", 0) + laplacian("psi", n) + W() * psi());
    sys.labels.push_back("schrodinger");
    sys.solved.push_back({d1("psi", 0), I() * (laplacian("psi", n) + W() * psi())});
    return sys;
}

Expr euler_F(const CatalogKey &key, int c)
{
    Expr m = psi() * cpsi();
    Expr C = constant("C", true);
    switch (c) {
    case 1:
        return func("F", {m}, {}, true);
    case 2: {
        Expr k = euler_k(key);
        if (k.is_number() && k.number().is_real())
            return C * pow(m, k.number().re() / 2);
        return C * exp(k * rat(1, 2) * (log(psi()) + log(cpsi())));
    }
    case 3:
        return C * pow(m, Rational(-1, 2));
    case 4:
        return C;
    default:
        return Expr(0);
    }
}

} // namespace

const std::vector<std::string> &family_names()
{
    static const std::vector<std::string> names{"theorem1",   "laplace-system", "heat-system", "wave-system",
                                                "hj-system",  "kdv-system",     "convection",  "euler-system",
                                                "contact",    "subalg-exp",     "subalg-trig", "subalg-poly"};
    return names;
}

std::string canonical_family(const std::string &name)
{
    for (const auto &f : family_names())
        if (f == name)
            return f;
    for (const char *base : {"laplace", "heat", "wave", "hj", "kdv", "euler"})
        if (name == base)
            return name + "-system";
    throw CatalogError("unknown family '" + name + "'");
}

std::string section_of(const std::string &family)
{
    std::string f = canonical_family(family);
    if (f == "theorem1")
        return "sec2-theorem1";
    if (f.ends_with("-system") && f != "euler-system")
        return "sec3-" + f.substr(0, f.size() - 7);
    if (f.starts_with("subalg-"))
        return "sec4-" + f.substr(7);
    if (f == "convection")
        return "sec5-convection";
    if (f == "euler-system")
        return "sec5-euler";
    return "sec6-contact";
}

SymbolTable symbols_for(const CatalogKey &key)
{
    std::string f = canonical_family(key.family);
    JetSpace space;
    if (f == "convection" || f == "euler-system")
        space = JetSpace::schrodinger(key.n, false, true);
    else if (f == "contact")
        space = JetSpace{1, {"psi", "V"}, 2};
    else
        space = JetSpace::schrodinger(key.n, true, false, f == "kdv-system" ? 3 : 2);
    SymbolTable s = SymbolTable::standard(space);
    s.constants["F0"] = false;
    return s;
}

EquationSystem build_equation(const CatalogKey &key_in)
{
    CatalogKey key = key_in;
    key.family = canonical_family(key.family);
    check_n(key);
    const std::string &f = key.family;
    const int n = key.n;
    EquationSystem sys;
    if (f == "theorem1" || f.starts_with("subalg-")) {
        sys = schrodinger_with_potential(n, f == "theorem1" ? "schrodinger-potential" : f);
        sys.notes.push_back("W enters undifferentiated, so the |psi|-dependence of W needs no rewrite rule here");
    } else if (f == "laplace-system") {
        sys = schrodinger_with_potential(n, f);
        sys.residuals.push_back(laplacian("W", n));
        sys.labels.push_back("laplace");
        Expr rest = Expr(0);
        for (int a = 1; a < n; ++a)
            rest = rest - d2("W", a, a);
        sys.solved.push_back({d2("W", n, n), rest});
    } else if (f == "heat-system") {
        Expr lambda = param(key, "lambda", constant("lambda"));
        sys = schrodinger_with_potential(n, f);
        sys.residuals.push_back(d1("W", 0) + lambda * laplacian("W", n));
        sys.labels.push_back("heat");
        sys.solved.push_back({d1("W", 0), -(lambda * laplacian("W", n))});
        sys.parameters.push_back("lambda");
        sys.notes.push_back("W0 read as the time derivative of W");
    } else if (f == "wave-system") {
        sys = schrodinger_with_potential(n, f);
        sys.residuals.push_back(d2("W", 0, 0) - laplacian("W", n));
        sys.labels.push_back("wave");
        sys.solved.push_back({d2("W", 0, 0), laplacian("W", n)});
    } else if (f == "hj-system") {
        Expr lambda = param(key, "lambda", constant("lambda"));
        std::vector<Expr> sq;
        for (int a = 1; a <= n; ++a)
            sq.push_back(d1("W", a) * d1("W", a));
        Expr grad2 = add(std::move(sq));
        sys = schrodinger_with_potential(n, f);
        sys.residuals.push_back(d1("W", 0) - lambda * grad2);
        sys.labels.push_back("hamilton-jacobi");
        sys.solved.push_back({d1("W", 0), lambda * grad2});
        sys.parameters.push_back("lambda");
    } else if (f == "kdv-system") {
        if (n != 1)
            throw CatalogError("kdv-system is defined for n = 1 only");
        Expr l1 = param(key, "lambda1", constant("lambda1"));
        Expr l2 = param(key, "lambda2", constant("lambda2"));
        Expr F = kdv_const_F(key) ? constant("F0") : func("F", {psi() * cpsi()});
        sys = schrodinger_with_potential(1, f, 3);
        Expr Wxxx = djet("W", {0, 3});
        sys.residuals.push_back(d1("W", 0) + l1 * W() * d1("W", 1) + l2 * Wxxx - F);
        sys.labels.push_back("kdv");
        sys.solved.push_back({d1("W", 0), -(l1 * W() * d1("W", 1)) - l2 * Wxxx + F});
        sys.parameters = {"lambda1", "lambda2"};
        if (l1.is_zero())
            sys.notes.push_back("lambda1 = 0");
    } else if (f == "convection" || f == "euler-system") {
        sys.name = f;
        sys.space = JetSpace::schrodinger(n, false, true);
        std::vector<Expr> conv;
        for (int a = 1; a <= n; ++a)
            conv.push_back(V(a) * d1("psi", a));
        Expr vgrad = add(std::move(conv));
        sys.residuals.push_back(I() * d1("psi", 0) + laplacian("psi", n) - vgrad);
        sys.labels.push_back("convection");
        sys.solved.push_back({d1("psi", 0), I() * (laplacian("psi", n) - vgrad)});
        if (f == "euler-system") {
            int c = euler_case(key);
            Expr F = euler_F(key, c);
            for (int a = 1; a <= n; ++a) {
                std::vector<Expr> adv;
                for (int b = 1; b <= n; ++b)
                    adv.push_back(V(b) * d1("V" + idx(a), b));
                Expr advect = add(std::move(adv));
                sys.residuals.push_back(I() * d1("V" + idx(a), 0) - advect - F * d1("psi", a));
                sys.labels.push_back("euler" + idx(a));
                sys.solved.push_back({d1("V" + idx(a), 0), -(I() * (advect + F * d1("psi", a)))});
            }
            sys.parameters.push_back("case=" + std::to_string(c));
        }
    } else if (f == "contact") {
        if (n != 1)
            throw CatalogError("contact is defined for n = 1 only");
        sys.name = f;
        sys.space = JetSpace{1, {"psi", "V"}, 2};
        sys.residuals.push_back(I() * d1("psi", 0) + d2("psi", 1, 1) - jet("V"));
        sys.labels.push_back("contact");
        sys.solved.push_back({d2("psi", 1, 1), jet("V") - I() * d1("psi", 0)});
        sys.notes.push_back("V is an independent dependent variable; no conjugate equation is adjoined");
        validate_system(sys);
        return sys;
    }
    adjoin_conjugates(sys);
    validate_system(sys);
    return sys;
}

std::vector<VectorField> build_family(const CatalogKey &key_in)
{
    CatalogKey key = key_in;
    key.family = canonical_family(key.family);
    check_n(key);
    const std::string &f = key.family;
    const int n = key.n;
    std::vector<VectorField> out;
    if (f == "theorem1") {
        for (int a = 1; a <= n; ++a)
            for (int b = a + 1; b <= n; ++b)
                out.push_back(J(a, b));
        for (int a = 1; a <= n; ++a)
            out.push_back(Qa(a, tfunc("U" + idx(a)), "Q" + idx(a)));
        out.push_back(QA(n, tfunc("A"), "QA"));
        out.push_back(QB(tfunc("B"), "QB"));
        out.push_back(Z1());
        out.push_back(Z2());
        // specializations
        out.push_back(QA(n, rat(1, 2), "P0"));
        for (int a = 1; a <= n; ++a)
            out.push_back(Qa(a, 1, "P" + idx(a)));
        for (int a = 1; a <= n; ++a)
            out.push_back(Qa(a, t_var(), "G" + idx(a)));
        out.push_back(QA(n, t_var(), "D"));
        out.push_back(QA(n, t_var() * t_var() * rat(1, 2), "A"));
    } else if (f == "laplace-system") {
        add_euclid(out, n);
        for (int a = 1; a <= n; ++a)
            out.push_back(Qa(a, tfunc("U" + idx(a)), "Q" + idx(a)));
        out.push_back(QA(n, t_var(), "D"));
        out.push_back(QA(n, t_var() * t_var() * rat(1, 2), "A"));
        out.push_back(QB(tfunc("B"), "QB"));
        out.push_back(Z1());
        out.push_back(Z2());
    } else if (f == "heat-system" || f == "wave-system" || f == "hj-system") {
        add_euclid(out, n);
        if (f == "heat-system")
            out.push_back(QA(n, t_var(), "D"));
        out.push_back(Z1());
        out.push_back(Z2());
        out.push_back(QB(t_var(), "Z3"));
        if (f == "wave-system")
            out.push_back(QB(t_var() * t_var(), "Z4"));
    } else if (f == "kdv-system") {
        if (n != 1)
            throw CatalogError("kdv-system is defined for n = 1 only");
        Expr l1 = param(key, "lambda1", constant("lambda1"));
        if (l1.is_zero())
            l1 = constant("lambda1"); // 1/lambda1 is undefined; keep it symbolic
        out.push_back(P0());
        out.push_back(Pa(1));
        out.push_back(QB(1, "Z"));
        out.push_back(FieldBuilder()
                          .on(x_var(1), t_var())
                          .phase(I() * rat(1, 2) * (x_var(1) + 2 * t_var() / l1))
                          .on(W(), Expr(1) / l1)
                          .build("G"));
        if (kdv_const_F(key)) {
            out.push_back(Z1());
            out.push_back(Z2());
        }
    } else if (f == "convection") {
        bool literal = literal_reading(key);
        out.push_back(QA_conv(n, tfunc("A"), "QA"));
        for (int a = 1; a <= n; ++a)
            for (int b = a + 1; b <= n; ++b)
                out.push_back(J_conv(a, b, tfunc("E" + idx(a) + idx(b)), "Q" + idx(a) + idx(b)));
        for (int a = 1; a <= n; ++a)
            out.push_back(Q_conv(n, a, tfunc("U" + idx(a)), literal, "Q" + idx(a)));
        out.push_back(Z1());
        out.push_back(Z2());
        out.push_back(Z3_conv());
        out.push_back(Z4_conv());
        for (int a = 1; a <= n; ++a)
            out.push_back(Q_conv(n, a, t_var(), false, "G" + idx(a)));
    } else if (f == "euler-system") {
        int c = euler_case(key);
        out.push_back(P0());
        for (int a = 1; a <= n; ++a)
            out.push_back(Pa(a));
        for (int a = 1; a <= n; ++a)
            for (int b = a + 1; b <= n; ++b)
                out.push_back(J_conv(a, b, 1, "J" + idx(a) + idx(b)));
        for (int a = 1; a <= n; ++a)
            out.push_back(Q_conv(n, a, t_var(), false, "G" + idx(a)));
        if (c == 2) {
            Expr k = euler_k(key);
            out.push_back(euler_dilation(n, &k, "D1"));
        } else if (c == 3) {
            out.push_back(FieldBuilder().scale(1).build("Z"));
        } else if (c == 4) {
            Expr k = Expr(0);
            out.push_back(euler_dilation(n, &k, "D1"));
            out.push_back(Z3_conv());
            out.push_back(Z4_conv());
        } else if (c == 5) {
            out.push_back(euler_dilation(n, nullptr, "D"));
            out.push_back(euler_projective(n));
            out.push_back(Z1());
            out.push_back(Z2());
            out.push_back(Z3_conv());
            out.push_back(Z4_conv());
        }
    } else if (f == "contact") {
        if (n != 1)
            throw CatalogError("contact is defined for n = 1 only");
        Expr pt = d1("psi", 0), px = d1("psi", 1), p = psi(), x = x_var(1), t = t_var();
        Expr F1 = tfunc("F1");
        out.push_back(contact_field("QF1", F1 * pt, I() * dt(F1) * pt));
        Expr F2 = func("F2", {t, x, p, px});
        auto D = [](Expr e, std::initializer_list<Expr> vars) {
            for (const auto &v : vars)
                e = diff(e, v);
            return e;
        };
        Expr a = I() * pt - jet("V");
        Expr mu = I() * D(F2, {t}) + I() * pt * D(F2, {p}) + D(F2, {x, x}) + 2 * D(F2, {x, p}) * px +
                  px * px * D(F2, {p, p}) - a * (2 * D(F2, {x, px}) + 2 * px * D(F2, {p, px}) + D(F2, {p})) +
                  a * a * D(F2, {px, px});
        out.push_back(contact_field("QF2", F2, mu));
        out.push_back(contact_field("QF1s", pt, 0));
        out.push_back(contact_field("QF2s", -(px * px), -2 * a * a));
    } else if (f.starts_with("subalg-")) {
        add_euclid(out, n);
        out.push_back(Z1());
        out.push_back(Z2());
        if (f == "subalg-exp") {
            Expr g = param(key, "gamma", constant("gamma"));
            Expr e = exp(g * t_var());
            for (int a = 1; a <= n; ++a)
                out.push_back(Qa(a, e, "Q" + idx(a)));
            out.push_back(QB(e, "QB"));
        } else if (f == "subalg-trig") {
            Expr nu = param(key, "nu", constant("nu"));
            for (int a = 1; a <= n; ++a)
                out.push_back(Qa(a, cos(nu * t_var()), "Q1_" + idx(a)));
            for (int a = 1; a <= n; ++a)
                out.push_back(Qa(a, sin(nu * t_var()), "Q2_" + idx(a)));
            out.push_back(QB(sin(nu * t_var()), "X1"));
            out.push_back(QB(cos(nu * t_var()), "X2"));
        } else {
            Expr kd = param(key, "k", Expr(2));
            if (!kd.is_number() || !kd.number().is_rational_integer() || kd.number().re() < 1 ||
                kd.number().re() > 8)
                throw CatalogError("subalg-poly degree k must be an integer in 1..8");
            long k = kd.number().re().get_num().get_si();
            for (long j = 1; j <= k; ++j)
                for (int a = 1; a <= n; ++a)
                    out.push_back(Qa(a, pow(t_var(), Rational(k - j + 1)),
                                     "Q" + std::to_string(j) + "_" + idx(a)));
            for (long j = 1; j <= 2 * k - 2; ++j)
                out.push_back(QB(pow(t_var(), Rational(j)), "QB" + std::to_string(j)));
        }
    }
    return out;
}

std::vector<ExpectedFailure> build_negative_checks(const CatalogKey &key_in)
{
    CatalogKey key = key_in;
    key.family = canonical_family(key.family);
    const int n = key.n;
    std::vector<ExpectedFailure> out;
    if (key.family == "theorem1") {
        FieldBuilder b;
        b.on(t_var(), 2 * t_var());
        for (int c = 1; c <= n; ++c)
            b.on(x_var(c), x_var(c));
        out.push_back({b.build("D-truncated"), "dilation without its psi and W terms"});
    } else if (key.family == "kdv-system") {
        Expr l1 = param(key, "lambda1", constant("lambda1"));
        for (const auto &X : build_family(key)) {
            if (X.name == "G" && l1.is_zero())
                out.push_back({X, "Galilei operator needs lambda1 != 0"});
        }
        if (!kdv_const_F(key)) {
            out.push_back({Z1(), "Z1 needs F = const"});
            out.push_back({Z2(), "Z2 needs F = const"});
        }
    } else if (key.family == "euler-system") {
        int c = euler_case(key);
        if (c == 1) {
            Expr k = constant("k");
            out.push_back({euler_dilation(n, &k, "D1"), "D1 needs F = C|psi|^k"});
        }
        if (c == 4)
            out.push_back({euler_projective(n), "A needs F = 0"});
    } else if (key.family == "convection" && n >= 2 && !literal_reading(key)) {
        for (int a = 1; a <= n; ++a)
            out.push_back({Q_conv(n, a, tfunc("U" + idx(a)), true, "Q" + idx(a) + "-summed"),
                           "Q_a with the x-derivative summed over c"});
    }
    return out;
}

// ---------------------------------------------------------------------------
// Closure

namespace {

bool has_variable(const Expr &e)
{
    for (const auto &a : free_atoms(e))
        if (a.kind() == Kind::Indep || a.kind() == Kind::Jet)
            return true;
    return false;
}

/// Rows of the linear system sum_k c_k X_k = target, one per (direction,
/// variable monomial).
struct SpanSystem {
    ExprMap<ExprMap<std::pair<std::vector<Expr>, Expr>>> rows;
    std::size_t m = 0;

    std::pair<std::vector<Expr>, Expr> &row(const Expr &dir, const Expr &mono)
    {
        auto &r = rows[dir][mono];
        if (r.first.empty())
            r.first.assign(m, Expr(0));
        return r;
    }

    template <class Sink>
    static void split(const Expr &coef, Sink sink)
    {
        for (const auto &term : terms_of(coef)) {
            if (term.is_zero())
                continue;
            auto [c, mono] = split_coefficient(term);
            std::vector<Expr> var, cst{num(c)};
            for (const auto &f : factors_of(mono))
                (has_variable(f) ? var : cst).push_back(f);
            sink(mul(std::move(var)), mul(std::move(cst)));
        }
    }
};

std::optional<std::vector<Expr>> solve_span(const VectorField &target, const std::vector<VectorField> &gens)
{
    SpanSystem sys;
    sys.m = gens.size();
    for (std::size_t k = 0; k < gens.size(); ++k)
        for (const auto &[d, c] : gens[k].coeffs)
            SpanSystem::split(c, [&](const Expr &mono, const Expr &v) {
                auto &r = sys.row(d, mono);
                r.first[k] = r.first[k] + v;
            });
    for (const auto &[d, c] : target.coeffs)
        SpanSystem::split(c, [&](const Expr &mono, const Expr &v) {
            auto &r = sys.row(d, mono);
            r.second = r.second + v;
        });

    std::vector<std::vector<Expr>> A;
    std::vector<Expr> b;
    for (auto &[d, byMono] : sys.rows)
        for (auto &[mono, r] : byMono) {
            A.push_back(r.first);
            b.push_back(r.second);
        }
    const std::size_t m = gens.size();
    std::vector<std::size_t> pivots;
    std::size_t rank = 0;
    for (std::size_t col = 0; col < m && rank < A.size(); ++col) {
        std::size_t best = A.size();
        for (std::size_t r = rank; r < A.size(); ++r) {
            if (A[r][col].is_number() ? A[r][col].is_zero() : is_zero(A[r][col]))
                continue;
            if (best == A.size() || (A[r][col].is_number() && !A[best][col].is_number()))
                best = r;
        }
        if (best == A.size())
            continue;
        std::swap(A[rank], A[best]);
        std::swap(b[rank], b[best]);
        Expr p = A[rank][col];
        for (std::size_t k = col; k < m; ++k)
            A[rank][k] = A[rank][k] / p;
        b[rank] = b[rank] / p;
        for (std::size_t r = 0; r < A.size(); ++r) {
            if (r == rank || A[r][col].is_zero())
                continue;
            Expr fac = A[r][col];
            for (std::size_t k = col; k < m; ++k)
                A[r][k] = A[r][k] - fac * A[rank][k];
            b[r] = b[r] - fac * b[rank];
        }
        pivots.push_back(col);
        ++rank;
    }
    for (std::size_t r = rank; r < A.size(); ++r)
        if (!is_zero(b[r]))
            return std::nullopt;
    std::vector<Expr> c(m, Expr(0));
    for (std::size_t i = 0; i < pivots.size(); ++i)
        c[pivots[i]] = b[i];
    // exact confirmation on the fields themselves
    std::vector<std::pair<Expr, VectorField>> combo{{Expr(-1), target}};
    for (std::size_t k = 0; k < m; ++k)
        if (!is_zero(c[k]))
            combo.emplace_back(c[k], gens[k]);
    if (!is_zero_field(combine(combo)))
        return std::nullopt;
    return c;
}

} // namespace

ClosureResult closure_check(const std::vector<VectorField> &gens)
{
    auto start = std::chrono::steady_clock::now();
    ClosureResult out;
    out.report.subject = "closure";
    for (std::size_t i = 0; i < gens.size(); ++i)
        for (std::size_t j = i + 1; j < gens.size(); ++j) {
            VectorField B = lie_bracket(gens[i], gens[j]);
            CheckItem item;
            item.id = "[" + gens[i].name + "," + gens[j].name + "]";
            auto c = solve_span(B, gens);
            if (!c) {
                item.zero = false;
                item.residual = print_field(B);
                item.note = "bracket is not in the span";
                out.report.add(std::move(item));
                continue;
            }
            std::string expansion;
            for (std::size_t k = 0; k < gens.size(); ++k) {
                if (is_zero((*c)[k]))
                    continue;
                out.constants.push_back({i, j, k, (*c)[k]});
                // products print bare, sums and fractions get parentheses
                const Expr &ck = (*c)[k];
                std::string coef = print(ck);
                bool bare = ck.kind() != Kind::Add && coef.find('/') == std::string::npos;
                std::string term = ck.is_one() ? gens[k].name : (bare ? coef : "(" + coef + ")") + "*" + gens[k].name;
                expansion += (expansion.empty() ? "" : " + ") + term;
            }
            item.zero = true;
            item.residual = "0";
            item.note = expansion.empty() ? "0" : expansion;
            out.report.add(std::move(item));
        }
    out.report.timing_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    return out;
}

CheckReport bracket_identities(const std::vector<VectorField> &gens, std::size_t samples, std::uint64_t seed)
{
    auto start = std::chrono::steady_clock::now();
    CheckReport rep;
    rep.subject = "bracket identities";
    if (gens.size() < 2)
        return rep;
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> pick(0, gens.size() - 1);
    auto item = [](std::string id, const VectorField &F) {
        CheckItem it;
        it.id = std::move(id);
        it.zero = is_zero_field(F);
        it.residual = it.zero ? "0" : print_field(F);
        return it;
    };
    for (std::size_t s = 0; s < samples; ++s) {
        std::size_t i = pick(rng), j = pick(rng), k = pick(rng);
        const auto &X = gens[i], &Y = gens[j], &Z = gens[k];
        rep.add(item("antisymmetry [" + X.name + "," + Y.name + "]",
                     combine({{1, lie_bracket(X, Y)}, {1, lie_bracket(Y, X)}})));
        VectorField jac = combine({{1, lie_bracket(lie_bracket(X, Y), Z)},
                                   {1, lie_bracket(lie_bracket(Y, Z), X)},
                                   {1, lie_bracket(lie_bracket(Z, X), Y)}});
        rep.add(item("jacobi (" + X.name + "," + Y.name + "," + Z.name + ")", jac));
    }
    rep.timing_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    return rep;
}

} // namespace jetsym
