#include <algorithm>
#include <set>

#include "jetsym/expr.hpp"
#include "expr_internal.hpp"

namespace jetsym {

namespace detail {

namespace {

std::size_t mix(std::size_t h, std::size_t v) { return h ^ (v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2)); }

} // namespace

Expr finish(Node n)
{
    std::size_t h = static_cast<std::size_t>(n.kind) * 1315423911u;
    h = mix(h, n.value.hash());
    h = mix(h, std::hash<std::string>{}(n.name));
    for (int i : n.index)
        h = mix(h, static_cast<std::size_t>(i + 17));
    h = mix(h, n.complex_valued ? 3 : 5);
    h = mix(h, n.conjugated ? 7 : 11);
    if (n.kind == Kind::Pow)
        h = mix(h, hash_value(n.exponent));
    std::uint64_t sig = 0;
    for (const auto &a : n.args) {
        h = mix(h, a.hash());
        sig |= a.node().signature;
    }
    n.hash = h;
    if (n.kind == Kind::Constant || n.kind == Kind::Indep || n.kind == Kind::Jet)
        sig = std::uint64_t{1} << (h % 64);
    n.signature = sig;
    return Expr(std::make_shared<const Node>(std::move(n)));
}

Expr make_number(const Complex &c)
{
    Node n;
    n.kind = Kind::Number;
    n.value = c;
    return finish(std::move(n));
}

Expr make_raw(Kind kind, std::vector<Expr> args)
{
    Node n;
    n.kind = kind;
    n.args = std::move(args);
    return finish(std::move(n));
}

Expr make_pow_raw(const Expr &base, const Rational &q)
{
    Node n;
    n.kind = Kind::Pow;
    n.exponent = q;
    n.args = {base};
    return finish(std::move(n));
}

const Expr &zero()
{
    static const Expr z = make_number(Complex(0));
    return z;
}

const Expr &one()
{
    static const Expr o = make_number(Complex(1));
    return o;
}

int degree(const Expr &mono)
{
    switch (mono.kind()) {
    case Kind::Number:
        return 0;
    case Kind::Mul: {
        int d = 0;
        for (const auto &f : mono.args())
            d += degree(f);
        return d;
    }
    case Kind::Pow: {
        const Rational &q = mono.node().exponent;
        if (sgn(q) > 0 && is_integer(q) && q.get_num().fits_sint_p())
            return static_cast<int>(q.get_num().get_si());
        return 1;
    }
    default:
        return 1;
    }
}

} // namespace detail

using detail::make_number;
using detail::make_pow_raw;
using detail::make_raw;

// ---------------------------------------------------------------------------
// Expr basics

Expr::Expr() : node_(detail::zero().node_) {}
Expr::Expr(long v) : Expr(make_number(Complex(v))) {}
Expr::Expr(const Complex &v) : Expr(make_number(v)) {}

Kind Expr::kind() const { return node_->kind; }
std::size_t Expr::hash() const { return node_->hash; }
bool Expr::is_zero() const { return node_->kind == Kind::Number && node_->value.is_zero(); }
bool Expr::is_one() const { return node_->kind == Kind::Number && node_->value.is_one(); }
const Complex &Expr::number() const { return node_->value; }
const std::vector<Expr> &Expr::args() const { return node_->args; }
const std::string &Expr::name() const { return node_->name; }

bool operator==(const Expr &a, const Expr &b)
{
    if (a.get() == b.get())
        return true;
    if (a.hash() != b.hash())
        return false;
    return compare(a, b) == 0;
}

namespace {

int cmp_int(long a, long b) { return a < b ? -1 : (a > b ? 1 : 0); }

int compare_vec(const std::vector<Expr> &a, const std::vector<Expr> &b)
{
    std::size_t n = std::min(a.size(), b.size());
    for (std::size_t i = 0; i < n; ++i) {
        int c = compare(a[i], b[i]);
        if (c != 0)
            return c;
    }
    return cmp_int(static_cast<long>(a.size()), static_cast<long>(b.size()));
}

int compare_index(const std::vector<int> &a, const std::vector<int> &b)
{
    long oa = 0, ob = 0;
    for (int v : a)
        oa += v;
    for (int v : b)
        ob += v;
    if (oa != ob)
        return cmp_int(oa, ob);
    std::size_t n = std::max(a.size(), b.size());
    for (std::size_t i = 0; i < n; ++i) {
        int va = i < a.size() ? a[i] : 0;
        int vb = i < b.size() ? b[i] : 0;
        if (va != vb)
            return cmp_int(vb, va); // more t-derivatives first
    }
    return 0;
}

} // namespace

int compare(const Expr &a, const Expr &b)
{
    if (a.get() == b.get())
        return 0;
    const Node &x = a.node();
    const Node &y = b.node();
    if (x.kind != y.kind)
        return cmp_int(static_cast<int>(x.kind), static_cast<int>(y.kind));
    switch (x.kind) {
    case Kind::Number:
        return x.value.compare(y.value);
    case Kind::Constant:
        if (int c = x.name.compare(y.name))
            return c < 0 ? -1 : 1;
        return cmp_int(x.conjugated, y.conjugated);
    case Kind::Indep:
        return cmp_int(x.index[0], y.index[0]);
    case Kind::Jet:
        if (int c = x.name.compare(y.name))
            return c < 0 ? -1 : 1;
        return compare_index(x.index, y.index);
    case Kind::Func: {
        if (int c = x.name.compare(y.name))
            return c < 0 ? -1 : 1;
        if (x.conjugated != y.conjugated)
            return cmp_int(x.conjugated, y.conjugated);
        if (int c = compare_index(x.index, y.index))
            return c;
        return compare_vec(x.args, y.args);
    }
    case Kind::Pow: {
        if (int c = compare(x.args[0], y.args[0]))
            return c;
        int c = cmp(x.exponent, y.exponent);
        return c < 0 ? -1 : (c > 0 ? 1 : 0);
    }
    default:
        return compare_vec(x.args, y.args);
    }
}

// ---------------------------------------------------------------------------
// Atoms

Expr num(const Complex &c) { return make_number(c); }
Expr rat(long p, long q) { return make_number(Complex(make_rational(p, q))); }
Expr imag_unit() { return make_number(Complex::i()); }

Expr indep(int index)
{
    if (index < 0)
        throw std::invalid_argument("negative independent-variable index");
    Node n;
    n.kind = Kind::Indep;
    n.index = {index};
    n.name = index == 0 ? "t" : "x" + std::to_string(index);
    return detail::finish(std::move(n));
}

Expr t_var() { return indep(0); }
Expr x_var(int a) { return indep(a); }

Expr constant(const std::string &name, bool complex_valued)
{
    Node n;
    n.kind = Kind::Constant;
    n.name = name;
    n.complex_valued = complex_valued;
    return detail::finish(std::move(n));
}

Expr jet(const std::string &dependent, std::vector<int> multi_index)
{
    while (!multi_index.empty() && multi_index.back() == 0)
        multi_index.pop_back();
    for (int v : multi_index)
        if (v < 0)
            throw std::invalid_argument("negative derivative count in jet coordinate");
    Node n;
    n.kind = Kind::Jet;
    n.name = dependent;
    n.index = std::move(multi_index);
    return detail::finish(std::move(n));
}

Expr func(const std::string &name, std::vector<Expr> args, std::vector<int> derivs, bool complex_valued)
{
    derivs.resize(args.size(), 0);
    Node n;
    n.kind = Kind::Func;
    n.name = name;
    n.args = std::move(args);
    n.index = std::move(derivs);
    n.complex_valued = complex_valued;
    return detail::finish(std::move(n));
}

Expr detail::with_conjugated(const Expr &atom, bool conjugated, std::vector<Expr> args)
{
    Node n = atom.node();
    n.conjugated = conjugated;
    if (n.kind == Kind::Func)
        n.args = std::move(args);
    return finish(std::move(n));
}

std::string conjugate_dependent(const std::string &dep)
{
    if (dep == "psi")
        return "cpsi";
    if (dep == "cpsi")
        return "psi";
    if (dep.size() >= 2 && dep[0] == 'c' && dep[1] == 'V')
        return dep.substr(1);
    if (!dep.empty() && dep[0] == 'V')
        return "c" + dep;
    return dep;
}

// ---------------------------------------------------------------------------
// Term helpers

std::pair<Complex, Expr> split_coefficient(const Expr &term)
{
    if (term.kind() == Kind::Number)
        return {term.number(), detail::one()};
    if (term.kind() == Kind::Mul && term.args().front().kind() == Kind::Number) {
        const auto &a = term.args();
        if (a.size() == 2)
            return {a[0].number(), a[1]};
        return {a[0].number(), make_raw(Kind::Mul, std::vector<Expr>(a.begin() + 1, a.end()))};
    }
    return {Complex(1), term};
}

std::vector<Expr> terms_of(const Expr &e)
{
    if (e.kind() == Kind::Add)
        return e.args();
    if (e.is_zero())
        return {};
    return {e};
}

std::vector<Expr> factors_of(const Expr &monomial)
{
    if (monomial.kind() == Kind::Mul) {
        std::vector<Expr> out;
        for (const auto &f : monomial.args())
            if (f.kind() != Kind::Number)
                out.push_back(f);
        return out;
    }
    if (monomial.kind() == Kind::Number)
        return {};
    return {monomial};
}

std::pair<Expr, Rational> base_exponent(const Expr &factor)
{
    if (factor.kind() == Kind::Pow)
        return {factor.args()[0], factor.node().exponent};
    return {factor, Rational(1)};
}

// ---------------------------------------------------------------------------
// add

namespace {

Expr make_term(const Complex &c, const Expr &mono)
{
    if (mono.is_one())
        return make_number(c);
    if (c.is_one())
        return mono;
    std::vector<Expr> args{make_number(c)};
    if (mono.kind() == Kind::Mul)
        args.insert(args.end(), mono.args().begin(), mono.args().end());
    else
        args.push_back(mono);
    return make_raw(Kind::Mul, std::move(args));
}

void flatten_add(const Expr &e, std::vector<Expr> &out)
{
    if (e.kind() == Kind::Add)
        for (const auto &t : e.args())
            out.push_back(t);
    else if (!e.is_zero())
        out.push_back(e);
}

} // namespace

Expr add(std::vector<Expr> terms)
{
    std::vector<Expr> flat;
    flat.reserve(terms.size());
    for (const auto &t : terms)
        flatten_add(t, flat);
    if (flat.empty())
        return detail::zero();
    if (flat.size() == 1)
        return flat[0];

    ExprMap<Complex> acc;
    for (const auto &t : flat) {
        auto [c, m] = split_coefficient(t);
        auto it = acc.find(m);
        if (it == acc.end())
            acc.emplace(m, c);
        else
            it->second += c;
    }
    std::vector<std::pair<int, Expr>> keyed;
    keyed.reserve(acc.size());
    for (auto &[m, c] : acc)
        if (!c.is_zero())
            keyed.emplace_back(detail::degree(m), make_term(c, m));
    if (keyed.empty())
        return detail::zero();
    if (keyed.size() == 1)
        return keyed[0].second;
    std::stable_sort(keyed.begin(), keyed.end(), [](const auto &a, const auto &b) {
        if (a.first != b.first)
            return a.first < b.first;
        return compare(split_coefficient(a.second).second, split_coefficient(b.second).second) < 0;
    });
    std::vector<Expr> out;
    out.reserve(keyed.size());
    for (auto &k : keyed)
        out.push_back(std::move(k.second));
    return make_raw(Kind::Add, std::move(out));
}

// ---------------------------------------------------------------------------
// mul

namespace {

/// Leading-coefficient normalization of a sum: s = lc * s'.
std::pair<Complex, Expr> normalize_sum(const Expr &s)
{
    Complex lc = split_coefficient(s.args().front()).first;
    if (lc.is_one())
        return {lc, s};
    Complex inv = Complex(1) / lc;
    std::vector<Expr> scaled;
    scaled.reserve(s.args().size());
    for (const auto &t : s.args()) {
        auto [c, m] = split_coefficient(t);
        scaled.push_back(make_term(c * inv, m));
    }
    return {lc, make_raw(Kind::Add, std::move(scaled))};
}

struct Factors {
    Complex coeff{1};
    std::vector<std::pair<Expr, Rational>> powers;
    std::vector<Expr> exp_args;
    std::vector<Expr> raw_exps;
};

void collect_factor(const Expr &f, Factors &acc)
{
    switch (f.kind()) {
    case Kind::Number:
        acc.coeff *= f.number();
        return;
    case Kind::Mul:
        for (const auto &g : f.args())
            collect_factor(g, acc);
        return;
    case Kind::Exp:
        acc.exp_args.push_back(f.args()[0]);
        acc.raw_exps.push_back(f);
        return;
    case Kind::Add: {
        auto [lc, s] = normalize_sum(f);
        acc.coeff *= lc;
        acc.powers.emplace_back(s, Rational(1));
        return;
    }
    default:
        acc.powers.push_back(base_exponent(f));
        return;
    }
}

Expr numeric_power(const Complex &b, const Rational &q);

} // namespace

Expr mul(std::vector<Expr> factors)
{
    Factors acc;
    for (const auto &f : factors) {
        collect_factor(f, acc);
        if (acc.coeff.is_zero())
            return detail::zero();
    }

    std::vector<Expr> out_factors;
    if (acc.raw_exps.size() == 1) {
        out_factors.push_back(acc.raw_exps[0]);
    } else if (acc.raw_exps.size() > 1) {
        Expr merged = exp(add(acc.exp_args));
        for (const auto &g : merged.kind() == Kind::Mul ? merged.args() : std::vector<Expr>{merged}) {
            if (g.kind() == Kind::Number)
                acc.coeff *= g.number();
            else if (g.kind() == Kind::Exp)
                out_factors.push_back(g);
            else
                acc.powers.push_back(base_exponent(g));
        }
    }

    std::sort(acc.powers.begin(), acc.powers.end(),
              [](const auto &a, const auto &b) { return compare(a.first, b.first) < 0; });

    std::vector<Expr> sums; // expanded at the end, with multiplicity
    for (std::size_t i = 0; i < acc.powers.size();) {
        const Expr &base = acc.powers[i].first;
        Rational q = 0;
        std::size_t j = i;
        while (j < acc.powers.size() && acc.powers[j].first == base) {
            q += acc.powers[j].second;
            ++j;
        }
        i = j;
        if (sgn(q) == 0)
            continue;
        if (base.kind() == Kind::Number) {
            Expr p = numeric_power(base.number(), q);
            for (const auto &g : p.kind() == Kind::Mul ? p.args() : std::vector<Expr>{p}) {
                if (g.kind() == Kind::Number)
                    acc.coeff *= g.number();
                else
                    out_factors.push_back(g);
            }
            continue;
        }
        if (base.kind() == Kind::Add && sgn(q) > 0 && is_integer(q)) {
            long k = q.get_num().get_si();
            for (long r = 0; r < k; ++r)
                sums.push_back(base);
            continue;
        }
        out_factors.push_back(q == 1 ? base : make_pow_raw(base, q));
    }
    if (acc.coeff.is_zero())
        return detail::zero();

    std::sort(out_factors.begin(), out_factors.end(), [](const Expr &a, const Expr &b) {
        auto [ba, qa] = base_exponent(a);
        auto [bb, qb] = base_exponent(b);
        int c = compare(ba, bb);
        if (c != 0)
            return c < 0;
        return qa < qb;
    });

    Expr mono;
    if (out_factors.empty())
        mono = detail::one();
    else if (out_factors.size() == 1)
        mono = out_factors[0];
    else
        mono = make_raw(Kind::Mul, out_factors);

    if (sums.empty())
        return make_term(acc.coeff, mono);

    std::vector<Expr> current{make_term(acc.coeff, mono)};
    for (const auto &s : sums) {
        std::vector<Expr> next;
        next.reserve(current.size() * s.args().size());
        for (const auto &a : current)
            for (const auto &b : s.args())
                next.push_back(mul({a, b}));
        current = std::vector<Expr>{add(std::move(next))};
        current = terms_of(current[0]);
        if (current.empty())
            return detail::zero();
    }
    return add(std::move(current));
}

// ---------------------------------------------------------------------------
// pow

namespace {

Expr numeric_power(const Complex &b, const Rational &q)
{
    if (is_integer(q)) {
        if (!q.get_num().fits_slong_p())
            throw MathError("exponent too large");
        if (b.is_zero() && sgn(q) < 0)
            throw MathError("negative power of zero");
        return make_number(b.pow(q.get_num().get_si()));
    }
    if (b.is_zero()) {
        if (sgn(q) < 0)
            throw MathError("negative power of zero");
        return detail::zero();
    }
    if (b.is_one())
        return detail::one();
    if (b.is_positive()) {
        Rational out;
        if (exact_rational_power(b.re(), q, out))
            return make_number(Complex(out));
        Rational fl = floor(q);
        Complex int_part = b.pow(fl.get_num().get_si());
        Expr frac = make_pow_raw(make_number(b), q - fl);
        if (int_part.is_one())
            return frac;
        return make_raw(Kind::Mul, {make_number(int_part), frac});
    }
    return make_pow_raw(make_number(b), q);
}

} // namespace

Expr pow(const Expr &base, const Rational &exponent)
{
    Rational q = exponent;
    q.canonicalize();
    if (sgn(q) == 0)
        return detail::one();
    if (q == 1)
        return base;
    switch (base.kind()) {
    case Kind::Number:
        return numeric_power(base.number(), q);
    case Kind::Mul: {
        std::vector<Expr> fs;
        for (const auto &f : base.args())
            fs.push_back(pow(f, q));
        return mul(std::move(fs));
    }
    case Kind::Pow:
        return pow(base.args()[0], base.node().exponent * q);
    case Kind::Exp:
        return exp(mul({make_number(Complex(q)), base.args()[0]}));
    case Kind::Add: {
        if (sgn(q) > 0 && is_integer(q)) {
            std::vector<Expr> copies(q.get_num().get_ui(), base);
            return mul(std::move(copies));
        }
        Fraction fr = together(base);
        if (!fr.denominator.empty()) {
            std::vector<Expr> fs{pow(fr.numerator, q)};
            for (const auto &[b, d] : fr.denominator)
                fs.push_back(pow(b, -d * q));
            return mul(std::move(fs));
        }
        if (fr.numerator.kind() != Kind::Add)
            return pow(fr.numerator, q);
        auto [lc, s] = normalize_sum(fr.numerator);
        // (c s)^q = c^q s^q on principal branches only for c > 0
        if (!is_integer(q) && !lc.is_positive())
            return make_pow_raw(fr.numerator, q);
        return mul({numeric_power(lc, q), make_pow_raw(s, q)});
    }
    default:
        return make_pow_raw(base, q);
    }
}

// ---------------------------------------------------------------------------
// exp, log, trig

Expr exp(const Expr &arg)
{
    if (arg.is_zero())
        return detail::one();
    std::vector<Expr> pulled;
    std::vector<Expr> rest;
    for (const auto &t : terms_of(arg)) {
        auto [c, m] = split_coefficient(t);
        if (m.kind() == Kind::Log && c.is_real())
            pulled.push_back(pow(m.args()[0], c.re()));
        else
            rest.push_back(t);
    }
    if (pulled.empty())
        return make_raw(Kind::Exp, {arg});
    if (!rest.empty())
        pulled.push_back(make_raw(Kind::Exp, {add(rest)}));
    return mul(std::move(pulled));
}

Expr log(const Expr &arg)
{
    switch (arg.kind()) {
    case Kind::Number:
        if (arg.is_zero())
            throw MathError("log of zero");
        if (arg.is_one())
            return detail::zero();
        return make_raw(Kind::Log, {arg});
    case Kind::Exp:
        return arg.args()[0];
    case Kind::Mul: {
        std::vector<Expr> parts;
        for (const auto &f : arg.args())
            parts.push_back(log(f));
        return add(std::move(parts));
    }
    case Kind::Pow:
        return mul({make_number(Complex(arg.node().exponent)), log(arg.args()[0])});
    default:
        return make_raw(Kind::Log, {arg});
    }
}

Expr sin(const Expr &arg)
{
    Expr ia = imag_unit() * arg;
    return (exp(ia) - exp(-ia)) * num(Complex(0, make_rational(-1, 2)));
}

Expr cos(const Expr &arg)
{
    Expr ia = imag_unit() * arg;
    return (exp(ia) + exp(-ia)) * rat(1, 2);
}

Expr div(const Expr &a, const Expr &b)
{
    if (b.is_zero())
        throw MathError("division by zero");
    return mul({a, pow(b, Rational(-1))});
}

Expr operator+(const Expr &a, const Expr &b) { return add({a, b}); }
Expr operator-(const Expr &a, const Expr &b) { return add({a, mul({Expr(-1L), b})}); }
Expr operator-(const Expr &a) { return mul({Expr(-1L), a}); }
Expr operator*(const Expr &a, const Expr &b) { return mul({a, b}); }
Expr operator/(const Expr &a, const Expr &b) { return div(a, b); }
Expr &operator+=(Expr &a, const Expr &b) { return a = a + b; }
Expr &operator*=(Expr &a, const Expr &b) { return a = a * b; }

// ---------------------------------------------------------------------------
// canonicalize

Expr canonicalize(const Expr &e)
{
    switch (e.kind()) {
    case Kind::Number:
    case Kind::Constant:
    case Kind::Indep:
    case Kind::Jet:
        return e;
    case Kind::Func: {
        std::vector<Expr> args;
        for (const auto &a : e.args())
            args.push_back(canonicalize(a));
        return detail::rebuild_func(e, std::move(args));
    }
    case Kind::Add: {
        std::vector<Expr> ts;
        for (const auto &a : e.args())
            ts.push_back(canonicalize(a));
        return add(std::move(ts));
    }
    case Kind::Mul: {
        std::vector<Expr> fs;
        for (const auto &a : e.args())
            fs.push_back(canonicalize(a));
        return mul(std::move(fs));
    }
    case Kind::Pow:
        return pow(canonicalize(e.args()[0]), e.node().exponent);
    case Kind::Exp:
        return exp(canonicalize(e.args()[0]));
    case Kind::Log:
        return log(canonicalize(e.args()[0]));
    }
    return e;
}

Expr detail::rebuild_func(const Expr &f, std::vector<Expr> args)
{
    Node n = f.node();
    n.args = std::move(args);
    return finish(std::move(n));
}

Expr detail::rebuild(const Expr &e, std::vector<Expr> args)
{
    switch (e.kind()) {
    case Kind::Func:
        return rebuild_func(e, std::move(args));
    case Kind::Add:
        return add(std::move(args));
    case Kind::Mul:
        return mul(std::move(args));
    case Kind::Pow:
        return pow(args[0], e.node().exponent);
    case Kind::Exp:
        return exp(args[0]);
    case Kind::Log:
        return log(args[0]);
    default:
        return e;
    }
}

// ---------------------------------------------------------------------------
// Structure queries

bool is_atom(const Expr &e)
{
    Kind k = e.kind();
    return k == Kind::Constant || k == Kind::Indep || k == Kind::Jet;
}

bool contains(const Expr &e, const Expr &atom)
{
    if ((e.node().signature & atom.node().signature) == 0)
        return false;
    if (is_atom(e))
        return e == atom;
    for (const auto &a : e.args())
        if (contains(a, atom))
            return true;
    return false;
}

namespace {

void walk(const Expr &e, const std::function<void(const Expr &)> &visit, std::set<const Node *> &seen)
{
    if (!seen.insert(e.get()).second)
        return;
    visit(e);
    for (const auto &a : e.args())
        walk(a, visit, seen);
}

std::vector<Expr> collect(const Expr &e, const std::function<bool(const Expr &)> &pred)
{
    std::set<Expr, ExprLess> found;
    std::set<const Node *> seen;
    walk(e, [&](const Expr &x) {
        if (pred(x))
            found.insert(x);
    }, seen);
    return {found.begin(), found.end()};
}

} // namespace

std::vector<Expr> free_atoms(const Expr &e) { return collect(e, is_atom); }

std::vector<Expr> jets_of(const Expr &e)
{
    return collect(e, [](const Expr &x) { return x.kind() == Kind::Jet; });
}

std::vector<Expr> funcs_of(const Expr &e)
{
    return collect(e, [](const Expr &x) { return x.kind() == Kind::Func; });
}

int jet_order(const Expr &j)
{
    int o = 0;
    for (int v : j.node().index)
        o += v;
    return o;
}

bool depends_on_jets(const Expr &e)
{
    for (const auto &a : free_atoms(e))
        if (a.kind() == Kind::Jet)
            return true;
    return false;
}

} // namespace jetsym
