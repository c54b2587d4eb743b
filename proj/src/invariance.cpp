#include "jetsym/invariance.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <set>
#include <thread>

namespace jetsym {

namespace {

bool extends(const Expr &lead, const Expr &jt)
{
    if (lead.name() != jt.name())
        return false;
    const auto &a = lead.node().index;
    const auto &b = jt.node().index;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i] > (i < b.size() ? b[i] : 0))
            return false;
    return true;
}

bool has_pending(const Expr &e, const EquationSystem &sys)
{
    for (const auto &j : jets_of(e))
        for (const auto &s : sys.solved)
            if (extends(s.lead, j))
                return true;
    return false;
}

double elapsed_ms(std::chrono::steady_clock::time_point start)
{
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
}

std::vector<Expr> derivative_jets(const EquationSystem &sys)
{
    std::set<Expr, ExprLess> out;
    for (const auto &r : sys.residuals)
        for (const auto &j : jets_of(r))
            if (jet_order(j) > 0)
                out.insert(j);
    return {out.begin(), out.end()};
}

std::string label_of(const EquationSystem &sys, std::size_t i)
{
    return i < sys.labels.size() ? sys.labels[i] : "R" + std::to_string(i + 1);
}

} // namespace

void adjoin_conjugates(EquationSystem &sys)
{
    const std::size_t nres = sys.residuals.size();
    sys.labels.resize(nres);
    for (std::size_t i = 0; i < nres; ++i) {
        if (sys.labels[i].empty())
            sys.labels[i] = "R" + std::to_string(i + 1);
        Expr c = conj(sys.residuals[i]);
        bool known = false;
        for (const auto &r : sys.residuals)
            if (r == c || r == -c)
                known = true;
        if (!known) {
            sys.residuals.push_back(c);
            sys.labels.push_back("conj(" + sys.labels[i] + ")");
        }
    }
    const std::size_t nsol = sys.solved.size();
    for (std::size_t i = 0; i < nsol; ++i) {
        Expr lead = conj(sys.solved[i].lead);
        bool known = false;
        for (const auto &s : sys.solved)
            if (s.lead == lead)
                known = true;
        if (!known)
            sys.solved.push_back({lead, conj(sys.solved[i].rhs)});
    }
}

void validate_system(const EquationSystem &sys)
{
    for (std::size_t i = 0; i < sys.solved.size(); ++i) {
        if (sys.solved[i].lead.kind() != Kind::Jet)
            throw std::invalid_argument("solved form lead must be a jet coordinate, got " +
                                        print(sys.solved[i].lead));
        for (std::size_t j = 0; j < i; ++j)
            if (sys.solved[i].lead == sys.solved[j].lead)
                throw std::invalid_argument("duplicate solved form for " + print(sys.solved[i].lead));
    }
    for (const auto &r : sys.residuals)
        sys.space.validate(r, 1);
    for (std::size_t i = 0; i < sys.residuals.size(); ++i) {
        Expr red = residual_reduce(sys.residuals[i], sys);
        if (!is_zero(red))
            throw std::invalid_argument("residual " + label_of(sys, i) + " does not vanish under the solved forms: " +
                                        print(red));
    }
}

Expr residual_reduce(const Expr &e, const EquationSystem &sys)
{
    std::vector<Rule> rules;
    rules.reserve(sys.solved.size());
    for (const auto &s : sys.solved)
        rules.push_back({s.lead, s.rhs});
    const int bound = 10 * std::max(1, sys.space.max_order) * std::max<int>(1, sys.residuals.size());
    Expr cur = e;
    for (int pass = 0; has_pending(cur, sys); ++pass) {
        if (pass >= bound)
            throw ReductionError("reduction on " + sys.name + " did not reach a fixpoint in " +
                                 std::to_string(bound) + " passes");
        cur = substitute(cur, rules, SubstMode::Propagate);
    }
    if (!sys.constraints.empty())
        cur = substitute(cur, sys.constraints);
    return cur;
}

void CheckReport::add(CheckItem item)
{
    pass = pass && item.zero;
    items.push_back(std::move(item));
}

void CheckReport::append(const CheckReport &other)
{
    for (const auto &it : other.items)
        add(it);
    pass = pass && other.pass;
    timing_ms += other.timing_ms;
}

CheckReport check_invariance(const VectorField &X, const EquationSystem &sys)
{
    auto start = std::chrono::steady_clock::now();
    CheckReport rep;
    rep.subject = X.name + " on " + sys.name;
    VectorField Xp = prolong_for(X, derivative_jets(sys));
    for (std::size_t i = 0; i < sys.residuals.size(); ++i) {
        CheckItem item;
        item.id = X.name + ":" + label_of(sys, i);
        Expr r = residual_reduce(act(Xp, sys.residuals[i]), sys);
        item.zero = is_zero(r);
        item.residual = item.zero ? "0" : print(r);
        rep.add(std::move(item));
    }
    rep.timing_ms = elapsed_ms(start);
    return rep;
}

CheckReport check_family(const std::vector<VectorField> &fields, const EquationSystem &sys, int jobs)
{
    auto start = std::chrono::steady_clock::now();
    std::vector<CheckReport> parts(fields.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t k = next++; k < fields.size(); k = next++) {
            try {
                parts[k] = check_invariance(fields[k], sys);
            } catch (const std::exception &err) {
                CheckReport r;
                r.subject = fields[k].name + " on " + sys.name;
                r.add({fields[k].name, "", false, std::string("error: ") + err.what()});
                parts[k] = std::move(r);
            }
        }
    };
    const std::size_t nthreads = std::clamp<std::size_t>(jobs < 1 ? 1 : jobs, 1, std::max<std::size_t>(1, fields.size()));
    std::vector<std::thread> pool;
    for (std::size_t t = 1; t < nthreads; ++t)
        pool.emplace_back(worker);
    worker();
    for (auto &t : pool)
        t.join();
    CheckReport rep;
    rep.subject = sys.name;
    for (const auto &p : parts)
        rep.append(p);
    rep.timing_ms = elapsed_ms(start);
    return rep;
}

// ---------------------------------------------------------------------------
// Determining equations

namespace {

Expr normalize_row(const Expr &e)
{
    auto terms = terms_of(e);
    auto [c, mono] = split_coefficient(terms.front());
    return e * num(Complex(1) / c);
}

} // namespace

DeterminingSystem extract_determining(const VectorField &ansatz, const EquationSystem &sys)
{
    DeterminingSystem out;
    std::set<std::string> names;
    for (const auto &[d, c] : ansatz.coeffs)
        for (const auto &f : funcs_of(c))
            names.insert(f.name());
    out.unknowns.assign(names.begin(), names.end());

    VectorField Xp = prolong_for(ansatz, derivative_jets(sys));
    ExprMap<bool> seen;
    for (std::size_t i = 0; i < sys.residuals.size(); ++i) {
        Expr r = residual_reduce(act(Xp, sys.residuals[i]), sys);
        ExprMap<std::vector<Expr>> groups;
        for (const auto &term : terms_of(r)) {
            if (term.is_zero())
                continue;
            auto [c, mono] = split_coefficient(term);
            std::vector<Expr> key;
            std::vector<Expr> coef{num(c)};
            for (const auto &f : factors_of(mono)) {
                auto [b, q] = base_exponent(f);
                if (b.kind() == Kind::Jet && jet_order(b) > 0) {
                    if (!is_integer(q) || sgn(q) < 0)
                        throw ReductionError("residual is not polynomial in " + print(b));
                    key.push_back(f);
                    continue;
                }
                for (const auto &j : jets_of(f))
                    if (jet_order(j) > 0)
                        throw ReductionError("residual is not polynomial in the jet coordinates: " + print(f));
                coef.push_back(f);
            }
            groups[mul(std::move(key))].push_back(mul(std::move(coef)));
        }
        for (auto &[key, cs] : groups) {
            Expr e = add(std::move(cs));
            if (is_zero(e))
                continue;
            Expr norm = normalize_row(e);
            if (!seen.emplace(norm, true).second)
                continue;
            out.equations.push_back({e, label_of(sys, i) + " [" + print(key) + "]"});
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Modular rank comparison

namespace {

using u64 = std::uint64_t;
constexpr u64 P = 1000000009ULL; // prime, P = 1 mod 4

u64 mulm(u64 a, u64 b) { return a * b % P; }
u64 addm(u64 a, u64 b) { return (a + b) % P; }
u64 subm(u64 a, u64 b) { return (a + P - b) % P; }
u64 powm(u64 b, u64 e)
{
    u64 r = 1;
    for (b %= P; e; e >>= 1, b = mulm(b, b))
        if (e & 1)
            r = mulm(r, b);
    return r;
}
u64 invm(u64 a)
{
    if (a % P == 0)
        throw std::domain_error("modular inverse of zero");
    return powm(a, P - 2);
}

u64 sqrt_minus_one()
{
    for (u64 c = 2;; ++c)
        if (powm(c, (P - 1) / 2) == P - 1)
            return powm(c, (P - 1) / 4);
}

u64 rational_mod(const Rational &q)
{
    mpz_class n = q.get_num() % mpz_class(P);
    if (n < 0)
        n += P;
    mpz_class d = q.get_den() % mpz_class(P);
    return mulm(n.get_ui(), invm(d.get_ui()));
}

/// splitmix64, enough to spread seeds into field elements.
u64 mix(u64 x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

class ModPoint
{
  public:
    ModPoint(u64 seed, const std::set<std::string> &unknowns) : seed_(seed), unknowns_(unknowns), i_(sqrt_minus_one())
    {
    }

    bool is_unknown(const Expr &f) const { return f.kind() == Kind::Func && unknowns_.count(f.name()); }

    u64 eval(const Expr &e)
    {
        switch (e.kind()) {
        case Kind::Number:
            return addm(rational_mod(e.number().re()), mulm(i_, rational_mod(e.number().im())));
        case Kind::Constant:
        case Kind::Indep:
        case Kind::Jet:
        case Kind::Func: {
            if (is_unknown(e))
                throw std::invalid_argument("unknown function in a coefficient: " + print(e));
            std::string key = print(e);
            auto it = values_.find(key);
            if (it == values_.end())
                it = values_.emplace(key, mix(seed_ ^ std::hash<std::string>{}(key)) % P).first;
            return it->second;
        }
        case Kind::Add: {
            u64 s = 0;
            for (const auto &a : e.args())
                s = addm(s, eval(a));
            return s;
        }
        case Kind::Mul: {
            u64 s = 1;
            for (const auto &a : e.args())
                s = mulm(s, eval(a));
            return s;
        }
        case Kind::Pow: {
            const Rational &q = e.node().exponent;
            if (!is_integer(q))
                throw std::invalid_argument("fractional power in a determining equation");
            long k = q.get_num().get_si();
            u64 b = eval(e.args()[0]);
            return k < 0 ? invm(powm(b, -k)) : powm(b, k);
        }
        default:
            throw std::invalid_argument("transcendental coefficient in a determining equation");
        }
    }

  private:
    u64 seed_;
    const std::set<std::string> &unknowns_;
    u64 i_;
    std::unordered_map<std::string, u64> values_;
};

using SparseRow = std::map<int, u64>;

class Columns
{
  public:
    int id(const Expr &sym)
    {
        auto it = ids_.find(sym);
        if (it != ids_.end())
            return it->second;
        int k = static_cast<int>(ids_.size());
        ids_.emplace(sym, k);
        return k;
    }

  private:
    ExprMap<int> ids_;
};

SparseRow to_row(const Expr &e, ModPoint &pt, Columns &cols)
{
    SparseRow row;
    for (const auto &term : terms_of(e)) {
        if (term.is_zero())
            continue;
        auto [c, mono] = split_coefficient(term);
        u64 v = pt.eval(num(c));
        Expr column = Expr(1);
        bool found = false;
        for (const auto &f : factors_of(mono)) {
            if (pt.is_unknown(f)) {
                if (found)
                    throw std::invalid_argument("equation is not linear in the unknowns: " + print(term));
                found = true;
                column = f;
                continue;
            }
            auto [b, q] = base_exponent(f);
            if (pt.is_unknown(b))
                throw std::invalid_argument("equation is not linear in the unknowns: " + print(term));
            v = mulm(v, pt.eval(f));
        }
        int k = cols.id(column);
        row[k] = addm(row[k], v);
    }
    for (auto it = row.begin(); it != row.end();)
        it = it->second == 0 ? row.erase(it) : std::next(it);
    return row;
}

class Basis
{
  public:
    /// Reduces r against the basis; returns the remainder.
    SparseRow reduce(SparseRow r) const
    {
        while (!r.empty()) {
            auto [col, val] = *r.begin();
            auto it = rows_.find(col);
            if (it == rows_.end())
                return r;
            for (const auto &[c, v] : it->second) {
                u64 nv = subm(r[c], mulm(val, v));
                if (nv == 0)
                    r.erase(c);
                else
                    r[c] = nv;
            }
        }
        return r;
    }

    void insert(const SparseRow &row)
    {
        SparseRow r = reduce(row);
        if (r.empty())
            return;
        u64 inv = invm(r.begin()->second);
        for (auto &[c, v] : r)
            v = mulm(v, inv);
        rows_.emplace(r.begin()->first, std::move(r));
    }

  private:
    std::map<int, SparseRow> rows_;
};

/// closure[d] holds the rows first produced at differentiation depth d.
std::vector<std::vector<Expr>> closure_levels(const std::vector<Expr> &rows, const std::vector<Expr> &vars, int depth)
{
    ExprMap<bool> seen;
    std::vector<std::vector<Expr>> levels(1);
    for (const auto &r : rows)
        if (!r.is_zero() && seen.emplace(r, true).second)
            levels[0].push_back(r);
    for (int d = 1; d <= depth; ++d) {
        levels.emplace_back();
        for (const auto &r : levels[d - 1])
            for (const auto &v : vars) {
                Expr dr = diff(r, v);
                if (!dr.is_zero() && seen.emplace(dr, true).second)
                    levels[d].push_back(dr);
            }
    }
    return levels;
}

std::vector<RowMembership> memberships(const std::vector<Expr> &rows, const std::vector<std::string> &labels,
                                       const std::vector<Expr> &other, const std::vector<Expr> &vars,
                                       const std::set<std::string> &unknowns, int max_depth, u64 seed)
{
    std::vector<RowMembership> out(rows.size());
    for (std::size_t k = 0; k < rows.size(); ++k)
        out[k].label = k < labels.size() ? labels[k] : print(rows[k]);
    auto levels = closure_levels(other, vars, max_depth);
    constexpr int npoints = 2;
    std::vector<ModPoint> points;
    std::vector<Basis> bases(npoints);
    Columns cols;
    for (int p = 0; p < npoints; ++p)
        points.emplace_back(mix(seed + 977 * p), unknowns);
    for (int d = 0; d <= max_depth; ++d) {
        for (const auto &r : levels[d])
            for (int p = 0; p < npoints; ++p)
                bases[p].insert(to_row(r, points[p], cols));
        for (std::size_t k = 0; k < rows.size(); ++k) {
            if (out[k].depth >= 0)
                continue;
            bool in = true;
            for (int p = 0; p < npoints && in; ++p)
                in = bases[p].reduce(to_row(rows[k], points[p], cols)).empty();
            if (in)
                out[k].depth = d;
        }
    }
    return out;
}

} // namespace

EquivalenceReport compare_systems(const std::vector<Expr> &candidate, const std::vector<Expr> &reference,
                                  const std::vector<std::string> &reference_labels,
                                  const std::vector<std::string> &unknowns, const std::vector<Expr> &vars,
                                  int max_depth, std::uint64_t seed)
{
    std::set<std::string> names(unknowns.begin(), unknowns.end());
    EquivalenceReport rep;
    rep.max_depth = max_depth;
    std::vector<std::string> cand_labels;
    for (const auto &c : candidate)
        cand_labels.push_back(print(c));
    rep.reference_rows = memberships(reference, reference_labels, candidate, vars, names, max_depth, seed);
    rep.candidate_rows = memberships(candidate, cand_labels, reference, vars, names, max_depth, seed + 1);
    rep.equivalent = true;
    for (const auto &r : rep.reference_rows)
        rep.equivalent = rep.equivalent && r.depth >= 0;
    for (const auto &r : rep.candidate_rows)
        rep.equivalent = rep.equivalent && r.depth >= 0;
    return rep;
}

CheckReport verify_solution(const DeterminingSystem &system, const std::vector<FuncRule> &solution,
                            const std::string &subject)
{
    auto start = std::chrono::steady_clock::now();
    CheckReport rep;
    rep.subject = subject;
    for (const auto &eq : system.equations) {
        Expr v = substitute_functions(eq.expr, solution);
        CheckItem item;
        item.id = eq.origin;
        item.zero = is_zero(v);
        item.residual = item.zero ? "0" : print(v);
        rep.add(std::move(item));
    }
    rep.timing_ms = elapsed_ms(start);
    return rep;
}

} // namespace jetsym
