#include <map>
#include <set>
#include <unordered_map>

#include "expr_internal.hpp"
#include "jetsym/expr.hpp"

namespace jetsym {

Fraction together(const Expr &e)
{
    struct Split {
        Complex coeff;
        std::vector<Expr> numer;
        ExprMap<Rational> denom;
    };
    std::vector<Split> parts;
    ExprMap<Rational> common;
    for (const auto &t : terms_of(e)) {
        auto [c, mono] = split_coefficient(t);
        Split s{c, {}, {}};
        for (const auto &f : factors_of(mono)) {
            auto [b, q] = base_exponent(f);
            if (sgn(q) < 0) {
                s.denom[b] = -q;
                auto &slot = common[b];
                if (slot < -q)
                    slot = -q;
            } else {
                s.numer.push_back(f);
            }
        }
        parts.push_back(std::move(s));
    }
    Fraction out;
    if (common.empty()) {
        out.numerator = e;
        return out;
    }
    std::vector<Expr> terms;
    terms.reserve(parts.size());
    for (auto &s : parts) {
        std::vector<Expr> fs = std::move(s.numer);
        fs.push_back(num(s.coeff));
        for (const auto &[b, d] : common) {
            auto it = s.denom.find(b);
            Rational have = it == s.denom.end() ? Rational(0) : it->second;
            if (have != d)
                fs.push_back(pow(b, d - have));
        }
        terms.push_back(mul(std::move(fs)));
    }
    out.numerator = add(std::move(terms));
    for (const auto &[b, d] : common)
        out.denominator.emplace_back(b, d);
    return out;
}

namespace {

bool is_opaque(const Expr &e)
{
    switch (e.kind()) {
    case Kind::Exp:
    case Kind::Log:
    case Kind::Func:
        return true;
    case Kind::Pow:
        return !is_integer(e.node().exponent) && e.args()[0].kind() == Kind::Add;
    default:
        return false;
    }
}

/// Opaque atoms that may only be identified when these keys match.
struct OpaqueKey {
    Kind kind;
    std::string name;
    bool conjugated;
    std::vector<int> index;
    Rational exponent;
    std::size_t arity;

    bool operator<(const OpaqueKey &o) const
    {
        if (kind != o.kind)
            return kind < o.kind;
        if (name != o.name)
            return name < o.name;
        if (conjugated != o.conjugated)
            return conjugated < o.conjugated;
        if (index != o.index)
            return index < o.index;
        if (arity != o.arity)
            return arity < o.arity;
        return exponent < o.exponent;
    }
};

OpaqueKey key_of(const Expr &e)
{
    return {e.kind(), e.name(), e.node().conjugated, e.node().index, e.node().exponent, e.args().size()};
}

void collect_opaque(const Expr &e, std::set<Expr, ExprLess> &out, std::set<const Node *> &seen)
{
    if (!seen.insert(e.get()).second)
        return;
    if (is_opaque(e))
        out.insert(e);
    for (const auto &a : e.args())
        collect_opaque(a, out, seen);
}

Expr replace(const Expr &e, const ExprMap<Expr> &map, std::unordered_map<const Node *, Expr> &memo)
{
    if (auto it = memo.find(e.get()); it != memo.end())
        return it->second;
    Expr out;
    if (auto it = map.find(e); it != map.end()) {
        out = it->second;
    } else if (e.args().empty()) {
        out = e;
    } else {
        std::vector<Expr> args;
        bool changed = false;
        for (const auto &a : e.args()) {
            args.push_back(replace(a, map, memo));
            changed = changed || args.back().get() != a.get();
        }
        out = changed ? detail::rebuild(e, std::move(args)) : e;
    }
    memo.emplace(e.get(), out);
    return out;
}

bool zero_at_depth(const Expr &e, int depth);

bool same_value(const Expr &a, const Expr &b, int depth)
{
    if (a.args().size() != b.args().size())
        return false;
    for (std::size_t i = 0; i < a.args().size(); ++i)
        if (a.args()[i] != b.args()[i] && !zero_at_depth(a.args()[i] - b.args()[i], depth + 1))
            return false;
    return true;
}

bool zero_at_depth(const Expr &e, int depth)
{
    if (e.is_zero())
        return true;
    Expr n = together(e).numerator;
    if (n.is_zero())
        return true;
    if (depth > 6)
        return false;

    std::set<Expr, ExprLess> opaque;
    std::set<const Node *> seen;
    collect_opaque(n, opaque, seen);
    std::map<OpaqueKey, std::vector<Expr>> groups;
    for (const auto &o : opaque)
        groups[key_of(o)].push_back(o);

    ExprMap<Expr> unify;
    for (auto &[key, members] : groups) {
        if (members.size() < 2)
            continue;
        std::vector<Expr> reps;
        for (const auto &m : members) {
            bool merged = false;
            for (const auto &r : reps)
                if (same_value(r, m, depth)) {
                    unify.emplace(m, r);
                    merged = true;
                    break;
                }
            if (!merged)
                reps.push_back(m);
        }
    }
    if (unify.empty())
        return false;
    std::unordered_map<const Node *, Expr> memo;
    return zero_at_depth(replace(n, unify, memo), depth + 1);
}

} // namespace

bool is_zero(const Expr &e) { return zero_at_depth(e, 0); }

bool equivalent(const Expr &a, const Expr &b) { return a == b || is_zero(a - b); }

} // namespace jetsym
