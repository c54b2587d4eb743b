#include <functional>
#include <unordered_map>

#include "expr_internal.hpp"
#include "jetsym/expr.hpp"

namespace jetsym {

namespace {

Expr func_derivative(const Expr &f, std::size_t slot)
{
    Node n = f.node();
    n.index[slot] += 1;
    return detail::finish(std::move(n));
}

/// Shared structure of diff and total_derivative: `leaf` handles atoms,
/// everything else follows the chain and product rules.
template <class Leaf>
Expr derive(const Expr &e, const Leaf &leaf)
{
    switch (e.kind()) {
    case Kind::Number:
        return detail::zero();
    case Kind::Constant:
    case Kind::Indep:
    case Kind::Jet:
        return leaf(e);
    case Kind::Func: {
        std::vector<Expr> terms;
        for (std::size_t k = 0; k < e.args().size(); ++k) {
            Expr inner = derive(e.args()[k], leaf);
            if (!inner.is_zero())
                terms.push_back(mul({func_derivative(e, k), inner}));
        }
        return add(std::move(terms));
    }
    case Kind::Add: {
        std::vector<Expr> terms;
        for (const auto &t : e.args())
            terms.push_back(derive(t, leaf));
        return add(std::move(terms));
    }
    case Kind::Mul: {
        const auto &fs = e.args();
        std::vector<Expr> terms;
        for (std::size_t i = 0; i < fs.size(); ++i) {
            Expr d = derive(fs[i], leaf);
            if (d.is_zero())
                continue;
            std::vector<Expr> prod;
            prod.reserve(fs.size());
            for (std::size_t j = 0; j < fs.size(); ++j)
                prod.push_back(j == i ? d : fs[j]);
            terms.push_back(mul(std::move(prod)));
        }
        return add(std::move(terms));
    }
    case Kind::Pow: {
        const Expr &b = e.args()[0];
        const Rational &q = e.node().exponent;
        Expr d = derive(b, leaf);
        if (d.is_zero())
            return detail::zero();
        return mul({num(Complex(q)), pow(b, q - 1), d});
    }
    case Kind::Exp: {
        Expr d = derive(e.args()[0], leaf);
        if (d.is_zero())
            return detail::zero();
        return mul({e, d});
    }
    case Kind::Log: {
        Expr d = derive(e.args()[0], leaf);
        if (d.is_zero())
            return detail::zero();
        return mul({d, pow(e.args()[0], Rational(-1))});
    }
    }
    return detail::zero();
}

} // namespace

Expr diff(const Expr &e, const Expr &atom)
{
    if (!is_atom(atom))
        throw std::invalid_argument("diff: variable must be an independent variable, constant or jet coordinate");
    if (!contains(e, atom))
        return detail::zero();
    return derive(e, [&](const Expr &a) { return a == atom ? detail::one() : detail::zero(); });
}

Expr total_derivative(const Expr &e, int i)
{
    return derive(e, [i](const Expr &a) -> Expr {
        switch (a.kind()) {
        case Kind::Indep:
            return a.node().index[0] == i ? detail::one() : detail::zero();
        case Kind::Jet: {
            std::vector<int> idx = a.node().index;
            if (static_cast<int>(idx.size()) <= i)
                idx.resize(i + 1, 0);
            idx[i] += 1;
            return jet(a.name(), std::move(idx));
        }
        default:
            return detail::zero();
        }
    });
}

Expr total_derivative(const Expr &e, std::span<const int> multi_index)
{
    Expr out = e;
    for (std::size_t i = 0; i < multi_index.size(); ++i)
        for (int k = 0; k < multi_index[i]; ++k)
            out = total_derivative(out, static_cast<int>(i));
    return out;
}

// ---------------------------------------------------------------------------
// Substitution

namespace {

bool contains_subexpr(const Expr &e, const Expr &target)
{
    if (is_atom(target))
        return contains(e, target);
    if (e == target)
        return true;
    for (const auto &a : e.args())
        if (contains_subexpr(a, target))
            return true;
    return false;
}

bool jet_extends(const Expr &lower, const Expr &higher)
{
    if (lower.name() != higher.name())
        return false;
    const auto &a = lower.node().index;
    const auto &b = higher.node().index;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i] > (i < b.size() ? b[i] : 0))
            return false;
    return true;
}

void reject_cycles(const std::vector<Rule> &rules, SubstMode mode)
{
    const std::size_t n = rules.size();
    std::vector<std::vector<std::size_t>> edges(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j)
                continue;
            bool reach = contains_subexpr(rules[i].rhs, rules[j].lhs);
            if (!reach && mode == SubstMode::Propagate && rules[j].lhs.kind() == Kind::Jet)
                for (const auto &jt : jets_of(rules[i].rhs))
                    if (jet_extends(rules[j].lhs, jt)) {
                        reach = true;
                        break;
                    }
            if (reach)
                edges[i].push_back(j);
        }
    std::vector<int> state(n, 0);
    std::function<void(std::size_t)> dfs = [&](std::size_t v) {
        state[v] = 1;
        for (auto w : edges[v]) {
            if (state[w] == 1)
                throw SubstitutionError("substitution rules form a cycle through " + print(rules[v].lhs) +
                                        " and " + print(rules[w].lhs));
            if (state[w] == 0)
                dfs(w);
        }
        state[v] = 2;
    };
    for (std::size_t v = 0; v < n; ++v)
        if (state[v] == 0)
            dfs(v);
}

class Substituter
{
  public:
    Substituter(const std::vector<Rule> &rules, SubstMode mode, const std::vector<FuncRule> &func_rules)
        : mode_(mode)
    {
        for (const auto &r : rules) {
            if (!is_atom(r.lhs) && r.lhs.kind() != Kind::Func)
                throw std::invalid_argument("substitute: left-hand side must be an atom or function application");
            if (!exact_.emplace(r.lhs, r.rhs).second)
                throw std::invalid_argument("substitute: duplicate left-hand side " + print(r.lhs));
            if (r.lhs.kind() == Kind::Func)
                use_mask_ = false;
            mask_ |= r.lhs.node().signature;
            if (r.lhs.kind() == Kind::Jet)
                jet_rules_.push_back(r);
        }
        if (mode == SubstMode::Propagate && !jet_rules_.empty())
            use_mask_ = false;
        for (const auto &f : func_rules) {
            func_rules_.emplace(f.name, &f);
            use_mask_ = false;
        }
    }

    Expr operator()(const Expr &e)
    {
        if (use_mask_ && (e.node().signature & mask_) == 0)
            return e;
        if (auto it = memo_.find(e.get()); it != memo_.end())
            return it->second;
        Expr out = apply(e);
        memo_.emplace(e.get(), out);
        return out;
    }

  private:
    Expr apply(const Expr &e)
    {
        if (e.kind() == Kind::Number)
            return e;
        if (auto it = exact_.find(e); it != exact_.end())
            return it->second;
        if (is_atom(e)) {
            if (mode_ == SubstMode::Propagate && e.kind() == Kind::Jet)
                for (const auto &r : jet_rules_)
                    if (jet_extends(r.lhs, e)) {
                        std::vector<int> delta = e.node().index;
                        const auto &low = r.lhs.node().index;
                        for (std::size_t i = 0; i < low.size(); ++i)
                            delta[i] -= low[i];
                        return total_derivative(r.rhs, std::span<const int>(delta));
                    }
            return e;
        }
        std::vector<Expr> args;
        args.reserve(e.args().size());
        bool changed = false;
        for (const auto &a : e.args()) {
            args.push_back((*this)(a));
            changed = changed || args.back().get() != a.get();
        }
        if (e.kind() == Kind::Func) {
            if (auto it = func_rules_.find(e.name()); it != func_rules_.end())
                return apply_func_rule(*it->second, e, args);
        }
        if (!changed)
            return e;
        return detail::rebuild(e, std::move(args));
    }

    static Expr apply_func_rule(const FuncRule &rule, const Expr &f, const std::vector<Expr> &args)
    {
        if (rule.params.size() != args.size())
            throw std::invalid_argument("function rule for " + rule.name + " has wrong arity");
        Expr body = rule.body;
        const auto &derivs = f.node().index;
        for (std::size_t k = 0; k < derivs.size(); ++k)
            for (int c = 0; c < derivs[k]; ++c)
                body = diff(body, rule.params[k]);
        std::vector<Rule> bind;
        for (std::size_t k = 0; k < args.size(); ++k)
            bind.push_back({rule.params[k], f.node().conjugated ? conj(args[k]) : args[k]});
        Expr value = substitute(body, bind, SubstMode::Exact);
        return f.node().conjugated ? conj(value) : value;
    }

    SubstMode mode_;
    ExprMap<Expr> exact_;
    std::vector<Rule> jet_rules_;
    std::unordered_map<std::string, const FuncRule *> func_rules_;
    std::unordered_map<const Node *, Expr> memo_;
    std::uint64_t mask_ = 0;
    bool use_mask_ = true;
};

} // namespace

Expr substitute(const Expr &e, const std::vector<Rule> &rules, SubstMode mode,
                const std::vector<FuncRule> &func_rules)
{
    if (rules.empty() && func_rules.empty())
        return e;
    reject_cycles(rules, mode);
    Substituter s(rules, mode, func_rules);
    return s(e);
}

Expr change_variables(const Expr &e, const std::vector<Rule> &rules)
{
    if (rules.empty())
        return e;
    Substituter s(rules, SubstMode::Exact, {});
    return s(e);
}

Expr substitute(const Expr &e, const Expr &lhs, const Expr &rhs)
{
    return substitute(e, std::vector<Rule>{{lhs, rhs}});
}

Expr substitute_functions(const Expr &e, const std::vector<FuncRule> &func_rules)
{
    return substitute(e, {}, SubstMode::Exact, func_rules);
}

// ---------------------------------------------------------------------------
// Conjugation

Expr conj(const Expr &e)
{
    switch (e.kind()) {
    case Kind::Number:
        return num(e.number().conj());
    case Kind::Indep:
        return e;
    case Kind::Constant:
        return e.node().complex_valued ? detail::with_conjugated(e, !e.node().conjugated, {}) : e;
    case Kind::Jet:
        return jet(conjugate_dependent(e.name()), e.node().index);
    case Kind::Func: {
        std::vector<Expr> args;
        for (const auto &a : e.args())
            args.push_back(conj(a));
        if (e.node().complex_valued)
            return detail::with_conjugated(e, !e.node().conjugated, std::move(args));
        return detail::rebuild_func(e, std::move(args));
    }
    case Kind::Pow: {
        const Expr &b = e.args()[0];
        const Rational &q = e.node().exponent;
        // b < 0: conj(b^q) = b^q (-1)^(-2q), the principal argument is pi
        if (b.is_number() && b.number().is_real() && !b.number().is_positive() && !is_integer(q))
            return mul({e, pow(num(Complex(-1)), -2 * q)});
        return pow(conj(b), q);
    }
    default: {
        std::vector<Expr> args;
        for (const auto &a : e.args())
            args.push_back(conj(a));
        return detail::rebuild(e, std::move(args));
    }
    }
}

} // namespace jetsym
