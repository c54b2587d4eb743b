#include <cmath>
#include <unordered_map>

#include "jetsym/expr.hpp"

namespace jetsym {

namespace {

using cd = std::complex<double>;

constexpr double pole_threshold = 1e-300;

std::string atom_key(const Expr &a)
{
    if (a.kind() == Kind::Constant)
        return a.name();
    return print(a);
}

cd ipow(const cd &b, long k)
{
    if (k < 0 && std::abs(b) < pole_threshold)
        throw EvalError("pole: negative power of zero");
    cd r(1.0);
    cd base = k < 0 ? cd(1.0) / b : b;
    for (long m = k < 0 ? -k : k; m > 0; m >>= 1) {
        if (m & 1)
            r *= base;
        base *= base;
    }
    return r;
}

cd power(const cd &b, const Rational &q)
{
    if (is_integer(q) && q.get_num().fits_slong_p())
        return ipow(b, q.get_num().get_si());
    if (sgn(q) < 0 && std::abs(b) < pole_threshold)
        throw EvalError("pole: negative power of zero");
    if (std::abs(b) == 0.0)
        return 0.0;
    return std::pow(b, q.get_d());
}

cd apply_function(const FunctionSample &f, const std::string &name, std::vector<cd> args,
                  const std::vector<int> &derivs, bool conjugated)
{
    if (!f)
        throw EvalError("unbound function " + name);
    if (conjugated)
        for (auto &a : args)
            a = std::conj(a);
    cd v = f(args, derivs);
    return conjugated ? std::conj(v) : v;
}

cd eval_impl(const Expr &e, const Bindings &b, std::unordered_map<const Node *, cd> &memo)
{
    if (auto it = memo.find(e.get()); it != memo.end())
        return it->second;
    cd out;
    switch (e.kind()) {
    case Kind::Number:
        out = e.number().to_double();
        break;
    case Kind::Constant:
    case Kind::Indep:
    case Kind::Jet: {
        auto it = b.values.find(atom_key(e));
        if (it == b.values.end())
            throw EvalError("unbound symbol " + atom_key(e));
        out = e.node().conjugated ? std::conj(it->second) : it->second;
        break;
    }
    case Kind::Func: {
        std::vector<cd> args;
        for (const auto &a : e.args())
            args.push_back(eval_impl(a, b, memo));
        auto it = b.functions.find(e.name());
        out = apply_function(it == b.functions.end() ? FunctionSample{} : it->second, e.name(), std::move(args),
                             e.node().index, e.node().conjugated);
        break;
    }
    case Kind::Add:
        out = 0.0;
        for (const auto &a : e.args())
            out += eval_impl(a, b, memo);
        break;
    case Kind::Mul:
        out = 1.0;
        for (const auto &a : e.args())
            out *= eval_impl(a, b, memo);
        break;
    case Kind::Pow:
        out = power(eval_impl(e.args()[0], b, memo), e.node().exponent);
        break;
    case Kind::Exp:
        out = std::exp(eval_impl(e.args()[0], b, memo));
        break;
    case Kind::Log: {
        cd a = eval_impl(e.args()[0], b, memo);
        if (std::abs(a) < pole_threshold)
            throw EvalError("pole: log of zero");
        out = std::log(a);
        break;
    }
    }
    memo.emplace(e.get(), out);
    return out;
}

} // namespace

std::complex<double> eval_numeric(const Expr &e, const Bindings &bindings)
{
    std::unordered_map<const Node *, cd> memo;
    return eval_impl(e, bindings, memo);
}

CompiledExpr::CompiledExpr(const Expr &e, const std::vector<Expr> &atoms, const Bindings &fixed) : fixed_(fixed)
{
    std::unordered_map<std::string, int> slot_of;
    for (std::size_t k = 0; k < atoms.size(); ++k)
        slot_of.emplace(atom_key(atoms[k]), static_cast<int>(k));
    std::unordered_map<const Node *, int> index;

    auto emit = [&](auto &&self, const Expr &x) -> int {
        if (auto it = index.find(x.get()); it != index.end())
            return it->second;
        Op op;
        op.kind = x.kind();
        for (const auto &a : x.args())
            op.operands.push_back(self(self, a));
        switch (x.kind()) {
        case Kind::Number:
            op.value = x.number().to_double();
            break;
        case Kind::Constant:
        case Kind::Indep:
        case Kind::Jet: {
            op.conjugated = x.node().conjugated;
            std::string key = atom_key(x);
            if (auto it = slot_of.find(key); it != slot_of.end()) {
                op.slot = it->second;
            } else if (auto jt = fixed_.values.find(key); jt != fixed_.values.end()) {
                op.kind = Kind::Number;
                op.value = op.conjugated ? std::conj(jt->second) : jt->second;
            } else {
                throw EvalError("unbound symbol " + key);
            }
            break;
        }
        case Kind::Func: {
            auto it = fixed_.functions.find(x.name());
            if (it == fixed_.functions.end())
                throw EvalError("unbound function " + x.name());
            op.function = it->second;
            op.derivs = x.node().index;
            op.conjugated = x.node().conjugated;
            break;
        }
        case Kind::Pow: {
            const Rational &q = x.node().exponent;
            op.exponent = q.get_d();
            op.integer_exponent = is_integer(q) && q.get_num().fits_slong_p();
            if (op.integer_exponent)
                op.int_exponent = q.get_num().get_si();
            break;
        }
        default:
            break;
        }
        ops_.push_back(std::move(op));
        int id = static_cast<int>(ops_.size()) - 1;
        index.emplace(x.get(), id);
        return id;
    };
    emit(emit, e);
}

std::complex<double> CompiledExpr::operator()(std::span<const std::complex<double>> slots) const
{
    std::vector<cd> v(ops_.size());
    std::vector<cd> args;
    for (std::size_t k = 0; k < ops_.size(); ++k) {
        const Op &op = ops_[k];
        switch (op.kind) {
        case Kind::Number:
            v[k] = op.value;
            break;
        case Kind::Constant:
        case Kind::Indep:
        case Kind::Jet:
            v[k] = op.conjugated ? std::conj(slots[op.slot]) : slots[op.slot];
            break;
        case Kind::Func:
            args.clear();
            for (int o : op.operands)
                args.push_back(v[o]);
            v[k] = apply_function(op.function, "function", args, op.derivs, op.conjugated);
            break;
        case Kind::Add: {
            cd s = 0.0;
            for (int o : op.operands)
                s += v[o];
            v[k] = s;
            break;
        }
        case Kind::Mul: {
            cd s = 1.0;
            for (int o : op.operands)
                s *= v[o];
            v[k] = s;
            break;
        }
        case Kind::Pow: {
            const cd &b = v[op.operands[0]];
            if (op.integer_exponent) {
                v[k] = ipow(b, op.int_exponent);
            } else {
                if (op.exponent < 0 && std::abs(b) < pole_threshold)
                    throw EvalError("pole: negative power of zero");
                v[k] = std::abs(b) == 0.0 ? cd(0.0) : std::pow(b, op.exponent);
            }
            break;
        }
        case Kind::Exp:
            v[k] = std::exp(v[op.operands[0]]);
            break;
        case Kind::Log:
            if (std::abs(v[op.operands[0]]) < pole_threshold)
                throw EvalError("pole: log of zero");
            v[k] = std::log(v[op.operands[0]]);
            break;
        }
    }
    return v.back();
}

} // namespace jetsym
