#include <sstream>

#include "jetsym/expr.hpp"

namespace jetsym {

namespace {

std::string print_rational_atom(const Rational &q)
{
    if (is_integer(q) && sgn(q) >= 0)
        return q.get_str();
    return "(" + q.get_str() + ")";
}

/// A number as a self-contained factor.
std::string print_number_atom(const Complex &c)
{
    if (c.is_real())
        return print_rational_atom(c.re());
    if (sgn(c.re()) == 0) {
        if (c.im() == 1)
            return "i";
        return "(" + c.im().get_str() + "*i)";
    }
    std::string im = c.im() == 1 ? "i" : c.im() == -1 ? "-i" : c.im().get_str() + "*i";
    std::string sep = sgn(c.im()) < 0 ? " - " : " + ";
    if (sgn(c.im()) < 0)
        im = im.substr(1);
    return "(" + c.re().get_str() + sep + im + ")";
}

std::string print_exponent(const Rational &q)
{
    if (is_integer(q) && sgn(q) > 0)
        return q.get_str();
    return "(" + q.get_str() + ")";
}

std::string print_impl(const Expr &e);

std::string print_base(const Expr &b)
{
    switch (b.kind()) {
    case Kind::Add:
    case Kind::Mul:
    case Kind::Pow:
        return "(" + print_impl(b) + ")";
    case Kind::Number:
        if (b.number().is_real() && is_integer(b.number().re()) && sgn(b.number().re()) >= 0)
            return b.number().re().get_str();
        return "(" + print_impl(b) + ")";
    default:
        return print_impl(b);
    }
}

std::string print_power(const Expr &base, const Rational &q)
{
    if (q == 1)
        return print_base(base);
    return print_base(base) + "^" + print_exponent(q);
}

std::string print_jet(const Expr &j)
{
    const auto &idx = j.node().index;
    if (idx.empty())
        return j.name();
    std::string out = "D(" + j.name() + ";";
    bool first = true;
    for (std::size_t i = 0; i < idx.size(); ++i)
        for (int k = 0; k < idx[i]; ++k) {
            out += first ? "" : ",";
            out += i == 0 ? "t" : "x" + std::to_string(i);
            first = false;
        }
    return out + ")";
}

std::string print_func(const Expr &f)
{
    std::string call = f.name() + "(";
    for (std::size_t k = 0; k < f.args().size(); ++k) {
        if (k)
            call += ", ";
        call += print_impl(f.node().conjugated ? conj(f.args()[k]) : f.args()[k]);
    }
    call += ")";
    const auto &d = f.node().index;
    bool any = false;
    std::string slots;
    for (std::size_t k = 0; k < d.size(); ++k)
        for (int c = 0; c < d[k]; ++c) {
            slots += any ? "," : "";
            slots += "#" + std::to_string(k + 1);
            any = true;
        }
    if (any)
        call = "D(" + call + ";" + slots + ")";
    return f.node().conjugated ? "conj(" + call + ")" : call;
}

/// Term without sign handling: coefficient magnitude, numerator factors, then
/// "/denominator" factors.
std::string print_unsigned_term(const Complex &coeff, const Expr &mono)
{
    std::vector<std::string> numer;
    std::vector<std::string> denom;
    for (const auto &f : factors_of(mono)) {
        auto [b, q] = base_exponent(f);
        if (sgn(q) < 0)
            denom.push_back(print_power(b, -q));
        else
            numer.push_back(print_power(b, q));
    }
    // Coefficients go in front so that a trailing "/integer" never follows an
    // exponent (x^2/3 reads as x^(2/3)).
    std::string lead;
    if (coeff.is_real()) {
        const Rational &r = coeff.re();
        if (r.get_den() != 1)
            lead = "(" + r.get_str() + ")";
        else if (r.get_num() != 1 || numer.empty())
            lead = r.get_num().get_str();
    } else if (sgn(coeff.re()) == 0) {
        const Rational &r = coeff.im();
        std::string top = r.get_num() == 1 ? "i" : r.get_num().get_str() + "*i";
        lead = r.get_den() == 1 ? top : "(" + top + "/" + r.get_den().get_str() + ")";
    } else {
        lead = print_number_atom(coeff);
    }
    std::string out = lead;
    for (const auto &s : numer)
        out += (out.empty() ? "" : "*") + s;
    for (const auto &s : denom)
        out += "/" + s;
    return out;
}

std::string print_term(const Expr &term, bool leading)
{
    auto [c, mono] = split_coefficient(term);
    bool neg = c.is_negative_like();
    std::string body = print_unsigned_term(neg ? -c : c, mono);
    if (leading)
        return neg ? "-" + body : body;
    return (neg ? " - " : " + ") + body;
}

std::string print_impl(const Expr &e)
{
    switch (e.kind()) {
    case Kind::Number: {
        const Complex &c = e.number();
        if (c.is_real())
            return c.re().get_str();
        return print_term(e, true);
    }
    case Kind::Constant:
        return e.node().conjugated ? "conj(" + e.name() + ")" : e.name();
    case Kind::Indep:
        return e.name();
    case Kind::Jet:
        return print_jet(e);
    case Kind::Func:
        return print_func(e);
    case Kind::Log:
        return "log(" + print_impl(e.args()[0]) + ")";
    case Kind::Exp:
        return "exp(" + print_impl(e.args()[0]) + ")";
    case Kind::Pow:
        return print_term(e, true);
    case Kind::Mul:
        return print_term(e, true);
    case Kind::Add: {
        std::string out;
        bool first = true;
        for (const auto &t : e.args()) {
            out += print_term(t, first);
            first = false;
        }
        return out;
    }
    }
    return "?";
}

} // namespace

std::string print(const Expr &e) { return print_impl(e); }

} // namespace jetsym
