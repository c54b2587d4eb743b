#include "jetsym/number.hpp"

#include <stdexcept>

namespace jetsym {

Rational make_rational(long num, long den)
{
    if (den == 0)
        throw std::domain_error("rational with zero denominator");
    Rational q(num, den);
    q.canonicalize();
    return q;
}

bool is_integer(const Rational &q) { return q.get_den() == 1; }

Rational floor(const Rational &q)
{
    mpz_class r;
    mpz_fdiv_q(r.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
    return Rational(r);
}

std::size_t hash_value(const Rational &q)
{
    constexpr unsigned long prime = 4294967291UL;
    std::size_t h = mpz_fdiv_ui(q.get_num_mpz_t(), prime);
    h = h * 1000003u ^ mpz_fdiv_ui(q.get_den_mpz_t(), prime);
    return h ^ static_cast<std::size_t>(sgn(q) + 7);
}

std::string to_string(const Rational &q) { return q.get_str(); }

Complex operator/(const Complex &a, const Complex &b)
{
    if (b.is_zero())
        throw std::domain_error("division by zero");
    Rational den = b.re_ * b.re_ + b.im_ * b.im_;
    Complex num = a * b.conj();
    return Complex(num.re_ / den, num.im_ / den);
}

Complex Complex::pow(long k) const
{
    if (k < 0)
        return Complex(1) / pow(-k);
    Complex result(1);
    Complex base = *this;
    while (k > 0) {
        if (k & 1)
            result *= base;
        base *= base;
        k >>= 1;
    }
    return result;
}

std::size_t Complex::hash() const { return hash_value(re_) * 31 + hash_value(im_); }

int Complex::compare(const Complex &o) const
{
    int c = cmp(re_, o.re_);
    if (c != 0)
        return c < 0 ? -1 : 1;
    c = cmp(im_, o.im_);
    return c < 0 ? -1 : (c > 0 ? 1 : 0);
}

namespace {

bool exact_root(const mpz_class &v, unsigned long r, mpz_class &out)
{
    if (sgn(v) < 0)
        return false;
    return mpz_root(out.get_mpz_t(), v.get_mpz_t(), r) != 0;
}

} // namespace

bool exact_rational_power(const Rational &q, const Rational &exponent, Rational &out)
{
    if (sgn(q) <= 0)
        return false;
    if (!exponent.get_den().fits_ulong_p() || !exponent.get_num().fits_slong_p())
        return false;
    unsigned long r = exponent.get_den().get_ui();
    long p = exponent.get_num().get_si();
    mpz_class num_root, den_root;
    if (!exact_root(q.get_num(), r, num_root) || !exact_root(q.get_den(), r, den_root))
        return false;
    Complex base(Rational(num_root, den_root));
    out = base.pow(p).re();
    return true;
}

} // namespace jetsym
