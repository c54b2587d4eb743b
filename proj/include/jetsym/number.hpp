#pragma once

#include <complex>
#include <cstddef>
#include <string>

#include <gmpxx.h>

namespace jetsym {

using Rational = mpq_class;

Rational make_rational(long num, long den = 1);
bool is_integer(const Rational &q);
/// Largest integer <= q.
Rational floor(const Rational &q);
std::size_t hash_value(const Rational &q);
std::string to_string(const Rational &q);

/// Exact element of Q(i).
class Complex
{
  public:
    Complex() = default;
    Complex(long re) : re_(re) {}
    Complex(Rational re, Rational im = 0) : re_(std::move(re)), im_(std::move(im))
    {
        re_.canonicalize();
        im_.canonicalize();
    }

    static Complex i() { return Complex(0, 1); }

    const Rational &re() const { return re_; }
    const Rational &im() const { return im_; }

    bool is_zero() const { return sgn(re_) == 0 && sgn(im_) == 0; }
    bool is_one() const { return re_ == 1 && sgn(im_) == 0; }
    bool is_real() const { return sgn(im_) == 0; }
    bool is_rational_integer() const { return is_real() && is_integer(re_); }
    /// Real and strictly positive.
    bool is_positive() const { return is_real() && sgn(re_) > 0; }
    /// Sign used by printers: the sign of the first nonzero component.
    bool is_negative_like() const
    {
        return sgn(re_) < 0 || (sgn(re_) == 0 && sgn(im_) < 0);
    }

    Complex conj() const { return Complex(re_, -im_); }
    Complex operator-() const { return Complex(-re_, -im_); }
    friend Complex operator+(const Complex &a, const Complex &b)
    {
        return Complex(a.re_ + b.re_, a.im_ + b.im_);
    }
    friend Complex operator-(const Complex &a, const Complex &b)
    {
        return Complex(a.re_ - b.re_, a.im_ - b.im_);
    }
    friend Complex operator*(const Complex &a, const Complex &b)
    {
        return Complex(a.re_ * b.re_ - a.im_ * b.im_, a.re_ * b.im_ + a.im_ * b.re_);
    }
    /// Throws std::domain_error on division by zero.
    friend Complex operator/(const Complex &a, const Complex &b);
    Complex &operator+=(const Complex &o) { return *this = *this + o; }
    Complex &operator*=(const Complex &o) { return *this = *this * o; }
    friend bool operator==(const Complex &a, const Complex &b)
    {
        return a.re_ == b.re_ && a.im_ == b.im_;
    }
    friend bool operator!=(const Complex &a, const Complex &b) { return !(a == b); }

    /// Integer power; negative exponents invert.
    Complex pow(long k) const;
    std::complex<double> to_double() const { return {re_.get_d(), im_.get_d()}; }
    std::size_t hash() const;
    int compare(const Complex &o) const;

  private:
    Rational re_{0};
    Rational im_{0};
};

/// Exact rational root: returns true and sets out = q^(p/r) when q > 0 and the
/// root is rational.
bool exact_rational_power(const Rational &q, const Rational &exponent, Rational &out);

} // namespace jetsym
