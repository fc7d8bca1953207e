#pragma once

/*
 * Exact integers and rationals plus the combinatorial coefficients used by
 * the 2D trace-less projector and its inverse expansion.
 *
 * Rational is GMP's mpq_class. Every value produced here is canonical
 * (lowest terms, positive denominator); values built by hand from a
 * numerator/denominator pair must go through make_rational().
 */

#include <gmpxx.h>

#include <cstdint>
#include <string>
#include <string_view>

namespace momentwave {

using BigInt = mpz_class;
using Rational = mpq_class;

Rational make_rational(const BigInt& num, const BigInt& den);
Rational make_rational(long num, long den = 1);

/// Parses "a/b", an integer, or a decimal literal such as "-1.25e3".
/// Decimal literals are converted exactly (1.1 is 11/10, not a binary float).
Rational parse_rational(std::string_view text);

std::string to_string(const Rational& q);
std::string to_string(const BigInt& z);

/// True iff gcd(num, den) == 1 and den > 0.
bool is_canonical(const Rational& q);

BigInt factorial(long n);

/// (-1)!! = 0!! = 1; arguments below -1 are a domain error.
BigInt double_factorial(long n);

/// C(n, k), zero outside the Pascal triangle.
BigInt binomial(long n, long k);

/// Coefficient a_s of the 2D trace-less projector of rank p:
/// (-1/4)^s * p/(p-2s)! * (p-s-1)!/s!, with a_0 = 1 at p = 0.
Rational coeff_a(long p, long s);

/// Coefficient b_{r,s} of the inverse expansion, in closed form:
/// r!/(r-s)! * 1/(2s)!! * (2r-4s)!!/(2r-2s)!!.
Rational coeff_b(long r, long s);

/// C(r, s) / 4^s: the coefficient that makes the inverse expansion exact
/// under averaged symmetrization (Chebyshev expansion of cos^r).
Rational coeff_b_chebyshev(long r, long s);

}  // namespace momentwave
