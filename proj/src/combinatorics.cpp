#include "momentwave/combinatorics.hpp"

#include <cctype>

#include "momentwave/error.hpp"

namespace momentwave {

Rational make_rational(const BigInt& num, const BigInt& den) {
  if (den == 0) throw Error(ErrorKind::domain, "zero denominator");
  Rational q(num, den);
  q.canonicalize();
  return q;
}

Rational make_rational(long num, long den) { return make_rational(BigInt(num), BigInt(den)); }

namespace {

BigInt parse_integer(std::string_view digits, std::string_view whole) {
  if (digits.empty()) throw Error(ErrorKind::io, "malformed number '" + std::string(whole) + "'");
  for (char c : digits) {
    if (!std::isdigit(static_cast<unsigned char>(c))) {
      throw Error(ErrorKind::io, "malformed number '" + std::string(whole) + "'");
    }
  }
  return BigInt(std::string(digits), 10);
}

BigInt pow10(long e) {
  BigInt r;
  mpz_ui_pow_ui(r.get_mpz_t(), 10, static_cast<unsigned long>(e));
  return r;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  const std::string_view whole = text;
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
  if (text.empty()) throw Error(ErrorKind::io, "empty number");

  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    const Rational num = parse_rational(text.substr(0, slash));
    const Rational den = parse_rational(text.substr(slash + 1));
    if (den == 0) throw Error(ErrorKind::domain, "zero denominator in '" + std::string(whole) + "'");
    Rational q = num / den;
    return q;
  }

  bool negative = false;
  if (text.front() == '+' || text.front() == '-') {
    negative = text.front() == '-';
    text.remove_prefix(1);
  }

  long exponent = 0;
  if (auto e = text.find_first_of("eE"); e != std::string_view::npos) {
    std::string_view exp_text = text.substr(e + 1);
    bool exp_negative = false;
    if (!exp_text.empty() && (exp_text.front() == '+' || exp_text.front() == '-')) {
      exp_negative = exp_text.front() == '-';
      exp_text.remove_prefix(1);
    }
    const BigInt e_value = parse_integer(exp_text, whole);
    if (!e_value.fits_slong_p() || abs(e_value) > 4000) {
      throw Error(ErrorKind::io, "exponent out of range in '" + std::string(whole) + "'");
    }
    exponent = e_value.get_si() * (exp_negative ? -1 : 1);
    text = text.substr(0, e);
  }

  std::string digits;
  if (auto dot = text.find('.'); dot != std::string_view::npos) {
    std::string_view frac = text.substr(dot + 1);
    digits = std::string(text.substr(0, dot)) + std::string(frac);
    exponent -= static_cast<long>(frac.size());
  } else {
    digits = std::string(text);
  }
  const BigInt mantissa = parse_integer(digits, whole);

  Rational q = exponent >= 0 ? Rational(mantissa * pow10(exponent)) : make_rational(mantissa, pow10(-exponent));
  return negative ? Rational(-q) : q;
}

std::string to_string(const Rational& q) { return q.get_str(); }

std::string to_string(const BigInt& z) { return z.get_str(); }

bool is_canonical(const Rational& q) {
  if (sgn(q.get_den()) <= 0) return false;
  BigInt g;
  mpz_gcd(g.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  return g == 1;
}

BigInt factorial(long n) {
  if (n < 0) throw Error(ErrorKind::domain, "factorial of " + std::to_string(n));
  BigInt r;
  mpz_fac_ui(r.get_mpz_t(), static_cast<unsigned long>(n));
  return r;
}

BigInt double_factorial(long n) {
  if (n < -1) throw Error(ErrorKind::domain, "double factorial of " + std::to_string(n));
  if (n <= 0) return 1;
  BigInt r;
  mpz_2fac_ui(r.get_mpz_t(), static_cast<unsigned long>(n));
  return r;
}

BigInt binomial(long n, long k) {
  if (n < 0 || k < 0 || k > n) return 0;
  BigInt r;
  mpz_bin_uiui(r.get_mpz_t(), static_cast<unsigned long>(n), static_cast<unsigned long>(k));
  return r;
}

namespace {

Rational quarter_power(long s) {
  BigInt four_s;
  mpz_ui_pow_ui(four_s.get_mpz_t(), 4, static_cast<unsigned long>(s));
  return make_rational(BigInt(s % 2 == 0 ? 1 : -1), four_s);
}

void check_trace_count(const char* what, long rank, long s) {
  if (rank < 0 || s < 0 || s > rank / 2) {
    throw Error(ErrorKind::domain, std::string(what) + "(" + std::to_string(rank) + ", " + std::to_string(s) +
                                       "): trace count out of range");
  }
}

}  // namespace

Rational coeff_a(long p, long s) {
  check_trace_count("coeff_a", p, s);
  if (p == 0) return 1;
  Rational r = quarter_power(s) * p;
  r *= make_rational(factorial(p - s - 1), factorial(p - 2 * s) * factorial(s));
  return r;
}

Rational coeff_b(long r, long s) {
  check_trace_count("coeff_b", r, s);
  Rational q = make_rational(factorial(r), factorial(r - s));
  q /= Rational(double_factorial(2 * s));
  q *= make_rational(double_factorial(2 * r - 4 * s), double_factorial(2 * r - 2 * s));
  return q;
}

Rational coeff_b_chebyshev(long r, long s) {
  check_trace_count("coeff_b_chebyshev", r, s);
  Rational q(binomial(r, s));
  BigInt four_s;
  mpz_ui_pow_ui(four_s.get_mpz_t(), 4, static_cast<unsigned long>(s));
  q /= Rational(four_s);
  return q;
}

}  // namespace momentwave
