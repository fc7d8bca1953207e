#pragma once

#include <initializer_list>
#include <string>
#include <utility>
#include <vector>

#include "momentwave/combinatorics.hpp"

namespace momentwave {

/// Univariate polynomial over Q, coefficients in ascending degree.
/// The coefficient vector never carries trailing zeros, so the zero
/// polynomial is the empty vector and degree() is -1.
class RationalPoly {
 public:
  RationalPoly() = default;
  explicit RationalPoly(std::vector<Rational> coeffs);
  RationalPoly(std::initializer_list<Rational> coeffs);
  static RationalPoly constant(const Rational& c);
  /// The monomial c * x^k.
  static RationalPoly monomial(const Rational& c, int k);

  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  bool is_zero() const { return coeffs_.empty(); }
  const std::vector<Rational>& coeffs() const { return coeffs_; }
  Rational coeff(int k) const;
  const Rational& leading() const;

  Rational eval(const Rational& x) const;
  int sign_at(const Rational& x) const;
  RationalPoly derivative() const;

  RationalPoly& operator+=(const RationalPoly& o);
  RationalPoly& operator-=(const RationalPoly& o);
  RationalPoly& operator*=(const RationalPoly& o);
  RationalPoly& operator*=(const Rational& c);
  friend RationalPoly operator+(RationalPoly a, const RationalPoly& b) { return a += b; }
  friend RationalPoly operator-(RationalPoly a, const RationalPoly& b) { return a -= b; }
  friend RationalPoly operator*(RationalPoly a, const RationalPoly& b) { return a *= b; }
  friend RationalPoly operator*(RationalPoly a, const Rational& c) { return a *= c; }
  friend RationalPoly operator*(const Rational& c, RationalPoly a) { return a *= c; }
  RationalPoly operator-() const;
  friend bool operator==(const RationalPoly& a, const RationalPoly& b) { return a.coeffs_ == b.coeffs_; }

  RationalPoly pow(int e) const;

  /// Content-normalized form: integer coefficients with gcd 1 and a
  /// positive leading coefficient. Zero stays zero.
  RationalPoly primitive() const;
  RationalPoly monic() const;

  /// x -> x^2 substitution inverse: true and g with f(x) = g(x^2) when f is even.
  bool even_part(RationalPoly& g) const;

  std::string to_string(const std::string& var = "x") const;

 private:
  void trim();
  std::vector<Rational> coeffs_;
};

/// Quotient and remainder of a / b; b must be nonzero.
std::pair<RationalPoly, RationalPoly> divmod(const RationalPoly& a, const RationalPoly& b);
/// a / b, throwing when the division leaves a remainder.
RationalPoly exact_div(const RationalPoly& a, const RationalPoly& b);
bool divides(const RationalPoly& d, const RationalPoly& a);
/// Monic gcd (zero when both inputs are zero).
RationalPoly gcd(const RationalPoly& a, const RationalPoly& b);

/// Yun's square-free decomposition: f = c * prod f_i^{m_i}, each f_i
/// square-free, monic and pairwise coprime. Constant factors are dropped.
std::vector<std::pair<RationalPoly, int>> square_free_decomposition(const RationalPoly& f);

/// Sturm chain of a square-free polynomial.
class SturmChain {
 public:
  explicit SturmChain(const RationalPoly& f);
  /// Number of distinct real roots in the half-open interval (a, b].
  int count(const Rational& a, const Rational& b) const;
  int variations(const Rational& x) const;

 private:
  std::vector<RationalPoly> chain_;
};

/// A bound B with every real root inside [-B, B].
Rational cauchy_root_bound(const RationalPoly& f);

}  // namespace momentwave
