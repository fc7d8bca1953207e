#pragma once

// Sparse multivariate polynomials over Q with a fixed variable count.
// Used for polarized tensor identities and for polynomials on the sphere.

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>

#include "momentwave/combinatorics.hpp"

namespace momentwave {

template <std::size_t NV>
class MultiPoly {
 public:
  using Monomial = std::array<std::uint8_t, NV>;

  MultiPoly() = default;

  static MultiPoly constant(const Rational& c) {
    MultiPoly p;
    if (c != 0) p.terms_[Monomial{}] = c;
    return p;
  }

  static MultiPoly variable(std::size_t i, const Rational& c = 1) {
    MultiPoly p;
    Monomial m{};
    m[i] = 1;
    if (c != 0) p.terms_[m] = c;
    return p;
  }

  /// sum_i coeffs[i] * x_{first+i}
  template <std::size_t K>
  static MultiPoly linear(std::size_t first, const std::array<Rational, K>& coeffs) {
    MultiPoly p;
    for (std::size_t i = 0; i < K; ++i) p += variable(first + i, coeffs[i]);
    return p;
  }

  const std::map<Monomial, Rational>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  Rational coeff(const Monomial& m) const {
    auto it = terms_.find(m);
    return it == terms_.end() ? Rational(0) : it->second;
  }

  MultiPoly& operator+=(const MultiPoly& o) {
    for (const auto& [m, c] : o.terms_) add_term(m, c);
    return *this;
  }
  MultiPoly& operator-=(const MultiPoly& o) {
    for (const auto& [m, c] : o.terms_) add_term(m, -c);
    return *this;
  }
  MultiPoly& operator*=(const Rational& c) {
    if (c == 0) {
      terms_.clear();
    } else {
      for (auto& [m, v] : terms_) v *= c;
    }
    return *this;
  }
  friend MultiPoly operator+(MultiPoly a, const MultiPoly& b) { return a += b; }
  friend MultiPoly operator-(MultiPoly a, const MultiPoly& b) { return a -= b; }
  friend MultiPoly operator*(MultiPoly a, const Rational& c) { return a *= c; }
  friend MultiPoly operator*(const Rational& c, MultiPoly a) { return a *= c; }

  friend MultiPoly operator*(const MultiPoly& a, const MultiPoly& b) {
    MultiPoly r;
    for (const auto& [ma, ca] : a.terms_)
      for (const auto& [mb, cb] : b.terms_) {
        Monomial m;
        for (std::size_t i = 0; i < NV; ++i) m[i] = static_cast<std::uint8_t>(ma[i] + mb[i]);
        r.add_term(m, ca * cb);
      }
    return r;
  }
  MultiPoly& operator*=(const MultiPoly& o) { return *this = *this * o; }

  friend bool operator==(const MultiPoly& a, const MultiPoly& b) { return a.terms_ == b.terms_; }

  MultiPoly pow(int e) const {
    MultiPoly r = constant(1);
    for (int i = 0; i < e; ++i) r *= *this;
    return r;
  }

  MultiPoly derivative(std::size_t var) const {
    MultiPoly r;
    for (const auto& [m, c] : terms_) {
      if (m[var] == 0) continue;
      Monomial d = m;
      --d[var];
      r.add_term(d, c * static_cast<long>(m[var]));
    }
    return r;
  }

 private:
  void add_term(const Monomial& m, const Rational& c) {
    if (c == 0) return;
    auto [it, inserted] = terms_.try_emplace(m, c);
    if (!inserted) {
      it->second += c;
      if (it->second == 0) terms_.erase(it);
    }
  }

  std::map<Monomial, Rational> terms_;
};

}  // namespace momentwave
