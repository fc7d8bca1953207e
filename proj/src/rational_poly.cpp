#include "momentwave/rational_poly.hpp"

#include <sstream>

#include "momentwave/error.hpp"

namespace momentwave {

RationalPoly::RationalPoly(std::vector<Rational> coeffs) : coeffs_(std::move(coeffs)) { trim(); }

RationalPoly::RationalPoly(std::initializer_list<Rational> coeffs) : coeffs_(coeffs) { trim(); }

RationalPoly RationalPoly::constant(const Rational& c) { return RationalPoly({c}); }

RationalPoly RationalPoly::monomial(const Rational& c, int k) {
  std::vector<Rational> v(static_cast<std::size_t>(k) + 1);
  v.back() = c;
  return RationalPoly(std::move(v));
}

void RationalPoly::trim() {
  while (!coeffs_.empty() && coeffs_.back() == 0) coeffs_.pop_back();
}

Rational RationalPoly::coeff(int k) const {
  if (k < 0 || k > degree()) return 0;
  return coeffs_[static_cast<std::size_t>(k)];
}

const Rational& RationalPoly::leading() const {
  if (is_zero()) throw Error(ErrorKind::degenerate, "leading coefficient of the zero polynomial");
  return coeffs_.back();
}

Rational RationalPoly::eval(const Rational& x) const {
  Rational acc = 0;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) {
    acc *= x;
    acc += *it;
  }
  return acc;
}

int RationalPoly::sign_at(const Rational& x) const { return sgn(eval(x)); }

RationalPoly RationalPoly::derivative() const {
  if (coeffs_.size() <= 1) return {};
  std::vector<Rational> d(coeffs_.size() - 1);
  for (std::size_t k = 1; k < coeffs_.size(); ++k) d[k - 1] = coeffs_[k] * static_cast<long>(k);
  return RationalPoly(std::move(d));
}

RationalPoly& RationalPoly::operator+=(const RationalPoly& o) {
  if (o.coeffs_.size() > coeffs_.size()) coeffs_.resize(o.coeffs_.size());
  for (std::size_t k = 0; k < o.coeffs_.size(); ++k) coeffs_[k] += o.coeffs_[k];
  trim();
  return *this;
}

RationalPoly& RationalPoly::operator-=(const RationalPoly& o) {
  if (o.coeffs_.size() > coeffs_.size()) coeffs_.resize(o.coeffs_.size());
  for (std::size_t k = 0; k < o.coeffs_.size(); ++k) coeffs_[k] -= o.coeffs_[k];
  trim();
  return *this;
}

RationalPoly& RationalPoly::operator*=(const RationalPoly& o) {
  if (is_zero() || o.is_zero()) {
    coeffs_.clear();
    return *this;
  }
  std::vector<Rational> r(coeffs_.size() + o.coeffs_.size() - 1);
  for (std::size_t i = 0; i < coeffs_.size(); ++i) {
    if (coeffs_[i] == 0) continue;
    for (std::size_t j = 0; j < o.coeffs_.size(); ++j) r[i + j] += coeffs_[i] * o.coeffs_[j];
  }
  coeffs_ = std::move(r);
  trim();
  return *this;
}

RationalPoly& RationalPoly::operator*=(const Rational& c) {
  if (c == 0) {
    coeffs_.clear();
    return *this;
  }
  for (auto& a : coeffs_) a *= c;
  return *this;
}

RationalPoly RationalPoly::operator-() const {
  RationalPoly r = *this;
  for (auto& a : r.coeffs_) a = -a;
  return r;
}

RationalPoly RationalPoly::pow(int e) const {
  RationalPoly result = constant(1);
  RationalPoly base = *this;
  while (e > 0) {
    if (e & 1) result *= base;
    e >>= 1;
    if (e) base *= base;
  }
  return result;
}

RationalPoly RationalPoly::primitive() const {
  if (is_zero()) return {};
  BigInt den_lcm = 1;
  for (const auto& a : coeffs_) mpz_lcm(den_lcm.get_mpz_t(), den_lcm.get_mpz_t(), a.get_den_mpz_t());
  BigInt num_gcd = 0;
  for (const auto& a : coeffs_) {
    BigInt scaled = a.get_num() * (den_lcm / a.get_den());
    mpz_gcd(num_gcd.get_mpz_t(), num_gcd.get_mpz_t(), scaled.get_mpz_t());
  }
  Rational scale = make_rational(den_lcm, num_gcd);
  if (sgn(coeffs_.back()) < 0) scale = -scale;
  return *this * scale;
}

RationalPoly RationalPoly::monic() const {
  if (is_zero()) return {};
  return *this * Rational(1 / leading());
}

bool RationalPoly::even_part(RationalPoly& g) const {
  std::vector<Rational> half;
  for (std::size_t k = 0; k < coeffs_.size(); ++k) {
    if (k % 2 == 1) {
      if (coeffs_[k] != 0) return false;
    } else {
      half.push_back(coeffs_[k]);
    }
  }
  g = RationalPoly(std::move(half));
  return true;
}

std::string RationalPoly::to_string(const std::string& var) const {
  if (is_zero()) return "0";
  std::ostringstream os;
  bool first = true;
  for (int k = degree(); k >= 0; --k) {
    const Rational& c = coeffs_[static_cast<std::size_t>(k)];
    if (c == 0) continue;
    Rational mag = abs(c);
    if (first) {
      if (sgn(c) < 0) os << "-";
    } else {
      os << (sgn(c) < 0 ? " - " : " + ");
    }
    first = false;
    if (mag != 1 || k == 0) os << mag.get_str();
    if (k > 0) {
      if (mag != 1) os << "*";
      os << var;
      if (k > 1) os << "^" << k;
    }
  }
  return os.str();
}

std::pair<RationalPoly, RationalPoly> divmod(const RationalPoly& a, const RationalPoly& b) {
  if (b.is_zero()) throw Error(ErrorKind::degenerate, "polynomial division by zero");
  if (a.degree() < b.degree()) return {RationalPoly{}, a};
  std::vector<Rational> rem = a.coeffs();
  std::vector<Rational> quot(static_cast<std::size_t>(a.degree() - b.degree() + 1));
  const Rational inv_lead = 1 / b.leading();
  const int db = b.degree();
  for (int k = a.degree(); k >= db; --k) {
    const Rational& top = rem[static_cast<std::size_t>(k)];
    if (top == 0) continue;
    Rational q = top * inv_lead;
    quot[static_cast<std::size_t>(k - db)] = q;
    for (int j = 0; j <= db; ++j) {
      rem[static_cast<std::size_t>(k - db + j)] -= q * b.coeffs()[static_cast<std::size_t>(j)];
    }
  }
  return {RationalPoly(std::move(quot)), RationalPoly(std::move(rem))};
}

RationalPoly exact_div(const RationalPoly& a, const RationalPoly& b) {
  auto [q, r] = divmod(a, b);
  if (!r.is_zero()) throw Error(ErrorKind::degenerate, "inexact polynomial division");
  return q;
}

bool divides(const RationalPoly& d, const RationalPoly& a) { return divmod(a, d).second.is_zero(); }

RationalPoly gcd(const RationalPoly& a, const RationalPoly& b) {
  RationalPoly x = a;
  RationalPoly y = b;
  while (!y.is_zero()) {
    RationalPoly r = divmod(x, y).second;
    x = std::move(y);
    // Keeping the remainder primitive stops coefficient growth.
    y = r.primitive();
  }
  return x.monic();
}

std::vector<std::pair<RationalPoly, int>> square_free_decomposition(const RationalPoly& f) {
  if (f.is_zero()) throw Error(ErrorKind::degenerate, "square-free decomposition of the zero polynomial");
  std::vector<std::pair<RationalPoly, int>> out;
  if (f.degree() == 0) return out;
  // b and c must be scaled consistently, which holds once f is monic.
  const RationalPoly fm = f.monic();
  const RationalPoly fp = fm.derivative();
  RationalPoly a = gcd(fm, fp);
  RationalPoly b = exact_div(fm, a);
  RationalPoly c = exact_div(fp, a);
  RationalPoly d = c - b.derivative();
  for (int i = 1; b.degree() > 0; ++i) {
    RationalPoly g = gcd(b, d);
    if (g.degree() > 0) out.emplace_back(g, i);
    b = exact_div(b, g);
    c = exact_div(d, g);
    d = c - b.derivative();
  }
  return out;
}

namespace {

// Integer-coefficient multiple of f by a positive factor; signs are kept.
RationalPoly positive_rescale(const RationalPoly& f) {
  RationalPoly p = f.primitive();
  return sgn(f.leading()) < 0 ? -p : p;
}

}  // namespace

SturmChain::SturmChain(const RationalPoly& f) {
  if (f.is_zero()) throw Error(ErrorKind::degenerate, "Sturm chain of the zero polynomial");
  chain_.push_back(positive_rescale(f));
  RationalPoly d = f.derivative();
  if (d.is_zero()) return;
  chain_.push_back(positive_rescale(d));
  while (true) {
    RationalPoly r = divmod(chain_[chain_.size() - 2], chain_.back()).second;
    if (r.is_zero()) break;
    chain_.push_back(-positive_rescale(r));
  }
}

int SturmChain::variations(const Rational& x) const {
  int count = 0;
  int last = 0;
  for (const auto& p : chain_) {
    const int s = p.sign_at(x);
    if (s == 0) continue;
    if (last != 0 && s != last) ++count;
    last = s;
  }
  return count;
}

int SturmChain::count(const Rational& a, const Rational& b) const { return variations(a) - variations(b); }

Rational cauchy_root_bound(const RationalPoly& f) {
  if (f.is_zero()) throw Error(ErrorKind::degenerate, "root bound of the zero polynomial");
  Rational m = 0;
  const Rational& lead = f.leading();
  for (int k = 0; k < f.degree(); ++k) {
    Rational r = abs(f.coeffs()[static_cast<std::size_t>(k)] / lead);
    if (r > m) m = r;
  }
  return m + 1;
}

}  // namespace momentwave
