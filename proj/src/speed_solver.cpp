#include "momentwave/speed_solver.hpp"

#include <algorithm>

#include "momentwave/error.hpp"

namespace momentwave {

std::string_view to_string(ExactKind kind) {
  switch (kind) {
    case ExactKind::rational: return "rational";
    case ExactKind::sqrt_rational: return "sqrt";
    case ExactKind::interval: return "interval";
  }
  return "unknown";
}

int SpeedSet::count() const {
  int total = 0;
  for (const auto& r : roots) total += r.multiplicity;
  return total;
}

void merge_factor(Factorization& base, const RationalPoly& g_in, int mult) {
  RationalPoly g = g_in.monic();
  const std::size_t existing = base.size();
  for (std::size_t i = 0; i < existing && g.degree() > 0; ++i) {
    RationalPoly d = gcd(base[i].first, g);
    if (d.degree() <= 0) continue;
    RationalPoly rest = exact_div(base[i].first, d).monic();
    const int old_mult = base[i].second;
    base[i] = {d, old_mult + mult};
    if (rest.degree() > 0) base.emplace_back(rest, old_mult);
    g = exact_div(g, d).monic();
  }
  if (g.degree() > 0) base.emplace_back(g, mult);
}

void merge_factorization(Factorization& base, const Factorization& other, int scale) {
  for (const auto& [g, m] : other) merge_factor(base, g, m * scale);
}

RationalPoly char_poly(const CharMatrix& M, const Rational& phi_value) {
  const std::size_t n = M.size();
  if (M.cols.size() != n) throw Error(ErrorKind::domain, "characteristic matrix is not square");
  if (n == 0) return RationalPoly::constant(1);
  std::vector<std::vector<RationalPoly>> a(n, std::vector<RationalPoly>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const auto& e = M.at(i, j);
      a[i][j] = RationalPoly({e.phi * phi_value, e.mu});
    }

  int sign = 1;
  RationalPoly prev = RationalPoly::constant(1);
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (a[k][k].is_zero()) {
      std::size_t piv = k + 1;
      while (piv < n && a[piv][k].is_zero()) ++piv;
      if (piv == n) return {};
      std::swap(a[k], a[piv]);
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      for (std::size_t j = k + 1; j < n; ++j) {
        RationalPoly t = a[i][j] * a[k][k] - a[i][k] * a[k][j];
        a[i][j] = exact_div(t, prev);
      }
      a[i][k] = RationalPoly{};
    }
    prev = a[k][k];
  }
  RationalPoly det = a[n - 1][n - 1];
  return sign < 0 ? -det : det;
}

namespace {

Rational floor_q(const Rational& x) {
  BigInt f;
  mpz_fdiv_q(f.get_mpz_t(), x.get_num_mpz_t(), x.get_den_mpz_t());
  return Rational(f);
}

// Rational with the smallest denominator in [lo, hi], 0 <= lo <= hi.
Rational simplest_nonneg(const Rational& lo, const Rational& hi) {
  const Rational fl = floor_q(lo);
  if (fl == lo) return lo;
  if (fl + 1 <= hi) return fl + 1;
  return fl + 1 / simplest_nonneg(1 / (hi - fl), 1 / (lo - fl));
}

Rational simplest_in(const Rational& lo, const Rational& hi) {
  if (lo <= 0 && hi >= 0) return 0;
  if (hi < 0) return -simplest_nonneg(-hi, -lo);
  return simplest_nonneg(lo, hi);
}

// Refines (lo, hi], holding exactly one root of the square-free f, until
// the width is at most `width` or the root is hit exactly.
void refine(const RationalPoly& f, Rational& lo, Rational& hi, const Rational& width) {
  if (f.sign_at(hi) == 0) {
    lo = hi;
    return;
  }
  const int s_hi = f.sign_at(hi);
  while (hi - lo > width) {
    Rational mid = (lo + hi) / 2;
    const int s = f.sign_at(mid);
    if (s == 0) {
      lo = hi = mid;
      return;
    }
    if (s == s_hi) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
}

void isolate(const RationalPoly& f, const SturmChain& chain, const Rational& lo, const Rational& hi,
             std::vector<std::pair<Rational, Rational>>& out) {
  const int c = chain.count(lo, hi);
  if (c == 0) return;
  if (c == 1) {
    out.emplace_back(lo, hi);
    return;
  }
  const Rational mid = (lo + hi) / 2;
  isolate(f, chain, lo, mid, out);
  isolate(f, chain, mid, hi, out);
}

Rational recognition_width() {
  BigInt two_pow;
  mpz_ui_pow_ui(two_pow.get_mpz_t(), 2, 120);
  return make_rational(BigInt(1), two_pow);
}

Rational from_double(double x) {
  Rational q(x);
  return q;
}

void classify(const RationalPoly& f, SpeedRoot& root) {
  const Rational q = simplest_in(root.lo, root.hi);
  if (f.eval(q) == 0) {
    root.kind = ExactKind::rational;
    root.value = q;
    root.lo = root.hi = q;
    root.approx = to_real(q);
    return;
  }
  // root in (lo, hi] and nonzero, so the interval has constant sign once refined.
  const bool positive = root.lo >= 0;
  const Rational sq_lo = positive ? root.lo * root.lo : root.hi * root.hi;
  const Rational sq_hi = positive ? root.hi * root.hi : root.lo * root.lo;
  const Rational q2 = simplest_in(sq_lo, sq_hi);
  if (q2 > 0 && divides(RationalPoly({-q2, 0, 1}), f)) {
    root.kind = ExactKind::sqrt_rational;
    root.value = q2;
    root.sign = positive ? 1 : -1;
    root.approx = sqrt(to_real(q2)) * root.sign;
    return;
  }
  root.kind = ExactKind::interval;
  root.approx = to_real((root.lo + root.hi) / 2);
}

}  // namespace

std::vector<SpeedRoot> real_roots(const Factorization& fac, double tol) {
  if (!(tol > 0)) throw Error(ErrorKind::domain, "root tolerance must be positive");
  const Rational report_width = std::min(from_double(tol), recognition_width());
  std::vector<SpeedRoot> roots;
  for (const auto& [g, mult] : fac) {
    if (g.degree() <= 0) continue;
    const SturmChain chain(g);
    const Rational bound = cauchy_root_bound(g);
    std::vector<std::pair<Rational, Rational>> intervals;
    isolate(g, chain, -bound, bound, intervals);
    for (auto [lo, hi] : intervals) {
      refine(g, lo, hi, report_width);
      SpeedRoot r;
      r.multiplicity = mult;
      r.lo = lo;
      r.hi = hi;
      classify(g, r);
      roots.push_back(std::move(r));
    }
  }
  std::sort(roots.begin(), roots.end(), [](const SpeedRoot& a, const SpeedRoot& b) { return a.approx < b.approx; });
  return roots;
}

std::vector<SpeedRoot> real_roots(const RationalPoly& f, double tol) {
  if (f.is_zero()) throw Error(ErrorKind::degenerate, "real_roots of the zero polynomial");
  return real_roots(square_free_decomposition(f), tol);
}

int block_multiplicity(int p) { return p == 0 ? 1 : 2; }

namespace {

Factorization block_factorization(int p, int N) {
  Factorization fac;
  for (int eta = 0; eta <= N - p; ++eta) {
    const RationalPoly f = char_poly(reduced_matrix(p, eta));
    if (f.is_zero()) {
      throw Error(ErrorKind::degenerate, "reduced subsystem p=" + std::to_string(p) + " eta=" +
                                             std::to_string(eta) + " is singular for every speed");
    }
    merge_factorization(fac, square_free_decomposition(f));
  }
  return fac;
}

void check_block(int p, int N) {
  if (N < 0 || p < 0 || p > N) {
    throw Error(ErrorKind::domain, "block p=" + std::to_string(p) + " outside 0..N for N=" + std::to_string(N));
  }
}

}  // namespace

SpeedSet block_speeds(int p, int N, double tol) {
  check_block(p, N);
  return SpeedSet{p, N, real_roots(block_factorization(p, N), tol)};
}

SpeedSet block_speeds_full(int p, const MomentMatrix& G, double tol) {
  const int N = G.order();
  check_block(p, N);
  const RationalPoly f = char_poly(full_matrix(p, N, G));
  if (f.is_zero()) throw Error(ErrorKind::degenerate, "full block system is singular for every speed");
  return SpeedSet{p, N, real_roots(f, tol)};
}

SpeedSet model_speeds(int N, double tol) {
  if (N < 0) throw Error(ErrorKind::domain, "N must be non-negative");
  Factorization fac;
  for (int p = 0; p <= N; ++p) merge_factorization(fac, block_factorization(p, N), block_multiplicity(p));
  return SpeedSet{-1, N, real_roots(fac, tol)};
}

bool same_up_to_scale(const RationalPoly& f, const RationalPoly& g) { return f.primitive() == g.primitive(); }

RationalPoly reduced_product(int p, int N) {
  RationalPoly prod = RationalPoly::constant(1);
  for (int eta = 0; eta <= N - p; ++eta) prod *= char_poly(reduced_matrix(p, eta));
  return prod;
}

MomentMatrix random_admissible_G(int N, std::mt19937_64& rng, int& resamples) {
  std::uniform_int_distribution<long> den_dist(1, 12);
  resamples = 0;
  for (int attempt = 0; attempt <= 100; ++attempt) {
    MomentMatrix G(N);
    for (int m = 0; m <= N; ++m)
      for (int n = m; n <= N; ++n) {
        const long den = den_dist(rng);
        std::uniform_int_distribution<long> num_dist(den, 10 * den);
        G.set(m, n, make_rational(num_dist(rng), den));
      }
    if (G.is_admissible()) return G;
    ++resamples;
  }
  throw Error(ErrorKind::sampling, "no admissible closure after 100 redraws for N=" + std::to_string(N));
}

std::vector<bool> check_independence(const MomentMatrix& G) {
  const int N = G.order();
  std::vector<bool> equal;
  for (int p = 0; p <= N; ++p) {
    equal.push_back(same_up_to_scale(char_poly(full_matrix(p, N, G)), reduced_product(p, N)));
  }
  return equal;
}

IndependenceReport verify_independence(int N, int trials, std::uint64_t seed) {
  if (trials < 1) throw Error(ErrorKind::domain, "trials must be at least 1");
  if (N < 0) throw Error(ErrorKind::domain, "N must be non-negative");
  IndependenceReport report;
  report.N = N;
  report.seed = seed;
  for (int t = 0; t < trials; ++t) {
    IndependenceTrial trial;
    trial.trial = t;
    trial.seed = seed + static_cast<std::uint64_t>(t);
    std::mt19937_64 rng(trial.seed);
    const MomentMatrix G = random_admissible_G(N, rng, trial.resamples);
    trial.block_equal = check_independence(G);
    trial.equal = std::all_of(trial.block_equal.begin(), trial.block_equal.end(), [](bool b) { return b; });
    report.pass = report.pass && trial.equal;
    report.trials.push_back(std::move(trial));
  }
  return report;
}

}  // namespace momentwave
