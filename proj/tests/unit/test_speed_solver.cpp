#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "momentwave/error.hpp"
#include "momentwave/speed_solver.hpp"

using namespace momentwave;

namespace {

Rational q(long n, long d = 1) { return make_rational(n, d); }

// Determinant oracle: evaluate at side+1 integer points with exact
// elimination and interpolate (Newton form).
RationalPoly det_by_interpolation(const CharMatrix& M) {
  const std::size_t n = M.size();
  std::vector<Rational> xs, ys;
  for (std::size_t t = 0; t <= n; ++t) {
    const Rational x(static_cast<long>(t));
    QMatrix A(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) A(i, j) = M.at(i, j).mu * x + M.at(i, j).phi;
    xs.push_back(x);
    ys.push_back(determinant(A));
  }
  std::vector<Rational> coef = ys;
  for (std::size_t j = 1; j <= n; ++j)
    for (std::size_t i = n; i >= j; --i) coef[i] = (coef[i] - coef[i - 1]) / (xs[i] - xs[i - j]);
  RationalPoly result = RationalPoly::constant(coef[n]);
  for (std::size_t k = n; k-- > 0;) result = result * RationalPoly({-xs[k], 1}) + RationalPoly::constant(coef[k]);
  return result;
}

MomentMatrix factorial_closure(int N) {
  MomentMatrix G(N);
  for (int m = 0; m <= N; ++m)
    for (int n = m; n <= N; ++n) G.set(m, n, Rational(factorial(m + n + 2)));
  return G;
}

struct Expected {
  ExactKind kind;
  Rational value;
  int sign;
  int mult;
};

// +-sqrt(k), which the solver reports as a rational when k is a square.
Expected root_of(const Rational& k, int sign, int mult = 1) {
  BigInt num_root, den_root;
  if (mpz_perfect_square_p(k.get_num_mpz_t()) && mpz_perfect_square_p(k.get_den_mpz_t())) {
    mpz_sqrt(num_root.get_mpz_t(), k.get_num_mpz_t());
    mpz_sqrt(den_root.get_mpz_t(), k.get_den_mpz_t());
    return {ExactKind::rational, make_rational(num_root * sign, den_root), 1, mult};
  }
  return {ExactKind::sqrt_rational, k, sign, mult};
}

void expect_roots(const SpeedSet& s, const std::vector<Expected>& expected) {
  ASSERT_EQ(s.roots.size(), expected.size());
  for (std::size_t i = 0; i < expected.size(); ++i) {
    const auto& r = s.roots[i];
    EXPECT_EQ(r.kind, expected[i].kind) << "root " << i;
    EXPECT_EQ(r.value, expected[i].value) << "root " << i;
    if (r.kind == ExactKind::sqrt_rational) {
      EXPECT_EQ(r.sign, expected[i].sign) << "root " << i;
    }
    EXPECT_EQ(r.multiplicity, expected[i].mult) << "root " << i;
  }
}

}  // namespace

TEST(CharPoly, Examples) {
  CharMatrix M;
  M.rows = {{0, 0}, {1, 0}};
  M.cols = {{1, 0}, {0, 1}};
  M.entries = {{1, 0}, {0, q(1, 3)}, {0, 1}, {1, 0}};
  EXPECT_EQ(char_poly(M), RationalPoly({q(-1, 3), 0, 1}));

  CharMatrix one;
  one.rows = {{0, 0}};
  one.cols = {{0, 0}};
  one.entries = {{q(-2, 7), 0}};
  EXPECT_EQ(char_poly(one), RationalPoly({0, q(-2, 7)}));

  EXPECT_TRUE(same_up_to_scale(char_poly(reduced_matrix(0, 1)), RationalPoly({q(-1, 3), 0, 1})));
}

TEST(CharPoly, AgreesWithInterpolationOracle) {
  for (int p = 0; p <= 4; ++p)
    for (int eta = 0; eta <= 4; ++eta) {
      const auto M = reduced_matrix(p, eta);
      EXPECT_EQ(char_poly(M), det_by_interpolation(M)) << "p=" << p << " eta=" << eta;
    }
  for (int N = 1; N <= 3; ++N)
    for (int p = 0; p <= N; ++p) {
      const auto M = full_matrix(p, N, factorial_closure(N));
      EXPECT_EQ(char_poly(M), det_by_interpolation(M)) << "N=" << N << " p=" << p;
    }
}

TEST(CharPoly, PhiScaling) {
  // Entries are homogeneous in (mu, phi): det(phi=c)(lambda) = c^n det(phi=1)(lambda/c).
  const auto M = reduced_matrix(1, 2);
  const RationalPoly f1 = char_poly(M, 1);
  const RationalPoly f2 = char_poly(M, 2);
  for (long x = -3; x <= 3; ++x) EXPECT_EQ(f2.eval(Rational(x)), f1.eval(make_rational(x, 2)) * 8);
}

TEST(RealRoots, Examples) {
  const auto cube = real_roots(RationalPoly({0, 0, 0, 1}));
  ASSERT_EQ(cube.size(), 1u);
  EXPECT_EQ(cube[0].kind, ExactKind::rational);
  EXPECT_EQ(cube[0].value, 0);
  EXPECT_EQ(cube[0].multiplicity, 3);

  const auto third = real_roots(RationalPoly({q(-1, 3), 0, 1}));
  ASSERT_EQ(third.size(), 2u);
  EXPECT_EQ(third[0].kind, ExactKind::sqrt_rational);
  EXPECT_EQ(third[0].value, q(1, 3));
  EXPECT_EQ(third[0].sign, -1);
  EXPECT_NEAR(third[1].approx.convert_to<double>(), 0.5773502692, 1e-10);

  const auto fifth = real_roots(RationalPoly({-1, 0, 25}));
  ASSERT_EQ(fifth.size(), 2u);
  EXPECT_EQ(fifth[0].kind, ExactKind::rational);
  EXPECT_EQ(fifth[0].value, q(-1, 5));
  EXPECT_EQ(fifth[1].value, q(1, 5));

  EXPECT_THROW(real_roots(RationalPoly{}), Error);
}

TEST(RealRoots, IrrationalNonSquareRootsStayIntervals) {
  // x^3 - 2: one real root 2^{1/3}.
  const auto r = real_roots(RationalPoly({-2, 0, 0, 1}), 1e-12);
  ASSERT_EQ(r.size(), 1u);
  EXPECT_EQ(r[0].kind, ExactKind::interval);
  EXPECT_LE(r[0].hi - r[0].lo, Rational(1e-12));
  EXPECT_NEAR(r[0].approx.convert_to<double>(), std::cbrt(2.0), 1e-12);
}

TEST(RealRoots, RationalRootsDivide) {
  const RationalPoly f = RationalPoly({q(-3, 7), 1}).pow(2) * RationalPoly({q(5, 2), 1}) * RationalPoly({1, 0, 1});
  const auto roots = real_roots(f);
  ASSERT_EQ(roots.size(), 2u);
  for (const auto& r : roots) {
    ASSERT_EQ(r.kind, ExactKind::rational);
    EXPECT_TRUE(divides(RationalPoly({-r.value, 1}).pow(r.multiplicity), f));
  }
  EXPECT_EQ(roots[0].value, q(-5, 2));
  EXPECT_EQ(roots[1].multiplicity, 2);
}

TEST(MergeFactor, CoprimeBase) {
  Factorization base;
  const RationalPoly x({0, 1});
  const RationalPoly a({q(-1, 3), 0, 1});
  merge_factor(base, x * a, 1);
  merge_factor(base, x, 2);
  merge_factor(base, a * RationalPoly({-1, 1}), 3);
  RationalPoly product = RationalPoly::constant(1);
  int degree = 0;
  for (const auto& [g, m] : base) {
    product *= g.pow(m);
    degree += g.degree() * m;
  }
  EXPECT_EQ(product, (x.pow(3) * a.pow(4) * RationalPoly({-1, 1}).pow(3)).monic());
  for (std::size_t i = 0; i < base.size(); ++i)
    for (std::size_t j = i + 1; j < base.size(); ++j) EXPECT_EQ(gcd(base[i].first, base[j].first).degree(), 0);
}

TEST(BlockSpeeds, EtaOneLaw) {
  for (int p = 0; p <= 8; ++p) {
    EXPECT_TRUE(same_up_to_scale(char_poly(reduced_matrix(p, 1)), RationalPoly({q(-1, 2 * p + 3), 0, 1})))
        << "p=" << p;
  }
}

TEST(BlockSpeeds, TopBlockIsZero) {
  for (int N = 0; N <= 6; ++N) {
    const auto s = block_speeds(N, N);
    expect_roots(s, {{ExactKind::rational, 0, 1, 1}});
  }
}

TEST(BlockSpeeds, SecondBlock) {
  for (int N = 1; N <= 6; ++N) {
    const auto s = block_speeds(N - 1, N);
    const Rational k = q(1, 2 * N + 1);
    expect_roots(s, {root_of(k, -1), {ExactKind::rational, 0, 1, 1}, root_of(k, 1)});
  }
}

TEST(BlockSpeeds, ThirdBlockFrozen) {
  // eta = 1 gives 1/(2N-1), eta = 2 gives 0 and 3/(2N+1).
  for (int N = 2; N <= 6; ++N) {
    const auto s = block_speeds(N - 2, N);
    const Rational k1 = q(1, 2 * N - 1);
    const Rational k2 = q(3, 2 * N + 1);
    expect_roots(s, {root_of(k2, -1), root_of(k1, -1), {ExactKind::rational, 0, 1, 2}, root_of(k1, 1),
                     root_of(k2, 1)});
    EXPECT_EQ(s.count(), block_side(N - 2, N));
  }
}

TEST(BlockSpeeds, FullSystemMatchesReduced) {
  const auto G = factorial_closure(3);
  for (int p = 0; p <= 3; ++p) {
    const auto full = block_speeds_full(p, G);
    const auto red = block_speeds(p, 3);
    ASSERT_EQ(full.roots.size(), red.roots.size());
    for (std::size_t i = 0; i < red.roots.size(); ++i) {
      EXPECT_EQ(full.roots[i].kind, red.roots[i].kind);
      EXPECT_EQ(full.roots[i].value, red.roots[i].value);
      EXPECT_EQ(full.roots[i].multiplicity, red.roots[i].multiplicity);
    }
  }
}

TEST(ModelSpeeds, SmallModels) {
  expect_roots(model_speeds(0), {{ExactKind::rational, 0, 1, 1}});
  expect_roots(model_speeds(1), {{ExactKind::sqrt_rational, q(1, 3), -1, 1},
                                 {ExactKind::rational, 0, 1, 3},
                                 {ExactKind::sqrt_rational, q(1, 3), 1, 1}});
  const auto s2 = model_speeds(2);
  EXPECT_EQ(s2.count(), 14);
  expect_roots(s2, {{ExactKind::sqrt_rational, q(3, 5), -1, 1},
                    {ExactKind::sqrt_rational, q(1, 3), -1, 1},
                    {ExactKind::sqrt_rational, q(1, 5), -1, 2},
                    {ExactKind::rational, 0, 1, 6},
                    {ExactKind::sqrt_rational, q(1, 5), 1, 2},
                    {ExactKind::sqrt_rational, q(1, 3), 1, 1},
                    {ExactKind::sqrt_rational, q(3, 5), 1, 1}});
}

TEST(ModelSpeeds, CountsBoundAndSymmetry) {
  for (int N = 0; N <= 6; ++N) {
    const auto s = model_speeds(N);
    int unknowns = 0;
    for (int n = 0; n <= N; ++n) unknowns += (n + 1) * (n + 1);
    EXPECT_EQ(s.count(), unknowns) << "N=" << N;
    for (std::size_t i = 0; i < s.roots.size(); ++i) {
      const auto& r = s.roots[i];
      EXPECT_LE(abs(r.approx), 1) << "N=" << N;
      const auto& mirror = s.roots[s.roots.size() - 1 - i];
      EXPECT_EQ(mirror.multiplicity, r.multiplicity);
      EXPECT_LT(abs(mirror.approx + r.approx), 1e-30);
    }
  }
}

TEST(ModelSpeeds, DegreeBookkeeping) {
  std::mt19937_64 rng(5);
  for (int N = 1; N <= 4; ++N) {
    int resamples = 0;
    const auto G = random_admissible_G(N, rng, resamples);
    for (int p = 0; p <= N; ++p) {
      int reduced = 0;
      for (int eta = 0; eta <= N - p; ++eta) reduced += char_poly(reduced_matrix(p, eta)).degree();
      EXPECT_EQ(char_poly(full_matrix(p, N, G)).degree(), reduced);
    }
  }
}

TEST(Independence, KineticClosure) {
  for (bool ok : check_independence(factorial_closure(2))) EXPECT_TRUE(ok);
}

TEST(Independence, SeededTrials) {
  const auto r = verify_independence(2, 5, 7);
  EXPECT_TRUE(r.pass);
  ASSERT_EQ(r.trials.size(), 5u);
  EXPECT_EQ(r.trials[3].seed, 10u);
  const auto again = verify_independence(2, 5, 7);
  for (std::size_t i = 0; i < r.trials.size(); ++i) EXPECT_EQ(r.trials[i].resamples, again.trials[i].resamples);
  EXPECT_THROW(verify_independence(2, 0, 7), Error);
}
