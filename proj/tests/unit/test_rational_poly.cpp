#include <gtest/gtest.h>

#include <random>

#include "momentwave/error.hpp"
#include "momentwave/rational_poly.hpp"

using namespace momentwave;

namespace {

RationalPoly random_poly(std::mt19937_64& rng, int degree) {
  std::uniform_int_distribution<long> num(-9, 9);
  std::uniform_int_distribution<long> den(1, 5);
  std::vector<Rational> c;
  for (int i = 0; i <= degree; ++i) c.push_back(make_rational(num(rng), den(rng)));
  if (c.back() == 0) c.back() = 1;
  return RationalPoly(c);
}

RationalPoly linear(long num, long den) { return RationalPoly({make_rational(-num, den), 1}); }

}  // namespace

TEST(RationalPoly, TrimsAndDegree) {
  EXPECT_EQ(RationalPoly({1, 2, 0, 0}).degree(), 1);
  EXPECT_TRUE(RationalPoly({0, 0}).is_zero());
  EXPECT_EQ(RationalPoly{}.degree(), -1);
}

TEST(RationalPoly, ArithmeticAndEval) {
  const RationalPoly f({1, 1});
  const RationalPoly g({-1, 1});
  EXPECT_EQ(f * g, RationalPoly({-1, 0, 1}));
  EXPECT_EQ((f * g).eval(3), 8);
  EXPECT_EQ(f.pow(3), RationalPoly({1, 3, 3, 1}));
  EXPECT_EQ(RationalPoly({1, 2, 3}).derivative(), RationalPoly({2, 6}));
  EXPECT_EQ((f - f).degree(), -1);
}

TEST(RationalPoly, DivmodReconstructs) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const RationalPoly a = random_poly(rng, 7);
    const RationalPoly b = random_poly(rng, 3);
    auto [q, r] = divmod(a, b);
    EXPECT_EQ(q * b + r, a);
    EXPECT_LT(r.degree(), b.degree());
  }
  EXPECT_THROW(divmod(RationalPoly({1}), RationalPoly{}), Error);
  EXPECT_THROW(exact_div(RationalPoly({1, 0, 1}), RationalPoly({1, 1})), Error);
}

TEST(RationalPoly, GcdOfProducts) {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 20; ++trial) {
    const RationalPoly common = random_poly(rng, 2);
    const RationalPoly a = common * random_poly(rng, 3);
    const RationalPoly b = common * random_poly(rng, 2);
    const RationalPoly g = gcd(a, b);
    EXPECT_TRUE(divides(g, a));
    EXPECT_TRUE(divides(g, b));
    EXPECT_TRUE(divides(g, common) || divides(common, g));
    EXPECT_GE(g.degree(), common.degree());
    EXPECT_EQ(g.leading(), 1);
  }
}

TEST(RationalPoly, PrimitiveForm) {
  const RationalPoly f({make_rational(-1, 3), 0, make_rational(-2, 3)});
  EXPECT_EQ(f.primitive(), RationalPoly({1, 0, 2}));
  EXPECT_EQ(RationalPoly({6, 4}).primitive(), RationalPoly({3, 2}));
}

TEST(RationalPoly, SquareFreeDecompositionReconstructs) {
  // (x - 1/2)^3 (x^2 - 1/3) (x + 2)^2 x
  const RationalPoly a = linear(1, 2);
  const RationalPoly b({make_rational(-1, 3), 0, 1});
  const RationalPoly c = linear(-2, 1);
  const RationalPoly d({0, 1});
  const RationalPoly f = a.pow(3) * b * c.pow(2) * d * Rational(7);
  const auto parts = square_free_decomposition(f);
  RationalPoly rebuilt = RationalPoly::constant(1);
  for (const auto& [g, m] : parts) {
    rebuilt *= g.pow(m);
    EXPECT_EQ(gcd(g, g.derivative()).degree(), 0);
  }
  EXPECT_EQ(rebuilt, f.monic());
  ASSERT_EQ(parts.size(), 3u);
  EXPECT_EQ(parts[0].second, 1);
  EXPECT_EQ(parts[0].first, (b * d).monic());
  EXPECT_EQ(parts[1].first, c.monic());
  EXPECT_EQ(parts[2].first, a.monic());
}

TEST(SturmChain, CountsKnownRoots) {
  // roots -2, -1/3, 0, 1/5, 7
  RationalPoly f = linear(-2, 1) * linear(-1, 3) * RationalPoly({0, 1}) * linear(1, 5) * linear(7, 1);
  const SturmChain chain(f);
  EXPECT_EQ(chain.count(-10, 10), 5);
  EXPECT_EQ(chain.count(-1, 1), 3);
  EXPECT_EQ(chain.count(0, 1), 1);  // (0, 1] excludes 0
  EXPECT_EQ(chain.count(-1, 0), 2);
  EXPECT_EQ(chain.count(8, 9), 0);
  const Rational bound = cauchy_root_bound(f);
  EXPECT_GT(bound, 7);
}

TEST(SturmChain, ComplexRootsNotCounted) {
  const RationalPoly f({1, 0, 1});  // x^2 + 1
  EXPECT_EQ(SturmChain(f).count(-100, 100), 0);
}

TEST(RationalPoly, EvenPart) {
  RationalPoly g;
  EXPECT_TRUE(RationalPoly({make_rational(-1, 3), 0, 1}).even_part(g));
  EXPECT_EQ(g, RationalPoly({make_rational(-1, 3), 1}));
  EXPECT_FALSE(RationalPoly({0, 1}).even_part(g));
}

TEST(RationalPoly, ToString) {
  EXPECT_EQ(RationalPoly({make_rational(-1, 3), 0, 1}).to_string("l"), "l^2 - 1/3");
  EXPECT_EQ(RationalPoly{}.to_string(), "0");
  EXPECT_EQ(RationalPoly({0, -2}).to_string(), "-2*x");
}
