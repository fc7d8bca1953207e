#include <gtest/gtest.h>

#include <algorithm>

#include "momentwave/error.hpp"
#include "momentwave/subluminal.hpp"

using namespace momentwave;

namespace {

const Real sqrt2 = sqrt(Real(2));
const FourVelocity boosted{sqrt2, 1, 0, 0};

void expect_close(const Real& a, const Real& b, double tol) {
  EXPECT_LE(abs(a - b), tol) << a << " vs " << b;
}

}  // namespace

TEST(Quadratic, Examples) {
  auto f = quadratic_coeffs(1, FourVelocity{sqrt(Real(3)), 1, 1, 0});
  expect_close(f.A, 1, 1e-45);
  expect_close(f.B, 0, 1e-45);
  expect_close(f.C, -1, 1e-45);
  f = quadratic_coeffs(0, boosted);
  expect_close(f.A, 2, 1e-45);
  expect_close(f.B, -2 * sqrt2, 1e-45);
  expect_close(f.C, 1, 1e-45);
  f = quadratic_coeffs(Real(1) / 3, boosted);
  expect_close(f.A, Real(5) / 3, 1e-45);
  expect_close(f.B, -4 * sqrt2 / 3, 1e-45);
  expect_close(f.C, Real(1) / 3, 1e-45);
}

TEST(Quadratic, RejectsBadInput) {
  EXPECT_THROW(quadratic_coeffs(Real("1.5"), FourVelocity{}), Error);
  EXPECT_THROW(quadratic_coeffs(Real("-0.1"), FourVelocity{}), Error);
  EXPECT_THROW(quadratic_coeffs(Real("0.5"), FourVelocity{1, 1, 0, 0}), Error);
  EXPECT_THROW(quadratic_coeffs(Real("0.5"), FourVelocity{-1, 0, 0, 0}), Error);
}

TEST(Speeds, Examples) {
  auto [lo, hi] = speeds_in_direction(1, FourVelocity{sqrt(Real(3)), 1, 1, 0});
  expect_close(lo, -1, 1e-40);
  expect_close(hi, 1, 1e-40);
  std::tie(lo, hi) = speeds_in_direction(0, boosted);
  expect_close(lo, 1 / sqrt2, 1e-40);
  expect_close(hi, 1 / sqrt2, 1e-40);
  std::tie(lo, hi) = speeds_in_direction(Real(1) / 3, boosted);
  EXPECT_NEAR(static_cast<double>(lo), 0.21928, 5e-6);
  EXPECT_NEAR(static_cast<double>(hi), 0.91210, 5e-6);
}

TEST(Speeds, ComovingRootsAreSqrtK) {
  for (int i = 0; i <= 10; ++i) {
    const Real k = Real(i) / 10;
    const auto [lo, hi] = speeds_in_direction(k, FourVelocity{});
    expect_close(lo, -sqrt(k), 1e-40);
    expect_close(hi, sqrt(k), 1e-40);
  }
}

TEST(Discriminant, Examples) {
  EXPECT_TRUE(verify_discriminant(Real(1) / 3, boosted));
  EXPECT_TRUE(verify_discriminant(0, boosted));
  EXPECT_TRUE(verify_discriminant(1, FourVelocity{sqrt(Real(3)), 1, 1, 0}));
  const auto f = quadratic_coeffs(Real(1) / 3, boosted);
  expect_close(f.B * f.B / 4 - f.A * f.C, Real(1) / 3, 1e-45);
}

TEST(Subluminality, RandomSamples) {
  const auto rep = verify_subluminality(1000, 2024, 1e-12, model_k_values(4));
  EXPECT_TRUE(rep.pass);
  EXPECT_TRUE(rep.failures.empty());
  EXPECT_LE(rep.max_discriminant_error, Real("1e-12"));
  EXPECT_LE(rep.max_excess, Real("1e-12"));
}

TEST(Subluminality, RandomVelocitiesAreNormalized) {
  std::mt19937_64 rng(9);
  for (int i = 0; i < 200; ++i) EXPECT_NO_THROW(check_four_velocity(random_four_velocity(rng)));
}

TEST(Subluminality, ModelKValues) {
  auto ks = model_k_values(2);
  std::sort(ks.begin(), ks.end());
  ASSERT_EQ(ks.size(), 4u);
  expect_close(ks[0], 0, 1e-40);
  expect_close(ks[1], Real(1) / 5, 1e-40);
  expect_close(ks[2], Real(1) / 3, 1e-40);
  expect_close(ks[3], Real(3) / 5, 1e-40);
}

TEST(Subluminality, CheckSampleFlagsBoundaryCase) {
  // k = 1 gives f(1) = 0 exactly, which is allowed.
  const auto s = check_sample(1, boosted);
  EXPECT_TRUE(s.ok) << s.failure;
}
