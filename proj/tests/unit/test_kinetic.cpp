#include <gtest/gtest.h>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss.hpp>
#include <cmath>
#include <cstdlib>
#include <random>

#include "momentwave/error.hpp"
#include "momentwave/kinetic.hpp"

using namespace momentwave;

namespace {

Rational q(long n, long d = 1) { return make_rational(n, d); }

double as_double(const Real& x) { return static_cast<double>(x); }

// Sphere average by Gauss-Legendre in cos(theta) and the trapezoid rule in
// phi (exact for the trigonometric polynomials that arise).
template <class F>
double sphere_quadrature(F f) {
  constexpr int nphi = 64;
  double sum = 0;
  for (int k = 0; k < nphi; ++k) {
    const double phi = 2 * M_PI * k / nphi;
    sum += boost::math::quadrature::gauss<double, 30>::integrate(
        [&](double c) {
          const double s = std::sqrt(1 - c * c);
          return f(s * std::cos(phi), s * std::sin(phi), c);
        },
        -1.0, 1.0);
  }
  return sum / (2.0 * nphi);
}

SpeedRoot find_root(const SpeedSet& s, double x, double tol) {
  for (const auto& r : s.roots)
    if (std::abs(as_double(r.approx) - x) <= tol) return r;
  return SpeedRoot{Real(NAN), 0};
}

}  // namespace

TEST(KineticG, Examples) {
  const auto G = kinetic_G(2, StateParams{});
  EXPECT_EQ(G[0][0], 2);
  EXPECT_EQ(G[0][1], 6);
  EXPECT_EQ(G[1][1], 24);
  const auto H = kinetic_G(0, StateParams{0, 2, 1});
  EXPECT_NEAR(as_double(H[0][0]), 0.25, 1e-30);
}

TEST(KineticG, MatchesRadialQuadrature) {
  boost::math::quadrature::exp_sinh<double> integrator;
  const StateParams s{Real("0.3"), Real("1.7"), Real("0.8")};
  const auto G = kinetic_G(3, s);
  for (int m = 0; m <= 3; ++m)
    for (int n = 0; n <= 3; ++n) {
      const double lam = 0.3, gamma = 1.7, k = 0.8;
      const double integral = integrator.integrate(
          [&](double rho) { return rho > 1e3 ? 0.0 : std::exp(-rho * gamma / k) * std::pow(rho, m + n + 2); });
      const double expect = std::exp(-lam / k) / (k * k) * integral;
      EXPECT_NEAR(as_double(G[static_cast<std::size_t>(m)][static_cast<std::size_t>(n)]) / expect, 1.0, 1e-12);
    }
}

TEST(KineticG, HankelStructureAndScaling) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 5; ++trial) {
    const auto s = random_state(rng);
    const auto G = kinetic_G(8, s);
    for (int m = 0; m <= 8; ++m)
      for (int n = 0; n <= 8; ++n)
        if (m > 0 && n < 8) EXPECT_EQ(G[static_cast<std::size_t>(m)][static_cast<std::size_t>(n)],
                                      G[static_cast<std::size_t>(m - 1)][static_cast<std::size_t>(n + 1)]);
    StateParams scaled = s;
    scaled.gamma *= 3;
    const auto H = kinetic_G(4, scaled);
    for (int m = 0; m <= 4; ++m)
      for (int n = 0; n <= 4; ++n) {
        const Real ratio = H[static_cast<std::size_t>(m)][static_cast<std::size_t>(n)] /
                           G[static_cast<std::size_t>(m)][static_cast<std::size_t>(n)];
        EXPECT_NEAR(as_double(ratio * pow(Real(3), m + n + 3)), 1.0, 1e-40);
      }
  }
}

TEST(KineticG, ExactVariant) {
  const auto G = kinetic_G_exact(2, q(1, 2));
  EXPECT_EQ(G(0, 0), q(2, 8));
  EXPECT_EQ(G(1, 2), Rational(factorial(5)) / 64);
  EXPECT_THROW(kinetic_G_exact(2, 0), Error);
  EXPECT_THROW(kinetic_G(2, StateParams{0, -1, 1}), Error);
}

TEST(Hankel, Examples) {
  EXPECT_EQ(hankel_det_closed(2, 0), 2);
  EXPECT_EQ(hankel_det_closed(2, 1), 12);
  EXPECT_EQ(hankel_det_closed(0, 2), 4);
  EXPECT_EQ(hankel_det(2, 1), 12);
  EXPECT_EQ(hankel_det(0, 2), 4);
  EXPECT_EQ(hankel_det(4, 3), hankel_det_closed(4, 3));
}

TEST(Hankel, VerifyGrid) {
  const auto rep = verify_hankel(8, 6);
  EXPECT_TRUE(rep.pass);
  EXPECT_EQ(rep.cases, 9 * 7);
  EXPECT_TRUE(rep.exponents_ok);
  EXPECT_FALSE(rep.exponents.empty());
  // The stated row exponent disagrees with the symbolic determinant.
  EXPECT_GT(rep.stated_mismatches, 0);
  for (const auto& c : rep.exponents) EXPECT_TRUE(c.symbolic_ok);
}

TEST(PositiveDefinite, KineticAndCounterexample) {
  EXPECT_TRUE(verify_positive_definite(kinetic_G_exact(2)));
  EXPECT_TRUE(verify_positive_definite(kinetic_G(2, StateParams{})));
  std::mt19937_64 rng(5);
  for (int N = 2; N <= 5; ++N) EXPECT_TRUE(verify_positive_definite(kinetic_G(N, random_state(rng))));
  MomentMatrix bad(1, {q(1), q(1), q(1), q(1)});
  EXPECT_FALSE(verify_positive_definite(bad));
}

TEST(Sphere, MeansAgainstQuadrature) {
  EXPECT_EQ(sphere_mean(0, 0, 0), 1);
  EXPECT_EQ(sphere_mean(2, 0, 0), q(1, 3));
  EXPECT_EQ(sphere_mean(2, 2, 0), q(1, 15));
  EXPECT_EQ(sphere_mean(1, 1, 0), 0);
  for (int a = 0; a <= 4; ++a)
    for (int b = 0; b <= 4; ++b)
      for (int c = 0; c <= 4; ++c) {
        const double quad = sphere_quadrature(
            [&](double x, double y, double z) { return std::pow(x, a) * std::pow(y, b) * std::pow(z, c); });
        EXPECT_NEAR(as_double(to_real(sphere_mean(a, b, c))), quad, 1e-12) << a << b << c;
      }
}

TEST(Sphere, AngularMoments) {
  EXPECT_TRUE(angular_moment(1).is_zero());
  EXPECT_TRUE(angular_moment(3).is_zero());
  const auto m2 = angular_moment(2);
  EXPECT_EQ(m2.at({1, 1}), q(1, 3));
  EXPECT_EQ(m2.at({1, 2}), 0);
  EXPECT_EQ(m2.at({0, 0}), 0);
  const auto m4 = angular_moment(4);
  EXPECT_EQ(m4.at({1, 1, 2, 2}), q(1, 15));
  EXPECT_EQ(m4.at({1, 2, 1, 2}), q(1, 15));
  EXPECT_EQ(m4.at({3, 3, 3, 3}), q(3, 15));
  // Spatial trace of order 2s gives order 2s-2.
  for (int s = 1; s <= 3; ++s) {
    const auto m = angular_moment(2 * s);
    const auto traced = m.contract(MinkTensor::metric(Variance::lower), {{0, 0}, {1, 1}});
    // Time components are zero, so the Minkowski trace is the spatial one.
    EXPECT_EQ(traced, angular_moment(2 * s - 2)) << s;
  }
}

TEST(TracelessBasis, DimensionAndTracelessness) {
  for (int n = 0; n <= 4; ++n) {
    const auto& basis = traceless_basis(n);
    ASSERT_EQ(basis.size(), static_cast<std::size_t>((n + 1) * (n + 1)));
    for (std::size_t i = 0; i < basis.size(); ++i) {
      const auto& f = basis[i];
      MultiPoly<4> wave = f.derivative(0).derivative(0) * Rational(-1);
      for (std::size_t v = 1; v < 4; ++v) wave += f.derivative(v).derivative(v);
      EXPECT_TRUE(wave.is_zero());
      for (std::size_t j = 0; j < i; ++j)
        EXPECT_EQ(sphere_mean(restrict_to_null_cone(f) * restrict_to_null_cone(basis[j])), 0);
    }
  }
}

TEST(Oracle, SmallPencils) {
  const auto s0 = oracle_speeds(0, StateParams{});
  ASSERT_EQ(s0.roots.size(), 1u);
  EXPECT_NEAR(as_double(s0.roots[0].approx), 0, 1e-12);

  const auto s1 = oracle_speeds(1, StateParams{});
  EXPECT_EQ(s1.count(), 5);
  EXPECT_EQ(find_root(s1, 0, 1e-10).multiplicity, 3);
  EXPECT_EQ(find_root(s1, 1 / std::sqrt(3.0), 1e-10).multiplicity, 1);
  EXPECT_EQ(find_root(s1, -1 / std::sqrt(3.0), 1e-10).multiplicity, 1);
}

TEST(Oracle, PencilShape) {
  const auto P = assemble_4d_pencil(2, StateParams{});
  EXPECT_EQ(P.size(), 14);
  for (int i = 0; i < P.size(); ++i)
    for (int j = 0; j < P.size(); ++j) {
      EXPECT_EQ(P.B[static_cast<std::size_t>(i * 14 + j)], P.B[static_cast<std::size_t>(j * 14 + i)]);
      EXPECT_EQ(P.C[static_cast<std::size_t>(i * 14 + j)], P.C[static_cast<std::size_t>(j * 14 + i)]);
    }
  EXPECT_THROW(assemble_4d_pencil(1, StateParams{}, {q(1), q(1), q(0)}), Error);
}

TEST(Oracle, MatchesModelSpeeds) {
  for (int N = 0; N <= 3; ++N) {
    const auto rep = verify_oracle_match(N, 1e-8);
    EXPECT_TRUE(rep.pass) << N;
    EXPECT_TRUE(rep.multiplicities_equal) << N;
    EXPECT_LE(rep.max_deviation, 1e-9) << N;
    if (N >= 1) EXPECT_NE(rep.adjudication.find("confirms +-1/sqrt(2N+1)"), std::string::npos) << rep.adjudication;
  }
}

TEST(Oracle, StateAndDirectionIndependence) {
  const auto ref = oracle_speeds(2, StateParams{}, 1e-9);
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 5; ++trial) {
    const auto s = oracle_speeds(2, random_state(rng), 1e-9, {q(2, 3), q(-2, 3), q(1, 3)});
    ASSERT_EQ(s.roots.size(), ref.roots.size());
    for (std::size_t i = 0; i < s.roots.size(); ++i) {
      EXPECT_NEAR(as_double(s.roots[i].approx), as_double(ref.roots[i].approx), 1e-10);
      EXPECT_EQ(s.roots[i].multiplicity, ref.roots[i].multiplicity);
    }
  }
}

TEST(Oracle, MpfrPrecisionFromEnvironment) {
  const auto ref = oracle_speeds(2, StateParams{}, 1e-9);
  ::setenv("MOMENTWAVE_PRECISION_BITS", "128", 1);
  EXPECT_EQ(oracle_precision_bits(), 128);
  const auto hi = oracle_speeds(2, StateParams{}, 1e-9);
  ::setenv("MOMENTWAVE_PRECISION_BITS", "abc", 1);
  EXPECT_THROW(oracle_precision_bits(), Error);
  ::unsetenv("MOMENTWAVE_PRECISION_BITS");
  EXPECT_EQ(oracle_precision_bits(), 64);
  ASSERT_EQ(hi.roots.size(), ref.roots.size());
  for (std::size_t i = 0; i < hi.roots.size(); ++i) {
    EXPECT_NEAR(as_double(hi.roots[i].approx), as_double(ref.roots[i].approx), 1e-14);
    EXPECT_EQ(hi.roots[i].multiplicity, ref.roots[i].multiplicity);
  }
}
