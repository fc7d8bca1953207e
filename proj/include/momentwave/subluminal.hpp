#pragma once

// Speeds lambda^2 = k seen from an arbitrary time-like direction U, in the
// frame where xi = (1,0,0,0) and eta = (0,1,0,0): the roots of
// f(lambda) = A lambda^2 + B lambda + C must stay in [-1, 1].

#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "momentwave/real.hpp"

namespace momentwave {

struct FourVelocity {
  Real U0 = 1;
  Real U1 = 0;
  Real U2 = 0;
  Real U3 = 0;
};

/// Throws "domain" unless U0 > 0 and -U0^2 + |U|^2 = -1 within tol.
void check_four_velocity(const FourVelocity& U, const Real& tol = Real("1e-40"));

/// Boost of (1,0,0,0) with rapidity uniform in [0, max_rapidity] along a
/// uniform direction; U0 is recomputed as sqrt(1 + |U|^2).
FourVelocity random_four_velocity(std::mt19937_64& rng, double max_rapidity = 5);

struct Quadratic {
  Real A;
  Real B;
  Real C;
  Real operator()(const Real& x) const { return (A * x + B) * x + C; }
  Real derivative(const Real& x) const { return 2 * A * x + B; }
};

/// A = U0^2 (1-k) + k, B = -2 U0 U1 (1-k), C = U1^2 (1-k) - k.
/// Throws "domain" for k outside [0, 1] or an unnormalized U.
Quadratic quadratic_coeffs(const Real& k, const FourVelocity& U);

/// Roots lambda_minus <= lambda_plus. Throws "nonreal" if the discriminant
/// is below -tol.
std::pair<Real, Real> speeds_in_direction(const Real& k, const FourVelocity& U, double tol = 1e-12);

/// |(B/2)^2 - A C - (k + k(1-k)(U2^2 + U3^2))| <= tol.
bool verify_discriminant(const Real& k, const FourVelocity& U, double tol = 1e-12);

struct SublumSample {
  Real k;
  FourVelocity U;
  Real lambda_minus;
  Real lambda_plus;
  Real discriminant_error;
  bool ok = false;
  std::string failure;
};

struct SublumReport {
  int samples = 0;
  std::uint64_t seed = 0;
  double tol = 0;
  bool pass = true;
  Real max_discriminant_error = 0;
  /// Largest max(|lambda| - 1, 0) seen.
  Real max_excess = 0;
  std::vector<SublumSample> failures;
  /// Fixed-U k-grids where the larger root decreased somewhere (diagnostic only).
  int monotonicity_flags = 0;
};

/// Checks one (k, U): real roots, discriminant identity, roots in [-1, 1],
/// f(+-1) >= 0, f'(1) > 0, f'(-1) < 0, all within tol.
SublumSample check_sample(const Real& k, const FourVelocity& U, double tol = 1e-12);

/// Half the samples draw k uniform in [0, 1]; the other half cycle through
/// k_values (typically computed lambda^2). Sample i uses seed + i.
SublumReport verify_subluminality(int samples, std::uint64_t seed, double tol = 1e-12,
                                  const std::vector<Real>& k_values = {});

/// Distinct lambda^2 values of the model of order N, from model_speeds.
std::vector<Real> model_k_values(int N);

}  // namespace momentwave
