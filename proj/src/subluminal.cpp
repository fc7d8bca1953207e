#include "momentwave/subluminal.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "momentwave/error.hpp"
#include "momentwave/speed_solver.hpp"

namespace momentwave {

void check_four_velocity(const FourVelocity& U, const Real& tol) {
  if (!(U.U0 > 0)) throw Error(ErrorKind::domain, "U0 must be positive");
  const Real norm = -U.U0 * U.U0 + U.U1 * U.U1 + U.U2 * U.U2 + U.U3 * U.U3;
  if (abs(norm + 1) > tol * U.U0 * U.U0) throw Error(ErrorKind::domain, "U is not unit time-like");
}

FourVelocity random_four_velocity(std::mt19937_64& rng, double max_rapidity) {
  std::normal_distribution<double> gauss;
  std::uniform_real_distribution<double> rap(0.0, max_rapidity);
  Real n1, n2, n3, len;
  do {
    n1 = gauss(rng);
    n2 = gauss(rng);
    n3 = gauss(rng);
    len = sqrt(n1 * n1 + n2 * n2 + n3 * n3);
  } while (len < Real("1e-6"));
  const Real sh = sinh(Real(rap(rng)));
  FourVelocity U;
  U.U1 = sh * n1 / len;
  U.U2 = sh * n2 / len;
  U.U3 = sh * n3 / len;
  U.U0 = sqrt(1 + U.U1 * U.U1 + U.U2 * U.U2 + U.U3 * U.U3);
  return U;
}

Quadratic quadratic_coeffs(const Real& k, const FourVelocity& U) {
  if (k < 0 || k > 1) throw Error(ErrorKind::domain, "k must lie in [0, 1]");
  check_four_velocity(U);
  const Real c = 1 - k;
  return {U.U0 * U.U0 * c + k, -2 * U.U0 * U.U1 * c, U.U1 * U.U1 * c - k};
}

std::pair<Real, Real> speeds_in_direction(const Real& k, const FourVelocity& U, double tol) {
  const Quadratic f = quadratic_coeffs(k, U);
  Real quarter_disc = f.B * f.B / 4 - f.A * f.C;
  if (quarter_disc < -tol) {
    std::ostringstream os;
    os << "discriminant/4 = " << quarter_disc << " < 0";
    throw Error(ErrorKind::nonreal, os.str());
  }
  if (quarter_disc < 0) quarter_disc = 0;
  const Real r = sqrt(quarter_disc);
  // Stable form: the root away from cancellation first.
  const Real half_b = f.B / 2;
  if (half_b == 0 && r == 0) return {Real(0), Real(0)};
  const Real qv = half_b >= 0 ? -(half_b + r) : -(half_b - r);
  Real x1 = qv / f.A;
  Real x2 = qv == 0 ? Real(0) : f.C / qv;
  if (x1 > x2) std::swap(x1, x2);
  return {x1, x2};
}

bool verify_discriminant(const Real& k, const FourVelocity& U, double tol) {
  const Quadratic f = quadratic_coeffs(k, U);
  const Real lhs = f.B * f.B / 4 - f.A * f.C;
  const Real rhs = k + k * (1 - k) * (U.U2 * U.U2 + U.U3 * U.U3);
  return abs(lhs - rhs) <= tol;
}

SublumSample check_sample(const Real& k, const FourVelocity& U, double tol) {
  SublumSample s;
  s.k = k;
  s.U = U;
  const Quadratic f = quadratic_coeffs(k, U);
  const Real lhs = f.B * f.B / 4 - f.A * f.C;
  const Real rhs = k + k * (1 - k) * (U.U2 * U.U2 + U.U3 * U.U3);
  s.discriminant_error = abs(lhs - rhs);
  std::ostringstream why;
  try {
    std::tie(s.lambda_minus, s.lambda_plus) = speeds_in_direction(k, U, tol);
  } catch (const Error& e) {
    s.failure = e.what();
    return s;
  }
  if (s.discriminant_error > tol) why << "discriminant identity off by " << s.discriminant_error << "; ";
  if (s.lambda_minus < -1 - tol || s.lambda_plus > 1 + tol) why << "root outside [-1, 1]; ";
  if (f(Real(1)) < -tol) why << "f(1) < 0; ";
  if (f(Real(-1)) < -tol) why << "f(-1) < 0; ";
  if (!(f.derivative(Real(1)) > 0)) why << "f'(1) <= 0; ";
  if (!(f.derivative(Real(-1)) < 0)) why << "f'(-1) >= 0; ";
  s.failure = why.str();
  s.ok = s.failure.empty();
  return s;
}

SublumReport verify_subluminality(int samples, std::uint64_t seed, double tol, const std::vector<Real>& k_values) {
  if (samples < 1) throw Error(ErrorKind::domain, "need at least one sample");
  SublumReport rep;
  rep.samples = samples;
  rep.seed = seed;
  rep.tol = tol;
  for (int i = 0; i < samples; ++i) {
    std::mt19937_64 rng(seed + static_cast<std::uint64_t>(i));
    const FourVelocity U = random_four_velocity(rng);
    Real k;
    if (i % 2 == 0 || k_values.empty()) {
      k = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    } else {
      k = k_values[static_cast<std::size_t>(i / 2) % k_values.size()];
    }
    SublumSample s = check_sample(k, U, tol);
    if (s.discriminant_error > rep.max_discriminant_error) rep.max_discriminant_error = s.discriminant_error;
    const Real excess = (abs(s.lambda_minus) > abs(s.lambda_plus) ? abs(s.lambda_minus) : abs(s.lambda_plus)) - 1;
    if (excess > rep.max_excess) rep.max_excess = excess;
    if (!s.ok) {
      rep.pass = false;
      rep.failures.push_back(s);
    }
    // Larger root along a k-grid for this U.
    Real prev = -2;
    for (int g = 0; g <= 20; ++g) {
      const Real kg = Real(g) / 20;
      const Real top = speeds_in_direction(kg, U, tol).second;
      if (top < prev - tol) {
        ++rep.monotonicity_flags;
        break;
      }
      prev = top;
    }
  }
  return rep;
}

std::vector<Real> model_k_values(int N) {
  std::set<Rational> exact;
  std::vector<Real> out;
  for (const auto& r : model_speeds(N).roots) {
    if (r.kind == ExactKind::sqrt_rational) {
      exact.insert(r.value);
    } else if (r.kind == ExactKind::rational) {
      exact.insert(r.value * r.value);
    } else {
      out.push_back(r.approx * r.approx);
    }
  }
  for (const auto& q : exact) out.push_back(to_real(q));
  return out;
}

}  // namespace momentwave
