#pragma once

/*
 * Kinetic closure of the massless gas: G_{m,n} in closed form, Hankel
 * determinant identities, and an independent wave-speed oracle that builds
 * the full 4D moment pencil from sphere integrals and solves it
 * numerically, with no reference to the 2D block decomposition.
 */

#include <array>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "momentwave/charsys.hpp"
#include "momentwave/minkowski_tensor.hpp"
#include "momentwave/multi_poly.hpp"
#include "momentwave/real.hpp"
#include "momentwave/speed_solver.hpp"

namespace momentwave {

struct StateParams {
  Real lam = 0;
  Real gamma = 1;
  Real kB = 1;
};

/// Throws "domain" unless gamma > 0 and kB > 0.
void check_state(const StateParams& state);

/// lam in [-2, 2], gamma in [1/2, 3], kB in [1/2, 2].
StateParams random_state(std::mt19937_64& rng);

using RealMatrix = std::vector<std::vector<Real>>;

/// G_{m,n} = kB^-2 exp(-lam/kB) (kB/gamma)^{m+n+3} (m+n+2)!, m,n = 0..N.
RealMatrix kinetic_G(int N, const StateParams& state);

/// The same matrix with the common factor kB^-2 exp(-lam/kB) dropped and
/// t = kB/gamma rational: G_{m,n} = t^{m+n+3} (m+n+2)!.
MomentMatrix kinetic_G_exact(int N, const Rational& t = 1);

/// a! (a+1)! ... (a+d)! * d! (d-1)! ... 2!
BigInt hankel_det_closed(int a, int d);
/// det [ (a+i+j)! ]_{i,j=0..d} by exact elimination.
BigInt hankel_det(int a, int d);

struct HankelExponentCheck {
  int p = 0;
  int eta = 0;
  int N = 0;
  /// Power of kB/gamma pulled out of the rows before the column factoring:
  /// derived sum_{i=0}^{d} (2p+2eta+3+i), and the stated sum_{i=3}^{d+1} (2p+eta+i).
  long derived_row_exponent = 0;
  long stated_row_exponent = 0;
  /// Whole determinant is D_{2j+2,d} t^E with E = (d+1)(2j+3) + d(d+1); checked at t = 2, 3.
  long total_exponent = 0;
  bool symbolic_ok = false;
};

struct HankelReport {
  int a_max = 0;
  int d_max = 0;
  int cases = 0;
  /// Every integer determinant equals its closed form.
  bool pass = true;
  std::vector<std::string> failures;
  std::vector<HankelExponentCheck> exponents;
  /// All symbolic trailing-block determinants matched D t^E.
  bool exponents_ok = true;
  /// Cases where the stated row exponent differs from the derived one.
  int stated_mismatches = 0;
};

HankelReport verify_hankel(int a_max, int d_max);

/// All leading principal minors > 0.
bool verify_positive_definite(const MomentMatrix& G);
bool verify_positive_definite(const RealMatrix& G);

/// Mean over the unit sphere of n1^a n2^b n3^c:
/// (a-1)!!(b-1)!!(c-1)!!/(a+b+c+1)!! when a, b, c are all even, else 0.
Rational sphere_mean(int a, int b, int c);
Rational sphere_mean(const MultiPoly<3>& f);

/// Sphere average of n^{i_1}...n^{i_order} (the integral over 4 pi),
/// as a rank-`order` upper tensor whose time components are zero.
MinkTensor angular_moment(int order);

/// Basis of the symmetric 4D trace-free tensors of rank n, each given by its
/// polynomial T_{a...} x^a ... in x0..x3 (so trace-free means the wave
/// operator annihilates it). Orthogonal for the sphere inner product of
/// the restrictions to x = (1, n); (n+1)^2 elements. Cached.
const std::vector<MultiPoly<4>>& traceless_basis(int n);

/// Restriction x -> (1, n1, n2, n3).
MultiPoly<3> restrict_to_null_cone(const MultiPoly<4>& f);

struct Pencil {
  int N = 0;
  /// Rank of the moment group of each row/column.
  std::vector<int> level;
  /// Row-major, size D*D.
  std::vector<Real> B;
  std::vector<Real> C;
  int size() const { return static_cast<int>(level.size()); }
};

/// B_ij = G_{m,n} <(eta.n) psi_i psi_j>, C_ij = -G_{m,n} <psi_i psi_j> in the
/// comoving frame; psi normalized on the sphere. Throws "hyperbolicity" if C
/// is not definite.
Pencil assemble_4d_pencil(int N, const StateParams& state,
                          const std::array<Rational, 3>& eta_dir = {Rational(1), Rational(0), Rational(0)});

/// Binary precision of the oracle eigensolve: MOMENTWAVE_PRECISION_BITS from
/// the environment, default 64 (long double); larger values switch to MPFR.
int oracle_precision_bits();

/// Eigenvalues of C^-1 B clustered within tol. Throws "nonreal" if an
/// imaginary part exceeds tol.
SpeedSet oracle_speeds(int N, const StateParams& state, double tol = 1e-9,
                       const std::array<Rational, 3>& eta_dir = {Rational(1), Rational(0), Rational(0)});
SpeedSet oracle_speeds(const Pencil& pencil, double tol = 1e-9);

struct OracleMatch {
  double model = 0;
  double oracle = 0;
  double deviation = 0;
  int model_multiplicity = 0;
  int oracle_multiplicity = 0;
  bool ok = false;
};

struct OracleReport {
  int N = 0;
  double tol = 0;
  SpeedSet model;
  SpeedSet oracle;
  std::vector<OracleMatch> matches;
  double max_deviation = 0;
  bool multiplicities_equal = false;
  bool pass = false;
  /// For N >= 1: which reading of the p = N-1 pair the oracle supports.
  std::string adjudication;
};

OracleReport verify_oracle_match(int N, double tol, const StateParams& state = {});

}  // namespace momentwave
