#pragma once

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

#include "momentwave/charsys.hpp"
#include "momentwave/rational_poly.hpp"
#include "momentwave/real.hpp"

namespace momentwave {

enum class ExactKind { rational, sqrt_rational, interval };

std::string_view to_string(ExactKind kind);

struct SpeedRoot {
  Real approx;
  int multiplicity = 1;
  ExactKind kind = ExactKind::interval;
  /// rational: the root itself; sqrt_rational: q with root = sign * sqrt(q).
  Rational value;
  int sign = 1;
  /// Isolating interval; a single point for exactly located roots.
  Rational lo;
  Rational hi;
};

struct SpeedSet {
  /// Block rank, or -1 for the whole model.
  int p = -1;
  int N = 0;
  /// Sorted ascending by approx.
  std::vector<SpeedRoot> roots;

  int count() const;
};

/// Square-free factors with multiplicities; factors are monic and pairwise coprime.
using Factorization = std::vector<std::pair<RationalPoly, int>>;

/// Folds g^mult into a coprime base, splitting existing factors on common gcds.
void merge_factor(Factorization& base, const RationalPoly& g, int mult);
void merge_factorization(Factorization& base, const Factorization& other, int scale = 1);

/// det M with phi_var := phi_value and lambda_var the variable, by
/// fraction-free elimination over Q[lambda].
RationalPoly char_poly(const CharMatrix& M, const Rational& phi_value = 1);

/// All real roots with multiplicities, isolated to width <= tol and
/// recognised as rational or +-sqrt(rational) when exact.
std::vector<SpeedRoot> real_roots(const RationalPoly& f, double tol = 1e-12);
std::vector<SpeedRoot> real_roots(const Factorization& f, double tol = 1e-12);

/// Speeds of block p from the reduced subsystems eta = 0..N-p.
SpeedSet block_speeds(int p, int N, double tol = 1e-12);
/// Speeds of block p from the full system with closure G.
SpeedSet block_speeds_full(int p, const MomentMatrix& G, double tol = 1e-12);

/// Number of independent rank-p 2D trace-less symmetric tensors: 1 for p=0, 2 otherwise.
int block_multiplicity(int p);

/// Whole-model spectrum, each block weighted by block_multiplicity.
SpeedSet model_speeds(int N, double tol = 1e-12);

/// Primitive parts with positive leading coefficient agree.
bool same_up_to_scale(const RationalPoly& f, const RationalPoly& g);

/// Product over eta of the reduced characteristic polynomials of block p.
RationalPoly reduced_product(int p, int N);

/// Symmetric G with entries uniform rationals in [1, 10], redrawn until admissible.
/// Throws "sampling" after 100 redraws; `resamples` receives the redraw count.
MomentMatrix random_admissible_G(int N, std::mt19937_64& rng, int& resamples);

struct IndependenceTrial {
  int trial = 0;
  std::uint64_t seed = 0;
  int resamples = 0;
  /// Per block p = 0..N.
  std::vector<bool> block_equal;
  bool equal = true;
};

struct IndependenceReport {
  int N = 0;
  std::uint64_t seed = 0;
  std::vector<IndependenceTrial> trials;
  bool pass = true;
};

/// Full-system determinant against the reduced product, for every block p.
std::vector<bool> check_independence(const MomentMatrix& G);

/// Trial t uses a fresh generator seeded with seed + t.
IndependenceReport verify_independence(int N, int trials, std::uint64_t seed);

}  // namespace momentwave
