#pragma once

/*
 * Scalar coefficient tables of the characteristic system and the matrices
 * built from them.
 *
 * For a block p the unknowns are the rank-p 2D trace-less tensors
 * X_(h,k), h+k = n-p, p <= n <= N. An equation row is labelled (b, m) with
 * 0 <= b <= N-p and p+b <= m <= N, and reads
 *
 *   sum_n G_{m,n} Y_{b,n} = 0,
 *
 * where Y_{b,n} = sum over (h,k) of (mu_coeff*mu + phi_coeff*phi) X_(h,k).
 * mu stands for phi_a U^a and phi for the eta-projection; in the comoving
 * normalization mu = lambda and phi = 1. All coefficients have the common
 * factor 4*pi divided out.
 */

#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "momentwave/combinatorics.hpp"
#include "momentwave/exact_linalg.hpp"

namespace momentwave {

struct YTerm {
  int h = 0;
  int k = 0;
  Rational mu_coeff;
  Rational phi_coeff;

  friend bool operator==(const YTerm&, const YTerm&) = default;
};

/// Y_{b,n} for block p from the four closed case formulas (b even/odd,
/// n = p or n > p). Terms are merged per (h,k), zero terms dropped, and
/// sorted by h descending.
std::vector<YTerm> y_coeff(int p, int b, int n);

/// Y_{b,n} evaluated from the general projected equation for row m with the
/// split a + b = m - p: quadruple sums over (r, s, T) exactly as stated,
/// with m and a kept explicit. Must agree with y_coeff for every m.
std::vector<YTerm> y_coeff_general(int p, int m, int a, int b, int n);

struct GeneratorComparison {
  int N = 0;
  /// Number of (p, b, n, m) tuples compared.
  int checked = 0;
  /// "p=.. b=.. n=.. m=.." for every tuple where the generators differ.
  std::vector<std::string> mismatches;
  bool pass() const { return mismatches.empty(); }
};

/// y_coeff_general against y_coeff for every valid (p, b, n, m) with m <= N.
GeneratorComparison compare_generators(int N);

/// Symmetric (N+1)x(N+1) table of closure scalars G_{m,n}.
class MomentMatrix {
 public:
  explicit MomentMatrix(int N);
  /// Row-major entries; throws "closure" if the table is not symmetric.
  MomentMatrix(int N, std::vector<Rational> row_major);

  int order() const { return N_; }
  const Rational& operator()(int m, int n) const { return g_(static_cast<std::size_t>(m), static_cast<std::size_t>(n)); }
  /// Sets G_{m,n} and G_{n,m}.
  void set(int m, int n, const Rational& value);
  const QMatrix& matrix() const { return g_; }

  /// Every trailing principal block G[j..N, j..N] is nonsingular.
  bool is_admissible() const;
  /// Smallest j whose trailing block is singular, or -1.
  int first_singular_trailing_block() const;

  /// Parses {"N": int, "G": [row-major entries]}; entries are JSON numbers
  /// or strings holding "a/b", integers or decimals (all read exactly).
  static MomentMatrix from_json(std::string_view text);
  static MomentMatrix load(const std::filesystem::path& path);

 private:
  int N_;
  QMatrix g_;
};

/// Entry of a characteristic matrix: mu*lambda_var + phi*phi_var.
struct CharEntry {
  Rational mu;
  Rational phi;
  friend bool operator==(const CharEntry&, const CharEntry&) = default;
};

struct CharMatrix {
  int p = 0;
  int N = 0;
  /// Full matrices label rows (b, m); reduced matrices label rows (q, p+eta).
  std::vector<std::pair<int, int>> rows;
  /// Unknown labels (h, k): n ascending, then h descending.
  std::vector<std::pair<int, int>> cols;
  std::vector<CharEntry> entries;

  std::size_t size() const { return rows.size(); }
  CharEntry& at(std::size_t i, std::size_t j) { return entries[i * cols.size() + j]; }
  const CharEntry& at(std::size_t i, std::size_t j) const { return entries[i * cols.size() + j]; }
};

/// Side (N-p+1)(N-p+2)/2 of the full block-p matrix.
int block_side(int p, int N);

/// The (h,k) labels for p <= n <= N in canonical order.
std::vector<std::pair<int, int>> unknown_labels(int p, int N);

/// Full block-p system for closure G; throws "closure" if G is not admissible.
CharMatrix full_matrix(int p, int N, const MomentMatrix& G);

/// The (eta+1)x(eta+1) subsystem Y_{q,p+eta} = 0, q = 0..eta, on the
/// unknowns with h + k = eta.
CharMatrix reduced_matrix(int p, int eta);

}  // namespace momentwave
