#pragma once

/*
 * Dense tensors over 4D Minkowski space with exact rational components,
 * metric diag(-1, 1, 1, 1). Components are stored row-major in the index
 * values, first index most significant.
 *
 * The identity checks for the 2D trace-less projector run two ways: on
 * dense tensors (ranks up to about 8) and on polarized polynomials, where
 * a tensor symmetric in a group of indices is replaced by its contraction
 * with copies of one vector. The polynomial route covers every rank.
 */

#include <array>
#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "momentwave/combinatorics.hpp"

namespace momentwave {

enum class Variance : std::uint8_t { upper, lower };

class MinkTensor {
 public:
  static constexpr int max_rank = 12;

  /// Rank-0 zero.
  MinkTensor();
  /// Zero tensor with the given per-index variance.
  explicit MinkTensor(std::vector<Variance> variance);

  static MinkTensor scalar(const Rational& value);
  static MinkTensor vector(const std::array<Rational, 4>& components, Variance variance = Variance::upper);
  static MinkTensor metric(Variance variance = Variance::lower);
  /// delta^a_b (first index upper, second lower).
  static MinkTensor identity();

  int rank() const { return static_cast<int>(variance_.size()); }
  const std::vector<Variance>& variance() const { return variance_; }
  std::size_t size() const { return data_.size(); }

  Rational& operator[](std::size_t flat) { return data_[flat]; }
  const Rational& operator[](std::size_t flat) const { return data_[flat]; }
  Rational& at(const std::vector<int>& index);
  const Rational& at(const std::vector<int>& index) const;
  std::size_t flat_index(const std::vector<int>& index) const;
  std::vector<int> unflatten(std::size_t flat) const;

  MinkTensor outer(const MinkTensor& other) const;
  /// this (x) other summed over the pairs (i in this, j in other); each pair
  /// must join an upper and a lower index. Free indices keep their order,
  /// this tensor's first.
  MinkTensor contract(const MinkTensor& other, const std::vector<std::pair<int, int>>& pairs) const;
  /// Trace over two indices of this tensor (one upper, one lower).
  MinkTensor trace(int i, int j) const;

  /// result index k is this tensor's index perm[k].
  MinkTensor permute(const std::vector<int>& perm) const;
  MinkTensor lower(int i) const;
  MinkTensor raise(int i) const;
  MinkTensor with_variance(const std::vector<Variance>& variance) const;

  /// Average over all permutations of the listed index positions.
  MinkTensor symmetrize(const std::vector<int>& positions) const;
  /// Average over all permutations of all indices.
  MinkTensor symmetrize() const;
  bool is_symmetric(const std::vector<int>& positions) const;

  MinkTensor& operator+=(const MinkTensor& o);
  MinkTensor& operator-=(const MinkTensor& o);
  MinkTensor& operator*=(const Rational& c);
  friend MinkTensor operator+(MinkTensor a, const MinkTensor& b) { return a += b; }
  friend MinkTensor operator-(MinkTensor a, const MinkTensor& b) { return a -= b; }
  friend MinkTensor operator*(MinkTensor a, const Rational& c) { return a *= c; }
  friend MinkTensor operator*(const Rational& c, MinkTensor a) { return a *= c; }
  friend bool operator==(const MinkTensor& a, const MinkTensor& b) = default;

  bool is_zero() const;
  Rational max_abs() const;

 private:
  void check_same_shape(const MinkTensor& o) const;
  std::vector<Variance> variance_;
  std::vector<Rational> data_;
};

/// Contraction a_mu b^mu of two rank-1 tensors of any variance.
Rational dot(const MinkTensor& a, const MinkTensor& b);

MinkTensor symmetrize(const MinkTensor& t);

struct FrameProjectors {
  MinkTensor u;  // upper
  MinkTensor v;  // upper
  MinkTensor h;  // lower: g + u (x) u
  MinkTensor K;  // lower: h - v (x) v

  /// K with both indices raised, and K_a^b (first lower, second upper).
  MinkTensor K_upper() const;
  MinkTensor K_mixed() const;
};

/// Requires u.u = -1, v.v = 1, u.v = 0 exactly; otherwise error "frame".
FrameProjectors build_frame(const MinkTensor& u, const MinkTensor& v);

/// u = (1,0,0,0), v = (0,1,0,0).
FrameProjectors canonical_frame();

/// Frame Lambda e0, Lambda e1 for a rational Lorentz transformation built
/// from a rotation (integer quaternion) followed by a boost along a rational
/// unit direction; exactly normalized.
FrameProjectors random_boosted_frame(std::mt19937_64& rng);
/// The fixed boosted frame used by the verification suites.
FrameProjectors reference_boosted_frame();

/// Checks every FrameProjectors invariant exactly.
bool frame_invariants_hold(const FrameProjectors& f);

/// Rank-2p 2D trace-less projector: indices beta_1..beta_p lower, then
/// gamma_1..gamma_p upper. p = 0 is the scalar 1. For p <= 4 it is built
/// verbatim from products of K and group symmetrization; for larger p the
/// components are read off the polarized form.
MinkTensor traceless2_projector(int p, const FrameProjectors& frame);
/// Always the verbatim product-and-symmetrize construction.
MinkTensor traceless2_projector_dense(int p, const FrameProjectors& frame);
MinkTensor traceless2_projector_polarized(int p, const FrameProjectors& frame);

struct TheoremReport {
  bool pass = false;
  /// Largest |component| of (left side - right side).
  Rational max_abs_component_diff;
  /// Whether a dense component comparison ran, and whether it agreed with
  /// the polarized comparison.
  bool dense_checked = false;
  bool routes_agree = true;
  std::string note;
};

/// Projector contracted with K_{gamma_1 gamma_2} vanishes.
TheoremReport verify_theorem1(int p, const FrameProjectors& frame);

struct Theorem2Report : TheoremReport {
  /// The coefficients c_s for which sym(K^r) = sum c_s (...) holds exactly,
  /// found by solving the polarized identity; empty if no exact solution.
  std::vector<Rational> fitted;
  std::vector<Rational> stated;
};

/// sym(K_a^b ... ) equals the inverse expansion built with coeff_b.
Theorem2Report verify_theorem2(int r, const FrameProjectors& frame);

struct Theorem3Report : TheoremReport {
  Rational prefactor;
  /// Free indices on both sides: gamma_1..gamma_p and alpha_{p+1}..alpha_{2s+c+d}.
  int free_alpha = 0;
  std::string index_balance;
  /// Ratio left/right when both sides are proportional, else unset.
  bool proportional = false;
  Rational ratio;
};

/// Projector contracted with sym(K^s V^c U^d) against the stated closed form.
Theorem3Report verify_theorem3(int p, int s, int c, int d, const FrameProjectors& frame);

}  // namespace momentwave
