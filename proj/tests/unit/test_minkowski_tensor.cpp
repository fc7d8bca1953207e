#include <gtest/gtest.h>

#include <random>

#include "momentwave/error.hpp"
#include "momentwave/exact_linalg.hpp"
#include "momentwave/minkowski_tensor.hpp"

using namespace momentwave;

namespace {

Rational q(long n, long d = 1) { return make_rational(n, d); }

MinkTensor up(long a, long b, long c, long d, long den = 1) {
  return MinkTensor::vector({q(a, den), q(b, den), q(c, den), q(d, den)});
}

std::vector<int> range(int first, int last) {
  std::vector<int> r;
  for (int i = first; i < last; ++i) r.push_back(i);
  return r;
}

// Full trace of a rank-2p projector: contract beta_i with gamma_i.
Rational full_trace(const MinkTensor& P, int p) {
  Rational t = 0;
  for (std::size_t flat = 0; flat < std::size_t{1} << (2 * p); ++flat) {
    std::vector<int> idx(static_cast<std::size_t>(2 * p));
    std::size_t f = flat;
    for (int i = p - 1; i >= 0; --i) {
      idx[static_cast<std::size_t>(i)] = idx[static_cast<std::size_t>(p + i)] = static_cast<int>(f & 3u);
      f >>= 2;
    }
    t += P.at(idx);
  }
  return t;
}

// Projector as a 4^p x 4^p matrix (beta block rows, gamma block columns).
QMatrix as_matrix(const MinkTensor& P, int p) {
  const std::size_t n = std::size_t{1} << (2 * p);
  QMatrix M(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) M(i, j) = P[i * n + j];
  return M;
}

}  // namespace

TEST(MinkTensor, MetricAndDot) {
  const auto g = MinkTensor::metric();
  EXPECT_EQ(g.at({0, 0}), -1);
  EXPECT_EQ(g.at({3, 3}), 1);
  EXPECT_EQ(dot(up(1, 0, 0, 0), up(1, 0, 0, 0)), -1);
  EXPECT_EQ(dot(up(2, 1, 0, 0), up(1, 3, 0, 0).lower(0)), 1);
  EXPECT_EQ(MinkTensor::metric(Variance::upper).contract(g, {{1, 0}}), MinkTensor::identity());
}

TEST(MinkTensor, FlatIndexRoundTrip) {
  MinkTensor t({Variance::upper, Variance::lower, Variance::upper});
  for (std::size_t f = 0; f < t.size(); ++f) EXPECT_EQ(t.flat_index(t.unflatten(f)), f);
  EXPECT_EQ(t.flat_index({1, 2, 3}), 16u + 8u + 3u);
  EXPECT_THROW(t.flat_index({1, 4, 0}), Error);
}

TEST(MinkTensor, ContractAndTrace) {
  const auto a = up(1, 2, 3, 4);
  const auto b = up(2, 0, 1, -1).lower(0);
  EXPECT_EQ(a.contract(b, {{0, 0}})[0], 2 * 1 * -1 + 3 - 4);
  const auto ab = a.outer(b);
  EXPECT_EQ(ab.trace(0, 1)[0], dot(a, b));
  EXPECT_THROW(a.contract(a, {{0, 0}}), Error);
  EXPECT_EQ(MinkTensor::identity().trace(0, 1)[0], 4);
}

TEST(MinkTensor, SymmetrizeExamples) {
  const auto e0 = up(1, 0, 0, 0), e1 = up(0, 1, 0, 0);
  const auto s = e0.outer(e1).symmetrize();
  EXPECT_EQ(s.at({0, 1}), q(1, 2));
  EXPECT_EQ(s.at({1, 0}), q(1, 2));
  EXPECT_EQ(s.at({0, 0}), 0);
  const auto e2 = up(0, 0, 1, 0);
  const auto t = e0.outer(e1).outer(e2).symmetrize();
  for (auto perm : std::vector<std::vector<int>>{{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}})
    EXPECT_EQ(t.at(perm), q(1, 6));
  EXPECT_TRUE(t.is_symmetric({0, 1, 2}));
  // Symmetrization is idempotent and fixes symmetric tensors.
  EXPECT_EQ(t.symmetrize(), t);
  const auto partial = e0.outer(e1).outer(e2).symmetrize({1, 2});
  EXPECT_TRUE(partial.is_symmetric({1, 2}));
  EXPECT_FALSE(partial.is_symmetric({0, 1}));
}

TEST(MinkTensor, PermuteAndRaise) {
  const auto t = up(1, 2, 0, 0).outer(up(0, 0, 3, 4).lower(0));
  const auto swapped = t.permute({1, 0});
  EXPECT_EQ(swapped.variance(), (std::vector<Variance>{Variance::lower, Variance::upper}));
  EXPECT_EQ(swapped.at({2, 0}), t.at({0, 2}));
  EXPECT_EQ(t.lower(0).at({0, 3}), -t.at({0, 3}));
  EXPECT_EQ(t.lower(0).raise(0), t);
}

TEST(Frame, Canonical) {
  const auto f = canonical_frame();
  EXPECT_TRUE(frame_invariants_hold(f));
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) EXPECT_EQ(f.K.at({a, b}), (a == b && a >= 2) ? 1 : 0);
}

TEST(Frame, BoostAlongV) {
  const auto f = build_frame(up(5, 3, 0, 0, 4), up(3, 5, 0, 0, 4));
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) EXPECT_EQ(f.K.at({a, b}), (a == b && a >= 2) ? 1 : 0);
  const auto g = build_frame(up(1, 0, 0, 0), up(0, 0, 1, 0));
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) EXPECT_EQ(g.K.at({a, b}), (a == b && (a == 1 || a == 3)) ? 1 : 0);
}

TEST(Frame, RejectsBadVectors) {
  EXPECT_THROW(build_frame(up(1, 1, 0, 0), up(0, 1, 0, 0)), Error);
  EXPECT_THROW(build_frame(up(1, 0, 0, 0), up(1, 1, 0, 0)), Error);
  EXPECT_THROW(build_frame(up(5, 3, 0, 0, 4), up(0, 1, 0, 0)), Error);
}

TEST(Frame, RandomBoostedFramesAreExact) {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 20; ++i) EXPECT_TRUE(frame_invariants_hold(random_boosted_frame(rng)));
  const auto f = reference_boosted_frame();
  EXPECT_TRUE(frame_invariants_hold(f));
  EXPECT_NE(f.u, canonical_frame().u);
}

TEST(Projector, RankOneIsMixedK) {
  for (const auto& f : {canonical_frame(), reference_boosted_frame()}) {
    EXPECT_EQ(traceless2_projector(1, f), f.K_mixed());
  }
}

TEST(Projector, RankTwoHandBuilt) {
  const auto f = reference_boosted_frame();
  const auto Km = f.K_mixed();
  MinkTensor expect = Km.outer(Km).permute({0, 2, 1, 3}).symmetrize({0, 1});
  expect -= f.K.outer(f.K_upper()) * q(1, 2);
  EXPECT_EQ(traceless2_projector(2, f), expect);
}

TEST(Projector, DenseMatchesPolarized) {
  const auto f = reference_boosted_frame();
  for (int p = 0; p <= 4; ++p) EXPECT_EQ(traceless2_projector_dense(p, f), traceless2_projector_polarized(p, f)) << p;
}

TEST(Projector, GroupSymmetry) {
  const auto f = reference_boosted_frame();
  for (int p = 1; p <= 5; ++p) {
    const auto P = traceless2_projector(p, f);
    EXPECT_TRUE(P.is_symmetric(range(0, p))) << p;
    EXPECT_TRUE(P.is_symmetric(range(p, 2 * p))) << p;
  }
}

TEST(Projector, TraceIsTwo) {
  // Symmetric trace-less tensors in two dimensions span a 2-dimensional space.
  for (const auto& f : {canonical_frame(), reference_boosted_frame()}) {
    EXPECT_EQ(full_trace(traceless2_projector(0, f), 0), 1);
    for (int p = 1; p <= 5; ++p) EXPECT_EQ(full_trace(traceless2_projector(p, f), p), 2) << p;
  }
}

TEST(Projector, IdempotentWithRankTwo) {
  const auto f = reference_boosted_frame();
  for (int p = 1; p <= 3; ++p) {
    const QMatrix M = as_matrix(traceless2_projector(p, f), p);
    EXPECT_EQ(M * M, M) << p;
    EXPECT_EQ(rank(M), 2u) << p;
  }
}

TEST(Projector, FixesTangentTracelessTensors) {
  // In the canonical frame the tangent plane is span(e2, e3); Re (e2 + i e3)^p
  // is symmetric and trace-less there.
  const auto f = canonical_frame();
  for (int p = 1; p <= 4; ++p) {
    std::vector<Variance> var(static_cast<std::size_t>(p), Variance::upper);
    MinkTensor T(var);
    for (std::size_t flat = 0; flat < T.size(); ++flat) {
      const auto idx = T.unflatten(flat);
      int threes = 0;
      bool tangent = true;
      for (int v : idx) {
        if (v < 2) tangent = false;
        threes += v == 3;
      }
      if (!tangent || threes % 2) continue;
      T[flat] = (threes / 2) % 2 ? -1 : 1;
    }
    std::vector<std::pair<int, int>> pairs;
    for (int i = 0; i < p; ++i) pairs.emplace_back(i, i);
    const auto P = traceless2_projector(p, f).permute([&] {
      std::vector<int> perm = range(p, 2 * p);
      for (int i = 0; i < p; ++i) perm.push_back(i);
      return perm;
    }());
    // P with gamma first, then contract its beta slots with T.
    const auto image = P.contract(T, [&] {
      std::vector<std::pair<int, int>> pr;
      for (int i = 0; i < p; ++i) pr.emplace_back(p + i, i);
      return pr;
    }());
    EXPECT_EQ(image, T) << p;
  }
}

TEST(TraceIdentity, TraceVanishes) {
  for (const auto& f : {canonical_frame(), reference_boosted_frame()})
    for (int p = 2; p <= 6; ++p) {
      const auto rep = verify_theorem1(p, f);
      EXPECT_TRUE(rep.pass) << p;
      EXPECT_EQ(rep.max_abs_component_diff, 0);
      EXPECT_EQ(rep.dense_checked, p <= 4);
      EXPECT_TRUE(rep.routes_agree);
    }
}

TEST(TraceIdentity, DetectsWrongCoefficients) {
  // The plain symmetrized K product is not trace-less.
  const auto f = canonical_frame();
  const auto Km = f.K_mixed();
  const auto bad = Km.outer(Km).permute({0, 2, 1, 3}).symmetrize({0, 1});
  EXPECT_FALSE(bad.contract(f.K, {{2, 0}, {3, 1}}).is_zero());
}

TEST(InverseExpansion, LowRanksHoldAndFitIsBinomial) {
  for (const auto& f : {canonical_frame(), reference_boosted_frame()})
    for (int r = 1; r <= 4; ++r) {
      const auto rep = verify_theorem2(r, f);
      ASSERT_EQ(rep.fitted.size(), static_cast<std::size_t>(r / 2 + 1));
      for (int s = 0; s <= r / 2; ++s)
        EXPECT_EQ(rep.fitted[static_cast<std::size_t>(s)], make_rational(binomial(r, s), BigInt(1) << (2 * s)));
      EXPECT_EQ(rep.pass, rep.fitted == rep.stated) << r;
      EXPECT_TRUE(rep.dense_checked);
      EXPECT_TRUE(rep.routes_agree) << r;
      if (r <= 2) EXPECT_TRUE(rep.pass) << r;
    }
}

TEST(ProjectedContraction, DenseAndPolarizedAgree) {
  const auto f = reference_boosted_frame();
  for (int p = 0; p <= 2; ++p)
    for (int s = p; s <= 2; ++s)
      for (int c = 0; c <= 1; ++c)
        for (int d = 0; d <= 1; ++d) {
          if (2 * s + c + d > 5) continue;
          const auto rep = verify_theorem3(p, s, c, d, f);
          EXPECT_TRUE(rep.dense_checked);
          EXPECT_TRUE(rep.routes_agree) << p << s << c << d;
        }
}

TEST(ProjectedContraction, ScalarCaseIsTrivial) {
  const auto rep = verify_theorem3(0, 1, 1, 0, canonical_frame());
  EXPECT_TRUE(rep.pass);
  EXPECT_EQ(rep.prefactor, 1);
}

TEST(ProjectedContraction, RejectsBadIndices) {
  EXPECT_THROW(verify_theorem3(2, 1, 0, 0, canonical_frame()), Error);
  EXPECT_THROW(verify_theorem3(0, 0, -1, 0, canonical_frame()), Error);
}
