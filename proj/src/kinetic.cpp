#include "momentwave/kinetic.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <type_traits>
#include <map>
#include <mutex>
#include <sstream>

#include <Eigen/Dense>

#include "momentwave/error.hpp"
#include "momentwave/exact_linalg.hpp"

#include <boost/multiprecision/eigen.hpp>
#include <boost/multiprecision/mpfr.hpp>

namespace momentwave {

int oracle_precision_bits() {
  const char* env = std::getenv("MOMENTWAVE_PRECISION_BITS");
  if (env == nullptr || *env == '\0') return 64;
  char* end = nullptr;
  const long bits = std::strtol(env, &end, 10);
  if (*end != '\0' || bits < 1 || bits > 100000) {
    throw Error(ErrorKind::domain, std::string("MOMENTWAVE_PRECISION_BITS must be a positive integer, got '") + env + "'");
  }
  return static_cast<int>(bits);
}

namespace {

using MpfrFloat = boost::multiprecision::mpfr_float;

template <class F>
F to_float(const Real& x) {
  if constexpr (std::is_same_v<F, long double>) {
    return static_cast<long double>(x);
  } else {
    return F(x.str(0, std::ios_base::scientific));
  }
}

}  // namespace

void check_state(const StateParams& state) {
  if (!(state.gamma > 0)) throw Error(ErrorKind::domain, "gamma must be positive");
  if (!(state.kB > 0)) throw Error(ErrorKind::domain, "kB must be positive");
}

StateParams random_state(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> lam(-2.0, 2.0), gamma(0.5, 3.0), kb(0.5, 2.0);
  StateParams s;
  s.lam = lam(rng);
  s.gamma = gamma(rng);
  s.kB = kb(rng);
  return s;
}

RealMatrix kinetic_G(int N, const StateParams& state) {
  if (N < 0) throw Error(ErrorKind::domain, "N must be non-negative");
  check_state(state);
  const Real pre = exp(-state.lam / state.kB) / (state.kB * state.kB);
  const Real t = state.kB / state.gamma;
  RealMatrix G(static_cast<std::size_t>(N + 1), std::vector<Real>(static_cast<std::size_t>(N + 1)));
  for (int m = 0; m <= N; ++m)
    for (int n = 0; n <= N; ++n)
      G[static_cast<std::size_t>(m)][static_cast<std::size_t>(n)] =
          pre * pow(t, m + n + 3) * Real(factorial(m + n + 2).get_str());
  return G;
}

MomentMatrix kinetic_G_exact(int N, const Rational& t) {
  if (N < 0) throw Error(ErrorKind::domain, "N must be non-negative");
  if (t <= 0) throw Error(ErrorKind::domain, "kB/gamma must be positive");
  MomentMatrix G(N);
  for (int m = 0; m <= N; ++m)
    for (int n = m; n <= N; ++n) {
      Rational tp = 1;
      for (int i = 0; i < m + n + 3; ++i) tp *= t;
      G.set(m, n, tp * Rational(factorial(m + n + 2)));
    }
  return G;
}

BigInt hankel_det_closed(int a, int d) {
  if (a < 0 || d < 0) throw Error(ErrorKind::domain, "hankel_det_closed needs a, d >= 0");
  BigInt r = 1;
  for (int i = 0; i <= d; ++i) r *= factorial(a + i);
  for (int i = 2; i <= d; ++i) r *= factorial(i);
  return r;
}

BigInt hankel_det(int a, int d) {
  if (a < 0 || d < 0) throw Error(ErrorKind::domain, "hankel_det needs a, d >= 0");
  const auto n = static_cast<std::size_t>(d + 1);
  QMatrix M(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) M(i, j) = Rational(factorial(a + static_cast<long>(i + j)));
  const Rational det = determinant(M);
  return det.get_num();
}

HankelReport verify_hankel(int a_max, int d_max) {
  if (a_max < 0 || d_max < 0) throw Error(ErrorKind::domain, "verify_hankel needs a_max, d_max >= 0");
  HankelReport rep;
  rep.a_max = a_max;
  rep.d_max = d_max;
  for (int a = 0; a <= a_max; ++a)
    for (int d = 0; d <= d_max; ++d) {
      ++rep.cases;
      const BigInt lhs = hankel_det(a, d), rhs = hankel_det_closed(a, d);
      if (lhs != rhs) {
        rep.pass = false;
        rep.failures.push_back("a=" + std::to_string(a) + " d=" + std::to_string(d) + ": det " + lhs.get_str() +
                               " != closed form " + rhs.get_str());
      }
    }

  // Trailing blocks G[j..N, j..N] of the kinetic closure, j = p + eta.
  for (int j = 0; 2 * j + 2 <= a_max; ++j)
    for (int d = 0; d <= d_max; ++d) {
      const int N = j + d;
      const BigInt D = hankel_det_closed(2 * j + 2, d);
      const long E = static_cast<long>(d + 1) * (2 * j + 3) + static_cast<long>(d) * (d + 1);
      bool ok = true;
      for (long t : {2L, 3L}) {
        const Rational det = determinant(kinetic_G_exact(N, Rational(t)).matrix().block(
            static_cast<std::size_t>(j), static_cast<std::size_t>(d + 1)));
        BigInt tp = 1;
        for (long i = 0; i < E; ++i) tp *= t;
        ok = ok && det == Rational(D * tp);
      }
      for (int p = 0; p <= j; ++p) {
        HankelExponentCheck c;
        c.p = p;
        c.eta = j - p;
        c.N = N;
        for (int i = 0; i <= d; ++i) c.derived_row_exponent += 2 * j + 3 + i;
        for (int i = 3; i <= d + 1; ++i) c.stated_row_exponent += 2 * p + c.eta + i;
        c.total_exponent = E;
        c.symbolic_ok = ok;
        rep.exponents_ok = rep.exponents_ok && ok;
        if (c.stated_row_exponent != c.derived_row_exponent) ++rep.stated_mismatches;
        rep.exponents.push_back(c);
      }
    }
  return rep;
}

bool verify_positive_definite(const MomentMatrix& G) {
  const QMatrix& M = G.matrix();
  for (std::size_t k = 1; k <= M.rows(); ++k)
    if (determinant(M.block(0, k)) <= 0) return false;
  return true;
}

bool verify_positive_definite(const RealMatrix& G) {
  // Elimination without pivoting: the pivots are ratios of consecutive
  // leading minors.
  RealMatrix A = G;
  const std::size_t n = A.size();
  for (std::size_t k = 0; k < n; ++k) {
    if (A[k].size() != n) throw Error(ErrorKind::domain, "matrix is not square");
    if (!(A[k][k] > 0)) return false;
    for (std::size_t i = k + 1; i < n; ++i) {
      const Real f = A[i][k] / A[k][k];
      for (std::size_t j = k; j < n; ++j) A[i][j] -= f * A[k][j];
    }
  }
  return true;
}

Rational sphere_mean(int a, int b, int c) {
  if (a < 0 || b < 0 || c < 0) throw Error(ErrorKind::domain, "negative sphere monomial exponent");
  if (a % 2 || b % 2 || c % 2) return 0;
  return make_rational(double_factorial(a - 1) * double_factorial(b - 1) * double_factorial(c - 1),
                       double_factorial(a + b + c + 1));
}

Rational sphere_mean(const MultiPoly<3>& f) {
  Rational s = 0;
  for (const auto& [m, c] : f.terms()) s += c * sphere_mean(m[0], m[1], m[2]);
  return s;
}

MinkTensor angular_moment(int order) {
  if (order < 0) throw Error(ErrorKind::domain, "angular moment order must be non-negative");
  MinkTensor t(std::vector<Variance>(static_cast<std::size_t>(order), Variance::upper));
  for (std::size_t flat = 0; flat < t.size(); ++flat) {
    std::array<int, 4> count{};
    for (int v : t.unflatten(flat)) ++count[static_cast<std::size_t>(v)];
    if (count[0] > 0) continue;
    t[flat] = sphere_mean(count[1], count[2], count[3]);
  }
  return t;
}

MultiPoly<3> restrict_to_null_cone(const MultiPoly<4>& f) {
  MultiPoly<3> r;
  for (const auto& [m, c] : f.terms()) {
    MultiPoly<3> term = MultiPoly<3>::constant(c);
    for (std::size_t i = 1; i < 4; ++i) term *= MultiPoly<3>::variable(i - 1).pow(m[i]);
    r += term;
  }
  return r;
}

namespace {

std::vector<MultiPoly<4>::Monomial> monomials(int degree) {
  std::vector<MultiPoly<4>::Monomial> out;
  if (degree < 0) return out;
  for (int a = degree; a >= 0; --a)
    for (int b = degree - a; b >= 0; --b)
      for (int c = degree - a - b; c >= 0; --c) {
        const int d = degree - a - b - c;
        out.push_back({static_cast<std::uint8_t>(a), static_cast<std::uint8_t>(b), static_cast<std::uint8_t>(c),
                       static_cast<std::uint8_t>(d)});
      }
  return out;
}

Rational cone_inner(const MultiPoly<4>& f, const MultiPoly<4>& g) {
  return sphere_mean(restrict_to_null_cone(f) * restrict_to_null_cone(g));
}

std::vector<MultiPoly<4>> build_traceless_basis(int n) {
  const auto cols = monomials(n);
  const auto rows = monomials(n - 2);
  std::map<MultiPoly<4>::Monomial, std::size_t> row_of;
  for (std::size_t i = 0; i < rows.size(); ++i) row_of[rows[i]] = i;
  // Wave operator -d0^2 + d1^2 + d2^2 + d3^2 on each monomial.
  QMatrix W(rows.size(), cols.size());
  for (std::size_t j = 0; j < cols.size(); ++j)
    for (std::size_t v = 0; v < 4; ++v) {
      const int e = cols[j][v];
      if (e < 2) continue;
      auto m = cols[j];
      m[v] = static_cast<std::uint8_t>(e - 2);
      W(row_of.at(m), j) += Rational((v == 0 ? -1 : 1) * e * (e - 1));
    }
  std::vector<std::vector<Rational>> kernel;
  if (rows.empty()) {
    for (std::size_t j = 0; j < cols.size(); ++j) {
      std::vector<Rational> e(cols.size());
      e[j] = 1;
      kernel.push_back(e);
    }
  } else {
    kernel = nullspace(W);
  }
  std::vector<MultiPoly<4>> basis;
  for (const auto& v : kernel) {
    MultiPoly<4> f;
    for (std::size_t j = 0; j < cols.size(); ++j) {
      if (v[j] == 0) continue;
      MultiPoly<4> mono = MultiPoly<4>::constant(v[j]);
      for (std::size_t i = 0; i < 4; ++i) mono *= MultiPoly<4>::variable(i).pow(cols[j][i]);
      f += mono;
    }
    // Exact Gram-Schmidt against the earlier elements.
    for (const auto& g : basis) f -= g * (cone_inner(f, g) / cone_inner(g, g));
    basis.push_back(std::move(f));
  }
  if (basis.size() != static_cast<std::size_t>((n + 1) * (n + 1))) {
    throw Error(ErrorKind::degenerate, "trace-free basis of rank " + std::to_string(n) + " has " +
                                           std::to_string(basis.size()) + " elements");
  }
  return basis;
}

}  // namespace

const std::vector<MultiPoly<4>>& traceless_basis(int n) {
  if (n < 0) throw Error(ErrorKind::domain, "tensor rank must be non-negative");
  static std::mutex mu;
  static std::map<int, std::vector<MultiPoly<4>>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, build_traceless_basis(n)).first;
  return it->second;
}

Pencil assemble_4d_pencil(int N, const StateParams& state, const std::array<Rational, 3>& eta_dir) {
  if (N < 0) throw Error(ErrorKind::domain, "N must be non-negative");
  if (eta_dir[0] * eta_dir[0] + eta_dir[1] * eta_dir[1] + eta_dir[2] * eta_dir[2] != 1) {
    throw Error(ErrorKind::domain, "direction must be a unit vector");
  }
  const RealMatrix G = kinetic_G(N, state);
  MultiPoly<3> eta_n;
  for (std::size_t i = 0; i < 3; ++i) eta_n += MultiPoly<3>::variable(i, eta_dir[i]);

  Pencil P;
  P.N = N;
  std::vector<MultiPoly<3>> psi;
  std::vector<Real> norm;
  for (int n = 0; n <= N; ++n)
    for (const auto& f : traceless_basis(n)) {
      P.level.push_back(n);
      psi.push_back(restrict_to_null_cone(f));
      norm.push_back(sqrt(to_real(sphere_mean(psi.back() * psi.back()))));
    }
  const auto D = static_cast<std::size_t>(P.size());
  P.B.assign(D * D, Real(0));
  P.C.assign(D * D, Real(0));
  RealMatrix minusC(D, std::vector<Real>(D));
  for (std::size_t i = 0; i < D; ++i)
    for (std::size_t j = i; j < D; ++j) {
      const MultiPoly<3> prod = psi[i] * psi[j];
      const Real g = G[static_cast<std::size_t>(P.level[i])][static_cast<std::size_t>(P.level[j])] / (norm[i] * norm[j]);
      const Real b = g * to_real(sphere_mean(eta_n * prod));
      const Real c = -g * to_real(sphere_mean(prod));
      P.B[i * D + j] = P.B[j * D + i] = b;
      P.C[i * D + j] = P.C[j * D + i] = c;
      minusC[i][j] = minusC[j][i] = -c;
    }
  if (!verify_positive_definite(minusC)) {
    throw Error(ErrorKind::hyperbolicity, "the u-contracted moment matrix is not definite");
  }
  return P;
}

namespace {

template <class F>
std::vector<std::complex<double>> pencil_eigenvalues(const Pencil& pencil) {
  using Mat = Eigen::Matrix<F, Eigen::Dynamic, Eigen::Dynamic>;
  const auto D = static_cast<Eigen::Index>(pencil.size());
  Mat B(D, D), C(D, D);
  for (Eigen::Index i = 0; i < D; ++i)
    for (Eigen::Index j = 0; j < D; ++j) {
      const auto k = static_cast<std::size_t>(i * D + j);
      B(i, j) = to_float<F>(pencil.B[k]);
      C(i, j) = to_float<F>(pencil.C[k]);
    }
  const Mat M = C.partialPivLu().solve(B);
  Eigen::EigenSolver<Mat> es(M, false);
  if (es.info() != Eigen::Success) throw Error(ErrorKind::nonreal, "eigensolver did not converge");
  std::vector<std::complex<double>> out;
  for (Eigen::Index i = 0; i < D; ++i) {
    const auto z = es.eigenvalues()(i);
    out.emplace_back(static_cast<double>(z.real()), static_cast<double>(z.imag()));
  }
  return out;
}

}  // namespace

SpeedSet oracle_speeds(const Pencil& pencil, double tol) {
  const int bits = oracle_precision_bits();
  std::vector<std::complex<double>> eig;
  if (bits <= 64) {
    eig = pencil_eigenvalues<long double>(pencil);
  } else {
    // Digits10 for the requested binary precision; restored afterwards.
    const unsigned saved = MpfrFloat::default_precision();
    MpfrFloat::default_precision(static_cast<unsigned>(bits * 0.30103) + 1);
    try {
      eig = pencil_eigenvalues<MpfrFloat>(pencil);
    } catch (...) {
      MpfrFloat::default_precision(saved);
      throw;
    }
    MpfrFloat::default_precision(saved);
  }

  std::vector<double> values;
  for (const auto& z : eig) {
    if (std::abs(z.imag()) > tol) {
      std::ostringstream os;
      os << "eigenvalue " << z.real() << (z.imag() < 0 ? " - " : " + ") << std::abs(z.imag())
         << "i has an imaginary part beyond " << tol;
      throw Error(ErrorKind::nonreal, os.str());
    }
    values.push_back(z.real());
  }
  std::sort(values.begin(), values.end());

  SpeedSet set;
  set.N = pencil.N;
  std::size_t i = 0;
  while (i < values.size()) {
    std::size_t j = i;
    double sum = 0;
    while (j < values.size() && values[j] - values[i] <= tol) sum += values[j++];
    SpeedRoot r;
    const double mean = sum / static_cast<double>(j - i);
    r.approx = mean;
    r.multiplicity = static_cast<int>(j - i);
    r.kind = ExactKind::interval;
    r.lo = Rational(values[i]);
    r.hi = Rational(values[j - 1]);
    set.roots.push_back(r);
    i = j;
  }
  return set;
}

SpeedSet oracle_speeds(int N, const StateParams& state, double tol, const std::array<Rational, 3>& eta_dir) {
  return oracle_speeds(assemble_4d_pencil(N, state, eta_dir), tol);
}

namespace {

double nearest_distance(const SpeedSet& s, double x) {
  double best = INFINITY;
  for (const auto& r : s.roots) best = std::min(best, std::abs(static_cast<double>(r.approx) - x));
  return best;
}

}  // namespace

OracleReport verify_oracle_match(int N, double tol, const StateParams& state) {
  OracleReport rep;
  rep.N = N;
  rep.tol = tol;
  rep.model = model_speeds(N);
  rep.oracle = oracle_speeds(N, state, tol);
  rep.multiplicities_equal = rep.model.roots.size() == rep.oracle.roots.size();
  std::vector<bool> used(rep.oracle.roots.size(), false);
  bool all_ok = true;
  for (const auto& m : rep.model.roots) {
    OracleMatch match;
    match.model = static_cast<double>(m.approx);
    match.model_multiplicity = m.multiplicity;
    std::size_t best = rep.oracle.roots.size();
    double best_dev = INFINITY;
    for (std::size_t k = 0; k < rep.oracle.roots.size(); ++k) {
      const double dev = std::abs(static_cast<double>(rep.oracle.roots[k].approx) - match.model);
      if (!used[k] && dev < best_dev) {
        best_dev = dev;
        best = k;
      }
    }
    if (best < rep.oracle.roots.size()) {
      used[best] = true;
      match.oracle = static_cast<double>(rep.oracle.roots[best].approx);
      match.oracle_multiplicity = rep.oracle.roots[best].multiplicity;
      match.deviation = best_dev;
    } else {
      match.deviation = INFINITY;
    }
    match.ok = match.deviation <= tol && match.model_multiplicity == match.oracle_multiplicity;
    if (match.model_multiplicity != match.oracle_multiplicity) rep.multiplicities_equal = false;
    rep.max_deviation = std::max(rep.max_deviation, match.deviation);
    all_ok = all_ok && match.ok;
    rep.matches.push_back(match);
  }
  rep.pass = all_ok && rep.multiplicities_equal && rep.model.count() == rep.oracle.count();

  if (N >= 1) {
    const double inv = 1.0 / (2 * N + 1);
    const double inv_sqrt = 1.0 / std::sqrt(2.0 * N + 1);
    const double d_inv = std::max(nearest_distance(rep.oracle, inv), nearest_distance(rep.oracle, -inv));
    const double d_sqrt = std::max(nearest_distance(rep.oracle, inv_sqrt), nearest_distance(rep.oracle, -inv_sqrt));
    std::ostringstream os;
    os.precision(3);
    os << "p=N-1 pair: ";
    if (d_sqrt <= tol && d_inv > tol) {
      os << "oracle confirms +-1/sqrt(2N+1) (deviation " << d_sqrt << "); +-1/(2N+1) is absent (nearest root off by "
         << d_inv << ")";
    } else if (d_inv <= tol && d_sqrt > tol) {
      os << "oracle confirms +-1/(2N+1) (deviation " << d_inv << "); +-1/sqrt(2N+1) is absent (nearest root off by "
         << d_sqrt << ")";
    } else if (d_inv <= tol && d_sqrt <= tol) {
      os << "oracle contains both +-1/(2N+1) and +-1/sqrt(2N+1)";
    } else {
      os << "oracle supports neither reading (off by " << d_inv << " and " << d_sqrt << ")";
    }
    rep.adjudication = os.str();
  }
  return rep;
}

}  // namespace momentwave
