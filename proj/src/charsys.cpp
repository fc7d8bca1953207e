#include "momentwave/charsys.hpp"

#include <fstream>
#include <map>
#include <sstream>

#include "json.hpp"
#include "momentwave/error.hpp"

namespace momentwave {

namespace {

using Accum = std::map<std::pair<int, int>, std::pair<Rational, Rational>>;

long floor_div(long a, long b) {
  long q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

long sign_pow(long e) { return (e % 2 == 0) ? 1 : -1; }

std::vector<YTerm> flatten(const Accum& acc) {
  std::vector<YTerm> out;
  // std::map orders by h ascending; canonical order is h descending.
  for (auto it = acc.rbegin(); it != acc.rend(); ++it) {
    if (it->second.first == 0 && it->second.second == 0) continue;
    out.push_back({it->first.first, it->first.second, it->second.first, it->second.second});
  }
  return out;
}

void add_mu(Accum& acc, long h, long k, const Rational& c) {
  if (h < 0 || k < 0) throw Error(ErrorKind::domain, "coefficient generator produced a negative unknown label");
  acc[{static_cast<int>(h), static_cast<int>(k)}].first += c;
}

void add_phi(Accum& acc, long h, long k, const Rational& c) {
  if (h < 0 || k < 0) throw Error(ErrorKind::domain, "coefficient generator produced a negative unknown label");
  acc[{static_cast<int>(h), static_cast<int>(k)}].second += c;
}

// Shared tail of every summand: C(r,s) (2s)!!/(2s-2p)!! C(s-p,T) (-1)^T.
Rational rst_factor(long p, long r, long s, long T) {
  Rational c(binomial(r, s) * binomial(s - p, T));
  c *= make_rational(double_factorial(2 * s), double_factorial(2 * s - 2 * p));
  return T % 2 == 0 ? c : Rational(-c);
}

void check_block_indices(int p, int b, int n) {
  if (p < 0 || b < 0 || n < p) {
    throw Error(ErrorKind::domain, "invalid indices p=" + std::to_string(p) + " b=" + std::to_string(b) +
                                       " n=" + std::to_string(n));
  }
}

}  // namespace

std::vector<YTerm> y_coeff(int p_, int b_, int n_) {
  check_block_indices(p_, b_, n_);
  const long p = p_, b = b_, n = n_;
  Accum acc;

  if (n == p) {
    if (b % 2 == 0) {
      Rational c(binomial(p + b / 2, p) * factorial(b) * factorial(p) * double_factorial(2 * p));
      c /= Rational(factorial(2 * p + b + 1));
      add_mu(acc, 0, 0, -c);
    } else {
      Rational c(binomial(p + (b + 1) / 2, p) * factorial(b + 1) * factorial(p) * double_factorial(2 * p));
      c /= Rational(factorial(2 * p + b + 2));
      add_phi(acc, 0, 0, c);
    }
    return flatten(acc);
  }

  const bool even = b % 2 == 0;
  // mu part: sign (-1)^{p+n} for even b, (-1)^{p+n+1} for odd b.
  {
    const long r_lo = even ? p + b / 2 : p + (b + 1) / 2;
    const long r_hi = (p + b + n) / 2;
    const long sign = sign_pow(p + n + (even ? 0 : 1));
    for (long r = r_lo; r <= r_hi; ++r) {
      const long s_hi = even ? r - b / 2 : r - (b + 1) / 2;
      for (long s = p; s <= s_hi; ++s) {
        for (long T = 0; T <= s - p; ++T) {
          Rational c = make_rational(binomial(p + b + n, 2 * r) * sign, BigInt(2 * r + 1));
          c *= make_rational(factorial(2 * r - 2 * s), factorial(2 * r - 2 * s - b));
          c *= make_rational(factorial(n), factorial(p + b + n));
          c *= rst_factor(p, r, s, T);
          add_mu(acc, n - p - 2 * r + b + 2 * s - 2 * T, 2 * r - b - 2 * s + 2 * T, -c);
        }
      }
    }
  }
  // phi part: sign (-1)^{p+n+1} for even b, (-1)^{p+n} for odd b.
  {
    const long r_lo = even ? p + 1 + b / 2 : p + (b + 1) / 2;
    const long r_hi = (p + b + n + 1) / 2;
    const long sign = sign_pow(p + n + (even ? 1 : 0));
    for (long r = r_lo; r <= r_hi; ++r) {
      const long s_hi = even ? r - (b + 2) / 2 : r - (b + 1) / 2;
      for (long s = p; s <= s_hi; ++s) {
        for (long T = 0; T <= s - p; ++T) {
          Rational c = make_rational(binomial(p + b + n + 1, 2 * r) * sign, BigInt(2 * r + 1));
          c *= make_rational(factorial(2 * r - 2 * s), factorial(2 * r - 2 * s - b - 1));
          c *= make_rational(factorial(n), factorial(p + b + n + 1));
          c *= rst_factor(p, r, s, T);
          add_phi(acc, n - p - 2 * r + b + 2 * s - 2 * T + 1, 2 * r - b - 2 * s + 2 * T - 1, c);
        }
      }
    }
  }
  return flatten(acc);
}

namespace {

struct GeneralIndices {
  long p, m, a, b, n, r, s, T;
  std::string describe() const {
    std::ostringstream os;
    os << "p=" << p << " m=" << m << " a=" << a << " b=" << b << " n=" << n << " r=" << r << " s=" << s
       << " T=" << T;
    return os.str();
  }
};

BigInt checked_factorial(long x, const GeneralIndices& at) {
  if (x < 0) throw Error(ErrorKind::domain, "factorial of " + std::to_string(x) + " at " + at.describe());
  return factorial(x);
}

BigInt checked_double_factorial(long x, const GeneralIndices& at) {
  if (x < -1) throw Error(ErrorKind::domain, "double factorial of " + std::to_string(x) + " at " + at.describe());
  return double_factorial(x);
}

}  // namespace

std::vector<YTerm> y_coeff_general(int p_, int m_, int a_, int b_, int n_) {
  const long p = p_, m = m_, a = a_, b = b_, n = n_;
  if (a + b != m - p) {
    throw Error(ErrorKind::domain, "a+b must equal m-p (a=" + std::to_string(a) + " b=" + std::to_string(b) +
                                       " m=" + std::to_string(m) + " p=" + std::to_string(p) + ")");
  }
  check_block_indices(p_, b_, n_);
  if (a < 0) throw Error(ErrorKind::domain, "a must be non-negative");
  const long M = m + n - a;
  Accum acc;

  if (n >= p + b - 2 * floor_div(b, 2)) {
    for (long r = floor_div(2 * p + b + 1, 2); r <= floor_div(M, 2); ++r) {
      for (long s = p; s <= floor_div(2 * r - b, 2); ++s) {
        for (long T = 0; T <= s - p; ++T) {
          const GeneralIndices at{p, m, a, b, n, r, s, T};
          Rational c = make_rational(binomial(M, 2 * r) * sign_pow(M) * binomial(r, s), BigInt(2 * r + 1));
          c *= make_rational(checked_factorial(2 * r - 2 * s, at), checked_factorial(2 * r - 2 * s - b, at));
          c *= make_rational(checked_factorial(M - b - p, at), checked_factorial(M, at));
          c *= make_rational(checked_double_factorial(2 * s, at), checked_double_factorial(2 * s - 2 * p, at));
          c *= Rational(binomial(s - p, T) * sign_pow(T));
          add_mu(acc, n - p - 2 * r + b + 2 * s - 2 * T, 2 * r - b - 2 * s + 2 * T, -c);
        }
      }
    }
  }
  if (n >= p + b + 1 - 2 * floor_div(b + 1, 2)) {
    for (long r = floor_div(2 * p + b + 2, 2); r <= floor_div(M + 1, 2); ++r) {
      for (long s = p; s <= floor_div(2 * r - b - 1, 2); ++s) {
        for (long T = 0; T <= s - p; ++T) {
          const GeneralIndices at{p, m, a, b, n, r, s, T};
          Rational c =
              make_rational(binomial(M + 1, 2 * r) * sign_pow(M + 1) * binomial(r, s), BigInt(2 * r + 1));
          c *= make_rational(checked_factorial(2 * r - 2 * s, at), checked_factorial(2 * r - 2 * s - b - 1, at));
          c *= make_rational(checked_factorial(M - b - p, at), checked_factorial(M + 1, at));
          c *= make_rational(checked_double_factorial(2 * s, at), checked_double_factorial(2 * s - 2 * p, at));
          c *= Rational(binomial(s - p, T) * sign_pow(T));
          add_phi(acc, n - p - 2 * r + b + 2 * s - 2 * T + 1, 2 * r - b - 2 * s + 2 * T - 1, c);
        }
      }
    }
  }
  return flatten(acc);
}

GeneratorComparison compare_generators(int N) {
  if (N < 0) throw Error(ErrorKind::domain, "N must be non-negative");
  GeneratorComparison out;
  out.N = N;
  for (int p = 0; p <= N; ++p)
    for (int b = 0; b <= N - p; ++b)
      for (int n = p; n <= N; ++n) {
        const auto reference = y_coeff(p, b, n);
        for (int m = p + b; m <= N; ++m) {
          ++out.checked;
          if (y_coeff_general(p, m, m - p - b, b, n) != reference) {
            out.mismatches.push_back("p=" + std::to_string(p) + " b=" + std::to_string(b) + " n=" + std::to_string(n) +
                                     " m=" + std::to_string(m));
          }
        }
      }
  return out;
}

MomentMatrix::MomentMatrix(int N) : N_(N), g_(static_cast<std::size_t>(N + 1), static_cast<std::size_t>(N + 1)) {
  if (N < 0) throw Error(ErrorKind::domain, "moment matrix order must be non-negative");
}

MomentMatrix::MomentMatrix(int N, std::vector<Rational> row_major) : MomentMatrix(N) {
  const std::size_t side = static_cast<std::size_t>(N + 1);
  if (row_major.size() != side * side) {
    throw Error(ErrorKind::closure, "expected " + std::to_string(side * side) + " entries for N=" +
                                        std::to_string(N) + ", got " + std::to_string(row_major.size()));
  }
  for (std::size_t i = 0; i < side; ++i)
    for (std::size_t j = 0; j < side; ++j) g_(i, j) = row_major[i * side + j];
  for (std::size_t i = 0; i < side; ++i)
    for (std::size_t j = i + 1; j < side; ++j)
      if (g_(i, j) != g_(j, i)) {
        throw Error(ErrorKind::closure,
                    "G is not symmetric at (" + std::to_string(i) + "," + std::to_string(j) + ")");
      }
}

void MomentMatrix::set(int m, int n, const Rational& value) {
  g_(static_cast<std::size_t>(m), static_cast<std::size_t>(n)) = value;
  g_(static_cast<std::size_t>(n), static_cast<std::size_t>(m)) = value;
}

int MomentMatrix::first_singular_trailing_block() const {
  for (int j = 0; j <= N_; ++j) {
    const auto first = static_cast<std::size_t>(j);
    if (determinant(g_.block(first, static_cast<std::size_t>(N_ + 1 - j))) == 0) return j;
  }
  return -1;
}

bool MomentMatrix::is_admissible() const { return first_singular_trailing_block() < 0; }

MomentMatrix MomentMatrix::from_json(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorKind::io, std::string("closure file: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("N") || !doc.contains("G")) {
    throw Error(ErrorKind::io, "closure file needs fields N and G");
  }
  if (!doc["N"].is_number_integer()) throw Error(ErrorKind::io, "closure file: N must be an integer");
  const int N = doc["N"].get<int>();
  if (N < 0) throw Error(ErrorKind::io, "closure file: N must be non-negative");
  if (!doc["G"].is_array()) throw Error(ErrorKind::io, "closure file: G must be an array");
  std::vector<Rational> values;
  for (const auto& e : doc["G"]) {
    if (e.is_string()) {
      values.push_back(parse_rational(e.get<std::string>()));
    } else if (e.is_number_integer()) {
      values.push_back(parse_rational(e.dump()));
    } else if (e.is_number_float()) {
      // dump() gives the shortest literal that round-trips, so 0.1 reads as 1/10.
      values.push_back(parse_rational(e.dump()));
    } else {
      throw Error(ErrorKind::io, "closure file: G entries must be numbers or strings");
    }
  }
  return MomentMatrix(N, std::move(values));
}

MomentMatrix MomentMatrix::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::io, "cannot open closure file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_json(buf.str());
}

int block_side(int p, int N) { return (N - p + 1) * (N - p + 2) / 2; }

std::vector<std::pair<int, int>> unknown_labels(int p, int N) {
  std::vector<std::pair<int, int>> labels;
  for (int n = p; n <= N; ++n)
    for (int h = n - p; h >= 0; --h) labels.emplace_back(h, n - p - h);
  return labels;
}

CharMatrix full_matrix(int p, int N, const MomentMatrix& G) {
  if (p < 0 || p > N) throw Error(ErrorKind::domain, "block p must satisfy 0 <= p <= N");
  if (G.order() != N) {
    throw Error(ErrorKind::closure, "closure order " + std::to_string(G.order()) + " does not match N=" +
                                        std::to_string(N));
  }
  if (int j = G.first_singular_trailing_block(); j >= 0) {
    throw Error(ErrorKind::closure, "trailing block G[" + std::to_string(j) + ".." + std::to_string(N) +
                                        "] is singular");
  }
  CharMatrix M;
  M.p = p;
  M.N = N;
  M.cols = unknown_labels(p, N);
  for (int b = 0; b <= N - p; ++b)
    for (int m = p + b; m <= N; ++m) M.rows.emplace_back(b, m);

  std::map<std::pair<int, int>, std::size_t> col_index;
  for (std::size_t j = 0; j < M.cols.size(); ++j) col_index[M.cols[j]] = j;
  M.entries.assign(M.rows.size() * M.cols.size(), CharEntry{});

  for (int b = 0; b <= N - p; ++b) {
    for (int n = p; n <= N; ++n) {
      const auto terms = y_coeff(p, b, n);
      for (std::size_t i = 0; i < M.rows.size(); ++i) {
        if (M.rows[i].first != b) continue;
        const Rational& g = G(M.rows[i].second, n);
        for (const auto& t : terms) {
          auto& e = M.at(i, col_index.at({t.h, t.k}));
          e.mu += g * t.mu_coeff;
          e.phi += g * t.phi_coeff;
        }
      }
    }
  }
  return M;
}

CharMatrix reduced_matrix(int p, int eta) {
  if (p < 0 || eta < 0) throw Error(ErrorKind::domain, "reduced_matrix needs p >= 0 and eta >= 0");
  CharMatrix M;
  M.p = p;
  M.N = p + eta;
  for (int h = eta; h >= 0; --h) M.cols.emplace_back(h, eta - h);
  for (int q = 0; q <= eta; ++q) M.rows.emplace_back(q, p + eta);
  M.entries.assign(M.rows.size() * M.cols.size(), CharEntry{});
  for (int q = 0; q <= eta; ++q) {
    for (const auto& t : y_coeff(p, q, p + eta)) {
      if (t.h + t.k != eta) throw Error(ErrorKind::domain, "coefficient label off the reduced level");
      auto& e = M.at(static_cast<std::size_t>(q), static_cast<std::size_t>(eta - t.h));
      e.mu = t.mu_coeff;
      e.phi = t.phi_coeff;
    }
  }
  return M;
}

}  // namespace momentwave
