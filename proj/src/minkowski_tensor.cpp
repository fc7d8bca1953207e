#include "momentwave/minkowski_tensor.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include "momentwave/error.hpp"
#include "momentwave/exact_linalg.hpp"
#include "momentwave/multi_poly.hpp"

namespace momentwave {

namespace {

std::size_t pow4(int k) { return std::size_t{1} << (2 * k); }

int metric_sign(int index_value) { return index_value == 0 ? -1 : 1; }

}  // namespace

MinkTensor::MinkTensor() : data_(1) {}

MinkTensor::MinkTensor(std::vector<Variance> variance) : variance_(std::move(variance)) {
  if (rank() > max_rank) {
    throw Error(ErrorKind::domain, "tensor rank " + std::to_string(rank()) + " exceeds the dense cap " +
                                       std::to_string(max_rank));
  }
  data_.resize(pow4(rank()));
}

MinkTensor MinkTensor::scalar(const Rational& value) {
  MinkTensor t;
  t.data_[0] = value;
  return t;
}

MinkTensor MinkTensor::vector(const std::array<Rational, 4>& components, Variance variance) {
  MinkTensor t({variance});
  for (std::size_t i = 0; i < 4; ++i) t.data_[i] = components[i];
  return t;
}

MinkTensor MinkTensor::metric(Variance variance) {
  MinkTensor g({variance, variance});
  for (int i = 0; i < 4; ++i) g.at({i, i}) = metric_sign(i);
  return g;
}

MinkTensor MinkTensor::identity() {
  MinkTensor d({Variance::upper, Variance::lower});
  for (int i = 0; i < 4; ++i) d.at({i, i}) = 1;
  return d;
}

std::size_t MinkTensor::flat_index(const std::vector<int>& index) const {
  if (static_cast<int>(index.size()) != rank()) throw Error(ErrorKind::domain, "index length does not match rank");
  std::size_t flat = 0;
  for (int v : index) {
    if (v < 0 || v > 3) throw Error(ErrorKind::domain, "index value outside 0..3");
    flat = flat * 4 + static_cast<std::size_t>(v);
  }
  return flat;
}

std::vector<int> MinkTensor::unflatten(std::size_t flat) const {
  std::vector<int> index(static_cast<std::size_t>(rank()));
  for (int k = rank() - 1; k >= 0; --k) {
    index[static_cast<std::size_t>(k)] = static_cast<int>(flat & 3u);
    flat >>= 2;
  }
  return index;
}

Rational& MinkTensor::at(const std::vector<int>& index) { return data_[flat_index(index)]; }
const Rational& MinkTensor::at(const std::vector<int>& index) const { return data_[flat_index(index)]; }

MinkTensor MinkTensor::outer(const MinkTensor& other) const {
  std::vector<Variance> var = variance_;
  var.insert(var.end(), other.variance_.begin(), other.variance_.end());
  MinkTensor r(std::move(var));
  const std::size_t n = other.data_.size();
  for (std::size_t i = 0; i < data_.size(); ++i) {
    if (data_[i] == 0) continue;
    for (std::size_t j = 0; j < n; ++j) {
      if (other.data_[j] == 0) continue;
      r.data_[i * n + j] = data_[i] * other.data_[j];
    }
  }
  return r;
}

MinkTensor MinkTensor::contract(const MinkTensor& other, const std::vector<std::pair<int, int>>& pairs) const {
  std::vector<bool> used_a(static_cast<std::size_t>(rank()), false);
  std::vector<bool> used_b(static_cast<std::size_t>(other.rank()), false);
  for (auto [i, j] : pairs) {
    if (i < 0 || i >= rank() || j < 0 || j >= other.rank()) throw Error(ErrorKind::domain, "contraction slot out of range");
    if (used_a[static_cast<std::size_t>(i)] || used_b[static_cast<std::size_t>(j)]) {
      throw Error(ErrorKind::domain, "contraction slot used twice");
    }
    if (variance_[static_cast<std::size_t>(i)] == other.variance_[static_cast<std::size_t>(j)]) {
      throw Error(ErrorKind::domain, "contraction must pair an upper with a lower index");
    }
    used_a[static_cast<std::size_t>(i)] = used_b[static_cast<std::size_t>(j)] = true;
  }
  std::vector<int> free_a, free_b;
  std::vector<Variance> var;
  for (int i = 0; i < rank(); ++i)
    if (!used_a[static_cast<std::size_t>(i)]) {
      free_a.push_back(i);
      var.push_back(variance_[static_cast<std::size_t>(i)]);
    }
  for (int j = 0; j < other.rank(); ++j)
    if (!used_b[static_cast<std::size_t>(j)]) {
      free_b.push_back(j);
      var.push_back(other.variance_[static_cast<std::size_t>(j)]);
    }
  MinkTensor r(std::move(var));

  auto stride = [](int rank, int slot) { return pow4(rank - 1 - slot); };
  // Offsets contributed by each contracted combination, in both operands.
  const int k = static_cast<int>(pairs.size());
  std::vector<std::size_t> off_a(pow4(k)), off_b(pow4(k));
  for (std::size_t combo = 0; combo < pow4(k); ++combo) {
    std::size_t oa = 0, ob = 0, c = combo;
    for (auto [i, j] : pairs) {
      const std::size_t v = c & 3u;
      c >>= 2;
      oa += v * stride(rank(), i);
      ob += v * stride(other.rank(), j);
    }
    off_a[combo] = oa;
    off_b[combo] = ob;
  }
  const int fa = static_cast<int>(free_a.size());
  const int fb = static_cast<int>(free_b.size());
  for (std::size_t flat = 0; flat < r.data_.size(); ++flat) {
    std::size_t base_a = 0, base_b = 0, f = flat;
    for (int t = fb - 1; t >= 0; --t) {
      base_b += (f & 3u) * stride(other.rank(), free_b[static_cast<std::size_t>(t)]);
      f >>= 2;
    }
    for (int t = fa - 1; t >= 0; --t) {
      base_a += (f & 3u) * stride(rank(), free_a[static_cast<std::size_t>(t)]);
      f >>= 2;
    }
    Rational sum = 0;
    for (std::size_t combo = 0; combo < off_a.size(); ++combo) {
      const Rational& a = data_[base_a + off_a[combo]];
      if (a == 0) continue;
      const Rational& b = other.data_[base_b + off_b[combo]];
      if (b == 0) continue;
      sum += a * b;
    }
    r.data_[flat] = std::move(sum);
  }
  return r;
}

MinkTensor MinkTensor::trace(int i, int j) const {
  if (i == j || i < 0 || j < 0 || i >= rank() || j >= rank()) throw Error(ErrorKind::domain, "invalid trace slots");
  // Contract with delta, then drop the doubled index by contracting the identity.
  const MinkTensor delta = MinkTensor::identity();
  const bool i_upper = variance_[static_cast<std::size_t>(i)] == Variance::upper;
  if (variance_[static_cast<std::size_t>(i)] == variance_[static_cast<std::size_t>(j)]) {
    throw Error(ErrorKind::domain, "trace must pair an upper with a lower index");
  }
  // delta^a_b: slot 0 upper, slot 1 lower.
  return contract(delta, {{i, i_upper ? 1 : 0}, {j, i_upper ? 0 : 1}});
}

MinkTensor MinkTensor::permute(const std::vector<int>& perm) const {
  if (static_cast<int>(perm.size()) != rank()) throw Error(ErrorKind::domain, "permutation length mismatch");
  std::vector<Variance> var(perm.size());
  for (std::size_t k = 0; k < perm.size(); ++k) var[k] = variance_[static_cast<std::size_t>(perm[k])];
  MinkTensor r(std::move(var));
  std::vector<std::size_t> src_stride(perm.size());
  for (std::size_t k = 0; k < perm.size(); ++k) src_stride[k] = pow4(rank() - 1 - perm[k]);
  for (std::size_t flat = 0; flat < r.data_.size(); ++flat) {
    std::size_t src = 0, f = flat;
    for (std::size_t k = perm.size(); k-- > 0;) {
      src += (f & 3u) * src_stride[k];
      f >>= 2;
    }
    r.data_[flat] = data_[src];
  }
  return r;
}

MinkTensor MinkTensor::lower(int i) const {
  if (variance_.at(static_cast<std::size_t>(i)) == Variance::lower) return *this;
  MinkTensor r = *this;
  r.variance_[static_cast<std::size_t>(i)] = Variance::lower;
  const std::size_t stride = pow4(rank() - 1 - i);
  for (std::size_t flat = 0; flat < r.data_.size(); ++flat)
    if ((flat / stride) % 4 == 0) r.data_[flat] = -r.data_[flat];
  return r;
}

MinkTensor MinkTensor::raise(int i) const {
  if (variance_.at(static_cast<std::size_t>(i)) == Variance::upper) return *this;
  MinkTensor r = *this;
  r.variance_[static_cast<std::size_t>(i)] = Variance::upper;
  const std::size_t stride = pow4(rank() - 1 - i);
  for (std::size_t flat = 0; flat < r.data_.size(); ++flat)
    if ((flat / stride) % 4 == 0) r.data_[flat] = -r.data_[flat];
  return r;
}

MinkTensor MinkTensor::with_variance(const std::vector<Variance>& variance) const {
  if (variance.size() != variance_.size()) throw Error(ErrorKind::domain, "variance length mismatch");
  MinkTensor r = *this;
  for (int i = 0; i < rank(); ++i)
    r = variance[static_cast<std::size_t>(i)] == Variance::upper ? r.raise(i) : r.lower(i);
  return r;
}

namespace {

// Swaps index positions i and j of a dense tensor.
std::vector<Rational> swapped(const std::vector<Rational>& data, int rank, int i, int j) {
  std::vector<Rational> out(data.size());
  const std::size_t si = pow4(rank - 1 - i), sj = pow4(rank - 1 - j);
  for (std::size_t flat = 0; flat < data.size(); ++flat) {
    const std::size_t vi = (flat / si) % 4, vj = (flat / sj) % 4;
    out[flat - vi * si - vj * sj + vj * si + vi * sj] = data[flat];
  }
  return out;
}

}  // namespace

MinkTensor MinkTensor::symmetrize(const std::vector<int>& positions) const {
  for (std::size_t a = 0; a < positions.size(); ++a)
    for (std::size_t b = a + 1; b < positions.size(); ++b)
      if (variance_.at(static_cast<std::size_t>(positions[a])) != variance_.at(static_cast<std::size_t>(positions[b]))) {
        throw Error(ErrorKind::domain, "symmetrization over indices of different variance");
      }
  // Coset recursion: S_k = (1/k) sum_{i<=k} (i k) S_{k-1}.
  MinkTensor cur = *this;
  for (std::size_t k = 1; k < positions.size(); ++k) {
    MinkTensor next = cur;
    for (std::size_t i = 0; i < k; ++i) {
      const auto sw = swapped(cur.data_, rank(), positions[i], positions[k]);
      for (std::size_t f = 0; f < sw.size(); ++f)
        if (sw[f] != 0) next.data_[f] += sw[f];
    }
    next *= make_rational(1, static_cast<long>(k + 1));
    cur = std::move(next);
  }
  return cur;
}

MinkTensor MinkTensor::symmetrize() const {
  std::vector<int> all(static_cast<std::size_t>(rank()));
  for (int i = 0; i < rank(); ++i) all[static_cast<std::size_t>(i)] = i;
  return symmetrize(all);
}

bool MinkTensor::is_symmetric(const std::vector<int>& positions) const {
  for (std::size_t k = 1; k < positions.size(); ++k)
    if (swapped(data_, rank(), positions[k - 1], positions[k]) != data_) return false;
  return true;
}

void MinkTensor::check_same_shape(const MinkTensor& o) const {
  if (variance_ != o.variance_) throw Error(ErrorKind::domain, "tensor shapes differ");
}

MinkTensor& MinkTensor::operator+=(const MinkTensor& o) {
  check_same_shape(o);
  for (std::size_t i = 0; i < data_.size(); ++i)
    if (o.data_[i] != 0) data_[i] += o.data_[i];
  return *this;
}

MinkTensor& MinkTensor::operator-=(const MinkTensor& o) {
  check_same_shape(o);
  for (std::size_t i = 0; i < data_.size(); ++i)
    if (o.data_[i] != 0) data_[i] -= o.data_[i];
  return *this;
}

MinkTensor& MinkTensor::operator*=(const Rational& c) {
  for (auto& x : data_)
    if (x != 0) x *= c;
  return *this;
}

bool MinkTensor::is_zero() const {
  return std::all_of(data_.begin(), data_.end(), [](const Rational& x) { return x == 0; });
}

Rational MinkTensor::max_abs() const {
  Rational m = 0;
  for (const auto& x : data_)
    if (abs(x) > m) m = abs(x);
  return m;
}

Rational dot(const MinkTensor& a, const MinkTensor& b) {
  if (a.rank() != 1 || b.rank() != 1) throw Error(ErrorKind::domain, "dot needs rank-1 tensors");
  const MinkTensor au = a.raise(0);
  const MinkTensor bl = b.lower(0);
  Rational s = 0;
  for (std::size_t i = 0; i < 4; ++i) s += au[i] * bl[i];
  return s;
}

MinkTensor symmetrize(const MinkTensor& t) { return t.symmetrize(); }

MinkTensor FrameProjectors::K_upper() const { return K.raise(0).raise(1); }
MinkTensor FrameProjectors::K_mixed() const { return K.raise(1); }

FrameProjectors build_frame(const MinkTensor& u_in, const MinkTensor& v_in) {
  if (u_in.rank() != 1 || v_in.rank() != 1) throw Error(ErrorKind::frame, "u and v must be rank-1 tensors");
  const MinkTensor u = u_in.raise(0);
  const MinkTensor v = v_in.raise(0);
  if (dot(u, u) != -1) throw Error(ErrorKind::frame, "u.u = " + to_string(dot(u, u)) + ", expected -1");
  if (dot(v, v) != 1) throw Error(ErrorKind::frame, "v.v = " + to_string(dot(v, v)) + ", expected 1");
  if (dot(u, v) != 0) throw Error(ErrorKind::frame, "u.v = " + to_string(dot(u, v)) + ", expected 0");
  FrameProjectors f;
  f.u = u;
  f.v = v;
  const MinkTensor ul = u.lower(0);
  const MinkTensor vl = v.lower(0);
  f.h = MinkTensor::metric(Variance::lower) + ul.outer(ul);
  f.K = f.h - vl.outer(vl);
  return f;
}

FrameProjectors canonical_frame() {
  return build_frame(MinkTensor::vector({1, 0, 0, 0}), MinkTensor::vector({0, 1, 0, 0}));
}

namespace {

using Mat4 = std::array<std::array<Rational, 4>, 4>;

Mat4 matmul(const Mat4& a, const Mat4& b) {
  Mat4 c{};
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j)
      for (std::size_t k = 0; k < 4; ++k) c[i][j] += a[i][k] * b[k][j];
  return c;
}

// Rotation from the integer quaternion (a,b,c,d), acting on the spatial block.
Mat4 rotation(long a, long b, long c, long d) {
  const Rational n = Rational(a * a + b * b + c * c + d * d);
  Mat4 R{};
  R[0][0] = 1;
  const long m[3][3] = {{a * a + b * b - c * c - d * d, 2 * (b * c - a * d), 2 * (b * d + a * c)},
                        {2 * (b * c + a * d), a * a - b * b + c * c - d * d, 2 * (c * d - a * b)},
                        {2 * (b * d - a * c), 2 * (c * d + a * b), a * a - b * b - c * c + d * d}};
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) R[i + 1][j + 1] = Rational(m[i][j]) / n;
  return R;
}

// Boost with rapidity parameter t (gamma = (1+t^2)/(1-t^2)) along the
// stereographic unit vector of (a, b).
Mat4 boost(const Rational& t, const Rational& a, const Rational& b) {
  const Rational s = a * a + b * b + 1;
  const std::array<Rational, 3> n = {2 * a / s, 2 * b / s, (a * a + b * b - 1) / s};
  const Rational gamma = (1 + t * t) / (1 - t * t);
  const Rational gb = 2 * t / (1 - t * t);
  Mat4 B{};
  B[0][0] = gamma;
  for (std::size_t i = 0; i < 3; ++i) {
    B[0][i + 1] = B[i + 1][0] = gb * n[i];
    for (std::size_t j = 0; j < 3; ++j) B[i + 1][j + 1] = (i == j ? 1 : 0) + (gamma - 1) * n[i] * n[j];
  }
  return B;
}

FrameProjectors frame_from(const Mat4& L) {
  return build_frame(MinkTensor::vector({L[0][0], L[1][0], L[2][0], L[3][0]}),
                     MinkTensor::vector({L[0][1], L[1][1], L[2][1], L[3][1]}));
}

}  // namespace

FrameProjectors random_boosted_frame(std::mt19937_64& rng) {
  std::uniform_int_distribution<long> small(-2, 2);
  std::uniform_int_distribution<long> t_num(1, 3);
  long qa = 0, qb = 0, qc = 0, qd = 0;
  while (qa == 0 && qb == 0 && qc == 0 && qd == 0) {
    qa = small(rng);
    qb = small(rng);
    qc = small(rng);
    qd = small(rng);
  }
  const Rational t = make_rational(t_num(rng), 5);
  const Rational a = make_rational(small(rng), 3);
  const Rational b = make_rational(small(rng), 2);
  return frame_from(matmul(boost(t, a, b), rotation(qa, qb, qc, qd)));
}

FrameProjectors reference_boosted_frame() {
  return frame_from(matmul(boost(make_rational(1, 2), 1, 1), rotation(1, 1, 0, 0)));
}

bool frame_invariants_hold(const FrameProjectors& f) {
  if (dot(f.u, f.u) != -1 || dot(f.v, f.v) != 1 || dot(f.u, f.v) != 0) return false;
  const MinkTensor ul = f.u.lower(0), vl = f.v.lower(0);
  if (f.h != MinkTensor::metric(Variance::lower) + ul.outer(ul)) return false;
  if (f.K != f.h - vl.outer(vl)) return false;
  if (!f.K.contract(f.u, {{1, 0}}).is_zero()) return false;
  if (!f.K.contract(f.v, {{1, 0}}).is_zero()) return false;
  return f.K.raise(1).trace(0, 1)[0] == 2;
}

// ---------------------------------------------------------------------------
// Projector construction

MinkTensor traceless2_projector_dense(int p, const FrameProjectors& frame) {
  if (p < 0) throw Error(ErrorKind::domain, "projector rank must be non-negative");
  if (p == 0) return MinkTensor::scalar(1);
  const MinkTensor Kl = frame.K;
  const MinkTensor Ku = frame.K_upper();
  const MinkTensor Km = frame.K_mixed();
  std::vector<int> betas, gammas;
  for (int i = 0; i < p; ++i) {
    betas.push_back(i);
    gammas.push_back(p + i);
  }
  std::vector<Variance> var(static_cast<std::size_t>(p), Variance::lower);
  var.resize(static_cast<std::size_t>(2 * p), Variance::upper);
  MinkTensor result(var);
  for (int s = 0; s <= p / 2; ++s) {
    // Factor order: s lower K, (p-2s) mixed K, s upper K.
    MinkTensor term = MinkTensor::scalar(1);
    for (int i = 0; i < s; ++i) term = term.outer(Kl);
    for (int i = 0; i < p - 2 * s; ++i) term = term.outer(Km);
    for (int i = 0; i < s; ++i) term = term.outer(Ku);
    // Positions of beta_1..beta_p and gamma_1..gamma_p in the product.
    std::vector<int> perm(static_cast<std::size_t>(2 * p));
    for (int i = 0; i < 2 * s; ++i) perm[static_cast<std::size_t>(i)] = i;
    for (int i = 0; i < p - 2 * s; ++i) {
      perm[static_cast<std::size_t>(2 * s + i)] = 2 * s + 2 * i;
      perm[static_cast<std::size_t>(p + 2 * s + i)] = 2 * s + 2 * i + 1;
    }
    for (int i = 0; i < 2 * s; ++i) perm[static_cast<std::size_t>(p + i)] = 2 * p - 2 * s + i;
    term = term.permute(perm).symmetrize(betas).symmetrize(gammas);
    result += term * coeff_a(p, s);
  }
  return result;
}

namespace {

// Variables: x^a (0..3), y_a (4..7), z_a (8..11).
using Poly = MultiPoly<12>;
using Forms = std::array<Poly, 4>;
constexpr std::size_t kX = 0, kY = 4, kZ = 8;

Forms vars(std::size_t first) {
  Forms f;
  for (std::size_t i = 0; i < 4; ++i) f[i] = Poly::variable(first + i);
  return f;
}

Poly bilinear(const MinkTensor& M, const Forms& a, const Forms& b) {
  Poly r;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      const Rational& c = M.at({i, j});
      if (c == 0) continue;
      r += (a[static_cast<std::size_t>(i)] * b[static_cast<std::size_t>(j)]) * c;
    }
  return r;
}

Poly linear_form(const MinkTensor& vec, const Forms& a) {
  Poly r;
  for (std::size_t i = 0; i < 4; ++i)
    if (vec[i] != 0) r += a[i] * vec[i];
  return r;
}

// Forms K^{ab} z_b, i.e. the vector K z.
Forms k_times(const MinkTensor& Ku, const Forms& z) {
  Forms out;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) {
      const Rational& c = Ku.at({a, b});
      if (c != 0) out[static_cast<std::size_t>(a)] += z[static_cast<std::size_t>(b)] * c;
    }
  return out;
}

// Projector contracted with p copies of X (lower slots) and p copies of Y
// (upper slots): sum_s a_s (XKX)^s (YKY)^s (XKY)^{p-2s}.
Poly polarized_projector(int p, const FrameProjectors& f, const Forms& X, const Forms& Y) {
  if (p == 0) return Poly::constant(1);
  const Poly xx = bilinear(f.K, X, X);
  const Poly yy = bilinear(f.K_upper(), Y, Y);
  const Poly xy = bilinear(f.K_mixed(), X, Y);
  Poly r;
  for (int s = 0; s <= p / 2; ++s) r += xx.pow(s) * yy.pow(s) * xy.pow(p - 2 * s) * coeff_a(p, s);
  return r;
}

BigInt multinomial(const Poly::Monomial& m, std::size_t first) {
  long total = 0;
  BigInt denom = 1;
  for (std::size_t i = first; i < first + 4; ++i) {
    total += m[i];
    denom *= factorial(m[i]);
  }
  return factorial(total) / denom;
}

// Largest tensor component represented by a polarized polynomial: a
// coefficient spreads over multinomial-many equal components.
Rational max_component(const Poly& poly, const Rational& extra = 1) {
  Rational best = 0;
  for (const auto& [m, c] : poly.terms()) {
    Rational comp = abs(c) / extra;
    comp /= Rational(multinomial(m, kX) * multinomial(m, kY) * multinomial(m, kZ));
    if (comp > best) best = comp;
  }
  return best;
}

}  // namespace

MinkTensor traceless2_projector_polarized(int p, const FrameProjectors& frame) {
  if (p < 0) throw Error(ErrorKind::domain, "projector rank must be non-negative");
  if (p == 0) return MinkTensor::scalar(1);
  if (2 * p > MinkTensor::max_rank) throw Error(ErrorKind::domain, "projector rank exceeds the dense cap");
  const Poly P = polarized_projector(p, frame, vars(kX), vars(kY));
  std::vector<Variance> var(static_cast<std::size_t>(p), Variance::lower);
  var.resize(static_cast<std::size_t>(2 * p), Variance::upper);
  MinkTensor t(var);
  std::map<Poly::Monomial, Rational> cache;
  for (std::size_t flat = 0; flat < t.size(); ++flat) {
    const auto idx = t.unflatten(flat);
    Poly::Monomial m{};
    for (int i = 0; i < p; ++i) {
      ++m[kX + static_cast<std::size_t>(idx[static_cast<std::size_t>(i)])];
      ++m[kY + static_cast<std::size_t>(idx[static_cast<std::size_t>(p + i)])];
    }
    auto it = cache.find(m);
    if (it == cache.end()) {
      Rational c = P.coeff(m);
      if (c != 0) c /= Rational(multinomial(m, kX) * multinomial(m, kY));
      it = cache.emplace(m, c).first;
    }
    t[flat] = it->second;
  }
  return t;
}

MinkTensor traceless2_projector(int p, const FrameProjectors& frame) {
  return p <= 4 ? traceless2_projector_dense(p, frame) : traceless2_projector_polarized(p, frame);
}

// ---------------------------------------------------------------------------
// Identity checks

TheoremReport verify_theorem1(int p, const FrameProjectors& frame) {
  if (p < 2) throw Error(ErrorKind::domain, "the trace identity needs p >= 2");
  TheoremReport rep;
  const Poly P = polarized_projector(p, frame, vars(kX), vars(kY));
  Poly lap;
  for (std::size_t a = 0; a < 4; ++a)
    for (std::size_t b = 0; b < 4; ++b) {
      const Rational& k = frame.K.at({static_cast<int>(a), static_cast<int>(b)});
      if (k != 0) lap += P.derivative(kY + a).derivative(kY + b) * k;
    }
  // d^2/dy dy of the polarized form carries a factor p(p-1).
  rep.max_abs_component_diff = max_component(lap, Rational(p * (p - 1)));
  rep.pass = lap.is_zero();
  if (p <= 4) {
    const MinkTensor proj = traceless2_projector_dense(p, frame);
    const MinkTensor traced = proj.contract(frame.K, {{p, 0}, {p + 1, 1}});
    rep.dense_checked = true;
    rep.routes_agree = traced.max_abs() == rep.max_abs_component_diff;
  }
  return rep;
}

namespace {

std::vector<Poly> inverse_expansion_terms(int r, const FrameProjectors& frame) {
  const Forms X = vars(kX), Y = vars(kY);
  const Poly xx = bilinear(frame.K, X, X);
  const Poly yy = bilinear(frame.K_upper(), Y, Y);
  std::vector<Poly> terms;
  for (int s = 0; s <= r / 2; ++s) terms.push_back(xx.pow(s) * yy.pow(s) * polarized_projector(r - 2 * s, frame, X, Y));
  return terms;
}

MinkTensor inverse_expansion_dense_rhs(int r, const FrameProjectors& frame, const std::vector<Rational>& coeffs) {
  std::vector<int> alphas, betas;
  for (int i = 0; i < r; ++i) {
    alphas.push_back(i);
    betas.push_back(r + i);
  }
  std::vector<Variance> var(static_cast<std::size_t>(r), Variance::lower);
  var.resize(static_cast<std::size_t>(2 * r), Variance::upper);
  MinkTensor rhs(var);
  for (int s = 0; s <= r / 2; ++s) {
    const int q = r - 2 * s;
    MinkTensor term = MinkTensor::scalar(1);
    for (int i = 0; i < s; ++i) term = term.outer(frame.K);
    term = term.outer(traceless2_projector_dense(q, frame));
    for (int i = 0; i < s; ++i) term = term.outer(frame.K_upper());
    // Product order: alpha_1..alpha_2s, [alpha_{2s+1}..alpha_r, beta_{2s+1}..beta_r], beta_1..beta_2s.
    std::vector<int> perm(static_cast<std::size_t>(2 * r));
    for (int i = 0; i < 2 * s; ++i) perm[static_cast<std::size_t>(i)] = i;
    for (int i = 0; i < q; ++i) {
      perm[static_cast<std::size_t>(2 * s + i)] = 2 * s + i;
      perm[static_cast<std::size_t>(r + 2 * s + i)] = 2 * s + q + i;
    }
    for (int i = 0; i < 2 * s; ++i) perm[static_cast<std::size_t>(r + i)] = 2 * s + 2 * q + i;
    term = term.permute(perm).symmetrize(alphas).symmetrize(betas);
    rhs += term * coeffs[static_cast<std::size_t>(s)];
  }
  return rhs;
}

}  // namespace

Theorem2Report verify_theorem2(int r, const FrameProjectors& frame) {
  if (r < 1) throw Error(ErrorKind::domain, "the inverse expansion needs r >= 1");
  Theorem2Report rep;
  const Poly lhs = bilinear(frame.K_mixed(), vars(kX), vars(kY)).pow(r);
  const auto terms = inverse_expansion_terms(r, frame);
  Poly rhs;
  for (int s = 0; s <= r / 2; ++s) {
    rep.stated.push_back(coeff_b(r, s));
    rhs += terms[static_cast<std::size_t>(s)] * rep.stated.back();
  }
  const Poly diff = lhs - rhs;
  rep.pass = diff.is_zero();
  rep.max_abs_component_diff = max_component(diff);

  // Solve lhs = sum c_s terms_s exactly over all monomials.
  std::map<Poly::Monomial, std::size_t> rows;
  for (const auto& t : terms)
    for (const auto& [m, c] : t.terms()) rows.emplace(m, rows.size());
  for (const auto& [m, c] : lhs.terms()) rows.emplace(m, rows.size());
  const std::size_t n = terms.size();
  QMatrix A(rows.size(), n + 1);
  for (std::size_t s = 0; s < n; ++s)
    for (const auto& [m, c] : terms[s].terms()) A(rows.at(m), s) = c;
  for (const auto& [m, c] : lhs.terms()) A(rows.at(m), n) = -c;
  for (const auto& v : nullspace(A)) {
    if (v[n] == 0) continue;
    for (std::size_t s = 0; s < n; ++s) rep.fitted.push_back(v[s] / v[n]);
    break;
  }

  if (r <= 4) {
    MinkTensor dense_lhs = MinkTensor::scalar(1);
    for (int i = 0; i < r; ++i) dense_lhs = dense_lhs.outer(frame.K_mixed());
    std::vector<int> perm, betas;
    for (int i = 0; i < r; ++i) perm.push_back(2 * i);
    for (int i = 0; i < r; ++i) {
      perm.push_back(2 * i + 1);
      betas.push_back(r + i);
    }
    dense_lhs = dense_lhs.permute(perm).symmetrize(betas);
    const MinkTensor dense_diff = dense_lhs - inverse_expansion_dense_rhs(r, frame, rep.stated);
    rep.dense_checked = true;
    rep.routes_agree = dense_diff.max_abs() == rep.max_abs_component_diff;
  }
  std::ostringstream note;
  note << "fitted coefficients:";
  for (const auto& c : rep.fitted) note << " " << c;
  rep.note = note.str();
  return rep;
}

namespace {

Rational contraction_prefactor(int p, int s, int c, int d) {
  const int R = 2 * s + c + d;
  return make_rational(double_factorial(2 * s), double_factorial(2 * s - 2 * p)) *
         make_rational(factorial(R - p), factorial(R));
}

}  // namespace

Theorem3Report verify_theorem3(int p, int s, int c, int d, const FrameProjectors& frame) {
  if (p < 0 || s < p || c < 0 || d < 0) throw Error(ErrorKind::domain, "projected contraction needs s >= p >= 0 and c, d >= 0");
  Theorem3Report rep;
  const int R = 2 * s + c + d;
  rep.prefactor = contraction_prefactor(p, s, c, d);
  rep.free_alpha = R - p;
  {
    std::ostringstream os;
    os << "contracted alpha_1..alpha_" << p << "; free gamma_1..gamma_" << p << " and alpha_" << p + 1
       << "..alpha_" << R << " (symmetrized) on both sides";
    rep.index_balance = os.str();
  }

  const Forms Y = vars(kY), Z = vars(kZ);
  const MinkTensor Ku = frame.K_upper();
  // W(z) = sym(K^s V^c U^d) contracted with z in every slot.
  const Poly zz = bilinear(Ku, Z, Z);
  const Poly vz = linear_form(frame.v, Z);
  const Poly uz = linear_form(frame.u, Z);
  const Poly W = zz.pow(s) * vz.pow(c) * uz.pow(d);

  // Left: projector lower slots act as d/dz on W, then (R-p)!/R! restores
  // the contraction of a symmetric tensor.
  const Poly P = polarized_projector(p, frame, vars(kX), Y);
  Poly lhs;
  std::map<Poly::Monomial, Poly> derivs;
  for (const auto& [m, coef] : P.terms()) {
    Poly::Monomial xpart{}, ypart{};
    for (std::size_t i = 0; i < 4; ++i) {
      xpart[kX + i] = m[kX + i];
      ypart[kY + i] = m[kY + i];
    }
    auto it = derivs.find(xpart);
    if (it == derivs.end()) {
      Poly dW = W;
      for (std::size_t i = 0; i < 4; ++i)
        for (int k = 0; k < xpart[kX + i]; ++k) dW = dW.derivative(kZ + i);
      it = derivs.emplace(xpart, std::move(dW)).first;
    }
    Poly ymono = Poly::constant(coef);
    for (std::size_t i = 0; i < 4; ++i) ymono *= Poly::variable(kY + i).pow(ypart[kY + i]);
    lhs += ymono * it->second;
  }
  lhs *= make_rational(factorial(R - p), factorial(R));

  // Right: projector with x -> K z, times (zKz)^{s-p} (V.z)^c (U.z)^d.
  Poly rhs = polarized_projector(p, frame, k_times(Ku, Z), Y) * zz.pow(s - p) * vz.pow(c) * uz.pow(d);
  rhs *= rep.prefactor;

  const Poly diff = lhs - rhs;
  rep.pass = diff.is_zero();
  rep.max_abs_component_diff = max_component(diff);
  if (!rhs.is_zero()) {
    const auto& [m0, c0] = *rhs.terms().begin();
    const Rational ratio = lhs.coeff(m0) / c0;
    if (lhs == rhs * ratio) {
      rep.proportional = true;
      rep.ratio = ratio;
    }
  } else if (lhs.is_zero()) {
    rep.note = "both sides vanish identically";
  }

  if (R <= 7) {
    MinkTensor Wd = MinkTensor::scalar(1);
    for (int i = 0; i < s; ++i) Wd = Wd.outer(Ku);
    for (int i = 0; i < c; ++i) Wd = Wd.outer(frame.v);
    for (int i = 0; i < d; ++i) Wd = Wd.outer(frame.u);
    Wd = Wd.symmetrize();
    const MinkTensor proj = traceless2_projector_dense(p, frame);
    std::vector<std::pair<int, int>> pairs;
    for (int i = 0; i < p; ++i) pairs.emplace_back(i, i);
    const MinkTensor dense_lhs = proj.contract(Wd, pairs);

    MinkTensor tail = MinkTensor::scalar(1);
    for (int i = 0; i < p; ++i) tail = tail.outer(Ku);
    for (int i = 0; i < s - p; ++i) tail = tail.outer(Ku);
    for (int i = 0; i < c; ++i) tail = tail.outer(frame.v);
    for (int i = 0; i < d; ++i) tail = tail.outer(frame.u);
    pairs.clear();
    for (int i = 0; i < p; ++i) pairs.emplace_back(i, 2 * i);
    MinkTensor dense_rhs = proj.contract(tail, pairs);
    std::vector<int> alphas;
    for (int i = p; i < R; ++i) alphas.push_back(i);
    dense_rhs = dense_rhs.symmetrize(alphas) * rep.prefactor;
    const MinkTensor dense_diff = dense_lhs - dense_rhs;
    rep.dense_checked = true;
    rep.routes_agree = dense_diff.max_abs() == rep.max_abs_component_diff;
  }
  return rep;
}

}  // namespace momentwave
