#pragma once

// Monogenic number fields K = Q[x]/(f) with O_K = Z[theta], their elements
// in power-basis coordinates, and archimedean embeddings.

#include <algorithm>
#include <array>
#include <complex>
#include <compare>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <vector>

#include "binform/error.hpp"
#include "binform/integer.hpp"
#include "binform/rational.hpp"

namespace binform {

inline constexpr int kMaxDegree = 8;

// Coordinates with respect to 1, theta, ..., theta^{m-1}; unused slots are 0.
struct FieldElement {
  std::array<i64, kMaxDegree> c{};

  static FieldElement from_int(i64 v) {
    FieldElement e;
    e.c[0] = v;
    return e;
  }
  static FieldElement from_coords(std::span<const i64> v) {
    if (v.size() > static_cast<size_t>(kMaxDegree)) throw Error(ErrorCode::DegreeTooLarge, "too many coordinates");
    FieldElement e;
    std::copy(v.begin(), v.end(), e.c.begin());
    return e;
  }
  bool is_zero() const {
    for (i64 x : c)
      if (x != 0) return false;
    return true;
  }
  i64 operator[](int i) const { return c[i]; }
  i64& operator[](int i) { return c[i]; }

  friend bool operator==(const FieldElement&, const FieldElement&) = default;
  friend auto operator<=>(const FieldElement&, const FieldElement&) = default;
};

struct Place {
  bool real = true;
  std::complex<double> root;  // image of theta; imaginary part > 0 for complex places
  int local_degree() const { return real ? 1 : 2; }
};

struct PrimeTable;

class NumberField {
 public:
  // Builds K from a monic minimal polynomial given by coefficients in
  // increasing degree.  The user asserts monogenicity and class number one;
  // only cheap necessary conditions are checked.
  static NumberField create(const std::vector<i64>& minpoly);

  static NumberField rationals() { return create({0, 1}); }

  int degree() const { return impl_->m; }
  const std::vector<i64>& minpoly() const { return impl_->f; }
  i64 discriminant() const { return impl_->disc; }
  int r1() const { return impl_->r1; }
  int r2() const { return impl_->r2; }
  const std::vector<Place>& places() const { return impl_->places; }
  int num_places() const { return static_cast<int>(impl_->places.size()); }
  double covolume() const { return impl_->covolume; }

  FieldElement one() const { return FieldElement::from_int(1); }
  FieldElement theta() const {
    FieldElement e;
    if (degree() == 1)
      e.c[0] = -impl_->f[0];
    else
      e.c[1] = 1;
    return e;
  }

  FieldElement add(const FieldElement& a, const FieldElement& b) const {
    FieldElement r;
    for (int i = 0; i < degree(); ++i) r.c[i] = checked_add(a.c[i], b.c[i]);
    return r;
  }
  FieldElement sub(const FieldElement& a, const FieldElement& b) const {
    FieldElement r;
    for (int i = 0; i < degree(); ++i) r.c[i] = checked_sub(a.c[i], b.c[i]);
    return r;
  }
  FieldElement neg(const FieldElement& a) const {
    FieldElement r;
    for (int i = 0; i < degree(); ++i) r.c[i] = checked_sub(0, a.c[i]);
    return r;
  }
  FieldElement scale(const FieldElement& a, i64 k) const {
    FieldElement r;
    for (int i = 0; i < degree(); ++i) r.c[i] = checked_mul(a.c[i], k);
    return r;
  }
  FieldElement mul(const FieldElement& a, const FieldElement& b) const {
    const int m = degree();
    if (m == 1) return FieldElement::from_int(checked_mul(a.c[0], b.c[0]));
    std::array<i128, 2 * kMaxDegree> prod{};
    for (int i = 0; i < m; ++i) {
      if (a.c[i] == 0) continue;
      for (int j = 0; j < m; ++j) prod[i + j] += static_cast<i128>(a.c[i]) * b.c[j];
    }
    const auto& f = impl_->f;
    for (int k = 2 * m - 2; k >= m; --k) {
      i128 ck = prod[k];
      if (ck == 0) continue;
      prod[k] = 0;
      for (int j = 0; j < m; ++j) prod[k - m + j] -= ck * f[j];
    }
    FieldElement r;
    for (int i = 0; i < m; ++i) r.c[i] = narrow(prod[i]);
    return r;
  }
  FieldElement pow(FieldElement a, int e) const {
    FieldElement r = one();
    while (e > 0) {
      if (e & 1) r = mul(r, a);
      e >>= 1;
      if (e) a = mul(a, a);
    }
    return r;
  }

  // Columns are the coordinates of a * theta^j.
  std::vector<std::vector<i64>> multiplication_matrix(const FieldElement& a) const {
    const int m = degree();
    std::vector<std::vector<i64>> cols;
    FieldElement cur = a;
    for (int j = 0; j < m; ++j) {
      cols.emplace_back(cur.c.begin(), cur.c.begin() + m);
      if (j + 1 < m) cur = mul(cur, theta());
    }
    return cols;
  }

  BigInt norm_big(const FieldElement& a) const;
  i64 norm(const FieldElement& a) const { return to_i64(norm_big(a)); }
  i64 trace(const FieldElement& a) const {
    auto cols = multiplication_matrix(a);
    i64 t = 0;
    for (int j = 0; j < degree(); ++j) t = checked_add(t, cols[j][j]);
    return t;
  }

  std::complex<double> embed(const FieldElement& a, int place) const {
    const std::complex<double> z = impl_->places[place].root;
    std::complex<double> r = 0;
    for (int i = degree() - 1; i >= 0; --i) r = r * z + static_cast<double>(a.c[i]);
    return r;
  }
  double abs_at(const FieldElement& a, int place) const { return std::abs(embed(a, place)); }

  // Coordinates in K_inf = R^m: (Re) for real places, (Re, Im) for complex.
  std::vector<double> real_coordinates(const FieldElement& a) const {
    std::vector<double> out(degree(), 0.0);
    const auto& M = impl_->emb;
    for (int r = 0; r < degree(); ++r) {
      long double s = 0;
      for (int j = 0; j < degree(); ++j) s += static_cast<long double>(M[r][j]) * a.c[j];
      out[r] = static_cast<double>(s);
    }
    return out;
  }
  // Row-major m x m matrix mapping power-basis coordinates to K_inf.
  const std::vector<std::vector<double>>& embedding_matrix() const { return impl_->emb; }
  const std::vector<std::vector<double>>& inverse_embedding_matrix() const { return impl_->emb_inv; }
  // Index of the first K_inf coordinate belonging to a place.
  int place_offset(int place) const { return impl_->offsets[place]; }

  PrimeTable& prime_table() const;

  bool same_field(const NumberField& o) const { return impl_ == o.impl_ || impl_->f == o.impl_->f; }

  std::string describe() const {
    std::string s = "Q[x]/(";
    bool first = true;
    for (int i = degree(); i >= 0; --i) {
      i64 c = impl_->f[i];
      if (c == 0) continue;
      if (!first) s += c < 0 ? " - " : " + ";
      else if (c < 0) s += "-";
      i64 ac = c < 0 ? -c : c;
      if (ac != 1 || i == 0) s += std::to_string(ac);
      if (i >= 1) s += "x";
      if (i >= 2) s += "^" + std::to_string(i);
      first = false;
    }
    return s + ")";
  }

 private:
  struct Impl {
    int m = 0;
    std::vector<i64> f;
    i64 disc = 0;
    int r1 = 0, r2 = 0;
    std::vector<Place> places;
    std::vector<int> offsets;
    std::vector<std::vector<double>> emb, emb_inv;
    double covolume = 0;
    mutable std::once_flag prime_once;
    mutable std::shared_ptr<PrimeTable> primes;
  };
  std::shared_ptr<Impl> impl_;
};

namespace detail {

inline BigInt bareiss_det(std::vector<std::vector<BigInt>> a) {
  const int n = static_cast<int>(a.size());
  if (n == 0) return 1;
  int sign = 1;
  BigInt prev = 1;
  for (int k = 0; k < n - 1; ++k) {
    if (a[k][k] == 0) {
      int sw = -1;
      for (int i = k + 1; i < n; ++i)
        if (a[i][k] != 0) {
          sw = i;
          break;
        }
      if (sw < 0) return 0;
      std::swap(a[k], a[sw]);
      sign = -sign;
    }
    for (int i = k + 1; i < n; ++i)
      for (int j = k + 1; j < n; ++j) {
        a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]);
        mpz_divexact(a[i][j].get_mpz_t(), a[i][j].get_mpz_t(), prev.get_mpz_t());
      }
    prev = a[k][k];
  }
  return sign * a[n - 1][n - 1];
}

// Resultant of two integer polynomials (coefficients in increasing degree).
inline BigInt resultant_int(const std::vector<i64>& p, const std::vector<i64>& q) {
  const int dp = static_cast<int>(p.size()) - 1, dq = static_cast<int>(q.size()) - 1;
  const int n = dp + dq;
  if (n == 0) return 1;
  std::vector<std::vector<BigInt>> S(n, std::vector<BigInt>(n, 0));
  for (int r = 0; r < dq; ++r)
    for (int i = 0; i <= dp; ++i) S[r][r + i] = big(p[dp - i]);
  for (int r = 0; r < dp; ++r)
    for (int i = 0; i <= dq; ++i) S[dq + r][r + i] = big(q[dq - i]);
  return bareiss_det(S);
}

inline std::vector<std::complex<long double>> poly_roots(const std::vector<i64>& f) {
  using C = std::complex<long double>;
  const int m = static_cast<int>(f.size()) - 1;
  std::vector<C> z(m);
  long double R = 1;
  for (int i = 0; i < m; ++i) R = std::max<long double>(R, 1 + std::fabs(static_cast<long double>(f[i])));
  for (int k = 0; k < m; ++k) {
    long double ang = 2 * 3.14159265358979323846L * k / m + 0.4L;
    z[k] = std::polar(R * 0.9L, ang);
  }
  auto eval = [&](C x, C& d) {
    C v = 0;
    d = 0;
    for (int i = m; i >= 0; --i) {
      d = d * x + v;
      v = v * x + static_cast<long double>(f[i]);
    }
    return v;
  };
  for (int it = 0; it < 2000; ++it) {
    long double worst = 0;
    for (int k = 0; k < m; ++k) {
      C d;
      C v = eval(z[k], d);
      if (v == C(0)) continue;
      C ratio = v / d;
      C s = 0;
      for (int j = 0; j < m; ++j)
        if (j != k) s += C(1) / (z[k] - z[j]);
      C w = ratio / (C(1) - ratio * s);
      z[k] -= w;
      worst = std::max(worst, std::abs(w) / (1 + std::abs(z[k])));
    }
    if (worst < 1e-17L) break;
  }
  for (int k = 0; k < m; ++k) {
    for (int it = 0; it < 3; ++it) {
      C d;
      C v = eval(z[k], d);
      if (d != C(0)) z[k] -= v / d;
    }
  }
  return z;
}

inline std::vector<std::vector<double>> invert(const std::vector<std::vector<double>>& a) {
  const int n = static_cast<int>(a.size());
  std::vector<std::vector<long double>> m(n, std::vector<long double>(2 * n, 0));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) m[i][j] = a[i][j];
    m[i][n + i] = 1;
  }
  for (int c = 0; c < n; ++c) {
    int best = c;
    for (int r = c + 1; r < n; ++r)
      if (std::fabs(m[r][c]) > std::fabs(m[best][c])) best = r;
    std::swap(m[c], m[best]);
    long double piv = m[c][c];
    for (auto& x : m[c]) x /= piv;
    for (int r = 0; r < n; ++r) {
      if (r == c) continue;
      long double fct = m[r][c];
      if (fct == 0) continue;
      for (int j = 0; j < 2 * n; ++j) m[r][j] -= fct * m[c][j];
    }
  }
  std::vector<std::vector<double>> out(n, std::vector<double>(n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) out[i][j] = static_cast<double>(m[i][n + j]);
  return out;
}

inline double determinant(std::vector<std::vector<double>> a) {
  const int n = static_cast<int>(a.size());
  long double det = 1;
  std::vector<std::vector<long double>> m(n, std::vector<long double>(n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m[i][j] = a[i][j];
  for (int c = 0; c < n; ++c) {
    int best = c;
    for (int r = c + 1; r < n; ++r)
      if (std::fabs(m[r][c]) > std::fabs(m[best][c])) best = r;
    if (m[best][c] == 0) return 0;
    if (best != c) {
      std::swap(m[c], m[best]);
      det = -det;
    }
    det *= m[c][c];
    for (int r = c + 1; r < n; ++r) {
      long double fct = m[r][c] / m[c][c];
      for (int j = c; j < n; ++j) m[r][j] -= fct * m[c][j];
    }
  }
  return static_cast<double>(det);
}

}  // namespace detail

inline NumberField NumberField::create(const std::vector<i64>& minpoly) {
  if (minpoly.size() < 2) throw Error(ErrorCode::NonMonic, "minimal polynomial must have degree >= 1");
  if (minpoly.back() != 1) throw Error(ErrorCode::NonMonic, "leading coefficient must be 1");
  const int m = static_cast<int>(minpoly.size()) - 1;
  if (m > kMaxDegree) throw Error(ErrorCode::DegreeTooLarge, "degree above " + std::to_string(kMaxDegree));

  auto impl = std::make_shared<Impl>();
  impl->m = m;
  impl->f = minpoly;

  std::vector<i64> deriv(m);
  for (int i = 1; i <= m; ++i) deriv[i - 1] = checked_mul(minpoly[i], i);
  BigInt res = m == 1 ? BigInt(1) : detail::resultant_int(minpoly, deriv);
  if ((static_cast<long>(m) * (m - 1) / 2) % 2 == 1) res = -res;
  if (res == 0) throw Error(ErrorCode::ZeroDiscriminant, "repeated roots");
  impl->disc = to_i64(res);

  if (m >= 2) {
    i64 c0 = minpoly[0];
    if (c0 == 0) throw Error(ErrorCode::RationalRootFound, "root 0");
    auto fac = Factorizer::shared()->factor(static_cast<u64>(iabs(c0)));
    std::vector<i64> divisors{1};
    for (auto [p, e] : fac) {
      size_t n = divisors.size();
      i64 pk = 1;
      for (int k = 1; k <= e; ++k) {
        pk *= static_cast<i64>(p);
        for (size_t i = 0; i < n; ++i) divisors.push_back(divisors[i] * pk);
      }
    }
    for (i64 d : divisors) {
      for (i64 r : {d, -d}) {
        i128 v = 0;
        for (int i = m; i >= 0; --i) {
          v = v * r + minpoly[i];
          if (v > static_cast<i128>(1) << 100 || v < -(static_cast<i128>(1) << 100)) break;
        }
        if (v == 0) throw Error(ErrorCode::RationalRootFound, "root " + std::to_string(r));
      }
    }
  }

  auto roots = detail::poly_roots(minpoly);
  std::vector<double> reals;
  std::vector<std::complex<double>> complexes;
  for (auto z : roots) {
    long double scale = 1 + std::abs(z);
    if (std::fabs(z.imag()) <= 1e-9L * scale)
      reals.push_back(static_cast<double>(z.real()));
    else if (z.imag() > 0)
      complexes.emplace_back(static_cast<double>(z.real()), static_cast<double>(z.imag()));
  }
  std::sort(reals.begin(), reals.end());
  std::sort(complexes.begin(), complexes.end(), [](auto a, auto b) {
    return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
  });
  if (static_cast<int>(reals.size() + 2 * complexes.size()) != m)
    throw Error(ErrorCode::ZeroDiscriminant, "could not separate the roots of the minimal polynomial");
  impl->r1 = static_cast<int>(reals.size());
  impl->r2 = static_cast<int>(complexes.size());
  for (double r : reals) impl->places.push_back({true, {r, 0.0}});
  for (auto z : complexes) impl->places.push_back({false, z});

  impl->emb.assign(m, std::vector<double>(m, 0));
  int row = 0;
  for (const auto& pl : impl->places) {
    impl->offsets.push_back(row);
    std::complex<long double> z(pl.root.real(), pl.root.imag()), pw = 1;
    for (int j = 0; j < m; ++j) {
      impl->emb[row][j] = static_cast<double>(pw.real());
      if (!pl.real) impl->emb[row + 1][j] = static_cast<double>(pw.imag());
      pw *= z;
    }
    row += pl.local_degree();
  }
  impl->emb_inv = detail::invert(impl->emb);
  impl->covolume = std::fabs(detail::determinant(impl->emb));

  NumberField K;
  K.impl_ = std::move(impl);
  return K;
}

inline BigInt NumberField::norm_big(const FieldElement& a) const {
  const int m = degree();
  if (m == 1) return big(a.c[0]);
  if (m == 2) {
    // N(a0 + a1 theta) with theta^2 + c1 theta + c0 = 0.
    BigInt a0 = big(a.c[0]), a1 = big(a.c[1]);
    return a0 * a0 - a0 * a1 * big(impl_->f[1]) + a1 * a1 * big(impl_->f[0]);
  }
  auto cols = multiplication_matrix(a);
  std::vector<std::vector<BigInt>> M(m, std::vector<BigInt>(m));
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) M[i][j] = big(cols[j][i]);
  return detail::bareiss_det(M);
}

}  // namespace binform
