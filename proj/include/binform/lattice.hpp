#pragma once

// Congruence lattices {(s, t) in a^2 : s = gamma t mod d} inside
// K_inf^2 = R^{2m}, their successive minima, and point counts in regions.
//
// Integer coordinates of a pair (s, t) are the power-basis coordinates of s
// followed by those of t; real coordinates are real_coordinates(s) followed
// by real_coordinates(t).

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <optional>
#include <vector>

#include "binform/divisor.hpp"

namespace binform {

// A bounded region of R^{2m}: an outer box plus a membership predicate.
struct Region {
  std::vector<double> lo, hi;
  std::function<bool(std::span<const double>)> contains;
  double volume = std::numeric_limits<double>::quiet_NaN();

  int dim() const { return static_cast<int>(lo.size()); }
  bool bounded() const {
    for (size_t i = 0; i < lo.size(); ++i)
      if (!std::isfinite(lo[i]) || !std::isfinite(hi[i])) return false;
    return !lo.empty();
  }

  static Region ball(std::vector<double> center, double radius) {
    Region r;
    const int n = static_cast<int>(center.size());
    for (int i = 0; i < n; ++i) {
      r.lo.push_back(center[i] - radius);
      r.hi.push_back(center[i] + radius);
    }
    r.contains = [center, radius](std::span<const double> x) {
      double d = 0;
      for (size_t i = 0; i < center.size(); ++i) d += (x[i] - center[i]) * (x[i] - center[i]);
      return d <= radius * radius * (1 + kBoundaryGuard);
    };
    r.volume = std::pow(std::numbers::pi, n / 2.0) / std::tgamma(n / 2.0 + 1) * std::pow(radius, n);
    return r;
  }

  static Region box(std::vector<double> center, std::vector<double> half) {
    Region r;
    r.volume = 1;
    for (size_t i = 0; i < center.size(); ++i) {
      r.lo.push_back(center[i] - half[i]);
      r.hi.push_back(center[i] + half[i]);
      r.volume *= 2 * half[i];
    }
    auto lo = r.lo, hi = r.hi;
    r.contains = [lo, hi](std::span<const double> x) {
      for (size_t i = 0; i < lo.size(); ++i) {
        double slack = kBoundaryGuard * (1 + std::fabs(lo[i]) + std::fabs(hi[i]));
        if (x[i] < lo[i] - slack || x[i] > hi[i] + slack) return false;
      }
      return true;
    };
    return r;
  }
};

inline std::vector<double> pair_coordinates(const NumberField& K, const FieldElement& s, const FieldElement& t) {
  auto a = K.real_coordinates(s);
  auto b = K.real_coordinates(t);
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

class CongruenceLattice {
 public:
  static CongruenceLattice create(const NumberField& K, const Ideal& a, const Ideal& d, const FieldElement& gamma) {
    const int m = K.degree();
    CongruenceLattice L;
    L.K_ = K;
    L.a_ = a;
    L.d_ = d;
    L.gamma_ = ideal_reduce(K, d, gamma);
    Ideal ad = ideal_intersect(K, a, d);
    std::vector<std::vector<i64>> gens;
    for (int k = 0; k < m; ++k) {
      FieldElement ak = column_element(a, k);
      FieldElement gk = ideal_reduce(K, ad, K.mul(L.gamma_, ak));
      std::vector<i64> v(2 * m);
      for (int i = 0; i < m; ++i) {
        v[i] = gk.c[i];
        v[m + i] = ak.c[i];
      }
      gens.push_back(v);
    }
    for (int k = 0; k < m; ++k) {
      FieldElement uk = column_element(ad, k);
      std::vector<i64> v(2 * m, 0);
      for (int i = 0; i < m; ++i) v[i] = uk.c[i];
      gens.push_back(v);
    }
    L.hnf_ = hnf_mod(2 * m, gens, ad.norm());
    L.index_ = checked_mul(a.norm(), ad.norm());
    return L;
  }

  const NumberField& field() const { return K_; }
  const Ideal& a() const { return a_; }
  const Ideal& d() const { return d_; }
  const FieldElement& gamma() const { return gamma_; }
  const Hnf& hnf() const { return hnf_; }
  int dim() const { return 2 * K_.degree(); }
  // Index in O_K^2, equal to N(a^2 d (a + d)^{-1}).
  i64 index() const { return index_; }
  double determinant() const { return K_.covolume() * K_.covolume() * static_cast<double>(index_); }

  bool contains(const FieldElement& s, const FieldElement& t) const {
    return ideal_contains(K_, a_, s) && ideal_contains(K_, a_, t) && ideal_contains(K_, d_, K_.sub(s, K_.mul(gamma_, t)));
  }

  Point point_of(std::span<const i64> v) const {
    const int m = K_.degree();
    return {FieldElement::from_coords(v.subspan(0, m)), FieldElement::from_coords(v.subspan(m, m))};
  }

  // Embedded basis: column j is the image of HNF column j in R^{2m}.
  std::vector<std::vector<double>> basis() const {
    const int n = dim();
    std::vector<std::vector<double>> B(n, std::vector<double>(n));
    for (int j = 0; j < n; ++j) {
      auto p = point_of(hnf_.column(j));
      auto x = pair_coordinates(K_, p.s, p.t);
      for (int i = 0; i < n; ++i) B[i][j] = x[i];
    }
    return B;
  }

 private:
  NumberField K_;
  Ideal a_, d_;
  FieldElement gamma_;
  Hnf hnf_;
  i64 index_ = 0;
};

namespace detail {

// Integer matrix A with |x|^2 = c^T A c for power-basis coordinates c, when
// the trace-like form is integral.
inline std::optional<std::vector<std::vector<i64>>> integral_norm_form(const NumberField& K) {
  const int m = K.degree();
  const auto& M = K.embedding_matrix();
  std::vector<std::vector<i64>> A(m, std::vector<i64>(m));
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      long double s = 0;
      for (int k = 0; k < m; ++k) s += static_cast<long double>(M[k][i]) * M[k][j];
      long double r = std::round(s);
      if (std::fabs(s - r) > 1e-9L * (1 + std::fabs(s))) return std::nullopt;
      A[i][j] = static_cast<i64>(r);
    }
  return A;
}

// Rank-tracking echelon form over Q.
class Echelon {
 public:
  explicit Echelon(int n) : n_(n) {}
  int rank() const { return static_cast<int>(rows_.size()); }
  // Adds v if it is independent of the stored rows.
  bool add(std::span<const i64> v) {
    std::vector<Rational> x(v.begin(), v.end());
    for (size_t r = 0; r < rows_.size(); ++r) {
      int p = piv_[r];
      if (x[p] == 0) continue;
      Rational f = x[p] / rows_[r][p];
      for (int i = 0; i < n_; ++i) x[i] -= f * rows_[r][i];
    }
    for (int i = 0; i < n_; ++i)
      if (x[i] != 0) {
        rows_.push_back(std::move(x));
        piv_.push_back(i);
        return true;
      }
    return false;
  }

 private:
  int n_;
  std::vector<std::vector<Rational>> rows_;
  std::vector<int> piv_;
};

}  // namespace detail

struct LatticeVector {
  std::vector<i64> coords;  // integer coordinates in O_K^2
  long double norm2 = 0;
  i128 norm2_exact = 0;  // valid when the minima are exact
};

struct MinimaVector {
  std::vector<double> values;
  std::vector<LatticeVector> witnesses;
  bool exact = false;
};

// All nonzero lattice vectors of squared length at most bound, one per +-pair
// (normalized so the last nonzero coordinate is positive).
inline std::vector<LatticeVector> short_vectors(const CongruenceLattice& L, long double bound, size_t cap = 5'000'000) {
  const auto& K = L.field();
  const int m = K.degree(), n = 2 * m;
  const Hnf& H = L.hnf();
  auto A = detail::integral_norm_form(K);
  const auto& M = K.embedding_matrix();
  // Real Gram matrix of the coordinate space, block diagonal.
  std::vector<std::vector<long double>> Gc(n, std::vector<long double>(n, 0));
  for (int b = 0; b < 2; ++b)
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) {
        long double s = 0;
        for (int k = 0; k < m; ++k) s += static_cast<long double>(M[k][i]) * M[k][j];
        Gc[b * m + i][b * m + j] = s;
      }
  // Gram matrix of the HNF basis.
  std::vector<std::vector<long double>> Q(n, std::vector<long double>(n, 0));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      long double s = 0;
      for (int p = 0; p < n; ++p)
        for (int q = 0; q < n; ++q) s += static_cast<long double>(H.at(p, i)) * Gc[p][q] * H.at(q, j);
      Q[i][j] = s;
    }
  // q_ii and mu_ij with x^T Q x = sum_i q_ii (x_i + sum_{j > i} mu_ij x_j)^2.
  std::vector<std::vector<long double>> mu(n, std::vector<long double>(n, 0));
  std::vector<long double> qd(n);
  {
    auto R = Q;
    for (int i = 0; i < n; ++i) {
      qd[i] = R[i][i];
      if (!(qd[i] > 0)) throw Error(ErrorCode::BadLattice, "degenerate Gram matrix");
      for (int j = i + 1; j < n; ++j) mu[i][j] = R[i][j] / qd[i];
      for (int k = i + 1; k < n; ++k)
        for (int j = k; j < n; ++j) R[k][j] -= mu[i][k] * R[i][j];
    }
  }
  auto exact_norm = [&](const std::vector<i64>& v) -> i128 {
    i128 s = 0;
    for (int b = 0; b < 2; ++b)
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) s += static_cast<i128>(v[b * m + i]) * (*A)[i][j] * v[b * m + j];
    return s;
  };
  auto real_norm = [&](const std::vector<i64>& v) -> long double {
    long double s = 0;
    for (int p = 0; p < n; ++p)
      for (int q = 0; q < n; ++q) s += static_cast<long double>(v[p]) * Gc[p][q] * v[q];
    return s;
  };

  std::vector<LatticeVector> out;
  std::vector<i64> x(n, 0);
  const long double limit = bound * (1 + 1e-12L) + 1e-12L;
  std::function<void(int, long double)> rec = [&](int i, long double used) {
    if (i < 0) {
      bool zero = std::all_of(x.begin(), x.end(), [](i64 c) { return c == 0; });
      if (zero) return;
      std::vector<i64> v(n, 0);
      for (int j = 0; j < n; ++j)
        for (int p = j; p < n; ++p) v[p] = checked_add(v[p], checked_mul(H.at(p, j), x[j]));
      int last = n - 1;
      while (last >= 0 && v[last] == 0) --last;
      if (v[last] < 0) return;  // keep one vector of each +- pair
      LatticeVector lv;
      lv.coords = v;
      if (A) {
        lv.norm2_exact = exact_norm(v);
        lv.norm2 = static_cast<long double>(lv.norm2_exact);
        if (lv.norm2 > bound) return;
      } else {
        lv.norm2 = real_norm(v);
        if (lv.norm2 > limit) return;
      }
      if (out.size() >= cap) throw Error(ErrorCode::TooLarge, "too many short vectors");
      out.push_back(std::move(lv));
      return;
    }
    long double c = 0;
    for (int j = i + 1; j < n; ++j) c -= mu[i][j] * x[j];
    long double rem = limit - used;
    if (rem < 0) return;
    long double w = std::sqrt(rem / qd[i]);
    i64 lo = static_cast<i64>(std::ceil(c - w - 1e-9L)), hi = static_cast<i64>(std::floor(c + w + 1e-9L));
    for (i64 k = lo; k <= hi; ++k) {
      x[i] = k;
      long double dlt = (k - c);
      long double nu = used + qd[i] * dlt * dlt;
      if (nu <= limit + 1e-9L * (1 + limit)) rec(i - 1, nu);
    }
    x[i] = 0;
  };
  rec(n - 1, 0);
  return out;
}

inline bool lattice_vector_less(const LatticeVector& a, const LatticeVector& b, bool exact) {
  if (exact) {
    if (a.norm2_exact != b.norm2_exact) return a.norm2_exact < b.norm2_exact;
  } else {
    long double tol = 1e-12L * std::max<long double>(1, std::max(a.norm2, b.norm2));
    if (std::fabs(a.norm2 - b.norm2) > tol) return a.norm2 < b.norm2;
  }
  return a.coords < b.coords;
}

inline MinimaVector successive_minima(const CongruenceLattice& L) {
  if (static_cast<double>(L.index()) > 1e8) throw Error(ErrorCode::TooLarge, "lattice determinant above 1e8");
  const int n = L.dim();
  const bool exact = detail::integral_norm_form(L.field()).has_value();
  // Start at the Minkowski-scale radius and double until n independent
  // vectors appear.
  long double bound = std::pow(static_cast<long double>(L.determinant()), 2.0L / n);
  bound = std::max<long double>(bound, 1);
  for (;;) {
    auto vs = short_vectors(L, bound);
    std::sort(vs.begin(), vs.end(), [&](const auto& a, const auto& b) { return lattice_vector_less(a, b, exact); });
    detail::Echelon ech(n);
    MinimaVector mv;
    mv.exact = exact;
    for (auto& v : vs) {
      if (!ech.add(v.coords)) continue;
      mv.values.push_back(static_cast<double>(std::sqrt(v.norm2)));
      mv.witnesses.push_back(std::move(v));
      if (ech.rank() == n) return mv;
    }
    bound *= 2;
  }
}

struct MinimaInequalityReport {
  bool monotone = true;
  std::vector<double> base, refined, ratios;
};

// Compares the minima of Lambda(a, d, gamma) and Lambda(a, b d, gamma).
inline MinimaInequalityReport minima_inequality_report(const NumberField& K, const Ideal& a, const Ideal& d, const Ideal& b,
                                                       const FieldElement& gamma) {
  auto L1 = CongruenceLattice::create(K, a, d, gamma);
  auto L2 = CongruenceLattice::create(K, a, ideal_mul(K, b, d), gamma);
  auto m1 = successive_minima(L1), m2 = successive_minima(L2);
  MinimaInequalityReport rep;
  rep.base = m1.values;
  rep.refined = m2.values;
  const double scale = std::pow(static_cast<double>(b.norm()), 1.0 / K.degree());
  for (size_t i = 0; i < m1.values.size(); ++i) {
    bool le = m1.exact ? m1.witnesses[i].norm2_exact <= m2.witnesses[i].norm2_exact
                       : m1.witnesses[i].norm2 <= m2.witnesses[i].norm2 * (1 + 1e-12L);
    rep.monotone &= le;
    rep.ratios.push_back(m2.values[i] / (scale * m1.values[i]));
  }
  return rep;
}

// ---------------------------------------------------------------------------

namespace detail {

// Integer coordinate bounds for points of base + L whose real coordinates
// lie in the region's outer box.
inline std::pair<std::vector<i64>, std::vector<i64>> integer_box(const NumberField& K, const Region& R) {
  const int m = K.degree();
  const auto& Minv = K.inverse_embedding_matrix();
  std::vector<i64> lo(2 * m), hi(2 * m);
  for (int b = 0; b < 2; ++b)
    for (int j = 0; j < m; ++j) {
      long double mn = 0, mx = 0;
      for (int k = 0; k < m; ++k) {
        long double c = Minv[j][k];
        long double u = c * R.lo[b * m + k], v = c * R.hi[b * m + k];
        mn += std::min(u, v);
        mx += std::max(u, v);
      }
      long double slack = 1e-7L * (1 + std::fabs(mn) + std::fabs(mx));
      lo[b * m + j] = static_cast<i64>(std::floor(mn - slack));
      hi[b * m + j] = static_cast<i64>(std::ceil(mx + slack));
    }
  return {lo, hi};
}

}  // namespace detail

// Visits the points of base + L inside the region (base in integer
// coordinates).
template <class Visit>
void for_each_lattice_point(const CongruenceLattice& L, std::span<const i64> base, const Region& R, Visit&& visit) {
  if (!R.bounded()) throw Error(ErrorCode::Unbounded, "region must be bounded");
  const auto& K = L.field();
  auto [lo, hi] = detail::integer_box(K, R);
  enumerate_coset(L.hnf(), base, lo, hi, [&](std::span<const i64> v) {
    Point p = L.point_of(v);
    auto x = pair_coordinates(K, p.s, p.t);
    if (R.contains(x)) visit(p);
  });
}

inline i64 count_points(const CongruenceLattice& L, const Region& R) {
  std::vector<i64> zero(L.dim(), 0);
  i64 c = 0;
  for_each_lattice_point(L, zero, R, [&](const Point&) { ++c; });
  return c;
}

inline double lattice_constant(const NumberField& K) { return 1.0 / (K.covolume() * K.covolume()); }

inline double main_term(const CongruenceLattice& L, const Region& R) {
  if (!std::isfinite(R.volume)) throw Error(ErrorCode::Unbounded, "region volume unknown");
  return lattice_constant(L.field()) * R.volume / static_cast<double>(L.index());
}

// zeta_K(2) from the Euler product over rational primes up to a bound.
inline double dedekind_zeta2(const NumberField& K, i64 prime_bound = 100000) {
  static std::mutex mu;
  static std::map<std::pair<std::vector<i64>, i64>, double> cache;
  {
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find({K.minpoly(), prime_bound});
    if (it != cache.end()) return it->second;
  }
  long double z = 1;
  for (i64 p : primes_up_to(prime_bound))
    for (const auto& P : *primes_above(K, p)) {
      long double q = static_cast<long double>(P->norm);
      z /= 1 - 1 / (q * q);
    }
  std::lock_guard<std::mutex> lock(mu);
  cache[{K.minpoly(), prime_bound}] = static_cast<double>(z);
  return static_cast<double>(z);
}

// Primitive points of a congruence class:
// {(s, t) in r^2 : (s, t) = (sigma, tau) mod a, sO + tO = r, s = gamma t mod d},
// for r | a, a + d = O_K and sigma O + tau O + a = r.
class StarLattice {
 public:
  static StarLattice create(const NumberField& K, const Ideal& a, const FieldElement& sigma, const FieldElement& tau,
                            const Ideal& d, const FieldElement& gamma, const Ideal& r) {
    if (!ideal_divides(r, a)) throw Error(ErrorCode::PreconditionFailed, "r must divide a");
    if (!ideals_coprime(K, a, d)) throw Error(ErrorCode::PreconditionFailed, "a and d must be coprime");
    if (!(ideal_sum(K, ideal_from_generators(K, {sigma, tau}), a) == r))
      throw Error(ErrorCode::PreconditionFailed, "sigma O + tau O + a must equal r");
    StarLattice S{CongruenceLattice::create(K, a, d, gamma)};
    S.r_ = r;
    S.r_fac_ = factor_ideal(K, r);
    S.sigma_ = sigma;
    S.tau_ = tau;
    // s0 = sigma mod a, s0 = gamma tau mod d.
    auto s0 = crt_combine(K, {{sigma, a}, {K.mul(gamma, tau), d}}).value;
    const int m = K.degree();
    S.base_.assign(2 * m, 0);
    for (int i = 0; i < m; ++i) {
      S.base_[i] = s0.c[i];
      S.base_[m + i] = tau.c[i];
    }
    return S;
  }

  const CongruenceLattice& lattice() const { return L_; }
  std::span<const i64> base() const { return base_; }

  bool primitive(const Point& p) const {
    const auto& K = L_.field();
    if (K.degree() == 1) return std::gcd(p.s.c[0], p.t.c[0]) == r_.hnf.pivot(0);
    if (p.s.is_zero() && p.t.is_zero()) return false;
    return ideal_from_generators(K, {p.s, p.t}) == r_;
  }

  template <class Visit>
  void for_each(const Region& R, Visit&& visit) const {
    for_each_lattice_point(L_, base_, R, [&](const Point& p) {
      if (primitive(p)) visit(p);
    });
  }

  i64 count(const Region& R) const {
    i64 c = 0;
    for_each(R, [&](const Point&) { ++c; });
    return c;
  }

  double main_term(const Region& R) const {
    const auto& K = L_.field();
    if (!std::isfinite(R.volume)) throw Error(ErrorCode::Unbounded, "region volume unknown");
    const Ideal& a = L_.a();
    const Ideal& d = L_.d();
    long double v = lattice_constant(K) * R.volume / dedekind_zeta2(K);
    v /= static_cast<long double>(d.norm()) * a.norm() * a.norm();
    Factorization fa = factor_ideal(K, a);
    for (const auto& [P, k] : fa.parts)
      if (k > r_fac_.exponent(*P)) v /= 1 - 1.0L / (static_cast<long double>(P->norm) * P->norm);
    for (const auto& [P, k] : factor_ideal(K, d).parts) v /= 1 + 1.0L / P->norm;
    return static_cast<double>(v);
  }

 private:
  explicit StarLattice(CongruenceLattice L) : L_(std::move(L)) {}
  CongruenceLattice L_;
  Ideal r_;
  Factorization r_fac_;
  FieldElement sigma_, tau_;
  std::vector<i64> base_;
};

}  // namespace binform
