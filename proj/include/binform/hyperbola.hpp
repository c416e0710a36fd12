#pragma once

// The hyperbola split of the divisor sum: bounds Y_i, the partial divisor
// sums r_i^- and r_i^+, the regions D_psi, and the sums S_psi computed
// point by point and through congruence lattices.

#include <atomic>
#include <functional>
#include <mutex>
#include <set>
#include <thread>

#include "binform/divisor.hpp"
#include "binform/lattice.hpp"
#include "binform/roots.hpp"

namespace binform {

struct PsiVector {
  std::vector<int> bits;

  static std::vector<PsiVector> all(int n) {
    std::vector<PsiVector> out;
    for (int mask = 0; mask < (1 << n); ++mask) {
      PsiVector p;
      for (int i = 0; i < n; ++i) p.bits.push_back((mask >> i) & 1);
      out.push_back(std::move(p));
    }
    return out;
  }
  std::string str() const {
    std::string s;
    for (int b : bits) s += static_cast<char>('0' + b);
    return s;
  }
};

namespace detail {

// A rational no smaller than x, for values carrying relative error below 1e-12.
inline Rational upper_rational(double x) { return Rational(std::nextafter(x * (1 + 1e-12), INFINITY)); }

inline Rational to_rational(double x) { return Rational(x); }

// Largest integer n >= 0 with n < y.
inline i64 largest_below(const Rational& y) {
  if (y <= 0) return -1;
  BigInt q = y.get_num() / y.get_den();
  if (Rational(q) == y) q -= 1;
  return q.fits_slong_p() ? q.get_si() : INT64_MAX / 4;
}

// Largest integer n >= 0 with n^2 < y.
inline i64 largest_below_sqrt(const Rational& y) {
  if (y <= 0) return -1;
  i64 n = static_cast<i64>(std::sqrt(y.get_d()));
  while (n > 0 && Rational(big(n) * big(n)) >= y) --n;
  while (Rational(big(n + 1) * big(n + 1)) < y) ++n;
  return n;
}

inline BigInt abs_norm(const NumberField& K, const FieldElement& x) {
  if (K.degree() == 1) return abs(big(x.c[0]));
  return abs(K.norm_big(x));
}

inline std::vector<std::tuple<i64, int, int>> fac_key(const Factorization& f) {
  std::vector<std::tuple<i64, int, int>> key;
  for (const auto& [P, k] : f.parts) key.emplace_back(P->p, P->index, k);
  std::sort(key.begin(), key.end());
  return key;
}

inline bool fac_has(const Factorization& f, const PrimeIdeal& P) { return f.exponent(P) > 0; }

}  // namespace detail

class HyperbolaContext {
 public:
  const FormSystem& system() const { return S_; }
  const MultiplicativeSpec& spec() const { return f_; }
  const Triplet& triplet() const { return T_; }
  double X() const { return X_; }
  int size() const { return S_.size(); }

  // w_i: the part of F_i(sigma, tau) supported on the primes of w.
  const Factorization& w_factorization(int i) const { return w_[i]; }
  Ideal w(int i) const { return ideal_from_factorization(S_.field(), w_[i]); }
  i64 w_norm(int i) const { return w_norm_[i]; }
  const Rational& c(int i) const { return c_[i]; }
  const Rational& Y(int i) const { return Y_[i]; }
  int c_doublings() const { return doublings_; }

  // Whether every leading coefficient F_i(1, 0) is non-zero with all its
  // primes dividing w, which the lattice route needs.
  bool lattice_ready() const { return lattice_ready_; }

  // n < sqrt(Y_i).
  bool below_sqrt_Y(int i, const BigInt& n) const { return Rational(n * n) < Y_[i]; }
  // N F >= v sqrt(Y_i) N w_i, for N F, v >= 0.
  bool above_threshold(int i, const BigInt& nf, const Rational& v) const {
    return Rational(nf * nf) >= v * v * Y_[i] * Rational(big(w_norm_[i]) * big(w_norm_[i]));
  }

  struct RootCache {
    std::mutex mu;
    std::map<std::pair<int, std::vector<std::tuple<i64, int, int>>>, std::shared_ptr<const std::vector<FieldElement>>> roots;
  };
  // Roots of F_i(x, 1) modulo d, shared across calls.
  std::shared_ptr<const std::vector<FieldElement>> roots(int i, const Factorization& d) const {
    auto key = std::make_pair(i, detail::fac_key(d));
    {
      std::lock_guard<std::mutex> lock(cache_->mu);
      auto it = cache_->roots.find(key);
      if (it != cache_->roots.end()) return it->second;
    }
    auto r = std::make_shared<const std::vector<FieldElement>>(roots_mod_ideal(S_.field(), S_.pair(i).F, d));
    std::lock_guard<std::mutex> lock(cache_->mu);
    cache_->roots.emplace(key, r);
    return r;
  }

  // The same context at a larger X, with Y_i = c_i X^deg F_i and the
  // constants c_i carried over; points are not re-verified at the new X.
  HyperbolaContext scaled_to(double X) const {
    if (!(X >= 1)) throw Error(ErrorCode::DomainError, "X must be at least 1");
    HyperbolaContext r = *this;
    r.X_ = X;
    const Rational Xq = detail::to_rational(X);
    for (int i = 0; i < size(); ++i) {
      r.Y_[i] = c_[i];
      for (int k = 0; k < S_.pair(i).F.degree(); ++k) r.Y_[i] *= Xq;
    }
    return r;
  }
  // The X at which admissibility and the bounds Y_i were checked.
  double verified_X() const { return verified_X_; }

  friend HyperbolaContext make_context(const FormSystem& S, const MultiplicativeSpec& f, const Triplet& T, double X);

 private:
  HyperbolaContext(FormSystem S, MultiplicativeSpec f, Triplet T, double X)
      : S_(std::move(S)), f_(std::move(f)), T_(std::move(T)), X_(X), verified_X_(X),
        cache_(std::make_shared<RootCache>()) {}

  FormSystem S_;
  MultiplicativeSpec f_;
  Triplet T_;
  double X_;
  double verified_X_;
  std::vector<Factorization> w_;
  std::vector<i64> w_norm_;
  std::vector<Rational> c_, Y_;
  int doublings_ = 0;
  bool lattice_ready_ = true;
  std::shared_ptr<RootCache> cache_;
};

namespace detail {

// prod_v (sum_j |a_j|_v R_v^d)^{m_v}, with R_v = max(|s center|, |t center|) + radius.
inline Rational coefficient_bound(const NumberField& K, const BinaryForm& F, const Triplet& T) {
  Rational total = 1;
  const int d = F.degree();
  for (int v = 0; v < K.num_places(); ++v) {
    const auto& b = T.balls()[v];
    const int ld = K.places()[v].local_degree();
    auto center_abs = [&](int which) {
      if (ld == 1) return to_rational(std::fabs(b.center[which]));
      double re = b.center[2 * which], im = b.center[2 * which + 1];
      if (re == 0 || im == 0) return to_rational(std::fabs(re) + std::fabs(im));
      return upper_rational(std::hypot(re, im));
    };
    Rational R = std::max(center_abs(0), center_abs(1)) + to_rational(b.radius);
    Rational Rd = 1;
    for (int k = 0; k < d; ++k) Rd *= R;
    Rational sum = 0;
    for (const auto& a : F.coeffs) {
      bool rational = true;
      for (int j = 1; j < K.degree(); ++j) rational = rational && a.c[j] == 0;
      sum += rational ? Rational(abs(big(a.c[0]))) : upper_rational(K.abs_at(a, v));
    }
    Rational term = sum * Rd;
    for (int k = 0; k < ld; ++k) total *= term;
  }
  return total;
}

}  // namespace detail

inline HyperbolaContext make_context(const FormSystem& S, const MultiplicativeSpec& f, const Triplet& T, double X) {
  if (!(X >= 1)) throw Error(ErrorCode::DomainError, "X must be at least 1");
  auto rep = check_strongly_admissible(S, T, X);
  if (!rep.ok(true)) throw Error(ErrorCode::StrongAdmissibilityFailed, rep.failure);
  const auto& K = S.field();
  HyperbolaContext ctx(S, f, T, X);
  PointAnalyzer A(ctx.S_, ctx.T_);
  const Rational Xq = detail::to_rational(X);
  for (int i = 0; i < S.size(); ++i) {
    Factorization wi;
    const auto& wf = T.w_factorization();
    for (size_t k = 0; k < wf.parts.size(); ++k)
      if (A.base_valuations(i)[k] > 0) wi.parts.emplace_back(wf.parts[k].first, A.base_valuations(i)[k]);
    ctx.w_norm_.push_back(wi.norm());
    ctx.w_.push_back(std::move(wi));
    const auto& F = S.pair(i).F;
    Rational c = detail::coefficient_bound(K, F, T) / ctx.w_norm_.back();
    Rational Y = c;
    for (int k = 0; k < F.degree(); ++k) Y *= Xq;
    ctx.c_.push_back(c);
    ctx.Y_.push_back(Y);

    const FieldElement& lead = F.leading();
    if (lead.is_zero()) {
      ctx.lattice_ready_ = false;
    } else {
      for (const auto& [P, k] : factor_element(K, lead).parts)
        if (wf.exponent(*P) == 0) ctx.lattice_ready_ = false;
    }
  }
  // The bound is rigorous up to the boundary guard; double c_i if a point
  // reaches it anyway.
  std::vector<PairAtPoint> data;
  for_each_point(ctx.T_, X, [&](const Point& pt) {
    if (!A.analyze(pt.s, pt.t, data)) return;
    for (int i = 0; i < S.size(); ++i) {
      Rational flat(detail::abs_norm(K, data[i].F), big(ctx.w_norm_[i]));
      flat.canonicalize();
      while (flat >= ctx.Y_[i]) {
        ctx.c_[i] *= 2;
        ctx.Y_[i] *= 2;
        ++ctx.doublings_;
      }
    }
  });
  return ctx;
}

namespace detail {

// Divisors c of F^flat with N c < sqrt(Y_i), passed as (norm, symbol).
template <class Visit>
void for_each_small_divisor(const HyperbolaContext& ctx, int i, const PairAtPoint& pd, Visit&& visit) {
  std::function<void(size_t, i64, int)> rec = [&](size_t j, i64 norm, int chi) {
    if (j == pd.flat.size()) {
      visit(norm, chi);
      return;
    }
    const auto& q = pd.flat[j];
    i64 n = norm;
    int c = chi;
    for (int a = 0; a <= q.exponent; ++a) {
      if (!ctx.below_sqrt_Y(i, big(n))) break;
      rec(j + 1, n, c);
      n = checked_mul(n, q.norm);
      c *= q.chi;
    }
  };
  rec(0, 1, 1);
}

inline std::vector<PairAtPoint> analyze_or_throw(const HyperbolaContext& ctx, const Point& pt) {
  PointAnalyzer A(ctx.system(), ctx.triplet());
  std::vector<PairAtPoint> data;
  if (!A.analyze(pt.s, pt.t, data)) throw Error(ErrorCode::FormVanishes, "some F_i(s, t) = 0");
  return data;
}

}  // namespace detail

inline i64 r_minus(const HyperbolaContext& ctx, int i, const Point& pt) {
  auto data = detail::analyze_or_throw(ctx, pt);
  i64 r = 0;
  detail::for_each_small_divisor(ctx, i, data[i], [&](i64, int chi) { r += chi; });
  return r;
}

inline i64 r_plus(const HyperbolaContext& ctx, int i, const Point& pt) {
  auto data = detail::analyze_or_throw(ctx, pt);
  const BigInt nf = detail::abs_norm(ctx.system().field(), data[i].F);
  i64 r = 0;
  detail::for_each_small_divisor(ctx, i, data[i], [&](i64 n, int chi) {
    if (ctx.above_threshold(i, nf, Rational(big(n)))) r += chi;
  });
  return r;
}

inline bool in_Dpsi(const HyperbolaContext& ctx, const PsiVector& psi, const std::vector<Rational>& v, const Point& pt) {
  if (!ctx.triplet().in_domain(pt.s, pt.t, ctx.X())) return false;
  const auto& K = ctx.system().field();
  for (int i = 0; i < ctx.size(); ++i) {
    if (!psi.bits[i]) continue;
    BigInt nf = detail::abs_norm(K, form_eval(K, ctx.system().pair(i).F, pt.s, pt.t));
    if (!ctx.above_threshold(i, nf, v[i])) return false;
  }
  return true;
}

inline bool in_Dpsi(const HyperbolaContext& ctx, const PsiVector& psi, const std::vector<double>& v, const Point& pt) {
  std::vector<Rational> q;
  for (double x : v) q.push_back(detail::to_rational(x));
  return in_Dpsi(ctx, psi, q, pt);
}

// D_psi(X; v) as a region in real coordinates (s then t), evaluated in
// floating point.  Its bounding box is that of X^{1/m} D.
inline Region omega_region(const HyperbolaContext& ctx, const PsiVector& psi, const std::vector<double>& v) {
  const auto& K = ctx.system().field();
  const auto& T = ctx.triplet();
  const int m = K.degree();
  const double lam = T.scale(ctx.X());
  Region R;
  R.lo.assign(2 * m, 0);
  R.hi.assign(2 * m, 0);
  for (int p = 0; p < K.num_places(); ++p) {
    const auto& b = T.balls()[p];
    const int ld = K.places()[p].local_degree(), off = K.place_offset(p);
    for (int which = 0; which < 2; ++which)
      for (int q = 0; q < ld; ++q) {
        double c = lam * b.center[which * ld + q], r = lam * b.radius * (1 + kBoundaryGuard);
        R.lo[which * m + off + q] = c - r;
        R.hi[which * m + off + q] = c + r;
      }
  }
  std::vector<std::vector<std::vector<std::complex<double>>>> coeffs(ctx.size());
  std::vector<double> thresholds(ctx.size(), 0);
  for (int i = 0; i < ctx.size(); ++i) {
    coeffs[i].resize(K.num_places());
    for (int p = 0; p < K.num_places(); ++p)
      for (const auto& a : ctx.system().pair(i).F.coeffs) coeffs[i][p].push_back(K.embed(a, p));
    if (psi.bits[i]) thresholds[i] = v[i] * std::sqrt(ctx.Y(i).get_d()) * static_cast<double>(ctx.w_norm(i));
  }
  R.contains = [K, T, lam, coeffs, thresholds, m](std::span<const double> x) {
    std::vector<std::complex<double>> sv(K.num_places()), tv(K.num_places());
    for (int p = 0; p < K.num_places(); ++p) {
      const int off = K.place_offset(p);
      if (K.places()[p].real) {
        sv[p] = {x[off], 0};
        tv[p] = {x[m + off], 0};
      } else {
        sv[p] = {x[off], x[off + 1]};
        tv[p] = {x[m + off], x[m + off + 1]};
      }
      if (!T.in_ball(p, sv[p], tv[p], lam)) return false;
    }
    for (size_t i = 0; i < coeffs.size(); ++i) {
      if (thresholds[i] == 0) continue;
      double nf = 1;
      for (int p = 0; p < K.num_places(); ++p) {
        std::complex<double> acc = 0, tp = 1;
        const auto& cs = coeffs[i][p];
        const int d = static_cast<int>(cs.size()) - 1;
        std::vector<std::complex<double>> tpow(d + 1);
        for (int j = 0; j <= d; ++j) {
          tpow[j] = tp;
          tp *= tv[p];
        }
        for (int j = 0; j <= d; ++j) acc = acc * sv[p] + cs[j] * tpow[j];
        double a = std::abs(acc);
        nf *= K.places()[p].real ? a : a * a;
      }
      if (nf < thresholds[i]) return false;
    }
    return true;
  };
  return R;
}

// S_psi summed point by point: for each point of M*(P, X), the tuples of
// (b_i, c_i) with b_i squarefree, N b_i < Y_i, N c_i < sqrt(Y_i), b_i and
// c_i dividing F_i(s, t) away from w, the cross-index coprimality, and the
// point in D_psi(X; N c).
inline Rational S_psi_direct(const HyperbolaContext& ctx, const PsiVector& psi) {
  const auto& S = ctx.system();
  const auto& K = S.field();
  const auto& f = ctx.spec();
  const int n = ctx.size();
  PointAnalyzer A(S, ctx.triplet());
  std::vector<PairAtPoint> data;
  Rational total = 0;

  struct Choice {
    Rational weight;
    u64 bmask, cmask;
  };
  std::vector<std::vector<Choice>> choices(n);
  std::vector<std::pair<i64, int>> ids;

  for_each_point(ctx.triplet(), ctx.X(), [&](const Point& pt) {
    if (!A.analyze(pt.s, pt.t, data)) throw Error(ErrorCode::FormVanishes, "some F_i(s, t) = 0");
    ids.clear();
    auto id_of = [&](const FlatPrime& q) {
      for (size_t k = 0; k < ids.size(); ++k)
        if (ids[k] == std::make_pair(q.p, q.index)) return static_cast<int>(k);
      ids.emplace_back(q.p, q.index);
      if (ids.size() > 64) throw Error(ErrorCode::Overflow, "too many primes at one point");
      return static_cast<int>(ids.size()) - 1;
    };
    for (int i = 0; i < n; ++i) {
      const auto& pd = data[i];
      const BigInt nf = detail::abs_norm(K, pd.F);
      const int k = static_cast<int>(pd.flat.size());
      std::vector<int> pid(k);
      for (int j = 0; j < k; ++j) pid[j] = id_of(pd.flat[j]);
      choices[i].clear();
      // Squarefree b with f(b) != 0.
      std::vector<std::tuple<Rational, u64, i64>> bs;
      for (u64 sub = 0; sub < (u64{1} << k); ++sub) {
        Rational fb = 1;
        u64 mask = 0;
        i64 nb = 1;
        for (int j = 0; j < k && fb != 0; ++j)
          if ((sub >> j) & 1) {
            fb *= f.value(pd.flat[j].p, pd.flat[j].index, pd.flat[j].norm);
            mask |= u64{1} << pid[j];
            nb = checked_mul(nb, pd.flat[j].norm);
          }
        if (fb != 0 && Rational(big(nb)) < ctx.Y(i)) bs.emplace_back(fb, mask, nb);
      }
      // c over divisors of the flat part.
      std::function<void(int, i64, int, u64)> rec = [&](int j, i64 nc, int chi, u64 cmask) {
        if (j == k) {
          if (psi.bits[i] && !ctx.above_threshold(i, nf, Rational(big(nc)))) return;
          for (const auto& [fb, bmask, nb] : bs) choices[i].push_back({fb * chi, bmask, cmask});
          return;
        }
        i64 nn = nc;
        int c = chi;
        for (int a = 0; a <= pd.flat[j].exponent; ++a) {
          if (!ctx.below_sqrt_Y(i, big(nn))) break;
          rec(j + 1, nn, c, a ? cmask | (u64{1} << pid[j]) : cmask);
          nn = checked_mul(nn, pd.flat[j].norm);
          c *= pd.flat[j].chi;
        }
      };
      rec(0, 1, 1, 0);
    }
    // Combine across indices under c_i + c_j = b_i + b_j = b_i + c_j = O.
    std::vector<const Choice*> picked(n);
    std::function<void(int, const Rational&)> comb = [&](int i, const Rational& w) {
      if (i == n) {
        total += w;
        return;
      }
      for (const auto& ch : choices[i]) {
        bool ok = true;
        for (int j = 0; j < i && ok; ++j) {
          const Choice& o = *picked[j];
          ok = !(ch.cmask & o.cmask) && !(ch.bmask & o.bmask) && !(ch.bmask & o.cmask) && !(ch.cmask & o.bmask);
        }
        if (!ok) continue;
        picked[i] = &ch;
        comb(i + 1, w * ch.weight);
      }
    };
    comb(0, Rational(1));
  });
  return total;
}

// S_psi through congruence lattices: tuples (a_i, b'''_i, c''_i, c'''_i),
// roots lambda_i of F_i(x, 1) modulo d_i = a_i b'''_i c''_i c'''_i, and
// lattice point counts of Lambda*(w, (sigma, tau), prod d_i, lambda) in
// D_psi(X; N(a_i c''_i c'''_i)).
inline Rational S_psi_lattice(const HyperbolaContext& ctx, const PsiVector& psi, int jobs = 1) {
  if (!ctx.lattice_ready()) throw Error(ErrorCode::PreconditionFailed, "w must absorb the primes of every F_i(1, 0)");
  const auto& S = ctx.system();
  const auto& K = S.field();
  const auto& T = ctx.triplet();
  const auto& f = ctx.spec();
  const int n = ctx.size();
  const auto& wf = T.w_factorization();

  std::vector<i64> below_Y(n), below_rootY(n);
  i64 bmax = 1;
  for (int i = 0; i < n; ++i) {
    below_Y[i] = detail::largest_below(ctx.Y(i));
    below_rootY[i] = detail::largest_below_sqrt(ctx.Y(i));
    bmax = std::max(bmax, below_Y[i]);
  }
  std::vector<PrimeRef> primes;
  for (const auto& P : primes_up_to_norm(K, bmax))
    if (wf.exponent(*P) == 0) primes.push_back(P);

  // Every prime of d_i must carry a root of F_i(x, 1).
  std::vector<std::set<std::pair<i64, int>>> rooted(n);
  for (int i = 0; i < n; ++i)
    for (const auto& P : primes) {
      Factorization one;
      one.parts.emplace_back(P, 1);
      if (!ctx.roots(i, one)->empty()) rooted[i].emplace(P->p, P->index);
    }
  auto has_root = [&](int i, const PrimeIdeal& P) { return rooted[i].count({P.p, P.index}) > 0; };

  auto fprime = [&](const PrimeIdeal& P) { return f.value(P); };
  auto in_any = [](const std::vector<Factorization>& fs, int upto, const PrimeIdeal& P) {
    for (int j = 0; j < upto; ++j)
      if (detail::fac_has(fs[j], P)) return true;
    return false;
  };

  // The region box covers X^{1/m} D; membership is decided exactly per point.
  Region box;
  {
    PsiVector zero{std::vector<int>(n, 0)};
    Region full = omega_region(ctx, zero, std::vector<double>(n, 0));
    box.lo = full.lo;
    box.hi = full.hi;
    box.contains = [](std::span<const double>) { return true; };
  }

  std::vector<Factorization> a1_choices;
  for_each_ideal(
      primes, below_rootY[0], [&](const Factorization& a, i64) { a1_choices.push_back(a); },
      [&](const PrimeIdeal& P) { return fprime(P) != 0 && has_root(0, P); }, true);

  auto work = [&](const Factorization& a1) {
    Rational acc = 0;
    std::vector<Factorization> a(n), c2(n), c3(n), b3(n);
    std::vector<i64> na(n);
    a[0] = a1;
    na[0] = a1.norm();

    auto leaf = [&]() {
      Rational weight = 1;
      for (int i = 0; i < n; ++i) {
        for (const auto& [P, k] : a[i].parts) weight *= fprime(*P);
        for (const auto& [P, k] : b3[i].parts) weight *= fprime(*P);
      }
      if (weight == 0) return;
      std::vector<Factorization> d(n), cc(n);
      std::vector<std::vector<std::pair<FieldElement, int>>> roots(n);
      Factorization dprime;
      std::vector<Rational> v(n);
      for (int i = 0; i < n; ++i) {
        cc[i] = fac_mul(fac_mul(a[i], c2[i]), c3[i]);
        cc[i].normalize();
        d[i] = fac_mul(cc[i], b3[i]);
        d[i].normalize();
        dprime = fac_mul(dprime, d[i]);
        v[i] = Rational(big(cc[i].norm()));
        for (const auto& x : *ctx.roots(i, d[i])) {
          int chi = cc[i].is_unit() ? 1 : jacobi(K, form_eval_affine(K, S.pair(i).G, x), cc[i]);
          if (chi != 0) roots[i].emplace_back(x, chi);
        }
        if (roots[i].empty()) return;
      }
      dprime.normalize();
      const Ideal dI = ideal_from_factorization(K, dprime);
      std::vector<Ideal> dIs(n);
      for (int i = 0; i < n; ++i) dIs[i] = ideal_from_factorization(K, d[i]);
      std::vector<Rational> thresholds(n);
      for (int i = 0; i < n; ++i)
        thresholds[i] = v[i] * v[i] * ctx.Y(i) * Rational(big(ctx.w_norm(i)) * big(ctx.w_norm(i)));

      std::vector<std::pair<FieldElement, Ideal>> cong(n);
      std::function<void(int, int)> rec = [&](int i, int sign) {
        if (i == n) {
          FieldElement lambda = n == 1 ? cong[0].first : crt_combine(K, cong).value;
          auto L = StarLattice::create(K, T.w(), T.sigma(), T.tau(), dI, lambda, T.r());
          i64 count = 0;
          L.for_each(box, [&](const Point& p) {
            if (!T.in_domain(p.s, p.t, ctx.X())) return;
            for (int j = 0; j < n; ++j) {
              if (!psi.bits[j]) continue;
              BigInt nf = detail::abs_norm(K, form_eval(K, S.pair(j).F, p.s, p.t));
              if (Rational(nf * nf) < thresholds[j]) return;
            }
            ++count;
          });
          acc += weight * sign * count;
          return;
        }
        for (const auto& [x, chi] : roots[i]) {
          cong[i] = {x, dIs[i]};
          rec(i + 1, sign * chi);
        }
      };
      rec(0, 1);
    };

    // b'''_i: squarefree, coprime to w, every a_j, every c'''_j, earlier b'''.
    std::function<void(int)> stage_b = [&](int i) {
      if (i == n) {
        leaf();
        return;
      }
      for_each_ideal(
          primes, below_Y[i] / na[i],
          [&](const Factorization& b, i64) {
            b3[i] = b;
            stage_b(i + 1);
          },
          [&](const PrimeIdeal& P) {
            return fprime(P) != 0 && has_root(i, P) && !in_any(a, n, P) && !in_any(c3, n, P) && !in_any(b3, i, P);
          },
          true);
      b3[i] = Factorization{};
    };
    // c'''_i coprime to w, every a_j, earlier c'''; then c''_i from the primes of a_i.
    std::function<void(int)> stage_c = [&](int i) {
      if (i == n) {
        stage_b(0);
        return;
      }
      const i64 room = below_rootY[i] / na[i];
      for_each_ideal(
          primes, room,
          [&](const Factorization& c, i64 norm) {
            c3[i] = c;
            std::vector<PrimeRef> ap;
            for (const auto& [P, k] : a[i].parts) ap.push_back(P);
            for_each_ideal(ap, room / norm, [&](const Factorization& c2i, i64) {
              c2[i] = c2i;
              stage_c(i + 1);
            });
            c2[i] = Factorization{};
          },
          [&](const PrimeIdeal& P) { return has_root(i, P) && !in_any(a, n, P) && !in_any(c3, i, P); });
      c3[i] = Factorization{};
    };
    // a_i squarefree, coprime to w and the earlier a_j.
    std::function<void(int)> stage_a = [&](int i) {
      if (i == n) {
        stage_c(0);
        return;
      }
      for_each_ideal(
          primes, below_rootY[i],
          [&](const Factorization& ai, i64 norm) {
            a[i] = ai;
            na[i] = norm;
            stage_a(i + 1);
          },
          [&](const PrimeIdeal& P) { return fprime(P) != 0 && has_root(i, P) && !in_any(a, i, P); }, true);
      a[i] = Factorization{};
    };
    stage_a(1);
    return acc;
  };

  jobs = std::max(1, std::min<int>(jobs, static_cast<int>(a1_choices.size())));
  std::vector<Rational> partial(jobs, 0);
  std::atomic<size_t> next{0};
  std::vector<std::exception_ptr> errors(jobs);
  auto worker = [&](int id) {
    try {
      for (size_t k; (k = next.fetch_add(1)) < a1_choices.size();) partial[id] += work(a1_choices[k]);
    } catch (...) {
      errors[id] = std::current_exception();
    }
  };
  if (jobs == 1) {
    worker(0);
  } else {
    std::vector<std::thread> threads;
    for (int id = 0; id < jobs; ++id) threads.emplace_back(worker, id);
    for (auto& t : threads) t.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  Rational total = 0;
  for (const auto& p : partial) total += p;
  return total;
}

}  // namespace binform
