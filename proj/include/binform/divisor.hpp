#pragma once

// Multiplicative weights, triplets (domain, base point, modulus), the point
// sets M*(P, X), the divisor weight r(s, t), and exact brute-force sums.

#include <atomic>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "binform/forms.hpp"

namespace binform {

// A function on prime ideals with values > -1, extended to squarefree
// ideals multiplicatively.
class MultiplicativeSpec {
 public:
  enum class Kind { Zero, Eta, Table, Product };
  using Key = std::pair<i64, int>;  // (rational prime, index among primes above it)

  static MultiplicativeSpec zero() { return MultiplicativeSpec(Kind::Zero); }
  static MultiplicativeSpec eta() {
    MultiplicativeSpec s(Kind::Eta);
    s.bound_c_ = 1;
    return s;
  }
  static MultiplicativeSpec table(std::map<Key, Rational> entries, const NumberField& K) {
    MultiplicativeSpec s(Kind::Table);
    for (auto& [key, v] : entries) {
      if (v <= -1) throw Error(ErrorCode::ConfigInvalid, "f(p) must exceed -1");
      auto ps = primes_above(K, key.first);
      if (key.second < 0 || key.second >= static_cast<int>(ps->size()))
        throw Error(ErrorCode::ConfigInvalid, "no prime with index " + std::to_string(key.second) + " above " + std::to_string(key.first));
      Rational bound = abs(v) * (*ps)[key.second]->norm;
      if (bound > s.bound_c_) s.bound_c_ = bound;
    }
    s.table_ = std::make_shared<const std::map<Key, Rational>>(std::move(entries));
    return s;
  }
  // The spec whose 1 + f is the product of the two factors' 1 + f.
  static MultiplicativeSpec compose(const MultiplicativeSpec& a, const MultiplicativeSpec& b) {
    if (a.is_zero()) return b;
    if (b.is_zero()) return a;
    MultiplicativeSpec s(Kind::Product);
    s.lhs_ = std::make_shared<const MultiplicativeSpec>(a);
    s.rhs_ = std::make_shared<const MultiplicativeSpec>(b);
    s.bound_c_ = a.bound_c_ + b.bound_c_ + a.bound_c_ * b.bound_c_;
    return s;
  }

  Kind kind() const { return kind_; }
  bool is_zero() const {
    if (kind_ == Kind::Zero) return true;
    if (kind_ == Kind::Table) {
      for (const auto& [k, v] : *table_)
        if (v != 0) return false;
      return true;
    }
    return false;
  }
  const Rational& bound_c() const { return bound_c_; }

  Rational value(i64 p, int index, i64 norm) const {
    switch (kind_) {
      case Kind::Zero: return 0;
      case Kind::Eta: return Rational(-1, norm + 1);
      case Kind::Table: {
        auto it = table_->find({p, index});
        return it == table_->end() ? Rational(0) : it->second;
      }
      case Kind::Product: {
        Rational x = lhs_->value(p, index, norm), y = rhs_->value(p, index, norm);
        return x + y + x * y;
      }
    }
    return 0;
  }
  Rational value(const PrimeIdeal& P) const { return value(P.p, P.index, P.norm); }

  std::string describe() const {
    switch (kind_) {
      case Kind::Zero: return "zero";
      case Kind::Eta: return "eta";
      case Kind::Table: return "table(" + std::to_string(table_->size()) + ")";
      case Kind::Product: return "(" + lhs_->describe() + ")*(" + rhs_->describe() + ")";
    }
    return "";
  }

 private:
  explicit MultiplicativeSpec(Kind k) : kind_(k) {}
  Kind kind_;
  Rational bound_c_ = 0;
  std::shared_ptr<const std::map<Key, Rational>> table_;
  std::shared_ptr<const MultiplicativeSpec> lhs_, rhs_;
};

inline Rational one_f(const MultiplicativeSpec& f, const Factorization& a) {
  Rational r = 1;
  if (f.is_zero()) return r;
  for (const auto& [P, k] : a.parts)
    if (k > 0) r *= 1 + f.value(*P);
  return r;
}

inline Rational one_f(const NumberField& K, const MultiplicativeSpec& f, const Ideal& a) { return one_f(f, factor_ideal(K, a)); }

inline Factorization flat_part(const Factorization& a, const Factorization& w) {
  Factorization out;
  for (const auto& pk : a.parts)
    if (w.exponent(*pk.first) == 0) out.parts.push_back(pk);
  return out;
}

inline Ideal flat_ideal(const NumberField& K, const Ideal& a, const Ideal& w) {
  return ideal_from_factorization(K, flat_part(factor_ideal(K, a), factor_ideal(K, w)));
}

// ---------------------------------------------------------------------------

enum class BallNorm { Euclidean, Max };

// A ball in K_v^2.  center holds (s, t) in real coordinates: one entry each
// at a real place, (Re, Im) each at a complex place.
struct PlaceBall {
  BallNorm norm = BallNorm::Euclidean;
  double radius = 1;
  std::vector<double> center;
};

struct Point {
  FieldElement s, t;
  friend bool operator==(const Point&, const Point&) = default;
  friend auto operator<=>(const Point&, const Point&) = default;
};

inline constexpr double kBoundaryGuard = 1e-9;

class Triplet {
 public:
  static Triplet create(const NumberField& K, std::vector<PlaceBall> balls, FieldElement sigma, FieldElement tau, Ideal w,
                        Ideal r, bool strong = false) {
    if (static_cast<int>(balls.size()) != K.num_places())
      throw Error(ErrorCode::ConditionViolated, "need one ball per archimedean place");
    for (int v = 0; v < K.num_places(); ++v) {
      auto& b = balls[v];
      if (!(b.radius > 0)) throw Error(ErrorCode::ConditionViolated, "radius must be positive");
      if (b.center.empty()) b.center.assign(2 * K.places()[v].local_degree(), 0.0);
      if (static_cast<int>(b.center.size()) != 2 * K.places()[v].local_degree())
        throw Error(ErrorCode::ConditionViolated, "center has the wrong number of coordinates");
    }
    Ideal two_r = ideal_mul(K, rational_ideal(K, 2), r);
    if (!ideal_divides(two_r, w)) throw Error(ErrorCode::ConditionViolated, "2r must divide w");
    if (!(ideal_from_generators(K, {sigma, tau}) == r))
      throw Error(ErrorCode::ConditionViolated, "sigma O + tau O must equal r");
    Triplet T;
    T.K_ = K;
    T.balls_ = std::move(balls);
    T.sigma_ = sigma;
    T.tau_ = tau;
    T.w_ = std::move(w);
    T.r_ = std::move(r);
    T.w_fac_ = factor_ideal(K, T.w_);
    T.r_fac_ = factor_ideal(K, T.r_);
    T.strong_ = strong;
    return T;
  }

  const NumberField& field() const { return K_; }
  const std::vector<PlaceBall>& balls() const { return balls_; }
  const FieldElement& sigma() const { return sigma_; }
  const FieldElement& tau() const { return tau_; }
  const Ideal& w() const { return w_; }
  const Ideal& r() const { return r_; }
  const Factorization& w_factorization() const { return w_fac_; }
  const Factorization& r_factorization() const { return r_fac_; }
  bool strong() const { return strong_; }

  // Same domain and base point with w replaced by w^k.
  Triplet thinned(int k) const {
    Triplet T = *this;
    T.w_ = ideal_pow(K_, w_, k);
    T.w_fac_ = fac_pow(w_fac_, k);
    return T;
  }
  Triplet with_balls(std::vector<PlaceBall> balls) const {
    return create(K_, std::move(balls), sigma_, tau_, w_, r_, strong_);
  }

  double scale(double X) const { return std::pow(X, 1.0 / K_.degree()); }

  // Membership of (s, t) in X^{1/m} D.
  bool in_domain(const FieldElement& s, const FieldElement& t, double X) const {
    const double lam = scale(X);
    for (int v = 0; v < K_.num_places(); ++v)
      if (!in_ball(v, K_.embed(s, v), K_.embed(t, v), lam)) return false;
    return true;
  }
  bool in_ball(int v, std::complex<double> sv, std::complex<double> tv, double lam) const {
    const auto& b = balls_[v];
    const bool real = K_.places()[v].real;
    std::complex<double> cs = real ? std::complex<double>(b.center[0], 0) : std::complex<double>(b.center[0], b.center[1]);
    std::complex<double> ct = real ? std::complex<double>(b.center[1], 0) : std::complex<double>(b.center[2], b.center[3]);
    double ds = std::norm(sv - lam * cs), dt = std::norm(tv - lam * ct);
    double R2 = lam * b.radius * lam * b.radius * (1 + kBoundaryGuard);
    return b.norm == BallNorm::Euclidean ? ds + dt <= R2 : std::max(ds, dt) <= R2;
  }

  // Rigorous outer box on power-basis coordinates of s (which = 0) or t
  // (which = 1) for points of X^{1/m} D.
  std::pair<std::vector<i64>, std::vector<i64>> coordinate_box(double X, int which) const {
    const int m = K_.degree();
    const double lam = scale(X);
    std::vector<double> mid(m, 0.0), rad(m, 0.0);
    for (int v = 0; v < K_.num_places(); ++v) {
      const auto& b = balls_[v];
      int ld = K_.places()[v].local_degree(), off = K_.place_offset(v);
      for (int q = 0; q < ld; ++q) {
        mid[off + q] = lam * b.center[which * ld + q];
        rad[off + q] = lam * b.radius;
      }
    }
    const auto& Minv = K_.inverse_embedding_matrix();
    std::vector<i64> lo(m), hi(m);
    for (int j = 0; j < m; ++j) {
      double c = 0, r = 0;
      for (int k = 0; k < m; ++k) {
        c += Minv[j][k] * mid[k];
        r += std::fabs(Minv[j][k]) * rad[k];
      }
      r = r * (1 + 1e-7) + 1e-7;
      lo[j] = static_cast<i64>(std::floor(c - r));
      hi[j] = static_cast<i64>(std::ceil(c + r));
    }
    return {lo, hi};
  }

  // Elements of base + w inside the coordinate box whose embeddings are
  // compatible with the domain on their own.
  std::vector<FieldElement> coordinate_candidates(double X, int which) const {
    const int m = K_.degree();
    auto [lo, hi] = coordinate_box(X, which);
    const FieldElement& base = which == 0 ? sigma_ : tau_;
    const double lam = scale(X);
    std::vector<i64> b(base.c.begin(), base.c.begin() + m);
    std::vector<FieldElement> out;
    enumerate_coset(w_.hnf, b, lo, hi, [&](std::span<const i64> v) {
      FieldElement x = FieldElement::from_coords(v);
      for (int p = 0; p < K_.num_places(); ++p) {
        const auto& ball = balls_[p];
        int ld = K_.places()[p].local_degree();
        std::complex<double> c = ld == 1 ? std::complex<double>(ball.center[which], 0)
                                         : std::complex<double>(ball.center[2 * which], ball.center[2 * which + 1]);
        double d = std::norm(K_.embed(x, p) - lam * c);
        if (d > lam * ball.radius * lam * ball.radius * (1 + kBoundaryGuard)) return;
      }
      out.push_back(x);
    });
    return out;
  }

  // Whether s O + t O = r, for s, t in r.
  bool primitive(const FieldElement& s, const FieldElement& t) const {
    if (K_.degree() == 1) return std::gcd(s.c[0], t.c[0]) == r_.hnf.pivot(0);
    BigInt ns = abs(K_.norm_big(s)), nt = abs(K_.norm_big(t));
    BigInt g = gcd(ns, nt);
    if (g == 0) return false;
    if (!g.fits_ulong_p()) throw Error(ErrorCode::Overflow, "norm gcd too large");
    for (auto [p, e] : Factorizer::shared()->factor(g.get_ui())) {
      for (const auto& P : *primes_above(K_, static_cast<i64>(p))) {
        int vs = s.is_zero() ? 1 << 30 : valuation(K_, *P, s);
        int vt = t.is_zero() ? 1 << 30 : valuation(K_, *P, t);
        if (std::min(vs, vt) != r_fac_.exponent(*P)) return false;
      }
    }
    return true;
  }

  bool congruent(const FieldElement& s, const FieldElement& t) const {
    return ideal_contains(K_, w_, K_.sub(s, sigma_)) && ideal_contains(K_, w_, K_.sub(t, tau_));
  }

  // Independent membership predicate for M*(P, X).
  bool contains(const Point& p, double X) const {
    return ideal_contains(K_, r_, p.s) && ideal_contains(K_, r_, p.t) && congruent(p.s, p.t) && primitive(p.s, p.t) &&
           in_domain(p.s, p.t, X);
  }

 private:
  NumberField K_;
  std::vector<PlaceBall> balls_;
  FieldElement sigma_, tau_;
  Ideal w_, r_;
  Factorization w_fac_, r_fac_;
  bool strong_ = false;
};

// Visits M*(P, X) in a deterministic order (by s candidate, then t).
template <class Visit>
void for_each_point(const Triplet& T, double X, Visit&& visit) {
  if (X < 1) return;
  auto ss = T.coordinate_candidates(X, 0);
  auto ts = T.coordinate_candidates(X, 1);
  for (const auto& s : ss)
    for (const auto& t : ts)
      if (T.in_domain(s, t, X) && T.primitive(s, t)) visit(Point{s, t});
}

inline std::vector<Point> enumerate_Mstar(const Triplet& T, double X) {
  std::vector<Point> out;
  for_each_point(T, X, [&](const Point& p) { out.push_back(p); });
  return out;
}

// ---------------------------------------------------------------------------

// A prime of F(s, t)^flat with its exponent and the symbol of G(s, t).
struct FlatPrime {
  i64 p = 0;
  int index = 0;
  i64 norm = 0;
  int exponent = 0;
  int chi = 0;
};

struct PairAtPoint {
  FieldElement F, G;
  std::vector<FlatPrime> flat;
  bool strong_ok = true;  // valuations at primes of w agree with F(sigma, tau)

  // 1 + chi + ... + chi^v over the flat primes.
  i64 divisor_symbol_sum() const {
    i64 r = 1;
    for (const auto& q : flat) {
      if (q.chi == 1)
        r *= q.exponent + 1;
      else if (q.chi == -1)
        r *= (q.exponent % 2 == 0) ? 1 : 0;
    }
    return r;
  }
  i64 divisor_count() const {
    i64 r = 1;
    for (const auto& q : flat) r *= q.exponent + 1;
    return r;
  }
  int jacobi() const {
    int j = 1;
    for (const auto& q : flat) {
      if (q.chi == 0) return 0;
      if (q.chi == -1 && (q.exponent & 1)) j = -j;
    }
    return j;
  }
  i64 flat_norm() const {
    i64 n = 1;
    for (const auto& q : flat) n = checked_mul(n, checked_pow(q.norm, q.exponent));
    return n;
  }
  Rational one_f(const MultiplicativeSpec& f) const {
    Rational r = 1;
    if (f.is_zero()) return r;
    for (const auto& q : flat) r *= 1 + f.value(q.p, q.index, q.norm);
    return r;
  }
};

// Evaluates the forms of a system at points and factors the flat parts.
class PointAnalyzer {
 public:
  PointAnalyzer(const FormSystem& S, const Triplet& T, u64 factor_limit = 1u << 20)
      : S_(S), T_(T), fz_(Factorizer::with_limit(factor_limit)) {
    const auto& K = S.field();
    if (K.degree() == 1) {
      w_gen_ = T.w().hnf.pivot(0);
      for (auto [p, e] : fz_->factor(static_cast<u64>(w_gen_))) w_primes_.push_back(static_cast<i64>(p));
    }
    for (int i = 0; i < S.size(); ++i) {
      FieldElement base = form_eval(K, S.pair(i).F, T.sigma(), T.tau());
      base_values_.push_back(base);
      std::vector<int> vals;
      for (const auto& [P, k] : T.w_factorization().parts) vals.push_back(base.is_zero() ? -1 : valuation(K, *P, base));
      base_vals_.push_back(vals);
    }
  }

  const FormSystem& system() const { return S_; }
  const Triplet& triplet() const { return T_; }
  const FieldElement& base_value(int i) const { return base_values_[i]; }
  // Exponents of the primes of w in F_i(sigma, tau), in w's factorization order.
  const std::vector<int>& base_valuations(int i) const { return base_vals_[i]; }

  // Returns false when some F_i(s, t) vanishes.
  bool analyze(const FieldElement& s, const FieldElement& t, std::vector<PairAtPoint>& out) const {
    const auto& K = S_.field();
    out.resize(S_.size());
    for (int i = 0; i < S_.size(); ++i) {
      auto& pd = out[i];
      pd.F = form_eval(K, S_.pair(i).F, s, t);
      if (pd.F.is_zero()) return false;
      pd.G = form_eval(K, S_.pair(i).G, s, t);
      pd.flat.clear();
      pd.strong_ok = true;
      if (K.degree() == 1)
        analyze_rational(i, pd);
      else
        analyze_general(i, pd);
    }
    return true;
  }

 private:
  void analyze_rational(int i, PairAtPoint& pd) const {
    const i64 n = pd.F.c[0];
    const i64 g = pd.G.c[0];
    thread_local IntFactorization fac;
    fac.clear();
    fz_->factor(static_cast<u64>(iabs(n)), fac);
    for (auto [p64, e] : fac) {
      const i64 p = static_cast<i64>(p64);
      if (w_gen_ % p == 0) continue;
      pd.flat.push_back({p, 0, p, e, jacobi_symbol(mod_floor(g, p), p)});
    }
    // Strong admissibility: exponents of w's primes in F(s, t).
    for (size_t k = 0; k < w_primes_.size(); ++k) {
      i64 p = w_primes_[k];
      int v = 0;
      i64 m = n;
      while (m % p == 0) {
        m /= p;
        ++v;
      }
      if (v != base_vals_[i][k]) pd.strong_ok = false;
    }
  }

  void analyze_general(int i, PairAtPoint& pd) const {
    const auto& K = S_.field();
    Factorization fac = factor_element(K, pd.F, fz_.get());
    const auto& wf = T_.w_factorization();
    for (const auto& [P, e] : fac.parts) {
      if (wf.exponent(*P) > 0) continue;
      pd.flat.push_back({P->p, P->index, P->norm, e, legendre(K, pd.G, *P)});
    }
    for (size_t k = 0; k < wf.parts.size(); ++k)
      if (fac.exponent(*wf.parts[k].first) != base_vals_[i][k]) pd.strong_ok = false;
  }

  const FormSystem& S_;
  const Triplet& T_;
  std::shared_ptr<const Factorizer> fz_;
  i64 w_gen_ = 0;
  std::vector<i64> w_primes_;
  std::vector<FieldElement> base_values_;
  std::vector<std::vector<int>> base_vals_;
};

inline Rational r_from_analysis(const std::vector<PairAtPoint>& pts, const MultiplicativeSpec& f) {
  Rational r = 1;
  for (const auto& pd : pts) {
    i64 d = pd.divisor_symbol_sum();
    if (d == 0) return 0;
    r *= pd.one_f(f) * d;
  }
  return r;
}

inline Rational r_value(const FormSystem& S, const MultiplicativeSpec& f, const Triplet& T, const Point& pt) {
  PointAnalyzer A(S, T);
  std::vector<PairAtPoint> data;
  if (!A.analyze(pt.s, pt.t, data)) throw Error(ErrorCode::FormVanishes, "some F_i(s, t) = 0");
  return r_from_analysis(data, f);
}

// ---------------------------------------------------------------------------

struct AdmissibilityReport {
  bool admissible = true;
  bool strongly_admissible = true;
  double verified_x = 0;
  i64 points_checked = 0;
  // First counterexample, if any.
  std::string failure;
  int pair_index = -1;
  std::optional<Point> point;

  bool ok(bool strong) const { return admissible && (!strong || strongly_admissible); }
};

namespace detail {

inline void check_base_point(const PointAnalyzer& A, AdmissibilityReport& rep) {
  const auto& S = A.system();
  const auto& T = A.triplet();
  const auto& K = S.field();
  for (int i = 0; i < S.size(); ++i) {
    if (A.base_value(i).is_zero()) {
      rep.admissible = rep.strongly_admissible = false;
      rep.failure = "F_" + std::to_string(i + 1) + "(sigma, tau) = 0";
      rep.pair_index = i;
      return;
    }
    if (rep.strongly_admissible && ideal_contains(K, T.w(), A.base_value(i))) {
      rep.strongly_admissible = false;
      rep.failure = "F_" + std::to_string(i + 1) + "(sigma, tau) lies in w";
      rep.pair_index = i;
    }
  }
}

// Records the first violation at a point; returns whether the point was clean.
inline bool check_point(const std::vector<PairAtPoint>& data, bool vanished, const Point& pt, AdmissibilityReport& rep) {
  if (vanished) {
    if (rep.admissible) {
      rep.admissible = rep.strongly_admissible = false;
      rep.failure = "a form vanishes at the point";
      rep.point = pt;
    }
    return false;
  }
  bool clean = true;
  for (size_t i = 0; i < data.size(); ++i) {
    if (data[i].jacobi() != 1) {
      if (rep.admissible) {
        rep.admissible = false;
        rep.strongly_admissible = false;
        rep.failure = "Jacobi symbol of G_" + std::to_string(i + 1) + " over the flat part of F_" + std::to_string(i + 1) + " is not 1";
        rep.pair_index = static_cast<int>(i);
        rep.point = pt;
      }
      clean = false;
    }
    if (!data[i].strong_ok) {
      if (rep.strongly_admissible) {
        rep.strongly_admissible = false;
        rep.failure = "valuation of F_" + std::to_string(i + 1) + " at a prime of w differs from the base point";
        rep.pair_index = static_cast<int>(i);
        rep.point = pt;
      }
      clean = false;
    }
  }
  return clean;
}

}  // namespace detail

inline AdmissibilityReport check_admissible(const FormSystem& S, const Triplet& T, double X) {
  PointAnalyzer A(S, T);
  AdmissibilityReport rep;
  rep.verified_x = X;
  detail::check_base_point(A, rep);
  if (!rep.admissible) return rep;
  std::vector<PairAtPoint> data;
  for_each_point(T, X, [&](const Point& pt) {
    ++rep.points_checked;
    bool ok = A.analyze(pt.s, pt.t, data);
    detail::check_point(data, !ok, pt, rep);
  });
  return rep;
}

inline AdmissibilityReport check_strongly_admissible(const FormSystem& S, const Triplet& T, double X) {
  return check_admissible(S, T, X);
}

// ---------------------------------------------------------------------------

struct SumOptions {
  int jobs = 1;
  bool check_admissibility = true;
  u64 factor_limit = 1u << 20;
};

struct SumResult {
  std::vector<double> xs;
  std::vector<Rational> sums;
  std::vector<i64> point_counts;
  AdmissibilityReport admissibility;
};

// D(F, f, P; X) for every X in xs, from one enumeration at the largest box.
inline SumResult divisor_sums(const FormSystem& S, const MultiplicativeSpec& f, const Triplet& T, std::vector<double> xs,
                              const SumOptions& opt = {}) {
  SumResult res;
  res.xs = xs;
  const size_t nx = xs.size();
  res.sums.assign(nx, Rational(0));
  res.point_counts.assign(nx, 0);
  double xmax = 0;
  for (double x : xs) xmax = std::max(xmax, x);
  res.admissibility.verified_x = xmax;
  if (nx == 0 || xmax < 1) return res;

  const auto& K = S.field();
  PointAnalyzer A(S, T, opt.factor_limit);
  detail::check_base_point(A, res.admissibility);

  auto ss = T.coordinate_candidates(xmax, 0);
  auto ts = T.coordinate_candidates(xmax, 1);
  std::vector<double> lams(nx);
  for (size_t k = 0; k < nx; ++k) lams[k] = T.scale(xs[k]);

  struct Partial {
    std::vector<BigInt> int_sums;
    std::vector<Rational> rat_sums;
    std::vector<i64> counts;
    AdmissibilityReport rep;
    size_t first_bad = SIZE_MAX;  // index into ss of the first violation
  };
  const bool integral = f.is_zero();
  const int jobs = std::max(1, opt.jobs);
  std::vector<Partial> parts(jobs);
  std::atomic<size_t> next{0};
  const size_t chunk = std::max<size_t>(1, ss.size() / (static_cast<size_t>(jobs) * 16));

  auto worker = [&](int id) {
    Partial& P = parts[id];
    P.int_sums.assign(nx, 0);
    P.rat_sums.assign(nx, 0);
    P.counts.assign(nx, 0);
    std::vector<i128> acc(nx, 0);
    std::vector<PairAtPoint> data;
    std::vector<char> inside(nx);
    const int np = K.num_places();
    std::vector<std::complex<double>> se(np), te(np);
    for (;;) {
      size_t begin = next.fetch_add(chunk);
      if (begin >= ss.size()) break;
      size_t end = std::min(ss.size(), begin + chunk);
      for (size_t si = begin; si < end; ++si) {
        const auto& s = ss[si];
        for (int v = 0; v < np; ++v) se[v] = K.embed(s, v);
        for (const auto& t : ts) {
          bool any = false;
          for (int v = 0; v < np; ++v) te[v] = K.embed(t, v);
          for (size_t k = 0; k < nx; ++k) {
            bool in = true;
            for (int v = 0; v < np && in; ++v) in = T.in_ball(v, se[v], te[v], lams[k]);
            inside[k] = in;
            any |= in;
          }
          if (!any || !T.primitive(s, t)) continue;
          bool ok = A.analyze(s, t, data);
          if (opt.check_admissibility || !ok) {
            bool clean = detail::check_point(data, !ok, Point{s, t}, P.rep);
            if (!clean && P.first_bad == SIZE_MAX) P.first_bad = si;
          }
          if (!ok) throw Error(ErrorCode::FormVanishes, "a form vanishes on M*");
          if (integral) {
            i64 w = 1;
            for (const auto& pd : data) {
              w *= pd.divisor_symbol_sum();
              if (w == 0) break;
            }
            for (size_t k = 0; k < nx; ++k)
              if (inside[k]) {
                acc[k] += w;
                ++P.counts[k];
              }
          } else {
            Rational w = r_from_analysis(data, f);
            for (size_t k = 0; k < nx; ++k)
              if (inside[k]) {
                P.rat_sums[k] += w;
                ++P.counts[k];
              }
          }
        }
      }
      for (size_t k = 0; k < nx; ++k) {
        P.int_sums[k] += big128(acc[k]);
        acc[k] = 0;
      }
    }
  };

  if (jobs == 1) {
    worker(0);
  } else {
    std::vector<std::thread> threads;
    std::vector<std::exception_ptr> errors(jobs);
    for (int id = 0; id < jobs; ++id)
      threads.emplace_back([&, id] {
        try {
          worker(id);
        } catch (...) {
          errors[id] = std::current_exception();
        }
      });
    for (auto& th : threads) th.join();
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
  }

  const Partial* first = nullptr;
  for (const auto& P : parts) {
    for (size_t k = 0; k < nx; ++k) {
      res.sums[k] += integral ? Rational(P.int_sums[k]) : P.rat_sums[k];
      res.point_counts[k] += P.counts[k];
    }
    if (P.first_bad != SIZE_MAX && (!first || P.first_bad < first->first_bad)) first = &P;
  }
  if (first && res.admissibility.admissible && res.admissibility.strongly_admissible) {
    res.admissibility = first->rep;
    res.admissibility.verified_x = xmax;
  }
  res.admissibility.points_checked = *std::max_element(res.point_counts.begin(), res.point_counts.end());
  return res;
}

inline Rational divisor_sum_bruteforce(const FormSystem& S, const MultiplicativeSpec& f, const Triplet& T, double X,
                                       const SumOptions& opt = {}) {
  SumResult r = divisor_sums(S, f, T, {X}, opt);
  return r.sums[0];
}

// ---------------------------------------------------------------------------

struct ThinningReport {
  bool contained = true;
  bool r_agree = true;
  bool inequality = true;
  Rational d_base, d_thin;
  i64 points_base = 0, points_thin = 0;
  bool ok() const { return contained && r_agree && inequality; }
};

inline ThinningReport thinning_compare(const FormSystem& S, const MultiplicativeSpec& f, const Triplet& T, int k, double X) {
  if (k < 1) throw Error(ErrorCode::PreconditionFailed, "k must be positive");
  ThinningReport rep;
  Triplet Tk = T.thinned(k);
  PointAnalyzer A(S, T), Ak(S, Tk);
  std::map<Point, Rational> base;
  std::vector<PairAtPoint> data;
  for_each_point(T, X, [&](const Point& pt) {
    if (!A.analyze(pt.s, pt.t, data)) throw Error(ErrorCode::FormVanishes, "a form vanishes on M*");
    Rational r = r_from_analysis(data, f);
    rep.d_base += r;
    ++rep.points_base;
    base.emplace(pt, r);
  });
  for_each_point(Tk, X, [&](const Point& pt) {
    if (!Ak.analyze(pt.s, pt.t, data)) throw Error(ErrorCode::FormVanishes, "a form vanishes on M*");
    Rational r = r_from_analysis(data, f);
    rep.d_thin += r;
    ++rep.points_thin;
    auto it = base.find(pt);
    if (it == base.end())
      rep.contained = false;
    else if (it->second != r)
      rep.r_agree = false;
  });
  rep.inequality = rep.d_base >= rep.d_thin;
  return rep;
}

struct JacobiTrivialReport {
  bool ok = true;
  i64 points_checked = 0;
  std::optional<Point> point;
  i64 offending_prime = 0;  // rational prime below a prime where the symbol is not 1
};

inline JacobiTrivialReport jacobi_trivial_check(const FormSystem& S, const Triplet& T, double X, int i) {
  if (!S.verdict(i).counts_as_square()) throw Error(ErrorCode::PreconditionFailed, "pair is not of square class");
  JacobiTrivialReport rep;
  PointAnalyzer A(S, T);
  std::vector<PairAtPoint> data;
  for_each_point(T, X, [&](const Point& pt) {
    if (!A.analyze(pt.s, pt.t, data)) throw Error(ErrorCode::FormVanishes, "a form vanishes on M*");
    ++rep.points_checked;
    const auto& pd = data[i];
    if (pd.divisor_symbol_sum() != pd.divisor_count() && rep.ok) {
      rep.ok = false;
      rep.point = pt;
      for (const auto& q : pd.flat)
        if (q.chi != 1) {
          rep.offending_prime = q.p;
          break;
        }
    }
  });
  return rep;
}

}  // namespace binform
