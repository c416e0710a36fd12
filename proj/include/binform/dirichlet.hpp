#pragma once

// Root-count functions tau_F and rho_(F,G), their Dirichlet series and Euler
// products, the twisted partial-sum comparison, discrete partial summation
// and the prime root density.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include "binform/divisor.hpp"
#include "binform/roots.hpp"

namespace binform {

namespace detail {

inline bool divides_element(const NumberField& K, const PrimeIdeal& P, const FieldElement& x) {
  return ideal_contains(K, P.ideal, x);
}

inline void require_not_t_multiple(const BinaryForm& F) {
  if (F.leading().is_zero()) throw Error(ErrorCode::TProportional, "F(1, 0) = 0, so t divides F");
}

}  // namespace detail

// P divides F(1, 0) or the discriminant of F(x, 1); outside these primes every
// root modulo P lifts to exactly one root modulo each P^k.
inline bool root_lifting_prime(const NumberField& K, const BinaryForm& F, const PrimeIdeal& P) {
  return detail::divides_element(K, P, F.leading()) || detail::divides_element(K, P, form_discriminant_factor(K, F));
}

// Primes above 2 and primes dividing disc(F) F(1, 0) res(F, G).
inline bool excluded_prime(const NumberField& K, const BinaryForm& F, const BinaryForm& G, const PrimeIdeal& P) {
  return P.p == 2 || root_lifting_prime(K, F, P) || detail::divides_element(K, P, resultant(K, F, G));
}

// ---------------------------------------------------------------------------
// tau_F

inline i64 tau_local(const NumberField& K, const BinaryForm& F, const PrimeIdeal& P, int k, i64 scan_limit = 10000) {
  detail::require_not_t_multiple(F);
  if (k == 0) return 1;
  if (k == 1) return static_cast<i64>(detail::prime_roots(K, F, P).size());
  const i64 n = checked_pow(P.norm, k);
  if (n > scan_limit && !root_lifting_prime(K, F, P)) return static_cast<i64>(detail::prime_roots(K, F, P).size());
  Factorization d;
  d.parts.emplace_back(primes_above(K, P.p)->at(P.index), k);
  return static_cast<i64>(roots_mod_ideal(K, F, d, scan_limit).size());
}

// Number of residues mu modulo d with F(mu, 1) in d.
inline i64 tau_F(const NumberField& K, const BinaryForm& F, const Factorization& d, i64 scan_limit = 10000) {
  detail::require_not_t_multiple(F);
  if (d.norm() <= scan_limit) return static_cast<i64>(roots_mod_ideal(K, F, d, scan_limit).size());
  i64 r = 1;
  for (const auto& [P, k] : d.parts) {
    r *= tau_local(K, F, *P, k, scan_limit);
    if (r == 0) break;
  }
  return r;
}

inline i64 tau_F(const NumberField& K, const BinaryForm& F, const Ideal& d) {
  if (d.norm() == 0) throw Error(ErrorCode::ZeroIdeal, "tau_F of the zero ideal");
  return tau_F(K, F, factor_ideal(K, d));
}

// ---------------------------------------------------------------------------
// rho_(F,G)

// Sum over roots lambda of F(x, 1) modulo a of the Jacobi symbol
// (G(lambda, 1) / a); zero unless a is coprime to w.
inline i64 rho_FG(const NumberField& K, const BinaryForm& F, const BinaryForm& G, const Factorization& a,
                  const Factorization& w) {
  if (!fac_coprime(a, w)) return 0;
  if (a.is_unit()) return 1;
  for (const auto& [P, k] : a.parts)
    if (P->p == 2) throw Error(ErrorCode::EvenPrime, "rho at an ideal above 2 not absorbed by w");
  const Ideal mod = ideal_from_factorization(K, a);
  i64 s = 0;
  for (const auto& x : roots_mod_ideal(K, F, a)) s += jacobi(K, form_eval_affine_mod(K, G, x, mod), a);
  return s;
}

inline i64 rho_FG(const NumberField& K, const BinaryForm& F, const BinaryForm& G, const Ideal& a, const Ideal& w) {
  if (a.norm() == 0 || w.norm() == 0) throw Error(ErrorCode::ZeroIdeal, "rho of the zero ideal");
  return rho_FG(K, F, G, factor_ideal(K, a), factor_ideal(K, w));
}

struct RootSymbols {
  int plus = 0, minus = 0, zero = 0;
  int value() const { return plus - minus; }
  int nonzero() const { return plus + minus; }
};

// Legendre symbols of G(lambda, 1) over the roots lambda modulo P.
inline RootSymbols root_symbols(const NumberField& K, const BinaryForm& F, const BinaryForm& G, const PrimeIdeal& P) {
  if (P.p == 2) throw Error(ErrorCode::EvenPrime, "quadratic symbol at a prime above 2");
  RootSymbols r;
  for (const auto& x : detail::prime_roots(K, F, P)) {
    int l = legendre(K, form_eval_affine_mod(K, G, x, P.ideal), P);
    (l > 0 ? r.plus : l < 0 ? r.minus : r.zero)++;
  }
  return r;
}

// rho(P^k), by the lifted-root formula where roots lift uniquely and by
// definition elsewhere.
inline i64 rho_local(const NumberField& K, const BinaryForm& F, const BinaryForm& G, const PrimeIdeal& P, int k) {
  if (k == 0) return 1;
  if (!root_lifting_prime(K, F, P)) {
    auto r = root_symbols(K, F, G, P);
    return (k & 1) ? r.value() : r.nonzero();
  }
  Factorization a;
  a.parts.emplace_back(primes_above(K, P.p)->at(P.index), k);
  return rho_FG(K, F, G, a, Factorization{});
}

struct HenselReport {
  i64 p = 0;
  int index = 0;
  i64 norm = 0;
  int k = 1;
  bool admissible = false;  // P coprime to 2 disc(F) F(1,0) res(F,G) w
  i64 definitional = 0;     // residue scan modulo P^k
  i64 lifted = 0;           // sum over roots modulo P of (G/P)^k
  bool consistent() const { return definitional == lifted; }
};

inline HenselReport hensel_consistency(const NumberField& K, const BinaryForm& F, const BinaryForm& G,
                                       const PrimeIdeal& P, int k, const Factorization& w = {}) {
  HenselReport r;
  r.p = P.p;
  r.index = P.index;
  r.norm = P.norm;
  r.k = k;
  r.admissible = !excluded_prime(K, F, G, P) && w.exponent(P) == 0;
  if (!r.admissible) return r;
  Factorization a;
  a.parts.emplace_back(primes_above(K, P.p)->at(P.index), k);
  r.definitional = rho_FG(K, F, G, a, w);
  auto sym = root_symbols(K, F, G, P);
  r.lifted = (k & 1) ? sym.value() : sym.nonzero();
  return r;
}

// ---------------------------------------------------------------------------
// Multiplicative coefficient series.

// A multiplicative function on ideals given by its prime-power values, zero
// on ideals sharing a prime with w.
class CoefficientSeries {
 public:
  using Local = std::function<Rational(const PrimeIdeal&, int)>;
  // Closed form of sum_{k >= 1} value(P^k) N(P)^{-ks}, when available.
  using LocalSum = std::function<std::optional<double>(const PrimeIdeal&, double)>;

  CoefficientSeries(NumberField K, Factorization w, Local local, LocalSum closed = {}, std::string name = "custom")
      : K_(std::move(K)), w_(std::move(w)), local_(std::move(local)), closed_(std::move(closed)),
        name_(std::move(name)), cache_(std::make_shared<Cache>()) {}

  static CoefficientSeries rho(const NumberField& K, const BinaryForm& F, const BinaryForm& G, const Factorization& w) {
    detail::require_not_t_multiple(F);
    Local local = [K, F, G](const PrimeIdeal& P, int k) { return Rational(rho_local(K, F, G, P, k)); };
    LocalSum closed = [K, F, G](const PrimeIdeal& P, double s) -> std::optional<double> {
      if (root_lifting_prime(K, F, P)) return std::nullopt;
      auto r = root_symbols(K, F, G, P);
      const double q = std::pow(static_cast<double>(P.norm), s);
      return r.plus / (q - 1) - r.minus / (q + 1);
    };
    return CoefficientSeries(K, w, local, closed, "rho");
  }

  static CoefficientSeries tau(const NumberField& K, const BinaryForm& F, const Factorization& w = {}) {
    detail::require_not_t_multiple(F);
    Local local = [K, F](const PrimeIdeal& P, int k) { return Rational(tau_local(K, F, P, k)); };
    LocalSum closed = [K, F](const PrimeIdeal& P, double s) -> std::optional<double> {
      if (root_lifting_prime(K, F, P)) return std::nullopt;
      const double q = std::pow(static_cast<double>(P.norm), s);
      return static_cast<double>(detail::prime_roots(K, F, P).size()) / (q - 1);
    };
    return CoefficientSeries(K, w, local, closed, "tau");
  }

  // 1 on the unit ideal and 0 elsewhere.
  static CoefficientSeries unit_only(const NumberField& K) {
    return CoefficientSeries(
        K, {}, [](const PrimeIdeal&, int) { return Rational(0); },
        [](const PrimeIdeal&, double) -> std::optional<double> { return 0.0; }, "unit");
  }

  const NumberField& field() const { return K_; }
  const Factorization& modulus_w() const { return w_; }
  const std::string& name() const { return name_; }
  bool supported_at(const PrimeIdeal& P) const { return w_.exponent(P) == 0; }

  Rational local(const PrimeIdeal& P, int k) const {
    if (k == 0) return 1;
    if (!supported_at(P)) return 0;
    const auto key = std::make_tuple(P.p, P.index, k);
    {
      std::lock_guard lock(cache_->mu);
      auto it = cache_->values.find(key);
      if (it != cache_->values.end()) return it->second;
    }
    Rational v = local_(P, k);
    std::lock_guard lock(cache_->mu);
    cache_->values.emplace(key, v);
    return v;
  }

  Rational value(const Factorization& a) const {
    Rational r = 1;
    for (const auto& [P, k] : a.parts) {
      r *= local(*P, k);
      if (r == 0) break;
    }
    return r;
  }
  Rational value(const Ideal& a) const { return value(factor_ideal(K_, a)); }

  // sum_{k >= 1} value(P^k) N(P)^{-ks}; without a closed form the series is
  // cut once N(P)^k exceeds power_cutoff.
  double local_sum(const PrimeIdeal& P, double s, i64 power_cutoff = 1000000) const {
    if (!supported_at(P)) return 0;
    if (closed_)
      if (auto v = closed_(P, s)) return *v;
    double acc = 0;
    i64 n = 1;
    for (int k = 1; n <= power_cutoff / P.norm; ++k) {
      n *= P.norm;
      acc += local(P, k).get_d() * std::pow(static_cast<double>(n), -s);
    }
    return acc;
  }

 private:
  struct Cache {
    std::mutex mu;
    std::map<std::tuple<i64, int, int>, Rational> values;
  };

  NumberField K_;
  Factorization w_;
  Local local_;
  LocalSum closed_;
  std::string name_;
  std::shared_ptr<Cache> cache_;
};

namespace detail {

inline BigInt pow_big(i64 n, int s) {
  BigInt r;
  mpz_pow_ui(r.get_mpz_t(), big(n).get_mpz_t(), static_cast<unsigned long>(s));
  return r;
}

inline Rational rational_power(i64 n, int s) {
  if (s >= 0) return Rational(pow_big(n, s));
  return Rational(1) / Rational(pow_big(n, -s));
}

// Visits (factorization, norm) for ideals of norm <= X coprime to avoid.
template <class Visit>
void for_each_coprime_ideal(const NumberField& K, i64 X, const Factorization& avoid, Visit&& visit) {
  auto primes = primes_up_to_norm(K, X);
  for_each_ideal(primes, X, visit, [&](const PrimeIdeal& P) { return avoid.exponent(P) == 0; });
}

// Runs fn(i) for i in [0, n) over the given number of threads.
template <class Fn>
void parallel_for(size_t n, int jobs, Fn&& fn) {
  if (jobs <= 1 || n < 2) {
    for (size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<size_t> next{0};
  std::vector<std::thread> pool;
  std::exception_ptr failure;
  std::mutex failure_mu;
  for (int t = 0; t < jobs; ++t)
    pool.emplace_back([&] {
      try {
        for (size_t i; (i = next++) < n;) fn(i);
      } catch (...) {
        std::lock_guard lock(failure_mu);
        if (!failure) failure = std::current_exception();
        next = n;
      }
    });
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace detail

// sum_{N a <= X} value(a) / N(a)^s, exact for integer s.
inline Rational dirichlet_partial(const CoefficientSeries& series, int s, i64 X) {
  Rational acc = 0;
  detail::for_each_coprime_ideal(series.field(), X, series.modulus_w(), [&](const Factorization& a, i64 n) {
    Rational v = series.value(a);
    if (v != 0) acc += v / detail::rational_power(n, s);
  });
  return acc;
}

inline double dirichlet_partial(const CoefficientSeries& series, double s, i64 X) {
  double acc = 0;
  detail::for_each_coprime_ideal(series.field(), X, series.modulus_w(), [&](const Factorization& a, i64 n) {
    Rational v = series.value(a);
    if (v != 0) acc += v.get_d() * std::pow(static_cast<double>(n), -s);
  });
  return acc;
}

// Local sums at every prime of norm <= P, in norm order.
inline std::vector<std::pair<PrimeRef, double>> local_sums(const CoefficientSeries& series, double s, i64 P,
                                                            int jobs = 1) {
  auto primes = primes_up_to_norm(series.field(), P);
  std::vector<std::pair<PrimeRef, double>> out(primes.size());
  detail::parallel_for(primes.size(), jobs, [&](size_t i) { out[i] = {primes[i], series.local_sum(*primes[i], s)}; });
  return out;
}

// prod_{N P <= bound} (1 + local_sum(P, s)).
inline double euler_truncated(const CoefficientSeries& series, double s, i64 bound, int jobs = 1) {
  double prod = 1;
  for (const auto& [P, phi] : local_sums(series, s, bound, jobs)) {
    if (1 + phi <= 0)
      throw Error(ErrorCode::DivergenceGuard, "local factor " + std::to_string(1 + phi) + " at the prime of norm " +
                                                  std::to_string(P->norm) + " above " + std::to_string(P->p));
    prod *= 1 + phi;
  }
  return prod;
}

// prod_{P | c, P coprime to w} (1 + 1_f(P) local_sum(P, s))^{-1}.
inline double psi_factor(const CoefficientSeries& series, const MultiplicativeSpec& f, const Factorization& c, double s) {
  double prod = 1;
  for (const auto& [P, k] : c.parts) {
    if (!series.supported_at(*P)) continue;
    const double t = 1 + (1 + f.value(*P).get_d()) * series.local_sum(*P, s);
    if (t <= 0) throw Error(ErrorCode::DivergenceGuard, "twisted local factor at the prime of norm " + std::to_string(P->norm));
    prod /= t;
  }
  return prod;
}

struct TwistedSumReport {
  Rational lhs_exact;
  double lhs = 0;
  double d_rho = 0;  // truncated Euler product of the series at s = 1
  double phi = 0;    // prod (1 + f(P) Phi_P / (1 + Phi_P))
  double psi = 0;    // twist factor for c
  double rhs = 0;
  double deviation = 0;  // |lhs - rhs| / |rhs|
  double max_local = 0;  // max |1_f(P) Phi_P(1)| over the primes scanned
  bool local_bounds_ok = true;  // all of them below 1/2
  i64 first_large_norm = 0;     // norm of the first prime where the bound fails
};

// Compares sum_{N a <= X, a + c w = O} 1_f(a) rho(a) / N a with the truncated
// factorisation D(1) Phi(1) Psi_c(1) over primes of norm <= P.
inline TwistedSumReport twisted_sum_check(const CoefficientSeries& series, const MultiplicativeSpec& f,
                                          const Factorization& c, i64 X, i64 P, int jobs = 1) {
  TwistedSumReport r;
  const Factorization avoid = fac_mul(c, series.modulus_w());
  Rational acc = 0;
  detail::for_each_coprime_ideal(series.field(), X, avoid, [&](const Factorization& a, i64 n) {
    Rational v = series.value(a);
    if (v != 0) acc += one_f(f, a) * v / n;
  });
  r.lhs_exact = acc;
  r.lhs = acc.get_d();

  r.d_rho = 1;
  r.phi = 1;
  for (const auto& [Pr, phi_p] : local_sums(series, 1.0, P, jobs)) {
    if (!series.supported_at(*Pr)) continue;
    if (1 + phi_p <= 0)
      throw Error(ErrorCode::DivergenceGuard, "local factor at the prime of norm " + std::to_string(Pr->norm));
    const double fp = f.value(*Pr).get_d();
    const double twisted = std::fabs((1 + fp) * phi_p);
    if (twisted > r.max_local) r.max_local = twisted;
    if ((std::fabs(phi_p) >= 0.5 || twisted >= 0.5) && r.local_bounds_ok) {
      r.local_bounds_ok = false;
      r.first_large_norm = Pr->norm;
    }
    r.d_rho *= 1 + phi_p;
    r.phi *= 1 + fp * phi_p / (1 + phi_p);
  }
  r.psi = psi_factor(series, f, c, 1.0);
  r.rhs = r.d_rho * r.phi * r.psi;
  r.deviation = std::fabs(r.lhs - r.rhs) / std::fabs(r.rhs);
  return r;
}

// ---------------------------------------------------------------------------
// Discrete partial summation.

struct AbelHypotheses {
  double lambda0 = 0;
  double M = 0;
  double A = 0;
  double Q = 0;
  double B = 0;
};

struct AbelResult {
  double value = 0;  // sum_{n <= X} g(n) omega(n)
  double bound = 0;  // M Q (1 + X^{1-A-B} / (1 - A - B))
  double gap = 0;    // |value - lambda0 omega(1)|
  bool holds() const { return gap <= bound * (1 + 1e-12) + 1e-12; }
};

// g[n - 1] and omega[n - 1] hold the values at n; entries past the end are 0.
// The hypotheses are checked on every n up to max(len g, len omega, X).
inline AbelResult abel_transform(const std::vector<double>& g, const std::vector<double>& omega, const AbelHypotheses& h,
                                 double X) {
  if (X < 1) throw Error(ErrorCode::DomainError, "X must be at least 1");
  if (h.A < 0 || h.B < 0 || h.A + h.B >= 1) throw Error(ErrorCode::DomainError, "need A, B >= 0 and A + B < 1");
  auto at = [](const std::vector<double>& v, size_t n) { return n >= 1 && n <= v.size() ? v[n - 1] : 0.0; };
  const size_t N = std::max({g.size(), omega.size(), static_cast<size_t>(std::floor(X))});
  auto fail = [](const std::string& what, size_t n) {
    throw Error(ErrorCode::HypothesisViolated, what + " fails at n = " + std::to_string(n));
  };
  constexpr double tol = 1e-12;
  AbelResult r;
  double G = 0;
  for (size_t n = 1; n <= N; ++n) {
    const double nn = static_cast<double>(n);
    if (nn >= X && at(omega, n) != 0) fail("omega(n) = 0 for n >= X", n);
    if (std::fabs(at(omega, n) - at(omega, n + 1)) > h.Q * std::pow(nn, -h.B) * (1 + tol) + tol)
      fail("|omega(n) - omega(n+1)| <= Q n^-B", n);
    G += at(g, n);
    if (std::fabs(G - h.lambda0) > h.M * std::pow(nn, -h.A) * (1 + tol) + tol) fail("|G(n) - lambda0| <= M n^-A", n);
    if (nn <= X) r.value += at(g, n) * at(omega, n);
  }
  const double e = 1 - h.A - h.B;
  r.bound = h.M * h.Q * (1 + std::pow(X, e) / e);
  r.gap = std::fabs(r.value - h.lambda0 * at(omega, 1));
  return r;
}

// ---------------------------------------------------------------------------
// Prime root density.

struct PrimeRootDensity {
  double sum = 0;  // sum_{N P <= X} tau_F(P) log N P / N P
  double log_x = 0;
  i64 primes = 0;
  double deviation() const { return sum - log_x; }
};

inline PrimeRootDensity prime_root_density(const NumberField& K, const BinaryForm& F, i64 X, int jobs = 1) {
  detail::require_not_t_multiple(F);
  auto primes = primes_up_to_norm(K, X);
  std::vector<double> terms(primes.size());
  detail::parallel_for(primes.size(), jobs, [&](size_t i) {
    const double n = static_cast<double>(primes[i]->norm);
    terms[i] = static_cast<double>(detail::prime_roots(K, F, *primes[i]).size()) * std::log(n) / n;
  });
  PrimeRootDensity r;
  for (double t : terms) r.sum += t;
  r.log_x = std::log(static_cast<double>(X));
  r.primes = static_cast<i64>(primes.size());
  return r;
}

// ---------------------------------------------------------------------------
// Per-prime table of rho.

struct RhoRow {
  i64 p = 0;
  int index = 0;
  i64 norm = 0;
  bool in_w = false;
  RootSymbols symbols;
  i64 rho = 0;
};

inline std::vector<RhoRow> rho_table(const NumberField& K, const BinaryForm& F, const BinaryForm& G,
                                     const Factorization& w, i64 bound, int jobs = 1) {
  auto primes = primes_up_to_norm(K, bound);
  std::vector<RhoRow> rows(primes.size());
  detail::parallel_for(primes.size(), jobs, [&](size_t i) {
    const PrimeIdeal& P = *primes[i];
    RhoRow& row = rows[i];
    row.p = P.p;
    row.index = P.index;
    row.norm = P.norm;
    row.in_w = w.exponent(P) > 0;
    if (row.in_w) return;
    row.symbols = root_symbols(K, F, G, P);
    row.rho = row.symbols.value();
  });
  return rows;
}

}  // namespace binform
