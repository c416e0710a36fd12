#pragma once

// Integral ideals of O_K in Hermite normal form, prime ideals from the
// factorization of the minimal polynomial modulo p, valuations, quadratic
// residue symbols and the Chinese remainder theorem.

#include <algorithm>
#include <deque>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <utility>
#include <vector>

#include "binform/hnf.hpp"
#include "binform/number_field.hpp"
#include "binform/poly_fp.hpp"

namespace binform {

struct Ideal {
  Hnf hnf;

  i64 norm() const { return hnf.determinant(); }
  bool is_unit() const { return norm() == 1; }

  friend bool operator==(const Ideal& a, const Ideal& b) { return a.hnf == b.hnf; }
  friend bool operator<(const Ideal& a, const Ideal& b) {
    i64 na = a.norm(), nb = b.norm();
    if (na != nb) return na < nb;
    return a.hnf < b.hnf;
  }
};

struct PrimeIdeal {
  i64 p = 0;
  int f = 1;      // residue degree
  int e = 1;      // ramification index
  int index = 0;  // position among the primes above p
  PolyFp local_poly;  // monic irreducible factor of the minimal polynomial mod p
  i64 residue_root = 0;  // theta mod this prime when f == 1
  i64 norm = 0;
  Ideal ideal;

  // Cached powers; powers[k - 1] is the k-th power.
  mutable std::mutex power_mu;
  mutable std::deque<Ideal> powers;
};

using PrimeRef = std::shared_ptr<const PrimeIdeal>;
using PrimeList = std::shared_ptr<const std::vector<PrimeRef>>;

struct PrimeTable {
  std::mutex mu;
  std::map<i64, PrimeList> by_p;
  Ideal unit;
};

inline bool same_prime(const PrimeIdeal& a, const PrimeIdeal& b) { return a.p == b.p && a.index == b.index; }
inline bool prime_less(const PrimeIdeal& a, const PrimeIdeal& b) {
  return a.p != b.p ? a.p < b.p : a.index < b.index;
}

// Factorization into prime ideals, sorted by (p, index).
struct Factorization {
  std::vector<std::pair<PrimeRef, int>> parts;

  bool is_unit() const { return parts.empty(); }
  i64 norm() const {
    i64 n = 1;
    for (const auto& [P, k] : parts) n = checked_mul(n, checked_pow(P->norm, k));
    return n;
  }
  int exponent(const PrimeIdeal& P) const {
    for (const auto& [Q, k] : parts)
      if (same_prime(*Q, P)) return k;
    return 0;
  }
  void normalize() {
    std::sort(parts.begin(), parts.end(), [](const auto& a, const auto& b) { return prime_less(*a.first, *b.first); });
    std::vector<std::pair<PrimeRef, int>> merged;
    for (auto& pk : parts) {
      if (!merged.empty() && same_prime(*merged.back().first, *pk.first))
        merged.back().second += pk.second;
      else
        merged.push_back(pk);
    }
    std::erase_if(merged, [](const auto& pk) { return pk.second == 0; });
    parts = std::move(merged);
  }
  friend bool operator==(const Factorization& a, const Factorization& b) {
    if (a.parts.size() != b.parts.size()) return false;
    for (size_t i = 0; i < a.parts.size(); ++i)
      if (!same_prime(*a.parts[i].first, *b.parts[i].first) || a.parts[i].second != b.parts[i].second) return false;
    return true;
  }
};

inline Factorization fac_mul(const Factorization& a, const Factorization& b) {
  Factorization r;
  r.parts = a.parts;
  r.parts.insert(r.parts.end(), b.parts.begin(), b.parts.end());
  r.normalize();
  return r;
}

// Whether a divides b.
inline bool fac_divides(const Factorization& a, const Factorization& b) {
  for (const auto& [P, k] : a.parts)
    if (b.exponent(*P) < k) return false;
  return true;
}

inline bool fac_coprime(const Factorization& a, const Factorization& b) {
  for (const auto& [P, k] : a.parts)
    if (b.exponent(*P) > 0) return false;
  return true;
}

inline Factorization fac_quotient(const Factorization& a, const Factorization& b) {
  Factorization r;
  for (const auto& [P, k] : a.parts) {
    int d = k - b.exponent(*P);
    if (d < 0) throw Error(ErrorCode::PreconditionFailed, "quotient of non-dividing ideals");
    if (d > 0) r.parts.emplace_back(P, d);
  }
  return r;
}

inline Factorization fac_lcm(const Factorization& a, const Factorization& b) {
  Factorization r = a;
  for (const auto& [P, k] : b.parts) {
    int ea = a.exponent(*P);
    if (ea == 0)
      r.parts.emplace_back(P, k);
    else
      for (auto& pk : r.parts)
        if (same_prime(*pk.first, *P)) pk.second = std::max(pk.second, k);
  }
  r.normalize();
  return r;
}

inline Factorization fac_gcd(const Factorization& a, const Factorization& b) {
  Factorization r;
  for (const auto& [P, k] : a.parts) {
    int kb = b.exponent(*P);
    if (kb > 0) r.parts.emplace_back(P, std::min(k, kb));
  }
  return r;
}

inline Factorization fac_pow(const Factorization& a, int k) {
  Factorization r = a;
  for (auto& pk : r.parts) pk.second *= k;
  r.normalize();
  return r;
}

// ---------------------------------------------------------------------------
// Ideals as lattices.

inline std::vector<i64> coords(const NumberField& K, const FieldElement& x) {
  return std::vector<i64>(x.c.begin(), x.c.begin() + K.degree());
}

inline FieldElement column_element(const Ideal& a, int j) { return FieldElement::from_coords(a.hnf.column(j)); }

inline Ideal unit_ideal(const NumberField& K) { return Ideal{Hnf::identity(K.degree())}; }

inline Ideal ideal_from_generators(const NumberField& K, const std::vector<FieldElement>& gens) {
  i64 D = 0;
  std::vector<std::vector<i64>> zgens;
  for (const auto& g : gens) {
    if (g.is_zero()) continue;
    D = std::gcd(D, iabs(K.norm(g)));
    for (const auto& col : K.multiplication_matrix(g)) zgens.push_back(col);
  }
  if (D == 0) throw Error(ErrorCode::ZeroIdeal, "all generators are zero");
  return Ideal{hnf_mod(K.degree(), zgens, D)};
}

inline Ideal principal_ideal(const NumberField& K, const FieldElement& x) { return ideal_from_generators(K, {x}); }
inline Ideal rational_ideal(const NumberField& K, i64 n) { return principal_ideal(K, FieldElement::from_int(n)); }

inline bool ideal_contains(const NumberField& K, const Ideal& a, const FieldElement& x) {
  return a.hnf.contains(std::span<const i64>(x.c.data(), K.degree()));
}

// Whether a divides b, i.e. b is contained in a.
inline bool ideal_divides(const Ideal& a, const Ideal& b) {
  if (b.norm() % a.norm() != 0) return false;
  return a.hnf.contains_lattice(b.hnf);
}

inline Ideal ideal_mul(const NumberField& K, const Ideal& a, const Ideal& b) {
  const int m = K.degree();
  if (a.is_unit()) return b;
  if (b.is_unit()) return a;
  std::vector<std::vector<i64>> gens;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) gens.push_back(coords(K, K.mul(column_element(a, i), column_element(b, j))));
  return Ideal{hnf_mod(m, gens, checked_mul(a.norm(), b.norm()))};
}

inline Ideal ideal_sum(const NumberField& K, const Ideal& a, const Ideal& b) {
  const int m = K.degree();
  std::vector<std::vector<i64>> gens;
  for (int i = 0; i < m; ++i) {
    gens.push_back(coords(K, column_element(a, i)));
    gens.push_back(coords(K, column_element(b, i)));
  }
  return Ideal{hnf_mod(m, gens, std::gcd(a.norm(), b.norm()))};
}

inline bool ideals_coprime(const NumberField& K, const Ideal& a, const Ideal& b) {
  if (std::gcd(a.norm(), b.norm()) == 1) return true;
  return ideal_sum(K, a, b).is_unit();
}

inline Ideal ideal_pow(const NumberField& K, const Ideal& a, int k) {
  Ideal r = unit_ideal(K);
  for (int i = 0; i < k; ++i) r = ideal_mul(K, r, a);
  return r;
}

// Canonical representative of x modulo a.
inline FieldElement ideal_reduce(const NumberField& K, const Ideal& a, const FieldElement& x) {
  FieldElement r = x;
  a.hnf.reduce(std::span<i64>(r.c.data(), K.degree()));
  return r;
}

// x * y reduced modulo a without intermediate overflow for moderate moduli.
inline FieldElement mul_mod(const NumberField& K, const Ideal& a, const FieldElement& x, const FieldElement& y) {
  return ideal_reduce(K, a, K.mul(ideal_reduce(K, a, x), ideal_reduce(K, a, y)));
}

// ---------------------------------------------------------------------------
// Prime ideals.

inline PrimeTable& NumberField::prime_table() const {
  std::call_once(impl_->prime_once, [this] {
    impl_->primes = std::make_shared<PrimeTable>();
    impl_->primes->unit = Ideal{Hnf::identity(impl_->m)};
  });
  return *impl_->primes;
}

inline FieldElement eval_poly_at_theta(const NumberField& K, const std::vector<i64>& g) {
  FieldElement r;
  for (size_t i = g.size(); i-- > 0;) r = K.add(K.mul(r, K.theta()), FieldElement::from_int(g[i]));
  return r;
}

// Primes above a rational prime p, from the factorization of the minimal
// polynomial modulo p.  Memoized per field.
inline PrimeList primes_above(const NumberField& K, i64 p) {
  PrimeTable& table = K.prime_table();
  {
    std::lock_guard<std::mutex> lock(table.mu);
    auto it = table.by_p.find(p);
    if (it != table.by_p.end()) return it->second;
  }
  const int m = K.degree();
  auto factors = fp::factor(fp::from_integers(K.minpoly(), static_cast<u64>(p)), static_cast<u64>(p));
  auto list = std::make_shared<std::vector<PrimeRef>>();
  int index = 0;
  for (auto& [g, e] : factors) {
    auto P = std::make_shared<PrimeIdeal>();
    P->p = p;
    P->f = fp::deg(g);
    P->e = e;
    P->index = index++;
    P->local_poly = g;
    P->norm = checked_pow(p, P->f);
    if (P->f == 1) P->residue_root = mod_floor(-static_cast<i64>(g[0]), p);
    std::vector<i64> gi(g.begin(), g.end());
    FieldElement gt = eval_poly_at_theta(K, gi);
    std::vector<std::vector<i64>> zgens;
    for (const auto& col : K.multiplication_matrix(gt)) zgens.push_back(col);
    for (int j = 0; j < m; ++j) {
      std::vector<i64> v(m, 0);
      v[j] = p;
      zgens.push_back(v);
    }
    P->ideal = Ideal{hnf_mod(m, zgens, p)};
    if (P->ideal.norm() != P->norm)
      throw Error(ErrorCode::PreconditionFailed,
                  "Z[theta] is not maximal at p = " + std::to_string(p) + " (Kummer-Dedekind fails)");
    list->push_back(P);
  }
  std::lock_guard<std::mutex> lock(table.mu);
  auto [it, inserted] = table.by_p.emplace(p, list);
  return it->second;
}

inline const Ideal& prime_power(const NumberField& K, const PrimeIdeal& P, int k) {
  if (k <= 0) return K.prime_table().unit;
  std::lock_guard<std::mutex> lock(P.power_mu);
  if (P.powers.empty()) P.powers.push_back(P.ideal);
  while (static_cast<int>(P.powers.size()) < k) P.powers.push_back(ideal_mul(K, P.powers.back(), P.ideal));
  return P.powers[k - 1];
}

inline std::vector<std::pair<PrimeRef, int>> factor_rational_prime(const NumberField& K, i64 p) {
  std::vector<std::pair<PrimeRef, int>> out;
  for (const auto& P : *primes_above(K, p)) out.emplace_back(P, P->e);
  return out;
}

// Valuation of a nonzero element.
inline int valuation(const NumberField& K, const PrimeIdeal& P, const FieldElement& x) {
  if (x.is_zero()) throw Error(ErrorCode::ZeroIdeal, "valuation of zero");
  if (K.degree() == 1) {
    i64 v = iabs(x.c[0]);
    int k = 0;
    while (v % P.p == 0) {
      v /= P.p;
      ++k;
    }
    return k;
  }
  BigInt n = abs(K.norm_big(x));
  int vp = 0;
  BigInt bp = big(P.p);
  while (n % bp == 0) {
    n /= bp;
    ++vp;
  }
  int bound = vp / P.f;
  int k = 0;
  while (k < bound && ideal_contains(K, prime_power(K, P, k + 1), x)) ++k;
  return k;
}

inline int valuation(const NumberField& K, const PrimeIdeal& P, const Ideal& a) {
  i64 n = a.norm();
  int vp = 0;
  while (n % P.p == 0) {
    n /= P.p;
    ++vp;
  }
  int bound = vp / P.f;
  int k = 0;
  while (k < bound && ideal_divides(prime_power(K, P, k + 1), a)) ++k;
  return k;
}

inline Factorization factor_ideal(const NumberField& K, const Ideal& a) {
  Factorization out;
  for (auto [p, e] : Factorizer::shared()->factor(static_cast<u64>(a.norm()))) {
    for (const auto& P : *primes_above(K, static_cast<i64>(p))) {
      int v = valuation(K, *P, a);
      if (v > 0) out.parts.emplace_back(P, v);
    }
  }
  return out;
}

// Factorization of the principal ideal (x), x nonzero.
inline Factorization factor_element(const NumberField& K, const FieldElement& x, const Factorizer* fz = nullptr) {
  if (x.is_zero()) throw Error(ErrorCode::ZeroIdeal, "factorization of zero");
  Factorization out;
  BigInt n = abs(K.norm_big(x));
  if (!n.fits_ulong_p()) throw Error(ErrorCode::Overflow, "norm too large to factor");
  if (!fz) fz = Factorizer::shared().get();
  for (auto [p, e] : fz->factor(n.get_ui())) {
    auto ps = primes_above(K, static_cast<i64>(p));
    if (ps->size() == 1 && (*ps)[0]->e == 1) {
      out.parts.emplace_back((*ps)[0], e / (*ps)[0]->f);
      continue;
    }
    for (const auto& P : *ps) {
      int v = valuation(K, *P, x);
      if (v > 0) out.parts.emplace_back(P, v);
    }
  }
  return out;
}

inline Ideal ideal_from_factorization(const NumberField& K, const Factorization& fac) {
  Ideal r = unit_ideal(K);
  for (const auto& [P, k] : fac.parts) r = ideal_mul(K, r, prime_power(K, *P, k));
  return r;
}

inline Ideal ideal_intersect(const NumberField& K, const Ideal& a, const Ideal& b) {
  return ideal_from_factorization(K, fac_lcm(factor_ideal(K, a), factor_ideal(K, b)));
}

// All prime ideals of norm at most B, sorted by (norm, p, index).
inline std::vector<PrimeRef> primes_up_to_norm(const NumberField& K, i64 B) {
  std::vector<PrimeRef> out;
  for (i64 p : primes_up_to(B))
    for (const auto& P : *primes_above(K, p))
      if (P->norm <= B) out.push_back(P);
  std::sort(out.begin(), out.end(), [](const PrimeRef& a, const PrimeRef& b) {
    if (a->norm != b->norm) return a->norm < b->norm;
    return prime_less(*a, *b);
  });
  return out;
}

// Visits the factorization of every integral ideal of norm at most B,
// starting with the unit ideal.  Primes may be restricted by a predicate.
template <class Visit, class Allow>
void for_each_ideal(const std::vector<PrimeRef>& primes, i64 B, Visit&& visit, Allow&& allow, bool squarefree = false) {
  Factorization cur;
  visit(static_cast<const Factorization&>(cur), i64{1});
  std::function<void(size_t, i64)> rec = [&](size_t start, i64 norm) {
    for (size_t i = start; i < primes.size(); ++i) {
      const auto& P = primes[i];
      if (norm > B / P->norm) break;
      if (!allow(*P)) continue;
      i64 n = norm;
      int k = 0;
      while (n <= B / P->norm) {
        n *= P->norm;
        ++k;
        cur.parts.emplace_back(P, k);
        visit(static_cast<const Factorization&>(cur), n);
        rec(i + 1, n);
        cur.parts.pop_back();
        if (squarefree) break;
      }
    }
  };
  rec(0, 1);
}

template <class Visit>
void for_each_ideal(const std::vector<PrimeRef>& primes, i64 B, Visit&& visit) {
  for_each_ideal(primes, B, std::forward<Visit>(visit), [](const PrimeIdeal&) { return true; });
}

// Integral ideals of norm at most B, sorted by norm then HNF.
inline std::vector<Ideal> enumerate_ideals(const NumberField& K, i64 B) {
  std::vector<Ideal> out;
  auto primes = primes_up_to_norm(K, B);
  for_each_ideal(primes, B, [&](const Factorization& f, i64) {
    Factorization sorted = f;
    sorted.normalize();
    out.push_back(ideal_from_factorization(K, sorted));
  });
  std::sort(out.begin(), out.end());
  return out;
}

// ---------------------------------------------------------------------------
// Arithmetic functions.

inline int mobius(const Factorization& f) {
  int s = 1;
  for (const auto& [P, k] : f.parts) {
    if (k > 1) return 0;
    s = -s;
  }
  return s;
}

inline i64 divisor_count(const Factorization& f) {
  i64 t = 1;
  for (const auto& [P, k] : f.parts) t = checked_mul(t, k + 1);
  return t;
}

inline i64 totient(const Factorization& f) {
  i64 t = 1;
  for (const auto& [P, k] : f.parts) t = checked_mul(t, checked_mul(checked_pow(P->norm, k - 1), P->norm - 1));
  return t;
}

// Visits every divisor of f.
template <class Visit>
void for_each_divisor(const Factorization& f, Visit&& visit) {
  Factorization cur;
  std::function<void(size_t)> rec = [&](size_t i) {
    if (i == f.parts.size()) {
      visit(static_cast<const Factorization&>(cur));
      return;
    }
    rec(i + 1);
    for (int k = 1; k <= f.parts[i].second; ++k) {
      cur.parts.emplace_back(f.parts[i].first, k);
      rec(i + 1);
      cur.parts.pop_back();
    }
  };
  rec(0);
}

// ---------------------------------------------------------------------------
// Residues and quadratic symbols.

// x mod P as an integer in [0, p) when P has residue degree 1.
inline i64 residue_degree_one(const NumberField& K, const PrimeIdeal& P, const FieldElement& x) {
  const u64 p = static_cast<u64>(P.p);
  u64 r = static_cast<u64>(P.residue_root), acc = 0;
  for (int i = K.degree() - 1; i >= 0; --i)
    acc = (mulmod(acc, r, p) + static_cast<u64>(mod_floor(x.c[i], P.p))) % p;
  return static_cast<i64>(acc);
}

inline FiniteField residue_field(const PrimeIdeal& P) { return FiniteField(static_cast<u64>(P.p), P.local_poly); }

inline FiniteField::Elem residue(const NumberField& K, const FiniteField& F, const FieldElement& x) {
  PolyFp a(K.degree());
  for (int i = 0; i < K.degree(); ++i) a[i] = static_cast<u64>(mod_floor(x.c[i], static_cast<i64>(F.characteristic())));
  fp::trim(a);
  return F.reduce(a);
}

// Lifts a residue-field element back to O_K.
inline FieldElement lift_residue(const NumberField& K, const FiniteField::Elem& e) {
  FieldElement r;
  for (size_t i = 0; i < e.size(); ++i) r.c[i] = static_cast<i64>(e[i]);
  (void)K;
  return r;
}

inline int legendre(const NumberField& K, const FieldElement& a, const PrimeIdeal& P) {
  if (P.p == 2) throw Error(ErrorCode::EvenPrime, "quadratic symbol at a prime above 2");
  if (P.f == 1) return jacobi_symbol(residue_degree_one(K, P, a), P.p);
  FiniteField F = residue_field(P);
  return F.quadratic_character(residue(K, F, a));
}

inline int jacobi(const NumberField& K, const FieldElement& a, const Factorization& b) {
  int s = 1;
  for (const auto& [P, k] : b.parts) {
    if (P->p == 2) throw Error(ErrorCode::EvenPrime, "Jacobi symbol modulo an ideal above 2");
    int l = legendre(K, a, *P);
    if (l == 0) return 0;
    if (l == -1 && (k & 1)) s = -s;
  }
  return s;
}

inline int jacobi(const NumberField& K, const FieldElement& a, const Ideal& b) { return jacobi(K, a, factor_ideal(K, b)); }

// ---------------------------------------------------------------------------
// Chinese remainder theorem and inverses.

namespace detail {

inline FieldElement reduce_big(const NumberField& K, const Ideal& a, std::vector<BigInt> v) {
  const int m = K.degree();
  for (int j = 0; j < m; ++j) {
    BigInt piv = big(a.hnf.pivot(j));
    BigInt q;
    mpz_fdiv_q(q.get_mpz_t(), v[j].get_mpz_t(), piv.get_mpz_t());
    if (q == 0) continue;
    for (int i = j; i < m; ++i) v[i] -= q * big(a.hnf.at(i, j));
  }
  FieldElement r;
  for (int i = 0; i < m; ++i) r.c[i] = to_i64(v[i]);
  return r;
}

inline std::vector<std::vector<i64>> ideal_columns(const NumberField& K, const Ideal& a) {
  std::vector<std::vector<i64>> cols;
  for (int j = 0; j < K.degree(); ++j) {
    auto c = a.hnf.column(j);
    cols.emplace_back(c.begin(), c.end());
  }
  return cols;
}

}  // namespace detail

// An element e of a with 1 - e in b, reduced modulo ab.
inline FieldElement idempotent(const NumberField& K, const Ideal& a, const Ideal& b, const Ideal& ab) {
  const int m = K.degree();
  auto acols = detail::ideal_columns(K, a);
  std::vector<i64> one(m, 0);
  one[0] = 1;
  auto coeff = split_target(m, acols, detail::ideal_columns(K, b), one);
  if (!coeff) throw Error(ErrorCode::NotCoprime, "moduli are not coprime");
  std::vector<BigInt> v(m, 0);
  for (int k = 0; k < m; ++k)
    for (int i = 0; i < m; ++i) v[i] += (*coeff)[k] * big(acols[k][i]);
  return detail::reduce_big(K, ab, v);
}

struct CrtResult {
  FieldElement value;
  Ideal modulus;
};

inline CrtResult crt_combine(const NumberField& K, const std::vector<std::pair<FieldElement, Ideal>>& congruences) {
  for (size_t i = 0; i < congruences.size(); ++i)
    for (size_t j = i + 1; j < congruences.size(); ++j)
      if (!ideals_coprime(K, congruences[i].second, congruences[j].second))
        throw Error(ErrorCode::NotCoprime, "CRT moduli are not pairwise coprime");
  CrtResult acc{FieldElement{}, unit_ideal(K)};
  for (const auto& [x, b] : congruences) {
    Ideal ab = ideal_mul(K, acc.modulus, b);
    FieldElement e = idempotent(K, acc.modulus, b, ab);  // 0 mod acc, 1 mod b
    FieldElement one_minus_e = ideal_reduce(K, ab, K.sub(K.one(), e));
    FieldElement v = K.add(mul_mod(K, ab, x, e), mul_mod(K, ab, acc.value, one_minus_e));
    acc.value = ideal_reduce(K, ab, v);
    acc.modulus = ab;
  }
  return acc;
}

// u with u * x = 1 modulo a.
inline FieldElement inverse_mod(const NumberField& K, const FieldElement& x, const Ideal& a) {
  const int m = K.degree();
  auto xcols = K.multiplication_matrix(x);
  std::vector<i64> one(m, 0);
  one[0] = 1;
  auto coeff = split_target(m, xcols, detail::ideal_columns(K, a), one);
  if (!coeff) throw Error(ErrorCode::NotCoprime, "element is not invertible modulo the ideal");
  std::vector<BigInt> v(m, 0);
  for (int k = 0; k < m; ++k) {
    // theta^k in coordinates
    FieldElement tk = K.pow(K.theta(), k);
    for (int i = 0; i < m; ++i) v[i] += (*coeff)[k] * big(tk.c[i]);
  }
  return detail::reduce_big(K, a, v);
}

// The residue ring O_K / a, enumerated by canonical representatives.
class ResidueRing {
 public:
  ResidueRing(const NumberField& K, Ideal modulus) : K_(K), mod_(std::move(modulus)) {}
  i64 size() const { return mod_.norm(); }
  const Ideal& modulus() const { return mod_; }
  FieldElement reduce(const FieldElement& x) const { return ideal_reduce(K_, mod_, x); }
  bool is_zero(const FieldElement& x) const { return ideal_contains(K_, mod_, x); }

  template <class Visit>
  void for_each(Visit&& visit) const {
    const int m = K_.degree();
    FieldElement cur;
    std::function<void(int)> rec = [&](int j) {
      if (j == m) {
        visit(static_cast<const FieldElement&>(cur));
        return;
      }
      for (i64 v = 0; v < mod_.hnf.pivot(j); ++v) {
        cur.c[j] = v;
        rec(j + 1);
      }
      cur.c[j] = 0;
    };
    rec(0);
  }

 private:
  NumberField K_;
  Ideal mod_;
};

// Search for a generator g of a principal ideal with max_v |g|_v at most
// bound_factor * N(a)^{1/m}; picks the smallest such maximum, ties going to
// the lexicographically greatest coordinate vector.
inline FieldElement principal_generator(const NumberField& K, const Ideal& a, double bound_factor = 4.0) {
  const int m = K.degree();
  const double B = bound_factor * std::pow(static_cast<double>(a.norm()), 1.0 / m);
  const auto& Minv = K.inverse_embedding_matrix();
  std::vector<i64> lo(m), hi(m), base(m, 0);
  for (int j = 0; j < m; ++j) {
    double s = 0;
    for (int k = 0; k < m; ++k) s += std::fabs(Minv[j][k]) * B;
    hi[j] = static_cast<i64>(std::floor(s + 1e-9));
    lo[j] = -hi[j];
  }
  const i64 target = a.norm();
  std::optional<FieldElement> best;
  double best_max = 0;
  enumerate_coset(a.hnf, base, lo, hi, [&](std::span<const i64> v) {
    FieldElement g = FieldElement::from_coords(v);
    if (g.is_zero()) return;
    double mx = 0;
    for (int pl = 0; pl < K.num_places(); ++pl) mx = std::max(mx, K.abs_at(g, pl));
    if (mx > B * (1 + 1e-12)) return;
    if (iabs(K.norm(g)) != target) return;
    if (!best || mx < best_max * (1 - 1e-12) || (std::fabs(mx - best_max) <= 1e-12 * best_max && g > *best)) {
      best = g;
      best_max = mx;
    }
  });
  if (!best) throw Error(ErrorCode::GeneratorNotFound, "no generator within the search bound");
  return *best;
}

}  // namespace binform
