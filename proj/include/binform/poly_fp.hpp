#pragma once

// Dense polynomials over F_p, their factorization, finite fields F_p[y]/(h)
// and root finding over those fields.

#include <algorithm>
#include <random>
#include <utility>
#include <vector>

#include "binform/integer.hpp"

namespace binform {

// Coefficients in increasing degree; the zero polynomial is empty.
using PolyFp = std::vector<u64>;

namespace fp {

inline void trim(PolyFp& a) {
  while (!a.empty() && a.back() == 0) a.pop_back();
}

inline int deg(const PolyFp& a) { return static_cast<int>(a.size()) - 1; }

inline PolyFp from_integers(const std::vector<i64>& c, u64 p) {
  PolyFp r(c.size());
  for (size_t i = 0; i < c.size(); ++i) r[i] = static_cast<u64>(mod_floor(c[i], static_cast<i64>(p)));
  trim(r);
  return r;
}

inline PolyFp add(const PolyFp& a, const PolyFp& b, u64 p) {
  PolyFp r(std::max(a.size(), b.size()), 0);
  for (size_t i = 0; i < a.size(); ++i) r[i] = a[i];
  for (size_t i = 0; i < b.size(); ++i) r[i] = (r[i] + b[i]) % p;
  trim(r);
  return r;
}

inline PolyFp sub(const PolyFp& a, const PolyFp& b, u64 p) {
  PolyFp r(std::max(a.size(), b.size()), 0);
  for (size_t i = 0; i < a.size(); ++i) r[i] = a[i];
  for (size_t i = 0; i < b.size(); ++i) r[i] = (r[i] + p - b[i]) % p;
  trim(r);
  return r;
}

inline PolyFp mul(const PolyFp& a, const PolyFp& b, u64 p) {
  if (a.empty() || b.empty()) return {};
  PolyFp r(a.size() + b.size() - 1, 0);
  for (size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0) continue;
    for (size_t j = 0; j < b.size(); ++j) r[i + j] = (r[i + j] + mulmod(a[i], b[j], p)) % p;
  }
  trim(r);
  return r;
}

inline PolyFp scale(const PolyFp& a, u64 c, u64 p) {
  PolyFp r(a.size());
  for (size_t i = 0; i < a.size(); ++i) r[i] = mulmod(a[i], c, p);
  trim(r);
  return r;
}

// Returns (quotient, remainder); b must be nonzero.
inline std::pair<PolyFp, PolyFp> divmod(const PolyFp& a, const PolyFp& b, u64 p) {
  PolyFp r = a;
  int db = deg(b);
  if (deg(r) < db) return {{}, r};
  PolyFp q(r.size() - b.size() + 1, 0);
  u64 inv_lead = invmod(b.back(), p);
  for (int i = deg(r); i >= db; --i) {
    u64 c = mulmod(r[i], inv_lead, p);
    q[i - db] = c;
    if (c == 0) continue;
    for (int j = 0; j <= db; ++j) r[i - db + j] = (r[i - db + j] + p - mulmod(c, b[j], p)) % p;
  }
  r.resize(db);
  trim(r);
  trim(q);
  return {q, r};
}

inline PolyFp mod(const PolyFp& a, const PolyFp& b, u64 p) { return divmod(a, b, p).second; }

inline PolyFp monic(const PolyFp& a, u64 p) {
  if (a.empty()) return a;
  return scale(a, invmod(a.back(), p), p);
}

inline PolyFp gcd(PolyFp a, PolyFp b, u64 p) {
  while (!b.empty()) {
    PolyFp r = mod(a, b, p);
    a = std::move(b);
    b = std::move(r);
  }
  return monic(a, p);
}

inline PolyFp powmod(PolyFp base, u64 e, const PolyFp& m, u64 p) {
  PolyFp r{1 % p};
  trim(r);
  base = mod(base, m, p);
  while (e) {
    if (e & 1) r = mod(mul(r, base, p), m, p);
    base = mod(mul(base, base, p), m, p);
    e >>= 1;
  }
  return mod(r, m, p);
}

inline PolyFp derivative(const PolyFp& a, u64 p) {
  if (a.size() <= 1) return {};
  PolyFp r(a.size() - 1);
  for (size_t i = 1; i < a.size(); ++i) r[i - 1] = mulmod(a[i], i % p, p);
  trim(r);
  return r;
}

inline u64 eval(const PolyFp& a, u64 x, u64 p) {
  u64 r = 0;
  for (size_t i = a.size(); i-- > 0;) r = (mulmod(r, x, p) + a[i]) % p;
  return r;
}

// Factorization of a monic squarefree polynomial whose irreducible factors
// all have degree d (Cantor-Zassenhaus; p odd uses (q-1)/2 powers, p = 2 the
// trace map).
inline void equal_degree_split(const PolyFp& f, int d, u64 p, std::mt19937_64& rng,
                               std::vector<PolyFp>& out) {
  if (deg(f) == d) {
    out.push_back(f);
    return;
  }
  if (deg(f) <= 0) return;
  std::uniform_int_distribution<u64> dist(0, p - 1);
  while (true) {
    PolyFp a(deg(f));
    for (auto& c : a) c = dist(rng);
    trim(a);
    if (deg(a) < 1) continue;
    PolyFp g = gcd(f, a, p);
    if (deg(g) > 0 && deg(g) < deg(f)) {
      equal_degree_split(g, d, p, rng, out);
      equal_degree_split(divmod(f, g, p).first, d, p, rng, out);
      return;
    }
    PolyFp b;
    if (p == 2) {
      PolyFp t = a, acc = a;
      for (int i = 1; i < d; ++i) {
        t = mod(mul(t, t, p), f, p);
        acc = add(acc, t, p);
      }
      b = acc;
    } else {
      u64 qd = 1;
      for (int i = 0; i < d; ++i) qd *= p;
      b = powmod(a, (qd - 1) / 2, f, p);
      b = sub(b, PolyFp{1}, p);
    }
    g = gcd(f, b, p);
    if (deg(g) > 0 && deg(g) < deg(f)) {
      equal_degree_split(g, d, p, rng, out);
      equal_degree_split(divmod(f, g, p).first, d, p, rng, out);
      return;
    }
  }
}

// Irreducible factors of a monic squarefree polynomial.
inline std::vector<PolyFp> factor_squarefree(const PolyFp& f_in, u64 p, std::mt19937_64& rng) {
  std::vector<PolyFp> out;
  PolyFp f = f_in;
  PolyFp x{0, 1};
  PolyFp h = mod(x, f, p);
  for (int d = 1; deg(f) >= 2 * d; ++d) {
    h = powmod(h, p, f, p);
    PolyFp g = gcd(f, sub(h, mod(x, f, p), p), p);
    if (deg(g) > 0) {
      equal_degree_split(g, d, p, rng, out);
      f = divmod(f, g, p).first;
      h = mod(h, f, p);
    }
  }
  if (deg(f) > 0) out.push_back(monic(f, p));
  return out;
}

// Irreducible monic factors with multiplicities, sorted by degree then
// coefficients.
inline std::vector<std::pair<PolyFp, int>> factor(const PolyFp& f_in, u64 p) {
  std::mt19937_64 rng(0x9e3779b97f4a7c15ULL ^ p);
  std::vector<std::pair<PolyFp, int>> result;
  PolyFp f = monic(f_in, p);
  if (deg(f) <= 0) return result;
  // Peel off repeated factors by trial division with the squarefree part's
  // factors; degrees here are small.
  PolyFp df = derivative(f, p);
  std::vector<PolyFp> irreducibles;
  if (df.empty()) {
    // f is a p-th power: f(x) = g(x^p).
    PolyFp g(f.size() / p + 1, 0);
    for (size_t i = 0; i < f.size(); i += p) g[i / p] = f[i];
    trim(g);
    for (auto& [h, e] : factor(g, p)) irreducibles.push_back(h);
  } else {
    PolyFp c = gcd(f, df, p);
    PolyFp sqfree = divmod(f, c, p).first;
    irreducibles = factor_squarefree(sqfree, p, rng);
    if (deg(c) > 0) {
      for (auto& [h, e] : factor(c, p)) irreducibles.push_back(h);
    }
  }
  std::sort(irreducibles.begin(), irreducibles.end(), [](const PolyFp& a, const PolyFp& b) {
    if (a.size() != b.size()) return a.size() < b.size();
    return a < b;
  });
  irreducibles.erase(std::unique(irreducibles.begin(), irreducibles.end()), irreducibles.end());
  for (const auto& h : irreducibles) {
    int e = 0;
    while (true) {
      auto [q, r] = divmod(f, h, p);
      if (!r.empty()) break;
      f = q;
      ++e;
    }
    result.emplace_back(h, e);
  }
  return result;
}

}  // namespace fp

// The finite field F_p[y]/(h) for a monic irreducible h of degree f.
class FiniteField {
 public:
  using Elem = PolyFp;  // reduced, degree < f

  FiniteField(u64 p, PolyFp h) : p_(p), h_(std::move(h)) {
    q_ = 1;
    for (int i = 0; i < degree(); ++i) q_ = static_cast<u64>(checked_mul(static_cast<i64>(q_), static_cast<i64>(p_)));
  }

  u64 characteristic() const { return p_; }
  int degree() const { return fp::deg(h_); }
  u64 size() const { return q_; }
  const PolyFp& modulus() const { return h_; }

  Elem from_int(i64 v) const {
    Elem e{static_cast<u64>(mod_floor(v, static_cast<i64>(p_)))};
    fp::trim(e);
    return e;
  }
  Elem reduce(const PolyFp& a) const { return fp::mod(a, h_, p_); }
  Elem add(const Elem& a, const Elem& b) const { return fp::add(a, b, p_); }
  Elem sub(const Elem& a, const Elem& b) const { return fp::sub(a, b, p_); }
  Elem mul(const Elem& a, const Elem& b) const { return fp::mod(fp::mul(a, b, p_), h_, p_); }
  Elem pow(Elem a, u64 e) const {
    Elem r = from_int(1);
    while (e) {
      if (e & 1) r = mul(r, a);
      a = mul(a, a);
      e >>= 1;
    }
    return r;
  }
  Elem inv(const Elem& a) const {
    if (a.empty()) throw Error(ErrorCode::NotCoprime, "inverse of zero in finite field");
    return pow(a, q_ - 2);
  }
  bool is_zero(const Elem& a) const { return a.empty(); }
  bool is_one(const Elem& a) const { return a.size() == 1 && a[0] == 1; }

  // Quadratic character: 0, 1 or -1.  Requires p odd.
  int quadratic_character(const Elem& a) const {
    if (a.empty()) return 0;
    Elem r = pow(a, (q_ - 1) / 2);
    return is_one(r) ? 1 : -1;
  }

  // Elements enumerated by their coefficient vectors in base p.
  Elem element(u64 index) const {
    Elem e(degree(), 0);
    for (int i = 0; i < degree(); ++i) {
      e[i] = index % p_;
      index /= p_;
    }
    fp::trim(e);
    return e;
  }

  // Distinct roots in this field of a polynomial with coefficients in it.
  std::vector<Elem> roots(std::vector<Elem> f) const;

 private:
  using FPoly = std::vector<Elem>;

  void trim(FPoly& a) const {
    while (!a.empty() && a.back().empty()) a.pop_back();
  }
  FPoly pmod(FPoly a, const FPoly& b) const {
    trim(a);
    int db = static_cast<int>(b.size()) - 1;
    Elem inv_lead = inv(b.back());
    for (int i = static_cast<int>(a.size()) - 1; i >= db; --i) {
      if (a[i].empty()) continue;
      Elem c = mul(a[i], inv_lead);
      for (int j = 0; j <= db; ++j) a[i - db + j] = sub(a[i - db + j], mul(c, b[j]));
    }
    if (static_cast<int>(a.size()) > db) a.resize(db);
    trim(a);
    return a;
  }
  FPoly pdiv(FPoly a, const FPoly& b) const {
    int db = static_cast<int>(b.size()) - 1;
    int da = static_cast<int>(a.size()) - 1;
    if (da < db) return {};
    FPoly q(da - db + 1);
    Elem inv_lead = inv(b.back());
    for (int i = da; i >= db; --i) {
      if (a[i].empty()) continue;
      Elem c = mul(a[i], inv_lead);
      q[i - db] = c;
      for (int j = 0; j <= db; ++j) a[i - db + j] = sub(a[i - db + j], mul(c, b[j]));
    }
    trim(q);
    return q;
  }
  FPoly pmul(const FPoly& a, const FPoly& b) const {
    if (a.empty() || b.empty()) return {};
    FPoly r(a.size() + b.size() - 1);
    for (size_t i = 0; i < a.size(); ++i)
      for (size_t j = 0; j < b.size(); ++j) r[i + j] = add(r[i + j], mul(a[i], b[j]));
    trim(r);
    return r;
  }
  FPoly pmonic(FPoly a) const {
    if (a.empty()) return a;
    Elem il = inv(a.back());
    for (auto& c : a) c = mul(c, il);
    return a;
  }
  FPoly pgcd(FPoly a, FPoly b) const {
    trim(a);
    trim(b);
    while (!b.empty()) {
      FPoly r = pmod(a, b);
      a = std::move(b);
      b = std::move(r);
    }
    return pmonic(a);
  }
  FPoly ppowmod(FPoly base, u64 e, const FPoly& m) const {
    FPoly r{from_int(1)};
    base = pmod(base, m);
    while (e) {
      if (e & 1) r = pmod(pmul(r, base), m);
      base = pmod(pmul(base, base), m);
      e >>= 1;
    }
    return pmod(r, m);
  }
  // x^q mod m by repeated p-th powering (q may be large).
  FPoly frobenius_x(const FPoly& m) const {
    FPoly r = pmod(FPoly{Elem{}, from_int(1)}, m);
    for (int i = 0; i < degree(); ++i) r = ppowmod(r, p_, m);
    return r;
  }
  void split_roots(const FPoly& f, std::mt19937_64& rng, std::vector<Elem>& out) const;

  u64 p_;
  PolyFp h_;
  u64 q_;
};

inline void FiniteField::split_roots(const FPoly& f, std::mt19937_64& rng, std::vector<Elem>& out) const {
  int d = static_cast<int>(f.size()) - 1;
  if (d <= 0) return;
  if (d == 1) {
    out.push_back(sub(Elem{}, mul(f[0], inv(f[1]))));
    return;
  }
  std::uniform_int_distribution<u64> dist(0, q_ - 1);
  while (true) {
    Elem delta = element(dist(rng));
    FPoly b;
    if (p_ == 2) {
      // Trace map T(x + delta) = sum_{i<k} (x + delta)^{2^i}.
      FPoly t = pmod(FPoly{delta, from_int(1)}, f), acc = t;
      for (int i = 1; i < degree(); ++i) {
        t = pmod(pmul(t, t), f);
        FPoly sum(std::max(acc.size(), t.size()));
        for (size_t j = 0; j < sum.size(); ++j)
          sum[j] = add(j < acc.size() ? acc[j] : Elem{}, j < t.size() ? t[j] : Elem{});
        trim(sum);
        acc = sum;
      }
      b = acc;
    } else {
      b = ppowmod(FPoly{delta, from_int(1)}, (q_ - 1) / 2, f);
      if (b.empty()) b.push_back(Elem{});
      b[0] = sub(b[0], from_int(1));
      trim(b);
    }
    FPoly g = pgcd(f, b);
    int dg = static_cast<int>(g.size()) - 1;
    if (dg > 0 && dg < d) {
      split_roots(g, rng, out);
      split_roots(pdiv(f, g), rng, out);
      return;
    }
  }
}

inline std::vector<FiniteField::Elem> FiniteField::roots(std::vector<Elem> f) const {
  trim(f);
  std::vector<Elem> out;
  if (f.size() <= 1) return out;
  f = pmonic(f);
  FPoly xq = frobenius_x(f);
  FPoly xq_minus_x = xq;
  if (xq_minus_x.size() < 2) xq_minus_x.resize(2);
  xq_minus_x[1] = sub(xq_minus_x[1], from_int(1));
  trim(xq_minus_x);
  FPoly g = pgcd(f, xq_minus_x);
  std::mt19937_64 rng(0xd1b54a32d192ed03ULL ^ q_);
  split_roots(g, rng, out);
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace binform
