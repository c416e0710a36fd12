#pragma once

// Binary forms over O_K, pairs (F, G), systems of pairs, and the test of
// whether G(theta, 1) is a square in K(theta) for a root theta of F(x, 1).

#include <algorithm>
#include <cmath>
#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "binform/ideal.hpp"

namespace binform {

// coeffs[j] is the coefficient of s^{deg - j} t^j.
struct BinaryForm {
  std::vector<FieldElement> coeffs;

  int degree() const { return static_cast<int>(coeffs.size()) - 1; }
  bool is_zero() const {
    for (const auto& c : coeffs)
      if (!c.is_zero()) return false;
    return true;
  }
  // True when every coefficient except that of t^deg vanishes.
  bool proportional_to_t() const {
    for (int j = 0; j < degree(); ++j)
      if (!coeffs[j].is_zero()) return false;
    return degree() >= 1;
  }
  const FieldElement& leading() const { return coeffs.front(); }  // F(1, 0)

  static BinaryForm from_integers(const std::vector<i64>& c) {
    BinaryForm f;
    for (i64 v : c) f.coeffs.push_back(FieldElement::from_int(v));
    return f;
  }
  friend bool operator==(const BinaryForm&, const BinaryForm&) = default;
};

inline FieldElement form_eval(const NumberField& K, const BinaryForm& F, const FieldElement& s, const FieldElement& t) {
  // Horner in s with powers of t accumulated alongside.
  FieldElement acc;
  FieldElement tp = K.one();
  const int d = F.degree();
  std::vector<FieldElement> tpow(d + 1);
  for (int j = 0; j <= d; ++j) {
    tpow[j] = tp;
    if (j < d) tp = K.mul(tp, t);
  }
  for (int j = 0; j <= d; ++j) {
    acc = K.mul(acc, s);
    acc = K.add(acc, K.mul(F.coeffs[j], tpow[j]));
  }
  return acc;
}

// F(x, 1) modulo an ideal, for x reduced modulo the same ideal.
inline FieldElement form_eval_affine_mod(const NumberField& K, const BinaryForm& F, const FieldElement& x, const Ideal& mod) {
  FieldElement acc;
  for (const auto& c : F.coeffs) acc = ideal_reduce(K, mod, K.add(mul_mod(K, mod, acc, x), c));
  return acc;
}

inline FieldElement form_eval_affine(const NumberField& K, const BinaryForm& F, const FieldElement& x) {
  FieldElement acc;
  for (const auto& c : F.coeffs) acc = K.add(K.mul(acc, x), c);
  return acc;
}

// Determinant of a square matrix over O_K without division, by dynamic
// programming over the set of used columns.
inline FieldElement determinant(const NumberField& K, const std::vector<std::vector<FieldElement>>& a) {
  const int n = static_cast<int>(a.size());
  if (n == 0) return K.one();
  if (n > 20) throw Error(ErrorCode::Unsupported, "determinant size");
  std::vector<FieldElement> dp(size_t{1} << n);
  std::vector<bool> seen(size_t{1} << n, false);
  dp[0] = K.one();
  seen[0] = true;
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    if (!seen[mask]) continue;
    int row = __builtin_popcount(mask);
    if (row == n) continue;
    for (int c = 0; c < n; ++c) {
      if (mask & (1u << c)) continue;
      if (a[row][c].is_zero()) continue;
      int above = __builtin_popcount(mask >> (c + 1));
      FieldElement term = K.mul(dp[mask], a[row][c]);
      if (above & 1) term = K.neg(term);
      unsigned nm = mask | (1u << c);
      dp[nm] = K.add(dp[nm], term);
      seen[nm] = true;
    }
  }
  return dp[(1u << n) - 1];
}

// Resultant of binary forms with their formal degrees.
inline FieldElement resultant(const NumberField& K, const BinaryForm& F, const BinaryForm& G) {
  const int dF = F.degree(), dG = G.degree();
  const int n = dF + dG;
  if (n == 0) return K.one();
  std::vector<std::vector<FieldElement>> S(n, std::vector<FieldElement>(n));
  for (int r = 0; r < dG; ++r)
    for (int i = 0; i <= dF; ++i) S[r][r + i] = F.coeffs[i];
  for (int r = 0; r < dF; ++r)
    for (int i = 0; i <= dG; ++i) S[dG + r][r + i] = G.coeffs[i];
  return determinant(K, S);
}

// Discriminant-like quantity of F(x, 1): resultant of F and dF/ds.
inline FieldElement form_discriminant_factor(const NumberField& K, const BinaryForm& F) {
  const int d = F.degree();
  if (d <= 1) return K.one();
  BinaryForm dF;
  for (int j = 0; j < d; ++j) dF.coeffs.push_back(K.scale(F.coeffs[j], d - j));
  return resultant(K, F, dF);
}

// Substitutes t -> a s + t.
inline BinaryForm shift_form(const NumberField& K, const BinaryForm& F, const FieldElement& a) {
  const int d = F.degree();
  std::vector<FieldElement> apow(d + 1);
  apow[0] = K.one();
  for (int i = 1; i <= d; ++i) apow[i] = K.mul(apow[i - 1], a);
  BinaryForm out;
  out.coeffs.assign(d + 1, FieldElement{});
  for (int k = 0; k <= d; ++k) {
    FieldElement acc;
    i64 binom = 1;  // C(j, k) for j = k
    for (int j = k; j <= d; ++j) {
      if (j > k) binom = binom * j / (j - k);
      acc = K.add(acc, K.scale(K.mul(F.coeffs[j], apow[j - k]), binom));
    }
    out.coeffs[k] = acc;
  }
  return out;
}

// ---------------------------------------------------------------------------

struct SquareClassVerdict {
  enum class Kind { Square, ProbablySquare, NonSquare };
  Kind kind = Kind::ProbablySquare;
  // For Square: h with h^2 = G mod F in O_K[y]/(F^(y)) (coefficients of y^j),
  // where y = F(1,0) x makes the minimal polynomial monic.
  std::vector<FieldElement> sqrt_witness;
  int primes_tested = 0;
  // For NonSquare from a residue computation.
  PrimeRef witness_prime;
  i64 witness_root = 0;  // lambda mod witness_prime (degree-one prime)
  bool irreducibility_certified = false;
  i64 certifying_prime = 0;

  bool counts_as_square() const { return kind != Kind::NonSquare; }
  std::string describe() const {
    switch (kind) {
      case Kind::Square: return "Square";
      case Kind::ProbablySquare: return "ProbablySquare(" + std::to_string(primes_tested) + ")";
      case Kind::NonSquare:
        return witness_prime ? "NonSquare(p=" + std::to_string(witness_prime->p) + ", root=" + std::to_string(witness_root) + ")"
                             : "NonSquare";
    }
    return "";
  }
};

namespace detail {

// Exact square test in K: every square root has embeddings +-sqrt(g_v); try
// all sign patterns, round, and verify.
inline std::optional<FieldElement> sqrt_in_field(const NumberField& K, const FieldElement& g) {
  if (g.is_zero()) return FieldElement{};
  const int m = K.degree();
  const int np = K.num_places();
  std::vector<std::complex<double>> roots(np);
  for (int v = 0; v < np; ++v) {
    auto z = K.embed(g, v);
    if (K.places()[v].real && z.real() < 0) return std::nullopt;
    roots[v] = std::sqrt(z);
  }
  const auto& Minv = K.inverse_embedding_matrix();
  for (unsigned signs = 0; signs < (1u << np); ++signs) {
    std::vector<double> y(m);
    for (int v = 0; v < np; ++v) {
      auto z = (signs >> v & 1) ? -roots[v] : roots[v];
      int off = K.place_offset(v);
      y[off] = z.real();
      if (!K.places()[v].real) y[off + 1] = z.imag();
    }
    FieldElement h;
    bool ok = true;
    for (int j = 0; j < m; ++j) {
      long double s = 0;
      for (int k = 0; k < m; ++k) s += static_cast<long double>(Minv[j][k]) * y[k];
      if (std::fabs(s) > 4e18L) {
        ok = false;
        break;
      }
      h.c[j] = static_cast<i64>(std::llround(static_cast<double>(s)));
    }
    if (!ok) continue;
    try {
      if (K.mul(h, h) == g) return h;
    } catch (const Error&) {
    }
  }
  return std::nullopt;
}

// Polynomials over O_K in y reduced modulo a monic polynomial (coefficients
// in increasing degree).
inline std::vector<FieldElement> polymod_mul(const NumberField& K, const std::vector<FieldElement>& a,
                                             const std::vector<FieldElement>& b, const std::vector<FieldElement>& monic) {
  const int d = static_cast<int>(monic.size()) - 1;
  std::vector<FieldElement> prod(2 * d, FieldElement{});
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) prod[i + j] = K.add(prod[i + j], K.mul(a[i], b[j]));
  for (int k = 2 * d - 1; k >= d; --k) {
    if (prod[k].is_zero()) continue;
    FieldElement c = prod[k];
    prod[k] = FieldElement{};
    for (int j = 0; j < d; ++j) prod[k - d + j] = K.sub(prod[k - d + j], K.mul(c, monic[j]));
  }
  prod.resize(d);
  return prod;
}

}  // namespace detail

// Roots in F_p of F(x, 1) reduced at a degree-one prime, or nullopt when the
// reduction vanishes identically.
inline std::optional<std::vector<i64>> roots_at_degree_one_prime(const NumberField& K, const BinaryForm& F, const PrimeIdeal& P,
                                                                 bool* irreducible = nullptr) {
  const u64 p = static_cast<u64>(P.p);
  PolyFp f(F.coeffs.size());
  const int d = F.degree();
  for (int j = 0; j <= d; ++j) f[d - j] = static_cast<u64>(residue_degree_one(K, P, F.coeffs[j]));
  fp::trim(f);
  if (f.empty()) return std::nullopt;
  std::vector<i64> roots;
  auto fac = fp::factor(f, p);
  for (auto& [g, e] : fac)
    if (fp::deg(g) == 1) roots.push_back(static_cast<i64>((p - g[0]) % p));
  if (irreducible) *irreducible = fp::deg(f) == d && fac.size() == 1 && fac[0].second == 1 && fp::deg(fac[0].first) == d;
  std::sort(roots.begin(), roots.end());
  return roots;
}

inline SquareClassVerdict square_class_test(const NumberField& K, const BinaryForm& F, const BinaryForm& G, int prime_budget = 64) {
  SquareClassVerdict out;
  const int d = F.degree();
  if (d == 1) {
    // theta lies in K: G(theta, 1) has the square class of G(-b, a) for F = a s + b t.
    out.irreducibility_certified = true;
    FieldElement g = form_eval(K, G, K.neg(F.coeffs[1]), F.coeffs[0]);
    if (auto h = detail::sqrt_in_field(K, g)) {
      out.kind = SquareClassVerdict::Kind::Square;
      out.sqrt_witness = {*h};
    } else {
      out.kind = SquareClassVerdict::Kind::NonSquare;
    }
    return out;
  }

  if (F.leading().is_zero()) throw Error(ErrorCode::PreconditionFailed, "t divides F, so F is reducible");
  // Monic model: y = a x with a = F(1,0), F^(y) = a^{d-1} F(y/a, 1), G^(y) = G(y, a).
  const FieldElement a = F.leading();
  std::vector<FieldElement> monic(d + 1);
  {
    FieldElement apow = K.one();  // a^{j-1} for coefficient of y^{d-j}
    for (int j = 0; j <= d; ++j) {
      if (j == 0) {
        monic[d] = K.one();
        continue;
      }
      monic[d - j] = K.mul(F.coeffs[j], apow);
      apow = K.mul(apow, a);
    }
  }
  std::vector<FieldElement> ghat(d, FieldElement{});
  {
    // G(y, a) = sum_j g_j y^{e-j} a^j, reduced modulo the monic model.
    const int e = G.degree();
    std::vector<FieldElement> ypow(d, FieldElement{});
    ypow[0] = K.one();
    std::vector<FieldElement> yvec(d, FieldElement{});
    if (d > 1) yvec[1] = K.one();
    std::vector<std::vector<FieldElement>> powers(e + 1);
    powers[0] = ypow;
    for (int k = 1; k <= e; ++k) powers[k] = detail::polymod_mul(K, powers[k - 1], yvec, monic);
    FieldElement apow = K.one();
    for (int j = 0; j <= e; ++j) {
      FieldElement c = K.mul(G.coeffs[j], apow);
      for (int i = 0; i < d; ++i) ghat[i] = K.add(ghat[i], K.mul(c, powers[e - j][i]));
      apow = K.mul(apow, a);
    }
  }

  // Bounded search for an explicit square root.
  {
    const int vars = d * K.degree();
    const double cap = 2e5;
    int H = static_cast<int>((std::pow(cap, 1.0 / vars) - 1) / 2);
    H = std::clamp(H, 1, 12);
    std::vector<i64> digits(vars, -H);
    bool found = false;
    while (!found) {
      std::vector<FieldElement> h(d, FieldElement{});
      for (int i = 0; i < vars; ++i) h[i / K.degree()].c[i % K.degree()] = digits[i];
      try {
        if (detail::polymod_mul(K, h, h, monic) == ghat) {
          out.kind = SquareClassVerdict::Kind::Square;
          out.sqrt_witness = h;
          found = true;
        }
      } catch (const Error&) {
      }
      int i = 0;
      while (i < vars && digits[i] == H) digits[i++] = -H;
      if (i == vars) break;
      ++digits[i];
    }
  }

  // Residue test at degree-one primes of K away from the bad set.
  BigInt bad = big(2) * abs(K.norm_big(resultant(K, F, G))) * abs(K.norm_big(a)) *
               abs(K.norm_big(form_discriminant_factor(K, F))) * abs(big(K.discriminant()));
  int tested = 0;
  i64 scanned = 0;
  for (i64 p = 3; tested < prime_budget; p += 2) {
    if (!is_prime_u64(static_cast<u64>(p))) continue;
    if (++scanned > 200000) break;
    if (mpz_divisible_ui_p(bad.get_mpz_t(), static_cast<unsigned long>(p))) continue;
    for (const auto& P : *primes_above(K, p)) {
      if (P->f != 1 || tested >= prime_budget) continue;
      bool irred = false;
      auto roots = roots_at_degree_one_prime(K, F, *P, &irred);
      if (irred && !out.irreducibility_certified) {
        out.irreducibility_certified = true;
        out.certifying_prime = p;
      }
      if (!roots || roots->empty()) continue;
      ++tested;
      if (out.kind == SquareClassVerdict::Kind::Square) continue;
      for (i64 lam : *roots) {
        FieldElement g = form_eval(K, G, FieldElement::from_int(lam), K.one());
        if (legendre(K, g, *P) == -1) {
          out.kind = SquareClassVerdict::Kind::NonSquare;
          out.witness_prime = P;
          out.witness_root = lam;
          out.primes_tested = tested;
          return out;
        }
      }
    }
  }
  out.primes_tested = tested;
  if (out.kind == SquareClassVerdict::Kind::Square) return out;
  if (tested == 0) throw Error(ErrorCode::BudgetExhausted, "no root-bearing primes found");
  out.kind = SquareClassVerdict::Kind::ProbablySquare;
  return out;
}

// ---------------------------------------------------------------------------

struct FormPair {
  std::string name;
  BinaryForm F, G;
};

class FormSystem {
 public:
  static FormSystem create(const NumberField& K, std::vector<FormPair> pairs, int prime_budget = 64) {
    FormSystem S;
    S.K_ = K;
    S.budget_ = prime_budget;
    for (auto& pr : pairs) {
      if (pr.F.degree() < 1 || pr.F.is_zero()) throw Error(ErrorCode::PreconditionFailed, "F must be a nonzero form of degree >= 1");
      if (pr.G.degree() % 2 != 0) throw Error(ErrorCode::DegreeParity, "deg G must be even for pair '" + pr.name + "'");
      if (resultant(K, pr.F, pr.G).is_zero()) throw Error(ErrorCode::ResultantZero, "F divides G in pair '" + pr.name + "'");
    }
    for (size_t i = 0; i < pairs.size(); ++i)
      for (size_t j = i + 1; j < pairs.size(); ++j)
        if (resultant(K, pairs[i].F, pairs[j].F).is_zero())
          throw Error(ErrorCode::ResultantZero, "forms " + std::to_string(i) + " and " + std::to_string(j) + " share a root");
    S.pairs_ = std::move(pairs);
    for (const auto& pr : S.pairs_) S.verdicts_.push_back(square_class_test(K, pr.F, pr.G, prime_budget));
    return S;
  }

  const NumberField& field() const { return K_; }
  int size() const { return static_cast<int>(pairs_.size()); }
  const std::vector<FormPair>& pairs() const { return pairs_; }
  const FormPair& pair(int i) const { return pairs_[i]; }
  const SquareClassVerdict& verdict(int i) const { return verdicts_[i]; }

  int rank() const {
    int r = 0;
    for (const auto& v : verdicts_) r += v.counts_as_square();
    return r;
  }
  int complexity() const {
    int c = 0;
    for (size_t i = 0; i < pairs_.size(); ++i)
      if (!verdicts_[i].counts_as_square()) c += pairs_[i].F.degree();
    return c;
  }
  bool probabilistic() const {
    for (const auto& v : verdicts_)
      if (v.kind == SquareClassVerdict::Kind::ProbablySquare) return true;
    return false;
  }
  int total_degree() const {
    int s = 0;
    for (const auto& p : pairs_) s += p.F.degree();
    return s;
  }

  FormSystem shifted(const FieldElement& a) const {
    std::vector<FormPair> out;
    for (const auto& pr : pairs_) out.push_back({pr.name, shift_form(K_, pr.F, a), shift_form(K_, pr.G, a)});
    return create(K_, std::move(out), budget_);
  }

 private:
  NumberField K_;
  int budget_ = 64;
  std::vector<FormPair> pairs_;
  std::vector<SquareClassVerdict> verdicts_;
};

inline FormSystem unimodular_shift(const FormSystem& S, const FieldElement& a) { return S.shifted(a); }

}  // namespace binform
