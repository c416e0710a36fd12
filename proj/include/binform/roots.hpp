#pragma once

// Roots of F(x, 1) modulo ideals: residue-field root finding at primes,
// lifting through prime powers, and CRT assembly.

#include <functional>

#include "binform/forms.hpp"

namespace binform {

namespace detail {

// An element of P outside P^2.
inline FieldElement uniformizer(const NumberField& K, const PrimeIdeal& P) {
  const Ideal& P2 = prime_power(K, P, 2);
  for (int j = 0; j < K.degree(); ++j) {
    FieldElement x = column_element(P.ideal, j);
    if (!ideal_contains(K, P2, x)) return x;
  }
  throw Error(ErrorCode::PreconditionFailed, "prime equals its square");
}

inline std::vector<FieldElement> scan_roots(const NumberField& K, const BinaryForm& F, const Ideal& d) {
  std::vector<FieldElement> out;
  ResidueRing R(K, d);
  R.for_each([&](const FieldElement& x) {
    if (ideal_contains(K, d, form_eval_affine_mod(K, F, x, d))) out.push_back(ideal_reduce(K, d, x));
  });
  return out;
}

// Roots of F(x, 1) modulo P found in the residue field; every residue when F
// vanishes identically mod P.
inline std::vector<FieldElement> prime_roots(const NumberField& K, const BinaryForm& F, const PrimeIdeal& P) {
  const FiniteField FF = residue_field(P);
  const int d = F.degree();
  std::vector<FiniteField::Elem> poly(d + 1);
  bool all_zero = true;
  for (int i = 0; i <= d; ++i) {
    poly[i] = residue(K, FF, F.coeffs[d - i]);
    all_zero = all_zero && FF.is_zero(poly[i]);
  }
  std::vector<FieldElement> out;
  if (all_zero) {
    ResidueRing(K, P.ideal).for_each([&](const FieldElement& x) { out.push_back(ideal_reduce(K, P.ideal, x)); });
  } else {
    for (const auto& r : FF.roots(poly)) out.push_back(ideal_reduce(K, P.ideal, lift_residue(K, r)));
  }
  std::sort(out.begin(), out.end());
  return out;
}

// Roots of F(x, 1) modulo P^k: residues modulo P, then lifted one power at a
// time through x + pi^j u.
inline std::vector<FieldElement> lifted_roots(const NumberField& K, const BinaryForm& F, const PrimeIdeal& P, int k) {
  std::vector<FieldElement> roots = prime_roots(K, F, P);
  if (k == 1 || roots.empty()) return roots;
  std::vector<FieldElement> reps;
  ResidueRing(K, P.ideal).for_each([&](const FieldElement& u) { reps.push_back(u); });
  const FieldElement pi = uniformizer(K, P);
  FieldElement pij = K.one();
  for (int j = 1; j < k; ++j) {
    const Ideal& next = prime_power(K, P, j + 1);
    pij = ideal_reduce(K, next, K.mul(pij, pi));
    std::vector<FieldElement> lifted;
    for (const auto& x : roots)
      for (const auto& u : reps) {
        FieldElement y = ideal_reduce(K, next, K.add(x, mul_mod(K, next, pij, u)));
        if (ideal_contains(K, next, form_eval_affine_mod(K, F, y, next))) lifted.push_back(y);
      }
    roots = std::move(lifted);
    if (roots.empty()) break;
  }
  return roots;
}

}  // namespace detail

// Residues x modulo d with d | F(x, 1), sorted.  Prime moduli use the
// residue field, other moduli of norm at most scan_limit are scanned, and
// larger ones are split into prime powers.
inline std::vector<FieldElement> roots_mod_ideal(const NumberField& K, const BinaryForm& F, const Factorization& d,
                                                 i64 scan_limit = 10000) {
  std::vector<FieldElement> out;
  if (d.is_unit()) return {FieldElement{}};
  if (d.parts.size() == 1 && d.parts[0].second == 1) {
    out = detail::prime_roots(K, F, *d.parts[0].first);
  } else if (d.norm() <= scan_limit) {
    out = detail::scan_roots(K, F, ideal_from_factorization(K, d));
  } else {
    std::vector<std::vector<FieldElement>> local;
    std::vector<Ideal> mods;
    for (const auto& [P, k] : d.parts) {
      local.push_back(detail::lifted_roots(K, F, *P, k));
      if (local.back().empty()) return {};
      mods.push_back(prime_power(K, *P, k));
    }
    std::vector<std::pair<FieldElement, Ideal>> cong(mods.size());
    std::function<void(size_t)> rec = [&](size_t j) {
      if (j == mods.size()) {
        out.push_back(crt_combine(K, cong).value);
        return;
      }
      for (const auto& x : local[j]) {
        cong[j] = {x, mods[j]};
        rec(j + 1);
      }
    };
    rec(0);
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace binform
