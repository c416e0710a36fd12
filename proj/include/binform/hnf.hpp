#pragma once

// Full-rank integer lattices in Z^n stored in Hermite normal form.
//
// Columns are lower triangular: column j has zeros above row j, a positive
// pivot at row j, and every entry of row i to the left of the pivot H[i][i]
// lies in [0, H[i][i]).

#include <cmath>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "binform/integer.hpp"
#include "binform/rational.hpp"

namespace binform {

class Hnf {
 public:
  Hnf() = default;
  explicit Hnf(int dim) : dim_(dim), a_(static_cast<size_t>(dim) * dim, 0) {}

  static Hnf identity(int dim) {
    Hnf h(dim);
    for (int i = 0; i < dim; ++i) h.at(i, i) = 1;
    return h;
  }

  int dim() const { return dim_; }
  i64& at(int row, int col) { return a_[static_cast<size_t>(col) * dim_ + row]; }
  i64 at(int row, int col) const { return a_[static_cast<size_t>(col) * dim_ + row]; }
  std::span<const i64> column(int j) const { return {a_.data() + static_cast<size_t>(j) * dim_, static_cast<size_t>(dim_)}; }
  i64 pivot(int j) const { return at(j, j); }

  // Index of the lattice in Z^n.
  i64 determinant() const {
    i64 d = 1;
    for (int j = 0; j < dim_; ++j) d = checked_mul(d, pivot(j));
    return d;
  }

  // Reduces v in place to the canonical representative of v + L.
  void reduce(std::span<i64> v) const {
    for (int j = 0; j < dim_; ++j) {
      i64 q = floor_div(v[j], pivot(j));
      if (q == 0) continue;
      for (int i = j; i < dim_; ++i) v[i] = narrow(static_cast<i128>(v[i]) - static_cast<i128>(q) * at(i, j));
    }
  }

  bool contains(std::span<const i64> v_in) const {
    std::vector<i64> v(v_in.begin(), v_in.end());
    for (int j = 0; j < dim_; ++j) {
      if (v[j] % pivot(j) != 0) return false;
      i64 q = v[j] / pivot(j);
      if (q == 0) continue;
      for (int i = j; i < dim_; ++i) v[i] = narrow(static_cast<i128>(v[i]) - static_cast<i128>(q) * at(i, j));
    }
    return true;
  }

  // Whether other is a sublattice of this lattice.
  bool contains_lattice(const Hnf& other) const {
    for (int j = 0; j < other.dim(); ++j)
      if (!contains(other.column(j))) return false;
    return true;
  }

  friend bool operator==(const Hnf& a, const Hnf& b) { return a.dim_ == b.dim_ && a.a_ == b.a_; }
  friend bool operator<(const Hnf& a, const Hnf& b) {
    if (a.dim_ != b.dim_) return a.dim_ < b.dim_;
    return a.a_ < b.a_;
  }

  const std::vector<i64>& raw() const { return a_; }

 private:
  int dim_ = 0;
  std::vector<i64> a_;
};

// HNF of the lattice generated by the given vectors, given a positive D with
// D * Z^n contained in that lattice.
inline Hnf hnf_mod(int dim, const std::vector<std::vector<i64>>& gens, i64 D) {
  if (D <= 0) throw Error(ErrorCode::BadLattice, "modulus must be positive");
  std::vector<std::vector<i64>> pool;
  pool.reserve(gens.size() + dim);
  for (const auto& g : gens) {
    std::vector<i64> v(dim);
    bool nonzero = false;
    for (int i = 0; i < dim; ++i) {
      v[i] = mod_floor(g[i], D);
      nonzero |= v[i] != 0;
    }
    if (nonzero) pool.push_back(std::move(v));
  }
  for (int i = 0; i < dim; ++i) {
    std::vector<i64> v(dim, 0);
    v[i] = D;
    pool.push_back(std::move(v));
  }
  Hnf h(dim);
  for (int j = 0; j < dim; ++j) {
    int piv = -1;
    for (size_t k = 0; k < pool.size(); ++k) {
      if (pool[k][j] == 0) continue;
      if (piv < 0) {
        piv = static_cast<int>(k);
        continue;
      }
      auto& P = pool[piv];
      auto& V = pool[k];
      ExtGcd e = ext_gcd(P[j], V[j]);
      i64 a = P[j] / e.g, b = V[j] / e.g;
      for (int i = j; i < dim; ++i) {
        i128 np = static_cast<i128>(e.x) * P[i] + static_cast<i128>(e.y) * V[i];
        i128 nv = -static_cast<i128>(b) * P[i] + static_cast<i128>(a) * V[i];
        P[i] = (i == j) ? static_cast<i64>(np) : mod_floor128(np, D);
        V[i] = (i == j) ? 0 : mod_floor128(nv, D);
      }
    }
    if (piv < 0) throw Error(ErrorCode::BadLattice, "generators do not span a full-rank lattice");
    auto P = pool[piv];
    pool.erase(pool.begin() + piv);
    if (P[j] < 0)
      for (int i = j; i < dim; ++i) P[i] = -P[i];
    for (int i = j + 1; i < dim; ++i) P[i] = mod_floor(P[i], D);
    for (int i = 0; i < dim; ++i) h.at(i, j) = P[i];
  }
  // Size reduction: entries left of each pivot into [0, pivot).
  for (int i = 1; i < dim; ++i) {
    i64 piv = h.at(i, i);
    for (int j = 0; j < i; ++j) {
      i64 q = floor_div(h.at(i, j), piv);
      if (q == 0) continue;
      for (int r = i; r < dim; ++r) h.at(r, j) = narrow(static_cast<i128>(h.at(r, j)) - static_cast<i128>(q) * h.at(r, i));
    }
  }
  return h;
}

// Visits every point of base + L with lo[i] <= x[i] <= hi[i].
template <class Visit>
void enumerate_coset(const Hnf& h, std::span<const i64> base, std::span<const i64> lo,
                     std::span<const i64> hi, Visit&& visit) {
  const int n = h.dim();
  std::vector<i64> cur(base.begin(), base.end());
  std::function<void(int)> rec = [&](int j) {
    if (j == n) {
      visit(std::span<const i64>(cur));
      return;
    }
    i64 p = h.pivot(j);
    i64 kmin = -floor_div(cur[j] - lo[j], p);  // ceil((lo - cur) / p)
    i64 kmax = floor_div(hi[j] - cur[j], p);
    if (kmin > kmax) return;
    std::vector<i64> saved(cur.begin() + j, cur.end());
    for (int i = j; i < n; ++i) cur[i] = narrow(static_cast<i128>(cur[i]) + static_cast<i128>(kmin) * h.at(i, j));
    for (i64 k = kmin; k <= kmax; ++k) {
      rec(j + 1);
      if (k < kmax)
        for (int i = j; i < n; ++i) cur[i] = checked_add(cur[i], h.at(i, j));
    }
    std::copy(saved.begin(), saved.end(), cur.begin() + j);
  };
  rec(0);
}

// Given generators a_k of a lattice A and b_k of a lattice B, finds integer
// coefficients c with target - sum c_k a_k in B.  Returns nullopt when the
// target is not in A + B.
inline std::optional<std::vector<BigInt>> split_target(int dim, const std::vector<std::vector<i64>>& a_gens,
                                                       const std::vector<std::vector<i64>>& b_gens,
                                                       std::span<const i64> target) {
  struct Item {
    std::vector<BigInt> v;
    std::vector<BigInt> tag;
  };
  const size_t na = a_gens.size();
  std::vector<Item> pool;
  for (size_t k = 0; k < na; ++k) {
    Item it{std::vector<BigInt>(dim), std::vector<BigInt>(na)};
    for (int i = 0; i < dim; ++i) it.v[i] = big(a_gens[k][i]);
    it.tag[k] = 1;
    pool.push_back(std::move(it));
  }
  for (const auto& g : b_gens) {
    Item it{std::vector<BigInt>(dim), std::vector<BigInt>(na)};
    for (int i = 0; i < dim; ++i) it.v[i] = big(g[i]);
    pool.push_back(std::move(it));
  }
  std::vector<Item> piv(dim);
  std::vector<bool> have(dim, false);
  for (int j = 0; j < dim; ++j) {
    int p = -1;
    for (size_t k = 0; k < pool.size(); ++k) {
      if (pool[k].v[j] == 0) continue;
      if (p < 0) {
        p = static_cast<int>(k);
        continue;
      }
      Item& P = pool[p];
      Item& V = pool[k];
      BigInt g, x, y;
      mpz_gcdext(g.get_mpz_t(), x.get_mpz_t(), y.get_mpz_t(), P.v[j].get_mpz_t(), V.v[j].get_mpz_t());
      BigInt a = P.v[j] / g, b = V.v[j] / g;
      for (int i = j; i < dim; ++i) {
        BigInt np = x * P.v[i] + y * V.v[i];
        BigInt nv = -b * P.v[i] + a * V.v[i];
        P.v[i] = np;
        V.v[i] = nv;
      }
      for (size_t i = 0; i < na; ++i) {
        BigInt np = x * P.tag[i] + y * V.tag[i];
        BigInt nv = -b * P.tag[i] + a * V.tag[i];
        P.tag[i] = np;
        V.tag[i] = nv;
      }
    }
    if (p >= 0) {
      piv[j] = pool[p];
      have[j] = true;
      pool.erase(pool.begin() + p);
    }
  }
  std::vector<BigInt> t(dim);
  for (int i = 0; i < dim; ++i) t[i] = big(target[i]);
  std::vector<BigInt> coeff(na);
  for (int j = 0; j < dim; ++j) {
    if (t[j] == 0) continue;
    if (!have[j]) return std::nullopt;
    if (t[j] % piv[j].v[j] != 0) return std::nullopt;
    BigInt q = t[j] / piv[j].v[j];
    for (int i = j; i < dim; ++i) t[i] -= q * piv[j].v[i];
    for (size_t i = 0; i < na; ++i) coeff[i] += q * piv[j].tag[i];
  }
  return coeff;
}

}  // namespace binform
