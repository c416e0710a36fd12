#pragma once

// Machine-integer helpers: checked arithmetic, modular arithmetic, primality
// and factorization of 64-bit integers.

#include <algorithm>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <numeric>
#include <utility>
#include <vector>

#include "binform/error.hpp"

namespace binform {

using i64 = std::int64_t;
using u64 = std::uint64_t;
using i128 = __int128;
using u128 = unsigned __int128;

inline i64 narrow(i128 v) {
  if (v > static_cast<i128>(INT64_MAX) || v < static_cast<i128>(INT64_MIN))
    throw Error(ErrorCode::Overflow, "value does not fit in 64 bits");
  return static_cast<i64>(v);
}

inline i64 checked_add(i64 a, i64 b) {
  i64 r;
  if (__builtin_add_overflow(a, b, &r)) throw Error(ErrorCode::Overflow, "addition");
  return r;
}

inline i64 checked_sub(i64 a, i64 b) {
  i64 r;
  if (__builtin_sub_overflow(a, b, &r)) throw Error(ErrorCode::Overflow, "subtraction");
  return r;
}

inline i64 checked_mul(i64 a, i64 b) {
  i64 r;
  if (__builtin_mul_overflow(a, b, &r)) throw Error(ErrorCode::Overflow, "multiplication");
  return r;
}

inline i64 checked_pow(i64 b, int e) {
  i64 r = 1;
  for (int i = 0; i < e; ++i) r = checked_mul(r, b);
  return r;
}

inline i64 iabs(i64 a) {
  if (a == INT64_MIN) throw Error(ErrorCode::Overflow, "abs");
  return a < 0 ? -a : a;
}

// Floor division and non-negative remainder for b > 0.
inline i64 floor_div(i64 a, i64 b) {
  i64 q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

inline i64 mod_floor(i64 a, i64 b) {
  i64 r = a % b;
  return r < 0 ? r + b : r;
}

inline i64 mod_floor128(i128 a, i64 b) {
  i128 r = a % b;
  if (r < 0) r += b;
  return static_cast<i64>(r);
}

struct ExtGcd {
  i64 g, x, y;  // g = x*a + y*b, g >= 0
};

inline ExtGcd ext_gcd(i64 a, i64 b) {
  i64 old_r = a, r = b, old_s = 1, s = 0, old_t = 0, t = 1;
  while (r != 0) {
    i64 q = old_r / r;
    i64 tmp = old_r - q * r;
    old_r = r;
    r = tmp;
    tmp = old_s - q * s;
    old_s = s;
    s = tmp;
    tmp = old_t - q * t;
    old_t = t;
    t = tmp;
  }
  if (old_r < 0) return {-old_r, -old_s, -old_t};
  return {old_r, old_s, old_t};
}

inline u64 mulmod(u64 a, u64 b, u64 m) { return static_cast<u64>((u128)a * b % m); }

inline u64 powmod(u64 a, u64 e, u64 m) {
  u64 r = 1 % m;
  a %= m;
  while (e) {
    if (e & 1) r = mulmod(r, a, m);
    a = mulmod(a, a, m);
    e >>= 1;
  }
  return r;
}

inline u64 invmod(u64 a, u64 m) {
  ExtGcd e = ext_gcd(static_cast<i64>(a % m), static_cast<i64>(m));
  if (e.g != 1) throw Error(ErrorCode::NotCoprime, "no modular inverse");
  return static_cast<u64>(mod_floor(e.x, static_cast<i64>(m)));
}

inline bool is_prime_u64(u64 n) {
  if (n < 2) return false;
  static constexpr u64 small[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};
  for (u64 p : small) {
    if (n % p == 0) return n == p;
  }
  u64 d = n - 1;
  int s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  for (u64 a : small) {
    u64 x = powmod(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (int i = 1; i < s; ++i) {
      x = mulmod(x, x, n);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

// Jacobi symbol (a/n) for odd n > 0.
inline int jacobi_symbol(i64 a_in, i64 n_in) {
  u64 n = static_cast<u64>(n_in);
  u64 a = static_cast<u64>(mod_floor(a_in, n_in));
  int result = 1;
  while (a != 0) {
    while ((a & 1) == 0) {
      a >>= 1;
      u64 r = n & 7;
      if (r == 3 || r == 5) result = -result;
    }
    std::swap(a, n);
    if ((a & 3) == 3 && (n & 3) == 3) result = -result;
    a %= n;
  }
  return n == 1 ? result : 0;
}

inline std::vector<i64> primes_up_to(i64 n) {
  std::vector<i64> out;
  if (n < 2) return out;
  std::vector<bool> comp(static_cast<size_t>(n) + 1, false);
  for (i64 i = 2; i <= n; ++i) {
    if (comp[i]) continue;
    out.push_back(i);
    for (i64 j = i * i; j <= n; j += i) comp[j] = true;
  }
  return out;
}

using IntFactorization = std::vector<std::pair<u64, int>>;

// Factors 64-bit integers.  Odd n up to the table limit are split with a
// smallest-prime-factor table storing indices into the odd-prime list; larger
// n fall back to trial division and Pollard-Brent.  Instances are immutable
// once built, so hot loops may share one without locking.
class Factorizer {
 public:
  // Table sizes above this fall back to trial division and Pollard-Brent.
  static constexpr u64 kMaxTable = u64{1} << 28;

  static std::shared_ptr<const Factorizer> with_limit(u64 limit) {
    limit = std::min(limit, kMaxTable);
    static std::mutex mu;
    static std::shared_ptr<const Factorizer> current;
    std::lock_guard<std::mutex> lock(mu);
    if (!current || current->limit_ < limit) {
      u64 want = std::max<u64>(limit, current ? current->limit_ : 0);
      current = std::shared_ptr<const Factorizer>(new Factorizer(want));
    }
    return current;
  }

  static std::shared_ptr<const Factorizer> shared() { return with_limit(1u << 20); }

  u64 limit() const { return limit_; }

  // Appends (prime, exponent) pairs of n > 0 in increasing prime order.
  void factor(u64 n, IntFactorization& out) const {
    out.clear();
    if (n <= 1) return;
    int e2 = __builtin_ctzll(n);
    if (e2) {
      out.emplace_back(2, e2);
      n >>= e2;
    }
    if (n <= limit_) {
      while (n > 1) {
        u64 idx = spf_[n >> 1];
        u64 p = idx == 0 ? n : static_cast<u64>(odd_primes_[idx - 1]);
        int e = 0;
        while (n % p == 0) {
          n /= p;
          ++e;
        }
        out.emplace_back(p, e);
      }
      return;
    }
    for (i64 p : odd_primes_) {
      u64 up = static_cast<u64>(p);
      if (up * up > n) break;
      if (n % up == 0) {
        int e = 0;
        while (n % up == 0) {
          n /= up;
          ++e;
        }
        out.emplace_back(up, e);
      }
    }
    if (n > 1) {
      std::vector<u64> primes;
      split_large(n, primes);
      std::sort(primes.begin(), primes.end());
      for (u64 p : primes) {
        if (!out.empty() && out.back().first == p)
          ++out.back().second;
        else
          out.emplace_back(p, 1);
      }
    }
  }

  IntFactorization factor(u64 n) const {
    IntFactorization out;
    factor(n, out);
    return out;
  }

 private:
  explicit Factorizer(u64 limit) : limit_(limit | 1) {
    u64 root = 1;
    while ((root + 1) * (root + 1) <= limit_) ++root;
    u64 trial = std::max<u64>(root, 1u << 16);
    for (i64 p : primes_up_to(static_cast<i64>(trial)))
      if (p > 2) odd_primes_.push_back(p);
    spf_.assign(limit_ / 2 + 1, 0);
    for (size_t k = 0; k < odd_primes_.size(); ++k) {
      u64 p = static_cast<u64>(odd_primes_[k]);
      if (p * p > limit_) break;
      auto tag = static_cast<std::uint16_t>(k + 1);
      for (u64 j = p * p; j <= limit_; j += 2 * p)
        if (spf_[j >> 1] == 0) spf_[j >> 1] = tag;
    }
  }

  static u64 rho(u64 n) {
    if (n % 2 == 0) return 2;
    for (u64 c = 1;; ++c) {
      auto f = [&](u64 x) { return (mulmod(x, x, n) + c) % n; };
      u64 x = 2, y = 2, d = 1, q = 1, ys = 2;
      const u64 m = 128;
      u64 r = 1;
      do {
        x = y;
        for (u64 i = 0; i < r; ++i) y = f(y);
        u64 k = 0;
        do {
          ys = y;
          for (u64 i = 0; i < std::min(m, r - k); ++i) {
            y = f(y);
            q = mulmod(q, x > y ? x - y : y - x, n);
          }
          d = std::gcd(q, n);
          k += m;
        } while (k < r && d == 1);
        r <<= 1;
      } while (d == 1);
      if (d == n) {
        do {
          ys = f(ys);
          d = std::gcd(x > ys ? x - ys : ys - x, n);
        } while (d == 1);
      }
      if (d != n) return d;
    }
  }

  static void split_large(u64 n, std::vector<u64>& out) {
    if (n == 1) return;
    if (is_prime_u64(n)) {
      out.push_back(n);
      return;
    }
    u64 d = rho(n);
    split_large(d, out);
    split_large(n / d, out);
  }

  u64 limit_;
  std::vector<i64> odd_primes_;
  std::vector<std::uint16_t> spf_;
};

}  // namespace binform
