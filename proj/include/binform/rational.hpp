#pragma once

#include <gmpxx.h>

#include <string>

#include "binform/error.hpp"
#include "binform/integer.hpp"

namespace binform {

using Rational = mpq_class;
using BigInt = mpz_class;

inline Rational rational(i64 p, i64 q = 1) {
  Rational r(BigInt(static_cast<long>(p)), BigInt(static_cast<long>(q)));
  r.canonicalize();
  return r;
}

inline BigInt big(i64 v) { return BigInt(static_cast<long>(v)); }

inline BigInt big128(__int128 v) {
  bool neg = v < 0;
  unsigned __int128 u = neg ? -static_cast<unsigned __int128>(v) : static_cast<unsigned __int128>(v);
  BigInt hi(static_cast<unsigned long>(u >> 64)), lo(static_cast<unsigned long>(static_cast<unsigned long long>(u)));
  BigInt r = (hi << 64) + lo;
  return neg ? BigInt(-r) : r;
}

// Always "p/q" with q >= 1, so integers print as "n/1".
inline std::string to_pq(const Rational& r) {
  Rational c = r;
  c.canonicalize();
  return c.get_num().get_str() + "/" + c.get_den().get_str();
}

inline Rational parse_rational(const std::string& s) {
  Rational r;
  if (r.set_str(s, 10) != 0) throw Error(ErrorCode::ConfigInvalid, "bad rational '" + s + "'");
  if (r.get_den() == 0) throw Error(ErrorCode::ConfigInvalid, "zero denominator in '" + s + "'");
  r.canonicalize();
  return r;
}

inline double to_double(const Rational& r) { return r.get_d(); }

inline i64 to_i64(const BigInt& z) {
  if (!z.fits_slong_p()) throw Error(ErrorCode::Overflow, "integer does not fit in 64 bits");
  return static_cast<i64>(z.get_si());
}

}  // namespace binform
