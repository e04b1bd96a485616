#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <string>

#include "bpm/errors.hpp"

namespace bpm {

using BigInt = mpz_class;
using Rational = mpq_class;

// C(n, k) exact; 0 when k < 0 or k > n.
inline BigInt binomial(long n, long k) {
  if (k < 0 || n < 0 || k > n) return BigInt(0);
  mpz_class out;
  mpz_bin_uiui(out.get_mpz_t(), static_cast<unsigned long>(n), static_cast<unsigned long>(k));
  return out;
}

// Number of allowed labelings around one black vertex of degree d: |E_d|.
inline BigInt bridge_count(long degree) {
  if (degree < 1) return BigInt(degree == 0 ? 1 : 0);
  return binomial(2 * degree - 1, degree - 1);
}

// Number of integer sequences of length m, entries >= -1, summing to t.
// Stars and bars after shifting each entry by one.
inline BigInt shifted_compositions(long m, long t) {
  if (m == 0) return BigInt(t == 0 ? 1 : 0);
  if (t + m < 0) return BigInt(0);
  return binomial(t + 2 * m - 1, m - 1);
}

inline double to_double(const Rational& q) { return q.get_d(); }

inline std::string to_string(const Rational& q) { return q.get_str(); }

inline Rational rational_pow(const Rational& base, long e) {
  Rational acc(1);
  Rational b = base;
  long n = e;
  if (n < 0) {
    if (base == 0) throw NumericError("rational_pow: zero to negative power");
    b = 1 / b;
    n = -n;
  }
  while (n > 0) {
    if (n & 1) acc *= b;
    b *= b;
    n >>= 1;
  }
  return acc;
}

}  // namespace bpm
