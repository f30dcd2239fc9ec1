#ifndef MFA_RATIONAL_HPP_
#define MFA_RATIONAL_HPP_

#include <gmpxx.h>

#include <cmath>
#include <string>

#include "mfa/errors.hpp"

namespace mfa {

using Rational = mpq_class;

inline Rational rat(long num, long den = 1) {
  Rational q(num, den);
  q.canonicalize();
  return q;
}

// Accepts "p", "p/q", and leading '-'.
inline Rational rat_parse(const std::string& s) {
  if (s.empty()) fail(Errc::ParseError, "empty rational literal");
  mpq_class q;
  if (q.set_str(s, 10) != 0) fail(Errc::ParseError, "bad rational literal '" + s + "'");
  if (q.get_den() == 0) fail(Errc::ParseError, "zero denominator in '" + s + "'");
  q.canonicalize();
  return q;
}

inline std::string rat_str(const Rational& q) { return q.get_str(); }

// log of a positive rational, safe for values far outside double range.
inline double rat_log(const Rational& q) {
  signed long ne = 0, de = 0;
  double nd = mpz_get_d_2exp(&ne, q.get_num().get_mpz_t());
  double dd = mpz_get_d_2exp(&de, q.get_den().get_mpz_t());
  return std::log(nd) - std::log(dd) + (static_cast<double>(ne) - static_cast<double>(de)) * std::log(2.0);
}

inline int rat_sign(const Rational& q) { return sgn(q); }

inline Rational rat_abs(const Rational& q) { return q < 0 ? Rational(-q) : q; }

}  // namespace mfa

#endif  // MFA_RATIONAL_HPP_
