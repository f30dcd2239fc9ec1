#ifndef MFA_NUMBER_FIELD_HPP_
#define MFA_NUMBER_FIELD_HPP_

#include <memory>
#include <mutex>
#include <string>
#include <utility>
#include <vector>

#include "mfa/polynomial.hpp"

namespace mfa {

// A real number field Q(theta), where theta is the unique root of a monic
// squarefree polynomial inside a rational isolating interval. All IFS
// parameters of an analysis run live in one such field so that compositions,
// endpoint comparisons and edge weights stay exact.
class NumberField {
 public:
  // minpoly coefficients low to high; normalized to monic internally.
  // Validates squarefreeness and that the bracket isolates exactly one root.
  static std::shared_ptr<const NumberField> make(Poly minpoly, Rational bracket_lo,
                                                 Rational bracket_hi);

  // Degree-1 convenience: the field Q itself (theta = root).
  static std::shared_ptr<const NumberField> rationals();

  int degree() const { return poly_degree(minpoly_); }
  const Poly& minpoly() const { return minpoly_; }
  std::pair<Rational, Rational> initial_bracket() const { return {init_lo_, init_hi_}; }

  // Isolating interval refined by bisection until hi - lo <= max_width.
  // The refinement is cached and shared; values only ever shrink.
  std::pair<Rational, Rational> bracket(const Rational& max_width) const;

  std::string describe() const;

 private:
  NumberField() = default;

  Poly minpoly_;
  Rational init_lo_, init_hi_;
  mutable std::mutex mu_;
  mutable Rational lo_, hi_;
};

using FieldPtr = std::shared_ptr<const NumberField>;

// An element of Q(theta), represented by its canonical reduced remainder
// mod minpoly. Immutable after construction and safe to share across threads.
class AlgebraicReal {
 public:
  AlgebraicReal() = default;  // zero of no field; usable only after assignment
  AlgebraicReal(FieldPtr field, Rational constant);
  AlgebraicReal(FieldPtr field, std::vector<Rational> coeffs);

  static AlgebraicReal theta(FieldPtr field);

  const FieldPtr& field() const { return field_; }
  const std::vector<Rational>& coeffs() const { return coeffs_; }

  bool is_zero() const;
  bool is_rational() const;
  // Valid only if is_rational().
  Rational rational_value() const;

  // Exact sign: -1, 0, +1. Zero is decided symbolically; nonzero values are
  // separated by refining the isolating interval.
  int sign() const;

  // Approximation v with radius eps, |v - value| <= eps <= 2^-bits * max(1,|v|).
  std::pair<double, double> to_float(int bits) const;
  double to_double() const { return to_float(64).first; }

  AlgebraicReal operator-() const;
  friend AlgebraicReal operator+(const AlgebraicReal& a, const AlgebraicReal& b);
  friend AlgebraicReal operator-(const AlgebraicReal& a, const AlgebraicReal& b);
  friend AlgebraicReal operator*(const AlgebraicReal& a, const AlgebraicReal& b);
  friend AlgebraicReal operator/(const AlgebraicReal& a, const AlgebraicReal& b);

  AlgebraicReal inverse() const;
  AlgebraicReal abs() const { return sign() < 0 ? -*this : *this; }

  friend bool operator==(const AlgebraicReal& a, const AlgebraicReal& b) {
    return compare(a, b) == 0;
  }
  friend bool operator!=(const AlgebraicReal& a, const AlgebraicReal& b) {
    return compare(a, b) != 0;
  }
  friend bool operator<(const AlgebraicReal& a, const AlgebraicReal& b) {
    return compare(a, b) < 0;
  }
  friend bool operator<=(const AlgebraicReal& a, const AlgebraicReal& b) {
    return compare(a, b) <= 0;
  }
  friend bool operator>(const AlgebraicReal& a, const AlgebraicReal& b) {
    return compare(a, b) > 0;
  }
  friend bool operator>=(const AlgebraicReal& a, const AlgebraicReal& b) {
    return compare(a, b) >= 0;
  }

  static int compare(const AlgebraicReal& a, const AlgebraicReal& b);

  // Structural equality of reduced representations (no sign refinement).
  bool same_rep(const AlgebraicReal& o) const { return coeffs_ == o.coeffs_; }

  // Canonical exact form, e.g. "3/2" or "1/2+3t+t^2" with t = theta.
  std::string str() const;
  // Rational enclosure of the value with width <= max_width.
  std::pair<Rational, Rational> enclosure(const Rational& max_width) const;

 private:
  void reduce();
  static void check_same_field(const AlgebraicReal& a, const AlgebraicReal& b);

  FieldPtr field_;
  std::vector<Rational> coeffs_;  // size == degree of field
};

}  // namespace mfa

#endif  // MFA_NUMBER_FIELD_HPP_
