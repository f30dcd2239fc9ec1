#ifndef MFA_SIMILARITY_HPP_
#define MFA_SIMILARITY_HPP_

#include <string>
#include <utility>

#include "mfa/number_field.hpp"

namespace mfa {

// An affine map x -> a*x + b with a != 0 and exact coefficients.
// Ordered lexicographically on (a, b), the total order on Sim(R).
struct Similarity {
  AlgebraicReal a, b;

  Similarity() = default;
  Similarity(AlgebraicReal slope, AlgebraicReal offset)
      : a(std::move(slope)), b(std::move(offset)) {}

  static Similarity identity(const FieldPtr& field) {
    return Similarity(AlgebraicReal(field, Rational(1)), AlgebraicReal(field, Rational(0)));
  }

  AlgebraicReal operator()(const AlgebraicReal& x) const { return a * x + b; }

  // this o g
  Similarity compose(const Similarity& g) const { return Similarity(a * g.a, a * g.b + b); }

  Similarity inverse() const {
    AlgebraicReal ai = a.inverse();
    return Similarity(ai, -(b * ai));
  }

  bool is_identity() const {
    return a.is_rational() && a.rational_value() == 1 && b.is_zero();
  }

  // Image of [0,1] as an ordered pair (handles negative slope).
  std::pair<AlgebraicReal, AlgebraicReal> unit_image() const {
    AlgebraicReal u = b, v = a + b;
    if (a.sign() < 0) return {v, u};
    return {u, v};
  }

  std::string key() const { return a.str() + "|" + b.str(); }
  std::string str() const;

  friend bool operator==(const Similarity& f, const Similarity& g) {
    return f.a.same_rep(g.a) && f.b.same_rep(g.b);
  }
};

// Exact lexicographic comparison on (a, b).
int sim_compare(const Similarity& f, const Similarity& g);

inline bool sim_less(const Similarity& f, const Similarity& g) { return sim_compare(f, g) < 0; }

}  // namespace mfa

#endif  // MFA_SIMILARITY_HPP_
