#ifndef MFA_POLYNOMIAL_HPP_
#define MFA_POLYNOMIAL_HPP_

#include <utility>
#include <vector>

#include "mfa/rational.hpp"

namespace mfa {

// Dense univariate polynomial over Q, coefficients low to high, no trailing zeros.
// The zero polynomial is the empty vector and has degree -1.
using Poly = std::vector<Rational>;

int poly_degree(const Poly& p);
Poly poly_trim(Poly p);
Poly poly_add(const Poly& a, const Poly& b);
Poly poly_sub(const Poly& a, const Poly& b);
Poly poly_mul(const Poly& a, const Poly& b);
Poly poly_scale(const Poly& a, const Rational& c);
Poly poly_neg(const Poly& a);
Poly poly_derivative(const Poly& a);
// Quotient and remainder; divisor must be nonzero.
std::pair<Poly, Poly> poly_divmod(const Poly& a, const Poly& b);
// Monic gcd.
Poly poly_gcd(Poly a, Poly b);
// g = gcd(a,b) monic, with u*a + v*b = g.
void poly_egcd(const Poly& a, const Poly& b, Poly& g, Poly& u, Poly& v);
Poly poly_make_monic(Poly p);

Rational poly_eval(const Poly& p, const Rational& x);
// Interval evaluation by Horner; returns an interval containing p([lo,hi]).
std::pair<Rational, Rational> poly_eval_interval(const Poly& p, const Rational& lo,
                                                 const Rational& hi);

// Number of distinct real roots of squarefree p in the half-open interval (a, b],
// with p(a) != 0, via Sturm's theorem.
int sturm_count(const Poly& p, const Rational& a, const Rational& b);

std::string poly_str(const Poly& p);

}  // namespace mfa

#endif  // MFA_POLYNOMIAL_HPP_
