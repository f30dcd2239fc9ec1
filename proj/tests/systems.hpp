#ifndef MFA_TESTS_SYSTEMS_HPP_
#define MFA_TESTS_SYSTEMS_HPP_

#include <vector>

#include "mfa/wifs.hpp"

namespace mfa_tests {

using namespace mfa;

inline WIFS cantor_overlap() {
  auto f = NumberField::rationals();
  AlgebraicReal third(f, rat(1, 3));
  std::vector<Similarity> maps = {
      Similarity(third, AlgebraicReal(f, rat(0))),
      Similarity(third, AlgebraicReal(f, rat(2, 9))),
      Similarity(third, AlgebraicReal(f, rat(2, 3))),
  };
  return WIFS(f, maps, {rat(1, 3), rat(1, 3), rat(1, 3)});
}

inline WIFS golden_bc(const Rational& p1) {
  auto f = NumberField::make({Rational(-1), Rational(-1), Rational(1)}, Rational(1), Rational(2));
  AlgebraicReal lam = AlgebraicReal::theta(f).inverse();
  AlgebraicReal one(f, Rational(1));
  std::vector<Similarity> maps = {Similarity(lam, AlgebraicReal(f, Rational(0))),
                                  Similarity(lam, one - lam)};
  return WIFS(f, maps, {p1, 1 - p1});
}

// Pisot Bernoulli convolution for a given minimal polynomial with root in (1,2).
inline WIFS pisot_bc(const Poly& minpoly, const Rational& p1) {
  auto f = NumberField::make(minpoly, Rational(1), Rational(2));
  AlgebraicReal lam = AlgebraicReal::theta(f).inverse();
  AlgebraicReal one(f, Rational(1));
  std::vector<Similarity> maps = {Similarity(lam, AlgebraicReal(f, Rational(0))),
                                  Similarity(lam, one - lam)};
  return WIFS(f, maps, {p1, 1 - p1});
}

// Digit maps x/ell + i/ell for i in P and -x/ell + (i+1)/ell for i in N.
inline WIFS testud(int ell, const std::vector<int>& P, const std::vector<int>& N,
                   const std::vector<Rational>& probs) {
  auto f = NumberField::rationals();
  AlgebraicReal unit(f, Rational(1, ell));
  std::vector<Similarity> maps;
  for (int i : P) maps.emplace_back(unit, AlgebraicReal(f, Rational(i, ell)));
  for (int i : N) maps.emplace_back(-unit, AlgebraicReal(f, Rational(i + 1, ell)));
  return WIFS(f, maps, probs);
}

inline std::vector<Rational> uniform_probs(int n) {
  return std::vector<Rational>(n, Rational(1, n));
}

}  // namespace mfa_tests

#endif  // MFA_TESTS_SYSTEMS_HPP_
