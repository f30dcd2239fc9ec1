#ifndef MFA_WIFS_HPP_
#define MFA_WIFS_HPP_

#include <utility>
#include <vector>

#include "mfa/similarity.hpp"

namespace mfa {

// A word over the map alphabet; concatenation of indices, empty = identity.
using Word = std::vector<int>;

struct WordMapResult {
  Similarity map;     // S_w by exact composition
  Rational prob;      // product of the p_i
  AlgebraicReal ratio;  // product of the r_i
};

// Weighted iterated function system (S_i, p_i) over one shared number field.
// Validated on construction: 0 < |r_i| < 1, p_i > 0, sum p_i = 1, and the
// attractor is not a singleton.
class WIFS {
 public:
  WIFS(FieldPtr field, std::vector<Similarity> maps, std::vector<Rational> probs);

  const FieldPtr& field() const { return field_; }
  const std::vector<Similarity>& maps() const { return maps_; }
  const std::vector<Rational>& probs() const { return probs_; }
  int arity() const { return static_cast<int>(maps_.size()); }

  AlgebraicReal value(const Rational& q) const { return AlgebraicReal(field_, q); }
  AlgebraicReal zero() const { return value(0); }
  AlgebraicReal one() const { return value(1); }

  // True when the convex hull of the attractor is exactly [0,1].
  bool hull_is_unit() const;

  // Largest |r_i| as a double (upper estimate), for depth heuristics.
  double max_ratio_upper() const;

  WordMapResult word_map(const Word& w) const;

 private:
  FieldPtr field_;
  std::vector<Similarity> maps_;
  std::vector<Rational> probs_;
};

// Conjugates the system so that the attractor hull becomes exactly [0,1].
// The hull of the input is the unique fixed interval of
//   h([u,v]) = [min_i min(S_i(u),S_i(v)), max_i max(S_i(u),S_i(v))],
// found by case-splitting on which map and endpoint attain each extreme and
// validating each candidate by substitution.
WIFS normalize_hull(const WIFS& w);

// Brute-force bracket of mu([lo,hi]) from level-`depth` words:
//   lower = sum of p_w over S_w([0,1]) inside [lo,hi],
//   upper = sum of p_w over S_w([0,1]) meeting [lo,hi].
// Monotone in depth; requires a hull-normalized system.
std::pair<Rational, Rational> measure_oracle(const WIFS& w, const AlgebraicReal& lo,
                                             const AlgebraicReal& hi, int depth);

}  // namespace mfa

#endif  // MFA_WIFS_HPP_
