#include "mfa/similarity.hpp"

namespace mfa {

int sim_compare(const Similarity& f, const Similarity& g) {
  if (f.a.same_rep(g.a) && f.b.same_rep(g.b)) return 0;
  int ca = AlgebraicReal::compare(f.a, g.a);
  if (ca != 0) return ca;
  return AlgebraicReal::compare(f.b, g.b);
}

std::string Similarity::str() const {
  std::string s = a.str() + "x";
  if (!b.is_zero()) {
    if (b.sign() > 0)
      s += "+" + b.str();
    else
      s += "-" + (-b).str();
  }
  return s;
}

}  // namespace mfa
