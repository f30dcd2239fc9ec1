#include "mfa/wifs.hpp"

#include <algorithm>
#include <cmath>

namespace mfa {

WIFS::WIFS(FieldPtr field, std::vector<Similarity> maps, std::vector<Rational> probs)
    : field_(std::move(field)), maps_(std::move(maps)), probs_(std::move(probs)) {
  if (maps_.empty()) fail(Errc::ValidationError, "empty map list");
  if (maps_.size() != probs_.size())
    fail(Errc::ValidationError, "maps and probabilities have different lengths");
  AlgebraicReal one(field_, Rational(1));
  for (size_t i = 0; i < maps_.size(); ++i) {
    const auto& a = maps_[i].a;
    if (a.is_zero()) fail(Errc::ValidationError, "map " + std::to_string(i) + " has zero ratio");
    if (a.abs() >= one)
      fail(Errc::ValidationError, "map " + std::to_string(i) + " is not a contraction");
    if (probs_[i] <= 0)
      fail(Errc::ValidationError, "probability " + std::to_string(i) + " is not positive");
  }
  Rational total(0);
  for (const auto& p : probs_) total += p;
  if (total != 1) fail(Errc::ValidationError, "probabilities sum to " + rat_str(total));
  // Fixed point of S_i is b_i / (1 - a_i); a shared fixed point for all maps
  // collapses the attractor to one point.
  AlgebraicReal fix0 = maps_[0].b / (one - maps_[0].a);
  bool all_equal = true;
  for (size_t i = 1; i < maps_.size() && all_equal; ++i) {
    AlgebraicReal fix = maps_[i].b / (one - maps_[i].a);
    if (fix != fix0) all_equal = false;
  }
  if (all_equal) fail(Errc::SingletonAttractor, "all maps share one fixed point");
}

bool WIFS::hull_is_unit() const {
  AlgebraicReal lo = zero(), hi = one();
  bool first = true;
  AlgebraicReal mn, mx;
  for (const auto& s : maps_) {
    auto [u, v] = s.unit_image();
    if (first) {
      mn = u;
      mx = v;
      first = false;
    } else {
      if (u < mn) mn = u;
      if (v > mx) mx = v;
    }
  }
  return mn == lo && mx == hi;
}

double WIFS::max_ratio_upper() const {
  double m = 0;
  for (const auto& s : maps_) {
    auto [v, e] = s.a.to_float(60);
    m = std::max(m, std::abs(v) + e);
  }
  return m;
}

WordMapResult WIFS::word_map(const Word& w) const {
  Similarity acc = Similarity::identity(field_);
  Rational p(1);
  AlgebraicReal r = one();
  for (int idx : w) {
    if (idx < 0 || idx >= arity())
      fail(Errc::IndexOutOfRange, "letter " + std::to_string(idx) + " out of range");
    acc = acc.compose(maps_[idx]);
    p *= probs_[idx];
    r = r * maps_[idx].a;
  }
  return {acc, p, r};
}

WIFS normalize_hull(const WIFS& w) {
  const auto& maps = w.maps();
  const int m = static_cast<int>(maps.size());
  AlgebraicReal u, v;
  bool found = false;
  // u = S_i(x), v = S_j(y) with x, y ranging over {u, v}: solve each linear
  // system and keep the candidate validated by substitution.
  for (int i = 0; i < m && !found; ++i) {
    for (int xi = 0; xi < 2 && !found; ++xi) {
      for (int j = 0; j < m && !found; ++j) {
        for (int yj = 0; yj < 2 && !found; ++yj) {
          // u = ai*X + bi, v = aj*Y + bj where X = (xi ? v : u), Y = (yj ? v : u).
          // Write as u - ai*X = bi ; v - aj*Y = bj and solve the 2x2 system.
          const AlgebraicReal &ai = maps[i].a, &bi = maps[i].b;
          const AlgebraicReal &aj = maps[j].a, &bj = maps[j].b;
          AlgebraicReal one = w.one();
          // Coefficients of [u, v] in each equation.
          AlgebraicReal c00 = one, c01 = w.zero();
          if (xi == 0)
            c00 = one - ai;
          else
            c01 = -ai;
          AlgebraicReal c10 = w.zero(), c11 = one;
          if (yj == 0)
            c10 = -aj;
          else
            c11 = one - aj;
          AlgebraicReal det = c00 * c11 - c01 * c10;
          if (det.is_zero()) continue;
          AlgebraicReal cu = (bi * c11 - c01 * bj) / det;
          AlgebraicReal cv = (c00 * bj - bi * c10) / det;
          if (!(cu < cv)) continue;
          // Substitute: hull-update of [cu,cv] must reproduce [cu,cv].
          bool ok_min = false, ok_max = false, ok = true;
          for (int k = 0; k < m && ok; ++k) {
            AlgebraicReal p = maps[k](cu), q = maps[k](cv);
            AlgebraicReal lo = p < q ? p : q;
            AlgebraicReal hi = p < q ? q : p;
            if (lo < cu || hi > cv) ok = false;
            if (ok && lo == cu) ok_min = true;
            if (ok && hi == cv) ok_max = true;
          }
          if (ok && ok_min && ok_max) {
            u = cu;
            v = cv;
            found = true;
          }
        }
      }
    }
  }
  if (!found) fail(Errc::Internal, "hull fixed point not found");
  AlgebraicReal span = v - u;
  if (u.is_zero() && span == w.one()) return w;
  std::vector<Similarity> out;
  out.reserve(maps.size());
  for (const auto& s : maps) {
    // psi o S o psi^{-1} with psi(x) = (x - u)/span: slope unchanged.
    AlgebraicReal b = (s.a * u + s.b - u) / span;
    out.emplace_back(s.a, b);
  }
  return WIFS(w.field(), std::move(out), w.probs());
}

namespace {

void oracle_rec(const WIFS& w, const AlgebraicReal& lo, const AlgebraicReal& hi,
                const Similarity& cur, const Rational& p, int depth, Rational& lower,
                Rational& upper) {
  auto [ilo, ihi] = cur.unit_image();
  if (ihi < lo || ilo > hi) return;        // image misses [lo,hi]
  if (ilo >= lo && ihi <= hi) {            // image inside: whole subtree counts
    lower += p;
    upper += p;
    return;
  }
  if (depth == 0) {
    upper += p;  // straddles at the cut level
    return;
  }
  for (int i = 0; i < w.arity(); ++i)
    oracle_rec(w, lo, hi, cur.compose(w.maps()[i]), p * w.probs()[i], depth - 1, lower, upper);
}

}  // namespace

std::pair<Rational, Rational> measure_oracle(const WIFS& w, const AlgebraicReal& lo,
                                             const AlgebraicReal& hi, int depth) {
  if (depth < 0) fail(Errc::ValidationError, "oracle depth must be >= 0");
  if (lo > hi) fail(Errc::ValidationError, "oracle interval is empty");
  Rational lower(0), upper(0);
  oracle_rec(w, lo, hi, Similarity::identity(w.field()), Rational(1), depth, lower, upper);
  return {lower, upper};
}

}  // namespace mfa
