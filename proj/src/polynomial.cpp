#include "mfa/polynomial.hpp"

#include <algorithm>

namespace mfa {

int poly_degree(const Poly& p) { return static_cast<int>(p.size()) - 1; }

Poly poly_trim(Poly p) {
  while (!p.empty() && p.back() == 0) p.pop_back();
  return p;
}

Poly poly_add(const Poly& a, const Poly& b) {
  Poly r(std::max(a.size(), b.size()), Rational(0));
  for (size_t i = 0; i < a.size(); ++i) r[i] += a[i];
  for (size_t i = 0; i < b.size(); ++i) r[i] += b[i];
  return poly_trim(std::move(r));
}

Poly poly_sub(const Poly& a, const Poly& b) {
  Poly r(std::max(a.size(), b.size()), Rational(0));
  for (size_t i = 0; i < a.size(); ++i) r[i] += a[i];
  for (size_t i = 0; i < b.size(); ++i) r[i] -= b[i];
  return poly_trim(std::move(r));
}

Poly poly_mul(const Poly& a, const Poly& b) {
  if (a.empty() || b.empty()) return {};
  Poly r(a.size() + b.size() - 1, Rational(0));
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
  return poly_trim(std::move(r));
}

Poly poly_scale(const Poly& a, const Rational& c) {
  if (c == 0) return {};
  Poly r = a;
  for (auto& x : r) x *= c;
  return r;
}

Poly poly_neg(const Poly& a) { return poly_scale(a, Rational(-1)); }

Poly poly_derivative(const Poly& a) {
  if (a.size() <= 1) return {};
  Poly r(a.size() - 1);
  for (size_t i = 1; i < a.size(); ++i) r[i - 1] = a[i] * Rational(static_cast<long>(i));
  return poly_trim(std::move(r));
}

std::pair<Poly, Poly> poly_divmod(const Poly& a, const Poly& b) {
  if (b.empty()) fail(Errc::DivisionByZero, "polynomial division by zero");
  Poly rem = a;
  int db = poly_degree(b);
  int da = poly_degree(rem);
  if (da < db) return {{}, rem};
  Poly quot(da - db + 1, Rational(0));
  const Rational& lead = b.back();
  while (poly_degree(rem) >= db) {
    int dr = poly_degree(rem);
    Rational c = rem.back() / lead;
    quot[dr - db] = c;
    for (int i = 0; i <= db; ++i) rem[dr - db + i] -= c * b[i];
    rem = poly_trim(std::move(rem));
  }
  return {poly_trim(std::move(quot)), rem};
}

Poly poly_make_monic(Poly p) {
  p = poly_trim(std::move(p));
  if (p.empty()) return p;
  Rational inv = 1 / p.back();
  for (auto& c : p) c *= inv;
  return p;
}

Poly poly_gcd(Poly a, Poly b) {
  a = poly_trim(std::move(a));
  b = poly_trim(std::move(b));
  while (!b.empty()) {
    Poly r = poly_divmod(a, b).second;
    a = std::move(b);
    b = std::move(r);
  }
  return poly_make_monic(std::move(a));
}

void poly_egcd(const Poly& a, const Poly& b, Poly& g, Poly& u, Poly& v) {
  Poly r0 = poly_trim(a), r1 = poly_trim(b);
  Poly u0 = {Rational(1)}, u1 = {};
  Poly v0 = {}, v1 = {Rational(1)};
  while (!r1.empty()) {
    auto [q, r] = poly_divmod(r0, r1);
    Poly u2 = poly_sub(u0, poly_mul(q, u1));
    Poly v2 = poly_sub(v0, poly_mul(q, v1));
    r0 = std::move(r1);
    r1 = std::move(r);
    u0 = std::move(u1);
    u1 = std::move(u2);
    v0 = std::move(v1);
    v1 = std::move(v2);
  }
  if (r0.empty()) {
    g = {};
    u = {};
    v = {};
    return;
  }
  Rational inv = 1 / r0.back();
  g = poly_scale(r0, inv);
  u = poly_scale(u0, inv);
  v = poly_scale(v0, inv);
}

Rational poly_eval(const Poly& p, const Rational& x) {
  Rational acc(0);
  for (auto it = p.rbegin(); it != p.rend(); ++it) acc = acc * x + *it;
  return acc;
}

std::pair<Rational, Rational> poly_eval_interval(const Poly& p, const Rational& lo,
                                                 const Rational& hi) {
  Rational alo(0), ahi(0);
  for (auto it = p.rbegin(); it != p.rend(); ++it) {
    // [alo,ahi] * [lo,hi] + coefficient
    Rational c1 = alo * lo, c2 = alo * hi, c3 = ahi * lo, c4 = ahi * hi;
    Rational mn = std::min(std::min(c1, c2), std::min(c3, c4));
    Rational mx = std::max(std::max(c1, c2), std::max(c3, c4));
    alo = mn + *it;
    ahi = mx + *it;
  }
  return {alo, ahi};
}

namespace {

int sign_changes(const std::vector<Poly>& chain, const Rational& x) {
  int changes = 0, prev = 0;
  for (const auto& p : chain) {
    int s = rat_sign(poly_eval(p, x));
    if (s == 0) continue;
    if (prev != 0 && s != prev) ++changes;
    prev = s;
  }
  return changes;
}

}  // namespace

int sturm_count(const Poly& p, const Rational& a, const Rational& b) {
  std::vector<Poly> chain;
  chain.push_back(poly_trim(p));
  Poly d = poly_derivative(p);
  if (!d.empty()) chain.push_back(d);
  while (chain.size() >= 2 && !chain.back().empty()) {
    Poly r = poly_divmod(chain[chain.size() - 2], chain.back()).second;
    if (r.empty()) break;
    chain.push_back(poly_neg(r));
  }
  return sign_changes(chain, a) - sign_changes(chain, b);
}

std::string poly_str(const Poly& p) {
  if (p.empty()) return "0";
  std::string s;
  for (size_t i = 0; i < p.size(); ++i) {
    if (p[i] == 0) continue;
    if (!s.empty()) s += " + ";
    s += rat_str(p[i]);
    if (i >= 1) s += "*x";
    if (i >= 2) s += "^" + std::to_string(i);
  }
  return s.empty() ? "0" : s;
}

}  // namespace mfa
