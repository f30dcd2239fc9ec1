#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "mfa/wifs.hpp"

using namespace mfa;

namespace {

WIFS cantor_overlap() {
  auto f = NumberField::rationals();
  AlgebraicReal third(f, rat(1, 3));
  std::vector<Similarity> maps = {
      Similarity(third, AlgebraicReal(f, rat(0))),
      Similarity(third, AlgebraicReal(f, rat(2, 9))),
      Similarity(third, AlgebraicReal(f, rat(2, 3))),
  };
  return WIFS(f, maps, {rat(1, 3), rat(1, 3), rat(1, 3)});
}

WIFS golden_bc(const Rational& p1) {
  auto f = NumberField::make({Rational(-1), Rational(-1), Rational(1)}, Rational(1), Rational(2));
  AlgebraicReal lam = AlgebraicReal::theta(f).inverse();
  AlgebraicReal one(f, Rational(1));
  std::vector<Similarity> maps = {Similarity(lam, AlgebraicReal(f, Rational(0))),
                                  Similarity(lam, one - lam)};
  return WIFS(f, maps, {p1, 1 - p1});
}

}  // namespace

TEST_CASE("wifs validation") {
  auto f = NumberField::rationals();
  AlgebraicReal half(f, rat(1, 2)), third(f, rat(1, 3)), zero(f, rat(0));
  // contraction violation
  CHECK_THROWS_AS(WIFS(f, {Similarity(AlgebraicReal(f, rat(3, 2)), zero)}, {rat(1)}), Error);
  // probabilities must sum to 1
  CHECK_THROWS_AS(WIFS(f,
                       {Similarity(half, zero), Similarity(half, AlgebraicReal(f, rat(1, 2)))},
                       {rat(1, 3), rat(1, 3)}),
                  Error);
  // shared fixed point collapses the attractor
  try {
    WIFS(f, {Similarity(half, zero), Similarity(third, zero)}, {rat(1, 2), rat(1, 2)});
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == Errc::SingletonAttractor);
  }
}

TEST_CASE("normalize_hull leaves normalized systems unchanged") {
  WIFS w = cantor_overlap();
  CHECK(w.hull_is_unit());
  WIFS n = normalize_hull(w);
  for (int i = 0; i < 3; ++i) {
    CHECK(n.maps()[i].a == w.maps()[i].a);
    CHECK(n.maps()[i].b == w.maps()[i].b);
  }
  WIFS bc = golden_bc(rat(1, 2));
  CHECK(bc.hull_is_unit());
  WIFS nbc = normalize_hull(bc);
  CHECK(nbc.maps()[1].b == bc.maps()[1].b);
}

TEST_CASE("normalize_hull rescales {x/2, x/2+1} to {x/2, x/2+1/2}") {
  auto f = NumberField::rationals();
  AlgebraicReal half(f, rat(1, 2)), zero(f, rat(0)), one(f, rat(1));
  WIFS w(f, {Similarity(half, zero), Similarity(half, one)}, {rat(1, 2), rat(1, 2)});
  CHECK_FALSE(w.hull_is_unit());
  WIFS n = normalize_hull(w);
  CHECK(n.hull_is_unit());
  CHECK(n.maps()[0].b.is_zero());
  CHECK(n.maps()[1].b.rational_value() == rat(1, 2));
  // idempotent
  WIFS n2 = normalize_hull(n);
  CHECK(n2.maps()[1].b == n.maps()[1].b);
}

TEST_CASE("normalize_hull handles orientation-reversing maps") {
  auto f = NumberField::rationals();
  AlgebraicReal mthird(f, rat(-1, 3)), third(f, rat(1, 3));
  WIFS w(f, {Similarity(mthird, AlgebraicReal(f, rat(1, 3))),
             Similarity(third, AlgebraicReal(f, rat(2, 3)))},
         {rat(1, 2), rat(1, 2)});
  WIFS n = normalize_hull(w);
  CHECK(n.hull_is_unit());
}

TEST_CASE("word_map composes exactly") {
  WIFS w = cantor_overlap();
  auto empty = w.word_map({});
  CHECK(empty.map.is_identity());
  CHECK(empty.prob == 1);
  CHECK(empty.ratio == w.one());

  auto r12 = w.word_map({0, 1});  // S_1 o S_2 in 1-based labels
  CHECK(r12.map.a.rational_value() == rat(1, 9));
  CHECK(r12.map.b.rational_value() == rat(2, 27));
  CHECK(r12.prob == rat(1, 9));

  auto r3 = w.word_map({2});
  CHECK(r3.map.b.rational_value() == rat(2, 3));
  CHECK(r3.ratio.rational_value() == rat(1, 3));

  CHECK_THROWS_AS(w.word_map({5}), Error);
}

TEST_CASE("word_map is a homomorphism on random word pairs") {
  WIFS w = cantor_overlap();
  std::mt19937 rng(5);
  std::uniform_int_distribution<int> len(0, 5), letter(0, 2);
  for (int iter = 0; iter < 40; ++iter) {
    Word u, v;
    for (int i = len(rng); i > 0; --i) u.push_back(letter(rng));
    for (int i = len(rng); i > 0; --i) v.push_back(letter(rng));
    Word uv = u;
    uv.insert(uv.end(), v.begin(), v.end());
    auto ru = w.word_map(u), rv = w.word_map(v), ruv = w.word_map(uv);
    CHECK(ruv.map == ru.map.compose(rv.map));
    CHECK(ruv.prob == ru.prob * rv.prob);
    CHECK(ruv.ratio == ru.ratio * rv.ratio);
  }
}

TEST_CASE("measure_oracle brackets") {
  WIFS w = cantor_overlap();
  auto full = measure_oracle(w, w.zero(), w.one(), 3);
  CHECK(full.first == 1);
  CHECK(full.second == 1);

  auto right = measure_oracle(w, w.value(rat(2, 3)), w.one(), 1);
  CHECK(right.first == rat(1, 3));
  CHECK(right.second == rat(1, 3));

  // mu([0,1/3]) = 1/2 exactly (fixed point of m = 1/3 + m/3)
  auto left2 = measure_oracle(w, w.zero(), w.value(rat(1, 3)), 2);
  CHECK(left2.first == rat(4, 9));
  CHECK(left2.second == rat(5, 9));
  CHECK(left2.first <= rat(1, 2));
  CHECK(left2.second >= rat(1, 2));
}

TEST_CASE("measure_oracle brackets nest as depth grows") {
  WIFS w = cantor_overlap();
  WIFS bc = golden_bc(rat(1, 3));
  for (const WIFS* sys : {&w, &bc}) {
    AlgebraicReal lo = sys->value(rat(1, 5)), hi = sys->value(rat(7, 10));
    auto prev = measure_oracle(*sys, lo, hi, 0);
    for (int n = 1; n <= 8; ++n) {
      auto cur = measure_oracle(*sys, lo, hi, n);
      CHECK(cur.first >= prev.first);
      CHECK(cur.second <= prev.second);
      prev = cur;
    }
    CHECK(prev.first <= prev.second);
  }
}
