#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <map>

#include "mfa/net_intervals.hpp"

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

WIFS golden_bc() {
  auto f = NumberField::make({Rational(-1), Rational(-1), Rational(1)}, Rational(1), Rational(2));
  AlgebraicReal lam = AlgebraicReal::theta(f).inverse();
  AlgebraicReal one(f, Rational(1));
  std::vector<Similarity> maps = {Similarity(lam, AlgebraicReal(f, Rational(0))),
                                  Similarity(lam, one - lam)};
  return WIFS(f, maps, {rat(1, 2), rat(1, 2)});
}

NetInterval root_of(const WIFS& w) {
  return NetInterval{w.zero(), w.one(), 0, NeighbourSet::root(w.field())};
}

}  // namespace

TEST_CASE("rule_expand uniform and weighted") {
  WIFS w = cantor_overlap();
  auto f = w.field();
  NeighbourSet v;
  v.maps = {Similarity(AlgebraicReal(f, rat(3)), AlgebraicReal(f, rat(-2))),
            Similarity(AlgebraicReal(f, rat(9)), AlgebraicReal(f, rat(0)))};
  auto uni = rule_expand(IterationRule{RuleKind::Uniform}, w, v);
  REQUIRE(uni.size() == 2);
  CHECK(uni[0].size() == 3);
  CHECK(uni[1].size() == 3);

  // weighted: only the max-|slope| neighbour expands, the other keeps the
  // empty word
  auto wt = rule_expand(IterationRule{RuleKind::Weighted}, w, v);
  REQUIRE(wt.size() == 2);
  CHECK(wt[0].size() == 1);
  CHECK(wt[0][0].empty());
  CHECK(wt[1].size() == 3);

  // root expansion
  NeighbourSet r = NeighbourSet::root(f);
  auto rr = rule_expand(IterationRule{RuleKind::Weighted}, w, r);
  REQUIRE(rr.size() == 1);
  CHECK(rr[0].size() == 3);
}

TEST_CASE("intersects_attractor on the worked example") {
  WIFS w = cantor_overlap();
  CHECK(intersects_attractor(w, w.value(rat(2, 3)), w.one(), 64) == Hit::Yes);
  CHECK(intersects_attractor(w, w.value(rat(5, 9)), w.value(rat(2, 3)), 64) == Hit::No);
  CHECK(intersects_attractor(w, w.zero(), w.one(), 64) == Hit::Yes);
  // deep gap: rescale (5/9,2/3) into the first child
  CHECK(intersects_attractor(w, w.value(rat(5, 27)), w.value(rat(2, 9)), 64) == Hit::No);
}

TEST_CASE("children of [0,1] for the worked overlap example") {
  WIFS w = cantor_overlap();
  Subdivision sub = children(w, IterationRule{RuleKind::Uniform}, root_of(w));

  // Y = {0, 2/9, 1/3, 5/9, 2/3, 1}
  std::vector<Rational> expect_y = {rat(0), rat(2, 9), rat(1, 3), rat(5, 9), rat(2, 3), rat(1)};
  REQUIRE(sub.cut_points.size() == expect_y.size());
  for (size_t i = 0; i < expect_y.size(); ++i)
    CHECK(sub.cut_points[i].rational_value() == expect_y[i]);

  // children [0,2/9], [2/9,1/3], [1/3,5/9], [2/3,1]; the gap (5/9,2/3) dropped
  REQUIRE(sub.children.size() == 4);
  std::vector<std::pair<Rational, Rational>> expect_c = {
      {rat(0), rat(2, 9)}, {rat(2, 9), rat(1, 3)}, {rat(1, 3), rat(5, 9)}, {rat(2, 3), rat(1)}};
  for (size_t i = 0; i < 4; ++i) {
    CHECK(sub.children[i].child.a.rational_value() == expect_c[i].first);
    CHECK(sub.children[i].child.b.rational_value() == expect_c[i].second);
  }

  // vs([2/9,1/3]) = {x -> 3x-2, x -> 3x}
  const NeighbourSet& nb2 = sub.children[1].child.nb;
  REQUIRE(nb2.size() == 2);
  CHECK(nb2.maps[0].a.rational_value() == rat(3));
  CHECK(nb2.maps[0].b.rational_value() == rat(-2));
  CHECK(nb2.maps[1].a.rational_value() == rat(3));
  CHECK(nb2.maps[1].b.is_zero());

  // the root-to-second-child raw matrix collects both generating words
  CHECK(sub.children[1].raw[0][0] + sub.children[1].raw[0][1] == rat(2, 3));

  // position indices and weights
  CHECK(sub.children[0].position.rational_value() == rat(0));
  CHECK(sub.children[1].position.rational_value() == rat(2, 9));
  CHECK(sub.children[3].position.rational_value() == rat(2, 3));
  CHECK(sub.children[0].weight.rational_value() == rat(2, 9));
  CHECK(sub.children[1].weight.rational_value() == rat(1, 9));
}

TEST_CASE("children of [0,1] for the golden-mean convolution") {
  WIFS w = golden_bc();
  Subdivision sub = children(w, IterationRule{RuleKind::Uniform}, root_of(w));
  // lambda^2 + lambda = 1: children [0, 1-lambda], [1-lambda, lambda], [lambda, 1]
  REQUIRE(sub.children.size() == 3);
  AlgebraicReal lam = w.maps()[0].a;
  AlgebraicReal one = w.one();
  CHECK(sub.children[0].child.b == one - lam);
  CHECK(sub.children[1].child.a == one - lam);
  CHECK(sub.children[1].child.b == lam);
  CHECK(sub.children[2].child.a == lam);
  CHECK(sub.children[0].child.nb.size() == 1);
  CHECK(sub.children[1].child.nb.size() == 2);  // the overlap piece
  CHECK(sub.children[2].child.nb.size() == 1);
}

TEST_CASE("determinism: equal neighbour sets produce equal child signatures") {
  WIFS w = cantor_overlap();
  IterationRule rule{RuleKind::Uniform};
  // Walk two levels and record child signatures per neighbour-set key.
  std::map<std::string, std::string> signature;
  std::vector<NetInterval> frontier = {root_of(w)};
  for (int level = 0; level < 3; ++level) {
    std::vector<NetInterval> next;
    for (const auto& iv : frontier) {
      Subdivision sub = children(w, rule, iv);
      std::string sig;
      for (const auto& rec : sub.children) {
        sig += rec.child.nb.key() + "@" + rec.position.str() + "*" + rec.weight.str() + "#";
        next.push_back(rec.child);
      }
      auto [it, fresh] = signature.try_emplace(iv.nb.key(), sig);
      if (!fresh) CHECK(it->second == sig);
    }
    frontier = std::move(next);
  }
}

TEST_CASE("children tile the parent and weights are in (0,1)") {
  WIFS w = golden_bc();
  IterationRule rule{RuleKind::Uniform};
  std::vector<NetInterval> frontier = {root_of(w)};
  for (int level = 0; level < 4; ++level) {
    std::vector<NetInterval> next;
    for (const auto& iv : frontier) {
      Subdivision sub = children(w, rule, iv);
      Rational wsum(0);
      AlgebraicReal prev = iv.a;
      for (const auto& rec : sub.children) {
        CHECK(rec.weight.sign() > 0);
        CHECK(rec.weight < w.one());
        CHECK(rec.child.a >= prev);  // ordered, interiors disjoint
        prev = rec.child.a;
        for (const auto& g : rec.child.nb.maps) CHECK(g.a.abs() >= w.one());
        next.push_back(rec.child);
      }
      CHECK(sub.children.front().child.a >= iv.a);
      CHECK(sub.children.back().child.b <= iv.b);
    }
    frontier = std::move(next);
    if (frontier.size() > 40) frontier.resize(40);
  }
}
