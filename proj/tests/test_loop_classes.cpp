#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <functional>
#include <random>

#include "mfa/loop_classes.hpp"
#include "systems.hpp"

using namespace mfa;
using namespace mfa_tests;

namespace {

TransitionGraph built(const WIFS& w) {
  TransitionGraph g = build_graph(w, IterationRule{RuleKind::Uniform});
  solve_masses(g);
  return g;
}

}  // namespace

TEST_CASE("golden-mean convolution: one essential class plus two simple loops") {
  TransitionGraph g = built(golden_bc(rat(1, 2)));
  auto classes = loop_classes(g);
  REQUIRE(classes.size() == 3);
  int ess = 0, simple = 0;
  for (const auto& lc : classes) {
    if (lc.essential) ++ess;
    if (lc.simple) {
      ++simple;
      CHECK(lc.vertices.size() == 1);
      CHECK(g.vertices()[lc.vertices[0]].nb.size() == 1);
      CHECK(lc.irreducible == Cert::Proven);
      // pinned at a hull endpoint: non-degenerate via the endpoint witness
      CHECK(lc.degenerate == Degen::No);
      CHECK_FALSE(lc.interior_path.has_value());
    }
  }
  CHECK(ess == 1);
  CHECK(simple == 2);
  for (const auto& lc : classes) {
    if (!lc.essential) continue;
    CHECK(lc.irreducible == Cert::Proven);
    CHECK(lc.degenerate == Degen::No);
    // the essential class has an interior cycle witness
    CHECK(lc.interior_path.has_value());
  }
  // topological order: simple loops come before the essential class
  CHECK(classes.back().essential);
}

TEST_CASE("single loop class for the overlap example") {
  TransitionGraph g = built(cantor_overlap());
  auto classes = loop_classes(g);
  REQUIRE(classes.size() == 1);
  CHECK(classes[0].essential);
  CHECK(classes[0].vertices.size() == g.vertices().size());
  CHECK(classes[0].irreducible == Cert::Proven);
  auto dec = check_decomposable(g, classes);
  CHECK(dec.status == Cert::Proven);
  CHECK(dec.witness.find("vacuously") != std::string::npos);
  CHECK(dec.transition_paths.empty());
}

TEST_CASE("testud digit systems") {
  // P = {0,1,2}, N = {1}: essential class {v_+-1} plus the non-essential {v_1}
  WIFS w = testud(3, {0, 1, 2}, {1}, uniform_probs(4));
  TransitionGraph g = built(w);
  auto classes = loop_classes(g);
  REQUIRE(classes.size() == 2);
  CHECK(classes[0].essential == false);
  CHECK(classes[1].essential == true);
  CHECK(classes[1].vertices.size() == 1);
  CHECK(g.vertices()[classes[1].vertices[0]].nb.size() == 2);
  // the non-essential class sits on the root vertex v_1 with two self-loops
  CHECK(classes[0].vertices == std::vector<int>{TransitionGraph::kRoot});
  CHECK(classes[0].edges.size() == 2);
  CHECK_FALSE(classes[0].simple);
  CHECK(classes[0].irreducible == Cert::Proven);

  auto dec = check_decomposable(g, classes);
  CHECK(dec.status == Cert::Proven);
  CHECK(dec.witness.find("size-one") != std::string::npos);
  // when the size-one witness fires, every transition path matrix has one
  // row, hence is strictly positive
  for (const auto& p : dec.transition_paths) {
    QMatrix t = g.path_matrix(p);
    CHECK(t.size() == 1);
    for (const auto& x : t[0]) CHECK(x > 0);
  }

  // P = N: the essential class is the only loop class
  WIFS w2 = testud(3, {0, 1, 2}, {0, 1, 2}, uniform_probs(6));
  TransitionGraph g2 = built(w2);
  auto classes2 = loop_classes(g2);
  REQUIRE(classes2.size() == 1);
  CHECK(classes2[0].essential);
  CHECK(classes2[0].vertices.size() == 1);
  CHECK(g2.vertices()[classes2[0].vertices[0]].nb.size() == 2);
}

TEST_CASE("golden-mean convolution is decomposable via size-one loops") {
  TransitionGraph g = built(golden_bc(rat(1, 3)));
  auto classes = loop_classes(g);
  auto dec = check_decomposable(g, classes);
  CHECK(dec.status == Cert::Proven);
  CHECK(dec.witness.find("size-one") != std::string::npos);
  CHECK(dec.failing_transition_paths.empty());
  CHECK(!dec.initial_paths.empty());
}

TEST_CASE("block support test rejects a broken two-vertex class") {
  // Two vertices with 2x2 matrices sharing a zero row pattern: the support
  // digraph on (vertex, index) pairs splits, so irreducibility must fail.
  std::vector<int> dims = {2, 2};
  std::vector<BlockEdge> bad = {
      {0, 1, {{true, false}, {false, false}}},
      {1, 0, {{true, false}, {false, false}}},
  };
  CHECK_FALSE(block_support_strongly_connected(dims, bad));

  std::vector<BlockEdge> good = {
      {0, 1, {{false, true}, {true, false}}},
      {1, 0, {{true, false}, {false, true}}},
  };
  CHECK(block_support_strongly_connected(dims, good));
}

TEST_CASE("decompose_path round-trips and places segments inside classes") {
  TransitionGraph g = built(golden_bc(rat(1, 2)));
  auto classes = loop_classes(g);
  std::mt19937 rng(17);
  for (int iter = 0; iter < 50; ++iter) {
    Path p;
    int v = TransitionGraph::kRoot;
    std::uniform_int_distribution<int> len(0, 12);
    int want = len(rng);
    for (int k = 0; k < want; ++k) {
      const auto& out = g.vertices()[v].out;
      std::uniform_int_distribution<int> pick(0, static_cast<int>(out.size()) - 1);
      int eid = out[pick(rng)];
      p.push_back(eid);
      v = g.edges()[eid].dst;
    }
    PathDecomposition d = decompose_path(g, classes, p);
    // reconcatenation reproduces the path
    Path recon = d.initial;
    size_t ti = 0;
    for (size_t c = 0; c < d.loop_segments.size(); ++c) {
      if (d.loop_segments[c].empty()) continue;
      recon.insert(recon.end(), d.loop_segments[c].begin(), d.loop_segments[c].end());
      if (ti < d.transitions.size()) {
        recon.insert(recon.end(), d.transitions[ti].begin(), d.transitions[ti].end());
        ++ti;
      }
    }
    CHECK(recon == p);
    // segments lie where claimed
    for (size_t c = 0; c < d.loop_segments.size(); ++c)
      for (int eid : d.loop_segments[c]) {
        CHECK(class_of_vertex(classes, g.edges()[eid].src) == static_cast<int>(c));
        CHECK(class_of_vertex(classes, g.edges()[eid].dst) == static_cast<int>(c));
      }
    // empty path decomposes to all-empty components
    if (p.empty()) {
      CHECK(d.initial.empty());
      for (const auto& seg : d.loop_segments) CHECK(seg.empty());
    }
  }
}

TEST_CASE("interior path realizes strictly inside its start interval") {
  TransitionGraph g = built(golden_bc(rat(1, 2)));
  auto classes = loop_classes(g);
  for (const auto& lc : classes) {
    if (!lc.essential) continue;
    REQUIRE(lc.interior_path.has_value());
    const Path& theta = *lc.interior_path;
    int start = g.edges()[theta[0]].src;
    // cycle inside the class
    CHECK(g.edges()[theta.back()].dst == start);
    NetInterval d0 = g.vertices()[start].rep;
    NetInterval dm = g.realize(d0, theta);
    CHECK(d0.a < dm.a);
    CHECK(dm.b < d0.b);
  }
}

TEST_CASE("edges belong to at most one loop class and classes are disjoint") {
  TransitionGraph g = built(golden_bc(rat(1, 3)));
  auto classes = loop_classes(g);
  std::set<int> seen_vertices, seen_edges;
  for (const auto& lc : classes) {
    for (int v : lc.vertices) CHECK(seen_vertices.insert(v).second);
    for (int e : lc.edges) CHECK(seen_edges.insert(e).second);
    // essential iff no edge leaves the class vertex set
    bool leaves = false;
    for (int v : lc.vertices)
      for (int eid : g.vertices()[v].out)
        if (!std::binary_search(lc.vertices.begin(), lc.vertices.end(), g.edges()[eid].dst))
          leaves = true;
    CHECK(lc.essential == !leaves);
  }
}
