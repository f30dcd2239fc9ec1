#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <functional>
#include <set>

#include "mfa/transition_graph.hpp"
#include "systems.hpp"

using namespace mfa;
using namespace mfa_tests;

namespace {

TransitionGraph built(const WIFS& w) {
  TransitionGraph g = build_graph(w, IterationRule{RuleKind::Uniform});
  solve_masses(g);
  return g;
}

// All rooted paths of a given length.
void rooted_paths(const TransitionGraph& g, int len, const std::function<void(const Path&)>& fn) {
  Path cur;
  std::function<void(int)> dfs = [&](int v) {
    if (static_cast<int>(cur.size()) == len) {
      fn(cur);
      return;
    }
    for (int eid : g.vertices()[v].out) {
      cur.push_back(eid);
      dfs(g.edges()[eid].dst);
      cur.pop_back();
    }
  };
  dfs(TransitionGraph::kRoot);
}

bool strongly_connected(const TransitionGraph& g) {
  auto reach = [&](bool reverse) {
    std::vector<std::vector<int>> adj(g.vertices().size());
    for (const auto& e : g.edges())
      adj[reverse ? e.dst : e.src].push_back(reverse ? e.src : e.dst);
    std::vector<bool> seen(g.vertices().size(), false);
    std::vector<int> st = {0};
    seen[0] = true;
    size_t cnt = 1;
    while (!st.empty()) {
      int v = st.back();
      st.pop_back();
      for (int w : adj[v])
        if (!seen[w]) {
          seen[w] = true;
          ++cnt;
          st.push_back(w);
        }
    }
    return cnt == g.vertices().size();
  };
  return reach(false) && reach(true);
}

}  // namespace

TEST_CASE("cantor-overlap graph closes and is strongly connected") {
  TransitionGraph g = built(cantor_overlap());
  CHECK(g.vertices().size() >= 2);
  CHECK(g.vertices().size() < 100);
  CHECK(strongly_connected(g));
}

TEST_CASE("build_graph requires a normalized hull and honors the vertex cap") {
  auto f = NumberField::rationals();
  AlgebraicReal half(f, rat(1, 2)), zero(f, rat(0)), one(f, rat(1));
  WIFS not_norm(f, {Similarity(half, zero), Similarity(half, one)}, {rat(1, 2), rat(1, 2)});
  CHECK_THROWS_AS(build_graph(not_norm, IterationRule{}), Error);

  BuildCaps tight;
  tight.vertex_cap = 2;
  try {
    build_graph(cantor_overlap(), IterationRule{}, tight);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == Errc::FncNotDetected);
  }
}

TEST_CASE("golden-mean convolution graph contains the expected skeleton") {
  TransitionGraph g = built(golden_bc(rat(1, 2)));
  // root has three children: left loop vertex, overlap vertex, right loop vertex
  REQUIRE(g.vertices()[0].out.size() == 3);
  int vleft = g.edges()[g.vertices()[0].out[0]].dst;
  int vright = g.edges()[g.vertices()[0].out[2]].dst;
  CHECK(g.vertices()[vleft].nb.size() == 1);
  CHECK(g.vertices()[vright].nb.size() == 1);
  // both carry a self-loop
  auto has_self_loop = [&](int v) {
    for (int eid : g.vertices()[v].out)
      if (g.edges()[eid].dst == v) return true;
    return false;
  };
  CHECK(has_self_loop(vleft));
  CHECK(has_self_loop(vright));
  CHECK_FALSE(strongly_connected(g));
}

TEST_CASE("testud neighbour sets stay within the three expected types") {
  // ell = 3, P = {0,1,2}, N = {1}: vertices subset of {v_1, v_-1, v_+-1}
  WIFS w = testud(3, {0, 1, 2}, {1}, uniform_probs(4));
  TransitionGraph g = built(w);
  CHECK(g.vertices().size() <= 3);
  for (const auto& v : g.vertices()) CHECK(v.nb.size() <= 2);
  // the root is v_1 = {id}, and it recurs as a vertex of the graph
  CHECK(g.vertices()[0].nb.maps[0].is_identity());

  // P = N: only the root and the doubled vertex appear
  WIFS w2 = testud(3, {0, 1, 2}, {0, 1, 2}, uniform_probs(6));
  TransitionGraph g2 = built(w2);
  CHECK(g2.vertices().size() == 2);
  CHECK(g2.vertices()[1].nb.size() == 2);
}

TEST_CASE("masses: root mass one, all positive, oracle brackets each neighbour") {
  for (const WIFS& w : {cantor_overlap(), golden_bc(rat(1, 2)), golden_bc(rat(1, 3))}) {
    TransitionGraph g = built(w);
    for (const auto& [key, mass] : g.masses()) CHECK(mass > 0);
    CHECK(g.vertex_mass(TransitionGraph::kRoot, 0) == 1);
    // Each neighbour mass f mu((0,1)) is bracketed by the brute-force oracle
    // applied to f^{-1}((0,1)).
    std::set<std::string> seen;
    for (const auto& v : g.vertices()) {
      for (const auto& f : v.nb.maps) {
        if (!seen.insert(f.key()).second) continue;
        Similarity finv = f.inverse();
        AlgebraicReal u = finv(w.zero()), vv = finv(w.one());
        if (u > vv) std::swap(u, vv);
        auto [lo, hi] = measure_oracle(w, u, vv, 12);
        Rational mass = g.masses().at(f.key());
        CHECK(lo <= mass);
        CHECK(mass <= hi);
      }
    }
  }
}

TEST_CASE("path measures: root one, additivity, diameter encoding, oracle consistency") {
  TransitionGraph g = built(golden_bc(rat(1, 2)));
  const WIFS& w = g.wifs();
  CHECK(g.path_measure({}) == 1);

  NetInterval root{w.zero(), w.one(), 0, NeighbourSet::root(w.field())};
  int checked = 0;
  for (int len = 1; len <= 5; ++len) {
    rooted_paths(g, len, [&](const Path& p) {
      // additivity over children
      Rational total(0);
      int end = g.edges()[p.back()].dst;
      for (int eid : g.vertices()[end].out) {
        Path q = p;
        q.push_back(eid);
        total += g.path_measure(q);
      }
      CHECK(total == g.path_measure(p));
      // diameter encoding: W(eta) = diam(pi(eta))
      NetInterval iv = g.realize(root, p);
      CHECK(g.path_weight(p) == iv.diam());
      // measure consistency against the brute-force oracle
      if (len <= 3) {
        auto [lo, hi] = measure_oracle(w, iv.a, iv.b, 10);
        Rational m = g.path_measure(p);
        CHECK(lo <= m);
        CHECK(m <= hi);
      }
      ++checked;
    });
  }
  CHECK(checked > 20);
}

TEST_CASE("quasi-multiplicativity with computable constants") {
  TransitionGraph g = built(cantor_overlap());
  // For each prefix eta1, ||T(eta1 eta2)|| is pinched between
  // (min positive column sum of T(eta1)) * ||T(eta2)|| and ||T(eta1)|| * ||T(eta2)||.
  rooted_paths(g, 2, [&](const Path& p1) {
    QMatrix t1 = g.path_matrix(p1);
    Rational c1(-1), n1(0);
    for (size_t j = 0; j < t1[0].size(); ++j) {
      Rational col(0);
      for (size_t i = 0; i < t1.size(); ++i) col += t1[i][j];
      if (c1 < 0 || col < c1) c1 = col;
      n1 += col;
    }
    int start = g.edges()[p1.back()].dst;
    // continue with every length-3 continuation
    Path cur;
    std::function<void(int)> dfs = [&](int v) {
      if (cur.size() == 3) {
        QMatrix t2 = g.path_matrix(cur);
        Path cat = p1;
        cat.insert(cat.end(), cur.begin(), cur.end());
        Rational n12 = qmat_norm(g.path_matrix(cat));
        Rational n2 = qmat_norm(t2);
        CHECK(n12 >= c1 * n2);
        CHECK(n12 <= n1 * n2);
        return;
      }
      for (int eid : g.vertices()[v].out) {
        cur.push_back(eid);
        dfs(g.edges()[eid].dst);
        cur.pop_back();
      }
    };
    dfs(start);
  });
}

TEST_CASE("raw matrices have a positive entry in each column and per-row out-edges") {
  for (const WIFS& w : {cantor_overlap(), golden_bc(rat(1, 2))}) {
    TransitionGraph g = built(w);
    for (const auto& e : g.edges()) {
      for (size_t j = 0; j < e.raw[0].size(); ++j) {
        Rational col(0);
        for (size_t i = 0; i < e.raw.size(); ++i) col += e.raw[i][j];
        CHECK(col > 0);
      }
    }
    for (const auto& v : g.vertices()) {
      for (size_t i = 0; i < v.nb.maps.size(); ++i) {
        bool hit = false;
        for (int eid : v.out) {
          const auto& raw = g.edges()[eid].raw;
          for (size_t j = 0; j < raw[i].size(); ++j)
            if (raw[i][j] > 0) hit = true;
        }
        CHECK(hit);
      }
    }
  }
}

TEST_CASE("exports are deterministic") {
  TransitionGraph g1 = built(cantor_overlap());
  TransitionGraph g2 = built(cantor_overlap());
  CHECK(export_dot(g1) == export_dot(g2));
  CHECK(graph_json(g1) == graph_json(g2));
  CHECK(export_dot(g1).find("digraph") == 0);
}

TEST_CASE("path helpers reject malformed paths") {
  TransitionGraph g = built(cantor_overlap());
  // a path must start at the root for measures
  int non_root_edge = -1;
  for (size_t i = 0; i < g.edges().size(); ++i)
    if (g.edges()[i].src != TransitionGraph::kRoot) {
      non_root_edge = static_cast<int>(i);
      break;
    }
  REQUIRE(non_root_edge >= 0);
  CHECK_THROWS_AS(g.path_measure({non_root_edge}), Error);
}
