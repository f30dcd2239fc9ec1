#include "mfa/loop_classes.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

#include <algorithm>
#include <functional>
#include <map>
#include <set>

namespace mfa {

namespace {

// Iterative Tarjan over the multigraph.
std::vector<int> tarjan_scc(const TransitionGraph& g, int& scc_count) {
  const int n = static_cast<int>(g.vertices().size());
  std::vector<int> index(n, -1), low(n, 0), comp(n, -1);
  std::vector<bool> on_stack(n, false);
  std::vector<int> stack;
  int next_index = 0;
  scc_count = 0;

  struct Frame {
    int v;
    size_t ei;
  };
  for (int start = 0; start < n; ++start) {
    if (index[start] != -1) continue;
    std::vector<Frame> call = {{start, 0}};
    index[start] = low[start] = next_index++;
    stack.push_back(start);
    on_stack[start] = true;
    while (!call.empty()) {
      Frame& f = call.back();
      const auto& out = g.vertices()[f.v].out;
      if (f.ei < out.size()) {
        int w = g.edges()[out[f.ei++]].dst;
        if (index[w] == -1) {
          index[w] = low[w] = next_index++;
          stack.push_back(w);
          on_stack[w] = true;
          call.push_back({w, 0});
        } else if (on_stack[w]) {
          low[f.v] = std::min(low[f.v], index[w]);
        }
      } else {
        if (low[f.v] == index[f.v]) {
          while (true) {
            int w = stack.back();
            stack.pop_back();
            on_stack[w] = false;
            comp[w] = scc_count;
            if (w == f.v) break;
          }
          ++scc_count;
        }
        int v = f.v;
        call.pop_back();
        if (!call.empty()) low[call.back().v] = std::min(low[call.back().v], low[v]);
      }
    }
  }
  return comp;
}

bool qmat_strictly_positive(const QMatrix& m) {
  for (const auto& r : m)
    for (const auto& x : r)
      if (x <= 0) return false;
  return true;
}

QMatrix qmat_mul(const QMatrix& a, const QMatrix& b) {
  QMatrix out(a.size(), std::vector<Rational>(b[0].size(), Rational(0)));
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t l = 0; l < b.size(); ++l) {
      if (a[i][l] == 0) continue;
      for (size_t j = 0; j < b[0].size(); ++j) out[i][j] += a[i][l] * b[l][j];
    }
  return out;
}

QMatrix raw_product(const TransitionGraph& g, const Path& p) {
  QMatrix acc = g.edges()[p[0]].raw;
  for (size_t k = 1; k < p.size(); ++k) acc = qmat_mul(acc, g.edges()[p[k]].raw);
  return acc;
}

// Translates a loop class into dims plus positivity patterns for the
// block-matrix irreducibility test.
bool block_matrix_irreducible(const TransitionGraph& g, const LoopClassReport& lc) {
  std::map<int, int> reindex;
  std::vector<int> dims;
  for (int v : lc.vertices) {
    reindex[v] = static_cast<int>(dims.size());
    dims.push_back(g.vertices()[v].nb.size());
  }
  std::vector<BlockEdge> edges;
  for (int eid : lc.edges) {
    const GraphEdge& e = g.edges()[eid];
    BlockEdge be;
    be.src = reindex.at(e.src);
    be.dst = reindex.at(e.dst);
    be.positive.assign(e.raw.size(), std::vector<bool>(e.raw[0].size(), false));
    for (size_t i = 0; i < e.raw.size(); ++i)
      for (size_t j = 0; j < e.raw[i].size(); ++j) be.positive[i][j] = e.raw[i][j] > 0;
    edges.push_back(std::move(be));
  }
  return block_support_strongly_connected(dims, edges);
}

// Cycles through the class up to a length cap, emitting at every return to
// the start vertex and continuing, so composite cycles like alternating
// self-loop products are seen as well. Bounded count.
std::vector<Path> enumerate_cycles(const TransitionGraph& g, const LoopClassReport& lc,
                                   size_t max_cycles = 8192) {
  std::vector<Path> cycles;
  size_t cap_len = std::max<size_t>(2 * lc.vertices.size(), 6);
  std::set<int> class_edges(lc.edges.begin(), lc.edges.end());
  for (int start : lc.vertices) {
    Path cur;
    std::function<void(int)> dfs = [&](int v) {
      if (cycles.size() >= max_cycles) return;
      if (!cur.empty() && v == start) cycles.push_back(cur);
      if (cur.size() >= cap_len) return;
      for (int eid : g.vertices()[v].out) {
        if (!class_edges.count(eid)) continue;
        cur.push_back(eid);
        dfs(g.edges()[eid].dst);
        cur.pop_back();
        if (cycles.size() >= max_cycles) return;
      }
    };
    dfs(start);
  }
  return cycles;
}

}  // namespace

CycleDimBounds cycle_dimension_bounds(const TransitionGraph& g, const LoopClassReport& lc) {
  CycleDimBounds out;
  auto cycles = enumerate_cycles(g, lc);
  for (const auto& theta : cycles) {
    QMatrix mn = g.path_matrix(theta);
    double log_rate;
    if (mn.size() == 1 && mn[0].size() == 1) {
      if (mn[0][0] <= 0) continue;
      log_rate = rat_log(mn[0][0]);
    } else {
      Eigen::MatrixXd a(mn.size(), mn.size());
      for (size_t i = 0; i < mn.size(); ++i)
        for (size_t j = 0; j < mn.size(); ++j) a(i, j) = mn[i][j].get_d();
      Eigen::EigenSolver<Eigen::MatrixXd> es(a, false);
      double rad = 0;
      for (int i = 0; i < a.rows(); ++i) rad = std::max(rad, std::abs(es.eigenvalues()[i]));
      if (rad <= 0) continue;
      log_rate = std::log(rad);
    }
    double log_w = g.path_log_weight(theta);
    double alpha = log_rate / log_w;
    if (!out.valid) {
      out.alpha_min = out.alpha_max = alpha;
      out.valid = true;
    } else {
      out.alpha_min = std::min(out.alpha_min, alpha);
      out.alpha_max = std::max(out.alpha_max, alpha);
    }
  }
  return out;
}

bool block_support_strongly_connected(const std::vector<int>& dims,
                                      const std::vector<BlockEdge>& edges) {
  std::vector<int> base(dims.size(), 0);
  int n = 0;
  for (size_t v = 0; v < dims.size(); ++v) {
    base[v] = n;
    n += dims[v];
  }
  if (n == 0) return false;
  std::vector<std::vector<int>> fwd(n), rev(n);
  for (const auto& e : edges)
    for (size_t i = 0; i < e.positive.size(); ++i)
      for (size_t j = 0; j < e.positive[i].size(); ++j)
        if (e.positive[i][j]) {
          int a = base[e.src] + static_cast<int>(i);
          int b = base[e.dst] + static_cast<int>(j);
          fwd[a].push_back(b);
          rev[b].push_back(a);
        }
  auto reach_all = [n](const std::vector<std::vector<int>>& adj) {
    std::vector<bool> seen(n, false);
    std::vector<int> st = {0};
    seen[0] = true;
    int cnt = 1;
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
    return cnt == n;
  };
  return reach_all(fwd) && reach_all(rev);
}

int class_of_vertex(const std::vector<LoopClassReport>& classes, int v) {
  for (const auto& lc : classes)
    if (std::binary_search(lc.vertices.begin(), lc.vertices.end(), v)) return lc.id;
  return -1;
}

Cert check_irreducible(const TransitionGraph& g, LoopClassReport& lc) {
  if (lc.essential) {
    lc.irreducible_witness = "essential class";
    return Cert::Proven;
  }
  if (block_matrix_irreducible(g, lc)) {
    lc.irreducible_witness = "block matrix irreducible";
    return Cert::Proven;
  }
  lc.irreducible_witness = "";
  return Cert::Unknown;
}

std::optional<Path> find_interior_path(const TransitionGraph& g, const LoopClassReport& lc) {
  const WIFS& w = g.wifs();
  AlgebraicReal zero = w.zero(), one = w.one();
  auto cycles = enumerate_cycles(g, lc);
  for (const auto& theta : cycles) {
    int start = g.edges()[theta[0]].src;
    NetInterval d0 = g.vertices()[start].rep;
    NetInterval dm = g.realize(d0, theta);
    bool left_strict = d0.a < dm.a;
    bool right_strict = dm.b < d0.b;
    if (left_strict && right_strict) return theta;
    // A shared endpoint still isolates the chain when no attractor mass sits
    // on that side of it; hull endpoints are excluded here (those classes are
    // handled through the endpoint's own local dimension).
    bool ok = true;
    if (!left_strict) {
      if (d0.a == zero) {
        ok = false;
      } else {
        AlgebraicReal delta = dm.diam();
        Hit h = Hit::Undecided;
        for (int k = 0; k < 3 && h == Hit::Undecided; ++k) {
          h = k_meets_open(w, d0.a - delta, d0.a, 64);
          delta = delta / w.value(Rational(16));
        }
        if (h != Hit::No) ok = false;
      }
    }
    if (ok && !right_strict) {
      if (d0.b == one) {
        ok = false;
      } else {
        AlgebraicReal delta = dm.diam();
        Hit h = Hit::Undecided;
        for (int k = 0; k < 3 && h == Hit::Undecided; ++k) {
          h = k_meets_open(w, d0.b, d0.b + delta, 64);
          delta = delta / w.value(Rational(16));
        }
        if (h != Hit::No) ok = false;
      }
    }
    if (ok) return theta;
  }
  return std::nullopt;
}

namespace {

// Degeneracy certificates for a simple class: an interior-path witness, or a
// chain hugging a point with no attractor mass on the outer side (hull
// endpoints qualify automatically), giving a point whose symbolic
// representation is unique.
void classify_degeneracy(const TransitionGraph& g, LoopClassReport& lc) {
  if (!lc.simple) {
    lc.degenerate = Degen::No;
    lc.degeneracy_witness = "non-simple class";
    return;
  }
  if (lc.interior_path) {
    lc.degenerate = Degen::No;
    lc.degeneracy_witness = "interior path witness";
    return;
  }
  // Follow the unique cycle from a rooted realization and look for a pinned
  // endpoint with a certified-empty window beside it.
  const WIFS& w = g.wifs();
  int entry = lc.vertices[0];
  Path zeta = shortest_rooted_path(g, entry);
  NetInterval cur = g.realize(NetInterval{w.zero(), w.one(), 0, NeighbourSet::root(w.field())},
                              zeta);
  std::set<int> class_edges(lc.edges.begin(), lc.edges.end());
  Path cycle;
  int v = entry;
  do {
    int chosen = -1;
    for (int eid : g.vertices()[v].out)
      if (class_edges.count(eid)) {
        chosen = eid;
        break;
      }
    if (chosen < 0) return;
    cycle.push_back(chosen);
    v = g.edges()[chosen].dst;
  } while (v != entry);

  NetInterval after = cur;
  for (int rep = 0; rep < 3; ++rep) after = g.realize(after, cycle);
  bool left_pinned = after.a == cur.a;
  bool right_pinned = after.b == cur.b;
  if (left_pinned) {
    if (cur.a == w.zero()) {
      lc.degenerate = Degen::No;
      lc.degeneracy_witness = "chain pinned at hull endpoint 0";
      return;
    }
    Hit h = k_meets_open(w, cur.a - after.diam(), cur.a, 64);
    if (h == Hit::No) {
      lc.degenerate = Degen::No;
      lc.degeneracy_witness = "chain pinned at " + cur.a.str() + " with empty left window";
      return;
    }
  }
  if (right_pinned) {
    if (cur.b == w.one()) {
      lc.degenerate = Degen::No;
      lc.degeneracy_witness = "chain pinned at hull endpoint 1";
      return;
    }
    Hit h = k_meets_open(w, cur.b, cur.b + after.diam(), 64);
    if (h == Hit::No) {
      lc.degenerate = Degen::No;
      lc.degeneracy_witness = "chain pinned at " + cur.b.str() + " with empty right window";
      return;
    }
  }
  lc.degenerate = Degen::Unknown;
  lc.degeneracy_witness = "";
}

}  // namespace

std::vector<LoopClassReport> loop_classes(const TransitionGraph& g) {
  int ncomp = 0;
  std::vector<int> comp = tarjan_scc(g, ncomp);

  std::vector<std::vector<int>> members(ncomp);
  for (size_t v = 0; v < g.vertices().size(); ++v) members[comp[v]].push_back(static_cast<int>(v));

  std::vector<std::vector<int>> internal_edges(ncomp);
  std::vector<bool> has_outgoing(ncomp, false);
  for (size_t eid = 0; eid < g.edges().size(); ++eid) {
    const GraphEdge& e = g.edges()[eid];
    if (comp[e.src] == comp[e.dst])
      internal_edges[comp[e.src]].push_back(static_cast<int>(eid));
    else
      has_outgoing[comp[e.src]] = true;
  }

  // Loop class = SCC with at least one internal edge.
  std::vector<int> loop_comp;
  for (int c = 0; c < ncomp; ++c)
    if (!internal_edges[c].empty()) loop_comp.push_back(c);

  // Topological order of the condensation restricted to loop classes, so
  // every transition path goes from a smaller id to a larger one.
  std::map<int, std::set<int>> dag;  // comp -> downstream comps
  std::map<int, int> indeg;
  for (int c : loop_comp) {
    dag[c];
    indeg[c];
  }
  // Reachability между loop comps through non-loop comps: BFS per class.
  for (int c : loop_comp) {
    std::vector<bool> seen(ncomp, false);
    std::vector<int> st = {c};
    seen[c] = true;
    while (!st.empty()) {
      int cc = st.back();
      st.pop_back();
      for (int v : members[cc])
        for (int eid : g.vertices()[v].out) {
          int dc = comp[g.edges()[eid].dst];
          if (seen[dc]) continue;
          seen[dc] = true;
          if (!internal_edges[dc].empty()) {
            if (dag[c].insert(dc).second) ++indeg[dc];
          } else {
            st.push_back(dc);
          }
        }
    }
  }
  std::vector<int> order;
  std::set<int> ready;
  for (int c : loop_comp)
    if (indeg[c] == 0) ready.insert(c);
  while (!ready.empty()) {
    int c = *ready.begin();
    ready.erase(ready.begin());
    order.push_back(c);
    for (int d : dag[c])
      if (--indeg[d] == 0) ready.insert(d);
  }
  if (order.size() != loop_comp.size()) fail(Errc::Internal, "condensation is not acyclic");

  std::vector<LoopClassReport> out;
  for (size_t k = 0; k < order.size(); ++k) {
    int c = order[k];
    LoopClassReport lc;
    lc.id = static_cast<int>(k);
    lc.vertices = members[c];
    std::sort(lc.vertices.begin(), lc.vertices.end());
    lc.edges = internal_edges[c];
    std::sort(lc.edges.begin(), lc.edges.end());
    lc.essential = !has_outgoing[c];
    lc.simple = true;
    for (int v : lc.vertices) {
      int outdeg = 0;
      for (int eid : g.vertices()[v].out)
        if (comp[g.edges()[eid].dst] == c) ++outdeg;
      if (outdeg != 1) lc.simple = false;
    }
    lc.irreducible = check_irreducible(g, lc);
    lc.interior_path = find_interior_path(g, lc);
    classify_degeneracy(g, lc);
    out.push_back(std::move(lc));
  }
  return out;
}

namespace {

void enumerate_connector_paths(const TransitionGraph& g,
                               const std::vector<LoopClassReport>& classes, int start_vertex,
                               std::vector<Path>& out) {
  // Paths from start_vertex whose intermediate vertices lie in no loop class,
  // ending at the first loop-class vertex reached.
  Path cur;
  std::set<int> visited = {start_vertex};
  std::function<void(int)> dfs = [&](int v) {
    for (int eid : g.vertices()[v].out) {
      int w = g.edges()[eid].dst;
      cur.push_back(eid);
      int cw = class_of_vertex(classes, w);
      if (cw >= 0) {
        out.push_back(cur);
      } else if (!visited.count(w)) {
        visited.insert(w);
        dfs(w);
        visited.erase(w);
      }
      cur.pop_back();
    }
  };
  dfs(start_vertex);
}

}  // namespace

DecomposabilityReport check_decomposable(const TransitionGraph& g,
                                         const std::vector<LoopClassReport>& classes) {
  DecomposabilityReport rep;
  // Initial paths from the root.
  enumerate_connector_paths(g, classes, TransitionGraph::kRoot, rep.initial_paths);
  // Transition paths from each loop-class vertex into a different class.
  for (const auto& lc : classes) {
    for (int v : lc.vertices) {
      std::vector<Path> paths;
      enumerate_connector_paths(g, classes, v, paths);
      for (auto& p : paths) {
        int dst_class = class_of_vertex(classes, g.edges()[p.back()].dst);
        if (dst_class != lc.id) rep.transition_paths.push_back(std::move(p));
      }
    }
  }

  if (classes.size() <= 1) {
    rep.status = Cert::Proven;
    rep.witness = "single loop class: condition holds vacuously";
    return rep;
  }

  bool all_size_one = true;
  for (const auto& lc : classes) {
    if (lc.essential) continue;
    for (int v : lc.vertices)
      if (g.vertices()[v].nb.size() != 1) all_size_one = false;
  }
  if (all_size_one) {
    rep.status = Cert::Proven;
    rep.witness = "every non-essential loop vertex has a size-one neighbour set";
    return rep;
  }

  bool all_positive = true;
  for (const auto& p : rep.transition_paths) {
    if (!qmat_strictly_positive(raw_product(g, p))) {
      all_positive = false;
      rep.failing_transition_paths.push_back(p);
    }
  }
  if (all_positive) {
    rep.status = Cert::Proven;
    rep.witness = "every transition path has a strictly positive matrix";
    return rep;
  }

  bool simple_cycle_case = true;
  for (const auto& lc : classes) {
    if (lc.essential) continue;
    if (!lc.simple) {
      simple_cycle_case = false;
      break;
    }
    // The class is one cycle; try each rotation for an irreducible matrix.
    bool found = false;
    std::set<int> class_edges(lc.edges.begin(), lc.edges.end());
    for (int start : lc.vertices) {
      Path cycle;
      int v = start;
      do {
        int chosen = -1;
        for (int eid : g.vertices()[v].out)
          if (class_edges.count(eid)) {
            chosen = eid;
            break;
          }
        if (chosen < 0) break;
        cycle.push_back(chosen);
        v = g.edges()[chosen].dst;
      } while (v != start);
      if (cycle.empty() || v != start) continue;
      QMatrix m = raw_product(g, cycle);
      // Irreducibility of a single square matrix: support strongly connected.
      size_t n = m.size();
      std::vector<std::vector<int>> fwd(n), rev(n);
      for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < m[i].size(); ++j)
          if (m[i][j] > 0) {
            fwd[i].push_back(static_cast<int>(j));
            rev[j].push_back(static_cast<int>(i));
          }
      auto all_reach = [n](const std::vector<std::vector<int>>& adj) {
        std::vector<bool> seen(n, false);
        std::vector<int> st = {0};
        seen[0] = true;
        size_t cnt = 1;
        while (!st.empty()) {
          int v2 = st.back();
          st.pop_back();
          for (int w2 : adj[v2])
            if (!seen[w2]) {
              seen[w2] = true;
              ++cnt;
              st.push_back(w2);
            }
        }
        return cnt == n;
      };
      if (all_reach(fwd) && all_reach(rev)) {
        found = true;
        break;
      }
    }
    if (!found) simple_cycle_case = false;
    if (!simple_cycle_case) break;
  }
  if (simple_cycle_case) {
    rep.status = Cert::Proven;
    rep.witness = "non-essential classes are simple with irreducible cycle matrices";
    return rep;
  }

  rep.status = Cert::Unknown;
  rep.witness = "";
  return rep;
}

PathDecomposition decompose_path(const TransitionGraph& g,
                                 const std::vector<LoopClassReport>& classes, const Path& eta) {
  if (!g.path_is_rooted(eta)) fail(Errc::NotRooted, "decompose_path requires a rooted path");
  PathDecomposition out;
  out.loop_segments.assign(classes.size(), {});
  // Edge -> class id (edge is internal to a class iff both endpoints are).
  auto edge_class = [&](int eid) {
    int cs = class_of_vertex(classes, g.edges()[eid].src);
    if (cs < 0) return -1;
    return cs == class_of_vertex(classes, g.edges()[eid].dst) ? cs : -1;
  };
  size_t k = 0;
  // Initial connector run.
  while (k < eta.size() && edge_class(eta[k]) < 0) out.initial.push_back(eta[k++]);
  int last_class = -1;
  while (k < eta.size()) {
    int c = edge_class(eta[k]);
    if (c >= 0) {
      if (last_class >= 0 && c < last_class)
        fail(Errc::Internal, "path revisits an earlier loop class");
      out.loop_segments[c].push_back(eta[k++]);
      last_class = c;
    } else {
      Path run;
      while (k < eta.size() && edge_class(eta[k]) < 0) run.push_back(eta[k++]);
      out.transitions.push_back(std::move(run));
    }
  }
  return out;
}

}  // namespace mfa
