#include "mfa/transition_graph.hpp"

#include <algorithm>
#include <cstdio>
#include <deque>
#include <sstream>

namespace mfa {

namespace {

std::string fmt12(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.11e", x);
  return buf;
}

}  // namespace

Rational TransitionGraph::vertex_mass(int v, int i) const {
  if (!masses_solved_) fail(Errc::Internal, "masses not solved");
  return masses_.at(vertices_[v].nb.maps[i].key());
}

bool TransitionGraph::path_is_valid(const Path& p) const {
  for (size_t k = 0; k + 1 < p.size(); ++k)
    if (edges_[p[k]].dst != edges_[p[k + 1]].src) return false;
  return true;
}

bool TransitionGraph::path_is_rooted(const Path& p) const {
  if (!path_is_valid(p)) return false;
  return p.empty() || edges_[p[0]].src == kRoot;
}

std::vector<Rational> TransitionGraph::path_row(const Path& p) const {
  if (!path_is_rooted(p)) fail(Errc::NotRooted, "path does not start at the root");
  if (!masses_solved_) fail(Errc::Internal, "masses not solved");
  std::vector<Rational> row(1, Rational(1));  // d(root) = 1
  for (int eid : p) {
    const QMatrix& t = edges_[eid].norm;
    size_t cols = t[0].size();
    std::vector<Rational> next(cols, Rational(0));
    for (size_t i = 0; i < row.size(); ++i) {
      if (row[i] == 0) continue;
      for (size_t j = 0; j < cols; ++j) next[j] += row[i] * t[i][j];
    }
    row = std::move(next);
  }
  return row;
}

Rational TransitionGraph::path_measure(const Path& p) const {
  auto row = path_row(p);
  Rational s(0);
  for (const auto& x : row) s += x;
  return s;
}

QMatrix TransitionGraph::path_matrix(const Path& p) const {
  if (!path_is_valid(p)) fail(Errc::ValidationError, "edges do not compose");
  if (p.empty()) fail(Errc::ValidationError, "empty path has no matrix");
  QMatrix acc = edges_[p[0]].norm;
  for (size_t k = 1; k < p.size(); ++k) {
    const QMatrix& t = edges_[p[k]].norm;
    QMatrix next(acc.size(), std::vector<Rational>(t[0].size(), Rational(0)));
    for (size_t i = 0; i < acc.size(); ++i)
      for (size_t l = 0; l < t.size(); ++l) {
        if (acc[i][l] == 0) continue;
        for (size_t j = 0; j < t[0].size(); ++j) next[i][j] += acc[i][l] * t[l][j];
      }
    acc = std::move(next);
  }
  return acc;
}

AlgebraicReal TransitionGraph::path_weight(const Path& p) const {
  AlgebraicReal acc = wifs_.one();
  for (int eid : p) acc = acc * edges_[eid].weight;
  return acc;
}

double TransitionGraph::path_log_weight(const Path& p) const {
  double acc = 0;
  for (int eid : p) acc += edges_[eid].log_weight;
  return acc;
}

NetInterval TransitionGraph::realize(const NetInterval& from, const Path& p) const {
  NetInterval cur = from;
  for (int eid : p) {
    const GraphEdge& e = edges_[eid];
    AlgebraicReal d = cur.diam();
    AlgebraicReal a = cur.a + e.position * d;
    AlgebraicReal b = a + e.weight * d;
    cur = NetInterval{a, b, cur.level + 1, vertices_[e.dst].nb};
  }
  return cur;
}

TransitionGraph build_graph(const WIFS& w, const IterationRule& rule, const BuildCaps& caps) {
  if (!w.hull_is_unit())
    fail(Errc::ValidationError, "attractor hull is not [0,1]; call normalize_hull first");
  TransitionGraph g(w, rule);
  std::map<std::string, int> intern;

  NetInterval root{w.zero(), w.one(), 0, NeighbourSet::root(w.field())};
  g.vertices_.push_back(GraphVertex{root.nb, root, {}});
  intern[root.nb.key()] = 0;

  std::deque<int> queue = {0};
  while (!queue.empty()) {
    int vid = queue.front();
    queue.pop_front();
    Subdivision sub = children(w, rule, g.vertices_[vid].rep, caps.sub);
    for (auto& rec : sub.children) {
      std::string key = rec.child.nb.key();
      auto it = intern.find(key);
      int dst;
      if (it == intern.end()) {
        dst = static_cast<int>(g.vertices_.size());
        if (dst >= caps.vertex_cap)
          fail(Errc::FncNotDetected,
               "vertex cap " + std::to_string(caps.vertex_cap) +
                   " exceeded; frontier size " + std::to_string(queue.size() + 1));
        if (!neighbour_dedup_ok(w, rec.child.nb, caps.sub.prefix_check_depth))
          fail(Errc::RuleViolation, "neighbour set violates the prefix-composition condition");
        g.vertices_.push_back(GraphVertex{rec.child.nb, rec.child, {}});
        intern.emplace(key, dst);
        queue.push_back(dst);
      } else {
        dst = it->second;
      }
      GraphEdge e;
      e.src = vid;
      e.dst = dst;
      e.position = rec.position;
      e.weight = rec.weight;
      e.raw = rec.raw;
      auto [wd, werr] = e.weight.to_float(80);
      e.weight_d = wd;
      e.log_weight = std::log(wd);
      int eid = static_cast<int>(g.edges_.size());
      g.edges_.push_back(std::move(e));
      g.vertices_[vid].out.push_back(eid);
    }
  }
  return g;
}

void solve_masses(TransitionGraph& g) {
  // Unknowns: one per distinct neighbour similarity across the graph.
  std::map<std::string, int> index;
  std::vector<std::string> keys;
  for (const auto& v : g.vertices_) {
    for (const auto& f : v.nb.maps) {
      auto [it, ins] = index.try_emplace(f.key(), static_cast<int>(keys.size()));
      if (ins) keys.push_back(f.key());
    }
  }
  const int n = static_cast<int>(keys.size());
  std::string root_key = g.vertices_[TransitionGraph::kRoot].nb.maps[0].key();

  // Equations: for each vertex v and neighbour index i,
  //   x_{f_i} - sum_{e out of v} sum_j raw[i][j] x_{g_j} = 0,
  // plus the pin x_id = 1.
  std::vector<std::vector<Rational>> rows;
  std::vector<Rational> rhs;
  for (size_t vid = 0; vid < g.vertices_.size(); ++vid) {
    const auto& v = g.vertices_[vid];
    for (size_t i = 0; i < v.nb.maps.size(); ++i) {
      std::vector<Rational> row(n, Rational(0));
      row[index.at(v.nb.maps[i].key())] += 1;
      for (int eid : v.out) {
        const GraphEdge& e = g.edges_[eid];
        const auto& tgt = g.vertices_[e.dst].nb.maps;
        for (size_t j = 0; j < tgt.size(); ++j)
          row[index.at(tgt[j].key())] -= e.raw[i][j];
      }
      rows.push_back(std::move(row));
      rhs.push_back(Rational(0));
    }
  }
  {
    std::vector<Rational> row(n, Rational(0));
    row[index.at(root_key)] = 1;
    rows.push_back(std::move(row));
    rhs.push_back(Rational(1));
  }

  // Exact Gaussian elimination on the (possibly overdetermined) system.
  const int m = static_cast<int>(rows.size());
  std::vector<int> pivot_col_of_row;
  int rank = 0;
  for (int col = 0; col < n && rank < m; ++col) {
    int piv = -1;
    for (int r = rank; r < m; ++r)
      if (rows[r][col] != 0) {
        piv = r;
        break;
      }
    if (piv < 0) continue;
    std::swap(rows[rank], rows[piv]);
    std::swap(rhs[rank], rhs[piv]);
    Rational inv = 1 / rows[rank][col];
    for (int c = col; c < n; ++c) rows[rank][c] *= inv;
    rhs[rank] *= inv;
    for (int r = 0; r < m; ++r) {
      if (r == rank || rows[r][col] == 0) continue;
      Rational f = rows[r][col];
      for (int c = col; c < n; ++c) rows[r][c] -= f * rows[rank][c];
      rhs[r] -= f * rhs[rank];
    }
    pivot_col_of_row.push_back(col);
    ++rank;
  }
  for (int r = rank; r < m; ++r)
    if (rhs[r] != 0) fail(Errc::SingularMassSystem, "mass equations are inconsistent");
  if (rank < n)
    fail(Errc::NonUniqueMass, "mass solution space has dimension " + std::to_string(n - rank) +
                                  " after pinning the root");

  std::vector<Rational> x(n, Rational(0));
  for (int r = 0; r < rank; ++r) x[pivot_col_of_row[r]] = rhs[r];
  for (int i = 0; i < n; ++i)
    if (x[i] <= 0)
      fail(Errc::SingularMassSystem, "non-positive neighbour mass for " + keys[i]);

  g.masses_.clear();
  for (int i = 0; i < n; ++i) g.masses_[keys[i]] = x[i];
  g.masses_solved_ = true;

  for (auto& e : g.edges_) {
    const auto& src = g.vertices_[e.src].nb.maps;
    const auto& dst = g.vertices_[e.dst].nb.maps;
    e.norm.assign(src.size(), std::vector<Rational>(dst.size(), Rational(0)));
    e.norm_d.assign(src.size(), std::vector<double>(dst.size(), 0.0));
    for (size_t i = 0; i < src.size(); ++i) {
      Rational mi = g.masses_.at(src[i].key());
      for (size_t j = 0; j < dst.size(); ++j) {
        Rational mj = g.masses_.at(dst[j].key());
        e.norm[i][j] = e.raw[i][j] * mj / mi;
        e.norm_d[i][j] = e.norm[i][j].get_d();
      }
    }
  }
}

Path shortest_rooted_path(const TransitionGraph& g, int target) {
  if (target == TransitionGraph::kRoot) return {};
  std::vector<int> via_edge(g.vertices().size(), -1);
  std::vector<bool> seen(g.vertices().size(), false);
  std::deque<int> q = {TransitionGraph::kRoot};
  seen[TransitionGraph::kRoot] = true;
  while (!q.empty()) {
    int v = q.front();
    q.pop_front();
    for (int eid : g.vertices()[v].out) {
      int w = g.edges()[eid].dst;
      if (seen[w]) continue;
      seen[w] = true;
      via_edge[w] = eid;
      if (w == target) {
        Path p;
        int cur = w;
        while (cur != TransitionGraph::kRoot) {
          p.push_back(via_edge[cur]);
          cur = g.edges()[via_edge[cur]].src;
        }
        std::reverse(p.begin(), p.end());
        return p;
      }
      q.push_back(w);
    }
  }
  fail(Errc::Internal, "vertex unreachable from the root");
}

double dmat_norm(const std::vector<std::vector<double>>& m) {
  double s = 0;
  for (const auto& r : m)
    for (double x : r) s += x;
  return s;
}

Rational qmat_norm(const QMatrix& m) {
  Rational s(0);
  for (const auto& r : m)
    for (const auto& x : r) s += x;
  return s;
}

std::string export_dot(const TransitionGraph& g) {
  std::ostringstream os;
  os << "digraph transition {\n  rankdir=TB;\n";
  for (size_t v = 0; v < g.vertices().size(); ++v) {
    os << "  v" << v << " [label=\"v" << v << "\\n" << g.vertices()[v].nb.str() << "\"";
    if (v == TransitionGraph::kRoot) os << " shape=doublecircle";
    os << "];\n";
  }
  for (size_t v = 0; v < g.vertices().size(); ++v) {
    for (int eid : g.vertices()[v].out) {
      const GraphEdge& e = g.edges()[eid];
      os << "  v" << e.src << " -> v" << e.dst << " [label=\"q=" << e.position.str()
         << " W=" << fmt12(e.weight_d) << " |T~|=" << fmt12(qmat_norm(e.raw).get_d())
         << "\"];\n";
    }
  }
  os << "}\n";
  return os.str();
}

std::string graph_json(const TransitionGraph& g) {
  std::ostringstream os;
  os << "{\n  \"vertices\": [\n";
  for (size_t v = 0; v < g.vertices().size(); ++v) {
    const auto& nb = g.vertices()[v].nb;
    os << "    {\"id\": " << v << ", \"neighbours\": [";
    for (int i = 0; i < nb.size(); ++i) {
      if (i) os << ", ";
      os << "\"" << nb.maps[i].str() << "\"";
    }
    os << "]}";
    os << (v + 1 < g.vertices().size() ? ",\n" : "\n");
  }
  os << "  ],\n  \"edges\": [\n";
  for (size_t k = 0; k < g.edges().size(); ++k) {
    const GraphEdge& e = g.edges()[k];
    os << "    {\"src\": " << e.src << ", \"dst\": " << e.dst << ", \"label\": \""
       << e.position.str() << "\", \"W\": \"" << e.weight.str()
       << "\", \"W_float\": " << fmt12(e.weight_d) << ", \"raw\": [";
    for (size_t i = 0; i < e.raw.size(); ++i) {
      if (i) os << ", ";
      os << "[";
      for (size_t j = 0; j < e.raw[i].size(); ++j) {
        if (j) os << ", ";
        os << "\"" << rat_str(e.raw[i][j]) << "\"";
      }
      os << "]";
    }
    os << "]";
    if (g.masses_solved()) {
      os << ", \"norm\": [";
      for (size_t i = 0; i < e.norm.size(); ++i) {
        if (i) os << ", ";
        os << "[";
        for (size_t j = 0; j < e.norm[i].size(); ++j) {
          if (j) os << ", ";
          os << "\"" << rat_str(e.norm[i][j]) << "\"";
        }
        os << "]";
      }
      os << "]";
    }
    os << "}" << (k + 1 < g.edges().size() ? ",\n" : "\n");
  }
  os << "  ]\n}\n";
  return os.str();
}

}  // namespace mfa
