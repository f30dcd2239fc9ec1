#ifndef MFA_TRANSITION_GRAPH_HPP_
#define MFA_TRANSITION_GRAPH_HPP_

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mfa/net_intervals.hpp"

namespace mfa {

using QMatrix = std::vector<std::vector<Rational>>;  // row-major, d(src) x d(dst)

// A path is a sequence of edge ids whose endpoints compose.
using Path = std::vector<int>;

struct GraphEdge {
  int src = -1, dst = -1;
  AlgebraicReal position;  // label distinguishing multi-edges
  AlgebraicReal weight;    // W(e) = diam(child)/diam(parent), in (0,1)
  QMatrix raw;             // entries sum of p_omega (mass factor deferred)
  QMatrix norm;            // filled by solve_masses
  double weight_d = 0;     // W(e) as double
  double log_weight = 0;   // log W(e)
  std::vector<std::vector<double>> norm_d;  // double copy of norm
};

struct GraphVertex {
  NeighbourSet nb;
  NetInterval rep;        // first realization discovered (breadth-first)
  std::vector<int> out;   // edge ids, ordered left to right by position
};

struct BuildCaps {
  int vertex_cap = 10000;
  SubdivisionCaps sub;
};

class TransitionGraph {
 public:
  static constexpr int kRoot = 0;

  TransitionGraph(WIFS wifs, IterationRule rule) : wifs_(std::move(wifs)), rule_(rule) {}

  const WIFS& wifs() const { return wifs_; }
  const IterationRule& rule() const { return rule_; }
  const std::vector<GraphVertex>& vertices() const { return vertices_; }
  const std::vector<GraphEdge>& edges() const { return edges_; }
  bool masses_solved() const { return masses_solved_; }
  // Neighbour mass f mu((0,1)) keyed by the similarity's canonical key.
  const std::map<std::string, Rational>& masses() const { return masses_; }
  Rational vertex_mass(int v, int i) const;

  bool path_is_valid(const Path& p) const;
  bool path_is_rooted(const Path& p) const;

  // Exact ||T(eta)|| = mu(pi(eta)) for a rooted path; requires solved masses.
  Rational path_measure(const Path& p) const;
  // Exact left product along a rooted path (1 x d row vector).
  std::vector<Rational> path_row(const Path& p) const;
  // Exact matrix product along any path (d(src) x d(dst)).
  QMatrix path_matrix(const Path& p) const;
  AlgebraicReal path_weight(const Path& p) const;
  double path_log_weight(const Path& p) const;

  // Realizes the net interval reached from `from` along path `p` using
  // position indices and weights only (children structure is a function of
  // the neighbour set).
  NetInterval realize(const NetInterval& from, const Path& p) const;

  friend TransitionGraph build_graph(const WIFS& w, const IterationRule& rule,
                                     const BuildCaps& caps);
  friend void solve_masses(TransitionGraph& g);

 private:
  WIFS wifs_;
  IterationRule rule_;
  std::vector<GraphVertex> vertices_;
  std::vector<GraphEdge> edges_;
  bool masses_solved_ = false;
  std::map<std::string, Rational> masses_;
};

// Breadth-first closure over neighbour sets starting from ([0,1], (id)).
// Requires a hull-normalized WIFS. Throws FncNotDetected when the vertex cap
// is exceeded (with the frontier size in the message).
TransitionGraph build_graph(const WIFS& w, const IterationRule& rule,
                            const BuildCaps& caps = {});

// Solves the neighbour-mass system m_v = sum_e raw(e) m_target exactly with
// m_root = 1 pinned, verifies positivity, and fills normalized matrices
// T(e)[i][j] = raw[i][j] * mass(target_j) / mass(source_i).
void solve_masses(TransitionGraph& g);

std::string export_dot(const TransitionGraph& g);
std::string graph_json(const TransitionGraph& g);

// Shortest rooted path ending at `target` (breadth-first over edges).
Path shortest_rooted_path(const TransitionGraph& g, int target);

double dmat_norm(const std::vector<std::vector<double>>& m);
Rational qmat_norm(const QMatrix& m);

}  // namespace mfa

#endif  // MFA_TRANSITION_GRAPH_HPP_
