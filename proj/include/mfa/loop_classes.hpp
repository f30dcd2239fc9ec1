#ifndef MFA_LOOP_CLASSES_HPP_
#define MFA_LOOP_CLASSES_HPP_

#include <optional>
#include <string>
#include <vector>

#include "mfa/transition_graph.hpp"

namespace mfa {

enum class Cert { Proven, Unknown };
enum class Degen { No, Unknown };

struct LoopClassReport {
  int id = -1;                 // position in topological order
  std::vector<int> vertices;   // vertex ids, sorted
  std::vector<int> edges;      // internal edge ids, sorted
  bool essential = false;
  bool simple = false;
  Cert irreducible = Cert::Unknown;
  std::string irreducible_witness;
  Degen degenerate = Degen::Unknown;
  std::string degeneracy_witness;
  std::optional<Path> interior_path;
};

struct DecomposabilityReport {
  Cert status = Cert::Unknown;
  std::string witness;  // which sufficient condition fired
  std::vector<Path> initial_paths;
  std::vector<Path> transition_paths;
  std::vector<Path> failing_transition_paths;  // transition paths with a zero entry
};

struct PathDecomposition {
  Path initial;                         // phi
  std::vector<Path> loop_segments;      // lambda_1..lambda_m, class order, possibly empty
  std::vector<Path> transitions;        // connector runs between loop segments
};

// Maximal strongly connected induced subgraphs with at least one edge,
// in a topological order compatible with every transition path.
// Fills the essential/simple flags and runs the irreducibility and
// degeneracy certificates.
std::vector<LoopClassReport> loop_classes(const TransitionGraph& g);

// Proven for essential classes, or when the block matrix of summed edge
// matrices is irreducible (support digraph on (vertex, neighbour index)
// strongly connected). Unknown otherwise.
Cert check_irreducible(const TransitionGraph& g, LoopClassReport& lc);

DecomposabilityReport check_decomposable(const TransitionGraph& g,
                                         const std::vector<LoopClassReport>& classes);

// Unique factorization eta = phi lambda_1 psi_1 ... psi_{m-1} lambda_m.
PathDecomposition decompose_path(const TransitionGraph& g,
                                 const std::vector<LoopClassReport>& classes, const Path& eta);

// Searches cycles in the class (length up to 2|V|) for one whose realized
// net-interval chain nests strictly inside its start interval, or hugs an
// endpoint certified free of adjacent attractor mass.
std::optional<Path> find_interior_path(const TransitionGraph& g, const LoopClassReport& lc);

// Which loop class contains this vertex, or -1.
int class_of_vertex(const std::vector<LoopClassReport>& classes, int v);

// Extreme symbolic dimensions log spectralRadius(T(theta)) / log W(theta)
// over internal cycles theta (bounded enumeration). Periodic paths realize
// these dimensions, so tau_L(q) <= q * alpha_theta for every cycle; the
// spectra code uses the extremes to pin the tails of estimated curves.
struct CycleDimBounds {
  double alpha_min = 0, alpha_max = 0;
  bool valid = false;
};
CycleDimBounds cycle_dimension_bounds(const TransitionGraph& g, const LoopClassReport& lc);

// Strong connectivity of the support digraph on (vertex, neighbour index)
// pairs, i.e. irreducibility of the block matrix of summed edge matrices.
// `dims[v]` is the neighbour count of vertex v; each edge carries the
// positivity pattern of its matrix.
struct BlockEdge {
  int src, dst;
  std::vector<std::vector<bool>> positive;  // dims[src] x dims[dst]
};
bool block_support_strongly_connected(const std::vector<int>& dims,
                                      const std::vector<BlockEdge>& edges);

}  // namespace mfa

#endif  // MFA_LOOP_CLASSES_HPP_
