#ifndef MFA_NET_INTERVALS_HPP_
#define MFA_NET_INTERVALS_HPP_

#include <string>
#include <vector>

#include "mfa/wifs.hpp"

namespace mfa {

// Ordered duplicate-free tuple of normalized similarities whose images meet a
// net interval's interior. The vertex type of the transition graph.
struct NeighbourSet {
  std::vector<Similarity> maps;  // strictly increasing in the Sim(R) order

  int size() const { return static_cast<int>(maps.size()); }
  std::string key() const;
  std::string str() const;

  static NeighbourSet root(const FieldPtr& field) {
    return NeighbourSet{{Similarity::identity(field)}};
  }
};

struct NetInterval {
  AlgebraicReal a, b;  // a < b, both in K
  int level = 0;
  NeighbourSet nb;

  AlgebraicReal diam() const { return b - a; }
};

enum class RuleKind { Uniform, Weighted };

struct IterationRule {
  RuleKind kind = RuleKind::Uniform;
};

enum class Hit { Yes, No, Undecided };

struct SubdivisionCaps {
  int gap_depth_cap = 64;       // hard ceiling for the K-intersection search
  int prefix_check_depth = 8;   // word-length cap for the neighbour dedup check
  int rewrite_cap = 64;         // single-child rewrite iterations
};

// Per-neighbour word sets C_1..C_m produced by the iteration rule.
// uniform: every C_i is the alphabet; weighted: the alphabet exactly for the
// neighbours of maximal |slope|, the singleton empty word otherwise.
std::vector<std::vector<Word>> rule_expand(const IterationRule& rule, const WIFS& w,
                                           const NeighbourSet& v);

struct ChildRecord {
  NetInterval child;
  AlgebraicReal position;  // (a_child - a_parent) / diam(parent)
  AlgebraicReal weight;    // diam(child) / diam(parent)
  // lifts[i][j]: words omega with T_parent o f_i o S_omega = T_child o g_j
  std::vector<std::vector<std::vector<Word>>> lifts;
  // raw[i][j] = sum of p_omega over lifts[i][j]; d(parent) rows x d(child) cols
  std::vector<std::vector<Rational>> raw;
};

struct Subdivision {
  std::vector<AlgebraicReal> cut_points;       // the sorted endpoint set Y
  std::vector<ChildRecord> children;           // ordered left to right
  std::vector<std::vector<Word>> word_sets;    // the word sets actually used
};

// One-step subdivision of a net interval. Applies the single-identical-child
// rewrite lazily until the interval has either several children or a proper
// one, so every vertex eventually branches.
Subdivision children(const WIFS& w, const IterationRule& rule, const NetInterval& parent,
                     const SubdivisionCaps& caps = {});

// Decides whether the open interval (lo,hi), 0 <= lo < hi <= 1, meets the
// attractor. Word-image endpoints lie in K, so an endpoint strictly inside
// gives YES; a level where every remaining image misses the interval gives
// NO; images that keep straddling the whole interval past the depth cap give
// UNDECIDED.
Hit intersects_attractor(const WIFS& w, const AlgebraicReal& lo, const AlgebraicReal& hi,
                         int depth_cap);

// K-intersection for an arbitrary open interval (u,w), using that the hull
// endpoints 0 and 1 belong to K.
Hit k_meets_open(const WIFS& w, const AlgebraicReal& u, const AlgebraicReal& v, int depth_cap);

// Checks that no neighbour equals another neighbour composed with a word of
// length <= depth (condition (ii) of an iteration rule).
bool neighbour_dedup_ok(const WIFS& w, const NeighbourSet& v, int depth);

}  // namespace mfa

#endif  // MFA_NET_INTERVALS_HPP_
