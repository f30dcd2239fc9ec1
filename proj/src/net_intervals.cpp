#include "mfa/net_intervals.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <utility>

namespace mfa {

std::string NeighbourSet::key() const {
  std::string s;
  for (const auto& m : maps) {
    s += m.key();
    s += ";";
  }
  return s;
}

std::string NeighbourSet::str() const {
  std::string s = "{";
  for (size_t i = 0; i < maps.size(); ++i) {
    if (i) s += ", ";
    s += maps[i].str();
  }
  return s + "}";
}

std::vector<std::vector<Word>> rule_expand(const IterationRule& rule, const WIFS& w,
                                           const NeighbourSet& v) {
  if (v.maps.empty()) fail(Errc::ValidationError, "empty neighbour set");
  std::vector<Word> alphabet;
  for (int i = 0; i < w.arity(); ++i) alphabet.push_back({i});
  std::vector<std::vector<Word>> out(v.maps.size());
  if (rule.kind == RuleKind::Uniform) {
    for (auto& c : out) c = alphabet;
    return out;
  }
  // Weighted: expand exactly the neighbours of maximal |slope|.
  AlgebraicReal amax = v.maps[0].a.abs();
  for (const auto& f : v.maps) {
    AlgebraicReal cand = f.a.abs();
    if (cand > amax) amax = cand;
  }
  for (size_t i = 0; i < v.maps.size(); ++i) {
    if (v.maps[i].a.abs() == amax)
      out[i] = alphabet;
    else
      out[i] = {Word{}};
  }
  return out;
}

Hit intersects_attractor(const WIFS& w, const AlgebraicReal& lo, const AlgebraicReal& hi,
                         int depth_cap) {
  if (!(lo < hi)) fail(Errc::ValidationError, "empty open interval");
  // Depth needed: once max|r|^d < hi - lo no image can straddle the interval.
  double width = (hi - lo).to_float(53).first;
  double rmax = w.max_ratio_upper();
  int suggested = 8;
  if (width > 0 && rmax > 0 && rmax < 1)
    suggested = std::max(8, 2 * static_cast<int>(std::ceil(std::log(width) / std::log(rmax))) + 8);
  int cap = std::min(depth_cap, suggested);

  std::vector<Similarity> frontier = {Similarity::identity(w.field())};
  for (int depth = 0;; ++depth) {
    std::vector<Similarity> next;
    bool capped_straddler = false;
    for (const auto& g : frontier) {
      auto [ilo, ihi] = g.unit_image();
      if (ihi <= lo || ilo >= hi) continue;  // image misses (lo,hi)
      if ((ilo > lo && ilo < hi) || (ihi > lo && ihi < hi)) return Hit::Yes;
      // The image straddles [lo,hi]; only its children can decide.
      if (depth >= cap) {
        capped_straddler = true;
        continue;
      }
      for (const auto& s : w.maps()) next.push_back(g.compose(s));
    }
    if (capped_straddler) return Hit::Undecided;
    if (next.empty()) return Hit::No;
    frontier = std::move(next);
  }
}

Hit k_meets_open(const WIFS& w, const AlgebraicReal& u, const AlgebraicReal& v, int depth_cap) {
  AlgebraicReal zero = w.zero(), one = w.one();
  if (v <= zero || u >= one) return Hit::No;
  if (u < zero) return v > zero ? Hit::Yes : Hit::No;  // 0 in K
  if (v > one) return u < one ? Hit::Yes : Hit::No;    // 1 in K
  return intersects_attractor(w, u, v, depth_cap);
}

namespace {

Similarity interval_map(const AlgebraicReal& a, const AlgebraicReal& b) {
  // T_[a,b]: x -> (b-a) x + a
  return Similarity(b - a, a);
}

bool is_prefix(const Word& p, const Word& q) {
  if (p.size() > q.size()) return false;
  return std::equal(p.begin(), p.end(), q.begin());
}

// Prefix-free and complete (Kraft sum over the m-ary tree equals 1).
void check_prefix_code(const std::vector<Word>& code, int arity) {
  Rational kraft(0);
  Rational m(arity);
  for (const auto& wd : code) {
    Rational term(1);
    for (size_t k = 0; k < wd.size(); ++k) term /= m;
    kraft += term;
  }
  if (kraft != 1)
    fail(Errc::RuleViolation, "word set is not a complete prefix code (Kraft sum " +
                                  rat_str(kraft) + ")");
  for (size_t i = 0; i < code.size(); ++i)
    for (size_t j = 0; j < code.size(); ++j)
      if (i != j && is_prefix(code[i], code[j]))
        fail(Errc::RuleViolation, "word set contains a prefix pair");
}

struct YEntry {
  Similarity map;
  std::vector<std::pair<int, Word>> gens;  // (neighbour index, word)
};

}  // namespace

Subdivision children(const WIFS& w, const IterationRule& rule, const NetInterval& parent,
                     const SubdivisionCaps& caps) {
  const auto& v = parent.nb;
  std::vector<std::vector<Word>> word_sets = rule_expand(rule, w, v);
  Similarity t_parent = interval_map(parent.a, parent.b);
  AlgebraicReal diam = parent.diam();

  for (int attempt = 0; attempt < caps.rewrite_cap; ++attempt) {
    for (const auto& c : word_sets) check_prefix_code(c, w.arity());

    // The generator family Y(Delta, v), deduplicated by exact map equality.
    std::map<std::string, YEntry> gen;
    for (size_t i = 0; i < v.maps.size(); ++i) {
      for (const auto& wd : word_sets[i]) {
        Similarity h = t_parent.compose(v.maps[i]).compose(w.word_map(wd).map);
        auto [it, inserted] = gen.try_emplace(h.key());
        if (inserted) it->second.map = h;
        it->second.gens.emplace_back(static_cast<int>(i), wd);
      }
    }

    // Endpoint set Y.
    std::vector<AlgebraicReal> ys = {parent.a, parent.b};
    for (const auto& [key, e] : gen) {
      auto [ilo, ihi] = e.map.unit_image();
      if (ilo >= parent.a && ilo <= parent.b) ys.push_back(ilo);
      if (ihi >= parent.a && ihi <= parent.b) ys.push_back(ihi);
    }
    std::sort(ys.begin(), ys.end());
    ys.erase(std::unique(ys.begin(), ys.end(),
                         [](const AlgebraicReal& x, const AlgebraicReal& y) { return x == y; }),
             ys.end());

    // Children candidates: [y_c, y_{c+1}] kept when the open interval meets K.
    std::vector<std::pair<AlgebraicReal, AlgebraicReal>> kept;
    for (size_t c = 0; c + 1 < ys.size(); ++c) {
      Hit h = intersects_attractor(w, ys[c], ys[c + 1], caps.gap_depth_cap);
      if (h == Hit::Undecided)
        fail(Errc::UndecidedGap, "K-intersection undecided for (" + ys[c].str() + ", " +
                                     ys[c + 1].str() + ") at depth cap " +
                                     std::to_string(caps.gap_depth_cap));
      if (h == Hit::Yes) kept.emplace_back(ys[c], ys[c + 1]);
    }
    if (kept.empty()) fail(Errc::Internal, "net interval produced no children");

    bool identical_single =
        kept.size() == 1 && kept[0].first == parent.a && kept[0].second == parent.b;

    if (!identical_single) {
      Subdivision out;
      out.cut_points = ys;
      out.word_sets = word_sets;
      for (const auto& [ca, cb] : kept) {
        ChildRecord rec;
        rec.child.a = ca;
        rec.child.b = cb;
        rec.child.level = parent.level + 1;
        rec.position = (ca - parent.a) / diam;
        rec.weight = (cb - ca) / diam;

        Similarity t_child_inv = interval_map(ca, cb).inverse();
        // Neighbours: normalized generators whose image meets the child interior.
        std::vector<std::pair<Similarity, const YEntry*>> nbs;
        for (const auto& [key, e] : gen) {
          Similarity hinv = e.map.inverse();
          AlgebraicReal u = hinv(ca), vv = hinv(cb);
          if (u > vv) std::swap(u, vv);
          Hit h = k_meets_open(w, u, vv, caps.gap_depth_cap);
          if (h == Hit::Undecided)
            fail(Errc::UndecidedGap, "neighbour membership undecided for child (" + ca.str() +
                                         ", " + cb.str() + ")");
          if (h == Hit::Yes) nbs.emplace_back(t_child_inv.compose(e.map), &e);
        }
        std::sort(nbs.begin(), nbs.end(),
                  [](const auto& x, const auto& y) { return sim_less(x.first, y.first); });
        int m = static_cast<int>(v.maps.size());
        int n = static_cast<int>(nbs.size());
        if (n == 0) fail(Errc::Internal, "child with empty neighbour set");
        rec.lifts.assign(m, std::vector<std::vector<Word>>(n));
        rec.raw.assign(m, std::vector<Rational>(n, Rational(0)));
        for (int j = 0; j < n; ++j) {
          const auto& [g, entry] = nbs[j];
          if (g.a.abs() < w.one())
            fail(Errc::Internal, "neighbour slope |a| < 1 for " + g.str());
          rec.child.nb.maps.push_back(g);
          for (const auto& [i, wd] : entry->gens) {
            rec.lifts[i][j].push_back(wd);
            rec.raw[i][j] += w.word_map(wd).prob;
          }
        }
        out.children.push_back(std::move(rec));
      }
      return out;
    }

    // Single child identical to the parent: rewrite the word sets so the
    // expansion continues through the child's rule, then subdivide again.
    NeighbourSet child_nb;
    std::vector<const YEntry*> child_entries;
    {
      std::vector<std::pair<Similarity, const YEntry*>> nbs;
      Similarity t_inv = t_parent.inverse();
      for (const auto& [key, e] : gen) {
        Similarity hinv = e.map.inverse();
        AlgebraicReal u = hinv(parent.a), vv = hinv(parent.b);
        if (u > vv) std::swap(u, vv);
        Hit h = k_meets_open(w, u, vv, caps.gap_depth_cap);
        if (h == Hit::Undecided) fail(Errc::UndecidedGap, "rewrite membership undecided");
        if (h == Hit::Yes) nbs.emplace_back(t_inv.compose(e.map), &e);
      }
      std::sort(nbs.begin(), nbs.end(),
                [](const auto& x, const auto& y) { return sim_less(x.first, y.first); });
      for (auto& [g, e] : nbs) {
        child_nb.maps.push_back(g);
        child_entries.push_back(e);
      }
    }
    std::vector<std::vector<Word>> child_sets = rule_expand(rule, w, child_nb);
    std::vector<std::vector<Word>> rewritten(v.maps.size());
    for (size_t i = 0; i < v.maps.size(); ++i) {
      for (const auto& wd : word_sets[i]) {
        Similarity h = t_parent.compose(v.maps[i]).compose(w.word_map(wd).map);
        // Locate h among the child's neighbours, if its image meets the interior.
        int j = -1;
        for (size_t jj = 0; jj < child_entries.size(); ++jj) {
          if (child_entries[jj]->map == h) {
            j = static_cast<int>(jj);
            break;
          }
        }
        if (j < 0) {
          rewritten[i].push_back(wd);  // image misses the interior: keep as is
          continue;
        }
        for (const auto& tail : child_sets[j]) {
          Word cat = wd;
          cat.insert(cat.end(), tail.begin(), tail.end());
          rewritten[i].push_back(std::move(cat));
        }
      }
    }
    word_sets = std::move(rewritten);
  }
  fail(Errc::RuleViolation, "single-child rewrite did not terminate");
}

bool neighbour_dedup_ok(const WIFS& w, const NeighbourSet& v, int depth) {
  // f1 o S_sigma = f2 would require S_sigma = f1^{-1} o f2; search words whose
  // ratio still dominates the target, which prunes to a finite tree.
  for (size_t i = 0; i < v.maps.size(); ++i) {
    for (size_t j = 0; j < v.maps.size(); ++j) {
      if (i == j) continue;
      Similarity target = v.maps[i].inverse().compose(v.maps[j]);
      AlgebraicReal tr = target.a.abs();
      if (tr > w.one()) continue;  // words only contract
      // DFS over words.
      std::vector<Similarity> frontier = {Similarity::identity(w.field())};
      for (int d = 0; d <= depth && !frontier.empty(); ++d) {
        std::vector<Similarity> next;
        for (const auto& g : frontier) {
          if (g == target) return false;
          for (const auto& s : w.maps()) {
            Similarity gs = g.compose(s);
            if (gs.a.abs() >= tr) next.push_back(gs);
          }
        }
        frontier = std::move(next);
      }
    }
  }
  return true;
}

}  // namespace mfa
