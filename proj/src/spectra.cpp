#include "mfa/spectra.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <map>
#include <set>
#include <thread>

namespace mfa {

namespace {

int env_threads() {
  const char* s = std::getenv("MFA_THREADS");
  if (!s) return 1;
  int n = std::atoi(s);
  return n < 1 ? 1 : n;
}

// Runs fn(i) for i in [0,n) across the configured threads. Results must be
// written to disjoint slots so the outcome is independent of scheduling.
void parallel_index(int n, const std::function<void(int)>& fn) {
  int nt = std::min(env_threads(), n);
  if (nt <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  std::atomic<int> next{0};
  for (int t = 0; t < nt; ++t)
    pool.emplace_back([&] {
      int i;
      while ((i = next.fetch_add(1)) < n) fn(i);
    });
  for (auto& th : pool) th.join();
}

double logsumexp(const std::vector<double>& xs, double scale) {
  double mx = kNegInf;
  for (double x : xs) mx = std::max(mx, scale * x);
  if (mx == kNegInf) return kNegInf;
  double s = 0;
  for (double x : xs) s += std::exp(scale * x - mx);
  return mx + std::log(s);
}

double spectral_radius(const Eigen::MatrixXd& a) {
  Eigen::EigenSolver<Eigen::MatrixXd> es(a, false);
  double r = 0;
  for (int i = 0; i < a.rows(); ++i) r = std::max(r, std::abs(es.eigenvalues()[i]));
  return r;
}

std::vector<double> mul_row(const std::vector<double>& row,
                            const std::vector<std::vector<double>>& m) {
  std::vector<double> next(m[0].size(), 0.0);
  for (size_t i = 0; i < row.size(); ++i) {
    if (row[i] == 0) continue;
    for (size_t j = 0; j < next.size(); ++j) next[j] += row[i] * m[i][j];
  }
  return next;
}

// Weight-cut enumerator over the (optionally restricted) edge set. The row
// vector is kept normalized to unit mass with the log carried separately.
struct CutEnumerator {
  const TransitionGraph& g;
  const std::set<int>* allowed = nullptr;
  double log_t = 0;
  std::size_t cap = 0;
  std::vector<double>* out = nullptr;  // null: count only
  std::size_t count = 0;
  bool aborted = false;

  void dfs_count(int v, double logw) {
    for (int eid : g.vertices()[v].out) {
      if (aborted) return;
      if (allowed && !allowed->count(eid)) continue;
      double lw = logw + g.edges()[eid].log_weight;
      if (lw <= log_t + 1e-12) {
        if (++count > cap) aborted = true;
      } else {
        dfs_count(g.edges()[eid].dst, lw);
      }
    }
  }

  void dfs(int v, const std::vector<double>& row, double logrho, double logw) {
    if (!out) {
      dfs_count(v, logw);
      return;
    }
    for (int eid : g.vertices()[v].out) {
      if (aborted) return;
      if (allowed && !allowed->count(eid)) continue;
      const GraphEdge& e = g.edges()[eid];
      double lw = logw + e.log_weight;
      auto next = mul_row(row, e.norm_d);
      double s = 0;
      for (double x : next) s += x;
      if (lw <= log_t + 1e-12) {
        if (++count > cap) {
          aborted = true;
          return;
        }
        out->push_back(logrho + std::log(s));
      } else {
        for (auto& x : next) x /= s;
        dfs(e.dst, next, logrho + std::log(s), lw);
      }
    }
  }
};

struct RungData {
  std::vector<double> log_t;                  // thresholds, decreasing
  std::vector<std::vector<double>> logrho;    // one bucket per threshold
};

struct RestrictionCtx {
  std::set<int> allowed;   // class edges (empty set pointer when unrestricted)
  bool restricted = false;
  int start_vertex = TransitionGraph::kRoot;
  std::vector<double> row0 = {1.0};
  double logrho0 = 0, logw0 = 0;
  double log_step = 0;  // log of the max edge weight in scope
};

RestrictionCtx make_ctx(const TransitionGraph& g, const LoopClassReport* lc, const Path& zeta) {
  RestrictionCtx ctx;
  double wmax = 0;
  if (lc) {
    ctx.restricted = true;
    ctx.allowed.insert(lc->edges.begin(), lc->edges.end());
    for (int eid : lc->edges) wmax = std::max(wmax, g.edges()[eid].weight_d);
    auto row = g.path_row(zeta);
    Rational mass(0);
    for (const auto& x : row) mass += x;
    ctx.logrho0 = rat_log(mass);
    ctx.row0.assign(row.size(), 0.0);
    for (size_t i = 0; i < row.size(); ++i) ctx.row0[i] = Rational(row[i] / mass).get_d();
    ctx.logw0 = g.path_log_weight(zeta);
    ctx.start_vertex = zeta.empty() ? TransitionGraph::kRoot : g.edges()[zeta.back()].dst;
  } else {
    for (const auto& e : g.edges()) wmax = std::max(wmax, e.weight_d);
  }
  ctx.log_step = std::log(wmax);
  return ctx;
}

RungData collect_rungs(const TransitionGraph& g, const RestrictionCtx& ctx,
                       const ScheduleParams& sched) {
  RungData data;
  // Probe rung sizes first so the deepest stored rung respects the cap.
  int max_k = 0;
  for (int k = 1; k <= sched.max_rungs; ++k) {
    CutEnumerator en{g};
    en.allowed = ctx.restricted ? &ctx.allowed : nullptr;
    en.log_t = ctx.logw0 + k * ctx.log_step;
    en.cap = sched.path_cap;
    en.dfs(ctx.start_vertex, ctx.row0, ctx.logrho0, ctx.logw0);
    if (en.aborted) break;
    max_k = k;
  }
  if (max_k == 0) fail(Errc::PathExplosion, "no threshold rung fits under the path cap");
  for (int k = 1; k <= max_k; ++k) {
    CutEnumerator en{g};
    en.allowed = ctx.restricted ? &ctx.allowed : nullptr;
    en.log_t = ctx.logw0 + k * ctx.log_step;
    en.cap = sched.path_cap + 1;
    std::vector<double> bucket;
    en.out = &bucket;
    en.dfs(ctx.start_vertex, ctx.row0, ctx.logrho0, ctx.logw0);
    data.log_t.push_back(en.log_t);
    data.logrho.push_back(std::move(bucket));
  }
  return data;
}

struct FeketeConsts {
  bool valid = false;
  double log_r0 = 0;    // log of the composition threshold r0
  double log_c = 0;     // min positive entry of the base rows
  double log_d = 0;     // bound on log ||T(connector)||
  double log_b = 0;     // bound for the q<0 side
};

FeketeConsts fekete_consts(const TransitionGraph& g, const LoopClassReport& lc,
                           const Path& zeta) {
  FeketeConsts fc;
  double log_wmin = 0, log_wmax = kNegInf;
  for (int eid : lc.edges) {
    log_wmin = std::min(log_wmin, g.edges()[eid].log_weight);
    log_wmax = std::max(log_wmax, g.edges()[eid].log_weight);
  }
  if (log_wmax >= 0) return fc;
  // Breadth-first connector gamma_w inside the class, from the end of zeta.
  int v0 = zeta.empty() ? TransitionGraph::kRoot : g.edges()[zeta.back()].dst;
  std::set<int> class_edges(lc.edges.begin(), lc.edges.end());
  std::map<int, Path> gamma;
  gamma[v0] = {};
  std::vector<int> frontier = {v0};
  while (!frontier.empty()) {
    std::vector<int> next;
    for (int v : frontier)
      for (int eid : g.vertices()[v].out) {
        if (!class_edges.count(eid)) continue;
        int w = g.edges()[eid].dst;
        if (gamma.count(w)) continue;
        Path p = gamma[v];
        p.push_back(eid);
        gamma[w] = std::move(p);
        next.push_back(w);
      }
    frontier = std::move(next);
  }
  if (gamma.size() != lc.vertices.size()) return fc;

  double min_log_wzg = 0, log_c = 0, max_log_tg = 0;
  for (const auto& [w, p] : gamma) {
    Path full = zeta;
    full.insert(full.end(), p.begin(), p.end());
    min_log_wzg = std::min(min_log_wzg, g.path_log_weight(full));
    auto row = g.path_row(full);
    Rational mn(-1), total(0);
    for (const auto& x : row) {
      total += x;
      if (mn < 0 || x < mn) mn = x;
    }
    if (mn <= 0) return fc;  // needs strictly positive base rows
    log_c = std::min(log_c, rat_log(mn));
    if (!p.empty()) max_log_tg = std::max(max_log_tg, rat_log(qmat_norm(g.path_matrix(p))));
  }
  fc.log_r0 = log_wmin + min_log_wzg;
  fc.log_c = log_c;
  double log_maxte = 0;
  for (int eid : lc.edges) log_maxte = std::max(log_maxte, std::log(dmat_norm(g.edges()[eid].norm_d)));
  double len_d = std::ceil(2 * fc.log_r0 / log_wmax);
  double len_b = std::ceil((2 * fc.log_r0 + log_wmin) / log_wmax);
  fc.log_d = std::max(0.0, len_d * log_maxte);
  fc.log_b = std::max(0.0, max_log_tg + std::max(0.0, len_b * log_maxte) - fc.log_c);
  fc.valid = true;
  return fc;
}

void moment_estimates(const RungData& data, const std::vector<double>& qs,
                      const FeketeConsts& fc, SpectrumCurve& out) {
  const int n = static_cast<int>(qs.size());
  const int rungs = static_cast<int>(data.log_t.size());
  out.q = qs;
  out.tau.assign(n, 0);
  out.err.assign(n, 0);
  out.tau_lsq.assign(n, 0);
  out.tau_ratio.assign(n, 0);
  out.tau_onesided.assign(n, kNegInf);

  parallel_index(n, [&](int qi) {
    double q = qs[qi];
    std::vector<double> y(rungs);
    for (int k = 0; k < rungs; ++k) y[k] = logsumexp(data.logrho[k], q);
    int last = rungs - 1;
    int half = last / 2;
    double tau_half, tau_last, tau_lsq;
    if (rungs >= 2) {
      tau_last = (y[last] - y[last - 1]) / (data.log_t[last] - data.log_t[last - 1]);
      tau_half = last > half
                     ? (y[last] - y[half]) / (data.log_t[last] - data.log_t[half])
                     : tau_last;
      // least squares over the deeper half
      double sx = 0, sy = 0, sxx = 0, sxy = 0;
      int cnt = 0;
      for (int k = half; k <= last; ++k) {
        sx += data.log_t[k];
        sy += y[k];
        sxx += data.log_t[k] * data.log_t[k];
        sxy += data.log_t[k] * y[k];
        ++cnt;
      }
      double den = cnt * sxx - sx * sx;
      tau_lsq = den != 0 ? (cnt * sxy - sx * sy) / den : tau_half;
    } else {
      tau_last = tau_half = tau_lsq = y[0] / data.log_t[0];
    }
    out.tau[qi] = tau_half;
    out.tau_ratio[qi] = tau_last;
    out.tau_lsq[qi] = tau_lsq;
    double spread = std::max(std::abs(tau_half - tau_last), std::abs(tau_half - tau_lsq));
    out.err[qi] = spread + 1e-7 * (1 + std::abs(q));
    if (fc.valid) {
      double denom = -data.log_t[last] - fc.log_r0;  // log(1/t) + log(1/r0) > 0
      if (denom > 0) {
        if (q >= 0) {
          double logc_q = q * std::max(0.0, fc.log_d - fc.log_c);
          out.tau_onesided[qi] = -(y[last] + logc_q) / denom;  // certified lower bound
        } else {
          out.tau_onesided[qi] = (-q * fc.log_b - y[last]) / denom;  // certified upper bound
        }
      }
    }
  });
}

// Pressure-equation root for a class whose matrices are all 1x1: the unique s
// with spectral radius of [sum_e T_e^q W_e^{-s}] equal to 1.
double scalar_pressure_tau(const TransitionGraph& g, const LoopClassReport& lc, double q) {
  const int n = static_cast<int>(lc.vertices.size());
  std::map<int, int> vidx;
  for (int i = 0; i < n; ++i) vidx[lc.vertices[i]] = i;

  auto log_radius = [&](double s) {
    // Per-entry log-sum-exp, then a global shift before the eigensolve.
    std::vector<std::vector<std::vector<double>>> terms(
        n, std::vector<std::vector<double>>(n));
    double mx = kNegInf;
    for (int eid : lc.edges) {
      const GraphEdge& e = g.edges()[eid];
      double lt = rat_log(e.norm[0][0]) * q - s * e.log_weight;
      terms[vidx[e.src]][vidx[e.dst]].push_back(lt);
      mx = std::max(mx, lt);
    }
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (double lt : terms[i][j]) a(i, j) += std::exp(lt - mx);
    return std::log(spectral_radius(a)) + mx;
  };

  double lo = -64, hi = 64;
  while (log_radius(lo) > 0) {
    lo *= 2;
    if (lo < -1e6) fail(Errc::BisectionFailure, "no lower bracket for the pressure root");
  }
  while (log_radius(hi) < 0) {
    hi *= 2;
    if (hi > 1e6) fail(Errc::BisectionFailure, "no upper bracket for the pressure root");
  }
  while (hi - lo > 1e-13 * std::max(1.0, std::abs(lo) + std::abs(hi))) {
    double mid = (lo + hi) / 2;
    if (log_radius(mid) < 0)
      lo = mid;
    else
      hi = mid;
  }
  return (lo + hi) / 2;
}

// The unique internal cycle of a simple class, from its smallest vertex.
Path simple_class_cycle(const TransitionGraph& g, const LoopClassReport& lc) {
  std::set<int> class_edges(lc.edges.begin(), lc.edges.end());
  Path cycle;
  int start = lc.vertices[0], v = start;
  do {
    int chosen = -1;
    for (int eid : g.vertices()[v].out)
      if (class_edges.count(eid)) {
        chosen = eid;
        break;
      }
    if (chosen < 0) fail(Errc::Internal, "simple class vertex without internal edge");
    cycle.push_back(chosen);
    v = g.edges()[chosen].dst;
  } while (v != start);
  return cycle;
}

}  // namespace

std::vector<double> QGrid::values() const {
  std::vector<double> qs;
  qs.push_back(-qbig);
  for (int i = 0; i < count; ++i)
    qs.push_back(qmin + (qmax - qmin) * i / (count - 1));
  qs.push_back(qbig);
  return qs;
}

ScalePartition scale_partition(const TransitionGraph& g, const AlgebraicReal& t,
                               const std::optional<ClassRestriction>& restrict_to,
                               std::size_t path_cap) {
  const WIFS& w = g.wifs();
  if (!(t > w.zero())) fail(Errc::ValidationError, "threshold must be positive");
  ScalePartition out;
  out.restricted = restrict_to.has_value();

  if (!restrict_to && t >= w.one()) {
    // Boundary convention: W of the empty prefix is 1 and the strict
    // inequality is waived at length 1.
    for (int eid : g.vertices()[TransitionGraph::kRoot].out) out.paths.push_back({eid});
    return out;
  }

  std::set<int> allowed;
  Path base;
  int start = TransitionGraph::kRoot;
  if (restrict_to) {
    allowed.insert(restrict_to->lc->edges.begin(), restrict_to->lc->edges.end());
    base = restrict_to->zeta;
    if (!g.path_is_rooted(base)) fail(Errc::NotRooted, "zeta must be rooted");
    start = base.empty() ? TransitionGraph::kRoot : g.edges()[base.back()].dst;
  }
  AlgebraicReal wbase = g.path_weight(base);
  if (restrict_to && wbase <= t) return out;  // cut already above the class entry

  std::function<void(int, const AlgebraicReal&, Path&)> dfs = [&](int v, const AlgebraicReal& cw,
                                                                  Path& cur) {
    for (int eid : g.vertices()[v].out) {
      if (restrict_to && !allowed.count(eid)) continue;
      AlgebraicReal nw = cw * g.edges()[eid].weight;
      cur.push_back(eid);
      if (nw <= t) {
        Path full = base;
        full.insert(full.end(), cur.begin(), cur.end());
        out.paths.push_back(std::move(full));
        if (out.paths.size() > path_cap)
          fail(Errc::PathExplosion, "partition exceeds " + std::to_string(path_cap) + " paths");
      } else {
        dfs(g.edges()[eid].dst, nw, cur);
      }
      cur.pop_back();
    }
  };
  Path cur;
  dfs(start, wbase, cur);
  return out;
}

Rational partition_mass_exact(const TransitionGraph& g, const ScalePartition& p) {
  Rational s(0);
  for (const auto& path : p.paths) s += g.path_measure(path);
  return s;
}

double log_lq_moment(const TransitionGraph& g, const ScalePartition& p, double q) {
  std::vector<double> logrho;
  logrho.reserve(p.paths.size());
  for (const auto& path : p.paths) logrho.push_back(rat_log(g.path_measure(path)));
  return logsumexp(logrho, q);
}

double lq_moment(const TransitionGraph& g, const ScalePartition& p, double q) {
  return std::exp(log_lq_moment(g, p, q));
}

SpectrumCurve loop_lq_spectrum(const TransitionGraph& g, const LoopClassReport& lc,
                               const QGrid& grid, const ScheduleParams& sched) {
  SpectrumCurve out;
  out.class_id = lc.id;
  std::vector<double> qs = grid.values();

  if (lc.simple) {
    Path cycle = simple_class_cycle(g, lc);
    QMatrix m = g.path_matrix(cycle);
    double log_rate;
    if (m.size() == 1 && m[0].size() == 1) {
      log_rate = rat_log(m[0][0]);
    } else {
      Eigen::MatrixXd a(m.size(), m.size());
      for (size_t i = 0; i < m.size(); ++i)
        for (size_t j = 0; j < m.size(); ++j) a(i, j) = m[i][j].get_d();
      log_rate = std::log(spectral_radius(a));
    }
    double log_w = g.path_log_weight(cycle);
    double alpha = log_rate / log_w;
    out.method = "closed_form_scalar";
    out.q = qs;
    for (double q : qs) {
      out.tau.push_back(q * alpha);
      out.err.push_back(0);
    }
    return out;
  }

  bool all_scalar = true;
  for (int v : lc.vertices)
    if (g.vertices()[v].nb.size() != 1) all_scalar = false;

  Path zeta = shortest_rooted_path(g, lc.vertices[0]);
  RestrictionCtx ctx = make_ctx(g, &lc, zeta);
  RungData data = collect_rungs(g, ctx, sched);
  FeketeConsts fc = fekete_consts(g, lc, zeta);
  moment_estimates(data, qs, fc, out);

  if (all_scalar) {
    out.method = "pressure_root";
    std::vector<double> tau(qs.size());
    parallel_index(static_cast<int>(qs.size()),
                   [&](int i) { tau[i] = scalar_pressure_tau(g, lc, qs[i]); });
    // Keep the moment numbers as diagnostics; the root is the answer.
    out.tau = std::move(tau);
    out.err.assign(qs.size(), 1e-12);
    return out;
  }

  out.method = "moment_slope";
  // Every internal cycle theta realizes the symbolic dimension alpha_theta,
  // so tau(q) <= q * alpha_theta; the extreme cycle dimensions pin down the
  // otherwise slowly-converging tails of the estimate.
  CycleDimBounds cyc = cycle_dimension_bounds(g, lc);
  if (cyc.valid && lc.irreducible == Cert::Proven) {
    out.cyc_valid = true;
    out.cyc_alpha_min = cyc.alpha_min;
    out.cyc_alpha_max = cyc.alpha_max;
    // min(estimate, two lines) stays concave.
    for (size_t i = 0; i < out.q.size(); ++i) {
      double bound = out.q[i] < 0 ? out.q[i] * cyc.alpha_max : out.q[i] * cyc.alpha_min;
      if (out.tau[i] > bound) out.tau[i] = bound;
    }
  }
  return out;
}

SpectrumCurve graph_lq_spectrum(const TransitionGraph& g, const QGrid& grid,
                                const ScheduleParams& sched) {
  SpectrumCurve out;
  out.method = "moment_slope";
  RestrictionCtx ctx = make_ctx(g, nullptr, {});
  RungData data = collect_rungs(g, ctx, sched);
  moment_estimates(data, grid.values(), FeketeConsts{}, out);
  return out;
}

TauAssembly assemble_tau_mu(const std::vector<SpectrumCurve>& curves, Cert decomposable) {
  if (curves.empty()) fail(Errc::ValidationError, "no loop-class curves");
  TauAssembly out;
  out.q_negative_certified = decomposable == Cert::Proven;
  const auto& qs = curves[0].q;
  out.tau_mu.q = qs;
  out.tau_mu.method = "assembled_min";
  out.tau_mu.class_id = -1;
  for (size_t k = 0; k < qs.size(); ++k) {
    int best = 0;
    for (size_t c = 1; c < curves.size(); ++c)
      if (curves[c].tau[k] < curves[best].tau[k]) best = static_cast<int>(c);
    out.tau_mu.tau.push_back(curves[best].tau[k]);
    out.tau_mu.err.push_back(curves[best].err[k]);
    out.argmin_class.push_back(curves[best].class_id);
  }
  for (size_t k = 0; k + 1 < qs.size(); ++k) {
    if (out.argmin_class[k] == out.argmin_class[k + 1]) continue;
    // Linear interpolation of the difference of the two winning curves.
    const SpectrumCurve* a = nullptr;
    const SpectrumCurve* b = nullptr;
    for (const auto& c : curves) {
      if (c.class_id == out.argmin_class[k]) a = &c;
      if (c.class_id == out.argmin_class[k + 1]) b = &c;
    }
    double d0 = a->tau[k] - b->tau[k];
    double d1 = a->tau[k + 1] - b->tau[k + 1];
    double t = (d1 - d0) != 0 ? -d0 / (d1 - d0) : 0.5;
    out.crossing_q.push_back(qs[k] + t * (qs[k + 1] - qs[k]));
  }
  return out;
}

ConjugateCurve concave_conjugate(const SpectrumCurve& curve, const std::vector<double>& grid) {
  const auto& qs = curve.q;
  const auto& tau = curve.tau;
  if (qs.size() < 2) fail(Errc::GridTooNarrow, "need at least two grid points");
  double errmax = 0;
  for (double e : curve.err) errmax = std::max(errmax, e);
  double slack = 1e-9 + 4 * errmax;
  double smin = 0, smax = 0;
  for (size_t k = 0; k + 1 < qs.size(); ++k) {
    double s = (tau[k + 1] - tau[k]) / (qs[k + 1] - qs[k]);
    if (k == 0) {
      smin = smax = s;
    } else {
      smin = std::min(smin, s);
      smax = std::max(smax, s);
    }
  }
  // Concavity: chord slopes must not increase beyond the slack.
  for (size_t k = 0; k + 2 < qs.size(); ++k) {
    double s1 = (tau[k + 1] - tau[k]) / (qs[k + 1] - qs[k]);
    double s2 = (tau[k + 2] - tau[k + 1]) / (qs[k + 2] - qs[k + 1]);
    if (s2 > s1 + slack)
      fail(Errc::NonConcaveInput, "chord slopes increase at q = " + std::to_string(qs[k + 1]));
  }
  ConjugateCurve out;
  out.source_class = curve.class_id;
  out.slope_min = smin;
  out.slope_max = smax;
  out.alpha = grid;
  out.f.reserve(grid.size());
  for (double a : grid) {
    if (a < smin - 1e-12 || a > smax + 1e-12) {
      out.f.push_back(kNegInf);
      continue;
    }
    double best = a * qs[0] - tau[0];
    for (size_t k = 1; k < qs.size(); ++k) best = std::min(best, a * qs[k] - tau[k]);
    out.f.push_back(best);
  }
  return out;
}

ConjugateCurve concave_conjugate(const SpectrumCurve& curve) {
  std::vector<double> slopes;
  for (size_t k = 0; k + 1 < curve.q.size(); ++k)
    slopes.push_back((curve.tau[k + 1] - curve.tau[k]) / (curve.q[k + 1] - curve.q[k]));
  std::sort(slopes.begin(), slopes.end());
  slopes.erase(std::unique(slopes.begin(), slopes.end()), slopes.end());
  return concave_conjugate(curve, slopes);
}

std::vector<double> shared_alpha_grid(const std::vector<SpectrumCurve>& curves, int fill_points) {
  std::vector<double> pts;
  double lo = 0, hi = 1;
  bool first = true;
  for (const auto& c : curves) {
    for (size_t k = 0; k + 1 < c.q.size(); ++k) {
      double s = (c.tau[k + 1] - c.tau[k]) / (c.q[k + 1] - c.q[k]);
      pts.push_back(s);
      if (first) {
        lo = hi = s;
        first = false;
      } else {
        lo = std::min(lo, s);
        hi = std::max(hi, s);
      }
    }
  }
  double margin = 0.05 * (hi - lo) + 0.01;
  lo -= margin;
  hi += margin;
  for (int i = 0; i <= fill_points; ++i) pts.push_back(lo + (hi - lo) * i / fill_points);
  std::sort(pts.begin(), pts.end());
  std::vector<double> out;
  for (double p : pts)
    if (out.empty() || p > out.back() + 1e-12) out.push_back(p);
  return out;
}

FMuAssembly assemble_f_mu(const std::vector<ConjugateCurve>& conjugates,
                          const std::vector<LoopClassReport>& classes) {
  if (conjugates.empty()) fail(Errc::ValidationError, "no conjugates");
  FMuAssembly out;
  out.f_mu.alpha = conjugates[0].alpha;
  out.f_mu.source_class = -1;
  out.f_mu.f.assign(out.f_mu.alpha.size(), kNegInf);
  bool any = false;
  for (const auto& cj : conjugates) {
    const LoopClassReport* lc = nullptr;
    for (const auto& c : classes)
      if (c.id == cj.source_class) lc = &c;
    if (!lc) fail(Errc::Internal, "conjugate without class");
    if (lc->irreducible != Cert::Proven || lc->degenerate != Degen::No) {
      out.excluded_classes.push_back(lc->id);
      out.caveats.push_back("class " + std::to_string(lc->id) + " excluded from f_mu: " +
                            (lc->irreducible != Cert::Proven ? "irreducibility unknown"
                                                             : "degeneracy unknown"));
      continue;
    }
    out.included_classes.push_back(lc->id);
    for (size_t i = 0; i < cj.f.size(); ++i) out.f_mu.f[i] = std::max(out.f_mu.f[i], cj.f[i]);
    if (!any) {
      out.f_mu.slope_min = cj.slope_min;
      out.f_mu.slope_max = cj.slope_max;
      any = true;
    } else {
      out.f_mu.slope_min = std::min(out.f_mu.slope_min, cj.slope_min);
      out.f_mu.slope_max = std::max(out.f_mu.slope_max, cj.slope_max);
    }
  }
  if (!any) out.caveats.push_back("no class qualified for f_mu; curve is identically -inf");
  return out;
}

AlphaRange alpha_range(const SpectrumCurve& curve) {
  const auto& qs = curve.q;
  const auto& tau = curve.tau;
  if (qs.size() < 4 || qs.back() < 40 || qs.front() > -40)
    fail(Errc::GridTooNarrow, "alpha_range needs the grid to reach |q| >= 40");
  AlphaRange out;
  size_t n = qs.size();
  double chord_hi = (tau[n - 1] - tau[n - 2]) / (qs[n - 1] - qs[n - 2]);
  double mid_hi = (tau[n - 1] - tau[n / 2]) / (qs[n - 1] - qs[n / 2]);
  out.alpha_min = chord_hi;
  out.alpha_min_width = std::abs(mid_hi - chord_hi) + 2 * curve.err[n - 1] / (qs[n - 1] - qs[n - 2]);
  double chord_lo = (tau[1] - tau[0]) / (qs[1] - qs[0]);
  double mid_lo = (tau[n / 2] - tau[0]) / (qs[n / 2] - qs[0]);
  out.alpha_max = chord_lo;
  out.alpha_max_width = std::abs(mid_lo - chord_lo) + 2 * curve.err[0] / (qs[1] - qs[0]);
  if (curve.cyc_valid) {
    // Chords bound alpha_min from above and alpha_max from below; exact cycle
    // dimensions bound them from the other side.
    double w = std::abs(out.alpha_min - curve.cyc_alpha_min);
    out.alpha_min = std::min(out.alpha_min, curve.cyc_alpha_min);
    out.alpha_min_width = std::max(out.alpha_min_width, w);
    w = std::abs(out.alpha_max - curve.cyc_alpha_max);
    out.alpha_max = std::max(out.alpha_max, curve.cyc_alpha_max);
    out.alpha_max_width = std::max(out.alpha_max_width, w);
  }
  return out;
}

VerdictReport formalism_verdict(const TauAssembly& tau, const FMuAssembly& f,
                                const std::vector<ConjugateCurve>& conjugates,
                                const std::vector<LoopClassReport>& classes,
                                const DecomposabilityReport& dec, double tol) {
  VerdictReport out;
  out.alpha = f.f_mu.alpha;
  out.f_mu = f.f_mu.f;
  ConjugateCurve tstar = concave_conjugate(tau.tau_mu, out.alpha);
  out.tau_mu_star = tstar.f;
  out.caveats = f.caveats;

  bool all_proven = dec.status == Cert::Proven;
  for (const auto& lc : classes) {
    if (lc.irreducible != Cert::Proven || lc.degenerate != Degen::No) all_proven = false;
  }
  out.certified = all_proven;
  if (dec.status != Cert::Proven)
    out.caveats.push_back("decomposability unknown: tau_mu for q<0 is advisory");

  double spacing = 0;
  for (size_t i = 0; i + 1 < out.alpha.size(); ++i)
    spacing = std::max(spacing, out.alpha[i + 1] - out.alpha[i]);
  double blur = std::max(tol, 3 * spacing);
  // Error-aware tolerance: conjugate errors scale with the attaining |q|.
  double errmax = 0;
  for (double e : tau.tau_mu.err) errmax = std::max(errmax, e);

  out.holds.assign(out.alpha.size(), 1);
  for (size_t i = 0; i < out.alpha.size(); ++i) {
    double a = out.alpha[i];
    double fv = out.f_mu[i], tv = out.tau_mu_star[i];
    bool finite_f = fv != kNegInf, finite_t = tv != kNegInf;
    bool hold;
    if (!finite_f && !finite_t) {
      hold = true;
    } else if (finite_f && finite_t) {
      // Attaining q for the conjugate, for the error-aware tolerance.
      double best = kNegInf, qatt = 0;
      for (size_t k = 0; k < tau.tau_mu.q.size(); ++k) {
        double v = a * tau.tau_mu.q[k] - tau.tau_mu.tau[k];
        if (best == kNegInf || v < best) {
          best = v;
          qatt = tau.tau_mu.q[k];
        }
      }
      double tol_here = tol + (1 + std::abs(qatt)) * errmax;
      hold = std::abs(fv - tv) <= tol_here;
    } else {
      // One side ran off its domain: treat grid-resolution sized slivers at
      // the boundary as agreement, genuine gaps as failure.
      double lo = finite_f ? tstar.slope_min : f.f_mu.slope_min;
      double hi = finite_f ? tstar.slope_max : f.f_mu.slope_max;
      hold = a >= lo - blur && a <= hi + blur;
    }
    out.holds[i] = hold ? 1 : 0;
  }

  // Failing intervals.
  for (size_t i = 0; i < out.alpha.size();) {
    if (out.holds[i]) {
      ++i;
      continue;
    }
    size_t j = i;
    while (j + 1 < out.alpha.size() && !out.holds[j + 1]) ++j;
    out.failing_intervals.emplace_back(out.alpha[i], out.alpha[j]);
    i = j + 1;
  }
  out.holds_everywhere = out.failing_intervals.empty();

  // Concavity of f_mu over its finite part.
  out.f_mu_concave = true;
  {
    std::vector<std::pair<double, double>> fin;
    for (size_t i = 0; i < out.alpha.size(); ++i)
      if (out.f_mu[i] != kNegInf) fin.emplace_back(out.alpha[i], out.f_mu[i]);
    for (size_t i = 0; i + 2 < fin.size(); ++i) {
      double s1 = (fin[i + 1].second - fin[i].second) / (fin[i + 1].first - fin[i].first);
      double s2 = (fin[i + 2].second - fin[i + 1].second) / (fin[i + 2].first - fin[i + 1].first);
      if (s2 > s1 + 1e-6 + tol) {
        out.f_mu_concave = false;
        break;
      }
    }
    // A hole in the finite domain breaks concavity as well.
    bool seen_finite = false, seen_gap_after = false;
    for (size_t i = 0; i < out.alpha.size(); ++i) {
      bool fin_i = out.f_mu[i] != kNegInf;
      if (fin_i && seen_gap_after) {
        out.f_mu_concave = false;
        break;
      }
      if (seen_finite && !fin_i) seen_gap_after = true;
      if (fin_i) seen_finite = true;
    }
  }

  // Local-dimension set as an interval, when all non-essential classes are simple.
  out.all_non_essential_simple = true;
  for (const auto& lc : classes)
    if (!lc.essential && !lc.simple) out.all_non_essential_simple = false;
  if (out.all_non_essential_simple) {
    const ConjugateCurve* ess = nullptr;
    for (const auto& cj : conjugates) {
      for (const auto& lc : classes)
        if (lc.id == cj.source_class && lc.essential) ess = &cj;
    }
    out.local_dim_set_is_interval = true;
    if (ess) {
      for (const auto& cj : conjugates) {
        if (&cj == ess) continue;
        // Simple-class point spectra must land inside the essential interval.
        double a = cj.slope_min;  // linear curve: slope_min == slope_max
        if (a < ess->slope_min - blur || a > ess->slope_max + blur)
          out.local_dim_set_is_interval = false;
      }
    }
  }
  return out;
}

std::vector<double> path_local_dimension(const TransitionGraph& g, const Path& prefix) {
  if (!g.path_is_rooted(prefix) || prefix.empty())
    fail(Errc::NotRooted, "need a nonempty rooted path");
  std::vector<double> out;
  std::vector<Rational> row(1, Rational(1));
  double logw = 0;
  for (int eid : prefix) {
    const GraphEdge& e = g.edges()[eid];
    const QMatrix& t = e.norm;
    std::vector<Rational> next(t[0].size(), Rational(0));
    for (size_t i = 0; i < row.size(); ++i)
      for (size_t j = 0; j < next.size(); ++j) next[j] += row[i] * t[i][j];
    row = std::move(next);
    logw += e.log_weight;
    Rational mass(0);
    for (const auto& x : row) mass += x;
    out.push_back(rat_log(mass) / logw);
  }
  return out;
}

}  // namespace mfa
