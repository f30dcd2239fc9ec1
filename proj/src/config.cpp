#include "mfa/config.hpp"

#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace mfa {

using nlohmann::json;

std::string format_sig12(double x) {
  if (x == kNegInf) return "-inf";
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.11e", x);
  return buf;
}

WIFS AnalysisConfig::instantiate() const {
  FieldPtr field = NumberField::make(minpoly, bracket_lo, bracket_hi);
  std::vector<Similarity> sims;
  std::vector<Rational> probs;
  for (const auto& m : maps) {
    sims.emplace_back(AlgebraicReal(field, m.a), AlgebraicReal(field, m.b));
    probs.push_back(m.p);
  }
  return WIFS(field, std::move(sims), std::move(probs));
}

namespace {

Rational parse_rat_at(const json& j, const std::string& path) {
  if (j.is_number_integer()) return Rational(static_cast<long>(j.get<long long>()));
  if (!j.is_string()) fail(Errc::ValidationError, path + ": expected rational string");
  try {
    return rat_parse(j.get<std::string>());
  } catch (const Error&) {
    fail(Errc::ValidationError, path + ": bad rational '" + j.get<std::string>() + "'");
  }
}

std::vector<Rational> parse_rat_vec(const json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) fail(Errc::ValidationError, path + ": expected nonempty array");
  std::vector<Rational> out;
  for (size_t i = 0; i < j.size(); ++i)
    out.push_back(parse_rat_at(j[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

}  // namespace

AnalysisConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const std::exception& e) {
    fail(Errc::ParseError, e.what());
  }
  AnalysisConfig cfg;
  if (!j.contains("field")) fail(Errc::ValidationError, "field: missing");
  const json& jf = j["field"];
  if (!jf.contains("minpoly")) fail(Errc::ValidationError, "field.minpoly: missing");
  cfg.minpoly = parse_rat_vec(jf["minpoly"], "field.minpoly");
  if (!jf.contains("bracket") || !jf["bracket"].is_array() || jf["bracket"].size() != 2)
    fail(Errc::ValidationError, "field.bracket: expected [lo, hi]");
  cfg.bracket_lo = parse_rat_at(jf["bracket"][0], "field.bracket[0]");
  cfg.bracket_hi = parse_rat_at(jf["bracket"][1], "field.bracket[1]");

  if (!j.contains("maps") || !j["maps"].is_array() || j["maps"].empty())
    fail(Errc::ValidationError, "maps: expected nonempty array");
  Rational psum(0);
  for (size_t i = 0; i < j["maps"].size(); ++i) {
    const json& jm = j["maps"][i];
    std::string path = "maps[" + std::to_string(i) + "]";
    AnalysisConfig::MapSpec ms;
    if (!jm.contains("a")) fail(Errc::ValidationError, path + ".a: missing");
    ms.a = parse_rat_vec(jm["a"], path + ".a");
    if (!jm.contains("b")) fail(Errc::ValidationError, path + ".b: missing");
    ms.b = parse_rat_vec(jm["b"], path + ".b");
    if (!jm.contains("p")) fail(Errc::ValidationError, path + ".p: missing");
    ms.p = parse_rat_at(jm["p"], path + ".p");
    psum += ms.p;
    cfg.maps.push_back(std::move(ms));
  }
  if (psum != 1) fail(Errc::ValidationError, "probs: probabilities sum to " + rat_str(psum));

  if (j.contains("rule")) {
    std::string r = j["rule"].get<std::string>();
    if (r == "uniform")
      cfg.rule.kind = RuleKind::Uniform;
    else if (r == "weighted")
      cfg.rule.kind = RuleKind::Weighted;
    else
      fail(Errc::ValidationError, "rule: expected 'uniform' or 'weighted'");
  }
  if (j.contains("caps")) {
    const json& jc = j["caps"];
    if (jc.contains("vertices")) cfg.vertex_cap = jc["vertices"].get<int>();
    if (jc.contains("gap_depth")) cfg.gap_depth_cap = jc["gap_depth"].get<int>();
    if (jc.contains("paths")) cfg.path_cap = jc["paths"].get<std::size_t>();
    if (cfg.vertex_cap <= 0 || cfg.gap_depth_cap <= 0 || cfg.path_cap == 0)
      fail(Errc::ValidationError, "caps: caps must be positive");
  }
  if (j.contains("q_grid")) {
    const json& jq = j["q_grid"];
    if (jq.contains("min")) cfg.q_grid.qmin = jq["min"].get<double>();
    if (jq.contains("max")) cfg.q_grid.qmax = jq["max"].get<double>();
    if (jq.contains("count")) cfg.q_grid.count = jq["count"].get<int>();
    if (jq.contains("big")) cfg.q_grid.qbig = jq["big"].get<double>();
    if (cfg.q_grid.count < 2 || cfg.q_grid.qmin >= cfg.q_grid.qmax)
      fail(Errc::ValidationError, "q_grid: malformed");
  }
  if (j.contains("schedule")) {
    const json& js = j["schedule"];
    if (js.contains("max_rungs")) cfg.schedule.max_rungs = js["max_rungs"].get<int>();
  }
  cfg.schedule.path_cap = cfg.path_cap;
  if (j.contains("outputs")) {
    for (const auto& o : j["outputs"]) {
      std::string s = o.get<std::string>();
      if (s != "dot" && s != "graph-json" && s != "spectra-csv" && s != "verdict-json" &&
          s != "subdivision-trace")
        fail(Errc::ValidationError, "outputs: unknown output '" + s + "'");
      cfg.outputs.insert(s);
    }
  }
  return cfg;
}

std::string config_to_json(const AnalysisConfig& cfg) {
  json j;
  json jmin = json::array();
  for (const auto& c : cfg.minpoly) jmin.push_back(rat_str(c));
  j["field"]["minpoly"] = jmin;
  j["field"]["bracket"] = {rat_str(cfg.bracket_lo), rat_str(cfg.bracket_hi)};
  j["maps"] = json::array();
  for (const auto& m : cfg.maps) {
    json jm;
    json ja = json::array(), jb = json::array();
    for (const auto& c : m.a) ja.push_back(rat_str(c));
    for (const auto& c : m.b) jb.push_back(rat_str(c));
    jm["a"] = ja;
    jm["b"] = jb;
    jm["p"] = rat_str(m.p);
    j["maps"].push_back(jm);
  }
  j["rule"] = cfg.rule.kind == RuleKind::Uniform ? "uniform" : "weighted";
  j["caps"] = {{"vertices", cfg.vertex_cap},
               {"gap_depth", cfg.gap_depth_cap},
               {"paths", cfg.path_cap}};
  j["q_grid"] = {{"min", cfg.q_grid.qmin},
                 {"max", cfg.q_grid.qmax},
                 {"count", cfg.q_grid.count},
                 {"big", cfg.q_grid.qbig}};
  j["schedule"] = {{"max_rungs", cfg.schedule.max_rungs}};
  j["outputs"] = json::array();
  for (const auto& s : cfg.outputs) j["outputs"].push_back(s);
  return j.dump(2) + "\n";
}

namespace {

std::vector<Rational> parse_prob_list(const std::string& s, size_t expect) {
  std::vector<Rational> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, ',')) out.push_back(rat_parse(cur));
  if (out.size() != expect)
    fail(Errc::ValidationError,
         "expected " + std::to_string(expect) + " probabilities, got " + std::to_string(out.size()));
  return out;
}

std::vector<int> parse_int_set(const std::string& s) {
  std::vector<int> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, ',')) out.push_back(std::stoi(cur));
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::string get_param(const std::map<std::string, std::string>& params, const std::string& key,
                      const std::string& def) {
  auto it = params.find(key);
  return it == params.end() ? def : it->second;
}

AnalysisConfig base_config_rational_field(const Rational& theta) {
  // Degree-1 field Q with theta pinned to a convenient rational.
  AnalysisConfig cfg;
  cfg.minpoly = {-theta, Rational(1)};
  cfg.bracket_lo = theta - 1;
  cfg.bracket_hi = theta + 1;
  return cfg;
}

}  // namespace

AnalysisConfig example(const std::string& name, const std::map<std::string, std::string>& params) {
  if (name == "cantor-overlap") {
    AnalysisConfig cfg = base_config_rational_field(rat(1, 3));
    auto probs = parse_prob_list(get_param(params, "probs", "1/3,1/3,1/3"), 3);
    std::vector<Rational> offs = {rat(0), rat(2, 9), rat(2, 3)};
    for (int i = 0; i < 3; ++i)
      cfg.maps.push_back({{Rational(0), Rational(1)}, {offs[i]}, probs[i]});
    return cfg;
  }
  if (name == "testud") {
    int ell = std::stoi(get_param(params, "ell", "3"));
    if (ell < 2) fail(Errc::ValidationError, "testud: ell must be >= 2");
    auto P = parse_int_set(get_param(params, "P", "0,1,2"));
    auto N = parse_int_set(get_param(params, "N", "1"));
    for (int i : P)
      if (i < 0 || i >= ell) fail(Errc::ValidationError, "testud: P digit out of range");
    for (int i : N)
      if (i < 0 || i >= ell) fail(Errc::ValidationError, "testud: N digit out of range");
    auto in = [](const std::vector<int>& v, int x) {
      return std::binary_search(v.begin(), v.end(), x);
    };
    if (!((in(P, 0) || in(N, 0)) && (in(P, ell - 1) || in(N, ell - 1))))
      fail(Errc::ConstraintViolation, "testud requires {0, ell-1} inside P union N");
    size_t m = P.size() + N.size();
    std::string unit = rat_str(Rational(1, static_cast<long>(m)));
    std::string defp = unit;
    for (size_t i = 1; i < m; ++i) defp += "," + unit;
    auto probs = parse_prob_list(get_param(params, "probs", defp), m);
    AnalysisConfig cfg = base_config_rational_field(rat(1, ell));
    size_t pi = 0;
    for (int i : P)  // x/ell + i/ell
      cfg.maps.push_back(
          {{Rational(0), Rational(1)}, {Rational(0), Rational(i)}, probs[pi++]});
    for (int i : N)  // -x/ell + (i+1)/ell
      cfg.maps.push_back(
          {{Rational(0), Rational(-1)}, {Rational(0), Rational(i + 1)}, probs[pi++]});
    return cfg;
  }
  if (name == "bernoulli-pisot-simple" || name == "bernoulli-pisot-poly") {
    Poly minpoly;
    if (name == "bernoulli-pisot-simple") {
      int k = std::stoi(get_param(params, "k", "2"));
      if (k < 2) fail(Errc::ValidationError, "k must be >= 2");
      minpoly.assign(k + 1, Rational(-1));
      minpoly[k] = 1;  // x^k - x^{k-1} - ... - x - 1
    } else {
      std::string which = get_param(params, "which", "cubic");
      if (which == "cubic")
        minpoly = {Rational(-1), Rational(1), Rational(-2), Rational(1)};
      else if (which == "quartic1")
        minpoly = {Rational(1), Rational(0), Rational(-2), Rational(-1), Rational(1)};
      else if (which == "quartic2")
        minpoly = {Rational(-1), Rational(1), Rational(0), Rational(-2), Rational(1)};
      else
        fail(Errc::UnknownExample, "which must be cubic, quartic1 or quartic2");
    }
    Rational p1 = rat_parse(get_param(params, "p1", "1/2"));
    if (p1 <= 0 || p1 >= 1) fail(Errc::ValidationError, "p1 must be in (0,1)");
    AnalysisConfig cfg;
    cfg.minpoly = minpoly;
    cfg.bracket_lo = 1;
    cfg.bracket_hi = 2;
    FieldPtr field = NumberField::make(minpoly, cfg.bracket_lo, cfg.bracket_hi);
    AlgebraicReal lam = AlgebraicReal::theta(field).inverse();
    AlgebraicReal one(field, Rational(1));
    AlgebraicReal b2 = one - lam;
    cfg.maps.push_back({lam.coeffs(), AlgebraicReal(field, Rational(0)).coeffs(), p1});
    cfg.maps.push_back({lam.coeffs(), b2.coeffs(), Rational(1) - p1});
    return cfg;
  }
  if (name == "lau-wang") {
    int k = std::stoi(get_param(params, "k", "1"));
    if (k < 1) fail(Errc::ValidationError, "lau-wang: k must be >= 1");
    Rational l1 = rat_parse(get_param(params, "lambda1", "1/3"));
    Rational l2 = rat_parse(get_param(params, "lambda2", "1/3"));
    if (l1 <= 0 || l1 >= 1 || l2 <= 0 || l2 >= 1)
      fail(Errc::ValidationError, "lau-wang: lambdas must be in (0,1)");
    // beta_j = lambda1 (lambda2/lambda1)^j
    std::vector<Rational> beta(k + 1);
    for (int jj = 0; jj <= k; ++jj) {
      Rational b = l1;
      for (int t = 0; t < jj; ++t) b = b * l2 / l1;
      beta[jj] = b;
    }
    std::vector<Rational> slope, off;
    slope.push_back(l1);
    off.push_back(Rational(0));
    Rational acc(0);
    for (int i = 1; i <= k; ++i) {
      acc += beta[i - 1] * (1 - beta[i]);
      slope.push_back(beta[i]);
      off.push_back(acc);
    }
    slope.push_back(l2);
    off.push_back(1 - l2);
    // S_k(1) + lambda2 <= 1, validated exactly.
    Rational sk1 = slope[k] + off[k];
    if (sk1 + l2 > 1)
      fail(Errc::ConstraintViolation,
           "lau-wang requires S_k(1) + lambda2 <= 1; got " + rat_str(sk1 + l2));
    size_t m = slope.size();
    std::string unit = rat_str(Rational(1, static_cast<long>(m)));
    std::string defp = unit;
    for (size_t i = 1; i < m; ++i) defp += "," + unit;
    auto probs = parse_prob_list(get_param(params, "probs", defp), m);
    AnalysisConfig cfg = base_config_rational_field(l1);
    for (size_t i = 0; i < m; ++i) cfg.maps.push_back({{slope[i]}, {off[i]}, probs[i]});
    return cfg;
  }
  fail(Errc::UnknownExample, "unknown example '" + name + "'");
}

namespace {

json classes_json(const TransitionGraph& g, const std::vector<LoopClassReport>& classes) {
  json out = json::array();
  for (const auto& lc : classes) {
    json jc;
    jc["id"] = lc.id;
    jc["vertices"] = lc.vertices;
    jc["n_edges"] = lc.edges.size();
    jc["essential"] = lc.essential;
    jc["simple"] = lc.simple;
    jc["irreducible"] = lc.irreducible == Cert::Proven ? "proven" : "unknown";
    jc["irreducible_witness"] = lc.irreducible_witness;
    jc["degenerate"] = lc.degenerate == Degen::No ? "no" : "unknown";
    jc["degeneracy_witness"] = lc.degeneracy_witness;
    if (lc.interior_path) jc["interior_path_edges"] = *lc.interior_path;
    json sizes = json::array();
    for (int v : lc.vertices) sizes.push_back(g.vertices()[v].nb.size());
    jc["neighbour_set_sizes"] = sizes;
    out.push_back(jc);
  }
  return out;
}

void write_file(const std::string& dir, const std::string& name, const std::string& text,
                std::vector<std::string>& written) {
  std::filesystem::create_directories(dir);
  std::string path = dir + "/" + name;
  std::ofstream os(path, std::ios::binary);
  if (!os) fail(Errc::ValidationError, "cannot write " + path);
  os << text;
  written.push_back(path);
}

std::string subdivision_trace_json(const WIFS& w, const IterationRule& rule) {
  NetInterval root{w.zero(), w.one(), 0, NeighbourSet::root(w.field())};
  Subdivision sub = children(w, rule, root);
  json j;
  json ycuts = json::array();
  for (const auto& y : sub.cut_points) {
    ycuts.push_back({{"exact", y.str()}, {"float", y.to_double()}});
  }
  j["cut_points"] = ycuts;
  json kids = json::array();
  for (const auto& rec : sub.children) {
    json k;
    k["a"] = {{"exact", rec.child.a.str()}, {"float", rec.child.a.to_double()}};
    k["b"] = {{"exact", rec.child.b.str()}, {"float", rec.child.b.to_double()}};
    k["position"] = rec.position.str();
    k["weight"] = rec.weight.str();
    k["neighbour_set"] = rec.child.nb.str();
    json raw = json::array();
    for (const auto& row : rec.raw) {
      json r = json::array();
      for (const auto& x : row) r.push_back(rat_str(x));
      raw.push_back(r);
    }
    k["raw_matrix"] = raw;
    kids.push_back(k);
  }
  j["children"] = kids;
  return j.dump(2) + "\n";
}

std::string spectra_tau_csv(const std::vector<SpectrumCurve>& curves, const TauAssembly& tau) {
  std::ostringstream os;
  os << "q";
  for (const auto& c : curves) os << ",tau_class_" << c.class_id;
  os << ",tau_min,certified_flag\n";
  for (size_t k = 0; k < tau.tau_mu.q.size(); ++k) {
    os << format_sig12(tau.tau_mu.q[k]);
    for (const auto& c : curves) os << "," << format_sig12(c.tau[k]);
    bool cert = tau.tau_mu.q[k] >= 0 || tau.q_negative_certified;
    os << "," << format_sig12(tau.tau_mu.tau[k]) << "," << (cert ? 1 : 0) << "\n";
  }
  return os.str();
}

std::string spectra_f_csv(const std::vector<ConjugateCurve>& conjugates, const FMuAssembly& f,
                          const VerdictReport& verdict) {
  std::ostringstream os;
  os << "alpha";
  for (const auto& c : conjugates) os << ",fstar_class_" << c.source_class;
  os << ",f_mu,tau_mu_star,formalism_holds\n";
  for (size_t i = 0; i < verdict.alpha.size(); ++i) {
    os << format_sig12(verdict.alpha[i]);
    for (const auto& c : conjugates) os << "," << format_sig12(c.f[i]);
    os << "," << format_sig12(verdict.f_mu[i]) << "," << format_sig12(verdict.tau_mu_star[i])
       << "," << int(verdict.holds[i]) << "\n";
  }
  return os.str();
}

}  // namespace

RunResult run(const AnalysisConfig& cfg, const std::string& out_dir) {
  RunResult res;
  json report;
  report["error"] = nullptr;

  WIFS raw = cfg.instantiate();
  WIFS w = normalize_hull(raw);

  BuildCaps caps;
  caps.vertex_cap = cfg.vertex_cap;
  caps.sub.gap_depth_cap = cfg.gap_depth_cap;

  TransitionGraph* gptr = nullptr;
  TransitionGraph g(w, cfg.rule);
  try {
    g = build_graph(w, cfg.rule, caps);
    gptr = &g;
  } catch (const Error& e) {
    if (e.code() == Errc::FncNotDetected)
      res.exit_code = 2;
    else if (e.code() == Errc::UndecidedGap)
      res.exit_code = 3;
    else
      throw;
    report["error"] = {{"code", errc_name(e.code())}, {"message", e.what()}};
    res.verdict_json = report.dump(2) + "\n";
    if (cfg.outputs.count("verdict-json"))
      write_file(out_dir, "verdict.json", res.verdict_json, res.written_files);
    return res;
  }

  solve_masses(*gptr);
  res.graph_built = true;
  res.num_vertices = static_cast<int>(gptr->vertices().size());
  res.num_edges = static_cast<int>(gptr->edges().size());
  report["graph"] = {{"vertices", res.num_vertices}, {"edges", res.num_edges}};

  auto classes = loop_classes(*gptr);
  res.num_classes = static_cast<int>(classes.size());
  auto dec = check_decomposable(*gptr, classes);
  report["classes"] = classes_json(*gptr, classes);
  {
    json jd;
    jd["status"] = dec.status == Cert::Proven ? "proven" : "unknown";
    jd["witness"] = dec.witness;
    jd["n_initial_paths"] = dec.initial_paths.size();
    jd["n_transition_paths"] = dec.transition_paths.size();
    jd["failing_transition_paths"] = dec.failing_transition_paths;
    report["decomposability"] = jd;
  }

  std::vector<SpectrumCurve> curves;
  for (const auto& lc : classes)
    curves.push_back(loop_lq_spectrum(*gptr, lc, cfg.q_grid, cfg.schedule));

  TauAssembly tau = assemble_tau_mu(curves, dec.status);
  std::vector<double> agrid = shared_alpha_grid(curves, 800);
  std::vector<ConjugateCurve> conjugates;
  for (const auto& c : curves) conjugates.push_back(concave_conjugate(c, agrid));
  FMuAssembly fmu = assemble_f_mu(conjugates, classes);
  VerdictReport verdict = formalism_verdict(tau, fmu, conjugates, classes, dec);

  // Essential-class spectra must agree when there are several.
  {
    std::vector<const SpectrumCurve*> ess;
    for (const auto& lc : classes)
      if (lc.essential) ess.push_back(&curves[&lc - classes.data()]);
    for (size_t i = 1; i < ess.size(); ++i)
      for (size_t k = 0; k < ess[0]->tau.size(); ++k)
        if (std::abs(ess[0]->tau[k] - ess[i]->tau[k]) >
            0.02 + ess[0]->err[k] + ess[i]->err[k])
          verdict.caveats.push_back("essential-class spectra disagree beyond tolerance");
  }

  json jsp;
  jsp["crossings_q"] = tau.crossing_q;
  jsp["q_negative_certified"] = tau.q_negative_certified;
  json jcl = json::array();
  for (const auto& c : curves) {
    AlphaRange ar = alpha_range(c);
    jcl.push_back({{"id", c.class_id},
                   {"method", c.method},
                   {"alpha_min", ar.alpha_min},
                   {"alpha_min_width", ar.alpha_min_width},
                   {"alpha_max", ar.alpha_max},
                   {"alpha_max_width", ar.alpha_max_width}});
  }
  jsp["classes"] = jcl;
  report["spectra"] = jsp;

  json jv;
  jv["holds_everywhere"] = verdict.holds_everywhere;
  jv["certified"] = verdict.certified;
  jv["f_mu_concave"] = verdict.f_mu_concave;
  json fi = json::array();
  for (auto& [a, b] : verdict.failing_intervals) fi.push_back({a, b});
  jv["failing_intervals"] = fi;
  jv["all_non_essential_simple"] = verdict.all_non_essential_simple;
  jv["local_dim_set_is_interval"] = verdict.local_dim_set_is_interval;
  jv["caveats"] = verdict.caveats;
  report["verdict"] = jv;

  res.holds_everywhere = verdict.holds_everywhere;
  res.certified = verdict.certified;
  bool advisory = !verdict.certified;
  res.exit_code = advisory ? 4 : 0;
  report["exit_code"] = res.exit_code;
  res.verdict_json = report.dump(2) + "\n";

  if (cfg.outputs.count("verdict-json"))
    write_file(out_dir, "verdict.json", res.verdict_json, res.written_files);
  if (cfg.outputs.count("dot"))
    write_file(out_dir, "graph.dot", export_dot(*gptr), res.written_files);
  if (cfg.outputs.count("graph-json"))
    write_file(out_dir, "graph.json", graph_json(*gptr), res.written_files);
  if (cfg.outputs.count("subdivision-trace"))
    write_file(out_dir, "subdivision.json", subdivision_trace_json(w, cfg.rule),
               res.written_files);
  if (cfg.outputs.count("spectra-csv")) {
    write_file(out_dir, "spectra_tau.csv", spectra_tau_csv(curves, tau), res.written_files);
    write_file(out_dir, "spectra_f.csv", spectra_f_csv(conjugates, fmu, verdict),
               res.written_files);
  }
  return res;
}

}  // namespace mfa
