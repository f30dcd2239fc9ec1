#ifndef MFA_CONFIG_HPP_
#define MFA_CONFIG_HPP_

#include <map>
#include <set>
#include <string>
#include <vector>

#include "mfa/spectra.hpp"

namespace mfa {

struct AnalysisConfig {
  // Field specification: minpoly coefficients low to high, bracket lo/hi.
  std::vector<Rational> minpoly;
  Rational bracket_lo, bracket_hi;
  struct MapSpec {
    std::vector<Rational> a, b;  // coefficient vectors in theta
    Rational p;
  };
  std::vector<MapSpec> maps;
  IterationRule rule;
  int vertex_cap = 10000;
  int gap_depth_cap = 64;
  std::size_t path_cap = 2'000'000;
  QGrid q_grid;
  ScheduleParams schedule;
  std::set<std::string> outputs;  // dot, graph-json, spectra-csv, verdict-json, subdivision-trace

  WIFS instantiate() const;
};

// Parses and validates a JSON config; errors carry the offending field path.
AnalysisConfig parse_config(const std::string& text);
std::string config_to_json(const AnalysisConfig& cfg);

// Registry of example families:
//   cantor-overlap, testud, bernoulli-pisot-simple, bernoulli-pisot-poly, lau-wang.
AnalysisConfig example(const std::string& name,
                       const std::map<std::string, std::string>& params = {});

struct RunResult {
  int exit_code = 0;  // 0 ok, 2 FncNotDetected, 3 UndecidedGap, 4 advisory
  std::string verdict_json;
  std::vector<std::string> written_files;
  // in-memory results for library callers
  bool graph_built = false;
  int num_vertices = 0, num_edges = 0, num_classes = 0;
  bool holds_everywhere = false, certified = false;
};

// Full pipeline: build graph, solve masses, classify loop classes, run the
// hypothesis checks, compute spectra and the verdict, write requested outputs.
RunResult run(const AnalysisConfig& cfg, const std::string& out_dir);

std::string format_sig12(double x);

}  // namespace mfa

#endif  // MFA_CONFIG_HPP_
