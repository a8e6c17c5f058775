#pragma once

// Run configuration, verification suites and computed artifacts shared by the
// command-line tool.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "itershim/forms.hpp"
#include "itershim/integrate.hpp"

namespace itershim::report {

using json = nlohmann::ordered_json;

struct AlphabetEntry {
  std::string form;  // builtin name ("delta", "delta_e4") or path to a JSON form
  std::vector<int> exponents;
};

struct RunConfig {
  std::vector<AlphabetEntry> alphabet{{"delta", {1}}};
  bool close = true;  // close the alphabet under sigma, tau; otherwise it must already be closed
  int terms = 400;
  int dirichlet_terms = 20000;
  int depth = 3;
  int nodes = 20;
  double panel = 0.5;
  double y_cut = 1.0;
  double tail_eps = 1e-20;
  std::vector<std::string> base_points{"inf", "i", "rho"};
  std::vector<std::string> cusps{"1", "2/3", "3/5"};
  std::vector<double> s_values{8.5, 9.0, 10.0};
  std::vector<int> tm_exponents{2, 10};
  int tm_depth = 2;
  std::vector<int> weights{10, 12, 14, 16, 18, 20, 22};
  std::uint64_t seed = 1;
  int samples = 20;
  int max_word = 6;
  std::map<std::string, double> tolerances{
      {"relation", 1e-6},      {"cocycle", 1e-6},  {"shuffle", 1e-8},        {"equivalence", 1e-6},
      {"cuspidal", 1e-6},      {"cf", 1e-6},       {"rho", 1e-6},            {"mellin", 1e-8},
      {"functional_eq", 1e-8}, {"entire", 1e-9},   {"tm", 1e-6},             {"tm_coincidence", 1e-8},
      {"pairing", 1e-8},       {"pairing_rank", 1e-4}};
  std::string output;

  double tol(const std::string& name) const;
  /// Throws std::invalid_argument on bad values.
  void validate() const;
  json to_json() const;
  /// Keys absent from j keep their current values.
  void merge(const nlohmann::json& j);
};

/// Config from a file, falling back to the ITERSHIM_CONFIG environment
/// variable when path is empty, then to defaults.
RunConfig load_config(const std::string& path);

struct Check {
  std::string name;
  std::string kind;  // "below": value < tolerance, "exact": value == 0, "above": value > tolerance
  double value = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

struct SuiteReport {
  explicit SuiteReport(std::string name) : suite(std::move(name)) {}

  std::string suite;
  std::vector<Check> checks;
  json calibration = json::object();
  json details = json::object();

  /// tolerance 0 makes the check exact.
  void add(std::string name, double value, double tolerance);
  void add_above(std::string name, double value, double bound);
  bool pass() const;
  json to_json(const RunConfig& cfg) const;
};

const std::vector<std::string>& suite_names();
/// Throws std::invalid_argument for an unknown suite.
SuiteReport run_suite(const std::string& name, const RunConfig& cfg);

forms::CuspFormPtr load_form(const std::string& source, int terms);
forms::OmegaForm build_alphabet(const RunConfig& cfg);
integrate::TransportOptions transport_options(const RunConfig& cfg);

json compute_transport(const RunConfig& cfg, const std::string& from, const std::string& to);
/// Header s,re,im,residual_plus,residual_minus,error_estimate; one row per s.
std::string compute_lambda_csv(const RunConfig& cfg, double s0, double s1, double step);
json compute_tm(const RunConfig& cfg);
json compute_symbols(const RunConfig& cfg);

}  // namespace itershim::report
