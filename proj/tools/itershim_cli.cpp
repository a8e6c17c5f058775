// itershim: verification suites and computed artifacts.

#include <CLI11.hpp>

#include <fstream>
#include <future>
#include <iostream>

#include "itershim/report.hpp"

using namespace itershim;
using report::json;

namespace {

struct Overrides {
  std::string config_path;
  std::optional<int> depth, nodes, samples, terms, tm_depth;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> form, output;
  std::vector<std::string> base, cusps;
  std::vector<int> weights, tm_exponents;
  std::vector<double> s_values;
};

void add_common(CLI::App* app, Overrides& o) {
  app->add_option("--depth", o.depth, "truncation depth");
  app->add_option("--nodes", o.nodes, "Gauss-Legendre nodes per panel");
  app->add_option("--samples", o.samples, "number of random word pairs");
  app->add_option("--terms", o.terms, "q-expansion terms for builtin forms");
  app->add_option("--seed", o.seed, "seed for word sampling");
  app->add_option("--form", o.form, "replace the form of every alphabet entry (builtin name or JSON path)");
  app->add_option("--base", o.base, "base points (inf, i, rho, p/q, x,y)")->delimiter(',');
  app->add_option("--cusps", o.cusps, "cusps for the continued-fraction check")->delimiter(',');
  app->add_option("--weights", o.weights, "weights for modular symbols")->delimiter(',');
  app->add_option("--s", o.s_values, "s values for the Dirichlet comparison")->delimiter(',');
  app->add_option("--tm-exponents", o.tm_exponents, "exponents of the total Mellin letters")->delimiter(',');
  app->add_option("--tm-depth", o.tm_depth, "depth of the total Mellin transform");
  app->add_option("-o,--output", o.output, "output file (default stdout)");
}

report::RunConfig resolve(const Overrides& o) {
  auto cfg = report::load_config(o.config_path);
  if (o.depth) cfg.depth = *o.depth;
  if (o.nodes) cfg.nodes = *o.nodes;
  if (o.samples) cfg.samples = *o.samples;
  if (o.terms) cfg.terms = *o.terms;
  if (o.tm_depth) cfg.tm_depth = *o.tm_depth;
  if (o.seed) cfg.seed = *o.seed;
  if (o.output) cfg.output = *o.output;
  if (o.form)
    for (auto& e : cfg.alphabet) e.form = *o.form;
  if (!o.base.empty()) cfg.base_points = o.base;
  if (!o.cusps.empty()) cfg.cusps = o.cusps;
  if (!o.weights.empty()) cfg.weights = o.weights;
  if (!o.s_values.empty()) cfg.s_values = o.s_values;
  if (!o.tm_exponents.empty()) cfg.tm_exponents = o.tm_exponents;
  cfg.validate();
  return cfg;
}

void emit(const report::RunConfig& cfg, const std::string& text) {
  if (cfg.output.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(cfg.output);
  if (!out) throw std::runtime_error("cannot write " + cfg.output);
  out << text;
}

void summarize(const report::SuiteReport& r) {
  for (const auto& c : r.checks)
    std::cerr << (c.pass ? "PASS " : "FAIL ") << r.suite << ' ' << c.name << ' ' << c.value << ' '
              << (c.kind == "above" ? "> " : c.kind == "exact" ? "== " : "< ") << c.tolerance << '\n';
}

int verify(const std::string& suite, const report::RunConfig& cfg) {
  std::vector<std::string> names;
  if (suite == "all") names = report::suite_names();
  else names.push_back(suite);

  std::vector<std::future<report::SuiteReport>> jobs;
  for (const auto& n : names) jobs.push_back(std::async(std::launch::async, report::run_suite, n, std::cref(cfg)));
  std::vector<report::SuiteReport> reports;
  for (auto& j : jobs) reports.push_back(j.get());

  bool ok = true;
  json out;
  if (reports.size() == 1) {
    out = reports[0].to_json(cfg);
    ok = reports[0].pass();
  } else {
    json arr = json::array();
    for (const auto& r : reports) {
      arr.push_back(r.to_json(cfg));
      ok = ok && r.pass();
    }
    out["pass"] = ok;
    out["suites"] = arr;
  }
  for (const auto& r : reports) summarize(r);
  emit(cfg, out.dump(2) + "\n");
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Iterated Shimura integrals: verification suites and artifacts"};
  app.require_subcommand(1);
  Overrides o;
  app.add_option("-c,--config", o.config_path, "JSON config file (default: $ITERSHIM_CONFIG)");

  auto* verify_cmd = app.add_subcommand("verify", "run a verification suite; exit status 1 if any check fails");
  std::string suite;
  std::vector<std::string> choices = report::suite_names();
  choices.push_back("all");
  verify_cmd->add_option("suite", suite, "suite name")->required()->check(CLI::IsMember(choices));
  add_common(verify_cmd, o);

  auto* compute_cmd = app.add_subcommand("compute", "emit a JSON or CSV artifact");
  compute_cmd->fallthrough();
  compute_cmd->require_subcommand(1);
  add_common(compute_cmd, o);
  std::string from = "inf", to = "0";
  auto* transport_cmd = compute_cmd->add_subcommand("transport", "transport series J_from^to as JSON");
  transport_cmd->add_option("--from", from, "start point");
  transport_cmd->add_option("--to", to, "end point");
  double s0 = 1, s1 = 11, step = 1;
  auto* lambda_cmd = compute_cmd->add_subcommand("lambda", "table of Lambda(f; s) as CSV");
  lambda_cmd->add_option("--s0", s0, "first s");
  lambda_cmd->add_option("--s1", s1, "last s");
  lambda_cmd->add_option("--step", step, "grid step");
  auto* tm_cmd = compute_cmd->add_subcommand("tm", "total Mellin series as JSON");
  auto* symbols_cmd = compute_cmd->add_subcommand("symbols", "modular symbol spaces as JSON");

  CLI11_PARSE(app, argc, argv);

  try {
    const auto cfg = resolve(o);
    if (verify_cmd->parsed()) return verify(suite, cfg);
    if (transport_cmd->parsed()) emit(cfg, report::compute_transport(cfg, from, to).dump(2) + "\n");
    else if (lambda_cmd->parsed()) emit(cfg, report::compute_lambda_csv(cfg, s0, s1, step));
    else if (tm_cmd->parsed()) emit(cfg, report::compute_tm(cfg).dump(2) + "\n");
    else if (symbols_cmd->parsed()) emit(cfg, report::compute_symbols(cfg).dump(2) + "\n");
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
