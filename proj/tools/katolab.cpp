// katolab command line: scenario runs, quick sweeps and Kato-function checks.
//
// Exit codes: 0 success, 1 validation failure, 2 I/O error.

#include <cstdio>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "katolab/format.hpp"
#include "katolab/harness.hpp"
#include "katolab/kato_json.hpp"

namespace {

using namespace katolab;
using nlohmann::json;

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::IoError, "cannot read " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(Errc::ConfigParse, path + ": " + e.what());
  }
}

// "exp", "resolvent_power:2", "single_pair:1:0.5", "atomic_exp:2:0.25", or a
// JSON descriptor.
json function_descriptor(const std::string& text) {
  if (!text.empty() && text.front() == '{') {
    try {
      return json::parse(text);
    } catch (const json::parse_error& e) {
      throw Error(Errc::ConfigParse, std::string("function descriptor: ") + e.what());
    }
  }
  std::vector<std::string> parts;
  std::size_t start = 0;
  for (std::size_t pos; (pos = text.find(':', start)) != std::string::npos; start = pos + 1)
    parts.push_back(text.substr(start, pos - start));
  parts.push_back(text.substr(start));
  auto num = [&](std::size_t i) -> double {
    if (i >= parts.size()) throw Error(Errc::ConfigParse, "function \"" + text + "\" is missing parameters");
    try {
      return std::stod(parts[i]);
    } catch (const std::exception&) {
      throw Error(Errc::ConfigParse, "function \"" + text + "\": bad number \"" + parts[i] + "\"");
    }
  };
  const std::string& name = parts[0];
  if (name == "exp") return {{"variant", "exp"}};
  if (name == "resolvent_power") return {{"variant", "resolvent_power"}, {"k", static_cast<int>(num(1))}};
  if (name == "single_pair")
    return {{"variant", "single_pair"}, {"eta", num(1)}, {"alpha", parts.size() > 2 ? num(2) : 0.0}};
  if (name == "atomic_exp")
    return {{"variant", "atomic_exp"}, {"s", num(1)}, {"alpha", parts.size() > 2 ? num(2) : 0.0}};
  throw Error(Errc::ConfigParse, "unknown function \"" + name + "\"");
}

json metric_descriptor(const std::string& text) {
  if (text.rfind("measure:", 0) == 0) return {{"kind", "measure"}, {"eta", std::stod(text.substr(8))}};
  return {{"kind", text}};
}

std::vector<harness::Format> formats_of(const std::string& f) {
  if (f == "csv") return {harness::Format::Csv};
  if (f == "json") return {harness::Format::Json};
  return {harness::Format::Csv, harness::Format::Json};
}

int cmd_run(const std::string& path, const std::string& output, const std::string& format, bool force, int threads) {
  const harness::Scenario s = harness::load_scenario(path);
  const harness::RunRecord record = harness::run(s, {threads});
  const std::string prefix = output.empty() ? s.output : output;
  for (const auto& p : harness::emit(record, prefix, formats_of(format), force)) std::cout << p.string() << "\n";
  std::cout << "scenario " << record.scenario_hash << " (" << record.label << "): " << record.reports.size()
            << " reports\n";
  return 0;
}

struct SweepArgs {
  long long dim = 8;
  std::uint64_t seed = 42;
  std::string scheme = "trotter_plain";
  std::string f = "exp";
  std::string g = "exp";
  int k = 1;
  long long n_max = 256;
  double T = 1;
  std::string metric = "l2";
  long long zeno_rank = 0;
  std::string output;
  std::string format = "both";
  bool force = false;
  int threads = 1;
};

int cmd_sweep(const SweepArgs& a) {
  json scheme = {{"variant", a.scheme}};
  if (a.scheme == "kato_product" || a.scheme == "kato_symmetrized" || a.scheme == "cachia_average") {
    scheme["f"] = function_descriptor(a.f);
    scheme["g"] = function_descriptor(a.g);
  } else if (a.scheme == "lapidus_resolvent") {
    scheme["k"] = a.k;
  }
  json source = {{"kind", "random_psd"}, {"dim", a.dim}, {"seed", a.seed}, {"spectral_scale", 1.0}};
  if (a.zeno_rank > 0) source["zeno_rank"] = a.zeno_rank;
  json ns = json::array();
  for (long long n = 1; n <= a.n_max; n *= 2) ns.push_back(n);
  const json j = {{"schema", harness::kSchemaVersion},
                  {"operator_source", source},
                  {"schemes", {scheme}},
                  {"n_values", ns},
                  {"T", a.T},
                  {"h", {{"kind", "basis"}, {"index", 0}}},
                  {"metrics", {metric_descriptor(a.metric)}},
                  {"output", a.output.empty() ? "sweep" : a.output}};
  const harness::Scenario s = harness::scenario_from_json(j);
  const harness::RunRecord record = harness::run(s, {a.threads});
  if (a.output.empty()) {
    std::cout << harness::to_csv(record);
  } else {
    for (const auto& p : harness::emit(record, a.output, formats_of(a.format), a.force))
      std::cout << p.string() << "\n";
  }
  return 0;
}

int cmd_kato_check(const std::string& path) {
  const kato::KatoFunction f = kato::kato_function_from_json(read_json(path), path);
  const kato::AxiomReport report = kato::check_kato_axioms(f);
  std::cout << f.name() << (f.params().empty() ? "" : "(" + f.params() + ")") << "\n";
  for (const auto& r : report.results) {
    std::cout << "  " << kato::axiom_name(r.axiom) << ": " << (r.passed ? "pass" : "FAIL") << "  ("
              << (r.detail.empty() ? "measured " + shortest(r.measured) : r.detail) << ")\n";
  }
  return report.all_passed() ? 0 : 1;
}

int cmd_kato_build(const std::string& path) {
  const json j = read_json(path);
  kato::CanonicalInput in = kato::parse_canonical_input(j, path);
  if (in.forced_alpha) throw Error(Errc::ConfigParse, path + ": kato-build derives alpha; remove the \"alpha\" field");
  const kato::CanonicalKato c = kato::build_canonical(in.zeros, in.measure);
  std::cout << "alpha  " << g17(c.alpha()) << "\n"
            << "kappa  " << g17(c.kappa()) << "\n"
            << "beta   " << g17(c.beta()) << "\n"
            << "budget " << g17(c.budget()) << "\n";
  const kato::AxiomReport report = kato::check_kato_axioms(kato::KatoFunction::canonical(c));
  const auto& d = report.at(kato::Axiom::HalfPlaneBound);
  std::cout << "half-plane bound " << (d.passed ? "pass" : "FAIL") << " (max |f| " << shortest(d.measured) << ")\n";
  return report.all_passed() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Product-formula convergence lab for unitary groups"};
  app.require_subcommand(1);

  std::string scenario_path, run_output, run_format = "both";
  bool run_force = false;
  int run_threads = 1;
  auto* run = app.add_subcommand("run", "Run a JSON scenario and write its reports");
  run->add_option("scenario", scenario_path, "Scenario file")->required();
  run->add_option("--output", run_output, "Output prefix (defaults to the scenario's)");
  run->add_option("--format", run_format, "csv, json or both")->check(CLI::IsMember({"csv", "json", "both"}));
  run->add_flag("--force", run_force, "Overwrite existing reports");
  run->add_option("--threads", run_threads, "Worker threads")->check(CLI::Range(1, 256));

  SweepArgs sweep_args;
  auto* sweep = app.add_subcommand("sweep", "Sweep one scheme over n = 1, 2, 4, ... on a random pair");
  sweep->add_option("--dim", sweep_args.dim, "Matrix dimension")->check(CLI::Range(1, 512));
  sweep->add_option("--seed", sweep_args.seed, "Seed for A and B");
  sweep->add_option("--scheme", sweep_args.scheme, "Scheme variant");
  sweep->add_option("--f", sweep_args.f, "Kato function f (e.g. exp, resolvent_power:2)");
  sweep->add_option("--g", sweep_args.g, "Kato function g");
  sweep->add_option("--k", sweep_args.k, "Lapidus resolvent power")->check(CLI::Range(1, 1000000));
  sweep->add_option("--n-max", sweep_args.n_max, "Largest n")->check(CLI::Range(1LL, 1LL << 40));
  sweep->add_option("--T", sweep_args.T, "Time horizon")->check(CLI::PositiveNumber);
  sweep->add_option("--metric", sweep_args.metric, "l2, sup, operator_l2 or measure:eta");
  sweep->add_option("--zeno-rank", sweep_args.zeno_rank, "Coordinate projection rank for zeno");
  sweep->add_option("--output", sweep_args.output, "Write reports to this prefix instead of stdout");
  sweep->add_option("--format", sweep_args.format, "csv, json or both")->check(CLI::IsMember({"csv", "json", "both"}));
  sweep->add_flag("--force", sweep_args.force, "Overwrite existing reports");
  sweep->add_option("--threads", sweep_args.threads, "Worker threads")->check(CLI::Range(1, 256));

  std::string function_path;
  auto* check = app.add_subcommand("kato-check", "Check the Kato axioms for a function descriptor");
  check->add_option("function", function_path, "Function JSON")->required();

  std::string measure_path;
  auto* build = app.add_subcommand("kato-build", "Build the canonical form from zeros and a measure");
  build->add_option("input", measure_path, "Zeros + measure JSON")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (*run) return cmd_run(scenario_path, run_output, run_format, run_force, run_threads);
    if (*sweep) return cmd_sweep(sweep_args);
    if (*check) return cmd_kato_check(function_path);
    if (*build) return cmd_kato_build(measure_path);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.code() == Errc::IoError ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
