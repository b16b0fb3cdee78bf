#include "pairmatch/cli.hpp"

#include "pairmatch/errors.hpp"
#include "pairmatch/io.hpp"
#include "pairmatch/simlab.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <ostream>
#include <random>
#include <sstream>
#include <thread>

namespace pairmatch::cli {

namespace {

std::uint64_t parse_seed_text(const std::string& text, const char* source) {
  std::size_t used = 0;
  unsigned long long v = 0;
  try {
    v = std::stoull(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size() || text.front() == '-') {
    throw UsageError(std::string(source) + " must be an unsigned 64-bit integer (got '" + text + "')");
  }
  return v;
}

DistanceMatrix random_weights(std::size_t n, CounterRng& rng, bool integer_ties) {
  const auto size = static_cast<Eigen::Index>(n);
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(size, size);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> small(0, 4);
  for (Eigen::Index i = 0; i < size; ++i) {
    for (Eigen::Index j = i + 1; j < size; ++j) {
      w(i, j) = w(j, i) = integer_ties ? static_cast<double>(small(rng)) : unit(rng);
    }
  }
  return DistanceMatrix(std::move(w));
}

void ensure_directory(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw UsageError("cannot create output directory '" + dir.string() + "'");
}

}  // namespace

std::uint64_t resolve_seed(const RunConfig& config, std::uint64_t fallback) {
  if (config.seed) return *config.seed;
  if (const char* env = std::getenv("PAIRMATCH_SEED"); env != nullptr && *env != '\0') {
    return parse_seed_text(env, "PAIRMATCH_SEED");
  }
  return fallback;
}

int cmd_match(const RunConfig& config, std::ostream& out) {
  const UnitTable table = read_unit_csv(config.input);
  const CovarianceModel cov = estimate_covariance(table, config.ridge.value_or(0.0));
  const DistanceMatrix d = mahalanobis_matrix(table, cov, config.distance_form.value_or(kDefaultDistanceForm));
  const SelectionProblem problem(d, config.m);
  CounterRng rng(resolve_seed(config, kDefaultScenarioSeed), 0);
  const PairSet pairs = select(problem, config.method, rng);

  std::ostringstream summary;
  summary << "method,total_distance,m,N\n"
          << to_string(pairs.method) << ',' << format_real(pairs.total_distance) << ',' << config.m << ','
          << table.size() << '\n';

  if (config.out_dir.empty()) {
    write_pair_csv(out, pairs, d, table.ids(), true);
    return kSuccess;
  }
  ensure_directory(config.out_dir);
  std::ostringstream pair_csv;
  write_pair_csv(pair_csv, pairs, d, table.ids(), false);
  write_file_atomic(config.out_dir / "pairs.csv", pair_csv.str());
  write_file_atomic(config.out_dir / "summary.csv", summary.str());
  out << summary.str();
  return kSuccess;
}

int cmd_simulate(const RunConfig& config, std::ostream& out) {
  std::vector<ScenarioSpec> specs;
  if (!config.scenario.empty() && !config.scenario_file.empty()) {
    throw UsageError("pass either --scenario or --scenario-file, not both");
  }
  if (!config.scenario.empty()) {
    specs.push_back(builtin_scenario(config.scenario));
  } else if (!config.scenario_file.empty()) {
    std::ifstream in(config.scenario_file);
    if (!in) throw UsageError("cannot open '" + config.scenario_file.string() + "'");
    specs = parse_scenario_file(in);
  } else {
    throw UsageError("simulate needs --scenario or --scenario-file");
  }
  if (config.workers < 1) throw UsageError("--workers must be at least 1");

  for (auto& spec : specs) {
    if (config.reps) spec.reps = *config.reps;
    spec.seed = resolve_seed(config, spec.seed);
    if (config.distance_form) spec.distance_form = *config.distance_form;
    if (config.ridge) spec.ridge = *config.ridge;
    validate(spec);
  }

  ensure_directory(config.out_dir);
  std::ostringstream summary;
  write_summary_header(summary);
  for (const auto& spec : specs) {
    const ScenarioResult result = run_scenario(spec, config.workers);
    std::ostringstream raw;
    write_raw_ratios(raw, result);
    write_file_atomic(config.out_dir / (spec.name + "_ratios.csv"), raw.str());
    std::ostringstream hist;
    write_histograms(hist, result);
    write_file_atomic(config.out_dir / (spec.name + "_histogram.csv"), hist.str());
    write_summary_rows(summary, result);
  }
  write_file_atomic(config.out_dir / "summary.csv", summary.str());
  out << summary.str();
  return kSuccess;
}

int cmd_oracle(const RunConfig& config, std::ostream& out) {
  if (config.oracle_nodes > kMatchingOracleLimit) {
    throw TooLarge("matching oracle supports at most " + std::to_string(kMatchingOracleLimit) + " nodes");
  }
  if (config.oracle_units > kSelectionOracleLimit) {
    throw TooLarge("selection oracle supports at most " + std::to_string(kSelectionOracleLimit) + " units");
  }
  if (config.oracle_nodes < 2 || config.oracle_nodes % 2 != 0) throw UsageError("--nodes must be even and >= 2");
  if (config.oracle_pairs < 1 || 2 * config.oracle_pairs > config.oracle_units) {
    throw UsageError("--pairs must satisfy 1 <= m and 2m <= --units");
  }
  const std::uint64_t seed = resolve_seed(config, kDefaultScenarioSeed);

  std::size_t matching_ok = 0;
  std::size_t selection_ok = 0;
  for (std::size_t t = 0; t < config.trials; ++t) {
    CounterRng rng(seed, 2 * t);
    const DistanceMatrix d = random_weights(config.oracle_nodes, rng, t % 3 == 2);
    if (min_weight_perfect_matching(d).total_weight == enumerate_matchings_oracle(d).total_weight) ++matching_ok;
  }
  for (std::size_t t = 0; t < config.trials; ++t) {
    CounterRng rng(seed, 2 * t + 1);
    const DistanceMatrix d = random_weights(config.oracle_units, rng, t % 3 == 2);
    const SelectionProblem problem(d, config.oracle_pairs);
    if (select_optimal(problem).total_distance == exhaustive_selection_oracle(problem).total_distance) ++selection_ok;
  }

  out << "matching n=" << config.oracle_nodes << ": " << matching_ok << "/" << config.trials << " agree\n";
  out << "selection N=" << config.oracle_units << " m=" << config.oracle_pairs << ": " << selection_ok << "/"
      << config.trials << " agree\n";
  const bool pass = matching_ok == config.trials && selection_ok == config.trials;
  out << (pass ? "PASS" : "FAIL") << '\n';
  return pass ? kSuccess : kOracleMismatch;
}

int cmd_solve(const RunConfig& config, std::ostream& out) {
  const DistanceMatrix d = read_matrix_csv(config.input);
  write_matching_csv(out, min_weight_perfect_matching(d), d);
  return kSuccess;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  RunConfig config;
  std::string method = "optimal";
  std::string form;
  std::string seed_text;
  double ridge = 0.0;
  std::size_t reps = 0;

  CLI::App app{"Select matched pairs of clusters and compare selection methods by simulation"};
  app.require_subcommand(1);

  auto* match = app.add_subcommand("match", "Choose m matched pairs from a unit CSV");
  match->add_option("--input", config.input, "Unit CSV (header id,<covariates...>)")->required();
  match->add_option("--m", config.m, "Number of pairs to select")->required();
  match->add_option("--method", method, "optimal, greedy, ranking or random")
      ->check(CLI::IsMember({"optimal", "greedy", "ranking", "random"}));
  match->add_option("--seed", seed_text, "Seed for the random method");
  match->add_option("--distance-form", form, "root or squared")->check(CLI::IsMember({"root", "squared"}));
  match->add_option("--ridge", ridge, "Added to the covariance diagonal before inversion");
  match->add_option("--out", config.out_dir, "Output directory (pairs.csv, summary.csv)");

  auto* simulate = app.add_subcommand("simulate", "Run a Monte Carlo scenario");
  simulate->add_option("--scenario", config.scenario, "Builtin scenario name");
  simulate->add_option("--scenario-file", config.scenario_file, "Scenario definition file");
  simulate->add_option("--reps", reps, "Override the replication count");
  simulate->add_option("--seed", seed_text, "Override the scenario seed");
  simulate->add_option("--workers", config.workers, "Worker threads")->default_val(std::max(1u, std::thread::hardware_concurrency()));
  simulate->add_option("--distance-form", form, "root or squared")->check(CLI::IsMember({"root", "squared"}));
  simulate->add_option("--ridge", ridge, "Override the covariance ridge");
  simulate->add_option("--out", config.out_dir, "Output directory")->required();

  auto* oracle = app.add_subcommand("oracle", "Cross-check the solver against brute-force enumeration");
  oracle->add_option("--trials", config.trials, "Random instances per check")->default_val(500);
  oracle->add_option("--seed", seed_text, "Seed for the random instances");
  oracle->add_option("--nodes", config.oracle_nodes, "Node count for the matching check (<= 12)")->default_val(8);
  oracle->add_option("--units", config.oracle_units, "Unit count N for the selection check (<= 10)")->default_val(8);
  oracle->add_option("--pairs", config.oracle_pairs, "Pair count m for the selection check")->default_val(2);

  auto* solve = app.add_subcommand("solve", "Minimum-weight perfect matching of a weight-matrix CSV");
  solve->add_option("--matrix", config.input, "Square weight matrix CSV, no header")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kSuccess : kUsageError;
  }

  try {
    if (!seed_text.empty()) config.seed = parse_seed_text(seed_text, "--seed");
    if (!form.empty()) config.distance_form = parse_distance_form(form);
    config.method = parse_method(method);

    if (match->parsed()) {
      config.command = Command::match;
      if (match->count("--ridge") != 0) config.ridge = ridge;
      return cmd_match(config, out);
    }
    if (simulate->parsed()) {
      config.command = Command::simulate;
      if (simulate->count("--reps") != 0) config.reps = reps;
      if (simulate->count("--ridge") != 0) config.ridge = ridge;
      return cmd_simulate(config, out);
    }
    if (oracle->parsed()) {
      config.command = Command::oracle;
      return cmd_oracle(config, out);
    }
    config.command = Command::solve;
    return cmd_solve(config, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const SingularCovariance& e) {
    err << "error: " << e.what() << " (for example --ridge 1e-8)\n";
    return kNumericalError;
  } catch (const NumericalError& e) {
    err << "error: " << e.what() << '\n';
    return kNumericalError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kNumericalError;
  }
}

}  // namespace pairmatch::cli
