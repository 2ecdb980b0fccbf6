#include "fdpo/experiments.hpp"

#include "fdpo/dataset.hpp"
#include "fdpo/parallel.hpp"
#include "fdpo/rng.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace fdpo {

namespace {

bool is_reference(std::string_view name) { return name == "uniform" || name == "behavior" || name == "optimal"; }

std::string format_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

struct TrialContext {
  const TabularMdp& mdp;
  const TabularPolicy& optimal;
  double optimal_return;
};

ResultRow make_row(const ExperimentConfig& config, std::size_t trial, std::uint64_t seed, const AlgorithmSpec& spec,
                   double sweep_value, double mean_return, double optimal_return) {
  return {std::string(experiment_name(config.kind)), trial, seed, algorithm_label(spec), sweep_value, mean_return,
          optimal_return, optimal_return - mean_return};
}

TabularPolicy run_algorithm(const AlgorithmSpec& spec, const EmpiricalModel& model, const TabularPolicy& behavior,
                            const TrialContext& ctx) {
  if (spec.name == "uniform") return TabularPolicy::uniform(ctx.mdp.n_states(), ctx.mdp.n_actions());
  if (spec.name == "behavior") return behavior;
  if (spec.name == "optimal") return ctx.optimal;
  return solve(model, spec.config).policy;
}

std::vector<ResultRow> gridworld_trial(const ExperimentConfig& config, std::size_t trial) {
  const std::uint64_t seed = trial_seed(config.master_seed, trial);
  const TabularMdp mdp = generate_gridworld(seed);
  const TabularPolicy optimal = policy_iteration(mdp);
  const TrialContext ctx{mdp, optimal, expected_return(mdp, optimal)};

  std::vector<ResultRow> rows;
  rows.reserve(config.grid.size() * config.algorithms.size());
  std::optional<TabularPolicy> fixed_behavior;
  std::optional<DataDistribution> fixed_phi;
  for (std::size_t k = 0; k < config.grid.size(); ++k) {
    const double value = config.grid[k];
    const bool exploration = config.kind == ExperimentKind::exploration;
    const double epsilon = exploration ? value : config.epsilon;
    const auto d = exploration ? config.dataset_size : static_cast<std::size_t>(std::llround(value));
    if (exploration || !fixed_behavior) {
      fixed_behavior.emplace(epsilon_greedy_behavior(optimal, epsilon));
      fixed_phi.emplace(stationary_data_distribution(mdp, *fixed_behavior, config.data_horizon));
    }
    const std::uint64_t stream = derive_seed(seed, k + 1);
    const TransitionDataset data = collect(mdp, *fixed_phi, d, derive_seed(stream, 0));
    const EmpiricalModel model = build_empirical_model(data, mdp, derive_seed(stream, 1));
    for (const auto& spec : config.algorithms) {
      const TabularPolicy pi = run_algorithm(spec, model, *fixed_behavior, ctx);
      rows.push_back(make_row(config, trial, seed, spec, value, expected_return(mdp, pi), ctx.optimal_return));
    }
  }
  return rows;
}

std::vector<ResultRow> bandit_trial(const ExperimentConfig& config, std::size_t trial) {
  const std::uint64_t seed = trial_seed(config.master_seed, trial);
  const TabularMdp mdp = bandit_mdp();
  const TabularPolicy optimal = policy_iteration(mdp);
  const TrialContext ctx{mdp, optimal, expected_return(mdp, optimal)};
  const TransitionDataset data = collect_with_counts(mdp, bandit_counts(), derive_seed(seed, 1));
  const EmpiricalModel model = build_empirical_model(data, mdp, derive_seed(seed, 2));
  const TabularPolicy& behavior = model.empirical_policy();

  std::vector<ResultRow> rows;
  for (const auto& spec : config.algorithms) {
    const TabularPolicy pi = run_algorithm(spec, model, behavior, ctx);
    Eigen::Index arm = 0;
    pi.probs().row(0).maxCoeff(&arm);
    rows.push_back(make_row(config, trial, seed, spec, static_cast<double>(arm), expected_return(mdp, pi),
                            ctx.optimal_return));
  }
  return rows;
}

std::vector<ResultRow> merge(const ExperimentConfig& config, const std::vector<std::vector<ResultRow>>& per_trial) {
  const std::size_t n_alg = config.algorithms.size();
  const std::size_t n_sweep = config.kind == ExperimentKind::bandit ? 1 : config.grid.size();
  std::vector<ResultRow> rows;
  rows.reserve(n_alg * n_sweep * per_trial.size());
  for (std::size_t k = 0; k < n_sweep; ++k) {
    for (const auto& trial_rows : per_trial) {
      for (std::size_t a = 0; a < n_alg; ++a) rows.push_back(trial_rows[k * n_alg + a]);
    }
  }
  return rows;
}

}  // namespace

std::string_view experiment_name(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::exploration:
      return "exploration";
    case ExperimentKind::size:
      return "size";
    case ExperimentKind::bandit:
      return "bandit";
  }
  return "unknown";
}

ExperimentKind parse_experiment(std::string_view name) {
  if (name == "exploration") return ExperimentKind::exploration;
  if (name == "size") return ExperimentKind::size;
  if (name == "bandit") return ExperimentKind::bandit;
  throw std::invalid_argument("unknown experiment: " + std::string(name));
}

std::string algorithm_label(const AlgorithmSpec& spec) {
  if (is_reference(spec.name)) return spec.name;
  switch (spec.config.family) {
    case Family::imitation:
      return "imitation";
    case Family::naive:
      return "naive";
    case Family::ua_pessimistic:
      return "ua";
    case Family::proximal_pessimistic:
      return "proximal";
  }
  return spec.name;
}

AlgorithmSpec make_algorithm(std::string_view label, double alpha, double delta, PenaltyScale scale) {
  AlgorithmSpec spec;
  spec.name = std::string(label);
  if (is_reference(label)) return spec;
  spec.config.family = parse_family(label);
  spec.config.alpha = spec.config.family == Family::ua_pessimistic ||
                              spec.config.family == Family::proximal_pessimistic
                          ? alpha
                          : 0.0;
  spec.config.uncertainty = UncertaintySpec{UncertaintyKind::hoeffding_sa, delta, {}};
  spec.config.penalty_scale = scale;
  spec.config.validate();
  spec.name = algorithm_label(spec);
  return spec;
}

void ExperimentConfig::validate() const {
  if (trials < 1) throw std::invalid_argument("experiment: trials must be >= 1");
  if (jobs < 1) throw std::invalid_argument("experiment: jobs must be >= 1");
  if (algorithms.empty()) throw std::invalid_argument("experiment: algorithm list is empty");
  for (const auto& spec : algorithms) {
    if (!is_reference(spec.name)) spec.config.validate();
  }
  if (kind == ExperimentKind::bandit) return;
  if (grid.empty()) throw std::invalid_argument("experiment: sweep grid is empty");
  for (double v : grid) {
    if (kind == ExperimentKind::exploration && !(v >= 0.0 && v <= 1.0)) {
      throw std::invalid_argument("experiment: epsilon values must lie in [0, 1]");
    }
    if (kind == ExperimentKind::size && !(v >= 0.0 && v == std::floor(v))) {
      throw std::invalid_argument("experiment: dataset sizes must be non-negative integers");
    }
  }
  if (data_horizon < 1) throw std::invalid_argument("experiment: data horizon must be >= 1");
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw std::invalid_argument("experiment: epsilon must lie in [0, 1]");
}

std::vector<double> default_epsilon_grid() { return {0.0, 0.125, 0.25, 0.375, 0.5, 0.625, 0.75, 0.875, 1.0}; }

std::vector<double> default_size_grid() { return {1, 10, 100, 1000, 2000, 10000, 100000, 200000}; }

ExperimentConfig default_experiment(ExperimentKind kind, std::size_t trials, std::uint64_t master_seed,
                                    double delta) {
  ExperimentConfig config;
  config.kind = kind;
  config.trials = trials;
  config.master_seed = master_seed;
  if (kind == ExperimentKind::bandit) {
    for (const char* name : {"naive", "ua"}) {
      config.algorithms.push_back(make_algorithm(name, 1.0, delta, PenaltyScale::literal));
    }
    return config;
  }
  for (const char* name : {"imitation", "naive", "ua", "proximal"}) {
    config.algorithms.push_back(make_algorithm(name, 1.0, delta, PenaltyScale::absorbed));
  }
  config.grid = kind == ExperimentKind::exploration ? default_epsilon_grid() : default_size_grid();
  return config;
}

std::uint64_t trial_seed(std::uint64_t master_seed, std::size_t trial) { return derive_seed(master_seed, trial); }

std::vector<ResultRow> run_trial(const ExperimentConfig& config, std::size_t trial) {
  return config.kind == ExperimentKind::bandit ? bandit_trial(config, trial) : gridworld_trial(config, trial);
}

std::vector<ResultRow> run_experiment(const ExperimentConfig& config) {
  config.validate();
  return merge(config, map_trials_parallel(config.trials, config.jobs,
                                           [&](std::size_t t) { return run_trial(config, t); }));
}

std::vector<ResultRow> run_experiment_serial(const ExperimentConfig& config) {
  config.validate();
  return merge(config, map_trials_serial(config.trials, [&](std::size_t t) { return run_trial(config, t); }));
}

std::vector<ResultRow> run_exploration_sweep(const ExperimentConfig& config) {
  if (config.kind != ExperimentKind::exploration) throw std::invalid_argument("run_exploration_sweep: wrong kind");
  return run_experiment(config);
}

std::vector<ResultRow> run_size_sweep(const ExperimentConfig& config) {
  if (config.kind != ExperimentKind::size) throw std::invalid_argument("run_size_sweep: wrong kind");
  return run_experiment(config);
}

std::vector<ResultRow> run_bandit_demo(const ExperimentConfig& config) {
  if (config.kind != ExperimentKind::bandit) throw std::invalid_argument("run_bandit_demo: wrong kind");
  return run_experiment(config);
}

void write_results_csv(std::ostream& out, const std::vector<ResultRow>& rows) {
  out << kResultCsvHeader << '\n';
  for (const auto& r : rows) {
    out << r.experiment << ',' << r.trial << ',' << r.seed << ',' << r.algorithm << ',' << format_double(r.sweep_value)
        << ',' << format_double(r.mean_return) << ',' << format_double(r.optimal_return) << ','
        << format_double(r.suboptimality) << '\n';
  }
}

std::vector<ResultRow> read_results_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kResultCsvHeader) throw std::invalid_argument("results csv: bad header");
  std::vector<ResultRow> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::string cell[8];
    for (auto& c : cell) {
      if (!std::getline(fields, c, ',')) {
        throw std::invalid_argument("results csv: line " + std::to_string(line_no) + " has too few fields");
      }
    }
    try {
      rows.push_back({cell[0], std::stoull(cell[1]), std::stoull(cell[2]), cell[3], std::stod(cell[4]),
                      std::stod(cell[5]), std::stod(cell[6]), std::stod(cell[7])});
    } catch (const std::exception&) {
      throw std::invalid_argument("results csv: invalid record on line " + std::to_string(line_no));
    }
  }
  return rows;
}

}  // namespace fdpo
