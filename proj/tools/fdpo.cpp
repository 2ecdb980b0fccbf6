// Command-line front end: MDP generation, dataset collection, solving,
// experiment sweeps and numerical verification.

#include "fdpo/algorithms.hpp"
#include "fdpo/dataset.hpp"
#include "fdpo/experiments.hpp"
#include "fdpo/rng.hpp"
#include "fdpo/serialization.hpp"
#include "fdpo/summary.hpp"
#include "fdpo/verification.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

namespace {

using namespace fdpo;

std::map<std::string, double> parse_alphas(const std::string& text) {
  std::map<std::string, double> out;
  if (text.empty()) return out;
  std::istringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) {
      out["*"] = std::stod(item);
    } else {
      out[item.substr(0, eq)] = std::stod(item.substr(eq + 1));
    }
  }
  return out;
}

std::vector<std::string> split_names(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

void print_check(const CheckResult& r) {
  std::printf("%s: %s (trials=%zu failures=%zu worst=%.3e)\n", r.name.c_str(), r.passed ? "PASS" : "FAIL", r.trials,
              r.failures, r.worst);
}

int run_verify(const std::string& target, std::size_t trials, double delta, std::uint64_t seed, int jobs) {
  if (target == "theorem1") {
    const CheckResult r = verify_theorem1(trials, seed);
    print_check(r);
    const BoundReport tight = tight_proxy_instance_report();
    std::printf("tight instance: lhs=%.17g rhs=%.17g\n", tight.lhs, tight.rhs);
    return r.passed ? 0 : 1;
  }
  if (target == "lemma3") {
    const CheckResult r = verify_residual_visitation(trials, seed);
    print_check(r);
    return r.passed ? 0 : 1;
  }
  if (target == "identities") {
    bool ok = true;
    for (const auto& r : {verify_residual_visitation(trials, seed), verify_ua_decomposition(trials, seed),
                          verify_relative_uncertainty(trials, seed), verify_conversion_inequality(trials, seed)}) {
      print_check(r);
      ok = ok && r.passed;
    }
    return ok ? 0 : 1;
  }
  EnsembleConfig config;
  config.draws = trials;
  config.delta = delta;
  config.seed = seed;
  config.jobs = jobs;
  const EnsembleSummary s = run_coverage_ensemble(config);
  const double need = 1.0 - delta;
  bool ok = false;
  if (target == "coverage") {
    std::printf("bellman=%.4f lemma=%.4f lower_bound=%.4f (need >= %.4f)\n", s.bellman_frequency, s.lemma_frequency,
                s.lower_bound_frequency, need);
    ok = s.bellman_frequency >= need && s.lemma_frequency >= need && s.lower_bound_frequency >= need;
  } else if (target == "theorem2") {
    std::printf("theorem2 holds frequency=%.4f (need >= %.4f) mean rhs=%.6g\n", s.theorem2_frequency, need,
                s.mean_naive_rhs);
    ok = s.theorem2_frequency >= need;
  } else if (target == "theorem3") {
    std::printf("theorem3 holds frequency=%.4f (need >= %.4f) mean rhs=%.6g alpha0 diff=%.3e alpha1 sup zero=%s\n",
                s.theorem3_frequency, need, s.mean_ua_rhs, s.alpha_zero_difference,
                s.alpha_one_sup_zero ? "yes" : "no");
    ok = s.theorem3_frequency >= need && s.alpha_zero_difference <= 1e-9 && s.alpha_one_sup_zero;
  } else if (target == "theorem4") {
    std::printf("theorem4 holds frequency=%.4f (need >= %.4f)\n", s.theorem4_frequency, need);
    ok = s.theorem4_frequency >= need;
  } else {
    throw std::invalid_argument("unknown verify target: " + target);
  }
  std::printf("%s\n", ok ? "PASS" : "FAIL");
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tabular fixed-dataset policy optimization toolkit"};
  app.require_subcommand(1);

  auto* gen = app.add_subcommand("gen-mdp", "Write an MDP as JSON");
  std::uint64_t gen_seed = 0;
  std::string gen_out, gen_kind = "gridworld";
  std::size_t gen_states = 4, gen_actions = 2;
  double gen_discount = 0.9;
  gen->add_option("--seed", gen_seed, "Generator seed")->required();
  gen->add_option("--out", gen_out, "Output path")->required();
  gen->add_option("--kind", gen_kind, "gridworld, random or bandit")
      ->check(CLI::IsMember({"gridworld", "random", "bandit"}));
  gen->add_option("--states", gen_states, "State count (random)");
  gen->add_option("--actions", gen_actions, "Action count (random)");
  gen->add_option("--discount", gen_discount, "Discount (random)");

  auto* col = app.add_subcommand("collect", "Sample a dataset from an MDP under an epsilon-greedy behavior policy");
  std::string col_mdp, col_out;
  std::size_t col_size = 2000;
  double col_eps = 0.5;
  std::uint64_t col_seed = 0;
  col->add_option("--mdp", col_mdp, "MDP JSON")->required();
  col->add_option("--size", col_size, "Number of transitions");
  col->add_option("--epsilon", col_eps, "Behavior epsilon around the optimal policy")->check(CLI::Range(0.0, 1.0));
  col->add_option("--seed", col_seed, "Sampling seed");
  col->add_option("--out", col_out, "Output CSV")->required();

  auto* sol = app.add_subcommand("solve", "Run one algorithm on a dataset and write the policy");
  std::string sol_mdp, sol_data, sol_family = "naive", sol_out, sol_scale = "literal";
  double sol_alpha = 1.0, sol_delta = 0.1;
  std::uint64_t sol_fill = 0;
  sol->add_option("--mdp", sol_mdp, "MDP JSON supplying the shape, discount and start distribution")->required();
  sol->add_option("--data", sol_data, "Dataset CSV")->required();
  sol->add_option("--family", sol_family, "imitation, naive, ua or proximal")
      ->check(CLI::IsMember({"imitation", "naive", "ua", "proximal", "ua_pessimistic", "proximal_pessimistic"}));
  sol->add_option("--alpha", sol_alpha, "Pessimism in [0, 1]")->check(CLI::Range(0.0, 1.0));
  sol->add_option("--delta", sol_delta, "Failure probability")->check(CLI::Range(0.0, 1.0));
  sol->add_option("--penalty-scale", sol_scale, "literal or absorbed")->check(CLI::IsMember({"literal", "absorbed"}));
  sol->add_option("--fill-seed", sol_fill, "Seed for unseen-pair reward fill");
  sol->add_option("--out", sol_out, "Output policy JSON")->required();

  auto* exp = app.add_subcommand("experiment", "Run a seeded experiment sweep and write result rows");
  std::string exp_kind, exp_out, exp_plot, exp_alphas, exp_algs, exp_scale, exp_grid;
  std::size_t exp_trials = 10, exp_dsize = 2000, exp_horizon = 1000;
  std::uint64_t exp_seed = 0;
  double exp_delta = 0.1, exp_eps = 0.5;
  int exp_jobs = 1;
  exp->add_option("kind", exp_kind, "exploration, size or bandit")
      ->required()
      ->check(CLI::IsMember({"exploration", "size", "bandit"}));
  exp->add_option("--trials", exp_trials, "Trials")->check(CLI::PositiveNumber);
  exp->add_option("--master-seed", exp_seed, "Master seed");
  exp->add_option("--alphas", exp_alphas, "Per-algorithm alpha, e.g. ua=1,proximal=0.5, or one value for all");
  exp->add_option("--delta", exp_delta, "Failure probability")->check(CLI::Range(0.0, 1.0));
  exp->add_option("--jobs", exp_jobs, "Worker threads")->check(CLI::PositiveNumber);
  exp->add_option("--out", exp_out, "Output CSV")->required();
  exp->add_option("--plot", exp_plot, "Optional SVG summary plot");
  exp->add_option("--algorithms", exp_algs,
                  "Comma-separated: imitation, naive, ua, proximal, uniform, behavior, optimal");
  exp->add_option("--penalty-scale", exp_scale, "literal or absorbed")->check(CLI::IsMember({"literal", "absorbed"}));
  exp->add_option("--grid", exp_grid, "Comma-separated epsilons (exploration) or sizes (size)");
  exp->add_option("--dataset-size", exp_dsize, "Transitions per dataset (exploration)");
  exp->add_option("--data-horizon", exp_horizon, "Cesaro horizon of the data distribution")->check(CLI::PositiveNumber);
  exp->add_option("--epsilon", exp_eps, "Behavior epsilon (size)")->check(CLI::Range(0.0, 1.0));

  auto* ver = app.add_subcommand("verify", "Check a bound or identity numerically; exit status 1 on failure");
  std::string ver_target;
  std::size_t ver_trials = 500;
  double ver_delta = 0.1;
  std::uint64_t ver_seed = 0;
  int ver_jobs = 1;
  ver->add_option("target", ver_target, "theorem1, lemma3, theorem2, theorem3, theorem4, identities or coverage")
      ->required()
      ->check(CLI::IsMember({"theorem1", "lemma3", "theorem2", "theorem3", "theorem4", "identities", "coverage"}));
  ver->add_option("--trials", ver_trials, "Random instances or ensemble draws")->check(CLI::PositiveNumber);
  ver->add_option("--delta", ver_delta, "Failure probability")->check(CLI::Range(0.0, 1.0));
  ver->add_option("--seed", ver_seed, "Seed");
  ver->add_option("--jobs", ver_jobs, "Worker threads")->check(CLI::PositiveNumber);

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) {
      TabularMdp mdp = [&] {
        if (gen_kind == "bandit") return bandit_mdp();
        if (gen_kind == "random") {
          Rng rng(gen_seed);
          return random_mdp(gen_states, gen_actions, gen_discount, rng);
        }
        return generate_gridworld(gen_seed);
      }();
      write_json_file(gen_out, mdp_to_json(mdp));
      return 0;
    }
    if (col->parsed()) {
      const TabularMdp mdp = mdp_from_json(read_json_file(col_mdp));
      const TabularPolicy behavior = epsilon_greedy_behavior(policy_iteration(mdp), col_eps);
      const TransitionDataset data = collect(mdp, stationary_data_distribution(mdp, behavior), col_size, col_seed);
      std::ofstream out(col_out);
      if (!out) throw std::runtime_error("cannot open " + col_out);
      write_dataset_csv(out, data);
      return 0;
    }
    if (sol->parsed()) {
      const TabularMdp mdp = mdp_from_json(read_json_file(sol_mdp));
      std::ifstream in(sol_data);
      if (!in) throw std::runtime_error("cannot open " + sol_data);
      const TransitionDataset data = read_dataset_csv(in, mdp.n_states(), mdp.n_actions());
      const EmpiricalModel model = build_empirical_model(data, mdp, sol_fill);
      AlgorithmConfig config;
      config.family = parse_family(sol_family);
      config.alpha = sol_alpha;
      config.uncertainty = UncertaintySpec{UncertaintyKind::hoeffding_sa, sol_delta, {}};
      config.penalty_scale = parse_penalty_scale(sol_scale);
      const AlgorithmResult result = solve(model, config);
      Json doc = policy_to_json(result.policy);
      doc["config"] = algorithm_config_to_json(config);
      write_json_file(sol_out, doc);
      return 0;
    }
    if (exp->parsed()) {
      const ExperimentKind kind = parse_experiment(exp_kind);
      ExperimentConfig config = default_experiment(kind, exp_trials, exp_seed, exp_delta);
      config.jobs = exp_jobs;
      config.dataset_size = exp_dsize;
      config.epsilon = exp_eps;
      config.data_horizon = exp_horizon;
      const auto alphas = parse_alphas(exp_alphas);
      const PenaltyScale scale =
          exp_scale.empty() ? config.algorithms.front().config.penalty_scale : parse_penalty_scale(exp_scale);
      std::vector<std::string> names;
      if (exp_algs.empty()) {
        for (const auto& a : config.algorithms) names.push_back(a.name);
      } else {
        names = split_names(exp_algs);
      }
      config.algorithms.clear();
      for (const auto& name : names) {
        double alpha = 1.0;
        if (alphas.count("*")) alpha = alphas.at("*");
        if (alphas.count(name)) alpha = alphas.at(name);
        config.algorithms.push_back(make_algorithm(name, alpha, exp_delta, scale));
      }
      if (!exp_grid.empty()) {
        config.grid.clear();
        for (const auto& v : split_names(exp_grid)) config.grid.push_back(std::stod(v));
      }
      if (!exp_plot.empty() && kind == ExperimentKind::bandit) {
        throw std::invalid_argument("--plot is not available for the bandit demo");
      }
      const std::vector<ResultRow> rows = run_experiment(config);
      std::ofstream out(exp_out, std::ios::binary);
      if (!out) throw std::runtime_error("cannot open " + exp_out);
      write_results_csv(out, rows);
      if (!exp_plot.empty()) {
        PlotOptions options;
        options.title = std::string(experiment_name(kind)) + " sweep";
        options.x_label = kind == ExperimentKind::exploration ? "epsilon" : "dataset size";
        options.log_x = kind == ExperimentKind::size;
        emit_plot(summarize(rows), exp_plot, options);
      }
      return 0;
    }
    if (ver->parsed()) return run_verify(ver_target, ver_trials, ver_delta, ver_seed, ver_jobs);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
