#pragma once

#include "fdpo/algorithms.hpp"
#include "fdpo/mdp.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace fdpo {

// ---- gridworld -------------------------------------------------------------

inline constexpr std::size_t kGridWidth = 8;
inline constexpr std::size_t kGridHeight = 8;
inline constexpr double kGridSlip = 0.2;
inline constexpr double kGridDiscount = 0.99;

enum GridAction : std::size_t { kUp = 0, kDown = 1, kLeft = 2, kRight = 3 };

/// 8x8 grid, state = row * 8 + col. The intended move happens with
/// probability 0.8 and each other direction with 0.2/3; moves off the grid
/// stay put. Reward means are Beta(3, 1) draws, rewards Bernoulli, start
/// distribution uniform, discount 0.99.
TabularMdp generate_gridworld(std::uint64_t seed);

/// (1 - epsilon) * optimal + epsilon * uniform, per state.
TabularPolicy epsilon_greedy_behavior(const TabularPolicy& optimal, double epsilon);

// ---- bandit ----------------------------------------------------------------

inline constexpr std::size_t kBanditArms = 1000;
inline constexpr std::size_t kBanditGoodPulls = 10'000;

/// One state, 1000 Bernoulli arms, discount 0. Arm 0 has mean 0.99, the rest 0.01.
TabularMdp bandit_mdp();
/// Arm 0 pulled 10000 times, every other arm once.
CountMatrix bandit_counts();

// ---- experiment harness ----------------------------------------------------

enum class ExperimentKind { exploration, size, bandit };

std::string_view experiment_name(ExperimentKind kind);
ExperimentKind parse_experiment(std::string_view name);

/// A learner, or one of the reference policies `uniform`, `behavior` and
/// `optimal` (evaluated on the true MDP, no learning involved).
struct AlgorithmSpec {
  std::string name;
  AlgorithmConfig config;
};

/// Column name used in result files: imitation, naive, ua, proximal, or a
/// reference policy name.
std::string algorithm_label(const AlgorithmSpec& spec);

/// Builds a spec from its label: imitation, naive, ua, proximal, uniform,
/// behavior or optimal.
AlgorithmSpec make_algorithm(std::string_view label, double alpha, double delta, PenaltyScale scale);

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::exploration;
  std::size_t trials = 1;
  std::uint64_t master_seed = 0;
  std::vector<AlgorithmSpec> algorithms;
  /// Epsilon values (exploration) or dataset sizes (size). Ignored by bandit.
  std::vector<double> grid;
  /// Dataset size for the exploration sweep.
  std::size_t dataset_size = 2000;
  /// Behavior epsilon for the size sweep.
  double epsilon = 0.5;
  /// Cesaro horizon of the data distribution.
  std::size_t data_horizon = 1000;
  int jobs = 1;

  void validate() const;
};

/// Defaults of each experiment: the four learners at alpha = 1 for the
/// gridworld sweeps (absorbed penalty scale), naive and ua (Hoeffding,
/// literal scale) for the bandit.
ExperimentConfig default_experiment(ExperimentKind kind, std::size_t trials, std::uint64_t master_seed,
                                    double delta = 0.1);
std::vector<double> default_epsilon_grid();
std::vector<double> default_size_grid();

struct ResultRow {
  std::string experiment;
  std::size_t trial = 0;
  std::uint64_t seed = 0;
  std::string algorithm;
  /// Epsilon or dataset size. For the bandit: the chosen arm.
  double sweep_value = 0.0;
  double mean_return = 0.0;
  double optimal_return = 0.0;
  double suboptimality = 0.0;
};

/// Seed of `trial` under `master_seed`; also the gridworld seed of that trial.
std::uint64_t trial_seed(std::uint64_t master_seed, std::size_t trial);

/// Rows of a single trial, ordered by (sweep index, algorithm).
std::vector<ResultRow> run_trial(const ExperimentConfig& config, std::size_t trial);

/// All rows ordered by (sweep value index, trial, algorithm), independent of `jobs`.
std::vector<ResultRow> run_experiment(const ExperimentConfig& config);
/// Same result computed on one thread with no OpenMP involvement.
std::vector<ResultRow> run_experiment_serial(const ExperimentConfig& config);

std::vector<ResultRow> run_exploration_sweep(const ExperimentConfig& config);
std::vector<ResultRow> run_size_sweep(const ExperimentConfig& config);
std::vector<ResultRow> run_bandit_demo(const ExperimentConfig& config);

inline constexpr const char* kResultCsvHeader =
    "experiment,trial,seed,algorithm,sweep_value,mean_return,optimal_return,suboptimality";

/// Floats at 17 significant digits.
void write_results_csv(std::ostream& out, const std::vector<ResultRow>& rows);
std::vector<ResultRow> read_results_csv(std::istream& in);

}  // namespace fdpo
