#pragma once

#include "fdpo/bounds.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace fdpo {

/// Outcome of one numerical property check over many random instances.
struct CheckResult {
  std::string name;
  std::size_t trials = 0;
  std::size_t failures = 0;
  /// Largest observed violation metric (an absolute error, or lhs - rhs).
  double worst = 0.0;
  bool passed = false;
};

/// Random proxy instances with |X| <= max_choices, plus the tight two-choice
/// instance f = (0, 1), fhat = (1, 1).
CheckResult verify_theorem1(std::size_t trials, std::uint64_t seed, std::size_t max_choices = 20);
BoundReport tight_proxy_instance_report();

/// Random instances as used by the identity checks: a random true MDP, a
/// random dataset drawn from it and its empirical model.
struct RandomInstance {
  TabularMdp mdp;
  EmpiricalModel model;
};
RandomInstance random_instance(std::uint64_t seed, std::size_t max_states = 6, std::size_t max_actions = 4);

/// v^pi - v = (I - gamma A^pi P)^{-1}(T^pi v - v) exactly, and the
/// absolute-value form as an upper bound.
CheckResult verify_residual_visitation(std::size_t trials, std::uint64_t seed, double tol = 1e-9);
CheckResult verify_ua_decomposition(std::size_t trials, std::uint64_t seed, double tol = 1e-9);
CheckResult verify_relative_uncertainty(std::size_t trials, std::uint64_t seed, double tol = 1e-9);
/// mu^pi <= mu^emp + (I - gamma A^pi P_D)^{-1} TV_S(pi, emp) / (1-gamma)^2 under the trivial bound.
CheckResult verify_conversion_inequality(std::size_t trials, std::uint64_t seed, double tol = 1e-9);

struct EnsembleConfig {
  std::size_t draws = 500;
  std::size_t n_states = 4;
  std::size_t n_actions = 2;
  double gamma = 0.9;
  std::size_t dataset_size = 30;
  double delta = 0.1;
  std::uint64_t seed = 0;
  int jobs = 1;
};

struct DrawOutcome {
  bool bellman_event = false;
  bool lemma_event = false;
  bool lower_bound_event = false;
  BoundReport naive;
  BoundReport ua_zero;
  BoundReport ua_one;
  BoundReport proximal_one;
};

struct EnsembleSummary {
  std::size_t draws = 0;
  double bellman_frequency = 0.0;
  double lemma_frequency = 0.0;
  double lower_bound_frequency = 0.0;
  double theorem2_frequency = 0.0;
  double theorem3_frequency = 0.0;
  double theorem4_frequency = 0.0;
  /// Largest |field difference| between the alpha = 0 UA report and the naive report.
  double alpha_zero_difference = 0.0;
  /// Every alpha = 1 UA sup term compared equal to 0.0.
  bool alpha_one_sup_zero = true;
  double mean_naive_rhs = 0.0;
  double mean_ua_rhs = 0.0;
};

/// One draw of the coverage ensemble: a fresh random MDP, the data
/// distribution of a random stochastic behavior policy, and a dataset.
DrawOutcome ensemble_draw(const EnsembleConfig& config, std::size_t index);
EnsembleSummary run_coverage_ensemble(const EnsembleConfig& config);

}  // namespace fdpo
