#pragma once

#include "fdpo/dataset.hpp"
#include "fdpo/mdp.hpp"

#include <span>
#include <vector>

namespace fdpo {

enum class UncertaintyKind { trivial, hoeffding_sa, hoeffding_statewise };

/// Selects a Bellman-uncertainty construction.
struct UncertaintySpec {
  UncertaintyKind kind = UncertaintyKind::hoeffding_sa;
  double delta = 0.1;
  /// Candidate per-state action distributions for the state-wise bound.
  /// Empty means the deterministic choices (one unit vector per action).
  std::vector<Eigen::VectorXd> local_policy_set;

  void validate() const;
  /// True when the construction is a per-pair matrix contracted by A^pi.
  bool decomposable() const { return kind != UncertaintyKind::hoeffding_statewise; }
};

/// Bellman uncertainty, either per state-action pair (decomposable) or
/// already contracted per state for one policy.
struct BellmanUncertainty {
  Eigen::MatrixXd per_state_action;  // [state x action], when decomposable
  Eigen::VectorXd per_state;         // when not decomposable
  bool decomposable = true;

  static BellmanUncertainty state_action(Eigen::MatrixXd values);
  static BellmanUncertainty state_wise(Eigen::VectorXd values);

  /// u^pi: A^pi u for the decomposable form, the stored vector otherwise.
  Eigen::VectorXd for_policy(const TabularPolicy& policy) const;
};

struct ValueUncertainty {
  Eigen::VectorXd per_state;
};

BellmanUncertainty trivial_bellman_uncertainty(double gamma, std::size_t n_states, std::size_t n_actions);

/// Count-based bound
///   u(s,a) = 1/(1-gamma) * min(sqrt(ln(2 n_cells / delta) / 2) / sqrt(n(s,a)), 1),
/// with the cap 1/(1-gamma) at unvisited pairs. `n_cells` defaults to the
/// number of pairs in `counts`.
BellmanUncertainty hoeffding_sa_uncertainty(const CountMatrix& counts, double gamma, double delta,
                                            std::size_t n_cells = 0);

/// Count penalty with every constant factor dropped: n(s,a)^{-1/2}, and 1 at
/// unvisited pairs.
BellmanUncertainty unit_count_penalty(const CountMatrix& counts);

/// Unit vectors, one per action.
std::vector<Eigen::VectorXd> deterministic_local_policies(std::size_t n_actions);

/// State-wise bound for a single policy whose rows are members of
/// `local_policy_set`:
///   u^pi(s) = 1/(1-gamma) * min(sqrt(ln(2 |S| |local| / delta) / 2 * sum_a pi(a|s)^2 / n(s,a)), 1).
/// A state where pi puts mass on an action the empirical policy never took
/// gets the cap. Throws std::invalid_argument if a row of `policy` is not in
/// the set.
BellmanUncertainty hoeffding_statewise_uncertainty(const CountMatrix& counts, const TabularPolicy& empirical_policy,
                                                   const TabularPolicy& policy,
                                                   std::span<const Eigen::VectorXd> local_policy_set, double gamma,
                                                   double delta);

/// Builds the decomposable uncertainty selected by `spec` from the model's
/// counts. The state-wise kind needs a policy; use the overload below.
BellmanUncertainty make_bellman_uncertainty(const UncertaintySpec& spec, const EmpiricalModel& model);
BellmanUncertainty make_bellman_uncertainty(const UncertaintySpec& spec, const EmpiricalModel& model,
                                            const TabularPolicy& policy);

/// mu^pi = (I - gamma A^pi P_D)^{-1} u^pi
ValueUncertainty value_uncertainty(const EmpiricalModel& model, const TabularPolicy& policy,
                                   const BellmanUncertainty& bellman);

/// (I - gamma A^pi P_D)^{-1} ((A^pi - A^pi') (u + gamma P_D mu^pi')), which
/// equals mu^pi - mu^pi' for decomposable u.
Eigen::VectorXd relative_value_uncertainty(const EmpiricalModel& model, const TabularPolicy& pi,
                                           const TabularPolicy& pi_prime, const BellmanUncertainty& bellman);

/// Per-state total variation distance between two policies.
Eigen::VectorXd total_variation(const TabularPolicy& policy, const TabularPolicy& other);

/// TV_S(pi, empirical) / (1-gamma)^2
Eigen::VectorXd proximal_penalty_vector(const TabularPolicy& policy, const TabularPolicy& empirical_policy,
                                        double gamma);

}  // namespace fdpo
