#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

namespace fdpo {

class Rng;

/// Raised when a linear solve against (I - gamma A^pi P) fails or leaves a
/// residual above tolerance.
class SolveError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when an iterative solver hits its sweep cap.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised by enumeration oracles when the policy space is too large.
class InstanceTooLarge : public std::length_error {
 public:
  using std::length_error::length_error;
};

enum class RewardKind { bernoulli, deterministic };

/// Finite MDP with rewards in [0, 1].
///
/// State-action pairs are flattened as `s * n_actions + a`. The transition
/// matrix has one row per pair and one column per next state.
class TabularMdp {
 public:
  TabularMdp(Eigen::MatrixXd mean_reward, std::vector<RewardKind> reward_kind,
             Eigen::MatrixXd transition, double discount, Eigen::VectorXd start_dist);

  std::size_t n_states() const { return n_states_; }
  std::size_t n_actions() const { return n_actions_; }
  std::size_t n_cells() const { return n_states_ * n_actions_; }
  std::size_t cell(std::size_t s, std::size_t a) const { return s * n_actions_ + a; }

  /// [state x action]
  const Eigen::MatrixXd& mean_reward() const { return mean_reward_; }
  const std::vector<RewardKind>& reward_kinds() const { return reward_kind_; }
  RewardKind reward_kind(std::size_t s, std::size_t a) const { return reward_kind_[cell(s, a)]; }
  /// [state*action x next state]
  const Eigen::MatrixXd& transition() const { return transition_; }
  double discount() const { return discount_; }
  const Eigen::VectorXd& start_dist() const { return start_dist_; }

  /// Same shape, discount, start distribution and reward kinds; new
  /// reward means and dynamics.
  TabularMdp with_model(Eigen::MatrixXd mean_reward, Eigen::MatrixXd transition) const;

 private:
  std::size_t n_states_;
  std::size_t n_actions_;
  Eigen::MatrixXd mean_reward_;
  std::vector<RewardKind> reward_kind_;
  Eigen::MatrixXd transition_;
  double discount_;
  Eigen::VectorXd start_dist_;
};

/// State-conditional action distribution.
class TabularPolicy {
 public:
  explicit TabularPolicy(Eigen::MatrixXd probs);

  static TabularPolicy uniform(std::size_t n_states, std::size_t n_actions);
  static TabularPolicy deterministic(std::span<const std::size_t> actions, std::size_t n_actions);

  std::size_t n_states() const { return static_cast<std::size_t>(probs_.rows()); }
  std::size_t n_actions() const { return static_cast<std::size_t>(probs_.cols()); }
  const Eigen::MatrixXd& probs() const { return probs_; }
  double prob(std::size_t s, std::size_t a) const { return probs_(s, a); }

  /// Dense activity matrix A^pi, [state x state*action].
  Eigen::MatrixXd activity_matrix() const;

  /// A^pi x for a state-action quantity stored as [state x action].
  Eigen::VectorXd contract(const Eigen::MatrixXd& per_state_action) const;

  /// Chosen actions if every row is a point mass.
  std::optional<std::vector<std::size_t>> deterministic_actions() const;

  bool approx_equal(const TabularPolicy& other, double tol = 1e-12) const;

 private:
  Eigen::MatrixXd probs_;
};

struct ValueVector {
  Eigen::VectorXd values;
  /// Set for pessimistic evaluations, whose values may leave [0, 1/(1-gamma)].
  bool penalized = false;

  double expected(const Eigen::VectorXd& dist) const { return dist.dot(values); }
};

struct QVector {
  /// [state x action]
  Eigen::MatrixXd values;
};

struct SolverLimits {
  std::size_t max_policy_sweeps = 10'000;
  std::size_t max_value_backups = 1'000'000;
};

/// A^pi P, [state x state].
Eigen::MatrixXd policy_transition(const TabularMdp& mdp, const TabularPolicy& policy);

/// Solves (I - gamma A^pi P) x = rhs with a dense LU factorization.
Eigen::VectorXd solve_policy_system(const TabularMdp& mdp, const TabularPolicy& policy,
                                    const Eigen::VectorXd& rhs);

/// r + gamma P v for an arbitrary state-action reward.
QVector q_backup(const TabularMdp& mdp, const Eigen::MatrixXd& reward, const Eigen::VectorXd& v);

ValueVector exact_policy_evaluation(const TabularMdp& mdp, const TabularPolicy& policy);
QVector policy_q_values(const TabularMdp& mdp, const TabularPolicy& policy);
ValueVector bellman_backup(const TabularMdp& mdp, const TabularPolicy& policy, const ValueVector& v);
Eigen::MatrixXd discounted_visitation(const TabularMdp& mdp, const TabularPolicy& policy);

double expected_return(const TabularMdp& mdp, const TabularPolicy& policy);

/// Deterministic greedy policy; ties go to the lowest action index.
TabularPolicy greedy_policy(const Eigen::MatrixXd& q);

struct PolicyIterationResult {
  TabularPolicy policy;
  ValueVector value;
  std::size_t sweeps = 0;
  /// Value after each evaluation step, in order.
  std::vector<Eigen::VectorXd> value_trace;
};

/// Howard policy iteration on the dynamics of `mdp` with an arbitrary
/// state-action reward (which may be negative). Starts from the reward-greedy
/// policy and stops when the greedy policy repeats.
PolicyIterationResult policy_iteration_with_reward(const TabularMdp& mdp, const Eigen::MatrixXd& reward,
                                                   const SolverLimits& limits = {});

PolicyIterationResult policy_iteration_detailed(const TabularMdp& mdp, const SolverLimits& limits = {});
TabularPolicy policy_iteration(const TabularMdp& mdp, const SolverLimits& limits = {});

struct ValueIterationResult {
  TabularPolicy policy;
  ValueVector value;
  std::size_t backups = 0;
};

ValueIterationResult value_iteration(const TabularMdp& mdp, double tol, const SolverLimits& limits = {});

double suboptimality(const TabularMdp& mdp, const TabularPolicy& policy);
double suboptimality(const TabularMdp& mdp, const TabularPolicy& policy, double optimal_return);

struct BruteForceResult {
  TabularPolicy policy;
  double value;
};

inline constexpr double kMaxEnumeratedPolicies = 1e6;

/// Number of deterministic policies, or throws InstanceTooLarge when it
/// exceeds `kMaxEnumeratedPolicies`.
std::size_t deterministic_policy_count(std::size_t n_states, std::size_t n_actions);

/// Calls `visit` with every deterministic policy, in lexicographic order of
/// the action vector (state 0 most significant).
void for_each_deterministic_policy(std::size_t n_states, std::size_t n_actions,
                                   const std::function<void(const TabularPolicy&)>& visit);

/// Maximizer of E_rho[v^pi] over deterministic policies by enumeration.
BruteForceResult brute_force_optimal(const TabularMdp& mdp);

/// Random instance for tests and verification: Dirichlet(1) transition rows
/// and start distribution, uniform Bernoulli reward means.
TabularMdp random_mdp(std::size_t n_states, std::size_t n_actions, double discount, Rng& rng);
TabularPolicy random_policy(std::size_t n_states, std::size_t n_actions, Rng& rng);
TabularPolicy random_deterministic_policy(std::size_t n_states, std::size_t n_actions, Rng& rng);

}  // namespace fdpo
