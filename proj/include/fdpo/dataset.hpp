#pragma once

#include "fdpo/mdp.hpp"

#include <cstdint>
#include <iosfwd>
#include <vector>

namespace fdpo {

using CountMatrix = Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>;
using CountVector = Eigen::Matrix<std::int64_t, Eigen::Dynamic, 1>;

struct Transition {
  std::size_t state = 0;
  std::size_t action = 0;
  double reward = 0.0;
  std::size_t next_state = 0;

  bool operator==(const Transition&) const = default;
};

/// Multiset of transitions with per-pair and per-state counts.
class TransitionDataset {
 public:
  TransitionDataset(std::size_t n_states, std::size_t n_actions, std::vector<Transition> records);

  std::size_t n_states() const { return n_states_; }
  std::size_t n_actions() const { return n_actions_; }
  std::size_t size() const { return records_.size(); }
  const std::vector<Transition>& records() const { return records_; }
  /// [state x action]
  const CountMatrix& counts() const { return counts_; }
  const CountVector& state_counts() const { return state_counts_; }

 private:
  std::size_t n_states_;
  std::size_t n_actions_;
  std::vector<Transition> records_;
  CountMatrix counts_;
  CountVector state_counts_;
};

/// Sampling distribution over state-action pairs, stored as [state x action].
class DataDistribution {
 public:
  explicit DataDistribution(Eigen::MatrixXd probs);

  static DataDistribution point_mass(std::size_t n_states, std::size_t n_actions, std::size_t s, std::size_t a);

  const Eigen::MatrixXd& probs() const { return probs_; }

 private:
  Eigen::MatrixXd probs_;
};

/// Maximum-likelihood model of a dataset. Unseen pairs are filled with a
/// uniform random reward (drawn from `fill_seed`) and a uniform next-state
/// row; unseen states get a uniform empirical policy.
class EmpiricalModel {
 public:
  EmpiricalModel(TabularMdp mdp, TabularPolicy empirical_policy, CountMatrix counts, std::uint64_t fill_seed);

  /// Empirical MDP: r_D, P_D with the true discount and start distribution.
  const TabularMdp& mdp() const { return mdp_; }
  const Eigen::MatrixXd& reward() const { return mdp_.mean_reward(); }
  const Eigen::MatrixXd& transition() const { return mdp_.transition(); }
  double discount() const { return mdp_.discount(); }
  const TabularPolicy& empirical_policy() const { return empirical_policy_; }
  const CountMatrix& counts() const { return counts_; }
  CountVector state_counts() const { return counts_.rowwise().sum(); }
  std::uint64_t fill_seed() const { return fill_seed_; }

 private:
  TabularMdp mdp_;
  TabularPolicy empirical_policy_;
  CountMatrix counts_;
  std::uint64_t fill_seed_;
};

/// Cesaro average over t < horizon of the state distribution of the
/// rho-started chain under `behavior`, times the behavior's action
/// probabilities.
DataDistribution stationary_data_distribution(const TabularMdp& mdp, const TabularPolicy& behavior,
                                              std::size_t horizon = 1000);

/// d i.i.d. transitions: (s, a) ~ phi, then reward and next state from the MDP.
TransitionDataset collect(const TabularMdp& mdp, const DataDistribution& phi, std::size_t d, std::uint64_t seed);

/// Exactly counts(s, a) transitions at every pair, in row-major pair order.
TransitionDataset collect_with_counts(const TabularMdp& mdp, const CountMatrix& counts, std::uint64_t seed);

/// `shape` supplies the state/action sizes, discount and start distribution.
EmpiricalModel build_empirical_model(const TransitionDataset& dataset, const TabularMdp& shape,
                                     std::uint64_t fill_seed);

/// CSV with header `state,action,reward,next_state`; rewards at 17
/// significant digits.
void write_dataset_csv(std::ostream& out, const TransitionDataset& dataset);
TransitionDataset read_dataset_csv(std::istream& in, std::size_t n_states, std::size_t n_actions);

}  // namespace fdpo
