#include "fdpo/mdp.hpp"

#include "fdpo/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace fdpo {

namespace {

constexpr double kStochasticTol = 1e-12;
constexpr double kResidualTol = 1e-10;
constexpr double kTieTol = 1e-12;

void check_distribution(const Eigen::Ref<const Eigen::VectorXd>& row, const char* what) {
  if ((row.array() < 0.0).any() || !row.allFinite()) {
    throw std::invalid_argument(std::string(what) + ": negative or non-finite probability");
  }
  if (std::abs(row.sum() - 1.0) > kStochasticTol) {
    throw std::invalid_argument(std::string(what) + ": probabilities do not sum to 1");
  }
}

Eigen::VectorXd dirichlet_one(std::size_t n, Rng& rng) {
  Eigen::VectorXd w(static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < w.size(); ++i) w(i) = -std::log1p(-rng.uniform());
  return w / w.sum();
}

}  // namespace

TabularMdp::TabularMdp(Eigen::MatrixXd mean_reward, std::vector<RewardKind> reward_kind,
                       Eigen::MatrixXd transition, double discount, Eigen::VectorXd start_dist)
    : n_states_(static_cast<std::size_t>(mean_reward.rows())),
      n_actions_(static_cast<std::size_t>(mean_reward.cols())),
      mean_reward_(std::move(mean_reward)),
      reward_kind_(std::move(reward_kind)),
      transition_(std::move(transition)),
      discount_(discount),
      start_dist_(std::move(start_dist)) {
  if (n_states_ == 0 || n_actions_ == 0) throw std::invalid_argument("TabularMdp: empty state or action space");
  if (reward_kind_.size() != n_cells()) throw std::invalid_argument("TabularMdp: reward_kind size mismatch");
  if (static_cast<std::size_t>(transition_.rows()) != n_cells() ||
      static_cast<std::size_t>(transition_.cols()) != n_states_) {
    throw std::invalid_argument("TabularMdp: transition shape mismatch");
  }
  if (static_cast<std::size_t>(start_dist_.size()) != n_states_) {
    throw std::invalid_argument("TabularMdp: start distribution size mismatch");
  }
  if (!(discount_ >= 0.0 && discount_ < 1.0)) throw std::invalid_argument("TabularMdp: discount must lie in [0, 1)");
  if (!mean_reward_.allFinite() || (mean_reward_.array() < 0.0).any() || (mean_reward_.array() > 1.0).any()) {
    throw std::invalid_argument("TabularMdp: mean rewards must lie in [0, 1]");
  }
  for (Eigen::Index row = 0; row < transition_.rows(); ++row) {
    check_distribution(transition_.row(row).transpose(), "TabularMdp transition");
  }
  check_distribution(start_dist_, "TabularMdp start distribution");
}

TabularMdp TabularMdp::with_model(Eigen::MatrixXd mean_reward, Eigen::MatrixXd transition) const {
  return TabularMdp(std::move(mean_reward), reward_kind_, std::move(transition), discount_, start_dist_);
}

TabularPolicy::TabularPolicy(Eigen::MatrixXd probs) : probs_(std::move(probs)) {
  if (probs_.rows() == 0 || probs_.cols() == 0) throw std::invalid_argument("TabularPolicy: empty shape");
  for (Eigen::Index s = 0; s < probs_.rows(); ++s) {
    check_distribution(probs_.row(s).transpose(), "TabularPolicy");
  }
}

TabularPolicy TabularPolicy::uniform(std::size_t n_states, std::size_t n_actions) {
  return TabularPolicy(Eigen::MatrixXd::Constant(static_cast<Eigen::Index>(n_states),
                                                 static_cast<Eigen::Index>(n_actions),
                                                 1.0 / static_cast<double>(n_actions)));
}

TabularPolicy TabularPolicy::deterministic(std::span<const std::size_t> actions, std::size_t n_actions) {
  Eigen::MatrixXd probs = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(actions.size()),
                                                static_cast<Eigen::Index>(n_actions));
  for (std::size_t s = 0; s < actions.size(); ++s) {
    if (actions[s] >= n_actions) throw std::invalid_argument("TabularPolicy::deterministic: action out of range");
    probs(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(actions[s])) = 1.0;
  }
  return TabularPolicy(std::move(probs));
}

Eigen::MatrixXd TabularPolicy::activity_matrix() const {
  const Eigen::Index S = probs_.rows();
  const Eigen::Index A = probs_.cols();
  Eigen::MatrixXd act = Eigen::MatrixXd::Zero(S, S * A);
  for (Eigen::Index s = 0; s < S; ++s) {
    for (Eigen::Index a = 0; a < A; ++a) act(s, s * A + a) = probs_(s, a);
  }
  return act;
}

Eigen::VectorXd TabularPolicy::contract(const Eigen::MatrixXd& per_state_action) const {
  if (per_state_action.rows() != probs_.rows() || per_state_action.cols() != probs_.cols()) {
    throw std::invalid_argument("TabularPolicy::contract: shape mismatch");
  }
  return probs_.cwiseProduct(per_state_action).rowwise().sum();
}

std::optional<std::vector<std::size_t>> TabularPolicy::deterministic_actions() const {
  std::vector<std::size_t> actions(n_states());
  for (Eigen::Index s = 0; s < probs_.rows(); ++s) {
    Eigen::Index best = 0;
    probs_.row(s).maxCoeff(&best);
    if (probs_(s, best) != 1.0) return std::nullopt;
    actions[static_cast<std::size_t>(s)] = static_cast<std::size_t>(best);
  }
  return actions;
}

bool TabularPolicy::approx_equal(const TabularPolicy& other, double tol) const {
  if (other.probs_.rows() != probs_.rows() || other.probs_.cols() != probs_.cols()) return false;
  return (probs_ - other.probs_).cwiseAbs().maxCoeff() <= tol;
}

Eigen::MatrixXd policy_transition(const TabularMdp& mdp, const TabularPolicy& policy) {
  const auto S = static_cast<Eigen::Index>(mdp.n_states());
  const auto A = static_cast<Eigen::Index>(mdp.n_actions());
  if (policy.n_states() != mdp.n_states() || policy.n_actions() != mdp.n_actions()) {
    throw std::invalid_argument("policy shape does not match MDP");
  }
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(S, S);
  const auto& P = mdp.transition();
  for (Eigen::Index s = 0; s < S; ++s) {
    for (Eigen::Index a = 0; a < A; ++a) {
      const double p = policy.probs()(s, a);
      if (p != 0.0) out.row(s) += p * P.row(s * A + a);
    }
  }
  return out;
}

Eigen::VectorXd solve_policy_system(const TabularMdp& mdp, const TabularPolicy& policy,
                                    const Eigen::VectorXd& rhs) {
  const auto S = static_cast<Eigen::Index>(mdp.n_states());
  if (rhs.size() != S) throw std::invalid_argument("solve_policy_system: rhs size mismatch");
  const Eigen::MatrixXd system =
      Eigen::MatrixXd::Identity(S, S) - mdp.discount() * policy_transition(mdp, policy);
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(system);
  Eigen::VectorXd x = lu.solve(rhs);
  // One step of iterative refinement keeps the residual at round-off level
  // for discounts close to 1.
  Eigen::VectorXd residual = rhs - system * x;
  x += lu.solve(residual);
  residual = rhs - system * x;
  const double scale = 1.0 + rhs.cwiseAbs().maxCoeff();
  if (!x.allFinite() || residual.cwiseAbs().maxCoeff() > kResidualTol * scale) {
    throw SolveError("solve_policy_system: linear solve failed");
  }
  return x;
}

QVector q_backup(const TabularMdp& mdp, const Eigen::MatrixXd& reward, const Eigen::VectorXd& v) {
  const auto S = static_cast<Eigen::Index>(mdp.n_states());
  const auto A = static_cast<Eigen::Index>(mdp.n_actions());
  if (reward.rows() != S || reward.cols() != A) throw std::invalid_argument("q_backup: reward shape mismatch");
  if (v.size() != S) throw std::invalid_argument("q_backup: value size mismatch");
  const Eigen::VectorXd next = mdp.transition() * v;  // [S*A]
  QVector q{reward};
  for (Eigen::Index s = 0; s < S; ++s) {
    for (Eigen::Index a = 0; a < A; ++a) q.values(s, a) += mdp.discount() * next(s * A + a);
  }
  return q;
}

ValueVector exact_policy_evaluation(const TabularMdp& mdp, const TabularPolicy& policy) {
  return {solve_policy_system(mdp, policy, policy.contract(mdp.mean_reward())), false};
}

QVector policy_q_values(const TabularMdp& mdp, const TabularPolicy& policy) {
  return q_backup(mdp, mdp.mean_reward(), exact_policy_evaluation(mdp, policy).values);
}

ValueVector bellman_backup(const TabularMdp& mdp, const TabularPolicy& policy, const ValueVector& v) {
  return {policy.contract(q_backup(mdp, mdp.mean_reward(), v.values).values), v.penalized};
}

Eigen::MatrixXd discounted_visitation(const TabularMdp& mdp, const TabularPolicy& policy) {
  const auto S = static_cast<Eigen::Index>(mdp.n_states());
  const Eigen::MatrixXd system =
      Eigen::MatrixXd::Identity(S, S) - mdp.discount() * policy_transition(mdp, policy);
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(system);
  Eigen::MatrixXd inv = lu.solve(Eigen::MatrixXd::Identity(S, S));
  inv += lu.solve(Eigen::MatrixXd::Identity(S, S) - system * inv);
  if (!inv.allFinite() || (system * inv - Eigen::MatrixXd::Identity(S, S)).cwiseAbs().maxCoeff() > 1e-9) {
    throw SolveError("discounted_visitation: inversion failed");
  }
  return inv;
}

double expected_return(const TabularMdp& mdp, const TabularPolicy& policy) {
  return exact_policy_evaluation(mdp, policy).expected(mdp.start_dist());
}

TabularPolicy greedy_policy(const Eigen::MatrixXd& q) {
  std::vector<std::size_t> actions(static_cast<std::size_t>(q.rows()));
  for (Eigen::Index s = 0; s < q.rows(); ++s) {
    const double best = q.row(s).maxCoeff();
    const double cutoff = best - kTieTol * (1.0 + std::abs(best));
    for (Eigen::Index a = 0; a < q.cols(); ++a) {
      if (q(s, a) >= cutoff) {
        actions[static_cast<std::size_t>(s)] = static_cast<std::size_t>(a);
        break;
      }
    }
  }
  return TabularPolicy::deterministic(actions, static_cast<std::size_t>(q.cols()));
}

PolicyIterationResult policy_iteration_with_reward(const TabularMdp& mdp, const Eigen::MatrixXd& reward,
                                                   const SolverLimits& limits) {
  TabularPolicy policy = greedy_policy(reward);
  std::vector<Eigen::VectorXd> trace;
  for (std::size_t sweep = 1; sweep <= limits.max_policy_sweeps; ++sweep) {
    Eigen::VectorXd v = solve_policy_system(mdp, policy, policy.contract(reward));
    trace.push_back(v);
    TabularPolicy next = greedy_policy(q_backup(mdp, reward, v).values);
    if (next.approx_equal(policy, 0.0)) {
      return {std::move(policy), ValueVector{std::move(v), false}, sweep, std::move(trace)};
    }
    policy = std::move(next);
  }
  throw ConvergenceError("policy_iteration: sweep cap exceeded");
}

PolicyIterationResult policy_iteration_detailed(const TabularMdp& mdp, const SolverLimits& limits) {
  return policy_iteration_with_reward(mdp, mdp.mean_reward(), limits);
}

TabularPolicy policy_iteration(const TabularMdp& mdp, const SolverLimits& limits) {
  return policy_iteration_detailed(mdp, limits).policy;
}

ValueIterationResult value_iteration(const TabularMdp& mdp, double tol, const SolverLimits& limits) {
  if (!(tol > 0.0)) throw std::invalid_argument("value_iteration: tol must be positive");
  Eigen::VectorXd v = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(mdp.n_states()));
  for (std::size_t k = 1; k <= limits.max_value_backups; ++k) {
    const QVector q = q_backup(mdp, mdp.mean_reward(), v);
    Eigen::VectorXd next = q.values.rowwise().maxCoeff();
    const double change = (next - v).cwiseAbs().maxCoeff();
    v = std::move(next);
    if (change <= tol) {
      TabularPolicy policy = greedy_policy(q_backup(mdp, mdp.mean_reward(), v).values);
      return {std::move(policy), ValueVector{std::move(v), false}, k};
    }
  }
  throw ConvergenceError("value_iteration: backup cap exceeded");
}

double suboptimality(const TabularMdp& mdp, const TabularPolicy& policy) {
  return suboptimality(mdp, policy, expected_return(mdp, policy_iteration(mdp)));
}

double suboptimality(const TabularMdp& mdp, const TabularPolicy& policy, double optimal_return) {
  return optimal_return - expected_return(mdp, policy);
}

std::size_t deterministic_policy_count(std::size_t n_states, std::size_t n_actions) {
  const double count = std::pow(static_cast<double>(n_actions), static_cast<double>(n_states));
  if (count > kMaxEnumeratedPolicies) {
    throw InstanceTooLarge("deterministic policy enumeration limited to 1e6 policies");
  }
  return static_cast<std::size_t>(std::llround(count));
}

void for_each_deterministic_policy(std::size_t n_states, std::size_t n_actions,
                                   const std::function<void(const TabularPolicy&)>& visit) {
  const std::size_t total = deterministic_policy_count(n_states, n_actions);
  std::vector<std::size_t> actions(n_states, 0);
  for (std::size_t index = 0; index < total; ++index) {
    visit(TabularPolicy::deterministic(actions, n_actions));
    for (std::size_t s = n_states; s-- > 0;) {
      if (++actions[s] < n_actions) break;
      actions[s] = 0;
    }
  }
}

BruteForceResult brute_force_optimal(const TabularMdp& mdp) {
  std::optional<BruteForceResult> best;
  for_each_deterministic_policy(mdp.n_states(), mdp.n_actions(), [&](const TabularPolicy& policy) {
    const double value = expected_return(mdp, policy);
    if (!best || value > best->value) best = BruteForceResult{policy, value};
  });
  return *best;
}

TabularMdp random_mdp(std::size_t n_states, std::size_t n_actions, double discount, Rng& rng) {
  const auto S = static_cast<Eigen::Index>(n_states);
  const auto A = static_cast<Eigen::Index>(n_actions);
  Eigen::MatrixXd reward(S, A);
  for (Eigen::Index s = 0; s < S; ++s) {
    for (Eigen::Index a = 0; a < A; ++a) reward(s, a) = rng.uniform();
  }
  Eigen::MatrixXd transition(S * A, S);
  for (Eigen::Index row = 0; row < S * A; ++row) transition.row(row) = dirichlet_one(n_states, rng).transpose();
  Eigen::VectorXd start = dirichlet_one(n_states, rng);
  return TabularMdp(std::move(reward), std::vector<RewardKind>(n_states * n_actions, RewardKind::bernoulli),
                    std::move(transition), discount, std::move(start));
}

TabularPolicy random_policy(std::size_t n_states, std::size_t n_actions, Rng& rng) {
  Eigen::MatrixXd probs(static_cast<Eigen::Index>(n_states), static_cast<Eigen::Index>(n_actions));
  for (Eigen::Index s = 0; s < probs.rows(); ++s) probs.row(s) = dirichlet_one(n_actions, rng).transpose();
  return TabularPolicy(std::move(probs));
}

TabularPolicy random_deterministic_policy(std::size_t n_states, std::size_t n_actions, Rng& rng) {
  std::vector<std::size_t> actions(n_states);
  for (auto& a : actions) a = static_cast<std::size_t>(rng.next_u64() % n_actions);
  return TabularPolicy::deterministic(actions, n_actions);
}

}  // namespace fdpo
