#include "fdpo/bounds.hpp"

#include "fdpo/algorithms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace fdpo {

namespace {

std::size_t first_argmax(const std::vector<double>& values) {
  return static_cast<std::size_t>(std::max_element(values.begin(), values.end()) - values.begin());
}

BoundReport finish(double lhs, double inf_term, double sup_term, double delta, double alpha) {
  BoundReport report;
  report.lhs = lhs;
  report.inf_term = inf_term;
  report.sup_term = sup_term;
  report.rhs = inf_term + sup_term;
  report.holds = lhs <= report.rhs + kBoundSlack;
  report.delta = delta;
  report.alpha = alpha;
  return report;
}

BellmanUncertainty decomposable_uncertainty(const UncertaintySpec& spec, const EmpiricalModel& model) {
  if (!spec.decomposable()) throw std::invalid_argument("bound reports require state-action-wise uncertainty");
  return make_bellman_uncertainty(spec, model);
}

double expected_mu(const EmpiricalModel& model, const TabularPolicy& policy, const BellmanUncertainty& bellman) {
  return model.mdp().start_dist().dot(value_uncertainty(model, policy, bellman).per_state);
}

// Shared by the naive and UA reports so that alpha = 0 reproduces the naive
// report exactly.
BoundReport weighted_report(const TabularMdp& mdp, const EmpiricalModel& model, const UncertaintySpec& spec,
                            const TabularPolicy& selected, double alpha) {
  const BellmanUncertainty bellman = decomposable_uncertainty(spec, model);
  const double optimal = expected_return(mdp, policy_iteration(mdp));
  double inf_term = std::numeric_limits<double>::infinity();
  for_each_deterministic_policy(mdp.n_states(), mdp.n_actions(), [&](const TabularPolicy& pi) {
    const double value = (optimal - expected_return(mdp, pi)) + (1.0 + alpha) * expected_mu(model, pi, bellman);
    inf_term = std::min(inf_term, value);
  });
  const PolicyIterationResult worst = policy_iteration_with_reward(model.mdp(), bellman.per_state_action);
  const double sup_term = (1.0 - alpha) * worst.value.expected(model.mdp().start_dist());
  return finish(optimal - expected_return(mdp, selected), inf_term, sup_term, spec.delta, alpha);
}

}  // namespace

void ProxyInstance::validate() const {
  if (objective.empty() || objective.size() != proxy.size()) {
    throw std::invalid_argument("ProxyInstance: objective and proxy must be non-empty and of equal length");
  }
}

BoundReport proxy_regret_decomposition(const ProxyInstance& instance) {
  instance.validate();
  const std::vector<double>& f = instance.objective;
  const std::vector<double>& fhat = instance.proxy;
  const double best = f[first_argmax(f)];
  const std::size_t chosen = first_argmax(fhat);
  double inf_term = std::numeric_limits<double>::infinity();
  double sup_term = -std::numeric_limits<double>::infinity();
  for (std::size_t x = 0; x < f.size(); ++x) {
    inf_term = std::min(inf_term, (best - f[x]) + (f[x] - fhat[x]));
    sup_term = std::max(sup_term, fhat[x] - f[x]);
  }
  return finish(best - f[chosen], inf_term, sup_term, 0.0, 0.0);
}

BoundReport naive_bound_report(const TabularMdp& mdp, const EmpiricalModel& model, const UncertaintySpec& spec) {
  return weighted_report(mdp, model, spec, naive_fdpo(model), 0.0);
}

BoundReport ua_bound_report(const TabularMdp& mdp, const EmpiricalModel& model, const UncertaintySpec& spec,
                            double alpha) {
  const BellmanUncertainty bellman = decomposable_uncertainty(spec, model);
  const TabularPolicy selected = ua_fdpo(model, bellman, alpha).policy;
  return weighted_report(mdp, model, spec, selected, alpha);
}

double proximal_sup_objective(const EmpiricalModel& model, const BellmanUncertainty& bellman,
                              const TabularPolicy& policy, double alpha) {
  const double gamma = model.discount();
  const Eigen::VectorXd penalty = alpha * proximal_penalty_vector(policy, model.empirical_policy(), gamma);
  const Eigen::VectorXd rhs = bellman.for_policy(policy) - penalty;
  return model.mdp().start_dist().dot(solve_policy_system(model.mdp(), policy, rhs));
}

BoundReport proximal_bound_report(const TabularMdp& mdp, const EmpiricalModel& model, const UncertaintySpec& spec,
                                  double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw std::invalid_argument("proximal_bound_report: alpha must lie in [0, 1]");
  const BellmanUncertainty bellman = decomposable_uncertainty(spec, model);
  const double gamma = model.discount();
  const double coefficient = alpha / ((1.0 - gamma) * (1.0 - gamma));
  const TabularPolicy& emp = model.empirical_policy();
  const double optimal = expected_return(mdp, policy_iteration(mdp));
  const double anchor_mu = alpha * expected_mu(model, emp, bellman);
  const TabularPolicy selected = proximal_fdpo(model, alpha).policy;

  const auto inf_candidate = [&](const TabularPolicy& pi) {
    const Eigen::VectorXd penalty = coefficient * total_variation(pi, emp);
    const double visited_penalty = model.mdp().start_dist().dot(solve_policy_system(model.mdp(), pi, penalty));
    return (optimal - expected_return(mdp, pi)) + expected_mu(model, pi, bellman) + anchor_mu + visited_penalty;
  };
  double inf_term = std::min(inf_candidate(emp), inf_candidate(selected));
  double sup_raw = std::max(proximal_sup_objective(model, bellman, emp, alpha),
                            proximal_sup_objective(model, bellman, selected, alpha));
  for_each_deterministic_policy(mdp.n_states(), mdp.n_actions(), [&](const TabularPolicy& pi) {
    inf_term = std::min(inf_term, inf_candidate(pi));
    sup_raw = std::max(sup_raw, proximal_sup_objective(model, bellman, pi, alpha));
  });
  const AlgorithmResult worst =
      proximal_policy_iteration(model.mdp(), bellman.per_state_action, emp, coefficient);
  sup_raw = std::max(sup_raw, proximal_sup_objective(model, bellman, worst.policy, alpha));
  return finish(optimal - expected_return(mdp, selected), inf_term, sup_raw - anchor_mu, spec.delta, alpha);
}

BoundReport value_based_corollary(const TabularMdp& mdp,
                                  const std::function<ValueVector(const TabularPolicy&)>& evaluate) {
  ProxyInstance instance;
  for_each_deterministic_policy(mdp.n_states(), mdp.n_actions(), [&](const TabularPolicy& pi) {
    instance.objective.push_back(expected_return(mdp, pi));
    instance.proxy.push_back(evaluate(pi).expected(mdp.start_dist()));
  });
  return proxy_regret_decomposition(instance);
}

}  // namespace fdpo
