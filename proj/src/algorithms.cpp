#include "fdpo/algorithms.hpp"

#include <cmath>
#include <stdexcept>

namespace fdpo {

namespace {

void check_alpha(double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw std::invalid_argument("alpha must lie in [0, 1]");
}

void check_coefficient(double coefficient) {
  if (!(coefficient >= 0.0) || !std::isfinite(coefficient)) {
    throw std::invalid_argument("penalty coefficient must be finite and non-negative");
  }
}

double proximal_coefficient(double gamma, double alpha) { return alpha / ((1.0 - gamma) * (1.0 - gamma)); }

// Lowest index within the greedy tie tolerance of the maximum.
Eigen::Index tie_broken_argmax(const Eigen::Ref<const Eigen::VectorXd>& q) {
  const double best = q.maxCoeff();
  const double tol = 1e-12 * (1.0 + std::abs(best));
  for (Eigen::Index a = 0; a < q.size(); ++a) {
    if (q(a) >= best - tol) return a;
  }
  return 0;
}

}  // namespace

void AlgorithmConfig::validate() const {
  check_alpha(alpha);
  uncertainty.validate();
}

std::string_view family_name(Family family) {
  switch (family) {
    case Family::imitation:
      return "imitation";
    case Family::naive:
      return "naive";
    case Family::ua_pessimistic:
      return "ua_pessimistic";
    case Family::proximal_pessimistic:
      return "proximal_pessimistic";
  }
  return "unknown";
}

Family parse_family(std::string_view name) {
  if (name == "imitation") return Family::imitation;
  if (name == "naive") return Family::naive;
  if (name == "ua" || name == "ua_pessimistic") return Family::ua_pessimistic;
  if (name == "proximal" || name == "proximal_pessimistic") return Family::proximal_pessimistic;
  throw std::invalid_argument("unknown algorithm family: " + std::string(name));
}

std::string_view penalty_scale_name(PenaltyScale scale) {
  return scale == PenaltyScale::literal ? "literal" : "absorbed";
}

PenaltyScale parse_penalty_scale(std::string_view name) {
  if (name == "literal") return PenaltyScale::literal;
  if (name == "absorbed") return PenaltyScale::absorbed;
  throw std::invalid_argument("unknown penalty scale: " + std::string(name));
}

TabularPolicy imitation(const EmpiricalModel& model) { return model.empirical_policy(); }

ValueVector naive_fdpe(const EmpiricalModel& model, const TabularPolicy& policy) {
  return exact_policy_evaluation(model.mdp(), policy);
}

TabularPolicy naive_fdpo(const EmpiricalModel& model, SolveMethod method, const SolverLimits& limits) {
  if (method == SolveMethod::policy_iteration) return policy_iteration(model.mdp(), limits);
  const double tol = 1e-11 * (1.0 - model.discount());
  return value_iteration(model.mdp(), tol, limits).policy;
}

ValueVector ua_fdpe(const EmpiricalModel& model, const TabularPolicy& policy, const BellmanUncertainty& bellman,
                    double alpha) {
  check_alpha(alpha);
  const Eigen::VectorXd rhs = policy.contract(model.reward()) - alpha * bellman.for_policy(policy);
  return {solve_policy_system(model.mdp(), policy, rhs), true};
}

AlgorithmResult ua_fdpo(const EmpiricalModel& model, const BellmanUncertainty& penalty, double alpha,
                        const SolverLimits& limits) {
  check_alpha(alpha);
  if (!penalty.decomposable) {
    throw std::invalid_argument("ua_fdpo: optimization requires state-action-wise uncertainty");
  }
  const Eigen::MatrixXd reward = model.reward() - alpha * penalty.per_state_action;
  PolicyIterationResult pi = policy_iteration_with_reward(model.mdp(), reward, limits);
  pi.value.penalized = true;
  return {std::move(pi.policy), std::move(pi.value), pi.sweeps};
}

AlgorithmResult ua_fdpo(const EmpiricalModel& model, const UncertaintySpec& spec, double alpha,
                        const SolverLimits& limits) {
  if (!spec.decomposable()) {
    throw std::invalid_argument("ua_fdpo: state-wise uncertainty is supported for evaluation only");
  }
  return ua_fdpo(model, make_bellman_uncertainty(spec, model), alpha, limits);
}

Eigen::VectorXd proximal_local_opt_coefficient(const Eigen::Ref<const Eigen::VectorXd>& q_row,
                                               const Eigen::Ref<const Eigen::VectorXd>& emp_row, double coefficient) {
  check_coefficient(coefficient);
  if (q_row.size() == 0 || q_row.size() != emp_row.size()) {
    throw std::invalid_argument("proximal_local_opt: q and empirical rows must be non-empty and equal length");
  }
  const Eigen::Index best = tie_broken_argmax(q_row);
  Eigen::VectorXd p = Eigen::VectorXd::Zero(q_row.size());
  if (coefficient == 0.0) {
    p(best) = 1.0;
    return p;
  }
  const double threshold = q_row(best) - coefficient;
  // The argmax keeps its own empirical mass and absorbs the mass of every
  // action at or below the threshold, so p == emp_row bit for bit when no
  // action is dropped.
  double dropped = 0.0;
  for (Eigen::Index a = 0; a < q_row.size(); ++a) {
    if (a == best) continue;
    if (q_row(a) > threshold) {
      p(a) = emp_row(a);
    } else {
      dropped += emp_row(a);
    }
  }
  p(best) = emp_row(best) + dropped;
  return p;
}

Eigen::VectorXd proximal_local_opt(const Eigen::Ref<const Eigen::VectorXd>& q_row,
                                   const Eigen::Ref<const Eigen::VectorXd>& emp_row, double gamma, double alpha) {
  if (!(alpha >= 0.0)) throw std::invalid_argument("proximal_local_opt: alpha must be non-negative");
  if (!(gamma >= 0.0 && gamma < 1.0)) throw std::invalid_argument("proximal_local_opt: discount must lie in [0, 1)");
  return proximal_local_opt_coefficient(q_row, emp_row, proximal_coefficient(gamma, alpha));
}

ValueVector proximal_fdpe_coefficient(const EmpiricalModel& model, const TabularPolicy& policy, double coefficient) {
  check_coefficient(coefficient);
  const Eigen::VectorXd rhs =
      policy.contract(model.reward()) - coefficient * total_variation(policy, model.empirical_policy());
  return {solve_policy_system(model.mdp(), policy, rhs), true};
}

ValueVector proximal_fdpe(const EmpiricalModel& model, const TabularPolicy& policy, double alpha) {
  check_alpha(alpha);
  return proximal_fdpe_coefficient(model, policy, proximal_coefficient(model.discount(), alpha));
}

AlgorithmResult proximal_policy_iteration(const TabularMdp& dynamics, const Eigen::MatrixXd& reward,
                                          const TabularPolicy& anchor, double coefficient,
                                          const SolverLimits& limits) {
  check_coefficient(coefficient);
  const auto evaluate = [&](const TabularPolicy& pi) {
    const Eigen::VectorXd rhs = pi.contract(reward) - coefficient * total_variation(pi, anchor);
    return solve_policy_system(dynamics, pi, rhs);
  };
  const Eigen::MatrixXd& emp = anchor.probs();
  TabularPolicy policy = anchor;
  Eigen::VectorXd v = evaluate(policy);
  for (std::size_t sweep = 1; sweep <= limits.max_policy_sweeps; ++sweep) {
    const Eigen::MatrixXd q = q_backup(dynamics, reward, v).values;
    Eigen::MatrixXd next_probs(q.rows(), q.cols());
    for (Eigen::Index s = 0; s < q.rows(); ++s) {
      next_probs.row(s) = proximal_local_opt_coefficient(q.row(s).transpose(), emp.row(s).transpose(), coefficient)
                              .transpose();
    }
    TabularPolicy next(std::move(next_probs));
    if (next.approx_equal(policy, 0.0)) return {std::move(policy), {std::move(v), true}, sweep};
    Eigen::VectorXd v_next = evaluate(next);
    // Guards against cycling between policies whose values differ only by rounding.
    const double tol = 1e-12 * (1.0 + v.cwiseAbs().maxCoeff());
    if ((v_next - v).maxCoeff() <= tol) return {std::move(policy), {std::move(v), true}, sweep};
    policy = std::move(next);
    v = std::move(v_next);
  }
  throw ConvergenceError("proximal policy iteration: sweep cap exceeded");
}

AlgorithmResult proximal_fdpo_coefficient(const EmpiricalModel& model, double coefficient,
                                          const SolverLimits& limits) {
  return proximal_policy_iteration(model.mdp(), model.reward(), model.empirical_policy(), coefficient, limits);
}

AlgorithmResult proximal_fdpo(const EmpiricalModel& model, double alpha, const SolverLimits& limits) {
  check_alpha(alpha);
  return proximal_fdpo_coefficient(model, proximal_coefficient(model.discount(), alpha), limits);
}

AlgorithmResult solve(const EmpiricalModel& model, const AlgorithmConfig& config) {
  config.validate();
  switch (config.family) {
    case Family::imitation: {
      TabularPolicy pi = imitation(model);
      ValueVector v = naive_fdpe(model, pi);
      return {std::move(pi), std::move(v), 0};
    }
    case Family::naive: {
      PolicyIterationResult pi = policy_iteration_detailed(model.mdp(), config.limits);
      return {std::move(pi.policy), std::move(pi.value), pi.sweeps};
    }
    case Family::ua_pessimistic: {
      const BellmanUncertainty penalty = config.penalty_scale == PenaltyScale::literal
                                             ? make_bellman_uncertainty(config.uncertainty, model)
                                             : unit_count_penalty(model.counts());
      return ua_fdpo(model, penalty, config.alpha, config.limits);
    }
    case Family::proximal_pessimistic: {
      const double coefficient = config.penalty_scale == PenaltyScale::literal
                                     ? proximal_coefficient(model.discount(), config.alpha)
                                     : config.alpha;
      return proximal_fdpo_coefficient(model, coefficient, config.limits);
    }
  }
  throw std::invalid_argument("solve: unknown family");
}

}  // namespace fdpo
