#include "fdpo/uncertainty.hpp"

#include <cmath>

namespace fdpo {

namespace {

void check_gamma(double gamma) {
  if (!(gamma >= 0.0 && gamma < 1.0)) throw std::invalid_argument("uncertainty: discount must lie in [0, 1)");
}

void check_delta(double delta) {
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("uncertainty: delta must lie in (0, 1)");
}

bool row_in_set(const Eigen::VectorXd& row, std::span<const Eigen::VectorXd> set) {
  for (const auto& candidate : set) {
    if (candidate.size() == row.size() && (candidate - row).cwiseAbs().maxCoeff() <= 1e-12) return true;
  }
  return false;
}

}  // namespace

void UncertaintySpec::validate() const {
  check_delta(delta);
  for (const auto& row : local_policy_set) {
    if (row.size() == 0 || (row.array() < 0.0).any() || std::abs(row.sum() - 1.0) > 1e-12) {
      throw std::invalid_argument("UncertaintySpec: local policy set entries must be action distributions");
    }
  }
}

BellmanUncertainty BellmanUncertainty::state_action(Eigen::MatrixXd values) {
  return {std::move(values), Eigen::VectorXd(), true};
}

BellmanUncertainty BellmanUncertainty::state_wise(Eigen::VectorXd values) {
  return {Eigen::MatrixXd(), std::move(values), false};
}

Eigen::VectorXd BellmanUncertainty::for_policy(const TabularPolicy& policy) const {
  if (decomposable) return policy.contract(per_state_action);
  if (static_cast<std::size_t>(per_state.size()) != policy.n_states()) {
    throw std::invalid_argument("BellmanUncertainty: state count mismatch");
  }
  return per_state;
}

BellmanUncertainty trivial_bellman_uncertainty(double gamma, std::size_t n_states, std::size_t n_actions) {
  check_gamma(gamma);
  return BellmanUncertainty::state_action(Eigen::MatrixXd::Constant(
      static_cast<Eigen::Index>(n_states), static_cast<Eigen::Index>(n_actions), 1.0 / (1.0 - gamma)));
}

BellmanUncertainty hoeffding_sa_uncertainty(const CountMatrix& counts, double gamma, double delta,
                                            std::size_t n_cells) {
  check_gamma(gamma);
  check_delta(delta);
  if (n_cells == 0) n_cells = static_cast<std::size_t>(counts.size());
  const double cap = 1.0 / (1.0 - gamma);
  const double width = std::sqrt(0.5 * std::log(2.0 * static_cast<double>(n_cells) / delta));
  Eigen::MatrixXd u(counts.rows(), counts.cols());
  for (Eigen::Index s = 0; s < counts.rows(); ++s) {
    for (Eigen::Index a = 0; a < counts.cols(); ++a) {
      const auto n = counts(s, a);
      u(s, a) = n > 0 ? cap * std::min(width / std::sqrt(static_cast<double>(n)), 1.0) : cap;
    }
  }
  return BellmanUncertainty::state_action(std::move(u));
}

BellmanUncertainty unit_count_penalty(const CountMatrix& counts) {
  Eigen::MatrixXd u(counts.rows(), counts.cols());
  for (Eigen::Index s = 0; s < counts.rows(); ++s) {
    for (Eigen::Index a = 0; a < counts.cols(); ++a) {
      const auto n = counts(s, a);
      u(s, a) = n > 0 ? 1.0 / std::sqrt(static_cast<double>(n)) : 1.0;
    }
  }
  return BellmanUncertainty::state_action(std::move(u));
}

std::vector<Eigen::VectorXd> deterministic_local_policies(std::size_t n_actions) {
  std::vector<Eigen::VectorXd> set;
  set.reserve(n_actions);
  for (std::size_t a = 0; a < n_actions; ++a) {
    set.push_back(Eigen::VectorXd::Unit(static_cast<Eigen::Index>(n_actions), static_cast<Eigen::Index>(a)));
  }
  return set;
}

BellmanUncertainty hoeffding_statewise_uncertainty(const CountMatrix& counts, const TabularPolicy& empirical_policy,
                                                   const TabularPolicy& policy,
                                                   std::span<const Eigen::VectorXd> local_policy_set, double gamma,
                                                   double delta) {
  check_gamma(gamma);
  check_delta(delta);
  if (local_policy_set.empty()) throw std::invalid_argument("hoeffding_statewise_uncertainty: empty local policy set");
  if (static_cast<std::size_t>(counts.rows()) != policy.n_states() ||
      static_cast<std::size_t>(counts.cols()) != policy.n_actions()) {
    throw std::invalid_argument("hoeffding_statewise_uncertainty: shape mismatch");
  }
  const double cap = 1.0 / (1.0 - gamma);
  const double log_term = 0.5 * std::log(2.0 * static_cast<double>(policy.n_states()) *
                                         static_cast<double>(local_policy_set.size()) / delta);
  Eigen::VectorXd u(counts.rows());
  for (Eigen::Index s = 0; s < counts.rows(); ++s) {
    const Eigen::VectorXd row = policy.probs().row(s).transpose();
    if (!row_in_set(row, local_policy_set)) {
      throw std::invalid_argument("hoeffding_statewise_uncertainty: policy row not in local policy set");
    }
    double weighted = 0.0;
    bool unsupported = false;
    for (Eigen::Index a = 0; a < counts.cols(); ++a) {
      const double p = row(a);
      if (p == 0.0) continue;
      if (counts(s, a) == 0 || empirical_policy.probs()(s, a) == 0.0) {
        unsupported = true;
        break;
      }
      weighted += p * p / static_cast<double>(counts(s, a));
    }
    u(s) = unsupported ? cap : cap * std::min(std::sqrt(log_term * weighted), 1.0);
  }
  return BellmanUncertainty::state_wise(std::move(u));
}

BellmanUncertainty make_bellman_uncertainty(const UncertaintySpec& spec, const EmpiricalModel& model) {
  spec.validate();
  switch (spec.kind) {
    case UncertaintyKind::trivial:
      return trivial_bellman_uncertainty(model.discount(), model.mdp().n_states(), model.mdp().n_actions());
    case UncertaintyKind::hoeffding_sa:
      return hoeffding_sa_uncertainty(model.counts(), model.discount(), spec.delta);
    case UncertaintyKind::hoeffding_statewise:
      break;
  }
  throw std::invalid_argument("make_bellman_uncertainty: state-wise uncertainty requires a policy");
}

BellmanUncertainty make_bellman_uncertainty(const UncertaintySpec& spec, const EmpiricalModel& model,
                                            const TabularPolicy& policy) {
  if (spec.kind != UncertaintyKind::hoeffding_statewise) return make_bellman_uncertainty(spec, model);
  spec.validate();
  const auto set = spec.local_policy_set.empty() ? deterministic_local_policies(model.mdp().n_actions())
                                                 : spec.local_policy_set;
  return hoeffding_statewise_uncertainty(model.counts(), model.empirical_policy(), policy, set, model.discount(),
                                         spec.delta);
}

ValueUncertainty value_uncertainty(const EmpiricalModel& model, const TabularPolicy& policy,
                                   const BellmanUncertainty& bellman) {
  return {solve_policy_system(model.mdp(), policy, bellman.for_policy(policy))};
}

Eigen::VectorXd relative_value_uncertainty(const EmpiricalModel& model, const TabularPolicy& pi,
                                           const TabularPolicy& pi_prime, const BellmanUncertainty& bellman) {
  if (!bellman.decomposable) {
    throw std::invalid_argument("relative_value_uncertainty: requires state-action-wise uncertainty");
  }
  const Eigen::VectorXd mu_prime = value_uncertainty(model, pi_prime, bellman).per_state;
  // u + gamma P_D mu' as a state-action quantity.
  const Eigen::MatrixXd backed = q_backup(model.mdp(), bellman.per_state_action, mu_prime).values;
  const Eigen::VectorXd rhs = pi.contract(backed) - pi_prime.contract(backed);
  return solve_policy_system(model.mdp(), pi, rhs);
}

Eigen::VectorXd total_variation(const TabularPolicy& policy, const TabularPolicy& other) {
  if (policy.n_states() != other.n_states() || policy.n_actions() != other.n_actions()) {
    throw std::invalid_argument("total_variation: shape mismatch");
  }
  return 0.5 * (policy.probs() - other.probs()).cwiseAbs().rowwise().sum();
}

Eigen::VectorXd proximal_penalty_vector(const TabularPolicy& policy, const TabularPolicy& empirical_policy,
                                        double gamma) {
  check_gamma(gamma);
  return total_variation(policy, empirical_policy) / ((1.0 - gamma) * (1.0 - gamma));
}

}  // namespace fdpo
