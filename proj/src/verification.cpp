#include "fdpo/verification.hpp"

#include "fdpo/algorithms.hpp"
#include "fdpo/parallel.hpp"
#include "fdpo/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace fdpo {

namespace {

std::size_t uniform_index(Rng& rng, std::size_t lo, std::size_t hi) {
  return lo + static_cast<std::size_t>(rng.uniform() * static_cast<double>(hi - lo + 1));
}

Eigen::VectorXd random_vector(Rng& rng, Eigen::Index n, double hi) {
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = hi * rng.uniform();
  return v;
}

CheckResult finish_check(std::string name, std::size_t trials, std::size_t failures, double worst) {
  return {std::move(name), trials, failures, worst, failures == 0};
}

double max_abs(const Eigen::VectorXd& v) { return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff(); }

}  // namespace

BoundReport tight_proxy_instance_report() { return proxy_regret_decomposition({{0.0, 1.0}, {1.0, 1.0}}); }

CheckResult verify_theorem1(std::size_t trials, std::uint64_t seed, std::size_t max_choices) {
  std::size_t failures = 0;
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; t < trials; ++t) {
    Rng rng(derive_seed(seed, t));
    const std::size_t n = uniform_index(rng, 1, max_choices);
    // Half the instances use a coarse grid so that argmax ties occur.
    const bool coarse = rng.bernoulli(0.5);
    ProxyInstance instance;
    for (std::size_t x = 0; x < n; ++x) {
      const double f = rng.uniform();
      const double g = rng.uniform();
      instance.objective.push_back(coarse ? std::floor(f * 5.0) / 4.0 : f);
      instance.proxy.push_back(coarse ? std::floor(g * 5.0) / 4.0 : g);
    }
    const BoundReport report = proxy_regret_decomposition(instance);
    worst = std::max(worst, report.lhs - report.rhs);
    if (!report.holds) ++failures;
  }
  const BoundReport tight = tight_proxy_instance_report();
  if (!tight.holds || tight.lhs != tight.rhs) ++failures;
  return finish_check("theorem1", trials + 1, failures, worst);
}

RandomInstance random_instance(std::uint64_t seed, std::size_t max_states, std::size_t max_actions) {
  Rng rng(seed);
  const std::size_t S = uniform_index(rng, 1, max_states);
  const std::size_t A = uniform_index(rng, 1, max_actions);
  const double gamma = 0.99 * rng.uniform();
  TabularMdp mdp = random_mdp(S, A, gamma, rng);
  const TabularPolicy behavior = random_policy(S, A, rng);
  const DataDistribution phi = stationary_data_distribution(mdp, behavior);
  const std::size_t d = uniform_index(rng, 0, 3 * S * A);
  const TransitionDataset data = collect(mdp, phi, d, rng.next_u64());
  EmpiricalModel model = build_empirical_model(data, mdp, rng.next_u64());
  return {std::move(mdp), std::move(model)};
}

CheckResult verify_residual_visitation(std::size_t trials, std::uint64_t seed, double tol) {
  std::size_t failures = 0;
  double worst = 0.0;
  for (std::size_t t = 0; t < trials; ++t) {
    const RandomInstance inst = random_instance(derive_seed(seed, t));
    Rng rng(derive_seed(seed, t, 1));
    // Alternate between the true and the empirical MDP.
    const TabularMdp& xi = t % 2 == 0 ? inst.mdp : inst.model.mdp();
    const TabularPolicy pi = random_policy(xi.n_states(), xi.n_actions(), rng);
    const ValueVector v{random_vector(rng, static_cast<Eigen::Index>(xi.n_states()), 1.0 / (1.0 - xi.discount()))};
    const Eigen::VectorXd v_pi = exact_policy_evaluation(xi, pi).values;
    const Eigen::VectorXd residual = bellman_backup(xi, pi, v).values - v.values;
    const Eigen::MatrixXd visitation = discounted_visitation(xi, pi);
    const double signed_error = max_abs(v_pi - v.values - visitation * residual);
    const Eigen::VectorXd abs_gap = (v_pi - v.values).cwiseAbs() - visitation * residual.cwiseAbs();
    const double abs_excess = std::max(0.0, abs_gap.maxCoeff());
    worst = std::max({worst, signed_error, abs_excess});
    if (signed_error > tol || abs_excess > tol) ++failures;
  }
  return finish_check("residual_visitation", trials, failures, worst);
}

CheckResult verify_ua_decomposition(std::size_t trials, std::uint64_t seed, double tol) {
  std::size_t failures = 0;
  double worst = 0.0;
  for (std::size_t t = 0; t < trials; ++t) {
    const RandomInstance inst = random_instance(derive_seed(seed, t));
    Rng rng(derive_seed(seed, t, 1));
    const EmpiricalModel& model = inst.model;
    const TabularPolicy pi = random_policy(model.mdp().n_states(), model.mdp().n_actions(), rng);
    const double alpha = rng.uniform();
    const BellmanUncertainty u = hoeffding_sa_uncertainty(model.counts(), model.discount(), 0.1);
    const Eigen::VectorXd lower = ua_fdpe(model, pi, u, alpha).values;
    const Eigen::VectorXd expected = naive_fdpe(model, pi).values - alpha * value_uncertainty(model, pi, u).per_state;
    const double error = max_abs(lower - expected);
    worst = std::max(worst, error);
    if (error > tol) ++failures;
  }
  return finish_check("ua_decomposition", trials, failures, worst);
}

CheckResult verify_relative_uncertainty(std::size_t trials, std::uint64_t seed, double tol) {
  std::size_t failures = 0;
  double worst = 0.0;
  for (std::size_t t = 0; t < trials; ++t) {
    const RandomInstance inst = random_instance(derive_seed(seed, t));
    Rng rng(derive_seed(seed, t, 1));
    const EmpiricalModel& model = inst.model;
    const std::size_t S = model.mdp().n_states();
    const std::size_t A = model.mdp().n_actions();
    const TabularPolicy pi = t % 3 == 0 ? random_deterministic_policy(S, A, rng) : random_policy(S, A, rng);
    const TabularPolicy pi_prime = t % 3 == 0 ? model.empirical_policy() : random_policy(S, A, rng);
    const BellmanUncertainty u = hoeffding_sa_uncertainty(model.counts(), model.discount(), 0.1);
    const Eigen::VectorXd relative = relative_value_uncertainty(model, pi, pi_prime, u);
    const Eigen::VectorXd direct =
        value_uncertainty(model, pi, u).per_state - value_uncertainty(model, pi_prime, u).per_state;
    const double error = max_abs(relative - direct);
    worst = std::max(worst, error);
    if (error > tol) ++failures;
  }
  return finish_check("relative_value_uncertainty", trials, failures, worst);
}

CheckResult verify_conversion_inequality(std::size_t trials, std::uint64_t seed, double tol) {
  std::size_t failures = 0;
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; t < trials; ++t) {
    const RandomInstance inst = random_instance(derive_seed(seed, t));
    Rng rng(derive_seed(seed, t, 1));
    const EmpiricalModel& model = inst.model;
    const std::size_t S = model.mdp().n_states();
    const std::size_t A = model.mdp().n_actions();
    const TabularPolicy pi = t % 2 == 0 ? random_deterministic_policy(S, A, rng) : random_policy(S, A, rng);
    const BellmanUncertainty u = trivial_bellman_uncertainty(model.discount(), S, A);
    const Eigen::VectorXd mu = value_uncertainty(model, pi, u).per_state;
    const Eigen::VectorXd mu_emp = value_uncertainty(model, model.empirical_policy(), u).per_state;
    const Eigen::VectorXd penalty = solve_policy_system(
        model.mdp(), pi, proximal_penalty_vector(pi, model.empirical_policy(), model.discount()));
    const double excess = (mu - mu_emp - penalty).maxCoeff();
    worst = std::max(worst, excess);
    if (excess > tol) ++failures;
  }
  return finish_check("conversion_inequality", trials, failures, worst);
}

DrawOutcome ensemble_draw(const EnsembleConfig& config, std::size_t index) {
  Rng rng(derive_seed(config.seed, index));
  const std::size_t S = config.n_states;
  const std::size_t A = config.n_actions;
  const TabularMdp mdp = random_mdp(S, A, config.gamma, rng);
  const TabularPolicy behavior = random_policy(S, A, rng);
  const DataDistribution phi = stationary_data_distribution(mdp, behavior);
  const TransitionDataset data = collect(mdp, phi, config.dataset_size, rng.next_u64());
  const EmpiricalModel model = build_empirical_model(data, mdp, rng.next_u64());
  const UncertaintySpec spec{UncertaintyKind::hoeffding_sa, config.delta, {}};
  const BellmanUncertainty u = make_bellman_uncertainty(spec, model);
  const double cap = 1.0 / (1.0 - config.gamma);

  std::vector<Eigen::VectorXd> probes{Eigen::VectorXd::Zero(static_cast<Eigen::Index>(S)),
                                      random_vector(rng, static_cast<Eigen::Index>(S), cap)};
  for_each_deterministic_policy(S, A, [&](const TabularPolicy& pi) {
    probes.push_back(exact_policy_evaluation(mdp, pi).values);
  });

  DrawOutcome out;
  // Deterministic policies select single pairs, so the event reduces to a
  // per-pair comparison.
  out.bellman_event = true;
  for (const auto& v : probes) {
    const Eigen::MatrixXd gap = q_backup(mdp, mdp.mean_reward(), v).values - q_backup(model.mdp(), model.reward(), v).values;
    if (((gap.cwiseAbs() - u.per_state_action).array() > 1e-12).any()) out.bellman_event = false;
  }
  out.lemma_event = true;
  out.lower_bound_event = true;
  for_each_deterministic_policy(S, A, [&](const TabularPolicy& pi) {
    const Eigen::VectorXd v_true = exact_policy_evaluation(mdp, pi).values;
    const Eigen::VectorXd v_emp = naive_fdpe(model, pi).values;
    const Eigen::VectorXd mu = value_uncertainty(model, pi, u).per_state;
    if (((v_true - v_emp).cwiseAbs() - mu).maxCoeff() > 1e-9) out.lemma_event = false;
    if ((ua_fdpe(model, pi, u, 1.0).values - v_true).maxCoeff() > 1e-9) out.lower_bound_event = false;
  });

  out.naive = naive_bound_report(mdp, model, spec);
  out.ua_zero = ua_bound_report(mdp, model, spec, 0.0);
  out.ua_one = ua_bound_report(mdp, model, spec, 1.0);
  out.proximal_one = proximal_bound_report(mdp, model, spec, 1.0);
  const std::uint64_t seed = derive_seed(config.seed, index);
  for (BoundReport* r : {&out.naive, &out.ua_zero, &out.ua_one, &out.proximal_one}) r->seed = seed;
  return out;
}

EnsembleSummary run_coverage_ensemble(const EnsembleConfig& config) {
  if (config.draws == 0) throw std::invalid_argument("run_coverage_ensemble: draws must be positive");
  const std::vector<DrawOutcome> outcomes =
      map_trials_parallel(config.draws, config.jobs, [&](std::size_t i) { return ensemble_draw(config, i); });
  EnsembleSummary summary;
  summary.draws = outcomes.size();
  const double n = static_cast<double>(outcomes.size());
  for (const auto& o : outcomes) {
    summary.bellman_frequency += o.bellman_event;
    summary.lemma_frequency += o.lemma_event;
    summary.lower_bound_frequency += o.lower_bound_event;
    summary.theorem2_frequency += o.naive.holds;
    summary.theorem3_frequency += o.ua_one.holds;
    summary.theorem4_frequency += o.proximal_one.holds;
    summary.alpha_zero_difference =
        std::max({summary.alpha_zero_difference, std::abs(o.ua_zero.lhs - o.naive.lhs),
                  std::abs(o.ua_zero.rhs - o.naive.rhs), std::abs(o.ua_zero.inf_term - o.naive.inf_term),
                  std::abs(o.ua_zero.sup_term - o.naive.sup_term)});
    if (o.ua_one.sup_term != 0.0) summary.alpha_one_sup_zero = false;
    summary.mean_naive_rhs += o.naive.rhs;
    summary.mean_ua_rhs += o.ua_one.rhs;
  }
  for (double* f : {&summary.bellman_frequency, &summary.lemma_frequency, &summary.lower_bound_frequency,
                    &summary.theorem2_frequency, &summary.theorem3_frequency, &summary.theorem4_frequency,
                    &summary.mean_naive_rhs, &summary.mean_ua_rhs}) {
    *f /= n;
  }
  return summary;
}

}  // namespace fdpo
