#pragma once

#include "fdpo/dataset.hpp"
#include "fdpo/mdp.hpp"
#include "fdpo/uncertainty.hpp"

#include <cstdint>
#include <functional>
#include <vector>

namespace fdpo {

/// Finite choice set with a true objective and a proxy. Ties in either
/// argmax go to the lowest index.
struct ProxyInstance {
  std::vector<double> objective;
  std::vector<double> proxy;

  void validate() const;
};

struct BoundReport {
  double lhs = 0.0;
  double rhs = 0.0;
  double inf_term = 0.0;
  double sup_term = 0.0;
  bool holds = false;
  std::uint64_t seed = 0;
  double delta = 0.0;
  double alpha = 0.0;
};

inline constexpr double kBoundSlack = 1e-9;

/// lhs = f(x*) - f(xhat*), inf = min_x [f(x*) - f(x)] + [f(x) - fhat(x)],
/// sup = max_x fhat(x) - f(x).
BoundReport proxy_regret_decomposition(const ProxyInstance& instance);

/// Naive-family policy bound. The sup term is exact (policy iteration on
/// reward u with dynamics P_D). The inf term is minimized over
/// deterministic policies, which can only over-estimate it.
BoundReport naive_bound_report(const TabularMdp& mdp, const EmpiricalModel& model, const UncertaintySpec& spec);

/// Inf term weighted (1 + alpha), sup term weighted (1 - alpha).
BoundReport ua_bound_report(const TabularMdp& mdp, const EmpiricalModel& model, const UncertaintySpec& spec,
                            double alpha);

/// Terms are reported relative to the empirical policy:
///   inf = min_pi subopt(pi) + E_rho[mu^pi + alpha mu^emp + alpha V^pi TV / (1-gamma)^2]
///   sup = max_pi E_rho[mu^pi - alpha mu^emp - alpha V^pi TV / (1-gamma)^2]
/// where V^pi is the empirical discounted visitation. The mu^emp pieces
/// cancel in the sum. The inf ranges over deterministic policies, the
/// empirical policy and the returned one. The sup is solved by proximal
/// policy iteration on reward u.
BoundReport proximal_bound_report(const TabularMdp& mdp, const EmpiricalModel& model, const UncertaintySpec& spec,
                                  double alpha);

/// Proximal sup objective E_rho[mu^pi - alpha V^pi TV(pi, emp) / (1-gamma)^2] of one policy.
double proximal_sup_objective(const EmpiricalModel& model, const BellmanUncertainty& bellman,
                              const TabularPolicy& policy, double alpha);

/// Value-based selection as a proxy problem over the deterministic
/// policies: f = E_rho[v^pi_M], fhat = E_rho[evaluate(pi)].
BoundReport value_based_corollary(const TabularMdp& mdp,
                                  const std::function<ValueVector(const TabularPolicy&)>& evaluate);

}  // namespace fdpo
