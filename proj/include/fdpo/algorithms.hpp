#pragma once

#include "fdpo/dataset.hpp"
#include "fdpo/mdp.hpp"
#include "fdpo/uncertainty.hpp"

#include <string>
#include <string_view>

namespace fdpo {

enum class Family { imitation, naive, ua_pessimistic, proximal_pessimistic };

/// How penalty constants are applied.
///  literal:  UA penalty is the configured Bellman uncertainty, proximal
///            coefficient is alpha / (1-gamma)^2.
///  absorbed: UA penalty is n^{-1/2} (1 when unvisited), proximal
///            coefficient is alpha. All constants live in alpha.
enum class PenaltyScale { literal, absorbed };

enum class SolveMethod { policy_iteration, value_iteration };

struct AlgorithmConfig {
  Family family = Family::naive;
  double alpha = 0.0;
  UncertaintySpec uncertainty;
  PenaltyScale penalty_scale = PenaltyScale::literal;
  SolverLimits limits;

  void validate() const;
};

std::string_view family_name(Family family);
/// Accepts the canonical names plus the short CLI forms `ua` and `proximal`.
Family parse_family(std::string_view name);
std::string_view penalty_scale_name(PenaltyScale scale);
PenaltyScale parse_penalty_scale(std::string_view name);

struct AlgorithmResult {
  TabularPolicy policy;
  /// The family's own (possibly penalized) evaluation of `policy`.
  ValueVector value;
  std::size_t sweeps = 0;
};

TabularPolicy imitation(const EmpiricalModel& model);

ValueVector naive_fdpe(const EmpiricalModel& model, const TabularPolicy& policy);
TabularPolicy naive_fdpo(const EmpiricalModel& model, SolveMethod method = SolveMethod::policy_iteration,
                         const SolverLimits& limits = {});

/// (I - gamma A^pi P_D)^{-1} (A^pi r_D - alpha u^pi)
ValueVector ua_fdpe(const EmpiricalModel& model, const TabularPolicy& policy, const BellmanUncertainty& bellman,
                    double alpha);

/// Policy iteration on the reward r_D - alpha * penalty with dynamics P_D.
/// `penalty` must be state-action-wise.
AlgorithmResult ua_fdpo(const EmpiricalModel& model, const BellmanUncertainty& penalty, double alpha,
                        const SolverLimits& limits = {});
AlgorithmResult ua_fdpo(const EmpiricalModel& model, const UncertaintySpec& spec, double alpha,
                        const SolverLimits& limits = {});

/// Maximizer of sum_a p(a) q(a) - coefficient * TV(p, emp_row) over the
/// simplex. Coefficient 0 gives the deterministic lowest-index argmax.
/// Otherwise actions with q above max q - coefficient keep their empirical
/// mass and the argmax takes the rest.
Eigen::VectorXd proximal_local_opt_coefficient(const Eigen::Ref<const Eigen::VectorXd>& q_row,
                                               const Eigen::Ref<const Eigen::VectorXd>& emp_row, double coefficient);
/// Local optimizer with coefficient alpha / (1-gamma)^2.
Eigen::VectorXd proximal_local_opt(const Eigen::Ref<const Eigen::VectorXd>& q_row,
                                   const Eigen::Ref<const Eigen::VectorXd>& emp_row, double gamma, double alpha);

/// (I - gamma A^pi P_D)^{-1} (A^pi r_D - coefficient * TV_S(pi, empirical)), with
/// coefficient alpha / (1-gamma)^2.
ValueVector proximal_fdpe(const EmpiricalModel& model, const TabularPolicy& policy, double alpha);
ValueVector proximal_fdpe_coefficient(const EmpiricalModel& model, const TabularPolicy& policy, double coefficient);

/// Proximal policy iteration for an arbitrary state-action reward on the
/// dynamics of `dynamics`. Starts from `anchor` and applies the local
/// optimizer in every state each sweep. Stops when the policy repeats or the
/// penalized value stops improving.
AlgorithmResult proximal_policy_iteration(const TabularMdp& dynamics, const Eigen::MatrixXd& reward,
                                          const TabularPolicy& anchor, double coefficient,
                                          const SolverLimits& limits = {});

AlgorithmResult proximal_fdpo(const EmpiricalModel& model, double alpha, const SolverLimits& limits = {});
AlgorithmResult proximal_fdpo_coefficient(const EmpiricalModel& model, double coefficient,
                                          const SolverLimits& limits = {});

/// Runs the configured family.
AlgorithmResult solve(const EmpiricalModel& model, const AlgorithmConfig& config);

}  // namespace fdpo
