#pragma once

// Shared fixed instance. Reference values come from tests/oracle/fixed_instance.py.

#include "fdpo/dataset.hpp"
#include "fdpo/mdp.hpp"

#include <doctest.h>

#include <cmath>
#include <vector>

namespace fixtures {

inline fdpo::TabularMdp three_state_mdp() {
  Eigen::MatrixXd r(3, 2);
  r << 0.2, 0.8, 0.5, 0.1, 0.9, 0.3;
  Eigen::MatrixXd p(6, 3);
  p << 0.7, 0.2, 0.1,  //
      0.1, 0.6, 0.3,   //
      0.3, 0.3, 0.4,   //
      0.0, 0.5, 0.5,   //
      0.25, 0.25, 0.5, //
      0.6, 0.0, 0.4;
  Eigen::VectorXd rho(3);
  rho << 0.5, 0.3, 0.2;
  return fdpo::TabularMdp(r, std::vector<fdpo::RewardKind>(6, fdpo::RewardKind::bernoulli), p, 0.9, rho);
}

inline fdpo::TabularPolicy three_state_policy() {
  Eigen::MatrixXd probs(3, 2);
  probs << 0.6, 0.4, 1.0, 0.0, 0.3, 0.7;
  return fdpo::TabularPolicy(probs);
}

inline fdpo::CountMatrix three_state_counts() {
  fdpo::CountMatrix c(3, 2);
  c << 5, 0, 2, 8, 0, 0;
  return c;
}

/// Empirical model whose estimates equal the true MDP, with the counts above.
inline fdpo::EmpiricalModel three_state_model() {
  Eigen::MatrixXd emp(3, 2);
  emp << 1.0, 0.0, 0.2, 0.8, 0.5, 0.5;
  return fdpo::EmpiricalModel(three_state_mdp(), fdpo::TabularPolicy(emp), three_state_counts(), 0);
}

inline fdpo::TabularMdp one_state_mdp(const std::vector<double>& rewards, double gamma) {
  const auto A = static_cast<Eigen::Index>(rewards.size());
  Eigen::MatrixXd r(1, A);
  for (Eigen::Index a = 0; a < A; ++a) r(0, a) = rewards[static_cast<std::size_t>(a)];
  return fdpo::TabularMdp(r, std::vector<fdpo::RewardKind>(rewards.size(), fdpo::RewardKind::deterministic),
                          Eigen::MatrixXd::Ones(A, 1), gamma, Eigen::VectorXd::Ones(1));
}

inline void check_close(const Eigen::VectorXd& actual, const std::vector<double>& expected, double tol) {
  REQUIRE(static_cast<std::size_t>(actual.size()) == expected.size());
  for (std::size_t i = 0; i < expected.size(); ++i) {
    CHECK(std::abs(actual(static_cast<Eigen::Index>(i)) - expected[i]) <= tol);
  }
}

inline double max_abs_diff(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) { return (a - b).cwiseAbs().maxCoeff(); }

}  // namespace fixtures
