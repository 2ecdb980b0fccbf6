#include "fdpo/experiments.hpp"
#include "fdpo/rng.hpp"

#include <stdexcept>

namespace fdpo {

namespace {

std::size_t step(std::size_t state, std::size_t direction) {
  const std::size_t row = state / kGridWidth;
  const std::size_t col = state % kGridWidth;
  switch (direction) {
    case kUp:
      return row == 0 ? state : state - kGridWidth;
    case kDown:
      return row + 1 == kGridHeight ? state : state + kGridWidth;
    case kLeft:
      return col == 0 ? state : state - 1;
    case kRight:
      return col + 1 == kGridWidth ? state : state + 1;
    default:
      throw std::invalid_argument("gridworld: unknown direction");
  }
}

}  // namespace

TabularMdp generate_gridworld(std::uint64_t seed) {
  constexpr std::size_t S = kGridWidth * kGridHeight;
  constexpr std::size_t A = 4;
  Rng rng(seed);
  Eigen::MatrixXd reward(S, A);
  for (std::size_t s = 0; s < S; ++s) {
    for (std::size_t a = 0; a < A; ++a) reward(s, a) = rng.beta_k1(3.0);
  }
  Eigen::MatrixXd transition = Eigen::MatrixXd::Zero(S * A, S);
  const double other = kGridSlip / 3.0;
  for (std::size_t s = 0; s < S; ++s) {
    for (std::size_t a = 0; a < A; ++a) {
      for (std::size_t dir = 0; dir < A; ++dir) {
        transition(s * A + a, step(s, dir)) += dir == a ? 1.0 - kGridSlip : other;
      }
    }
  }
  return TabularMdp(std::move(reward), std::vector<RewardKind>(S * A, RewardKind::bernoulli), std::move(transition),
                    kGridDiscount, Eigen::VectorXd::Constant(S, 1.0 / static_cast<double>(S)));
}

TabularPolicy epsilon_greedy_behavior(const TabularPolicy& optimal, double epsilon) {
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw std::invalid_argument("epsilon must lie in [0, 1]");
  const double spread = epsilon / static_cast<double>(optimal.n_actions());
  Eigen::MatrixXd probs = (1.0 - epsilon) * optimal.probs();
  probs.array() += spread;
  return TabularPolicy(std::move(probs));
}

TabularMdp bandit_mdp() {
  Eigen::MatrixXd reward = Eigen::MatrixXd::Constant(1, kBanditArms, 0.01);
  reward(0, 0) = 0.99;
  return TabularMdp(std::move(reward), std::vector<RewardKind>(kBanditArms, RewardKind::bernoulli),
                    Eigen::MatrixXd::Ones(kBanditArms, 1), 0.0, Eigen::VectorXd::Ones(1));
}

CountMatrix bandit_counts() {
  CountMatrix counts = CountMatrix::Ones(1, kBanditArms);
  counts(0, 0) = kBanditGoodPulls;
  return counts;
}

}  // namespace fdpo
