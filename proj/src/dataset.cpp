#include "fdpo/dataset.hpp"

#include "fdpo/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

namespace fdpo {

namespace {

std::vector<double> cumulative(const Eigen::Ref<const Eigen::RowVectorXd>& weights) {
  std::vector<double> cdf(static_cast<std::size_t>(weights.size()));
  double acc = 0.0;
  for (Eigen::Index i = 0; i < weights.size(); ++i) {
    acc += weights(i);
    cdf[static_cast<std::size_t>(i)] = acc;
  }
  return cdf;
}

class TransitionSampler {
 public:
  explicit TransitionSampler(const TabularMdp& mdp) : mdp_(mdp), next_cdf_(mdp.n_cells()) {}

  Transition draw(std::size_t s, std::size_t a, Rng& rng) {
    const std::size_t cell = mdp_.cell(s, a);
    const double mean = mdp_.mean_reward()(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(a));
    const double reward =
        mdp_.reward_kind(s, a) == RewardKind::bernoulli ? (rng.bernoulli(mean) ? 1.0 : 0.0) : mean;
    auto& cdf = next_cdf_[cell];
    if (cdf.empty()) cdf = cumulative(mdp_.transition().row(static_cast<Eigen::Index>(cell)));
    return {s, a, reward, rng.categorical_cdf(cdf)};
  }

 private:
  const TabularMdp& mdp_;
  std::vector<std::vector<double>> next_cdf_;
};

}  // namespace

TransitionDataset::TransitionDataset(std::size_t n_states, std::size_t n_actions, std::vector<Transition> records)
    : n_states_(n_states),
      n_actions_(n_actions),
      records_(std::move(records)),
      counts_(CountMatrix::Zero(static_cast<Eigen::Index>(n_states), static_cast<Eigen::Index>(n_actions))) {
  for (const auto& t : records_) {
    if (t.state >= n_states_ || t.action >= n_actions_ || t.next_state >= n_states_) {
      throw std::invalid_argument("TransitionDataset: index out of range");
    }
    if (!(t.reward >= 0.0 && t.reward <= 1.0)) throw std::invalid_argument("TransitionDataset: reward outside [0, 1]");
    ++counts_(static_cast<Eigen::Index>(t.state), static_cast<Eigen::Index>(t.action));
  }
  state_counts_ = counts_.rowwise().sum();
}

DataDistribution::DataDistribution(Eigen::MatrixXd probs) : probs_(std::move(probs)) {
  if (probs_.size() == 0) throw std::invalid_argument("DataDistribution: empty");
  if ((probs_.array() < 0.0).any() || !probs_.allFinite()) {
    throw std::invalid_argument("DataDistribution: negative or non-finite mass");
  }
  if (std::abs(probs_.sum() - 1.0) > 1e-12) throw std::invalid_argument("DataDistribution: mass does not sum to 1");
}

DataDistribution DataDistribution::point_mass(std::size_t n_states, std::size_t n_actions, std::size_t s,
                                              std::size_t a) {
  Eigen::MatrixXd probs =
      Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n_states), static_cast<Eigen::Index>(n_actions));
  probs(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(a)) = 1.0;
  return DataDistribution(std::move(probs));
}

EmpiricalModel::EmpiricalModel(TabularMdp mdp, TabularPolicy empirical_policy, CountMatrix counts,
                               std::uint64_t fill_seed)
    : mdp_(std::move(mdp)),
      empirical_policy_(std::move(empirical_policy)),
      counts_(std::move(counts)),
      fill_seed_(fill_seed) {
  if (static_cast<std::size_t>(counts_.rows()) != mdp_.n_states() ||
      static_cast<std::size_t>(counts_.cols()) != mdp_.n_actions() ||
      empirical_policy_.n_states() != mdp_.n_states() || empirical_policy_.n_actions() != mdp_.n_actions()) {
    throw std::invalid_argument("EmpiricalModel: shape mismatch");
  }
}

DataDistribution stationary_data_distribution(const TabularMdp& mdp, const TabularPolicy& behavior,
                                              std::size_t horizon) {
  if (horizon < 1) throw std::invalid_argument("stationary_data_distribution: horizon must be >= 1");
  const Eigen::MatrixXd chain = policy_transition(mdp, behavior);
  Eigen::RowVectorXd dist = mdp.start_dist().transpose();
  Eigen::RowVectorXd total = Eigen::RowVectorXd::Zero(dist.size());
  for (std::size_t t = 0; t < horizon; ++t) {
    total += dist;
    dist = dist * chain;
  }
  total /= total.sum();
  Eigen::MatrixXd probs = behavior.probs();
  for (Eigen::Index s = 0; s < probs.rows(); ++s) probs.row(s) *= total(s);
  probs /= probs.sum();
  return DataDistribution(std::move(probs));
}

TransitionDataset collect(const TabularMdp& mdp, const DataDistribution& phi, std::size_t d, std::uint64_t seed) {
  const auto& probs = phi.probs();
  if (static_cast<std::size_t>(probs.rows()) != mdp.n_states() ||
      static_cast<std::size_t>(probs.cols()) != mdp.n_actions()) {
    throw std::invalid_argument("collect: data distribution shape mismatch");
  }
  // Row-major flattening so cell index matches TabularMdp::cell.
  Eigen::RowVectorXd flat(static_cast<Eigen::Index>(mdp.n_cells()));
  for (Eigen::Index s = 0; s < probs.rows(); ++s) {
    for (Eigen::Index a = 0; a < probs.cols(); ++a) flat(s * probs.cols() + a) = probs(s, a);
  }
  const std::vector<double> cell_cdf = cumulative(flat);

  Rng rng(seed);
  TransitionSampler sampler(mdp);
  std::vector<Transition> records;
  records.reserve(d);
  for (std::size_t i = 0; i < d; ++i) {
    const std::size_t cell = rng.categorical_cdf(cell_cdf);
    records.push_back(sampler.draw(cell / mdp.n_actions(), cell % mdp.n_actions(), rng));
  }
  return TransitionDataset(mdp.n_states(), mdp.n_actions(), std::move(records));
}

TransitionDataset collect_with_counts(const TabularMdp& mdp, const CountMatrix& counts, std::uint64_t seed) {
  if (static_cast<std::size_t>(counts.rows()) != mdp.n_states() ||
      static_cast<std::size_t>(counts.cols()) != mdp.n_actions() || (counts.array() < 0).any()) {
    throw std::invalid_argument("collect_with_counts: invalid counts");
  }
  Rng rng(seed);
  TransitionSampler sampler(mdp);
  std::vector<Transition> records;
  records.reserve(static_cast<std::size_t>(counts.sum()));
  for (std::size_t s = 0; s < mdp.n_states(); ++s) {
    for (std::size_t a = 0; a < mdp.n_actions(); ++a) {
      for (std::int64_t k = 0; k < counts(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(a)); ++k) {
        records.push_back(sampler.draw(s, a, rng));
      }
    }
  }
  return TransitionDataset(mdp.n_states(), mdp.n_actions(), std::move(records));
}

EmpiricalModel build_empirical_model(const TransitionDataset& dataset, const TabularMdp& shape,
                                     std::uint64_t fill_seed) {
  if (dataset.n_states() != shape.n_states() || dataset.n_actions() != shape.n_actions()) {
    throw std::invalid_argument("build_empirical_model: dataset shape does not match MDP");
  }
  const auto S = static_cast<Eigen::Index>(shape.n_states());
  const auto A = static_cast<Eigen::Index>(shape.n_actions());
  Eigen::MatrixXd reward_sum = Eigen::MatrixXd::Zero(S, A);
  Eigen::MatrixXd next_counts = Eigen::MatrixXd::Zero(S * A, S);
  for (const auto& t : dataset.records()) {
    const auto s = static_cast<Eigen::Index>(t.state);
    const auto a = static_cast<Eigen::Index>(t.action);
    reward_sum(s, a) += t.reward;
    next_counts(s * A + a, static_cast<Eigen::Index>(t.next_state)) += 1.0;
  }

  const CountMatrix& counts = dataset.counts();
  Rng fill(fill_seed);
  Eigen::MatrixXd reward(S, A);
  Eigen::MatrixXd transition(S * A, S);
  for (Eigen::Index s = 0; s < S; ++s) {
    for (Eigen::Index a = 0; a < A; ++a) {
      const auto n = counts(s, a);
      if (n > 0) {
        const double inv = 1.0 / static_cast<double>(n);
        reward(s, a) = std::min(1.0, reward_sum(s, a) * inv);
        transition.row(s * A + a) = next_counts.row(s * A + a) * inv;
      } else {
        reward(s, a) = fill.uniform();
        transition.row(s * A + a).setConstant(1.0 / static_cast<double>(S));
      }
    }
  }

  Eigen::MatrixXd policy(S, A);
  const CountVector state_counts = dataset.state_counts();
  for (Eigen::Index s = 0; s < S; ++s) {
    if (state_counts(s) > 0) {
      policy.row(s) = counts.row(s).cast<double>() / static_cast<double>(state_counts(s));
    } else {
      policy.row(s).setConstant(1.0 / static_cast<double>(A));
    }
  }

  return EmpiricalModel(shape.with_model(std::move(reward), std::move(transition)), TabularPolicy(std::move(policy)),
                        counts, fill_seed);
}

void write_dataset_csv(std::ostream& out, const TransitionDataset& dataset) {
  out << "state,action,reward,next_state\n";
  char buf[64];
  for (const auto& t : dataset.records()) {
    std::snprintf(buf, sizeof buf, "%.17g", t.reward);
    out << t.state << ',' << t.action << ',' << buf << ',' << t.next_state << '\n';
  }
}

TransitionDataset read_dataset_csv(std::istream& in, std::size_t n_states, std::size_t n_actions) {
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("dataset csv: missing header");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "state,action,reward,next_state") throw std::invalid_argument("dataset csv: unexpected header");
  std::vector<Transition> records;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::string cell[4];
    for (auto& c : cell) {
      if (!std::getline(fields, c, ',')) {
        throw std::invalid_argument("dataset csv: line " + std::to_string(line_no) + " has too few fields");
      }
    }
    try {
      const long long s = std::stoll(cell[0]);
      const long long a = std::stoll(cell[1]);
      const double r = std::stod(cell[2]);
      const long long sp = std::stoll(cell[3]);
      if (s < 0 || a < 0 || sp < 0 || static_cast<std::size_t>(s) >= n_states ||
          static_cast<std::size_t>(a) >= n_actions || static_cast<std::size_t>(sp) >= n_states) {
        throw std::out_of_range("index");
      }
      if (!(r >= 0.0 && r <= 1.0)) throw std::out_of_range("reward");
      records.push_back({static_cast<std::size_t>(s), static_cast<std::size_t>(a), r, static_cast<std::size_t>(sp)});
    } catch (const std::exception&) {
      throw std::invalid_argument("dataset csv: invalid record on line " + std::to_string(line_no));
    }
  }
  return TransitionDataset(n_states, n_actions, std::move(records));
}

}  // namespace fdpo
