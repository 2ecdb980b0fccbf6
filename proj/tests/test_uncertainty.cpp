#include "fdpo/uncertainty.hpp"
#include "fdpo/rng.hpp"
#include "fdpo/verification.hpp"

#include "fixtures.hpp"

using namespace fdpo;

TEST_CASE("trivial bound") {
  CHECK(trivial_bellman_uncertainty(0.0, 2, 3).per_state_action == Eigen::MatrixXd::Ones(2, 3));
  CHECK(fixtures::max_abs_diff(trivial_bellman_uncertainty(0.9, 2, 2).per_state_action,
                               Eigen::MatrixXd::Constant(2, 2, 10.0)) <= 1e-14);
  CHECK(fixtures::max_abs_diff(trivial_bellman_uncertainty(0.99, 1, 1).per_state_action,
                               Eigen::MatrixXd::Constant(1, 1, 100.0)) <= 1e-12);
  CHECK_THROWS_AS(trivial_bellman_uncertainty(1.0, 1, 1), std::invalid_argument);
}

TEST_CASE("state-action Hoeffding bound") {
  CountMatrix counts(2, 2);
  counts << 50, 0, 1, 1'000'000'000'000;
  const BellmanUncertainty u = hoeffding_sa_uncertainty(counts, 0.9, 0.1);
  CHECK(u.decomposable);
  CHECK(std::abs(u.per_state_action(0, 0) - 2.0933290794029212) <= 1e-14);
  CHECK(std::abs(u.per_state_action(0, 1) - 10.0) <= 1e-14);
  CHECK(std::abs(u.per_state_action(1, 0) - 10.0) <= 1e-14);
  CHECK(u.per_state_action(1, 1) < 1e-4 * 10.0 * std::sqrt(0.5 * std::log(80.0)));

  SUBCASE("fixed instance") {
    const BellmanUncertainty fixed = hoeffding_sa_uncertainty(fixtures::three_state_counts(), 0.9, 0.1);
    Eigen::MatrixXd expected(3, 2);
    expected << 6.9191702846382137542, 10, 10, 5.4700844045030774519, 10, 10;
    CHECK(fixtures::max_abs_diff(fixed.per_state_action, expected) <= 1e-13);
  }
  SUBCASE("dominance and monotonicity") {
    double previous = 1e300;
    for (std::int64_t n = 0; n < 2000; n += 7) {
      CountMatrix c = CountMatrix::Constant(1, 1, n);
      const double v = hoeffding_sa_uncertainty(c, 0.95, 0.05, 8).per_state_action(0, 0);
      CHECK(v <= 1.0 / (1.0 - 0.95) + 1e-12);
      CHECK(v <= previous);
      previous = v;
    }
  }
  CHECK_THROWS_AS(hoeffding_sa_uncertainty(counts, 0.9, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(hoeffding_sa_uncertainty(counts, 0.9, 1.0), std::invalid_argument);
}

TEST_CASE("state-wise Hoeffding bound") {
  SUBCASE("deterministic local set reduces to the state-action bound") {
    const EmpiricalModel model = fixtures::three_state_model();
    const std::vector<std::size_t> acts{1, 1, 0};
    const TabularPolicy pi = TabularPolicy::deterministic(acts, 2);
    const auto set = deterministic_local_policies(2);
    const BellmanUncertainty sw =
        hoeffding_statewise_uncertainty(model.counts(), model.empirical_policy(), pi, set, 0.9, 0.1);
    CHECK_FALSE(sw.decomposable);
    fixtures::check_close(sw.per_state, {10.0, 5.4700844045030774519, 10.0}, 1e-13);
    const Eigen::VectorXd composed = pi.contract(hoeffding_sa_uncertainty(model.counts(), 0.9, 0.1).per_state_action);
    CHECK(fixtures::max_abs_diff(sw.per_state, composed) <= 1e-14);

    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      Rng rng(seed);
      const std::size_t S = 1 + seed % 5;
      const std::size_t A = 1 + seed % 3;
      CountMatrix counts(static_cast<Eigen::Index>(S), static_cast<Eigen::Index>(A));
      for (Eigen::Index i = 0; i < counts.size(); ++i) counts(i) = static_cast<std::int64_t>(rng.next_u64() % 6);
      Eigen::MatrixXd emp(counts.rows(), counts.cols());
      for (Eigen::Index s = 0; s < counts.rows(); ++s) {
        const auto total = static_cast<double>(counts.row(s).sum());
        for (Eigen::Index a = 0; a < counts.cols(); ++a) {
          emp(s, a) = total > 0 ? static_cast<double>(counts(s, a)) / total : 1.0 / static_cast<double>(A);
        }
      }
      const TabularPolicy det = random_deterministic_policy(S, A, rng);
      const auto local = deterministic_local_policies(A);
      const Eigen::VectorXd lhs =
          hoeffding_statewise_uncertainty(counts, TabularPolicy(emp), det, local, 0.9, 0.1).per_state;
      const Eigen::VectorXd rhs = det.contract(hoeffding_sa_uncertainty(counts, 0.9, 0.1).per_state_action);
      CHECK(fixtures::max_abs_diff(lhs, rhs) <= 1e-13);
    }
  }
  SUBCASE("mixing two equally observed actions is best at one half") {
    CountMatrix counts = CountMatrix::Constant(1, 2, 2);
    const TabularPolicy emp = TabularPolicy::uniform(1, 2);
    std::vector<Eigen::VectorXd> set;
    for (int k = 0; k <= 20; ++k) {
      Eigen::VectorXd row(2);
      row << k / 20.0, 1.0 - k / 20.0;
      set.push_back(row);
    }
    // gamma and delta are chosen so that the cap never binds.
    const double gamma = 0.0;
    const double delta = 0.999;
    double best = 1e300;
    int best_k = -1;
    for (int k = 0; k <= 20; ++k) {
      Eigen::MatrixXd p(1, 2);
      p << set[static_cast<std::size_t>(k)].transpose();
      const double v = hoeffding_statewise_uncertainty(counts, emp, TabularPolicy(p), set, gamma, delta).per_state(0);
      const double xi = k / 20.0;
      const double scale = std::sqrt(0.5 * std::log(2.0 * 21.0 / delta));
      CHECK(std::abs(v - std::min(scale * std::sqrt(xi * xi / 2.0 + (1 - xi) * (1 - xi) / 2.0), 1.0)) <= 1e-14);
      if (v < best - 1e-15) {
        best = v;
        best_k = k;
      }
    }
    CHECK(best_k == 10);
  }
  SUBCASE("unseen states get the cap") {
    const EmpiricalModel model = fixtures::three_state_model();
    const TabularPolicy uniform = TabularPolicy::uniform(3, 2);
    std::vector<Eigen::VectorXd> set{Eigen::VectorXd::Constant(2, 0.5)};
    const auto u = hoeffding_statewise_uncertainty(model.counts(), model.empirical_policy(), uniform, set, 0.9, 0.1);
    CHECK(u.per_state(2) == doctest::Approx(10.0));
    // Action 1 at state 0 is unobserved, so uniform mixing there is also capped.
    CHECK(u.per_state(0) == doctest::Approx(10.0));
    CHECK(u.per_state(1) < 10.0);
  }
  SUBCASE("policies outside the local set are rejected") {
    const EmpiricalModel model = fixtures::three_state_model();
    const auto set = deterministic_local_policies(2);
    CHECK_THROWS_AS(hoeffding_statewise_uncertainty(model.counts(), model.empirical_policy(),
                                                    fixtures::three_state_policy(), set, 0.9, 0.1),
                    std::invalid_argument);
    UncertaintySpec spec{UncertaintyKind::hoeffding_statewise, 0.1, {}};
    CHECK_THROWS_AS(make_bellman_uncertainty(spec, model), std::invalid_argument);
    CHECK_THROWS_AS(make_bellman_uncertainty(spec, model, fixtures::three_state_policy()), std::invalid_argument);
  }
}

TEST_CASE("value uncertainty") {
  const EmpiricalModel model = fixtures::three_state_model();
  const TabularPolicy pi = fixtures::three_state_policy();
  const BellmanUncertainty u = hoeffding_sa_uncertainty(model.counts(), 0.9, 0.1);
  fixtures::check_close(value_uncertainty(model, pi, u).per_state,
                        {90.983950703504200572, 93.056924064285507513, 92.683021880506350917}, 1e-11);

  const BellmanUncertainty zero = BellmanUncertainty::state_action(Eigen::MatrixXd::Zero(3, 2));
  CHECK(value_uncertainty(model, pi, zero).per_state.cwiseAbs().maxCoeff() == 0.0);

  Rng rng(3);
  const TabularMdp shortsighted = random_mdp(3, 2, 0.0, rng);
  const EmpiricalModel myopic(shortsighted, pi, model.counts(), 0);
  CHECK(fixtures::max_abs_diff(value_uncertainty(myopic, pi, u).per_state, pi.contract(u.per_state_action)) <= 1e-14);

  SUBCASE("truncated series") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      const RandomInstance inst = random_instance(seed);
      const EmpiricalModel& m = inst.model;
      Rng prng(seed);
      const TabularPolicy p = random_policy(m.mdp().n_states(), m.mdp().n_actions(), prng);
      const BellmanUncertainty bu = hoeffding_sa_uncertainty(m.counts(), m.discount(), 0.1);
      const Eigen::MatrixXd step = m.discount() * policy_transition(m.mdp(), p);
      const Eigen::VectorXd base = bu.for_policy(p);
      Eigen::VectorXd term = base;
      Eigen::VectorXd series = Eigen::VectorXd::Zero(base.size());
      for (int t = 0; t < 10'000; ++t) {
        series += term;
        term = step * term;
      }
      const Eigen::VectorXd mu = value_uncertainty(m, p, bu).per_state;
      CHECK((mu - series).cwiseAbs().maxCoeff() <= 1e-8 * std::max(1.0, series.cwiseAbs().maxCoeff()));
      CHECK(mu.minCoeff() >= -1e-9);
      const double g = m.discount();
      CHECK(mu.maxCoeff() <= 1.0 / ((1 - g) * (1 - g)) + 1e-6);
    }
  }
}

TEST_CASE("relative value uncertainty") {
  const EmpiricalModel model = fixtures::three_state_model();
  const BellmanUncertainty u = hoeffding_sa_uncertainty(model.counts(), 0.9, 0.1);
  const TabularPolicy pi = fixtures::three_state_policy();
  CHECK(relative_value_uncertainty(model, pi, pi, u).cwiseAbs().maxCoeff() <= 1e-12);

  const std::vector<std::size_t> acts{1, 0, 1};
  const TabularPolicy det = TabularPolicy::deterministic(acts, 2);
  const Eigen::VectorXd direct =
      value_uncertainty(model, det, u).per_state - value_uncertainty(model, model.empirical_policy(), u).per_state;
  CHECK(fixtures::max_abs_diff(relative_value_uncertainty(model, det, model.empirical_policy(), u), direct) <= 1e-9);

  const CheckResult random = verify_relative_uncertainty(200, 77);
  CHECK(random.passed);
  CHECK(random.worst <= 1e-9);

  const BellmanUncertainty sw = BellmanUncertainty::state_wise(Eigen::VectorXd::Ones(3));
  CHECK_THROWS_AS(relative_value_uncertainty(model, pi, pi, sw), std::invalid_argument);
}

TEST_CASE("proximal penalty") {
  const EmpiricalModel model = fixtures::three_state_model();
  const TabularPolicy pi = fixtures::three_state_policy();
  fixtures::check_close(total_variation(pi, model.empirical_policy()), {0.4, 0.8, 0.2}, 1e-15);
  CHECK(proximal_penalty_vector(pi, pi, 0.9).cwiseAbs().maxCoeff() == 0.0);

  Eigen::MatrixXd a(1, 2);
  a << 1.0, 0.0;
  Eigen::MatrixXd b(1, 2);
  b << 0.0, 1.0;
  CHECK(proximal_penalty_vector(TabularPolicy(a), TabularPolicy(b), 0.9)(0) == doctest::Approx(100.0).epsilon(1e-12));
  a << 0.7, 0.3;
  b << 0.2, 0.8;
  CHECK(total_variation(TabularPolicy(a), TabularPolicy(b))(0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(proximal_penalty_vector(TabularPolicy(a), TabularPolicy(b), 0.9)(0) == doctest::Approx(50.0).epsilon(1e-12));
}

TEST_CASE("coverage and lemma events over a dataset ensemble") {
  EnsembleConfig config;
  config.draws = 500;
  config.seed = 123;
  const EnsembleSummary summary = run_coverage_ensemble(config);
  CHECK(summary.draws == 500);
  CHECK(summary.bellman_frequency >= 1.0 - config.delta);
  CHECK(summary.lemma_frequency >= 1.0 - config.delta);
  CHECK(summary.lower_bound_frequency >= 1.0 - config.delta);
}

TEST_CASE("conversion chain with the trivial bound") {
  const CheckResult result = verify_conversion_inequality(300, 9);
  CHECK(result.passed);
  CHECK(result.failures == 0);
}
