// Acceptance harness. Prints one PASS/FAIL line per criterion, then a details
// section with the measured quantities behind each verdict.
//
//   fdpo_acceptance [--trials N] [--jobs J] [--only 1,2,...] [--strict]
//
// Without --strict the exit code only reports harness errors. With --strict
// it is the number of failed criteria.

#include "fdpo/algorithms.hpp"
#include "fdpo/bounds.hpp"
#include "fdpo/experiments.hpp"
#include "fdpo/rng.hpp"
#include "fdpo/summary.hpp"
#include "fdpo/verification.hpp"

#include <CLI11.hpp>
#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

using namespace fdpo;

namespace {

struct Verdict {
  bool passed = false;
  std::string summary;
  std::vector<std::string> details;
};

std::string format(const char* fmt, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, fmt, args...);
  return buf;
}

struct Options {
  std::size_t grid_trials = 1000;
  int jobs = 1;
};

// ---- criteria 1 to 4 -------------------------------------------------------

Verdict criterion1(const Options&) {
  Verdict v;
  const CheckResult enumeration = verify_theorem1(10'000, 1);
  const BoundReport tight = tight_proxy_instance_report();
  const bool tight_ok = tight.lhs == tight.rhs && tight.rhs == 1.0;
  v.passed = enumeration.passed && enumeration.failures == 0 && tight_ok;
  v.summary = format("%zu instances, %zu violations; tight instance lhs=%g rhs=%g", enumeration.trials,
                     enumeration.failures, tight.lhs, tight.rhs);
  return v;
}

Verdict criterion2(const Options&) {
  Verdict v;
  v.passed = true;
  std::string parts;
  for (const CheckResult& r : {verify_residual_visitation(200, 21), verify_ua_decomposition(200, 22),
                               verify_relative_uncertainty(200, 23), verify_conversion_inequality(200, 24)}) {
    const bool ok = r.passed && r.failures == 0 && r.trials == 200;
    v.passed = v.passed && ok;
    parts += format("%s%s worst %.1e", parts.empty() ? "" : "; ", r.name.c_str(), r.worst);
    v.details.push_back(format("%s: %zu trials, %zu failures, worst %.3e", r.name.c_str(), r.trials, r.failures,
                               r.worst));
  }
  v.summary = parts;
  return v;
}

// Criteria 3 and 4 share one ensemble; the first caller pays for it.
const EnsembleSummary& ensemble(const Options& options) {
  static std::optional<EnsembleSummary> cached;
  if (cached) return *cached;
  EnsembleConfig config;
  config.draws = 500;
  config.n_states = 4;
  config.n_actions = 2;
  config.dataset_size = 30;
  config.delta = 0.1;
  config.seed = 2020;
  config.jobs = options.jobs;
  cached = run_coverage_ensemble(config);
  return *cached;
}

Verdict criterion3(const Options& options) {
  const EnsembleSummary& s = ensemble(options);
  Verdict v;
  v.passed = s.bellman_frequency >= 0.9 && s.lemma_frequency >= 0.9 && s.lower_bound_frequency >= 0.9;
  v.summary = format("%zu draws: bellman %.3f, lemma %.3f, lower bound %.3f (need >= 0.90)", s.draws,
                     s.bellman_frequency, s.lemma_frequency, s.lower_bound_frequency);
  return v;
}

Verdict criterion4(const Options& options) {
  const EnsembleSummary& s = ensemble(options);
  Verdict v;
  v.passed = s.theorem2_frequency >= 0.9 && s.theorem3_frequency >= 0.9 && s.alpha_zero_difference <= 1e-9 &&
             s.alpha_one_sup_zero;
  v.summary = format("naive holds %.3f, ua(1) holds %.3f, alpha=0 max diff %.1e, alpha=1 sup zero: %s",
                     s.theorem2_frequency, s.theorem3_frequency, s.alpha_zero_difference,
                     s.alpha_one_sup_zero ? "yes" : "no");
  v.details.push_back(format("proximal(1) holds %.3f; mean rhs naive %.3f, ua(1) %.3f", s.theorem4_frequency,
                             s.mean_naive_rhs, s.mean_ua_rhs));
  return v;
}

// ---- criterion 5 -----------------------------------------------------------

struct OracleInstance {
  TabularMdp mdp;
  EmpiricalModel model;
};

OracleInstance oracle_instance(std::uint64_t seed) {
  Rng rng(seed);
  const std::size_t S = 1 + static_cast<std::size_t>(rng.next_u64() % 3);
  const std::size_t A = 1 + static_cast<std::size_t>(rng.next_u64() % 3);
  TabularMdp mdp = random_mdp(S, A, 0.9, rng);
  const Eigen::MatrixXd phi = random_policy(S, A, rng).probs() / static_cast<double>(S);
  const std::size_t d = static_cast<std::size_t>(rng.next_u64() % (3 * S * A + 1));
  const TransitionDataset data = collect(mdp, DataDistribution(phi), d, rng.next_u64());
  EmpiricalModel model = build_empirical_model(data, mdp, rng.next_u64());
  return {std::move(mdp), std::move(model)};
}

double local_score(const Eigen::VectorXd& p, const Eigen::VectorXd& q, const Eigen::VectorXd& emp, double c) {
  return p.dot(q) - 0.5 * c * (p - emp).cwiseAbs().sum();
}

// Maximum of the concave piecewise-linear local objective over the simplex,
// taken over the vertices of the arrangement {p_i = 0} and {p_i = emp_i}.
double vertex_max(const Eigen::VectorXd& q, const Eigen::VectorXd& emp, double c) {
  const auto A = q.size();
  double best = -1e300;
  Eigen::VectorXd p(A);
  for (Eigen::Index free = 0; free < A; ++free) {
    for (std::uint64_t mask = 0; mask < (1ull << (A - 1)); ++mask) {
      double used = 0.0;
      int bit = 0;
      for (Eigen::Index i = 0; i < A; ++i) {
        if (i == free) continue;
        p(i) = (mask >> bit++) & 1 ? emp(i) : 0.0;
        used += p(i);
      }
      p(free) = 1.0 - used;
      if (p(free) < -1e-15) continue;
      best = std::max(best, local_score(p, q, emp, c));
    }
  }
  return best;
}

double grid_max(const Eigen::VectorXd& q, const Eigen::VectorXd& emp, double c, int n) {
  const auto A = q.size();
  Eigen::VectorXd p(A);
  double best = -1e300;
  if (A == 1) {
    p(0) = 1.0;
    return local_score(p, q, emp, c);
  }
  if (A == 2) {
    for (int i = 0; i <= n; ++i) {
      p << static_cast<double>(i) / n, static_cast<double>(n - i) / n;
      best = std::max(best, local_score(p, q, emp, c));
    }
    return best;
  }
  for (int i = 0; i <= n; ++i) {
    for (int j = 0; i + j <= n; ++j) {
      p << static_cast<double>(i) / n, static_cast<double>(j) / n, static_cast<double>(n - i - j) / n;
      best = std::max(best, local_score(p, q, emp, c));
    }
  }
  return best;
}

// Value iteration on the proximal objective with the exact per-state maximum.
Eigen::VectorXd proximal_oracle_values(const EmpiricalModel& m, double c) {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m.mdp().n_states()));
  for (int it = 0; it < 100'000; ++it) {
    const Eigen::MatrixXd q = q_backup(m.mdp(), m.reward(), v).values;
    Eigen::VectorXd next(v.size());
    for (Eigen::Index s = 0; s < v.size(); ++s) {
      next(s) = vertex_max(q.row(s).transpose(), m.empirical_policy().probs().row(s).transpose(), c);
    }
    const double change = (next - v).cwiseAbs().maxCoeff();
    v = next;
    if (change <= 1e-14 * std::max(1.0, v.cwiseAbs().maxCoeff())) break;
  }
  return v;
}

Verdict criterion5(const Options&) {
  Verdict v;
  double worst_naive = 0.0;
  double worst_ua = 0.0;
  double worst_prox = 0.0;
  double worst_grid_excess = -1e300;
  std::size_t fail_naive = 0;
  std::size_t fail_ua = 0;
  std::size_t fail_prox = 0;
  const std::size_t n = 100;
  for (std::size_t k = 0; k < n; ++k) {
    const OracleInstance inst = oracle_instance(derive_seed(5005, k));
    const EmpiricalModel& m = inst.model;
    const Eigen::VectorXd& rho = m.mdp().start_dist();
    Rng rng(derive_seed(5006, k));
    const double alpha_ua = rng.uniform();
    const double alpha_prox = 0.1 * rng.uniform();
    const BellmanUncertainty u = hoeffding_sa_uncertainty(m.counts(), m.discount(), 0.1);

    double best_naive = -1e300;
    double best_ua = -1e300;
    for_each_deterministic_policy(m.mdp().n_states(), m.mdp().n_actions(), [&](const TabularPolicy& p) {
      best_naive = std::max(best_naive, naive_fdpe(m, p).expected(rho));
      best_ua = std::max(best_ua, ua_fdpe(m, p, u, alpha_ua).expected(rho));
    });
    const double got_naive = naive_fdpe(m, naive_fdpo(m)).expected(rho);
    const AlgorithmResult ua = ua_fdpo(m, u, alpha_ua);
    const double got_ua = ua_fdpe(m, ua.policy, u, alpha_ua).expected(rho);

    const double c = alpha_prox / ((1.0 - m.discount()) * (1.0 - m.discount()));
    const Eigen::VectorXd oracle = proximal_oracle_values(m, c);
    const AlgorithmResult prox = proximal_fdpo(m, alpha_prox);
    const double got_prox = proximal_fdpe(m, prox.policy, alpha_prox).expected(rho);

    // The vertex maximum must dominate a 1e-3 simplex grid at the fixed point.
    const Eigen::MatrixXd q = q_backup(m.mdp(), m.reward(), oracle).values;
    for (Eigen::Index s = 0; s < q.rows(); ++s) {
      const Eigen::VectorXd qs = q.row(s).transpose();
      const Eigen::VectorXd es = m.empirical_policy().probs().row(s).transpose();
      worst_grid_excess = std::max(worst_grid_excess, grid_max(qs, es, c, 1000) - vertex_max(qs, es, c));
    }

    const double dn = std::abs(got_naive - best_naive);
    const double du = std::abs(got_ua - best_ua);
    const double dp = std::abs(got_prox - rho.dot(oracle));
    worst_naive = std::max(worst_naive, dn);
    worst_ua = std::max(worst_ua, du);
    worst_prox = std::max(worst_prox, dp);
    fail_naive += dn > 1e-6;
    fail_ua += du > 1e-6;
    fail_prox += dp > 1e-6;
  }
  v.passed = fail_naive == 0 && fail_ua == 0 && fail_prox == 0 && worst_grid_excess <= 1e-12;
  v.summary = format("%zu instances: max gap naive %.1e, ua %.1e, proximal %.1e (tol 1e-6)", n, worst_naive, worst_ua,
                     worst_prox);
  v.details.push_back(format("grid(1e-3) minus vertex maximum, worst over states: %.2e", worst_grid_excess));
  return v;
}

// ---- criterion 6 -----------------------------------------------------------

Verdict criterion6(const Options& options) {
  ExperimentConfig config = default_experiment(ExperimentKind::bandit, 200, 6006);
  config.jobs = options.jobs;
  const auto rows = run_experiment(config);
  std::map<std::string, std::size_t> good;
  std::map<std::string, std::size_t> total;
  for (const auto& r : rows) {
    total[r.algorithm] += 1;
    good[r.algorithm] += r.sweep_value == 0.0;
  }
  const double naive = static_cast<double>(good["naive"]) / static_cast<double>(total["naive"]);
  const double ua = static_cast<double>(good["ua"]) / static_cast<double>(total["ua"]);
  Verdict v;
  v.passed = total["naive"] == 200 && naive < 0.01 && ua > 0.95;
  v.summary = format("200 trials: naive picks the good arm %.1f%%, ua %.1f%%", 100.0 * naive, 100.0 * ua);
  return v;
}

// ---- criteria 7 and 8 ------------------------------------------------------

struct Cell {
  double mean = 0.0;
  double half_width = 0.0;
};

using Table = std::map<std::string, std::map<double, Cell>>;

Table tabulate(const std::vector<ResultRow>& rows) {
  Table table;
  for (const SummaryCell& c : summarize(rows)) table[c.algorithm][c.sweep_value] = {c.mean, c.half_width};
  return table;
}

ExperimentConfig gridworld_config(ExperimentKind kind, const Options& options, std::uint64_t seed) {
  ExperimentConfig config = default_experiment(kind, options.grid_trials, seed);
  config.algorithms.push_back(make_algorithm("uniform", 0.0, 0.1, PenaltyScale::absorbed));
  config.jobs = options.jobs;
  return config;
}

void print_table(Verdict& v, const Table& t, const std::vector<double>& grid, const char* x_name) {
  std::string header = format("%10s", x_name);
  for (const auto& [name, col] : t) header += format(" %18s", name.c_str());
  v.details.push_back(header);
  for (double x : grid) {
    std::string line = format("%10g", x);
    for (const auto& [name, col] : t) line += format("   %7.3f +- %5.3f", col.at(x).mean, col.at(x).half_width);
    v.details.push_back(line);
  }
}

std::string mark(bool ok) { return ok ? "ok" : "FAILED"; }

Verdict criterion7(const Options& options) {
  const ExperimentConfig config = gridworld_config(ExperimentKind::exploration, options, 7007);
  const Table t = tabulate(run_experiment(config));
  Verdict v;
  const auto& imi = t.at("imitation");
  const auto& naive = t.at("naive");
  const auto& ua = t.at("ua");
  const auto& uniform = t.at("uniform");

  const double thr0 = 0.05 * uniform.at(0.0).mean;
  const bool a = imi.at(0.0).mean < thr0;
  const bool b = naive.at(0.0).mean > thr0;
  const bool c = naive.at(1.0).mean < imi.at(1.0).mean;
  bool d = true;
  std::string d_fail;
  for (double eps : config.grid) {
    const Cell& best = naive.at(eps).mean <= imi.at(eps).mean ? naive.at(eps) : imi.at(eps);
    const double ci = std::hypot(ua.at(eps).half_width, best.half_width);
    if (ua.at(eps).mean > best.mean + ci) {
      d = false;
      d_fail += format("%s%g", d_fail.empty() ? "" : ",", eps);
    }
  }
  v.passed = a && b && c && d;
  v.summary = format("%zu trials: eps=0 imitation %.3f vs 0.05-gap %.3f [%s], naive > gap [%s]; eps=1 naive < "
                     "imitation [%s]; ua <= min + CI at every eps [%s%s%s]",
                     config.trials, imi.at(0.0).mean, thr0, mark(a).c_str(), mark(b).c_str(), mark(c).c_str(),
                     mark(d).c_str(), d_fail.empty() ? "" : " at eps=", d_fail.c_str());
  print_table(v, t, config.grid, "epsilon");
  return v;
}

Verdict criterion8(const Options& options) {
  const ExperimentConfig config = gridworld_config(ExperimentKind::size, options, 8008);
  const Table t = tabulate(run_experiment(config));
  Verdict v;
  const auto& naive = t.at("naive");
  const auto& ua = t.at("ua");
  const auto& prox = t.at("proximal");
  const auto& uniform = t.at("uniform");
  const double big = 200'000.0;
  const double thr = 0.05 * uniform.at(big).mean;
  const bool a = naive.at(big).mean < thr;
  const bool b = ua.at(big).mean < thr;
  const bool c = prox.at(big).mean > ua.at(big).mean;
  bool d = true;
  std::string d_fail;
  for (double size : config.grid) {
    if (size > 1000.0) continue;
    if (ua.at(size).mean > naive.at(size).mean) {
      d = false;
      d_fail += format("%s%g", d_fail.empty() ? "" : ",", size);
    }
  }
  v.passed = a && b && c && d;
  v.summary = format("%zu trials: d=2e5 naive %.3f [%s], ua %.3f [%s] vs 0.05-gap %.3f; proximal %.3f > ua [%s]; "
                     "ua <= naive for d <= 1e3 [%s%s%s]",
                     config.trials, naive.at(big).mean, mark(a).c_str(), ua.at(big).mean, mark(b).c_str(), thr,
                     prox.at(big).mean, mark(c).c_str(), mark(d).c_str(), d_fail.empty() ? "" : " at d=",
                     d_fail.c_str());
  print_table(v, t, config.grid, "size");
  return v;
}

// ---- criterion 9 -----------------------------------------------------------

std::string csv_of(const ExperimentConfig& config) {
  std::ostringstream out;
  write_results_csv(out, run_experiment(config));
  return out.str();
}

Verdict criterion9(const Options&) {
  Verdict v;
  v.passed = true;
  std::string parts;
  for (ExperimentKind kind : {ExperimentKind::exploration, ExperimentKind::size, ExperimentKind::bandit}) {
    ExperimentConfig config = default_experiment(kind, 16, 9009);
    config.algorithms.push_back(make_algorithm("uniform", 0.0, 0.1, PenaltyScale::absorbed));
    std::set<std::string> outputs;
    std::size_t bytes = 0;
    for (int jobs : {1, 2, 4, 8}) {
      config.jobs = jobs;
      const std::string csv = csv_of(config);
      bytes = csv.size();
      outputs.insert(csv);
    }
    std::ostringstream serial;
    write_results_csv(serial, run_experiment_serial(config));
    outputs.insert(serial.str());
    const bool same = outputs.size() == 1;
    v.passed = v.passed && same;
    parts += format("%s%s %s (%zu bytes)", parts.empty() ? "" : "; ", std::string(experiment_name(kind)).c_str(),
                    same ? "identical" : "DIFFERENT", bytes);
  }
  v.summary = "jobs 1/2/4/8 and serial: " + parts;
  return v;
}

struct Criterion {
  int id;
  const char* name;
  double limit_seconds;
  std::function<Verdict(const Options&)> run;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria for the fdpo library"};
  Options options;
  options.jobs = omp_get_max_threads();
  std::vector<int> only;
  bool strict = false;
  app.add_option("--trials", options.grid_trials, "Trials for the gridworld sweeps (criteria 7 and 8)")
      ->check(CLI::Range(200, 1'000'000));
  app.add_option("--jobs", options.jobs, "Worker threads")->check(CLI::PositiveNumber);
  app.add_option("--only", only, "Comma-separated criterion ids")->delimiter(',');
  app.add_flag("--strict", strict, "Exit with the number of failed criteria");
  CLI11_PARSE(app, argc, argv);

  const std::vector<Criterion> criteria{
      {1, "Theorem 1 enumeration", 5.0, criterion1},
      {2, "exact identities", 30.0, criterion2},
      {3, "coverage probabilities", 120.0, criterion3},
      {4, "bound reports", 120.0, criterion4},
      {5, "oracle equivalence", 120.0, criterion5},
      {6, "bandit demo", 60.0, criterion6},
      {7, "exploration sweep", 900.0, criterion7},
      {8, "size sweep", 1200.0, criterion8},
      {9, "determinism across --jobs", 0.0, criterion9},
  };

  std::printf("acceptance: jobs=%d, gridworld trials=%zu\n", options.jobs, options.grid_trials);
  std::vector<std::pair<int, Verdict>> results;
  int failed = 0;
  for (const Criterion& c : criteria) {
    if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) continue;
    const auto start = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = c.run(options);
    } catch (const std::exception& e) {
      v.passed = false;
      v.summary = std::string("error: ") + e.what();
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = c.limit_seconds <= 0.0 || seconds < c.limit_seconds;
    const bool passed = v.passed && in_time;
    failed += !passed;
    std::printf("[%s] C%d %s: %s; %.2f s%s\n", passed ? "PASS" : "FAIL", c.id, c.name, v.summary.c_str(), seconds,
                in_time ? "" : format(" exceeds the %.0f s limit", c.limit_seconds).c_str());
    std::fflush(stdout);
    results.emplace_back(c.id, std::move(v));
  }
  std::printf("acceptance: %zu evaluated, %zu passed, %d failed\n", results.size(), results.size() - failed, failed);

  std::printf("\ndetails\n");
  for (const auto& [id, v] : results) {
    if (v.details.empty()) continue;
    std::printf("C%d\n", id);
    for (const auto& line : v.details) std::printf("  %s\n", line.c_str());
  }
  return strict ? failed : 0;
}
