#include "fdpo/serialization.hpp"

#include <fstream>
#include <stdexcept>

namespace fdpo {

namespace {

const Json& field(const Json& doc, const char* name) {
  if (!doc.is_object() || !doc.contains(name)) throw std::invalid_argument(std::string("json: missing field ") + name);
  return doc.at(name);
}

std::vector<double> flatten_rows(const Eigen::MatrixXd& m) {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(m.size()));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) out.push_back(m(i, j));
  }
  return out;
}

Eigen::MatrixXd unflatten_rows(const Json& values, std::size_t rows, std::size_t cols, const char* name) {
  const auto flat = values.get<std::vector<double>>();
  if (flat.size() != rows * cols) throw std::invalid_argument(std::string("json: wrong length for ") + name);
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = flat[i * cols + j];
  }
  return m;
}

std::size_t positive_size(const Json& doc, const char* name) {
  const auto v = field(doc, name).get<long long>();
  if (v <= 0) throw std::invalid_argument(std::string("json: ") + name + " must be positive");
  return static_cast<std::size_t>(v);
}

const char* kind_name(UncertaintyKind kind) {
  switch (kind) {
    case UncertaintyKind::trivial:
      return "trivial";
    case UncertaintyKind::hoeffding_sa:
      return "hoeffding_sa";
    case UncertaintyKind::hoeffding_statewise:
      return "hoeffding_statewise";
  }
  return "unknown";
}

}  // namespace

Json mdp_to_json(const TabularMdp& mdp) {
  Json kinds = Json::array();
  for (RewardKind k : mdp.reward_kinds()) kinds.push_back(k == RewardKind::bernoulli ? "bernoulli" : "deterministic");
  const Eigen::VectorXd& rho = mdp.start_dist();
  return Json{{"n_states", mdp.n_states()},
              {"n_actions", mdp.n_actions()},
              {"discount", mdp.discount()},
              {"start_dist", std::vector<double>(rho.data(), rho.data() + rho.size())},
              {"mean_reward", flatten_rows(mdp.mean_reward())},
              {"transition", flatten_rows(mdp.transition())},
              {"reward_kind", kinds}};
}

TabularMdp mdp_from_json(const Json& doc) {
  const std::size_t S = positive_size(doc, "n_states");
  const std::size_t A = positive_size(doc, "n_actions");
  const auto rho = field(doc, "start_dist").get<std::vector<double>>();
  if (rho.size() != S) throw std::invalid_argument("json: wrong length for start_dist");
  std::vector<RewardKind> kinds;
  for (const auto& k : field(doc, "reward_kind")) {
    const auto name = k.get<std::string>();
    if (name == "bernoulli") {
      kinds.push_back(RewardKind::bernoulli);
    } else if (name == "deterministic") {
      kinds.push_back(RewardKind::deterministic);
    } else {
      throw std::invalid_argument("json: unknown reward_kind " + name);
    }
  }
  if (kinds.size() != S * A) throw std::invalid_argument("json: wrong length for reward_kind");
  return TabularMdp(unflatten_rows(field(doc, "mean_reward"), S, A, "mean_reward"), std::move(kinds),
                    unflatten_rows(field(doc, "transition"), S * A, S, "transition"),
                    field(doc, "discount").get<double>(), Eigen::Map<const Eigen::VectorXd>(rho.data(), static_cast<Eigen::Index>(S)));
}

Json policy_to_json(const TabularPolicy& policy) {
  return Json{{"n_states", policy.n_states()}, {"n_actions", policy.n_actions()}, {"probs", flatten_rows(policy.probs())}};
}

TabularPolicy policy_from_json(const Json& doc) {
  const std::size_t S = positive_size(doc, "n_states");
  const std::size_t A = positive_size(doc, "n_actions");
  return TabularPolicy(unflatten_rows(field(doc, "probs"), S, A, "probs"));
}

Json uncertainty_spec_to_json(const UncertaintySpec& spec) {
  Json doc{{"kind", kind_name(spec.kind)}, {"delta", spec.delta}};
  if (!spec.local_policy_set.empty()) {
    Json set = Json::array();
    for (const auto& row : spec.local_policy_set) set.push_back(std::vector<double>(row.data(), row.data() + row.size()));
    doc["local_policy_set"] = set;
  }
  return doc;
}

UncertaintySpec uncertainty_spec_from_json(const Json& doc) {
  UncertaintySpec spec;
  const auto kind = field(doc, "kind").get<std::string>();
  if (kind == "trivial") {
    spec.kind = UncertaintyKind::trivial;
  } else if (kind == "hoeffding_sa") {
    spec.kind = UncertaintyKind::hoeffding_sa;
  } else if (kind == "hoeffding_statewise") {
    spec.kind = UncertaintyKind::hoeffding_statewise;
  } else {
    throw std::invalid_argument("json: unknown uncertainty kind " + kind);
  }
  spec.delta = field(doc, "delta").get<double>();
  if (doc.contains("local_policy_set")) {
    for (const auto& row : doc.at("local_policy_set")) {
      const auto v = row.get<std::vector<double>>();
      spec.local_policy_set.push_back(Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size())));
    }
  }
  spec.validate();
  return spec;
}

Json algorithm_config_to_json(const AlgorithmConfig& config) {
  return Json{{"family", std::string(family_name(config.family))},
              {"alpha", config.alpha},
              {"uncertainty", uncertainty_spec_to_json(config.uncertainty)},
              {"penalty_scale", std::string(penalty_scale_name(config.penalty_scale))}};
}

AlgorithmConfig algorithm_config_from_json(const Json& doc) {
  AlgorithmConfig config;
  config.family = parse_family(field(doc, "family").get<std::string>());
  config.alpha = field(doc, "alpha").get<double>();
  if (doc.contains("uncertainty")) config.uncertainty = uncertainty_spec_from_json(doc.at("uncertainty"));
  if (doc.contains("penalty_scale")) config.penalty_scale = parse_penalty_scale(doc.at("penalty_scale").get<std::string>());
  config.validate();
  return config;
}

Json bound_report_to_json(const BoundReport& report) {
  return Json{{"lhs", report.lhs},         {"rhs", report.rhs},   {"inf_term", report.inf_term},
              {"sup_term", report.sup_term}, {"holds", report.holds}, {"seed", report.seed},
              {"delta", report.delta},     {"alpha", report.alpha}};
}

BoundReport bound_report_from_json(const Json& doc) {
  BoundReport r;
  r.lhs = field(doc, "lhs").get<double>();
  r.rhs = field(doc, "rhs").get<double>();
  r.inf_term = field(doc, "inf_term").get<double>();
  r.sup_term = field(doc, "sup_term").get<double>();
  r.holds = field(doc, "holds").get<bool>();
  r.seed = doc.value("seed", std::uint64_t{0});
  r.delta = doc.value("delta", 0.0);
  r.alpha = doc.value("alpha", 0.0);
  return r;
}

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw std::invalid_argument("invalid JSON in " + path.string() + ": " + e.what());
  }
}

void write_json_file(const std::filesystem::path& path, const Json& doc) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string());
  out << doc.dump(2) << '\n';
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace fdpo
