#pragma once

#include "fdpo/algorithms.hpp"
#include "fdpo/bounds.hpp"
#include "fdpo/mdp.hpp"
#include "fdpo/uncertainty.hpp"

#include <json.hpp>

#include <filesystem>

namespace fdpo {

using Json = nlohmann::json;

// Doubles are written in shortest round-trip form, so parsing restores the
// exact bits.

Json mdp_to_json(const TabularMdp& mdp);
TabularMdp mdp_from_json(const Json& doc);

Json policy_to_json(const TabularPolicy& policy);
TabularPolicy policy_from_json(const Json& doc);

Json uncertainty_spec_to_json(const UncertaintySpec& spec);
UncertaintySpec uncertainty_spec_from_json(const Json& doc);

Json algorithm_config_to_json(const AlgorithmConfig& config);
AlgorithmConfig algorithm_config_from_json(const Json& doc);

Json bound_report_to_json(const BoundReport& report);
BoundReport bound_report_from_json(const Json& doc);

Json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const Json& doc);

}  // namespace fdpo
