#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "persid/equivalence.hpp"
#include "persid/informativeness.hpp"
#include "persid/model_class.hpp"
#include "persid/policies.hpp"
#include "persid/reconstruction.hpp"
#include "persid/runner.hpp"

namespace persid {

using Json = nlohmann::json;

/// Matrices are arrays of rows; vectors are flat arrays. Parsing errors
/// throw ConfigError naming the offending field.
Json matrix_to_json(const Eigen::MatrixXd& m);
Json vector_to_json(const Eigen::VectorXd& v);
Eigen::MatrixXd matrix_from_json(const Json& j, const std::string& field);
Eigen::VectorXd vector_from_json(const Json& j, const std::string& field);

Json params_to_json(const SystemParams& params);
/// Expects {"class": "lgss" | "iohmm", ...fields}.
SystemParams params_from_json(const Json& j);

Json policy_to_json(const PerturbationPolicy& policy);
PerturbationPolicy policy_from_json(const Json& j);

Json domain_to_json(const ExperimentalDomain& domain);
ExperimentalDomain domain_from_json(const Json& j);

Json environment_to_json(const EnvironmentSpec& env);
EnvironmentSpec environment_from_json(const Json& j);

Json fit_report_to_json(const FitReport& report);
Json equivalence_report_to_json(const EquivalenceReport& report);
Json discrimination_report_to_json(const DiscriminationReport& report);
Json consistency_to_json(const std::vector<ConsistencyRow>& rows);

/// One row per test policy: policy_id,value,kind,delta,pass.
std::string equivalence_csv(const EquivalenceReport& report);

/// Two-space indented with a trailing newline.
std::string dump_json(const Json& j);

/// Typed field access with ConfigError on absence or type mismatch.
const Json& require(const Json& j, const std::string& key);
double get_double(const Json& j, const std::string& key, double fallback);
int get_int(const Json& j, const std::string& key, int fallback);
std::string get_string(const Json& j, const std::string& key, const std::string& fallback);

}  // namespace persid
