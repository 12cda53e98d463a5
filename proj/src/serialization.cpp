#include "persid/serialization.hpp"

#include <cstdio>

#include "persid/error.hpp"

namespace persid {
namespace {

template <typename T>
T get_as(const Json& j, const std::string& field) {
  try {
    return j.get<T>();
  } catch (const Json::exception&) {
    fail(ErrorCode::kConfigError, "field '" + field + "' has the wrong type");
  }
}

std::string fmt17(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

const Json& require(const Json& j, const std::string& key) {
  if (!j.is_object() || !j.contains(key)) fail(ErrorCode::kConfigError, "missing field '" + key + "'");
  return j.at(key);
}

double get_double(const Json& j, const std::string& key, double fallback) {
  if (!j.is_object() || !j.contains(key)) return fallback;
  if (!j.at(key).is_number()) fail(ErrorCode::kConfigError, "field '" + key + "' must be a number");
  return j.at(key).get<double>();
}

int get_int(const Json& j, const std::string& key, int fallback) {
  if (!j.is_object() || !j.contains(key)) return fallback;
  if (!j.at(key).is_number_integer()) {
    fail(ErrorCode::kConfigError, "field '" + key + "' must be an integer");
  }
  return j.at(key).get<int>();
}

std::string get_string(const Json& j, const std::string& key, const std::string& fallback) {
  if (!j.is_object() || !j.contains(key)) return fallback;
  if (!j.at(key).is_string()) fail(ErrorCode::kConfigError, "field '" + key + "' must be a string");
  return j.at(key).get<std::string>();
}

Json matrix_to_json(const Eigen::MatrixXd& m) {
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

Json vector_to_json(const Eigen::VectorXd& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

Eigen::MatrixXd matrix_from_json(const Json& j, const std::string& field) {
  if (!j.is_array()) fail(ErrorCode::kConfigError, "field '" + field + "' must be an array of rows");
  if (j.empty()) return Eigen::MatrixXd(0, 0);
  const auto rows = static_cast<Eigen::Index>(j.size());
  if (!j[0].is_array()) fail(ErrorCode::kConfigError, "field '" + field + "' must be an array of rows");
  const auto cols = static_cast<Eigen::Index>(j[0].size());
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const auto& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
      fail(ErrorCode::kConfigError, "field '" + field + "' has ragged rows");
    }
    for (Eigen::Index c = 0; c < cols; ++c) {
      m(r, c) = get_as<double>(row[static_cast<std::size_t>(c)], field);
    }
  }
  return m;
}

Eigen::VectorXd vector_from_json(const Json& j, const std::string& field) {
  if (!j.is_array()) fail(ErrorCode::kConfigError, "field '" + field + "' must be an array");
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    v(static_cast<Eigen::Index>(i)) = get_as<double>(j[i], field);
  }
  return v;
}

Json params_to_json(const SystemParams& params) {
  Json j;
  if (const auto* p = std::get_if<LgssParams>(&params)) {
    j["class"] = "lgss";
    j["A"] = matrix_to_json(p->A);
    j["B"] = matrix_to_json(p->B);
    j["C"] = matrix_to_json(p->C);
    j["Q"] = matrix_to_json(p->Q);
    j["R"] = matrix_to_json(p->R);
    j["mu0"] = vector_to_json(p->mu0);
    j["Sigma0"] = matrix_to_json(p->Sigma0);
  } else {
    const auto& h = std::get<IoHmmParams>(params);
    j["class"] = "iohmm";
    j["n_states"] = h.n_states;
    j["n_inputs"] = h.n_inputs;
    j["n_obs"] = h.n_obs;
    Json trans = Json::array();
    for (const auto& t : h.trans) trans.push_back(matrix_to_json(t));
    j["trans"] = std::move(trans);
    j["emit"] = matrix_to_json(h.emit);
    j["init"] = vector_to_json(h.init);
  }
  return j;
}

SystemParams params_from_json(const Json& j) {
  const auto cls = parse_model_class(get_as<std::string>(require(j, "class"), "class"));
  if (cls == ModelClass::kLgss) {
    LgssParams p;
    p.A = matrix_from_json(require(j, "A"), "A");
    p.B = matrix_from_json(require(j, "B"), "B");
    p.C = matrix_from_json(require(j, "C"), "C");
    p.Q = matrix_from_json(require(j, "Q"), "Q");
    p.R = matrix_from_json(require(j, "R"), "R");
    p.mu0 = j.contains("mu0") ? vector_from_json(j.at("mu0"), "mu0")
                              : Eigen::VectorXd::Zero(p.A.rows());
    p.Sigma0 = j.contains("Sigma0") ? matrix_from_json(j.at("Sigma0"), "Sigma0")
                                    : Eigen::MatrixXd::Identity(p.A.rows(), p.A.rows());
    return p;
  }
  IoHmmParams h;
  const auto& trans = require(j, "trans");
  if (!trans.is_array()) fail(ErrorCode::kConfigError, "field 'trans' must be an array");
  for (const auto& t : trans) h.trans.push_back(matrix_from_json(t, "trans"));
  h.emit = matrix_from_json(require(j, "emit"), "emit");
  h.init = vector_from_json(require(j, "init"), "init");
  h.n_states = get_int(j, "n_states", static_cast<int>(h.init.size()));
  h.n_inputs = get_int(j, "n_inputs", static_cast<int>(h.trans.size()));
  h.n_obs = get_int(j, "n_obs", static_cast<int>(h.emit.cols()));
  return h;
}

Json policy_to_json(const PerturbationPolicy& policy) {
  Json j;
  j["id"] = policy.id;
  j["kind"] = std::string(policy_kind_name(policy.kind));
  switch (policy.kind) {
    case PolicyKind::kConstant:
    case PolicyKind::kUniformRandom:
      j["amplitude"] = policy.amplitude;
      break;
    case PolicyKind::kStep:
      j["amplitude"] = policy.amplitude;
      j["step_time"] = policy.step_time;
      break;
    case PolicyKind::kSinusoid:
      j["amplitude"] = policy.amplitude;
      j["frequency"] = policy.frequency;
      break;
    case PolicyKind::kChirp:
      j["amplitude"] = policy.amplitude;
      j["f0"] = policy.f0;
      j["f1"] = policy.f1;
      break;
    case PolicyKind::kPrbs:
      j["amplitude"] = policy.amplitude;
      j["switch_prob"] = policy.switch_prob;
      break;
    case PolicyKind::kAdaptiveFeedback:
      j["gain"] = matrix_to_json(policy.gain);
      j["setpoint"] = vector_to_json(policy.setpoint);
      break;
  }
  return j;
}

PerturbationPolicy policy_from_json(const Json& j) {
  PerturbationPolicy p;
  p.id = get_as<std::string>(require(j, "id"), "id");
  p.kind = parse_policy_kind(get_as<std::string>(require(j, "kind"), "kind"));
  p.amplitude = get_double(j, "amplitude", 0.0);
  p.step_time = get_int(j, "step_time", 0);
  p.frequency = get_double(j, "frequency", 0.0);
  p.f0 = get_double(j, "f0", 0.0);
  p.f1 = get_double(j, "f1", 0.0);
  p.switch_prob = get_double(j, "switch_prob", 0.5);
  if (j.contains("gain")) p.gain = matrix_from_json(j.at("gain"), "gain");
  if (j.contains("setpoint")) p.setpoint = vector_from_json(j.at("setpoint"), "setpoint");
  try {
    validate_policy(p);
  } catch (const Error& e) {
    fail(ErrorCode::kConfigError, "policy '" + p.id + "': " + e.what());
  }
  return p;
}

Json domain_to_json(const ExperimentalDomain& domain) {
  Json j;
  j["input_dim"] = domain.input_dim;
  j["output_dim"] = domain.output_dim;
  Json bounds = Json::array();
  for (const auto& b : domain.input_bounds) bounds.push_back({b.lo, b.hi});
  j["input_bounds"] = std::move(bounds);
  Json space;
  if (domain.output_space.kind == OutputKind::kDiscrete) {
    space["kind"] = "discrete";
    space["alphabet_size"] = domain.output_space.alphabet_size;
  } else {
    space["kind"] = "continuous";
  }
  j["output_space"] = std::move(space);
  j["horizon"] = domain.horizon;
  j["policy_family_ids"] = domain.policy_family_ids;
  return j;
}

ExperimentalDomain domain_from_json(const Json& j) {
  ExperimentalDomain d;
  d.input_dim = get_int(j, "input_dim", 1);
  d.output_dim = get_int(j, "output_dim", 1);
  d.horizon = get_int(j, "horizon", 1);
  const auto& bounds = require(j, "input_bounds");
  if (!bounds.is_array()) fail(ErrorCode::kConfigError, "field 'input_bounds' must be an array");
  for (const auto& b : bounds) {
    if (!b.is_array() || b.size() != 2) {
      fail(ErrorCode::kConfigError, "each input bound must be [lo, hi]");
    }
    d.input_bounds.push_back({get_as<double>(b[0], "input_bounds"),
                              get_as<double>(b[1], "input_bounds")});
  }
  if (j.contains("output_space")) {
    const auto& space = j.at("output_space");
    const auto kind = get_string(space, "kind", "continuous");
    if (kind == "discrete") {
      d.output_space.kind = OutputKind::kDiscrete;
      d.output_space.alphabet_size = get_int(space, "alphabet_size", 0);
    } else if (kind != "continuous") {
      fail(ErrorCode::kConfigError, "unknown output space kind '" + kind + "'");
    }
  }
  if (j.contains("policy_family_ids")) {
    d.policy_family_ids = get_as<std::vector<std::string>>(j.at("policy_family_ids"),
                                                           "policy_family_ids");
  }
  return d;
}

Json environment_to_json(const EnvironmentSpec& env) {
  Json j;
  if (env.kind == EnvironmentKind::kPassthrough) {
    j["kind"] = "passthrough";
  } else {
    j["kind"] = "linear";
    j["F"] = matrix_to_json(env.F);
    j["G"] = matrix_to_json(env.G);
    j["H"] = matrix_to_json(env.H);
  }
  return j;
}

EnvironmentSpec environment_from_json(const Json& j) {
  EnvironmentSpec env;
  const auto kind = get_string(j, "kind", "passthrough");
  if (kind == "passthrough") return env;
  if (kind != "linear") fail(ErrorCode::kConfigError, "unknown environment kind '" + kind + "'");
  env.kind = EnvironmentKind::kLinear;
  env.F = matrix_from_json(require(j, "F"), "F");
  env.G = matrix_from_json(require(j, "G"), "G");
  env.H = matrix_from_json(require(j, "H"), "H");
  return env;
}

Json fit_report_to_json(const FitReport& report) {
  Json j;
  j["theta_hat"] = params_to_json(report.theta_hat);
  j["final_loss"] = report.final_loss;
  j["trace"] = report.trace;
  j["iterations"] = report.iterations;
  j["converged"] = report.converged;
  j["n_records"] = report.n_records;
  return j;
}

Json equivalence_report_to_json(const EquivalenceReport& report) {
  Json j;
  Json rows = Json::array();
  for (const auto& row : report.per_policy) {
    rows.push_back({{"policy_id", row.policy_id},
                    {"value", row.value},
                    {"kind", std::string(discrepancy_kind_name(row.kind))}});
  }
  j["per_policy"] = std::move(rows);
  j["sup_value"] = report.sup_value;
  j["delta"] = report.delta;
  j["pass"] = report.pass;
  j["replicates_per_policy"] = report.replicates_per_policy;
  j["mode"] = std::string(validation_mode_name(report.mode));
  j["seeds"] = report.seeds;
  return j;
}

Json discrimination_report_to_json(const DiscriminationReport& report) {
  Json j;
  j["delta_value"] = report.delta_value;
  j["witness_pair"] = {report.witness_i, report.witness_j};
  j["witness_policy"] = report.witness_policy;
  j["policy_ids"] = report.policy_ids;
  Json rows = Json::array();
  for (const auto& row : report.full_matrix) {
    rows.push_back({{"pair", {row.i, row.j}}, {"values", row.values}});
  }
  j["full_matrix"] = std::move(rows);
  j["exact"] = report.exact;
  j["informative"] = report.informative;
  return j;
}

Json consistency_to_json(const std::vector<ConsistencyRow>& rows) {
  Json out = Json::array();
  for (const auto& row : rows) {
    out.push_back({{"n_records", row.n_records}, {"discrepancy", row.discrepancy}});
  }
  return out;
}

std::string equivalence_csv(const EquivalenceReport& report) {
  std::string out = "policy_id,value,kind,delta,pass\n";
  for (const auto& row : report.per_policy) {
    out += row.policy_id + "," + fmt17(row.value) + "," +
           std::string(discrepancy_kind_name(row.kind)) + "," + fmt17(report.delta) + "," +
           (row.value <= report.delta ? "true" : "false") + "\n";
  }
  return out;
}

std::string dump_json(const Json& j) { return j.dump(2) + "\n"; }

}  // namespace persid
