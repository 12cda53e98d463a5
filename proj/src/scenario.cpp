#include "persid/scenario.hpp"

#include <fstream>

#include "persid/error.hpp"

namespace persid {
namespace {

Regularizer parse_regularizer(const std::string& name) {
  if (name == "none") return Regularizer::kNone;
  if (name == "ridge") return Regularizer::kRidge;
  fail(ErrorCode::kConfigError, "unknown regularizer '" + name + "'");
}

LossMode parse_loss_mode(const std::string& name) {
  if (name == "nll") return LossMode::kNll;
  if (name == "distributional") return LossMode::kDistributional;
  fail(ErrorCode::kConfigError, "unknown loss mode '" + name + "'");
}

std::vector<std::string> id_list(const Json& j, const std::string& field) {
  if (!j.is_array()) fail(ErrorCode::kConfigError, "field '" + field + "' must be an array");
  std::vector<std::string> ids;
  for (const auto& x : j) {
    if (!x.is_string()) fail(ErrorCode::kConfigError, "field '" + field + "' must hold strings");
    ids.push_back(x.get<std::string>());
  }
  return ids;
}

}  // namespace

const PerturbationPolicy& Scenario::policy(const std::string& id) const {
  for (const auto& p : policies) {
    if (p.id == id) return p;
  }
  fail(ErrorCode::kConfigError, "unknown policy id '" + id + "'");
}

std::vector<PerturbationPolicy> Scenario::policies_for(const std::vector<std::string>& ids) const {
  std::vector<PerturbationPolicy> out;
  for (const auto& id : ids) out.push_back(policy(id));
  return out;
}

Scenario parse_scenario(const Json& j) {
  if (!j.is_object()) fail(ErrorCode::kConfigError, "scenario must be a JSON object");
  Scenario s;
  s.raw = j;
  const auto& seed = require(j, "seed");
  if (!seed.is_number_unsigned() && !(seed.is_number_integer() && seed.get<long long>() >= 0)) {
    fail(ErrorCode::kConfigError, "field 'seed' must be a nonnegative integer");
  }
  s.seed = seed.get<std::uint64_t>();

  const auto& policies = require(j, "policies");
  if (!policies.is_array()) fail(ErrorCode::kConfigError, "field 'policies' must be an array");
  for (const auto& p : policies) s.policies.push_back(policy_from_json(p));

  s.domain = domain_from_json(require(j, "domain"));
  if (s.domain.policy_family_ids.empty()) {
    for (const auto& p : s.policies) s.domain.policy_family_ids.push_back(p.id);
  }
  for (const auto& id : s.domain.policy_family_ids) s.policy(id);

  s.truth = params_from_json(require(j, "truth"));

  if (j.contains("environment")) s.environment = environment_from_json(j.at("environment"));

  const auto& mc = require(j, "model_class");
  s.model.cls = parse_model_class(get_string(mc, "class", "lgss"));
  s.model.latent_dim = get_int(mc, "latent_dim", 1);
  s.model.fit_budget = get_int(mc, "fit_budget", 1);
  s.model.fit.max_iter = get_int(mc, "max_iter", s.model.fit.max_iter);
  s.model.fit.tol = get_double(mc, "tol", s.model.fit.tol);
  if (mc.contains("init")) s.model.init = params_from_json(mc.at("init"));
  if (s.model.fit_budget < 1) fail(ErrorCode::kConfigError, "fit_budget must be >= 1");

  const auto& split = require(j, "split");
  if (split.contains("test_fraction")) {
    s.split.test_fraction = get_double(split, "test_fraction", 0.0);
  } else {
    s.split.train = id_list(require(split, "train"), "split.train");
    s.split.test = id_list(require(split, "test"), "split.test");
  }
  s.split.reps_per_policy = get_int(split, "reps_per_policy", s.split.reps_per_policy);

  if (j.contains("loss")) {
    const auto& loss = j.at("loss");
    s.loss.lambda = get_double(loss, "lambda", 0.0);
    s.loss.regularizer = parse_regularizer(get_string(loss, "regularizer", "none"));
    s.loss.mode = parse_loss_mode(get_string(loss, "mode", "nll"));
  }

  if (j.contains("validation")) {
    const auto& v = j.at("validation");
    s.validation.mode = parse_validation_mode(get_string(v, "mode", "sampled"));
    s.validation.reps = get_int(v, "reps", s.validation.reps);
    s.validation.n_calibration = get_int(v, "n_calibration", s.validation.n_calibration);
    s.validation.quantile = get_double(v, "quantile", s.validation.quantile);
    if (v.contains("delta")) s.validation.delta = get_double(v, "delta", 0.0);
  }

  if (j.contains("informativeness")) {
    const auto& inf = j.at("informativeness");
    InformativenessSpec spec;
    const auto& candidates = require(inf, "candidates");
    if (!candidates.is_array()) fail(ErrorCode::kConfigError, "field 'candidates' must be an array");
    for (const auto& c : candidates) spec.candidates.push_back(params_from_json(c));
    if (inf.contains("families")) {
      for (const auto& f : inf.at("families")) spec.families.push_back(id_list(f, "families"));
    } else {
      spec.families.push_back(s.domain.policy_family_ids);
    }
    for (const auto& f : spec.families) {
      for (const auto& id : f) s.policy(id);
    }
    spec.budget = get_int(inf, "budget", 0);
    if (inf.contains("tau")) spec.tau = get_double(inf, "tau", 0.0);
    spec.reps = get_int(inf, "reps", spec.reps);
    s.informativeness = std::move(spec);
  }

  if (j.contains("consistency")) {
    ConsistencySpec spec;
    const auto& sizes = require(j.at("consistency"), "sizes");
    if (!sizes.is_array()) fail(ErrorCode::kConfigError, "field 'sizes' must be an array");
    for (const auto& n : sizes) {
      if (!n.is_number_integer() || n.get<long long>() < 0) {
        fail(ErrorCode::kConfigError, "field 'sizes' must hold nonnegative integers");
      }
      spec.sizes.push_back(n.get<std::size_t>());
    }
    s.consistency = std::move(spec);
  }
  return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kConfigError, "cannot open scenario file " + path.string());
  Json j;
  try {
    j = Json::parse(in);
  } catch (const Json::exception& e) {
    fail(ErrorCode::kConfigError, path.string() + " is not valid JSON: " + e.what());
  }
  return parse_scenario(j);
}

}  // namespace persid
