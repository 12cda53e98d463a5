#include "persid/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <set>

#include "persid/error.hpp"
#include "persid/runner.hpp"
#include "persid/seeding.hpp"

namespace persid {
namespace {

class StageRunner {
 public:
  explicit StageRunner(PipelineReport& report) : report_(report) {}

  template <typename F>
  void operator()(const std::string& name, F&& body) {
    const auto start = std::chrono::steady_clock::now();
    try {
      body();
    } catch (const StageError&) {
      throw;
    } catch (const Error& e) {
      throw StageError(name, e);
    } catch (const std::exception& e) {
      throw StageError(name, Error(ErrorCode::kNumericalFailure, e.what()));
    }
    report_.timings[name] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }

 private:
  PipelineReport& report_;
};

}  // namespace

StageSelection StageSelection::simulate_only() { return {true, false, false, false, false}; }
StageSelection StageSelection::through_fit() { return {true, true, false, false, false}; }
StageSelection StageSelection::through_validate() { return {true, true, true, false, false}; }
StageSelection StageSelection::informativeness_only() { return {false, false, false, true, false}; }
StageSelection StageSelection::all() { return {}; }

std::string config_digest(const Json& config) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a64(config.dump())));
  return buf;
}

PipelineReport run_pipeline(const Scenario& s, const StageSelection& stages) {
  PipelineReport report;
  StageRunner stage(report);
  report.seed = s.seed;
  report.config_digest = config_digest(s.raw);
  report.seeds["master"] = s.seed;

  const bool want_fit = stages.fit || stages.validate;
  const bool want_collect = stages.collect || want_fit;
  const ExperimentalDomain& domain = s.domain;
  std::vector<PerturbationPolicy> train, test;

  stage("domain", [&] {
    const auto violations = validate_domain(domain);
    if (!violations.empty()) {
      std::string msg = "invalid domain:";
      for (const auto& v : violations) msg += " " + v + ";";
      fail(ErrorCode::kConfigError, msg);
    }
    validate(s.truth);
    for (const auto& p : s.policies) validate_policy(p);
  });

  const bool need_delta =
      stages.validate || (stages.informativeness && s.informativeness &&
                          s.informativeness->budget > 0 && !s.informativeness->tau);

  if (want_collect || need_delta || stages.consistency) {
    stage("split", [&] {
      if (s.split.test_fraction) {
        report.split = make_split(domain, *s.split.test_fraction, s.seed);
        report.seeds["split"] = s.seed;
      } else {
        report.split.train_policy_ids = s.split.train;
        report.split.test_policy_ids = s.split.test;
      }
      check_split(report.split, domain);
      if (report.split.train_policy_ids.empty()) {
        fail(ErrorCode::kSplitViolation, "no training policies");
      }
      train = s.policies_for(report.split.train_policy_ids);
      test = s.policies_for(report.split.test_policy_ids);
    });
  }

  if (want_collect) {
    stage("collect", [&] {
      const auto seed = derive_seed(s.seed, "collect");
      report.seeds["collect"] = seed;
      report.training = collect_dataset(s.truth, s.environment, train, s.split.reps_per_policy,
                                        domain.horizon, domain, seed);
    });
  }

  if (want_fit) {
    stage("fit", [&] {
      // Structural train/test audit on the records themselves.
      const std::set<std::string> test_ids(report.split.test_policy_ids.begin(),
                                           report.split.test_policy_ids.end());
      for (const auto& rec : report.training.records) {
        if (test_ids.count(rec.inputs.policy_id)) {
          fail(ErrorCode::kSplitViolation,
               "record from test policy '" + rec.inputs.policy_id + "' reached fit");
        }
        const auto& ids = report.training_policy_ids;
        if (std::find(ids.begin(), ids.end(), rec.inputs.policy_id) == ids.end()) {
          report.training_policy_ids.push_back(rec.inputs.policy_id);
        }
      }
      for (int k = 0; k < s.model.fit_budget; ++k) {
        const auto seed = derive_seed(s.seed, "init", static_cast<std::uint64_t>(k));
        SystemParams init = (k == 0 && s.model.init)
                                ? *s.model.init
                                : random_system(s.model.cls, s.model.latent_dim, domain, seed);
        if (!(k == 0 && s.model.init)) report.seeds["init:" + std::to_string(k)] = seed;
        report.fit_starts.push_back(fit(init, report.training, s.loss, s.model.fit));
      }
      std::size_t best = 0;
      for (std::size_t k = 1; k < report.fit_starts.size(); ++k) {
        if (report.fit_starts[k].final_loss < report.fit_starts[best].final_loss) best = k;
      }
      report.fit = report.fit_starts[best];
    });
  }

  const auto validation_seed = derive_seed(s.seed, "validation");
  const auto truth = BehaviorSource::from_params(s.truth);

  if (need_delta) {
    stage("calibrate", [&] {
      if (s.validation.delta) {
        report.delta = *s.validation.delta;
        return;
      }
      if (test.empty()) fail(ErrorCode::kInvalidArgument, "calibration needs test policies");
      report.seeds["validation"] = validation_seed;
      report.calibration =
          calibrate_delta(truth, test, domain, s.validation.reps, s.validation.n_calibration,
                          s.validation.quantile, validation_seed, s.validation.mode);
      report.delta = report.calibration->delta;
    });
  }

  if (stages.validate) {
    stage("validate", [&] {
      report.seeds["validation"] = validation_seed;
      EquivalenceOptions options;
      options.mode = s.validation.mode;
      options.reps = s.validation.reps;
      options.fitted_policy_ids = report.training_policy_ids;
      report.equivalence = equivalence_test(truth, report.fit->theta_hat, test, domain,
                                            *report.delta, validation_seed, options);
      for (const auto& [key, value] : report.equivalence->seeds) {
        report.seeds["equivalence/" + key] = value;
      }
    });
    stage("intrinsic_error", [&] {
      IntrinsicErrorOptions options;
      options.mode = s.validation.mode;
      options.validation_reps = s.validation.reps;
      for (const auto& f : report.fit_starts) options.candidates.push_back(f.theta_hat);
      report.intrinsic =
          intrinsic_error(s.model.cls, truth, report.training, test, domain, validation_seed,
                          options);
    });
  }

  if (stages.informativeness && s.informativeness) {
    stage("informativeness", [&] {
      const auto& spec = *s.informativeness;
      const auto seed = derive_seed(s.seed, "informativeness");
      report.seeds["informativeness"] = seed;
      DiscriminationOptions options;
      options.reps = spec.reps;
      std::vector<std::vector<PerturbationPolicy>> families;
      for (const auto& f : spec.families) families.push_back(s.policies_for(f));
      InformativenessOutcome outcome;
      outcome.selection =
          select_optimal_family(spec.candidates, families, domain, seed, options);
      if (spec.budget > 0) {
        outcome.tau = spec.tau ? *spec.tau : *report.delta;
        const auto& pool = families[outcome.selection.index];
        outcome.design = greedy_adaptive_design(spec.candidates, pool, spec.budget, domain, seed,
                                                outcome.tau, options);
      }
      report.informativeness = std::move(outcome);
    });
  }

  if (stages.consistency && s.consistency) {
    stage("consistency", [&] {
      const auto seed = derive_seed(s.seed, "consistency");
      report.seeds["consistency"] = seed;
      const auto init_seed = derive_seed(s.seed, "consistency_init");
      const SystemParams init =
          s.model.init ? *s.model.init
                       : random_system(s.model.cls, s.model.latent_dim, domain, init_seed);
      if (!s.model.init) report.seeds["consistency_init"] = init_seed;
      report.consistency = consistency_probe(s.truth, init, train, test, domain,
                                             s.consistency->sizes, seed, s.model.fit);
    });
  }
  return report;
}

Json pipeline_report_to_json(const PipelineReport& r) {
  Json j;
  Json split;
  split["train"] = r.split.train_policy_ids;
  split["test"] = r.split.test_policy_ids;
  j["split"] = std::move(split);
  if (!r.training.empty()) {
    j["training"] = {{"n_records", r.training.size()}, {"n_groups", r.training.groups.size()}};
  }
  if (r.fit) {
    j["fit_report"] = fit_report_to_json(*r.fit);
    Json starts = Json::array();
    for (const auto& f : r.fit_starts) {
      starts.push_back({{"final_loss", f.final_loss},
                        {"iterations", f.iterations},
                        {"converged", f.converged}});
    }
    j["fit_starts"] = std::move(starts);
  }
  if (r.delta) j["delta"] = *r.delta;
  if (r.calibration) j["calibration_null_sups"] = r.calibration->null_sups;
  if (r.equivalence) j["equivalence_report"] = equivalence_report_to_json(*r.equivalence);
  if (r.intrinsic) {
    j["intrinsic_error"] = {{"epsilon_star_estimate", r.intrinsic->epsilon_star_estimate},
                            {"start_sups", r.intrinsic->start_sups},
                            {"best_theta", params_to_json(r.intrinsic->best_theta)}};
  }
  if (r.informativeness) {
    const auto& inf = *r.informativeness;
    Json out;
    out["selected_family"] = inf.selection.index;
    out["family_deltas"] = inf.selection.family_deltas;
    out["discrimination_report"] = discrimination_report_to_json(inf.selection.report);
    if (inf.design) {
      out["design"] = {{"policy_ids", inf.design->policy_ids},
                       {"all_separated", inf.design->all_separated},
                       {"inseparable", inf.design->inseparable},
                       {"tau", inf.tau}};
    }
    j["informativeness"] = std::move(out);
  }
  if (r.consistency) j["consistency_table"] = consistency_to_json(*r.consistency);
  Json provenance;
  provenance["seed"] = r.seed;
  provenance["seeds"] = r.seeds;
  provenance["config_digest"] = r.config_digest;
  provenance["training_policy_ids"] = r.training_policy_ids;
  j["provenance"] = std::move(provenance);
  return j;
}

Json timings_to_json(const PipelineReport& report) { return Json(report.timings); }

}  // namespace persid
