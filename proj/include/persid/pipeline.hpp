#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "persid/equivalence.hpp"
#include "persid/informativeness.hpp"
#include "persid/reconstruction.hpp"
#include "persid/scenario.hpp"

namespace persid {

/// Which stages run. Stages a later one depends on are always run.
struct StageSelection {
  bool collect = true;
  bool fit = true;
  bool validate = true;
  bool informativeness = true;
  bool consistency = true;

  static StageSelection simulate_only();
  static StageSelection through_fit();
  static StageSelection through_validate();
  static StageSelection informativeness_only();
  static StageSelection all();
};

struct InformativenessOutcome {
  FamilySelection selection;
  std::optional<AdaptiveDesign> design;
  double tau = 0.0;
};

struct PipelineReport {
  PerturbationSplit split;
  Dataset training;  // not serialized
  std::optional<FitReport> fit;
  std::vector<FitReport> fit_starts;
  std::optional<double> delta;
  std::optional<CalibrationResult> calibration;
  std::optional<EquivalenceReport> equivalence;
  std::optional<IntrinsicErrorResult> intrinsic;
  std::optional<InformativenessOutcome> informativeness;
  std::optional<std::vector<ConsistencyRow>> consistency;

  std::uint64_t seed = 0;
  std::map<std::string, std::uint64_t> seeds;
  std::string config_digest;
  /// Distinct policy ids of the records handed to fit, in first-use order.
  std::vector<std::string> training_policy_ids;
  std::map<std::string, double> timings;  // seconds per stage
};

/// build domain -> split -> collect -> fit -> calibrate -> validate ->
/// intrinsic error -> optional informativeness and consistency. Errors are
/// rethrown as StageError tagged with the failing stage.
PipelineReport run_pipeline(const Scenario& scenario,
                            const StageSelection& stages = StageSelection::all());

/// Deterministic report: timings are excluded.
Json pipeline_report_to_json(const PipelineReport& report);
Json timings_to_json(const PipelineReport& report);

/// Hex FNV-1a digest of the canonical (key-sorted, compact) JSON.
std::string config_digest(const Json& config);

}  // namespace persid
