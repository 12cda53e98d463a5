#include "persid/runner.hpp"

#include <cmath>
#include <string>
#include <variant>

#include "persid/error.hpp"
#include "persid/parallel.hpp"
#include "persid/seeding.hpp"

namespace persid {
namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

bool discrete_inputs(const ExperimentalDomain& domain) {
  return domain.output_space.kind == OutputKind::kDiscrete;
}

/// Uniform stepping interface over the model classes; discrete outputs are
/// returned as one-element vectors holding the symbol.
class Participant {
 public:
  Participant(const SystemParams& truth, std::uint64_t seed) {
    if (const auto* l = std::get_if<LgssParams>(&truth)) {
      stepper_.emplace<LgssStepper>(*l, seed);
    } else {
      stepper_.emplace<IoHmmStepper>(std::get<IoHmmParams>(truth), seed);
    }
  }

  VectorXd start() {
    if (auto* l = std::get_if<LgssStepper>(&stepper_)) return l->start();
    return VectorXd::Constant(1, std::get<IoHmmStepper>(stepper_).start());
  }

  VectorXd step(const VectorXd& u) {
    if (auto* l = std::get_if<LgssStepper>(&stepper_)) return l->step(u);
    return VectorXd::Constant(1, std::get<IoHmmStepper>(stepper_).step(static_cast<int>(u(0))));
  }

 private:
  std::variant<std::monostate, LgssStepper, IoHmmStepper> stepper_;
};

void check_environment(const EnvironmentSpec& env, int m) {
  if (env.kind == EnvironmentKind::kPassthrough) return;
  const auto k = env.F.rows();
  if (env.F.cols() != k || env.G.rows() != k || env.G.cols() != m || env.H.rows() != m ||
      env.H.cols() != k) {
    fail(ErrorCode::kDimensionMismatch, "environment needs F k x k, G k x m, H m x k");
  }
}

}  // namespace

PerturbationSequence generate_for_domain(const PerturbationPolicy& policy,
                                         const ExperimentalDomain& domain, int horizon,
                                         std::uint64_t seed) {
  auto seq = generate_open_loop(policy, horizon, domain.input_bounds, seed);
  if (discrete_inputs(domain)) seq.values = seq.values.array().round().matrix();
  return seq;
}

ClosedLoopSeeds closed_loop_seeds(std::uint64_t seed) {
  return {derive_seed(seed, "policy"), derive_seed(seed, "system")};
}

TrajectoryRecord run_closed_loop(const SystemParams& truth, const EnvironmentSpec& environment,
                                 const PerturbationPolicy& policy,
                                 const ExperimentalDomain& domain, int horizon,
                                 const ClosedLoopSeeds& seeds) {
  if (horizon < 1) fail(ErrorCode::kInvalidHorizon, "horizon must be positive");
  const int m = domain.input_dim;
  if (static_cast<int>(domain.input_bounds.size()) != m) {
    fail(ErrorCode::kDimensionMismatch, "domain bounds do not match input_dim");
  }
  check_environment(environment, m);
  const bool discrete = discrete_inputs(domain);

  PerturbationSequence planned;
  if (!policy.is_adaptive()) planned = generate_for_domain(policy, domain, horizon, seeds.policy);

  Participant participant(truth, seeds.system);
  const VectorXd y0 = participant.start();
  const auto p = y0.size();
  MatrixXd outputs(horizon + 1, p);
  outputs.row(0) = y0.transpose();

  PerturbationSequence applied;
  applied.policy_id = policy.id;
  applied.seed = seeds.policy;
  applied.values.resize(horizon, m);

  VectorXd env_state;
  if (environment.kind == EnvironmentKind::kLinear) env_state = VectorXd::Zero(environment.F.rows());

  for (int t = 0; t < horizon; ++t) {
    VectorXd u = policy.is_adaptive()
                     ? adaptive_step(policy, t, outputs.topRows(t + 1), domain.input_bounds)
                     : VectorXd(planned.values.row(t).transpose());
    VectorXd stimulus;
    if (environment.kind == EnvironmentKind::kPassthrough) {
      stimulus = std::move(u);
    } else {
      stimulus = environment.H * env_state;
      for (int j = 0; j < m; ++j) stimulus(j) = domain.input_bounds[j].clamp(stimulus(j));
      env_state = environment.F * env_state + environment.G * u;
    }
    if (discrete) stimulus = stimulus.array().round().matrix();
    applied.values.row(t) = stimulus.transpose();
    outputs.row(t + 1) = participant.step(stimulus).transpose();
  }

  TrajectoryRecord record;
  record.inputs = std::move(applied);
  if (std::holds_alternative<IoHmmParams>(truth)) {
    Symbols symbols(horizon + 1);
    for (int t = 0; t <= horizon; ++t) symbols[t] = static_cast<int>(outputs(t, 0));
    record.outputs = std::move(symbols);
  } else {
    record.outputs = std::move(outputs);
  }
  record.seed = seeds.system;
  return record;
}

TrajectoryRecord run_closed_loop(const SystemParams& truth, const EnvironmentSpec& environment,
                                 const PerturbationPolicy& policy,
                                 const ExperimentalDomain& domain, int horizon,
                                 std::uint64_t seed) {
  return run_closed_loop(truth, environment, policy, domain, horizon, closed_loop_seeds(seed));
}

std::uint64_t sequence_seed(std::uint64_t seed, std::string_view policy_id) {
  return derive_seed(seed, "sequence:" + std::string(policy_id));
}

Dataset collect_dataset(const SystemParams& truth, const EnvironmentSpec& environment,
                        std::span<const PerturbationPolicy> policies, int reps, int horizon,
                        const ExperimentalDomain& domain, std::uint64_t seed) {
  if (reps < 1) fail(ErrorCode::kInvalidArgument, "reps_per_policy must be >= 1");
  const std::size_t total = policies.size() * static_cast<std::size_t>(reps);
  std::vector<TrajectoryRecord> records(total);
  parallel_for(total, [&](std::size_t r) {
    const auto& policy = policies[r / reps];
    const ClosedLoopSeeds seeds{sequence_seed(seed, policy.id), derive_seed(seed, "record", r)};
    records[r] = run_closed_loop(truth, environment, policy, domain, horizon, seeds);
  });
  return ingest_dataset(std::move(records), domain);
}

}  // namespace persid
