#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

namespace persid {

/// Closed interval [lo, hi] bounding one input channel.
struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  bool contains(double x) const { return x >= lo && x <= hi; }
  double clamp(double x) const { return x < lo ? lo : (x > hi ? hi : x); }
};

enum class OutputKind { kContinuous, kDiscrete };

struct OutputSpace {
  OutputKind kind = OutputKind::kContinuous;
  int alphabet_size = 0;  // discrete only
};

/// The bounded experimental domain: admissible input box, output space,
/// horizon and the ordered list of admissible policy identifiers.
struct ExperimentalDomain {
  int input_dim = 1;
  int output_dim = 1;
  std::vector<Interval> input_bounds;
  OutputSpace output_space;
  int horizon = 1;
  std::vector<std::string> policy_family_ids;
};

/// Every invariant violation of the domain, in a fixed order. Empty means
/// the domain is valid.
std::vector<std::string> validate_domain(const ExperimentalDomain& domain);

/// Realized input trajectory u_{0:T-1}, stored time-major (T rows x m).
struct PerturbationSequence {
  Eigen::MatrixXd values;
  std::string policy_id;
  std::uint64_t seed = 0;

  int horizon() const { return static_cast<int>(values.rows()); }
  int input_dim() const { return static_cast<int>(values.cols()); }
};

bool within_bounds(const PerturbationSequence& u, std::span<const Interval> bounds);

using Symbols = std::vector<int>;

/// One perturbation-response pair. Outputs hold T+1 time steps: a
/// (T+1) x p matrix for continuous systems or T+1 symbols for discrete ones.
struct TrajectoryRecord {
  PerturbationSequence inputs;
  std::variant<Eigen::MatrixXd, Symbols> outputs;
  std::optional<std::string> truth_tag;
  std::uint64_t seed = 0;

  bool is_discrete() const { return std::holds_alternative<Symbols>(outputs); }
  const Eigen::MatrixXd& continuous() const { return std::get<Eigen::MatrixXd>(outputs); }
  const Symbols& symbols() const { return std::get<Symbols>(outputs); }
  int output_dim() const;
  int output_steps() const;
};

/// A collection of records with replicate groups: records whose input
/// matrices are bit-identical share a group. Groups are listed in order of
/// first appearance and partition the record indices.
struct Dataset {
  std::vector<TrajectoryRecord> records;
  std::vector<std::vector<std::size_t>> groups;

  std::size_t size() const { return records.size(); }
  bool empty() const { return records.empty(); }
};

Dataset group_dataset(std::vector<TrajectoryRecord> records);

/// Groups records after checking every input sequence against the domain's
/// input box. Throws OutOfBounds on the first inadmissible record.
Dataset ingest_dataset(std::vector<TrajectoryRecord> records,
                       const ExperimentalDomain& domain);

struct PerturbationSplit {
  std::vector<std::string> train_policy_ids;
  std::vector<std::string> test_policy_ids;
};

PerturbationSplit make_split(const ExperimentalDomain& domain, double test_fraction,
                             std::uint64_t seed);

/// Throws SplitViolation if the lists overlap or name a policy outside the
/// domain.
void check_split(const PerturbationSplit& split, const ExperimentalDomain& domain);

}  // namespace persid
