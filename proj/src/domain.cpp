#include "persid/domain.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <map>
#include <numeric>
#include <set>

#include "persid/error.hpp"
#include "persid/seeding.hpp"

namespace persid {

std::vector<std::string> validate_domain(const ExperimentalDomain& domain) {
  std::vector<std::string> violations;
  if (domain.input_dim < 1) violations.push_back("input_dim < 1");
  if (domain.output_dim < 1) violations.push_back("output_dim < 1");
  if (domain.horizon < 1) violations.push_back("horizon < 1");
  if (static_cast<int>(domain.input_bounds.size()) != domain.input_dim) {
    violations.push_back("input_bounds has " + std::to_string(domain.input_bounds.size()) +
                         " entries, expected " + std::to_string(domain.input_dim));
  }
  for (std::size_t j = 0; j < domain.input_bounds.size(); ++j) {
    if (!(domain.input_bounds[j].lo <= domain.input_bounds[j].hi)) {
      violations.push_back("lo > hi at dim " + std::to_string(j));
    }
  }
  if (domain.output_space.kind == OutputKind::kDiscrete &&
      domain.output_space.alphabet_size < 1) {
    violations.push_back("discrete alphabet size < 1");
  }
  if (domain.policy_family_ids.empty()) {
    violations.push_back("Π_\U0001D49F empty");
  }
  std::set<std::string> seen;
  for (const auto& id : domain.policy_family_ids) {
    if (!seen.insert(id).second) violations.push_back("duplicate policy id '" + id + "'");
  }
  return violations;
}

bool within_bounds(const PerturbationSequence& u, std::span<const Interval> bounds) {
  if (u.input_dim() != static_cast<int>(bounds.size())) return false;
  for (int t = 0; t < u.horizon(); ++t) {
    for (int j = 0; j < u.input_dim(); ++j) {
      if (!bounds[j].contains(u.values(t, j))) return false;
    }
  }
  return true;
}

int TrajectoryRecord::output_dim() const {
  return is_discrete() ? 1 : static_cast<int>(continuous().cols());
}

int TrajectoryRecord::output_steps() const {
  return is_discrete() ? static_cast<int>(symbols().size())
                       : static_cast<int>(continuous().rows());
}

namespace {

std::string input_key(const Eigen::MatrixXd& values) {
  std::string key(2 * sizeof(Eigen::Index) + values.size() * sizeof(double), '\0');
  const Eigen::Index dims[2] = {values.rows(), values.cols()};
  std::memcpy(key.data(), dims, sizeof(dims));
  if (values.size() > 0) {
    std::memcpy(key.data() + sizeof(dims), values.data(), values.size() * sizeof(double));
  }
  return key;
}

}  // namespace

Dataset group_dataset(std::vector<TrajectoryRecord> records) {
  Dataset data;
  if (!records.empty()) {
    const auto& first = records.front();
    for (std::size_t i = 1; i < records.size(); ++i) {
      const auto& r = records[i];
      if (r.is_discrete() != first.is_discrete() || r.output_dim() != first.output_dim() ||
          r.inputs.input_dim() != first.inputs.input_dim()) {
        fail(ErrorCode::kHeterogeneousDataset,
             "record " + std::to_string(i) + " dimensions differ from record 0");
      }
    }
  }
  std::map<std::string, std::size_t> group_of;
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (records[i].output_steps() != records[i].inputs.horizon() + 1) {
      fail(ErrorCode::kDimensionMismatch,
           "record " + std::to_string(i) + " must have one more output step than inputs");
    }
    auto [it, inserted] = group_of.emplace(input_key(records[i].inputs.values), data.groups.size());
    if (inserted) data.groups.emplace_back();
    data.groups[it->second].push_back(i);
  }
  data.records = std::move(records);
  return data;
}

Dataset ingest_dataset(std::vector<TrajectoryRecord> records, const ExperimentalDomain& domain) {
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (!within_bounds(records[i].inputs, domain.input_bounds)) {
      fail(ErrorCode::kOutOfBounds,
           "record " + std::to_string(i) + " has inputs outside the domain box");
    }
  }
  return group_dataset(std::move(records));
}

PerturbationSplit make_split(const ExperimentalDomain& domain, double test_fraction,
                             std::uint64_t seed) {
  const auto& ids = domain.policy_family_ids;
  if (ids.size() < 2) {
    fail(ErrorCode::kSplitInfeasible, "need at least 2 policy families, have " +
                                          std::to_string(ids.size()));
  }
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    fail(ErrorCode::kInvalidArgument, "test_fraction must lie in (0, 1)");
  }
  const auto count = static_cast<std::size_t>(std::lround(test_fraction * ids.size()));
  const std::size_t n_test = std::min(ids.size() - 1, std::max<std::size_t>(1, count));

  std::vector<std::size_t> order(ids.size());
  std::iota(order.begin(), order.end(), 0);
  // Fisher-Yates with an explicit draw so the result does not depend on the
  // standard library's shuffle implementation.
  Rng rng = make_rng(derive_seed(seed, "split"));
  for (std::size_t i = order.size() - 1; i > 0; --i) {
    const std::size_t j = rng() % (i + 1);
    std::swap(order[i], order[j]);
  }
  std::vector<bool> is_test(ids.size(), false);
  for (std::size_t k = 0; k < n_test; ++k) is_test[order[k]] = true;

  PerturbationSplit split;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    (is_test[i] ? split.test_policy_ids : split.train_policy_ids).push_back(ids[i]);
  }
  return split;
}

void check_split(const PerturbationSplit& split, const ExperimentalDomain& domain) {
  const std::set<std::string> known(domain.policy_family_ids.begin(),
                                    domain.policy_family_ids.end());
  const std::set<std::string> train(split.train_policy_ids.begin(),
                                    split.train_policy_ids.end());
  for (const auto& id : split.test_policy_ids) {
    if (train.count(id)) {
      fail(ErrorCode::kSplitViolation, "policy '" + id + "' is in both train and test");
    }
  }
  for (const auto* list : {&split.train_policy_ids, &split.test_policy_ids}) {
    for (const auto& id : *list) {
      if (!known.count(id)) {
        fail(ErrorCode::kSplitViolation, "policy '" + id + "' is not in the domain");
      }
    }
  }
  if (split.test_policy_ids.empty()) {
    fail(ErrorCode::kSplitViolation, "test policy list is empty");
  }
}

}  // namespace persid
