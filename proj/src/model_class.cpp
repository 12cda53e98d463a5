#include "persid/model_class.hpp"

#include "persid/error.hpp"
#include "persid/seeding.hpp"

namespace persid {

std::string_view model_class_name(ModelClass cls) {
  return cls == ModelClass::kLgss ? "lgss" : "iohmm";
}

ModelClass parse_model_class(std::string_view name) {
  if (name == "lgss") return ModelClass::kLgss;
  if (name == "iohmm") return ModelClass::kIoHmm;
  fail(ErrorCode::kConfigError, "unknown model class '" + std::string(name) + "'");
}

ModelClass model_class_of(const SystemParams& system) {
  return std::holds_alternative<LgssParams>(system) ? ModelClass::kLgss : ModelClass::kIoHmm;
}

void validate(const SystemParams& system) {
  std::visit([](const auto& p) { validate(p); }, system);
}

TrajectoryRecord simulate(const SystemParams& system, const PerturbationSequence& u,
                          std::uint64_t seed) {
  return std::visit([&](const auto& p) { return simulate(p, u, seed); }, system);
}

double dataset_loglik(const SystemParams& system, const Dataset& data) {
  return std::visit([&](const auto& p) { return dataset_loglik(p, data); }, system);
}

TrajectorySampler make_sampler(SystemParams system) {
  return [system = std::move(system)](const PerturbationSequence& u, std::uint64_t seed) {
    return simulate(system, u, seed);
  };
}

bool has_exact_law(const SystemParams& system, int horizon) {
  if (const auto* hmm = std::get_if<IoHmmParams>(&system)) {
    double size = 1.0;
    for (int t = 0; t <= horizon; ++t) {
      size *= hmm->n_obs;
      if (size > 1e6) return false;
    }
  }
  return true;
}

DiscrepancyResult exact_discrepancy(const SystemParams& a, const SystemParams& b,
                                    const PerturbationSequence& u) {
  if (model_class_of(a) != model_class_of(b)) {
    fail(ErrorCode::kInvalidArgument, "exact discrepancy needs two systems of the same class");
  }
  if (const auto* la = std::get_if<LgssParams>(&a)) {
    const auto& lb = std::get<LgssParams>(b);
    return gaussian_w2(trajectory_law(*la, u), trajectory_law(lb, u), Normalization::kPerTimestep);
  }
  const auto& ha = std::get<IoHmmParams>(a);
  const auto& hb = std::get<IoHmmParams>(b);
  const Symbols symbols = input_symbols(u, ha.n_inputs);
  const auto law_a = exhaustive_law(ha, symbols);
  const auto law_b = exhaustive_law(hb, symbols);
  return tv_exhaustive(law_a, law_b);
}

namespace {

void encode_row(const TrajectoryRecord& record, const OutputSpace& space,
                Eigen::Ref<Eigen::RowVectorXd, 0, Eigen::InnerStride<>> row) {
  if (record.is_discrete()) {
    const auto& y = record.symbols();
    const int width = space.alphabet_size;
    row.setZero();
    for (std::size_t t = 0; t < y.size(); ++t) {
      if (y[t] < 0 || y[t] >= width) {
        fail(ErrorCode::kInvalidSymbol, "output symbol " + std::to_string(y[t]) +
                                            " outside the alphabet");
      }
      row(static_cast<Eigen::Index>(t) * width + y[t]) = 1.0;
    }
  } else {
    const auto& y = record.continuous();
    for (Eigen::Index t = 0; t < y.rows(); ++t) {
      row.segment(t * y.cols(), y.cols()) = y.row(t);
    }
  }
}

Eigen::Index encoded_width(const TrajectoryRecord& record, const OutputSpace& space) {
  if (record.is_discrete()) {
    return static_cast<Eigen::Index>(record.symbols().size()) * space.alphabet_size;
  }
  return record.continuous().size();
}

}  // namespace

Eigen::MatrixXd stack_outputs(std::span<const TrajectoryRecord> records,
                              const OutputSpace& output_space) {
  if (records.empty()) return {};
  const Eigen::Index width = encoded_width(records.front(), output_space);
  Eigen::MatrixXd out(static_cast<Eigen::Index>(records.size()), width);
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (encoded_width(records[i], output_space) != width) {
      fail(ErrorCode::kHeterogeneousDataset, "records have different output lengths");
    }
    encode_row(records[i], output_space, out.row(static_cast<Eigen::Index>(i)));
  }
  return out;
}

Eigen::MatrixXd sample_set(const TrajectorySampler& sampler, const PerturbationSequence& u,
                           int reps, std::uint64_t seed, const OutputSpace& output_space) {
  if (reps < 1) fail(ErrorCode::kInvalidArgument, "reps must be >= 1");
  Eigen::MatrixXd out;
  for (int r = 0; r < reps; ++r) {
    const auto record = sampler(u, derive_seed(seed, "replicate", static_cast<std::uint64_t>(r)));
    if (r == 0) out.resize(reps, encoded_width(record, output_space));
    encode_row(record, output_space, out.row(r));
  }
  return out;
}

DiscrepancyResult sampled_discrepancy(const Eigen::MatrixXd& xs, const Eigen::MatrixXd& ys,
                                      const OutputSpace& output_space) {
  if (output_space.kind == OutputKind::kDiscrete) return mmd2_biased(xs, ys);
  return energy_distance(xs, ys);
}

double ridge_penalty(const SystemParams& system) {
  if (const auto* p = std::get_if<LgssParams>(&system)) {
    return p->A.squaredNorm() + p->B.squaredNorm() + p->C.squaredNorm();
  }
  const auto& h = std::get<IoHmmParams>(system);
  double total = h.emit.squaredNorm() + h.init.squaredNorm();
  for (const auto& t : h.trans) total += t.squaredNorm();
  return total;
}

}  // namespace persid
