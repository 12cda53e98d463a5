#include "persid/iohmm.hpp"

#include <cmath>

#include "persid/error.hpp"
#include "persid/parallel.hpp"

namespace persid {
namespace {

using Eigen::MatrixXd;
using Eigen::RowVectorXd;
using Eigen::VectorXd;

constexpr double kProbabilityFloor = 1e-8;
constexpr std::size_t kMaxExhaustive = 1'000'000;

void check_stochastic_rows(const MatrixXd& m, const std::string& name) {
  if ((m.array() < 0.0).any()) fail(ErrorCode::kInvalidArgument, name + " has negative entries");
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    if (std::abs(m.row(i).sum() - 1.0) > 1e-12) {
      fail(ErrorCode::kInvalidArgument, name + " row " + std::to_string(i) + " does not sum to 1");
    }
  }
}

void check_symbols(const Symbols& s, int alphabet, const char* what) {
  for (std::size_t t = 0; t < s.size(); ++t) {
    if (s[t] < 0 || s[t] >= alphabet) {
      fail(ErrorCode::kInvalidSymbol, std::string(what) + " symbol " + std::to_string(s[t]) +
                                          " at t=" + std::to_string(t) + " outside [0," +
                                          std::to_string(alphabet) + ")");
    }
  }
}

void normalize_rows(MatrixXd& m) {
  m = m.cwiseMax(kProbabilityFloor);
  for (Eigen::Index i = 0; i < m.rows(); ++i) m.row(i) /= m.row(i).sum();
}

/// Scaled forward-backward pass. alpha/beta rows are normalized per step;
/// scale[t] is the normalizer of alpha at t, so loglik = sum log scale.
struct ForwardBackward {
  MatrixXd alpha, beta;
  VectorXd scale;
  double loglik = 0.0;
};

ForwardBackward forward(const IoHmmParams& p, const Symbols& u, const Symbols& y) {
  const int steps = static_cast<int>(y.size());
  ForwardBackward fb;
  fb.alpha.resize(steps, p.n_states);
  fb.scale.resize(steps);
  RowVectorXd a = p.init.transpose().cwiseProduct(p.emit.col(y[0]).transpose());
  for (int t = 0; t < steps; ++t) {
    if (t > 0) {
      a = (fb.alpha.row(t - 1) * p.trans[u[t - 1]]).cwiseProduct(p.emit.col(y[t]).transpose());
    }
    const double c = a.sum();
    fb.scale(t) = c;
    if (!(c > 0.0)) {
      fb.loglik = -std::numeric_limits<double>::infinity();
      fb.alpha.row(t).setZero();
      return fb;
    }
    fb.alpha.row(t) = a / c;
    fb.loglik += std::log(c);
  }
  return fb;
}

void backward(const IoHmmParams& p, const Symbols& u, const Symbols& y, ForwardBackward& fb) {
  const int steps = static_cast<int>(y.size());
  fb.beta.resize(steps, p.n_states);
  fb.beta.row(steps - 1).setOnes();
  for (int t = steps - 2; t >= 0; --t) {
    const VectorXd next = fb.beta.row(t + 1).transpose().cwiseProduct(p.emit.col(y[t + 1]));
    fb.beta.row(t) = (p.trans[u[t]] * next).transpose() / fb.scale(t + 1);
  }
}

void check_record(const IoHmmParams& p, const Symbols& u, const Symbols& y) {
  if (y.size() != u.size() + 1) {
    fail(ErrorCode::kDimensionMismatch, "outputs must have one more step than inputs");
  }
  check_symbols(u, p.n_inputs, "input");
  check_symbols(y, p.n_obs, "output");
}

}  // namespace

void validate(const IoHmmParams& p) {
  if (p.n_states < 1 || p.n_inputs < 1 || p.n_obs < 1) {
    fail(ErrorCode::kInvalidArgument, "S, U, O must be positive");
  }
  if (static_cast<int>(p.trans.size()) != p.n_inputs) {
    fail(ErrorCode::kDimensionMismatch, "need one transition matrix per input symbol");
  }
  for (int u = 0; u < p.n_inputs; ++u) {
    if (p.trans[u].rows() != p.n_states || p.trans[u].cols() != p.n_states) {
      fail(ErrorCode::kDimensionMismatch, "transition matrix must be S x S");
    }
    check_stochastic_rows(p.trans[u], "trans[" + std::to_string(u) + "]");
  }
  if (p.emit.rows() != p.n_states || p.emit.cols() != p.n_obs) {
    fail(ErrorCode::kDimensionMismatch, "emission matrix must be S x O");
  }
  check_stochastic_rows(p.emit, "emit");
  if (p.init.size() != p.n_states) fail(ErrorCode::kDimensionMismatch, "init must have length S");
  check_stochastic_rows(p.init.transpose(), "init");
}

Symbols input_symbols(const PerturbationSequence& u, int n_inputs) {
  if (u.input_dim() != 1) {
    fail(ErrorCode::kDimensionMismatch, "discrete systems take a single input channel");
  }
  Symbols out(u.horizon());
  for (int t = 0; t < u.horizon(); ++t) {
    const double v = u.values(t, 0);
    const double r = std::round(v);
    if (!(std::abs(v - r) <= 1e-9) || r < 0 || r >= n_inputs) {
      fail(ErrorCode::kInvalidSymbol, "input value " + std::to_string(v) + " at t=" +
                                          std::to_string(t) + " is not a symbol in [0," +
                                          std::to_string(n_inputs) + ")");
    }
    out[t] = static_cast<int>(r);
  }
  return out;
}

IoHmmStepper::IoHmmStepper(const IoHmmParams& params, std::uint64_t seed)
    : params_(params), rng_(make_rng(seed)) {}

int IoHmmStepper::draw(const Eigen::Ref<const VectorXd>& probs) {
  const double r = unit_(rng_);
  double acc = 0.0;
  for (Eigen::Index i = 0; i < probs.size(); ++i) {
    acc += probs(i);
    if (r < acc) return static_cast<int>(i);
  }
  // Rounding left r above the cumulative sum; take the last positive entry.
  for (Eigen::Index i = probs.size() - 1; i > 0; --i) {
    if (probs(i) > 0.0) return static_cast<int>(i);
  }
  return 0;
}

int IoHmmStepper::start() {
  state_ = draw(params_.init);
  return draw(params_.emit.row(state_).transpose());
}

int IoHmmStepper::step(int input_symbol) {
  if (input_symbol < 0 || input_symbol >= params_.n_inputs) {
    fail(ErrorCode::kInvalidSymbol, "input symbol " + std::to_string(input_symbol));
  }
  state_ = draw(params_.trans[input_symbol].row(state_).transpose());
  return draw(params_.emit.row(state_).transpose());
}

TrajectoryRecord simulate(const IoHmmParams& params, const PerturbationSequence& u,
                          std::uint64_t seed) {
  const Symbols inputs = input_symbols(u, params.n_inputs);
  IoHmmStepper stepper(params, seed);
  Symbols y;
  y.reserve(inputs.size() + 1);
  y.push_back(stepper.start());
  for (int s : inputs) y.push_back(stepper.step(s));
  TrajectoryRecord record;
  record.inputs = u;
  record.outputs = std::move(y);
  record.seed = seed;
  return record;
}

double forward_loglik(const IoHmmParams& params, const Symbols& u, const Symbols& y) {
  check_record(params, u, y);
  return forward(params, u, y).loglik;
}

Symbols decode_sequence(std::size_t index, int n_obs, int length) {
  Symbols y(length);
  for (int t = length - 1; t >= 0; --t) {
    y[t] = static_cast<int>(index % n_obs);
    index /= n_obs;
  }
  return y;
}

std::vector<double> exhaustive_law(const IoHmmParams& params, const Symbols& u) {
  check_symbols(u, params.n_inputs, "input");
  const int length = static_cast<int>(u.size()) + 1;
  double size = 1.0;
  for (int t = 0; t < length; ++t) {
    size *= params.n_obs;
    if (size > static_cast<double>(kMaxExhaustive)) {
      fail(ErrorCode::kExhaustiveInfeasible,
           "O^(T+1) exceeds " + std::to_string(kMaxExhaustive) + " sequences");
    }
  }
  const auto count = static_cast<std::size_t>(size);
  std::vector<double> law(count);
  for (std::size_t k = 0; k < count; ++k) {
    law[k] = std::exp(forward(params, u, decode_sequence(k, params.n_obs, length)).loglik);
  }
  return law;
}

double dataset_loglik(const IoHmmParams& params, const Dataset& data) {
  double total = 0.0;
  for (const auto& record : data.records) {
    total += forward_loglik(params, input_symbols(record.inputs, params.n_inputs),
                            record.symbols());
  }
  return total;
}

namespace {

struct CountStats {
  double loglik = 0.0;
  VectorXd init;
  std::vector<MatrixXd> trans;
  MatrixXd emit;

  CountStats(const IoHmmParams& p)
      : init(VectorXd::Zero(p.n_states)),
        trans(p.n_inputs, MatrixXd::Zero(p.n_states, p.n_states)),
        emit(MatrixXd::Zero(p.n_states, p.n_obs)) {}
};

CountStats expected_counts(const IoHmmParams& p, const Dataset& data) {
  std::vector<CountStats> partial(data.size(), CountStats(p));
  parallel_for(data.size(), [&](std::size_t i) {
    const auto& record = data.records[i];
    const Symbols u = input_symbols(record.inputs, p.n_inputs);
    const Symbols& y = record.symbols();
    check_record(p, u, y);
    auto fb = forward(p, u, y);
    auto& c = partial[i];
    c.loglik = fb.loglik;
    if (!std::isfinite(fb.loglik)) return;
    backward(p, u, y, fb);
    const int steps = static_cast<int>(y.size());
    for (int t = 0; t < steps; ++t) {
      RowVectorXd gamma = fb.alpha.row(t).cwiseProduct(fb.beta.row(t));
      gamma /= gamma.sum();
      if (t == 0) c.init += gamma.transpose();
      c.emit.col(y[t]) += gamma.transpose();
      if (t + 1 < steps) {
        const RowVectorXd next = fb.beta.row(t + 1).cwiseProduct(p.emit.col(y[t + 1]).transpose());
        MatrixXd xi = (fb.alpha.row(t).transpose() * next).cwiseProduct(p.trans[u[t]]);
        xi /= fb.scale(t + 1);
        c.trans[u[t]] += xi;
      }
    }
  });
  CountStats total(p);
  for (const auto& c : partial) {
    total.loglik += c.loglik;
    total.init += c.init;
    total.emit += c.emit;
    for (int u = 0; u < p.n_inputs; ++u) total.trans[u] += c.trans[u];
  }
  return total;
}

}  // namespace

BaumWelchResult baum_welch_fit(const IoHmmParams& init, const Dataset& data,
                               const BaumWelchOptions& options) {
  if (data.empty()) fail(ErrorCode::kEmptyDataset, "baum_welch_fit needs at least one record");
  if (!data.records.front().is_discrete()) {
    fail(ErrorCode::kInvalidArgument, "baum_welch_fit needs discrete outputs");
  }
  validate(init);

  BaumWelchResult result;
  result.params = init;
  auto counts = expected_counts(result.params, data);
  result.loglik_trace.push_back(counts.loglik);
  for (int k = 1; k <= options.max_iter; ++k) {
    IoHmmParams next = result.params;
    MatrixXd init_row = counts.init.transpose();
    normalize_rows(init_row);
    next.init = init_row.transpose();
    next.emit = counts.emit;
    normalize_rows(next.emit);
    for (int u = 0; u < next.n_inputs; ++u) {
      // Inputs never observed keep their previous transition matrix.
      if (counts.trans[u].sum() > 0.0) {
        next.trans[u] = counts.trans[u];
        normalize_rows(next.trans[u]);
      }
    }
    auto next_counts = expected_counts(next, data);
    const double prev = result.loglik_trace.back();
    const double curr = next_counts.loglik;
    if (options.check_monotone &&
        curr < prev - options.monotonicity_tol * std::max(1.0, std::abs(prev))) {
      fail(ErrorCode::kMonotonicityViolation,
           "log-likelihood decreased from " + std::to_string(prev) + " to " +
               std::to_string(curr) + " at iteration " + std::to_string(k));
    }
    result.params = std::move(next);
    counts = std::move(next_counts);
    result.loglik_trace.push_back(curr);
    result.iterations = k;
    if (std::abs(curr - prev) < options.tol) {
      result.converged = true;
      break;
    }
  }
  return result;
}

IoHmmParams random_iohmm(int n_states, int n_inputs, int n_obs, std::uint64_t seed) {
  Rng rng = make_rng(seed);
  std::uniform_real_distribution<double> unit(0.1, 1.0);
  auto table = [&](int rows, int cols) {
    MatrixXd m(rows, cols);
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j) m(i, j) = unit(rng);
    for (int i = 0; i < rows; ++i) m.row(i) /= m.row(i).sum();
    return m;
  };
  IoHmmParams p;
  p.n_states = n_states;
  p.n_inputs = n_inputs;
  p.n_obs = n_obs;
  for (int u = 0; u < n_inputs; ++u) p.trans.push_back(table(n_states, n_states));
  p.emit = table(n_states, n_obs);
  p.init = table(1, n_states).transpose();
  return p;
}

}  // namespace persid
