#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "persid/domain.hpp"
#include "persid/seeding.hpp"

namespace persid {

/// Input-conditioned hidden Markov model over a finite input alphabet.
/// trans[u](i, j) = P(x_{t+1} = j | x_t = i, u_t = u), emit(i, o) =
/// P(y_t = o | x_t = i), init(i) = P(x_0 = i). Inputs act on transitions only.
struct IoHmmParams {
  int n_states = 1;
  int n_inputs = 1;
  int n_obs = 1;
  std::vector<Eigen::MatrixXd> trans;
  Eigen::MatrixXd emit;
  Eigen::VectorXd init;
};

/// Throws DimensionMismatch / InvalidArgument unless every table has the
/// declared shape, non-negative entries and rows summing to 1 within 1e-12.
void validate(const IoHmmParams& params);

/// Maps real input values to symbols by rounding; throws InvalidSymbol when
/// a value is not within 1e-9 of an integer in [0, n_inputs).
Symbols input_symbols(const PerturbationSequence& u, int n_inputs);

class IoHmmStepper {
 public:
  IoHmmStepper(const IoHmmParams& params, std::uint64_t seed);

  int start();
  int step(int input_symbol);

 private:
  int draw(const Eigen::Ref<const Eigen::VectorXd>& probs);

  IoHmmParams params_;
  Rng rng_;
  std::uniform_real_distribution<double> unit_{0.0, 1.0};
  int state_ = 0;
};

TrajectoryRecord simulate(const IoHmmParams& params, const PerturbationSequence& u,
                          std::uint64_t seed);

/// log P(y_{0:T} | u_{0:T-1}) by the scaled forward recursion.
double forward_loglik(const IoHmmParams& params, const Symbols& u, const Symbols& y);

/// Exact law over all n_obs^(T+1) output sequences. Index k encodes the
/// sequence in base n_obs with y_0 as the most significant digit.
std::vector<double> exhaustive_law(const IoHmmParams& params, const Symbols& u);

Symbols decode_sequence(std::size_t index, int n_obs, int length);

struct BaumWelchOptions {
  int max_iter = 200;
  double tol = 1e-8;
  bool check_monotone = true;
  double monotonicity_tol = 1e-9;  // relative to max(1, |loglik|)
};

struct BaumWelchResult {
  IoHmmParams params;
  std::vector<double> loglik_trace;
  int iterations = 0;
  bool converged = false;
};

BaumWelchResult baum_welch_fit(const IoHmmParams& init, const Dataset& data,
                               const BaumWelchOptions& options = {});

double dataset_loglik(const IoHmmParams& params, const Dataset& data);

/// Random strictly positive tables.
IoHmmParams random_iohmm(int n_states, int n_inputs, int n_obs, std::uint64_t seed);

}  // namespace persid
