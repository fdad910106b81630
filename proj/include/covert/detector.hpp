// SPDX-License-Identifier: Apache-2.0
//
// Willie's energy detector: exact error probabilities for isotropic received
// covariance and a seeded, chunk-parallel Monte Carlo for the general case.

#pragma once

#include <cstdint>

#include "covert/covertness.hpp"

namespace covert {

struct DetectionOutcome {
  double alpha = 0.0;  // false alarm
  double beta = 0.0;   // missed detection
  double threshold = 0.0;
  double error_sum = 0.0;
  double pinsker_floor = 0.0;  // 1 - sqrt(D_n / 2), clamped at 0
  std::uint64_t trials = 0;    // 0 for exact evaluations
  double confidence_halfwidth = 0.0;
};

/// Exact alpha + beta of ||y||^2 >< tau when every one of the dof / 2 complex
/// observations has variance sigma_w^2 under H0 and sigma_w^2 + p under H1.
/// The optimal tau is the unique crossing of the two gamma densities. For
/// p == 0 the hypotheses coincide; tau is reported as the H0 mean.
DetectionOutcome exact_error_sum(double signal_power, double sigma_w2, std::uint64_t dof);

/// Same, derived from a scenario: requires H_w Q H_w^H to be a multiple of
/// the identity (ErrorCode::unsupported_case otherwise).
DetectionOutcome exact_error_sum(const MimoScenario& scenario, const PowerAllocation& alloc,
                                 std::uint64_t n);

struct MonteCarloOptions {
  /// Draw every symbol and noise sample instead of the equivalent gamma
  /// energies. Much slower; used to cross-check the aggregated path.
  bool per_symbol = false;
  /// Worker threads; 0 uses the hardware concurrency. Results do not depend on it.
  unsigned threads = 0;
};

/// Energy detector with the threshold chosen to minimize empirical
/// alpha + beta over the pooled order statistics of both hypotheses.
DetectionOutcome monte_carlo_detection(const MimoScenario& scenario, const PowerAllocation& alloc,
                                       std::uint64_t n, std::uint64_t trials, std::uint64_t seed,
                                       const MonteCarloOptions& options = {});

struct KlEstimate {
  double mean = 0.0;
  double standard_error = 0.0;
};

/// Monte Carlo mean of the log-likelihood ratio log f_1(y^n) - log f_0(y^n) under H1.
KlEstimate empirical_kl(const MimoScenario& scenario, const PowerAllocation& alloc,
                        std::uint64_t n, std::uint64_t trials, std::uint64_t seed,
                        const MonteCarloOptions& options = {});

}  // namespace covert
