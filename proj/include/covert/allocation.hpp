// SPDX-License-Identifier: Apache-2.0
//
// KL-constrained power allocation over Bob's eigendirections, normalized KL
// shares, the closed-form achievability allocation and unit-rank beam
// steering (including null steering toward Willie).

#pragma once

#include <cstdint>

#include "covert/covertness.hpp"

namespace covert {

struct AllocationResult {
  PowerAllocation allocation;
  double rate = 0.0;       // nats per channel use
  double kl_value = 0.0;   // single-letter KL toward Willie
  double mu = 0.0;         // power multiplier
  double eta = 0.0;        // KL multiplier; +inf when delta_kl == 0 forbids any Willie leakage
  bool power_active = false;
  bool kl_active = false;
  /// Largest per-direction stationarity residual over loaded directions,
  /// relative to the magnitude of the terms in the equation.
  double kkt_residual = 0.0;
};

/// Maximizes sum_i log(1 + q_i lambda_{b,i} / sigma_b^2) subject to
/// sum q_i <= P and sum_i [x_i - log(1 + x_i)] <= 2 delta^2 / n with
/// x_i = q_i lambda~_{w,i} / sigma_w^2, over Q diagonal in Bob's eigenbasis.
AllocationResult optimize_covariance(const MimoScenario& scenario, const CovertBudget& budget);
AllocationResult optimize_covariance(const EigenStructure& eig, const MimoScenario& scenario,
                                     const CovertBudget& budget);

/// Per-direction KKT residual of
///   1/(q + s_b/l_b) + eta/(q + s_w/l_w) = mu + eta l_w / s_w.
double kkt_residual(double q, double lambda_b, double lambda_w, double sigma_b2,
                    double sigma_w2, double mu, double eta);

struct NormalizedShares {
  RVector c;
  void validate() const;
};

/// c_i = per-direction KL / total KL.
NormalizedShares normalized_shares(const PowerAllocation& alloc, const EigenStructure& eig,
                                   double sigma_w2);

/// c_i = 1/N over the first N = min(N_a, N_b) directions.
NormalizedShares uniform_shares(const EigenStructure& eig);

/// q_i = (2 sigma_w^2 / lambda~_{w,i}) sqrt(c_i delta^2 / n).
PowerAllocation closed_form_allocation(const EigenStructure& eig, const NormalizedShares& shares,
                                       double sigma_w2, const CovertBudget& budget);

struct SteeringResult {
  double omega = 0.0;        // chosen transmit cosine
  double bob_gain = 0.0;     // |f(omega - omega_b)|
  double willie_gain = 0.0;  // |f(omega - omega_w)|
};

/// Maximizes |f(Omega_a - Omega_b)|^2 over Omega_a in [-1, 1] subject to
/// the unit-rank KL constraint at power P with Willie gain lambda_w |f(Omega_a - Omega_w)|^2.
SteeringResult steer_direction(const ArrayGeometry& tx, double omega_b, double omega_w,
                               double willie_gain, double sigma_w2, double power,
                               const CovertBudget& budget);

struct NullSteering {
  std::int64_t k = 1;
  double omega = 0.0;     // Omega_w + k / L_a, reduced modulo the period 1 / Delta
  double bob_gain = 0.0;  // |f(Omega_w - Omega_b + k / L_a)|
  double rate = 0.0;      // log(1 + P lambda_b |f|^2 / sigma_b^2)
};

/// Picks k in 1..N_a-1 maximizing Bob's gain on Willie's k-th null
/// (smallest k among ties).
NullSteering null_steer_index(const ArrayGeometry& tx, double omega_b, double omega_w,
                              double power, double lambda_b, double sigma_b2);

}  // namespace covert
