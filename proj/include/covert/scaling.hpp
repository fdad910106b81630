// SPDX-License-Identifier: Apache-2.0
//
// Rates, secrecy rates and the square-root-law scaling constants L and L_S,
// plus the first-order covert throughput used for the massive-MIMO sweeps.

#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "covert/allocation.hpp"

namespace covert {

enum class ScalingKind { covert, covert_with_secrecy };

std::string_view to_string(ScalingKind kind) noexcept;

/// Scaling constant in sqrt(nat) units with its per-direction summands.
struct ScalingResult {
  double total = 0.0;
  RVector per_direction;
  ScalingKind kind = ScalingKind::covert;
  std::optional<std::pair<double, double>> bounds;  // (lower, upper) for a spectral-norm class
};

/// log det(I + H_b Q H_b^H / sigma_b^2) in nats per channel use.
double rate_cc(const MimoScenario& scenario, const PowerAllocation& alloc);

/// [R_b(Q) - R_w(Q)]^+ with R_u(Q) = log det(I + H_u Q H_u^H / sigma_u^2).
double rate_secrecy(const MimoScenario& scenario, const PowerAllocation& alloc);

/// L = sum_i sqrt(2 c_i) sigma_w^2 lambda_{b,i} / (sigma_b^2 lambda~_{w,i}).
/// With real_input the constant is divided by sqrt(2), the real-channel convention.
/// Throws ErrorCode::regime if a share sits on a Willie null direction.
ScalingResult scaling_L(const EigenStructure& eig, const NormalizedShares& shares,
                        double sigma_b2, double sigma_w2, bool real_input = false);

/// L_S = sum_i sqrt(2 c_i) [sigma_w^2 lambda_{b,i} / (sigma_b^2 lambda~_{w,i}) - 1]^+.
ScalingResult scaling_LS(const EigenStructure& eig, const NormalizedShares& shares,
                         double sigma_b2, double sigma_w2, bool real_input = false);

/// Bounds over every Willie channel with ||H_w^H H_w|| / sigma_w^2 <= lambda_hat.
/// `total` and `per_direction` carry the guaranteed (lower) value; `bounds`
/// holds (lower, upper) where upper is the value for the actual H_w.
ScalingResult scaling_bounds_spectral(const EigenStructure& eig, const NormalizedShares& shares,
                                      double sigma_b2, const SpectralBound& bound,
                                      double sigma_w2,
                                      ScalingKind kind = ScalingKind::covert,
                                      bool real_input = false);

/// Line-of-sight unit-rank parameters for Bob and Willie.
struct UnitRankLink {
  double omega_b = 0.0;
  double omega_w = 0.0;
  double xi_b = 1.0;
  double xi_w = 1.0;
  std::int64_t n_b = 1;
  std::int64_t n_w = 1;
  double sigma_b2 = 1.0;
  double sigma_w2 = 1.0;
};

/// sqrt(2) sigma_w^2 xi_b^2 N_b |f(O_a - O_b)|^2 / (sigma_b^2 xi_w^2 N_w |f(O_a - O_w)|^2),
/// or its [ratio - 1]^+ form for the secrecy kind.
ScalingResult scaling_unit_rank(const ArrayGeometry& tx, double omega_a, const UnitRankLink& link,
                                ScalingKind kind = ScalingKind::covert,
                                bool real_input = false);

/// sqrt(n / (2 delta^2)) C_c(Q*(n)) along a ladder of blocklengths.
std::vector<double> finite_n_normalized_rate(const MimoScenario& scenario,
                                             const std::vector<std::uint64_t>& blocklengths,
                                             double detection_level);

/// Watts from dBm, and W/Hz from dBm/Hz.
double dbm_to_watts(double dbm);

/// Wideband line-of-sight link for the throughput sweeps. Noise figures are
/// spectral densities; the noise power is density * bandwidth.
struct LinkBudget {
  double xi_b2 = 0.0;  // path gain xi_b^2
  double xi_w2 = 0.0;
  std::int64_t n_b = 1;
  std::int64_t n_w = 1;
  double noise_density_b = 0.0;  // W/Hz
  double noise_density_w = 0.0;
  double bandwidth = 1.0;        // Hz
  double power = 0.0;            // W
  double omega_b = 0.0;
  double omega_w = 0.0;
};

/// Reference scenario of the numerical study: 1 km links with 3.3e-3 d^-2
/// path gain, -174 dBm/Hz noise, 5 MHz bandwidth, 10 dBm power, Bob
/// broadside (cos(pi/2)) and Willie at cos(pi/4), single-antenna Bob.
LinkBudget reference_link_budget(std::int64_t n_w);

/// Half-wavelength array used with reference_link_budget.
constexpr double kReferenceSeparation = 0.5;

struct ThroughputPair {
  double covert_nats = 0.0;
  double noncovert_nats = 0.0;
  double covert_power = 0.0;  // q = min(P_kl, P)
};

/// n B log(1 + q xi_b^2 N_a N_b / (B sigma_b^2)) with q = min(P_kl, P) and
/// P_kl the largest power toward Bob keeping Willie's KL within 2 delta^2 / n.
ThroughputPair covert_nats_firstorder(const ArrayGeometry& tx, const LinkBudget& link,
                                      std::uint64_t n, double detection_level);

}  // namespace covert
