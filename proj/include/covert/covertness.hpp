// SPDX-License-Identifier: Apache-2.0
//
// KL-divergence covertness metrics, the Pinsker detection floor, the W_{-1}
// Lambert branch, the covert power limit and the transmit antenna bound.

#pragma once

#include <cstdint>
#include <optional>

#include "covert/channel.hpp"

namespace covert {

/// Blocklength n, detection level delta_kl, secrecy level delta_s and
/// decoding error level epsilon.
struct CovertBudget {
  std::uint64_t blocklength = 1;
  double detection_level = 0.0;
  double secrecy_level = 0.0;  // carried for completeness; no closed form uses it
  double error_level = 0.0;

  void validate() const;

  /// Single-letter KL allowance 2 delta^2 / n.
  double kl_threshold() const;
};

/// Per-eigendirection powers q_i and the covariance U_b diag(q) U_b^H.
struct PowerAllocation {
  RVector per_direction;
  CMatrix covariance;

  static PowerAllocation from_directions(const EigenStructure& eig, RVector q);
  static PowerAllocation zero(const EigenStructure& eig);

  double total_power() const { return per_direction.sum(); }
};

/// x - log(1 + x), accurate for small x.
double kl_term(double x);

/// Sum over eigendirections of x_i - log(1 + x_i), x_i = q_i lambda~_{w,i} / sigma_w^2.
double kl_single_letter(const PowerAllocation& alloc, const EigenStructure& eig,
                        double sigma_w2);

/// Per-direction terms of kl_single_letter.
RVector kl_terms(const PowerAllocation& alloc, const EigenStructure& eig, double sigma_w2);

/// Divergence D(CN(0, sigma^2 I + H Q H^H) || CN(0, sigma^2 I)) from the
/// full covariance: tr(A) - log det(I + A), A = H Q H^H / sigma^2.
double kl_gaussian(const CMatrix& covariance, const CMatrix& h_w, double sigma_w2);

double kl_n_letter(double single, std::uint64_t n);

/// max(0, 1 - sqrt(kl_n / 2)): Pinsker floor on alpha + beta.
double detection_lower_bound(double kl_n);

/// Lower branch of the Lambert function, x in [-1/e, 0).
double lambert_w_minus1(double x);

/// -W_{-1}(-exp(-eps - 1)) - 1, i.e. the positive root of x - log(1 + x) = eps.
/// Evaluated in shifted coordinates so tiny eps keeps full relative precision.
double kl_inverse(double eps);

/// Covert power limit (sigma_w^2 / lambda_eff) * kl_inverse(2 delta^2 / n).
/// Returns nullopt when lambda_eff == 0: no covertness constraint binds.
std::optional<double> covert_power_limit(double lambda_w_eff, double sigma_w2,
                                         std::uint64_t n, double delta_kl);

/// min(P, limit) with an unconstrained limit mapping to P.
double capped_power(const std::optional<double>& limit, double power);

/// Willie-side parameters of a unit-rank link.
struct WillieLink {
  double attenuation = 0.0;  // xi_w
  std::int64_t num_antennas = 1;  // N_w
  double sigma_w2 = 1.0;
};

/// Closed-form transmit antenna bound with the geometry's L_a and Delta_a
/// held fixed in the sine terms:
///   N_a >= P xi^2 N_w sin^2(pi L Omega) / (sigma^2 sin^2(pi Delta Omega)) / kl_inverse(eps)
/// Returns the ceiling, at least 1.
std::int64_t min_antennas(const WillieLink& willie, const ArrayGeometry& geometry,
                          double omega, const CovertBudget& budget, double power);

/// Real-valued right-hand side of min_antennas.
double min_antennas_bound(const WillieLink& willie, const ArrayGeometry& geometry,
                          double omega, const CovertBudget& budget, double power);

/// Fixed-separation convention: smallest N such that every array of N' >= N
/// antennas at the given separation keeps the single-letter KL toward Willie
/// within 2 delta^2 / n when transmitting P toward Bob.
std::int64_t min_antennas_fixed_separation(const WillieLink& willie,
                                           double antenna_separation, double omega,
                                           const CovertBudget& budget, double power);

/// Single-letter KL toward Willie for full power P on Bob's signature:
/// x - log(1 + x), x = P xi^2 N_a N_w |f(omega)|^2 / sigma^2.
double unit_rank_kl(const WillieLink& willie, const ArrayGeometry& geometry,
                    double omega, double power);

}  // namespace covert
