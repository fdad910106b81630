// SPDX-License-Identifier: Apache-2.0

#include "covert/scaling.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace covert {

namespace {

double log_det_identity_plus(const CMatrix& h, const CMatrix& q, double sigma2) {
  const auto rows = h.rows();
  CMatrix m = CMatrix::Identity(rows, rows) + h * q * h.adjoint() / sigma2;
  m = 0.5 * (m + m.adjoint());
  const Eigen::LLT<CMatrix> llt(m);
  require(llt.info() == Eigen::Success, ErrorCode::numerical_consistency,
          "I + H Q H^H is not positive definite");
  double sum = 0.0;
  for (Eigen::Index i = 0; i < rows; ++i) sum += 2.0 * std::log(llt.matrixL()(i, i).real());
  return sum;
}

void check_shares(const EigenStructure& eig, const NormalizedShares& shares, double sigma_b2,
                  double sigma_w2) {
  require(shares.c.size() == eig.n_a(), ErrorCode::invalid_input,
          "shares length must equal N_a");
  shares.validate();
  require(sigma_b2 > 0.0 && sigma_w2 > 0.0, ErrorCode::invalid_input,
          "noise powers must be positive");
}

// sigma_w^2 lambda_b / (sigma_b^2 lambda~_w) per direction with c_i > 0.
RVector quality_ratios(const EigenStructure& eig, const NormalizedShares& shares,
                       double sigma_b2, double sigma_w2) {
  const Eigen::Index dims = eig.dims();
  RVector ratio = RVector::Zero(dims);
  for (Eigen::Index i = 0; i < dims; ++i) {
    if (shares.c(i) <= 0.0) continue;
    require(eig.lambda_w_rotated(i) > 0.0, ErrorCode::regime,
            "a loaded direction lies in Willie's null space; the rate is not diminishing "
            "and no square-root scaling constant exists");
    ratio(i) = sigma_w2 * eig.lambda_b(i) / (sigma_b2 * eig.lambda_w_rotated(i));
  }
  return ratio;
}

ScalingResult assemble(RVector terms, ScalingKind kind, bool real_input) {
  if (real_input) terms /= std::numbers::sqrt2;
  ScalingResult out;
  out.total = terms.sum();
  out.per_direction = std::move(terms);
  out.kind = kind;
  return out;
}

}  // namespace

std::string_view to_string(ScalingKind kind) noexcept {
  return kind == ScalingKind::covert ? "covert" : "covert_with_secrecy";
}

double rate_cc(const MimoScenario& scenario, const PowerAllocation& alloc) {
  scenario.validate();
  require(alloc.covariance.rows() == scenario.n_a() && alloc.covariance.cols() == scenario.n_a(),
          ErrorCode::invalid_input, "covariance must be N_a x N_a");
  return log_det_identity_plus(scenario.h_b, alloc.covariance, scenario.sigma_b2);
}

double rate_secrecy(const MimoScenario& scenario, const PowerAllocation& alloc) {
  const double bob = rate_cc(scenario, alloc);
  const double willie = log_det_identity_plus(scenario.h_w, alloc.covariance, scenario.sigma_w2);
  return std::max(0.0, bob - willie);
}

ScalingResult scaling_L(const EigenStructure& eig, const NormalizedShares& shares,
                        double sigma_b2, double sigma_w2, bool real_input) {
  check_shares(eig, shares, sigma_b2, sigma_w2);
  const RVector ratio = quality_ratios(eig, shares, sigma_b2, sigma_w2);
  RVector terms(ratio.size());
  for (Eigen::Index i = 0; i < ratio.size(); ++i)
    terms(i) = std::sqrt(2.0 * shares.c(i)) * ratio(i);
  return assemble(std::move(terms), ScalingKind::covert, real_input);
}

ScalingResult scaling_LS(const EigenStructure& eig, const NormalizedShares& shares,
                         double sigma_b2, double sigma_w2, bool real_input) {
  check_shares(eig, shares, sigma_b2, sigma_w2);
  const RVector ratio = quality_ratios(eig, shares, sigma_b2, sigma_w2);
  RVector terms = RVector::Zero(ratio.size());
  for (Eigen::Index i = 0; i < ratio.size(); ++i) {
    if (shares.c(i) <= 0.0) continue;
    // Compare products rather than ratio - 1 so a tie gives exactly zero.
    const double bob = sigma_w2 * eig.lambda_b(i);
    const double willie = sigma_b2 * eig.lambda_w_rotated(i);
    if (bob > willie) terms(i) = std::sqrt(2.0 * shares.c(i)) * (bob - willie) / willie;
  }
  return assemble(std::move(terms), ScalingKind::covert_with_secrecy, real_input);
}

ScalingResult scaling_bounds_spectral(const EigenStructure& eig, const NormalizedShares& shares,
                                      double sigma_b2, const SpectralBound& bound,
                                      double sigma_w2, ScalingKind kind, bool real_input) {
  check_shares(eig, shares, sigma_b2, sigma_w2);
  const double worst = eig.lambda_w_rotated.size() ? eig.lambda_w_rotated.maxCoeff() : 0.0;
  require(bound.lambda_hat * (1.0 + 1e-12) >= worst / sigma_w2, ErrorCode::invalid_input,
          "spectral bound is below a rotated Willie gain");
  const ScalingResult upper = kind == ScalingKind::covert
                                  ? scaling_L(eig, shares, sigma_b2, sigma_w2, real_input)
                                  : scaling_LS(eig, shares, sigma_b2, sigma_w2, real_input);
  const Eigen::Index dims = eig.dims();
  RVector terms = RVector::Zero(dims);
  for (Eigen::Index i = 0; i < dims; ++i) {
    const double r = eig.lambda_b(i) / (sigma_b2 * bound.lambda_hat);
    const double v = kind == ScalingKind::covert ? r : std::max(0.0, r - 1.0);
    terms(i) = std::sqrt(2.0 * shares.c(i)) * v;
  }
  ScalingResult out = assemble(std::move(terms), kind, real_input);
  out.bounds = std::make_pair(out.total, upper.total);
  return out;
}

ScalingResult scaling_unit_rank(const ArrayGeometry& tx, double omega_a, const UnitRankLink& link,
                                ScalingKind kind, bool real_input) {
  require(link.sigma_b2 > 0.0 && link.sigma_w2 > 0.0 && link.n_b >= 1 && link.n_w >= 1,
          ErrorCode::invalid_input, "unit-rank link needs positive noise and antenna counts");
  const double gb = beam_gain(tx, omega_a - link.omega_b);
  const double gw = beam_gain(tx, omega_a - link.omega_w);
  require(gw * link.xi_w != 0.0, ErrorCode::regime,
          "the beam nulls Willie; the positive-rate null-steering regime applies");
  const double ratio = link.sigma_w2 * link.xi_b * link.xi_b * static_cast<double>(link.n_b) *
                       gb * gb /
                       (link.sigma_b2 * link.xi_w * link.xi_w * static_cast<double>(link.n_w) *
                        gw * gw);
  RVector terms(1);
  terms(0) = std::numbers::sqrt2 *
             (kind == ScalingKind::covert ? ratio : std::max(0.0, ratio - 1.0));
  return assemble(std::move(terms), kind, real_input);
}

std::vector<double> finite_n_normalized_rate(const MimoScenario& scenario,
                                             const std::vector<std::uint64_t>& blocklengths,
                                             double detection_level) {
  require(detection_level > 0.0, ErrorCode::invalid_input,
          "normalized rate needs delta_kl > 0");
  const EigenStructure eig = rotated_eigen(scenario);
  for (Eigen::Index i = 0; i < eig.n_a(); ++i)
    require(!(eig.lambda_b(i) > 0.0 && eig.lambda_w_rotated(i) == 0.0), ErrorCode::regime,
            "Willie has a null direction shared with Bob; the rate does not vanish");
  std::vector<double> out;
  out.reserve(blocklengths.size());
  for (const auto n : blocklengths) {
    const CovertBudget budget{n, detection_level};
    const AllocationResult res = optimize_covariance(eig, scenario, budget);
    out.push_back(std::sqrt(static_cast<double>(n) / (2.0 * detection_level * detection_level)) *
                  res.rate);
  }
  return out;
}

double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

LinkBudget reference_link_budget(std::int64_t n_w) {
  require(n_w >= 1, ErrorCode::invalid_input, "N_w must be at least 1");
  const double distance = 1000.0;
  const double gain = 3.3e-3 / (distance * distance);
  LinkBudget link;
  link.xi_b2 = gain;
  link.xi_w2 = gain;
  link.n_b = 1;
  link.n_w = n_w;
  link.noise_density_b = dbm_to_watts(-174.0);
  link.noise_density_w = dbm_to_watts(-174.0);
  link.bandwidth = 5e6;
  link.power = dbm_to_watts(10.0);
  link.omega_b = std::cos(std::numbers::pi / 2.0);
  link.omega_w = std::cos(std::numbers::pi / 4.0);
  return link;
}

ThroughputPair covert_nats_firstorder(const ArrayGeometry& tx, const LinkBudget& link,
                                      std::uint64_t n, double detection_level) {
  require(link.bandwidth > 0.0, ErrorCode::invalid_input, "bandwidth must be positive");
  require(link.noise_density_b > 0.0 && link.noise_density_w > 0.0 && link.power >= 0.0,
          ErrorCode::invalid_input, "noise densities must be positive and power non-negative");
  const double na = static_cast<double>(tx.num_antennas());
  const double noise_b = link.bandwidth * link.noise_density_b;
  const double noise_w = link.bandwidth * link.noise_density_w;

  // Full power on Bob's signature leaks |f(O_b - O_w)|^2 of the array gain to Willie.
  const double g = beam_gain(tx, link.omega_b - link.omega_w);
  const double willie_gain = link.xi_w2 * na * static_cast<double>(link.n_w) * g * g;
  const auto limit = covert_power_limit(willie_gain, noise_w, n, detection_level);
  const double q = capped_power(limit, link.power);

  const double snr_per_watt = link.xi_b2 * na * static_cast<double>(link.n_b) / noise_b;
  const double scale = static_cast<double>(n) * link.bandwidth;
  return ThroughputPair{scale * std::log1p(q * snr_per_watt),
                        scale * std::log1p(link.power * snr_per_watt), q};
}

}  // namespace covert
