// SPDX-License-Identifier: Apache-2.0

#include "covert/covertness.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace covert {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kE = std::numbers::e;

}  // namespace

void CovertBudget::validate() const {
  require(blocklength >= 1, ErrorCode::invalid_input, "blocklength must be at least 1");
  require(std::isfinite(detection_level) && detection_level >= 0.0,
          ErrorCode::invalid_input, "detection level must be non-negative");
  require(secrecy_level >= 0.0, ErrorCode::invalid_input,
          "secrecy level must be non-negative");
  require(error_level >= 0.0 && error_level < 1.0, ErrorCode::invalid_input,
          "error level must lie in [0, 1)");
}

double CovertBudget::kl_threshold() const {
  validate();
  return 2.0 * detection_level * detection_level / static_cast<double>(blocklength);
}

PowerAllocation PowerAllocation::from_directions(const EigenStructure& eig, RVector q) {
  require(q.size() == eig.n_a(), ErrorCode::invalid_input,
          "allocation length must equal N_a");
  require(q.allFinite() && (q.array() >= 0.0).all(), ErrorCode::invalid_input,
          "per-direction powers must be finite and non-negative");
  PowerAllocation out;
  out.covariance = eig.bob_basis * q.cast<cdouble>().asDiagonal() * eig.bob_basis.adjoint();
  out.per_direction = std::move(q);
  return out;
}

PowerAllocation PowerAllocation::zero(const EigenStructure& eig) {
  return from_directions(eig, RVector::Zero(eig.n_a()));
}

double kl_term(double x) {
  require(x >= 0.0 && !std::isnan(x), ErrorCode::invalid_input,
          "KL term needs a non-negative argument");
  if (x < 1e-2) {
    // x - log(1+x) = sum_{k>=2} (-1)^k x^k / k
    double sum = 0.0;
    double power = x * x;
    for (int k = 2; k <= 14; ++k) {
      sum += ((k % 2 == 0) ? power : -power) / k;
      power *= x;
    }
    return sum;
  }
  return x - std::log1p(x);
}

RVector kl_terms(const PowerAllocation& alloc, const EigenStructure& eig, double sigma_w2) {
  require(sigma_w2 > 0.0, ErrorCode::invalid_input, "sigma_w^2 must be positive");
  require(alloc.per_direction.size() == eig.lambda_w_rotated.size(),
          ErrorCode::invalid_input, "allocation and eigen-structure sizes differ");
  RVector terms(alloc.per_direction.size());
  for (Eigen::Index i = 0; i < terms.size(); ++i) {
    const double q = alloc.per_direction(i);
    const double lw = eig.lambda_w_rotated(i);
    require(q >= 0.0 && lw >= 0.0, ErrorCode::invalid_input,
            "powers and rotated eigenvalues must be non-negative");
    terms(i) = kl_term(q * lw / sigma_w2);
  }
  return terms;
}

double kl_single_letter(const PowerAllocation& alloc, const EigenStructure& eig,
                        double sigma_w2) {
  return kl_terms(alloc, eig, sigma_w2).sum();
}

double kl_gaussian(const CMatrix& covariance, const CMatrix& h_w, double sigma_w2) {
  require(sigma_w2 > 0.0, ErrorCode::invalid_input, "sigma_w^2 must be positive");
  require(covariance.rows() == h_w.cols() && covariance.cols() == h_w.cols(),
          ErrorCode::invalid_input, "covariance must be N_a x N_a");
  const CMatrix a = h_w * covariance * h_w.adjoint() / sigma_w2;
  const HermitianEigen eig = hermitian_eigen(0.5 * (a + a.adjoint()));
  double sum = 0.0;
  for (Eigen::Index i = 0; i < eig.values.size(); ++i) sum += kl_term(eig.values(i));
  return sum;
}

double kl_n_letter(double single, std::uint64_t n) {
  require(single >= 0.0 && n >= 1, ErrorCode::invalid_input,
          "n-letter KL needs single >= 0 and n >= 1");
  return static_cast<double>(n) * single;
}

double detection_lower_bound(double kl_n) {
  require(kl_n >= 0.0, ErrorCode::invalid_input, "KL divergence must be non-negative");
  return std::max(0.0, 1.0 - std::sqrt(kl_n / 2.0));
}

double lambert_w_minus1(double x) {
  constexpr double branch = -1.0 / kE;
  if (!(x < 0.0) || x < branch * (1.0 + 4.0 * std::numeric_limits<double>::epsilon())) {
    std::ostringstream msg;
    msg << "W_{-1} is defined on [-1/e, 0), got " << x;
    fail(ErrorCode::domain, msg.str());
  }
  const double offset = 1.0 + kE * x;
  // Within rounding of the branch point: W is sqrt-conditioned there, so a
  // 1-ulp perturbation of -1/e would otherwise move W by ~1e-8.
  if (offset <= 4.0 * std::numeric_limits<double>::epsilon()) return -1.0;

  double w;
  const double p = -std::sqrt(2.0 * offset);
  if (p > -0.6) {
    // Branch-point series.
    w = -1.0 + p - p * p / 3.0 + 11.0 * p * p * p / 72.0;
  } else {
    const double l1 = std::log(-x);
    w = l1 - std::log(-l1);
  }

  bool converged = false;
  for (int iter = 0; iter < 100; ++iter) {
    const double ew = std::exp(w);
    const double f = w * ew - x;
    const double wp1 = w + 1.0;
    if (wp1 == 0.0) break;
    const double denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1);
    if (denom == 0.0 || !std::isfinite(denom)) break;
    const double step = f / denom;
    w -= step;
    if (std::abs(step) <= 1e-15 * std::abs(w)) {
      converged = true;
      break;
    }
  }

  if (!converged || !(w <= -1.0) || std::abs(w * std::exp(w) - x) > 1e-13) {
    // w e^w decreases from -1/e to 0^- as w runs from -1 to -infinity.
    double hi = -1.0;
    double lo = -1.0;
    while (lo * std::exp(lo) <= x) lo *= 2.0;
    for (int iter = 0; iter < 2000 && hi - lo > 1e-15 * std::abs(lo); ++iter) {
      const double mid = 0.5 * (lo + hi);
      if (mid * std::exp(mid) > x) lo = mid; else hi = mid;
    }
    w = 0.5 * (lo + hi);
  }
  return w;
}

double kl_inverse(double eps) {
  require(std::isfinite(eps) && eps >= 0.0, ErrorCode::domain,
          "KL inverse needs a finite, non-negative argument");
  if (eps == 0.0) return 0.0;
  // h(K) = K - log(1+K) - eps is convex and increasing on K > 0, so Newton
  // from a point with h >= 0 descends monotonically onto the root.
  double k = std::sqrt(2.0 * eps) + eps;
  for (int iter = 0; iter < 200; ++iter) {
    const double h = kl_term(k) - eps;
    const double step = h * (1.0 + k) / k;
    k -= step;
    if (std::abs(step) <= 1e-16 * k) break;
  }
  return k;
}

std::optional<double> covert_power_limit(double lambda_w_eff, double sigma_w2,
                                         std::uint64_t n, double delta_kl) {
  require(std::isfinite(lambda_w_eff) && lambda_w_eff >= 0.0, ErrorCode::invalid_input,
          "effective Willie gain must be non-negative");
  require(sigma_w2 > 0.0, ErrorCode::invalid_input, "sigma_w^2 must be positive");
  const CovertBudget budget{n, delta_kl};
  const double eps = budget.kl_threshold();
  if (lambda_w_eff == 0.0) return std::nullopt;
  return sigma_w2 / lambda_w_eff * kl_inverse(eps);
}

double capped_power(const std::optional<double>& limit, double power) {
  return limit ? std::min(*limit, power) : power;
}

double unit_rank_kl(const WillieLink& willie, const ArrayGeometry& geometry,
                    double omega, double power) {
  require(willie.sigma_w2 > 0.0 && willie.num_antennas >= 1, ErrorCode::invalid_input,
          "Willie link needs sigma_w^2 > 0 and N_w >= 1");
  const double g = beam_gain(geometry, omega);
  const double x = power * willie.attenuation * willie.attenuation *
                   static_cast<double>(geometry.num_antennas()) *
                   static_cast<double>(willie.num_antennas) * g * g / willie.sigma_w2;
  return kl_term(x);
}

namespace {

void check_link(const WillieLink& willie, const CovertBudget& budget, double power) {
  budget.validate();
  require(budget.detection_level > 0.0, ErrorCode::invalid_input,
          "antenna bound needs delta_kl > 0");
  require(willie.sigma_w2 > 0.0 && willie.num_antennas >= 1, ErrorCode::invalid_input,
          "Willie link needs sigma_w^2 > 0 and N_w >= 1");
  require(power > 0.0, ErrorCode::invalid_input, "power must be positive");
}

double snr_constant(const WillieLink& willie, double power) {
  return power * willie.attenuation * willie.attenuation *
         static_cast<double>(willie.num_antennas) / willie.sigma_w2;
}

std::int64_t to_count(double bound) {
  require(bound < 9.0e18, ErrorCode::domain, "antenna bound exceeds the representable range");
  return std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(bound)));
}

}  // namespace

double min_antennas_bound(const WillieLink& willie, const ArrayGeometry& geometry,
                          double omega, const CovertBudget& budget, double power) {
  check_link(willie, budget, power);
  const double den = std::sin(kPi * geometry.antenna_separation() * omega);
  require(std::abs(den) >= 1e-12, ErrorCode::alignment,
          "Willie is aligned with Bob's transmit direction (sin(pi Delta Omega) = 0)");
  const double num = std::sin(kPi * geometry.array_length() * omega);
  return snr_constant(willie, power) * num * num / (den * den) /
         kl_inverse(budget.kl_threshold());
}

std::int64_t min_antennas(const WillieLink& willie, const ArrayGeometry& geometry,
                          double omega, const CovertBudget& budget, double power) {
  const double bound = min_antennas_bound(willie, geometry, omega, budget, power);
  const double eps = budget.kl_threshold();
  const double den = std::sin(kPi * geometry.antenna_separation() * omega);
  const double num = std::sin(kPi * geometry.array_length() * omega);
  const double c = snr_constant(willie, power) * num * num / (den * den);
  std::int64_t count = to_count(bound);
  // Guard against the ceiling landing one ulp short of the KL allowance.
  while (kl_term(c / static_cast<double>(count)) > eps) ++count;
  return count;
}

std::int64_t min_antennas_fixed_separation(const WillieLink& willie,
                                           double antenna_separation, double omega,
                                           const CovertBudget& budget, double power) {
  check_link(willie, budget, power);
  const double den = std::sin(kPi * antenna_separation * omega);
  require(std::abs(den) >= 1e-12, ErrorCode::alignment,
          "Willie is aligned with Bob's transmit direction (sin(pi Delta Omega) = 0)");
  const double eps = budget.kl_threshold();
  const double c = snr_constant(willie, power) / (den * den);
  // x(N) = c sin^2(pi N Delta Omega) / N <= c / N, so every N >= c / K is safe.
  const std::int64_t safe = to_count(c / kl_inverse(eps));
  for (std::int64_t n = safe; n >= 1; --n) {
    const double s = std::sin(kPi * static_cast<double>(n) * antenna_separation * omega);
    if (kl_term(c * s * s / static_cast<double>(n)) > eps) return n + 1;
  }
  return 1;
}

}  // namespace covert
