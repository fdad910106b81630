// SPDX-License-Identifier: Apache-2.0

#include "covert/allocation.hpp"

#include <cmath>
#include <limits>
#include <vector>

namespace covert {

namespace {

constexpr int kMaxIterations = 200;
constexpr double kInf = std::numeric_limits<double>::infinity();

// Per-direction SNR coefficients a_i = lambda_b / sigma_b^2, b_i = lambda~_w / sigma_w^2.
struct Direction {
  double a;
  double b;
};

// Root of a/(1+aq) - eta b^2 q/(1+bq) = mu on q >= 0. The left side is convex
// and decreasing in q, so Newton started at q = 0 climbs monotonically.
double direction_power(const Direction& d, double mu, double eta) {
  if (d.a <= mu) return 0.0;
  if (d.b == 0.0 || eta == 0.0) return mu > 0.0 ? 1.0 / mu - 1.0 / d.a : kInf;
  const auto g = [&](double q) {
    return d.a / (1.0 + d.a * q) - eta * d.b * d.b * q / (1.0 + d.b * q) - mu;
  };
  double q = 0.0;
  for (int iter = 0; iter < kMaxIterations; ++iter) {
    const double ta = 1.0 + d.a * q;
    const double tb = 1.0 + d.b * q;
    const double slope = -d.a * d.a / (ta * ta) - eta * d.b * d.b / (tb * tb);
    const double step = -g(q) / slope;
    if (!(step > 0.0)) break;
    q += step;
    if (step <= 1e-16 * q) break;
  }
  return q;
}

struct PowerSolution {
  std::vector<double> q;
  double mu = 0.0;
};

PowerSolution solve_power(const std::vector<Direction>& dirs, double power, double eta,
                          const std::vector<bool>& blocked) {
  PowerSolution out;
  out.q.assign(dirs.size(), 0.0);
  const auto fill = [&](double mu) {
    double sum = 0.0;
    for (std::size_t i = 0; i < dirs.size(); ++i) {
      out.q[i] = blocked[i] ? 0.0 : direction_power(dirs[i], mu, eta);
      sum += out.q[i];
    }
    return sum;
  };

  double max_a = 0.0;
  for (std::size_t i = 0; i < dirs.size(); ++i)
    if (!blocked[i]) max_a = std::max(max_a, dirs[i].a);
  if (max_a == 0.0) return out;

  if (fill(0.0) <= power) return out;

  double lo = 0.0;
  double hi = max_a;
  for (int iter = 0; iter < kMaxIterations && hi - lo > 1e-15 * hi; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (fill(mid) > power) lo = mid; else hi = mid;
  }
  out.mu = hi;
  fill(hi);
  return out;
}

double kl_of(const std::vector<Direction>& dirs, const std::vector<double>& q) {
  double sum = 0.0;
  for (std::size_t i = 0; i < dirs.size(); ++i) sum += kl_term(dirs[i].b * q[i]);
  return sum;
}

}  // namespace

double kkt_residual(double q, double lambda_b, double lambda_w, double sigma_b2,
                    double sigma_w2, double mu, double eta) {
  double lhs = 1.0 / (q + sigma_b2 / lambda_b);
  double rhs = mu;
  if (lambda_w > 0.0 && eta > 0.0) {
    lhs += eta / (q + sigma_w2 / lambda_w);
    rhs += eta * lambda_w / sigma_w2;
  }
  return std::abs(lhs - rhs) / std::max(std::abs(lhs), std::abs(rhs));
}

AllocationResult optimize_covariance(const MimoScenario& scenario, const CovertBudget& budget) {
  return optimize_covariance(rotated_eigen(scenario), scenario, budget);
}

AllocationResult optimize_covariance(const EigenStructure& eig, const MimoScenario& scenario,
                                     const CovertBudget& budget) {
  scenario.validate();
  const double eps = budget.kl_threshold();
  const double power = scenario.power_budget;

  const auto n = static_cast<std::size_t>(eig.n_a());
  std::vector<Direction> dirs(n);
  std::vector<bool> blocked(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    dirs[i] = {eig.lambda_b(i) / scenario.sigma_b2, eig.lambda_w_rotated(i) / scenario.sigma_w2};
    blocked[i] = dirs[i].a <= 0.0;
  }

  PowerSolution sol;
  double eta = 0.0;
  sol = solve_power(dirs, power, 0.0, blocked);
  if (kl_of(dirs, sol.q) > eps) {
    if (eps == 0.0) {
      // Only Willie's null space may carry power.
      for (std::size_t i = 0; i < n; ++i) blocked[i] = blocked[i] || dirs[i].b > 0.0;
      sol = solve_power(dirs, power, 0.0, blocked);
      eta = kInf;
    } else {
      double hi = 1.0;
      double lo = 0.0;
      sol = solve_power(dirs, power, hi, blocked);
      while (kl_of(dirs, sol.q) > eps) {
        lo = hi;
        hi *= 4.0;
        require(hi < 1e300, ErrorCode::numerical_consistency,
                "KL multiplier search diverged");
        sol = solve_power(dirs, power, hi, blocked);
      }
      if (lo == 0.0) {
        lo = hi;
        while (lo > 1e-300) {
          lo *= 0.25;
          if (kl_of(dirs, solve_power(dirs, power, lo, blocked).q) > eps) break;
        }
      }
      for (int iter = 0; iter < kMaxIterations && hi - lo > 1e-15 * hi; ++iter) {
        const double mid = lo > 0.0 ? std::sqrt(lo * hi) : 0.5 * hi;
        if (kl_of(dirs, solve_power(dirs, power, mid, blocked).q) > eps) lo = mid; else hi = mid;
      }
      eta = hi;
      sol = solve_power(dirs, power, eta, blocked);
    }
  }

  RVector q(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) q(static_cast<Eigen::Index>(i)) = sol.q[i];

  AllocationResult result;
  result.allocation = PowerAllocation::from_directions(eig, q);
  result.mu = sol.mu;
  result.eta = eta;
  result.power_active = sol.mu > 0.0;
  result.kl_active = eta > 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    result.rate += std::log1p(dirs[i].a * sol.q[i]);
    result.kl_value += kl_term(dirs[i].b * sol.q[i]);
    if (sol.q[i] > 0.0) {
      const double eta_i = std::isinf(eta) ? 0.0 : eta;
      result.kkt_residual = std::max(
          result.kkt_residual,
          kkt_residual(sol.q[i], eig.lambda_b(static_cast<Eigen::Index>(i)),
                       eig.lambda_w_rotated(static_cast<Eigen::Index>(i)), scenario.sigma_b2,
                       scenario.sigma_w2, sol.mu, eta_i));
    }
  }
  return result;
}

void NormalizedShares::validate() const {
  require((c.array() >= 0.0).all(), ErrorCode::invalid_input, "shares must be non-negative");
  require(std::abs(c.sum() - 1.0) <= 1e-9, ErrorCode::invalid_input, "shares must sum to one");
}

NormalizedShares normalized_shares(const PowerAllocation& alloc, const EigenStructure& eig,
                                   double sigma_w2) {
  const RVector terms = kl_terms(alloc, eig, sigma_w2);
  const double total = terms.sum();
  require(total > 0.0, ErrorCode::undefined_shares,
          "total KL is zero; normalized shares are undefined (use uniform shares)");
  return NormalizedShares{terms / total};
}

NormalizedShares uniform_shares(const EigenStructure& eig) {
  NormalizedShares shares{RVector::Zero(eig.n_a())};
  const auto dims = std::max<Eigen::Index>(1, eig.dims());
  shares.c.head(dims).setConstant(1.0 / static_cast<double>(dims));
  return shares;
}

PowerAllocation closed_form_allocation(const EigenStructure& eig, const NormalizedShares& shares,
                                       double sigma_w2, const CovertBudget& budget) {
  require(shares.c.size() == eig.n_a(), ErrorCode::invalid_input,
          "shares length must equal N_a");
  shares.validate();
  require(sigma_w2 > 0.0, ErrorCode::invalid_input, "sigma_w^2 must be positive");
  budget.validate();
  const double per_letter = budget.detection_level * budget.detection_level /
                            static_cast<double>(budget.blocklength);
  RVector q = RVector::Zero(eig.n_a());
  for (Eigen::Index i = 0; i < q.size(); ++i) {
    if (shares.c(i) <= 0.0) continue;
    require(eig.lambda_w_rotated(i) > 0.0, ErrorCode::inconsistent_shares,
            "positive share on a direction with zero Willie gain");
    q(i) = 2.0 * sigma_w2 / eig.lambda_w_rotated(i) * std::sqrt(shares.c(i) * per_letter);
  }
  return PowerAllocation::from_directions(eig, std::move(q));
}

namespace {

struct SteeringProblem {
  const ArrayGeometry& tx;
  double omega_b;
  double omega_w;
  double gain_limit;  // bound on |f(omega - omega_w)|^2, +inf when unconstrained

  double bob(double omega) const { return beam_gain(tx, omega - omega_b); }
  double willie(double omega) const { return beam_gain(tx, omega - omega_w); }
  bool feasible(double omega) const {
    const double g = willie(omega);
    return g * g <= gain_limit;
  }
};

// Images of omega0 + shift within [-1, 1] under the array period 1/Delta.
std::vector<double> images_in_range(double omega0, double period) {
  std::vector<double> out;
  const double first = omega0 - period * std::ceil((omega0 + 1.0) / period);
  for (double w = first; w <= 1.0 + 1e-15; w += period)
    if (w >= -1.0 - 1e-15) out.push_back(std::clamp(w, -1.0, 1.0));
  return out;
}

double golden_max(const SteeringProblem& p, double lo, double hi) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - inv_phi * (hi - lo);
  double x2 = lo + inv_phi * (hi - lo);
  double f1 = p.bob(x1);
  double f2 = p.bob(x2);
  while (hi - lo > 1e-10) {
    if (f1 < f2) {
      lo = x1; x1 = x2; f1 = f2;
      x2 = lo + inv_phi * (hi - lo);
      f2 = p.bob(x2);
    } else {
      hi = x2; x2 = x1; f2 = f1;
      x1 = hi - inv_phi * (hi - lo);
      f1 = p.bob(x1);
    }
  }
  return 0.5 * (lo + hi);
}

// Moves `outside` toward the feasible point `inside` until it sits on the
// feasibility boundary (feasible side).
double feasible_edge(const SteeringProblem& p, double inside, double outside) {
  for (int iter = 0; iter < 80; ++iter) {
    const double mid = 0.5 * (inside + outside);
    if (p.feasible(mid)) inside = mid; else outside = mid;
  }
  return inside;
}

}  // namespace

SteeringResult steer_direction(const ArrayGeometry& tx, double omega_b, double omega_w,
                               double willie_gain, double sigma_w2, double power,
                               const CovertBudget& budget) {
  require(std::abs(omega_b) <= 1.0 && std::abs(omega_w) <= 1.0, ErrorCode::invalid_input,
          "directional cosines must lie in [-1, 1]");
  require(willie_gain >= 0.0 && sigma_w2 > 0.0 && power > 0.0, ErrorCode::invalid_input,
          "steering needs lambda_w >= 0, sigma_w^2 > 0 and P > 0");
  const double eps = budget.kl_threshold();
  const double limit =
      willie_gain == 0.0 ? kInf : kl_inverse(eps) * sigma_w2 / (power * willie_gain);
  const SteeringProblem problem{tx, omega_b, omega_w, limit};
  const double period = 1.0 / tx.antenna_separation();

  double best_omega = 0.0;
  double best_value = -1.0;
  const auto consider = [&](double omega, bool always_feasible) {
    if (!always_feasible && !problem.feasible(omega)) return;
    const double v = problem.bob(omega);
    if (v > best_value) {
      best_value = v;
      best_omega = omega;
    }
  };

  // Exact nulls toward Willie are feasible for every delta_kl.
  const auto n = tx.num_antennas();
  for (std::int64_t k = 1; k < n; ++k)
    for (double w : images_in_range(omega_w + static_cast<double>(k) / tx.array_length(), period))
      consider(w, true);
  for (double w : images_in_range(omega_b, period)) consider(w, false);

  const auto points = std::max<std::int64_t>(
      100001, static_cast<std::int64_t>(std::ceil(2.0 / (1e-4 * period))) + 1);
  const double step = 2.0 / static_cast<double>(points - 1);
  std::int64_t best_index = -1;
  double grid_best = -1.0;
  for (std::int64_t i = 0; i < points; ++i) {
    const double w = -1.0 + step * static_cast<double>(i);
    if (!problem.feasible(w)) continue;
    const double v = problem.bob(w);
    if (v > grid_best) {
      grid_best = v;
      best_index = i;
    }
  }
  if (best_index >= 0) {
    const double center = -1.0 + step * static_cast<double>(best_index);
    consider(center, false);
    double lo = std::max(-1.0, center - step);
    double hi = std::min(1.0, center + step);
    if (!problem.feasible(lo)) lo = feasible_edge(problem, center, lo);
    if (!problem.feasible(hi)) hi = feasible_edge(problem, center, hi);
    consider(lo, false);
    consider(hi, false);
    if (hi > lo) consider(golden_max(problem, lo, hi), false);
  }

  return SteeringResult{best_omega, problem.bob(best_omega), problem.willie(best_omega)};
}

NullSteering null_steer_index(const ArrayGeometry& tx, double omega_b, double omega_w,
                              double power, double lambda_b, double sigma_b2) {
  require(tx.num_antennas() >= 2, ErrorCode::no_null,
          "a single-antenna array has no null toward Willie");
  require(power >= 0.0 && lambda_b >= 0.0 && sigma_b2 > 0.0, ErrorCode::invalid_input,
          "null steering needs P >= 0, lambda_b >= 0, sigma_b^2 > 0");
  NullSteering best;
  best.bob_gain = -1.0;
  const double length = tx.array_length();
  for (std::int64_t k = 1; k < tx.num_antennas(); ++k) {
    const double shift = static_cast<double>(k) / length;
    const double g = beam_gain(tx, omega_w - omega_b + shift);
    if (g > best.bob_gain + 1e-15) {
      best.k = k;
      best.bob_gain = g;
      best.omega = omega_w + shift;
    }
  }
  const double period = 1.0 / tx.antenna_separation();
  best.omega -= period * std::round(best.omega / period);
  best.rate = std::log1p(power * lambda_b * best.bob_gain * best.bob_gain / sigma_b2);
  return best;
}

}  // namespace covert
