// SPDX-License-Identifier: Apache-2.0

#include <random>

#include "covert/allocation.hpp"
#include "helpers.hpp"
#include "oracles.hpp"

using namespace covert;
using helpers::error_code_of;

namespace {

double rate_of(const RVector& q, const EigenStructure& eig, double sigma_b2) {
  double r = 0.0;
  for (Eigen::Index i = 0; i < q.size(); ++i) r += std::log1p(q(i) * eig.lambda_b(i) / sigma_b2);
  return r;
}

}  // namespace

TEST_CASE("SISO optimum is the smaller of P and the covert power limit") {
  for (double power : {1e-4, 1e-2, 1.0, 100.0}) {
    const auto s = helpers::diagonal_scenario({2.0}, {0.5}, 1.0, 1.0, power);
    const CovertBudget budget{1000, 0.1};
    const AllocationResult r = optimize_covariance(s, budget);
    const double limit = oracle::kl_inverse(budget.kl_threshold()) / 0.5;
    CHECK(r.allocation.per_direction(0) == doctest::Approx(std::min(power, limit)).epsilon(1e-10));
    CHECK(r.kl_value <= budget.kl_threshold() * (1 + 1e-12));
  }
}

TEST_CASE("reference two-direction instance matches the grid oracle") {
  const auto s = helpers::diagonal_scenario({2.0, 1.0}, {1.0, 1.0}, 1.0, 1.0, 10.0);
  const CovertBudget budget{100, 1.0};  // 2 delta^2 / n = 0.02
  const AllocationResult r = optimize_covariance(s, budget);
  const double grid = oracle::grid_rate(2.0, 1.0, 1.0, 1.0, 10.0, 0.02);
  CHECK(std::abs(r.rate - grid) <= 1e-3 * grid);
  CHECK(r.rate >= grid * (1 - 1e-9));
  CHECK(r.kkt_residual <= 1e-8);
  CHECK(r.kl_active);
}

TEST_CASE("zero budget leaves only Willie's null space") {
  const auto none = helpers::diagonal_scenario({2.0, 1.0}, {1.0, 0.3}, 1.0, 1.0, 5.0);
  const AllocationResult r0 = optimize_covariance(none, {100, 0.0});
  CHECK(r0.rate == 0.0);
  CHECK(r0.allocation.total_power() == 0.0);

  const auto null = helpers::diagonal_scenario({2.0, 1.0}, {1.0, 0.0}, 1.0, 1.0, 5.0);
  const AllocationResult r1 = optimize_covariance(null, {100, 0.0});
  CHECK(r1.kl_value == 0.0);
  CHECK(std::isinf(r1.eta));
  CHECK(r1.rate == doctest::Approx(std::log1p(5.0)).epsilon(1e-12));
}

TEST_CASE("null directions absorb the remaining power") {
  const auto s = helpers::diagonal_scenario({2.0, 1.0}, {1.0, 0.0}, 1.0, 1.0, 5.0);
  const CovertBudget budget{1000000, 0.1};
  const AllocationResult r = optimize_covariance(s, budget);
  CHECK(r.kl_value <= budget.kl_threshold() * (1 + 1e-12));
  CHECK(r.allocation.total_power() == doctest::Approx(5.0).epsilon(1e-12));
  CHECK(r.power_active);
  CHECK(r.kkt_residual <= 1e-8);
}

TEST_CASE("optimizer matches brute force and satisfies KKT on random instances") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> gain(0.1, 3.0), log_eps(-5.0, -0.5), power(0.1, 20.0);
  for (int t = 0; t < 8; ++t) {
    const double a1 = gain(rng), a2 = gain(rng), b1 = gain(rng), b2 = gain(rng);
    const double p = power(rng);
    const double eps = std::pow(10.0, log_eps(rng));
    const auto s = helpers::diagonal_scenario({std::max(a1, a2), std::min(a1, a2)},
                                              {a1 >= a2 ? b1 : b2, a1 >= a2 ? b2 : b1}, 1.0, 1.0, p);
    // delta chosen so 2 delta^2 / n = eps with n = 1.
    const CovertBudget budget{1, std::sqrt(eps / 2.0)};
    const AllocationResult r = optimize_covariance(s, budget);
    const double grid = oracle::grid_rate(std::max(a1, a2), std::min(a1, a2), a1 >= a2 ? b1 : b2,
                                          a1 >= a2 ? b2 : b1, p, eps);
    CHECK(std::abs(r.rate - grid) <= 1e-3 * grid);
    CHECK(r.kkt_residual <= 1e-8);
    CHECK(r.allocation.total_power() <= p * (1 + 1e-12));
    CHECK(r.kl_value <= eps * (1 + 1e-9));
  }
}

TEST_CASE("rate is nondecreasing in delta and power") {
  std::mt19937_64 rng(23);
  MimoScenario s;
  s.h_b = oracle::random_matrix(rng, 3, 3);
  s.h_w = oracle::random_matrix(rng, 2, 3);
  double last = 0.0;
  for (int i = 0; i < 10; ++i) {
    const double rate = optimize_covariance(s, {1000, 0.02 * (i + 1)}).rate;
    CHECK(rate >= last * (1 - 1e-12));
    last = rate;
  }
  last = 0.0;
  for (int i = 0; i < 10; ++i) {
    s.power_budget = 0.01 * std::pow(2.0, i);
    const double rate = optimize_covariance(s, {1000, 0.2}).rate;
    CHECK(rate >= last * (1 - 1e-12));
    last = rate;
  }
}

TEST_CASE("normalized shares") {
  const auto s = helpers::diagonal_scenario({2.0, 1.0}, {1.0, 1.0});
  const EigenStructure eig = rotated_eigen(s);
  RVector q(2);
  q << 1.0, 0.5;
  const NormalizedShares c = normalized_shares(PowerAllocation::from_directions(eig, q), eig, 1.0);
  const double t1 = 1 - std::log(2.0), t2 = 0.5 - std::log(1.5);
  CHECK(c.c(0) == doctest::Approx(t1 / (t1 + t2)).epsilon(1e-14));
  CHECK(c.c(0) == doctest::Approx(0.76448).epsilon(1e-5));
  CHECK(c.c(1) == doctest::Approx(0.23552).epsilon(1e-4));
  q << 0.7, 0.7;
  CHECK(normalized_shares(PowerAllocation::from_directions(eig, q), eig, 1.0).c(0) == doctest::Approx(0.5));
  CHECK(error_code_of([&] { normalized_shares(PowerAllocation::zero(eig), eig, 1.0); }) ==
        ErrorCode::undefined_shares);
  const NormalizedShares u = uniform_shares(eig);
  CHECK(u.c(0) == 0.5);
  CHECK(u.c(1) == 0.5);
}

TEST_CASE("closed-form achievability allocation") {
  const auto s = helpers::diagonal_scenario({1.0}, {1.0});
  const EigenStructure eig = rotated_eigen(s);
  const NormalizedShares one{RVector::Ones(1)};
  CHECK(closed_form_allocation(eig, one, 1.0, {10000, 1.0}).per_direction(0) == doctest::Approx(0.02).epsilon(1e-14));
  CHECK(closed_form_allocation(eig, one, 1.0, {10000, 0.0}).per_direction(0) == 0.0);

  const auto null = helpers::diagonal_scenario({2.0, 1.0}, {1.0, 0.0});
  const EigenStructure ne = rotated_eigen(null);
  CHECK(error_code_of([&] { closed_form_allocation(ne, uniform_shares(ne), 1.0, {10, 0.1}); }) ==
        ErrorCode::inconsistent_shares);
}

TEST_CASE("optimum dominates the closed-form allocation built from its own shares") {
  std::mt19937_64 rng(29);
  int compared = 0;
  for (int t = 0; t < 50; ++t) {
    MimoScenario s;
    s.h_b = oracle::random_matrix(rng, 1 + t % 3, 1 + (t / 3) % 3);
    s.h_w = oracle::random_matrix(rng, 1 + (t / 9) % 3, s.h_b.cols());
    s.power_budget = 10.0;
    const CovertBudget budget{10000, 0.1};
    const EigenStructure eig = rotated_eigen(s);
    const AllocationResult r = optimize_covariance(eig, s, budget);
    if (r.kl_value <= 0.0) continue;
    const NormalizedShares c = normalized_shares(r.allocation, eig, s.sigma_w2);
    const PowerAllocation cf = closed_form_allocation(eig, c, s.sigma_w2, budget);
    CHECK(kl_single_letter(cf, eig, s.sigma_w2) <= budget.kl_threshold() * (1 + 1e-12));
    if (cf.total_power() <= s.power_budget) {
      CHECK(r.rate >= rate_of(cf.per_direction, eig, s.sigma_b2) * (1 - 1e-12));
      ++compared;
    }
  }
  CHECK(compared > 20);
}

TEST_CASE("steering toward Bob under the KL constraint") {
  const auto g = ArrayGeometry::with_length(4, 2.0);
  const double ob = 0.0, ow = std::cos(std::numbers::pi / 4);
  // Budget so large the constraint never binds.
  const SteeringResult free = steer_direction(g, ob, ow, 1.0, 1.0, 1.0, {1, 1e3});
  CHECK(free.omega == doctest::Approx(ob).epsilon(1e-12));
  CHECK(free.bob_gain == 1.0);

  // Zero budget: only exact nulls toward Willie qualify.
  const SteeringResult zero = steer_direction(g, ob, ow, 1.0, 1.0, 1.0, {1, 0.0});
  CHECK(zero.willie_gain < 1e-12);
  const double k = (zero.omega - ow) * g.array_length();
  CHECK(std::abs(k - std::round(k)) < 1e-9);

  // Moderate budget, compared with an exhaustive 1e-5 grid.
  const CovertBudget budget{100, 0.05};
  const double limit = oracle::kl_inverse(budget.kl_threshold()) * 1.0 / (1.0 * 4.0);
  const SteeringResult mid = steer_direction(g, ob, ow, 4.0, 1.0, 1.0, budget);
  double best = 0.0;
  for (int i = 0; i <= 200000; ++i) {
    const double w = -1.0 + i * 1e-5;
    const double fw = oracle::beam_gain(4, 0.5, w - ow);
    if (fw * fw <= limit) best = std::max(best, oracle::beam_gain(4, 0.5, w - ob));
  }
  CHECK(mid.willie_gain * mid.willie_gain <= limit * (1 + 1e-9));
  CHECK(mid.bob_gain >= best - 1e-9);
}

TEST_CASE("null steering index") {
  const auto g2 = ArrayGeometry::with_length(2, 1.0);
  CHECK(null_steer_index(g2, 0.1, 0.7, 1.0, 1.0, 1.0).k == 1);
  CHECK(error_code_of([] { null_steer_index(ArrayGeometry(1, 0.5), 0.0, 0.3, 1.0, 1.0, 1.0); }) ==
        ErrorCode::no_null);

  const auto g = ArrayGeometry::with_length(4, 2.0);
  // Bob sits on Willie's second null.
  const NullSteering on = null_steer_index(g, 0.3 + 1.0, 0.3, 2.0, 1.0, 0.5);
  CHECK(on.k == 2);
  CHECK(on.bob_gain == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(on.rate == doctest::Approx(std::log1p(4.0)).epsilon(1e-12));

  const NullSteering pick = null_steer_index(g, 0.0, 0.3, 1.0, 1.0, 1.0);
  double best = -1.0;
  int best_k = 0;
  for (int k = 1; k <= 3; ++k) {
    const double v = oracle::beam_gain(4, 0.5, 0.3 + 0.5 * k);
    if (v > best + 1e-15) {
      best = v;
      best_k = k;
    }
  }
  CHECK(pick.k == best_k);
  CHECK(pick.bob_gain == doctest::Approx(best).epsilon(1e-12));
  CHECK(beam_gain(g, pick.omega - 0.3) < 1e-12);
}

TEST_CASE("a Willie null inside a repeated Bob eigenvalue is found") {
  MimoScenario s;
  s.h_b = CMatrix::Identity(2, 2);
  s.h_w = CMatrix::Constant(1, 2, cdouble(0.3, 0.0));
  s.power_budget = 2.0;
  const CovertBudget budget{10000, 0.1};
  const AllocationResult res = optimize_covariance(s, budget);
  CHECK(res.allocation.total_power() == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(res.rate > std::log(3.0));
  const double grid = oracle::grid_rate(1.0, 1.0, 0.18, 0.0, 2.0, budget.kl_threshold());
  CHECK(res.rate >= grid * (1 - 1e-12));
  CHECK(res.rate == doctest::Approx(grid).epsilon(1e-3));
  // No cross terms remain, so the single-letter KL is the exact one.
  CHECK(kl_gaussian(res.allocation.covariance, s.h_w, 1.0) ==
        doctest::Approx(budget.kl_threshold()).epsilon(1e-9));
}
