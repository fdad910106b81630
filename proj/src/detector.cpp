// SPDX-License-Identifier: Apache-2.0

#include "covert/detector.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <random>
#include <thread>
#include <vector>

#include <boost/math/special_functions/gamma.hpp>
#include <boost/random/gamma_distribution.hpp>
#include <boost/random/normal_distribution.hpp>

namespace covert {

namespace {

constexpr std::uint64_t kChunk = 8192;
constexpr std::uint64_t kMinTrials = 100;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Independent stream per chunk: the chunk index is folded into the seed.
std::mt19937_64 chunk_stream(std::uint64_t seed, std::uint64_t chunk) {
  return std::mt19937_64(splitmix64(splitmix64(seed) ^ splitmix64(chunk + 1)));
}

// Runs body(rng, first, count) on every chunk; results land in index order
// regardless of which worker handled the chunk.
template <class Body>
void for_each_chunk(std::uint64_t trials, std::uint64_t seed, unsigned threads, Body body) {
  const std::uint64_t chunks = (trials + kChunk - 1) / kChunk;
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::uint64_t>(threads, chunks));
  std::atomic<std::uint64_t> next{0};
  const auto worker = [&] {
    for (std::uint64_t c = next++; c < chunks; c = next++) {
      auto rng = chunk_stream(seed, c);
      const std::uint64_t first = c * kChunk;
      body(rng, first, std::min(kChunk, trials - first));
    }
  };
  if (threads <= 1) {
    worker();
    return;
  }
  std::vector<std::jthread> pool;
  for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
}

// Per-eigendirection received energies of Willie over n symbols.
class EnergySampler {
 public:
  EnergySampler(const MimoScenario& scenario, const PowerAllocation& alloc, std::uint64_t n,
                bool per_symbol)
      : sigma2_(scenario.sigma_w2), n_(n), per_symbol_(per_symbol) {
    const CMatrix received = scenario.h_w * alloc.covariance * scenario.h_w.adjoint();
    const HermitianEigen eig = hermitian_eigen(0.5 * (received + received.adjoint()));
    signal_ = eig.values;
    basis_ = eig.vectors;
    if (per_symbol_) {
      const HermitianEigen q = hermitian_eigen(0.5 * (alloc.covariance + alloc.covariance.adjoint()));
      mix_ = scenario.h_w * q.vectors * q.values.cwiseSqrt().cast<cdouble>().asDiagonal();
    }
  }

  Eigen::Index dims() const { return signal_.size(); }
  const RVector& signal() const { return signal_; }
  double sigma2() const { return sigma2_; }

  template <class Rng>
  void draw(Rng& rng, bool h1, double* energy) const {
    if (!per_symbol_) {
      boost::random::gamma_distribution<double> gamma(static_cast<double>(n_), 1.0);
      for (Eigen::Index k = 0; k < dims(); ++k)
        energy[k] = (sigma2_ + (h1 ? signal_(k) : 0.0)) * gamma(rng);
      return;
    }
    boost::random::normal_distribution<double> normal(0.0, std::sqrt(0.5));
    const auto complex_normal = [&](Eigen::Index size, double scale) {
      CVector v(size);
      for (Eigen::Index i = 0; i < size; ++i) {
        const double re = normal(rng);
        const double im = normal(rng);
        v(i) = scale * cdouble(re, im);
      }
      return v;
    };
    std::fill(energy, energy + dims(), 0.0);
    for (std::uint64_t t = 0; t < n_; ++t) {
      CVector y = complex_normal(dims(), std::sqrt(sigma2_));
      if (h1) y += mix_ * complex_normal(mix_.cols(), 1.0);
      const CVector proj = basis_.adjoint() * y;
      for (Eigen::Index k = 0; k < dims(); ++k) energy[k] += std::norm(proj(k));
    }
  }

 private:
  double sigma2_;
  std::uint64_t n_;
  bool per_symbol_;
  RVector signal_;
  CMatrix basis_;
  CMatrix mix_;
};

void check_trials(std::uint64_t n, std::uint64_t trials) {
  require(n >= 1, ErrorCode::invalid_input, "blocklength must be at least 1");
  require(trials >= kMinTrials, ErrorCode::insufficient_trials,
          "Monte Carlo needs at least 100 trials");
}

void check_shapes(const MimoScenario& scenario, const PowerAllocation& alloc) {
  scenario.validate();
  require(alloc.covariance.rows() == scenario.n_a() && alloc.covariance.cols() == scenario.n_a(),
          ErrorCode::invalid_input, "covariance must be N_a x N_a");
}

}  // namespace

DetectionOutcome exact_error_sum(double signal_power, double sigma_w2, std::uint64_t dof) {
  require(signal_power >= 0.0 && std::isfinite(signal_power), ErrorCode::invalid_input,
          "signal power must be finite and non-negative");
  require(sigma_w2 > 0.0, ErrorCode::invalid_input, "sigma_w^2 must be positive");
  require(dof >= 2 && dof % 2 == 0, ErrorCode::invalid_input,
          "degrees of freedom must be even and at least 2");
  const double k = static_cast<double>(dof / 2);
  const double s0 = sigma_w2;
  const double s1 = sigma_w2 + signal_power;
  const double snr = signal_power / sigma_w2;

  DetectionOutcome out;
  if (signal_power == 0.0) {
    out.threshold = k * s0;
    out.alpha = boost::math::gamma_q(k, k);
    out.beta = 1.0 - out.alpha;
  } else {
    // Equal densities: (k - 1) log t - t / s0 - k log s0 = (k - 1) log t - t / s1 - k log s1.
    out.threshold = k * std::log1p(snr) * s0 * s1 / signal_power;
    out.alpha = boost::math::gamma_q(k, out.threshold / s0);
    out.beta = boost::math::gamma_p(k, out.threshold / s1);
  }
  out.error_sum = out.alpha + out.beta;
  out.pinsker_floor = detection_lower_bound(k * kl_term(snr));
  return out;
}

DetectionOutcome exact_error_sum(const MimoScenario& scenario, const PowerAllocation& alloc,
                                 std::uint64_t n) {
  check_shapes(scenario, alloc);
  require(n >= 1, ErrorCode::invalid_input, "blocklength must be at least 1");
  const CMatrix received = scenario.h_w * alloc.covariance * scenario.h_w.adjoint();
  const RVector values = hermitian_eigen(0.5 * (received + received.adjoint())).values;
  const double top = values.maxCoeff();
  const double bottom = values.minCoeff();
  require(top - bottom <= 1e-12 * std::max(top, scenario.sigma_w2), ErrorCode::unsupported_case,
          "received covariance is not isotropic; use Monte Carlo");
  const auto dof = 2 * n * static_cast<std::uint64_t>(scenario.n_w());
  return exact_error_sum(std::max(0.0, 0.5 * (top + bottom)), scenario.sigma_w2, dof);
}

DetectionOutcome monte_carlo_detection(const MimoScenario& scenario, const PowerAllocation& alloc,
                                       std::uint64_t n, std::uint64_t trials, std::uint64_t seed,
                                       const MonteCarloOptions& options) {
  check_shapes(scenario, alloc);
  check_trials(n, trials);
  const EnergySampler sampler(scenario, alloc, n, options.per_symbol);
  const auto dims = static_cast<std::size_t>(sampler.dims());

  std::vector<double> h0(trials);
  std::vector<double> h1(trials);
  for_each_chunk(trials, seed, options.threads,
                 [&](std::mt19937_64& rng, std::uint64_t first, std::uint64_t count) {
                   std::vector<double> energy(dims);
                   for (std::uint64_t t = first; t < first + count; ++t) {
                     sampler.draw(rng, false, energy.data());
                     h0[t] = std::accumulate(energy.begin(), energy.end(), 0.0);
                     sampler.draw(rng, true, energy.data());
                     h1[t] = std::accumulate(energy.begin(), energy.end(), 0.0);
                   }
                 });
  std::sort(h0.begin(), h0.end());
  std::sort(h1.begin(), h1.end());

  // Decide H1 when the energy exceeds tau. Sweep tau over the pooled order
  // statistics; below every sample alpha = 1 and beta = 0.
  std::uint64_t below0 = 0;
  std::uint64_t below1 = 0;
  std::uint64_t best0 = 0;
  std::uint64_t best1 = 0;
  double best_tau = 0.0;
  while (below0 < trials || below1 < trials) {
    const double v = below1 == trials || (below0 < trials && h0[below0] <= h1[below1])
                         ? h0[below0]
                         : h1[below1];
    while (below0 < trials && h0[below0] <= v) ++below0;
    while (below1 < trials && h1[below1] <= v) ++below1;
    // trials * (alpha + beta) = (trials - below0) + below1
    if (below1 + best0 < best1 + below0) {
      best0 = below0;
      best1 = below1;
      best_tau = v;
    }
  }
  const double total = static_cast<double>(trials);

  DetectionOutcome out;
  out.trials = trials;
  out.threshold = best_tau;
  out.alpha = static_cast<double>(trials - best0) / total;
  out.beta = static_cast<double>(best1) / total;
  out.error_sum = out.alpha + out.beta;
  out.confidence_halfwidth = 3.0 * std::sqrt(out.alpha * (1.0 - out.alpha) / total) +
                             3.0 * std::sqrt(out.beta * (1.0 - out.beta) / total);
  const double kl = kl_gaussian(alloc.covariance, scenario.h_w, scenario.sigma_w2);
  out.pinsker_floor = detection_lower_bound(kl_n_letter(kl, n));
  return out;
}

KlEstimate empirical_kl(const MimoScenario& scenario, const PowerAllocation& alloc,
                        std::uint64_t n, std::uint64_t trials, std::uint64_t seed,
                        const MonteCarloOptions& options) {
  check_shapes(scenario, alloc);
  check_trials(n, trials);
  const EnergySampler sampler(scenario, alloc, n, options.per_symbol);
  const auto dims = static_cast<std::size_t>(sampler.dims());
  RVector ratio = (sampler.signal().array() / sampler.sigma2() + 1.0).matrix();
  double log_det = 0.0;
  for (Eigen::Index k = 0; k < ratio.size(); ++k) log_det += std::log(ratio(k));
  log_det *= static_cast<double>(n);

  std::vector<double> llr(trials);
  for_each_chunk(trials, seed, options.threads,
                 [&](std::mt19937_64& rng, std::uint64_t first, std::uint64_t count) {
                   std::vector<double> energy(dims);
                   for (std::uint64_t t = first; t < first + count; ++t) {
                     sampler.draw(rng, true, energy.data());
                     // Energies are mu_k G_k; the LLR weight per direction is 1/s^2 - 1/mu_k.
                     double v = -log_det;
                     for (std::size_t k = 0; k < dims; ++k) {
                       const double mu = sampler.sigma2() * ratio(static_cast<Eigen::Index>(k));
                       v += energy[k] * (1.0 / sampler.sigma2() - 1.0 / mu);
                     }
                     llr[t] = v;
                   }
                 });
  double mean = 0.0;
  for (double v : llr) mean += v;
  mean /= static_cast<double>(trials);
  double var = 0.0;
  for (double v : llr) var += (v - mean) * (v - mean);
  var /= static_cast<double>(trials - 1);
  return KlEstimate{mean, std::sqrt(var / static_cast<double>(trials))};
}

}  // namespace covert
