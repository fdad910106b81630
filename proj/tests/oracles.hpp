// SPDX-License-Identifier: Apache-2.0
//
// Independent reference computations used to check the library. Nothing
// here calls into the code under test except for plain data types.

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "covert/channel.hpp"

namespace oracle {

using covert::CMatrix;
using covert::CVector;
using covert::RVector;
using cdouble = std::complex<double>;

/// W_{-1}(x) by bisection on w e^w, w in (-inf, -1].
inline double lambert_w_minus1(double x) {
  long double lo = -1.0L;
  while (lo * std::exp(lo) < x) lo *= 2.0L;  // w e^w increases back toward 0 as w -> -inf
  long double hi = -1.0L;
  for (int i = 0; i < 400; ++i) {
    const long double mid = 0.5L * (lo + hi);
    if (mid * std::exp(mid) > x) lo = mid; else hi = mid;
  }
  return static_cast<double>(0.5L * (lo + hi));
}

/// Positive root of x - log(1 + x) = eps by long-double bisection.
inline double kl_inverse(double eps) {
  if (eps == 0.0) return 0.0;
  long double lo = 0.0L;
  long double hi = 1.0L;
  const auto h = [](long double x) {
    if (x >= 0.1L) return x - std::log1p(x);
    long double sum = 0.0L, p = x * x;  // alternating series avoids cancellation
    for (int k = 2; k < 60; ++k, p *= -x) sum += p / k;
    return sum;
  };
  while (h(hi) < eps) hi *= 2.0L;
  for (int i = 0; i < 400; ++i) {
    const long double mid = 0.5L * (lo + hi);
    if (h(mid) < eps) lo = mid; else hi = mid;
  }
  return static_cast<double>(0.5L * (lo + hi));
}

/// |u(0)^H u(omega)| from the explicit signature sum.
inline double beam_gain(std::int64_t n, double separation, double omega) {
  cdouble sum = 0.0;
  for (std::int64_t i = 0; i < n; ++i)
    sum += std::polar(1.0, -2.0 * std::numbers::pi * separation * static_cast<double>(i) * omega);
  return std::abs(sum) / static_cast<double>(n);
}

/// Rotated Willie gains diag(V^H H_w^H H_w V) using Bob's right singular
/// vectors from an SVD, ordered by descending singular value.
inline RVector rotated_gains_svd(const CMatrix& h_b, const CMatrix& h_w) {
  Eigen::JacobiSVD<CMatrix> svd(h_b, Eigen::ComputeFullV);
  const CMatrix v = svd.matrixV();
  const CMatrix g = h_w.adjoint() * h_w;
  RVector out(v.cols());
  for (Eigen::Index i = 0; i < v.cols(); ++i) out(i) = (v.col(i).adjoint() * g * v.col(i))(0, 0).real();
  return out;
}

inline RVector bob_gains_svd(const CMatrix& h_b) {
  Eigen::JacobiSVD<CMatrix> svd(h_b);
  RVector s = svd.singularValues();
  RVector out = RVector::Zero(h_b.cols());
  for (Eigen::Index i = 0; i < s.size(); ++i) out(i) = s(i) * s(i);
  return out;
}

inline CMatrix random_matrix(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index cols,
                             double scale = 1.0) {
  std::normal_distribution<double> normal(0.0, std::sqrt(0.5) * scale);
  CMatrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = cdouble(normal(rng), normal(rng));
  return m;
}

/// Brute-force maximum of log(1 + a1 q1) + log(1 + a2 q2) over the box
/// containing {q1 + q2 <= P, sum x - log(1 + x) <= eps, x_i = b_i q_i}, on a
/// 2000 x 2000 grid followed by one 2000 x 2000 refinement around the best cell.
inline double grid_rate(double a1, double a2, double b1, double b2, double power, double eps) {
  const auto kl = [](double x) { return x - std::log1p(x); };
  const auto feasible = [&](double q1, double q2) {
    return q1 + q2 <= power * (1.0 + 1e-15) && kl(b1 * q1) + kl(b2 * q2) <= eps * (1.0 + 1e-12);
  };
  const auto cap = [&](double b) {
    return b > 0.0 ? std::min(power, kl_inverse(eps) / b) : power;
  };
  double lo1 = 0.0, hi1 = cap(b1), lo2 = 0.0, hi2 = cap(b2);
  double best = 0.0, best1 = 0.0, best2 = 0.0;
  for (int pass = 0; pass < 2; ++pass) {
    const int m = 2000;
    const double s1 = (hi1 - lo1) / m, s2 = (hi2 - lo2) / m;
    for (int i = 0; i <= m; ++i) {
      const double q1 = lo1 + s1 * i;
      const double r1 = std::log1p(a1 * q1);
      // Rate grows with q2, so scan q2 downward and stop at the first feasible point.
      for (int j = m; j >= 0; --j) {
        const double q2 = lo2 + s2 * j;
        if (!feasible(q1, q2)) continue;
        const double r = r1 + std::log1p(a2 * q2);
        if (r > best) {
          best = r;
          best1 = q1;
          best2 = q2;
        }
        break;
      }
    }
    lo1 = std::max(0.0, best1 - 2 * s1);
    hi1 = best1 + 2 * s1;
    lo2 = std::max(0.0, best2 - 2 * s2);
    hi2 = best2 + 2 * s2;
  }
  return best;
}

/// Composite Simpson rule on [a, b] with `intervals` (even) panels.
inline double simpson(const std::function<double(double)>& f, double a, double b, int intervals) {
  const double h = (b - a) / intervals;
  double sum = f(a) + f(b);
  for (int i = 1; i < intervals; ++i) sum += f(a + h * i) * (i % 2 ? 4.0 : 2.0);
  return sum * h / 3.0;
}

/// Density of a Gamma(k, scale) energy statistic.
inline double gamma_density(double t, double k, double scale) {
  if (t <= 0.0) return 0.0;
  return std::exp((k - 1.0) * std::log(t) - t / scale - std::lgamma(k) - k * std::log(scale));
}

/// alpha + beta of the energy test at threshold tau by quadrature.
struct QuadratureErrors {
  double alpha;
  double beta;
};

inline QuadratureErrors quadrature_errors(double tau, double k, double s0, double s1) {
  const auto f0 = [&](double t) { return gamma_density(t, k, s0); };
  const auto f1 = [&](double t) { return gamma_density(t, k, s1); };
  const double upper = tau + 80.0 * s1 * std::sqrt(k) + 80.0 * s1;
  return {simpson(f0, tau, upper, 400000), simpson(f1, 0.0, tau, 400000)};
}

/// Least-squares slope of log(y) against log(x).
inline double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace oracle
