// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <doctest.h>

#include "covert/channel.hpp"

namespace helpers {

/// Commuting pair with H_b = diag(sqrt(lambda_b)), H_w = diag(sqrt(lambda_w)).
inline covert::MimoScenario diagonal_scenario(const std::vector<double>& lambda_b,
                                              const std::vector<double>& lambda_w,
                                              double sigma_b2 = 1.0, double sigma_w2 = 1.0,
                                              double power = 1.0) {
  const auto n = static_cast<Eigen::Index>(lambda_b.size());
  covert::MimoScenario s;
  s.h_b = covert::CMatrix::Zero(n, n);
  s.h_w = covert::CMatrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    s.h_b(i, i) = std::sqrt(lambda_b[static_cast<std::size_t>(i)]);
    s.h_w(i, i) = std::sqrt(lambda_w[static_cast<std::size_t>(i)]);
  }
  s.sigma_b2 = sigma_b2;
  s.sigma_w2 = sigma_w2;
  s.power_budget = power;
  return s;
}

template <class F>
covert::ErrorCode error_code_of(F&& f) {
  try {
    f();
  } catch (const covert::Error& e) {
    return e.code();
  }
  FAIL("expected a covert::Error");
  return covert::ErrorCode::io;
}

}  // namespace helpers
