// SPDX-License-Identifier: Apache-2.0
//
// Common numeric types and the error type shared by every covert module.

#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <string_view>

#include <Eigen/Dense>

namespace covert {

using cdouble = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;

/// Machine-readable failure category. The CLI prints `to_string(code)` in
/// its error JSON, so the spellings are part of the external surface.
enum class ErrorCode {
  invalid_input,
  invalid_geometry,
  numerical_consistency,
  domain,
  alignment,
  regime,
  no_null,
  undefined_shares,
  inconsistent_shares,
  unsupported_case,
  insufficient_trials,
  io,
};

std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

inline void require(bool condition, ErrorCode code, const std::string& what) {
  if (!condition) fail(code, what);
}

}  // namespace covert
