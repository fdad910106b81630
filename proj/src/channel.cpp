// SPDX-License-Identifier: Apache-2.0

#include "covert/channel.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace covert {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kImagTolerance = 1e-12;
constexpr double kSineGuard = 1e-12;

bool finite(double x) { return std::isfinite(x); }

// sin(pi t) with exact zeros at integer t.
double sin_pi(double t) {
  const double r = t - 2.0 * std::round(0.5 * t);  // r in [-1, 1]
  if (r == 0.0 || std::abs(r) == 1.0) return 0.0;
  return std::sin(kPi * r);
}

}  // namespace

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::invalid_input: return "invalid_input";
    case ErrorCode::invalid_geometry: return "invalid_geometry";
    case ErrorCode::numerical_consistency: return "numerical_consistency";
    case ErrorCode::domain: return "domain";
    case ErrorCode::alignment: return "alignment";
    case ErrorCode::regime: return "regime";
    case ErrorCode::no_null: return "no_null";
    case ErrorCode::undefined_shares: return "undefined_shares";
    case ErrorCode::inconsistent_shares: return "inconsistent_shares";
    case ErrorCode::unsupported_case: return "unsupported_case";
    case ErrorCode::insufficient_trials: return "insufficient_trials";
    case ErrorCode::io: return "io";
  }
  return "unknown";
}

ArrayGeometry::ArrayGeometry(std::int64_t num_antennas, double antenna_separation)
    : num_antennas_(num_antennas), separation_(antenna_separation) {
  require(num_antennas >= 1, ErrorCode::invalid_geometry,
          "array needs at least one antenna");
  require(finite(antenna_separation) && antenna_separation > 0.0,
          ErrorCode::invalid_geometry, "antenna separation must be positive");
}

ArrayGeometry ArrayGeometry::with_length(std::int64_t num_antennas,
                                         double array_length) {
  require(num_antennas >= 1, ErrorCode::invalid_geometry,
          "array needs at least one antenna");
  return ArrayGeometry(num_antennas,
                       array_length / static_cast<double>(num_antennas));
}

void LosPath::validate() const {
  require(finite(attenuation) && finite(normalized_distance),
          ErrorCode::invalid_input, "path parameters must be finite");
  require(std::abs(directional_cosine) <= 1.0, ErrorCode::invalid_input,
          "directional cosine must lie in [-1, 1]");
}

void MimoScenario::validate() const {
  require(h_b.cols() >= 1 && h_b.rows() >= 1 && h_w.rows() >= 1,
          ErrorCode::invalid_input, "channel matrices must be non-empty");
  require(h_b.cols() == h_w.cols(), ErrorCode::invalid_input,
          "H_b and H_w must share the transmit dimension N_a");
  require(sigma_b2 > 0.0 && sigma_w2 > 0.0 && finite(sigma_b2) && finite(sigma_w2),
          ErrorCode::invalid_input, "noise powers must be strictly positive");
  require(power_budget > 0.0 && finite(power_budget), ErrorCode::invalid_input,
          "power budget must be strictly positive");
  require(h_b.allFinite() && h_w.allFinite(), ErrorCode::invalid_input,
          "channel entries must be finite");
}

SpectralBound::SpectralBound(double value) : lambda_hat(value) {
  require(finite(value) && value > 0.0, ErrorCode::invalid_input,
          "spectral bound must be positive");
}

CVector unit_signature(const ArrayGeometry& geometry, double omega) {
  require(finite(omega), ErrorCode::invalid_input, "omega must be finite");
  const auto n = geometry.num_antennas();
  const double delta = geometry.antenna_separation();
  // The signature is periodic in omega with period 1/Delta; reducing the
  // argument keeps the phases accurate for large |omega|.
  const double period = 1.0 / delta;
  const double reduced = omega - period * std::round(omega / period);
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  CVector u(n);
  for (std::int64_t i = 0; i < n; ++i) {
    const double phase = -2.0 * kPi * delta * static_cast<double>(i) * reduced;
    u(i) = scale * cdouble(std::cos(phase), std::sin(phase));
  }
  return u;
}

double beam_gain(const ArrayGeometry& geometry, double omega) {
  const double n = static_cast<double>(geometry.num_antennas());
  const double delta = geometry.antenna_separation();
  // Reduce modulo the period N/L = 1/Delta before taking sines.
  const double period = 1.0 / delta;
  const double reduced = omega - period * std::round(omega / period);
  const double den = sin_pi(delta * reduced);
  if (std::abs(den) < kSineGuard) return 1.0;
  const double num = sin_pi(n * delta * reduced);
  return std::min(1.0, std::abs(num / (n * den)));
}

CMatrix los_channel(const ArrayGeometry& tx, const ArrayGeometry& rx,
                    const LosPath& path, double omega_tx, double omega_rx) {
  require(finite(path.attenuation) && finite(path.normalized_distance),
          ErrorCode::invalid_input, "path parameters must be finite");
  const double na = static_cast<double>(tx.num_antennas());
  const double nr = static_cast<double>(rx.num_antennas());
  const double amplitude = path.attenuation * std::sqrt(na * nr);
  const double phase = -2.0 * kPi * path.normalized_distance;
  const cdouble gain = amplitude * cdouble(std::cos(phase), std::sin(phase));
  return gain * unit_signature(rx, omega_rx) * unit_signature(tx, omega_tx).adjoint();
}

CMatrix multipath_channel(const ArrayGeometry& tx, const ArrayGeometry& rx,
                          const std::vector<PathComponent>& paths) {
  require(!paths.empty(), ErrorCode::invalid_input, "multipath channel needs at least one path");
  CMatrix h = CMatrix::Zero(rx.num_antennas(), tx.num_antennas());
  for (const auto& p : paths) h += los_channel(tx, rx, p.path, p.omega_tx, p.omega_rx);
  return h;
}

CMatrix angular_basis(const ArrayGeometry& geometry) {
  const auto n = geometry.num_antennas();
  const double length = geometry.array_length();
  CMatrix basis(n, n);
  for (std::int64_t l = 0; l < n; ++l)
    basis.col(l) = unit_signature(geometry, static_cast<double>(l) / length);
  return basis;
}

CMatrix angular_representation(const CMatrix& h, const ArrayGeometry& tx,
                               const ArrayGeometry& rx) {
  if (h.rows() != rx.num_antennas() || h.cols() != tx.num_antennas()) {
    std::ostringstream msg;
    msg << "channel is " << h.rows() << "x" << h.cols() << " but geometries imply "
        << rx.num_antennas() << "x" << tx.num_antennas();
    fail(ErrorCode::invalid_input, msg.str());
  }
  return angular_basis(rx).adjoint() * h * angular_basis(tx);
}

double checked_real(cdouble z, double scale) {
  const double tol = kImagTolerance * std::max(1.0, std::abs(scale));
  if (std::abs(z.imag()) > tol) {
    std::ostringstream msg;
    msg << "imaginary residue " << z.imag() << " exceeds tolerance " << tol;
    fail(ErrorCode::numerical_consistency, msg.str());
  }
  return z.real();
}

namespace {

// Deterministic phase: the first non-negligible entry is made real positive.
CVector fix_phase(CVector v) {
  for (Eigen::Index k = 0; k < v.size(); ++k) {
    if (std::abs(v(k)) > 1e-12) {
      v *= std::conj(v(k)) / std::abs(v(k));
      v(k) = cdouble(v(k).real(), 0.0);
      break;
    }
  }
  return v;
}

// Any basis of a repeated eigenvalue of Bob's Gram matrix is an eigenbasis.
// Pick the one that diagonalizes Willie's Gram matrix on that subspace, so
// the rotated Willie matrix has no cross terms inside the cluster.
void align_degenerate_clusters(HermitianEigen& bob, const CMatrix& gram_w) {
  const Eigen::Index n = bob.values.size();
  const double tol = 1e-12 * std::max(1.0, n > 0 ? std::abs(bob.values(0)) : 0.0);
  for (Eigen::Index start = 0; start < n;) {
    Eigen::Index stop = start + 1;
    while (stop < n && bob.values(start) - bob.values(stop) <= tol) ++stop;
    if (stop - start > 1) {
      const CMatrix block = bob.vectors.middleCols(start, stop - start);
      const CMatrix compressed = block.adjoint() * gram_w * block;
      const CMatrix turned = block * hermitian_eigen(0.5 * (compressed + compressed.adjoint())).vectors;
      for (Eigen::Index j = 0; j < turned.cols(); ++j) bob.vectors.col(start + j) = fix_phase(turned.col(j));
    }
    start = stop;
  }
}

}  // namespace

HermitianEigen hermitian_eigen(const CMatrix& gram) {
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(gram);
  require(solver.info() == Eigen::Success, ErrorCode::numerical_consistency,
          "Hermitian eigendecomposition failed");
  const auto n = gram.rows();
  HermitianEigen out{RVector(n), CMatrix(n, n)};
  const double scale = std::max(1.0, gram.cwiseAbs().maxCoeff());
  for (Eigen::Index i = 0; i < n; ++i) {
    // Eigen returns ascending order.
    const Eigen::Index src = n - 1 - i;
    out.values(i) = solver.eigenvalues()(src);
    out.vectors.col(i) = fix_phase(solver.eigenvectors().col(src));
  }
  // Gram matrices are PSD; tiny negative eigenvalues are round-off.
  for (Eigen::Index i = 0; i < n; ++i) {
    if (out.values(i) < 0.0) {
      require(out.values(i) >= -1e-10 * scale, ErrorCode::numerical_consistency,
              "Gram matrix has a significantly negative eigenvalue");
      out.values(i) = 0.0;
    }
  }
  return out;
}

EigenStructure rotated_eigen(const MimoScenario& scenario) {
  scenario.validate();
  const CMatrix gram_b = scenario.h_b.adjoint() * scenario.h_b;
  const CMatrix gram_w = scenario.h_w.adjoint() * scenario.h_w;
  HermitianEigen bob = hermitian_eigen(gram_b);
  align_degenerate_clusters(bob, gram_w);
  const HermitianEigen willie = hermitian_eigen(gram_w);

  EigenStructure eig;
  eig.lambda_b = bob.values;
  eig.bob_basis = bob.vectors;
  eig.rotation = bob.vectors.adjoint() * willie.vectors;
  eig.rank_dims = std::min(scenario.n_a(), scenario.n_b());

  const CMatrix rotated = bob.vectors.adjoint() * gram_w * bob.vectors;
  const double scale = gram_w.trace().real();
  eig.lambda_w_rotated.resize(rotated.rows());
  for (Eigen::Index i = 0; i < rotated.rows(); ++i) {
    double v = checked_real(rotated(i, i), scale);
    require(v >= -1e-12 * std::max(1.0, scale), ErrorCode::numerical_consistency,
            "rotated eigenvalue significantly negative");
    // Round-off in an exact null direction shows up at ~1e-16 of the trace.
    if (v < 1e-12 * scale) v = 0.0;
    eig.lambda_w_rotated(i) = v;
  }
  // Bob's eigenvalues beyond min(N_a, N_b) are structurally zero.
  const double top = eig.lambda_b.size() > 0 ? eig.lambda_b(0) : 0.0;
  for (Eigen::Index i = 0; i < eig.lambda_b.size(); ++i)
    if (i >= eig.rank_dims || eig.lambda_b(i) < 1e-12 * top) eig.lambda_b(i) = 0.0;
  return eig;
}

}  // namespace covert
