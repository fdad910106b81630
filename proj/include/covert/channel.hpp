// SPDX-License-Identifier: Apache-2.0
//
// Channel synthesis from uniform linear array geometry, beam patterns and
// the eigen-structure of a Bob/Willie channel pair.

#pragma once

#include <cstdint>
#include <vector>

#include "covert/types.hpp"

namespace covert {

/// Evenly spaced uniform linear array. Separation is normalized to the
/// carrier wavelength; the array length is always num_antennas * separation.
class ArrayGeometry {
 public:
  ArrayGeometry(std::int64_t num_antennas, double antenna_separation);

  /// Geometry with a prescribed normalized length L (separation = L / N).
  static ArrayGeometry with_length(std::int64_t num_antennas, double array_length);

  std::int64_t num_antennas() const noexcept { return num_antennas_; }
  double antenna_separation() const noexcept { return separation_; }
  double array_length() const noexcept {
    return static_cast<double>(num_antennas_) * separation_;
  }

 private:
  std::int64_t num_antennas_;
  double separation_;
};

/// Line-of-sight path: attenuation xi, the receiver's directional cosine as
/// seen from the transmit array, and the wavelength-normalized distance d.
struct LosPath {
  double attenuation = 0.0;
  double directional_cosine = 0.0;
  double normalized_distance = 0.0;

  void validate() const;
};

/// One term of a multipath channel.
struct PathComponent {
  LosPath path;
  double omega_tx = 0.0;
  double omega_rx = 0.0;
};

/// Deterministic Bob/Willie channel pair with noise powers and power budget.
struct MimoScenario {
  CMatrix h_b;  // N_b x N_a
  CMatrix h_w;  // N_w x N_a
  double sigma_b2 = 1.0;
  double sigma_w2 = 1.0;
  double power_budget = 1.0;

  Eigen::Index n_a() const noexcept { return h_b.cols(); }
  Eigen::Index n_b() const noexcept { return h_b.rows(); }
  Eigen::Index n_w() const noexcept { return h_w.rows(); }

  void validate() const;
};

/// Eigen-structure of H_b^H H_b with Willie's Gram matrix expressed in Bob's
/// eigenbasis. All vectors have length N_a; entries past `dims()` belong to
/// Bob's null space (lambda_b == 0 there).
struct EigenStructure {
  RVector lambda_b;          // descending, >= 0
  RVector lambda_w_rotated;  // diag(U_b^H H_w^H H_w U_b)
  CMatrix rotation;          // U_b^H U_w
  CMatrix bob_basis;         // U_b
  Eigen::Index rank_dims = 0;  // N = min(N_a, N_b)

  Eigen::Index dims() const noexcept { return rank_dims; }
  Eigen::Index n_a() const noexcept { return lambda_b.size(); }
};

/// Bound on Willie's normalized spectral norm, ||H_w H_w^H||_op / sigma_w^2.
struct SpectralBound {
  explicit SpectralBound(double lambda_hat);
  double lambda_hat;
};

/// Unit-norm ULA signature with entries exp(-j 2 pi Delta i omega)/sqrt(N).
CVector unit_signature(const ArrayGeometry& geometry, double omega);

/// |sin(pi L omega) / (N sin(pi L omega / N))|, the magnitude of the inner
/// product between two signatures separated by omega.
double beam_gain(const ArrayGeometry& geometry, double omega);

/// Rank-one line-of-sight channel sqrt(xi^2 N_a N_r) e^{-j 2 pi d} u_r u_a^H.
CMatrix los_channel(const ArrayGeometry& tx, const ArrayGeometry& rx,
                    const LosPath& path, double omega_tx, double omega_rx);

CMatrix multipath_channel(const ArrayGeometry& tx, const ArrayGeometry& rx,
                          const std::vector<PathComponent>& paths);

/// Unitary basis whose columns are unit_signature(l / L), l = 0..N-1.
CMatrix angular_basis(const ArrayGeometry& geometry);

/// H^g = U_r^H H U_a.
CMatrix angular_representation(const CMatrix& h, const ArrayGeometry& tx,
                               const ArrayGeometry& rx);

/// Hermitian eigendecomposition in descending order with the phase of each
/// eigenvector fixed (first non-negligible component real and positive).
struct HermitianEigen {
  RVector values;
  CMatrix vectors;
};
HermitianEigen hermitian_eigen(const CMatrix& gram);

EigenStructure rotated_eigen(const MimoScenario& scenario);

/// Returns the real part of z after checking the imaginary residue is below
/// 1e-12 relative to `scale`; raises numerical_consistency otherwise.
double checked_real(cdouble z, double scale);

}  // namespace covert
