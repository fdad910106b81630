// SPDX-License-Identifier: Apache-2.0

#include <random>

#include "covert/channel.hpp"
#include "helpers.hpp"
#include "oracles.hpp"

using namespace covert;
using helpers::error_code_of;

TEST_CASE("geometry rejects empty arrays and bad separations") {
  CHECK(error_code_of([] { ArrayGeometry(0, 0.5); }) == ErrorCode::invalid_geometry);
  CHECK(error_code_of([] { ArrayGeometry(4, 0.0); }) == ErrorCode::invalid_geometry);
  const auto g = ArrayGeometry::with_length(4, 2.0);
  CHECK(g.antenna_separation() == 0.5);
  CHECK(g.array_length() == 2.0);
}

TEST_CASE("signature at zero phase and unit norm") {
  const ArrayGeometry g(4, 0.5);
  const CVector u = unit_signature(g, 0.0);
  for (Eigen::Index i = 0; i < 4; ++i) CHECK(std::abs(u(i) - cdouble(0.5, 0.0)) < 1e-15);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> omega(-3.0, 3.0);
  for (int t = 0; t < 50; ++t) CHECK(std::abs(unit_signature(ArrayGeometry(7, 0.37), omega(rng)).norm() - 1.0) < 1e-14);
}

TEST_CASE("beam gain reference values") {
  const auto g = ArrayGeometry::with_length(4, 2.0);
  CHECK(beam_gain(g, 0.0) == 1.0);
  CHECK(beam_gain(g, 0.5) == 0.0);
  CHECK(beam_gain(g, 0.25) == doctest::Approx(0.653281482438188).epsilon(1e-12));
  const double inner = std::abs(unit_signature(g, 0.0).dot(unit_signature(g, 0.25)));
  CHECK(inner == doctest::Approx(0.653281482438188).epsilon(1e-12));
  for (int k = 1; k < 4; ++k) CHECK(beam_gain(g, k / 2.0) == 0.0);
}

TEST_CASE("beam gain agrees with the explicit signature sum") {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> count(1, 40);
  std::uniform_real_distribution<double> sep(0.05, 1.5), omega(-2.0, 2.0);
  for (int t = 0; t < 500; ++t) {
    const ArrayGeometry g(count(rng), sep(rng));
    const double w = omega(rng);
    CHECK(std::abs(beam_gain(g, w) - oracle::beam_gain(g.num_antennas(), g.antenna_separation(), w)) < 1e-12);
    CHECK(std::abs(beam_gain(g, w) - beam_gain(g, w + 1.0 / g.antenna_separation())) < 1e-12);
  }
}

TEST_CASE("line-of-sight channel is rank one with the expected gain") {
  const ArrayGeometry tx(6, 0.5), rx(3, 0.5);
  const LosPath path{0.3, 0.2, 17.25};
  const CMatrix h = los_channel(tx, rx, path, 0.2, -0.4);
  Eigen::JacobiSVD<CMatrix> svd(h);
  CHECK(svd.singularValues()(0) * svd.singularValues()(0) == doctest::Approx(0.09 * 18).epsilon(1e-12));
  CHECK(svd.singularValues()(1) < 1e-12);
  CHECK(error_code_of([&] { multipath_channel(tx, rx, {}); }) == ErrorCode::invalid_input);
  const CMatrix two = multipath_channel(tx, rx, {{path, 0.2, -0.4}, {path, -0.6, 0.1}});
  CHECK((two - h - los_channel(tx, rx, path, -0.6, 0.1)).norm() < 1e-14);
}

TEST_CASE("angular representation round trip") {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> size(1, 8);
  std::uniform_real_distribution<double> sep(0.1, 1.0);
  for (int t = 0; t < 100; ++t) {
    const ArrayGeometry tx(size(rng), sep(rng)), rx(size(rng), sep(rng));
    const CMatrix h = oracle::random_matrix(rng, rx.num_antennas(), tx.num_antennas());
    const CMatrix hg = angular_representation(h, tx, rx);
    const CMatrix back = angular_basis(rx) * hg * angular_basis(tx).adjoint();
    CHECK((back - h).norm() <= 1e-10);
  }
  const ArrayGeometry tx(3, 0.5), rx(2, 0.5);
  CHECK(error_code_of([&] { angular_representation(CMatrix::Zero(3, 3), tx, rx); }) ==
        ErrorCode::invalid_input);
}

TEST_CASE("rotated eigenvalues match an SVD-based evaluation") {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 100; ++t) {
    const Eigen::Index na = 1 + t % 4;
    const Eigen::Index nb = na + t % 2;  // full column rank keeps Bob's basis unique
    MimoScenario s;
    s.h_b = oracle::random_matrix(rng, nb, na);
    s.h_w = oracle::random_matrix(rng, 1 + t % 3, na);
    const EigenStructure eig = rotated_eigen(s);
    const RVector lb = oracle::bob_gains_svd(s.h_b);
    const RVector lw = oracle::rotated_gains_svd(s.h_b, s.h_w);
    CHECK(eig.dims() == na);
    for (Eigen::Index i = 0; i < na; ++i) {
      CHECK(std::abs(eig.lambda_b(i) - lb(i)) <= 1e-10 * std::max(1.0, lb(0)));
      CHECK(std::abs(eig.lambda_w_rotated(i) - lw(i)) <= 1e-10 * std::max(1.0, lw.sum()));
      CHECK(eig.lambda_w_rotated(i) >= 0.0);
    }
    CHECK(std::abs(eig.lambda_w_rotated.sum() - (s.h_w.adjoint() * s.h_w).trace().real()) < 1e-10 * std::max(1.0, lw.sum()));
  }
}

TEST_CASE("Bob's eigenvalues beyond min(N_a, N_b) are zero") {
  std::mt19937_64 rng(5);
  MimoScenario s;
  s.h_b = oracle::random_matrix(rng, 2, 5);
  s.h_w = oracle::random_matrix(rng, 3, 5);
  const EigenStructure eig = rotated_eigen(s);
  CHECK(eig.dims() == 2);
  for (Eigen::Index i = 2; i < 5; ++i) CHECK(eig.lambda_b(i) == 0.0);
  CHECK(eig.lambda_b(0) >= eig.lambda_b(1));
  CHECK(eig.lambda_b(1) > 0.0);
}

TEST_CASE("Willie null directions read as exact zeros") {
  const ArrayGeometry tx(4, 0.5), rx(1, 0.5);
  MimoScenario s;
  s.h_b = los_channel(tx, rx, {1.0, 0.0, 0.0}, 0.5, 0.0);
  s.h_w = los_channel(tx, rx, {1.0, 0.0, 0.0}, 0.0, 0.0);
  const EigenStructure eig = rotated_eigen(s);
  CHECK(eig.lambda_b(0) == doctest::Approx(4.0));
  CHECK(eig.lambda_w_rotated(0) == 0.0);
}

TEST_CASE("scenario validation and complex residue checks") {
  MimoScenario s;
  s.h_b = CMatrix::Identity(2, 2);
  s.h_w = CMatrix::Identity(3, 3);
  CHECK(error_code_of([&] { s.validate(); }) == ErrorCode::invalid_input);
  s.h_w = CMatrix::Identity(1, 2);
  s.sigma_w2 = 0.0;
  CHECK(error_code_of([&] { s.validate(); }) == ErrorCode::invalid_input);
  CHECK(checked_real(cdouble(2.0, 1e-14), 1.0) == 2.0);
  CHECK(error_code_of([] { checked_real(cdouble(2.0, 1e-6), 1.0); }) ==
        ErrorCode::numerical_consistency);
  CHECK(error_code_of([] { SpectralBound(0.0); }) == ErrorCode::invalid_input);
}

TEST_CASE("repeated Bob eigenvalues take the basis that diagonalizes Willie") {
  MimoScenario s;
  s.h_b = CMatrix::Identity(2, 2);
  s.h_w = CMatrix::Constant(1, 2, cdouble(0.3, 0.0));
  const EigenStructure eig = rotated_eigen(s);
  CHECK(eig.lambda_b(0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(eig.lambda_b(1) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(eig.lambda_w_rotated(0) == doctest::Approx(0.18).epsilon(1e-14));
  CHECK(eig.lambda_w_rotated(1) == 0.0);
  const CMatrix rotated = eig.bob_basis.adjoint() * s.h_w.adjoint() * s.h_w * eig.bob_basis;
  CHECK(std::abs(rotated(0, 1)) <= 1e-15);
  CHECK((eig.bob_basis.adjoint() * eig.bob_basis - CMatrix::Identity(2, 2)).norm() <= 1e-14);
}
