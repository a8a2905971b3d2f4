#pragma once

#include "qstorage/quantum_core.hpp"

#include <cmath>
#include <complex>
#include <algorithm>
#include <random>

namespace testing_support {

using qstorage::Complex;
using qstorage::DensityMatrix;
using qstorage::Matrix2c;
using qstorage::Matrix4c;
using qstorage::Vector4c;

inline Vector4c random_amplitudes(std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Vector4c v;
  for (int i = 0; i < 4; ++i) v(i) = Complex(g(rng), g(rng));
  return v.normalized();
}

/// Ginibre ensemble: G G^dagger / tr, full rank almost surely.
inline DensityMatrix random_state(std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Matrix4c m;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) m(i, j) = Complex(g(rng), g(rng));
  Matrix4c rho = m * m.adjoint();
  rho /= rho.trace().real();
  rho = (rho + rho.adjoint()) / 2.0;
  return DensityMatrix::from_matrix(rho);
}

inline Matrix2c random_unitary(std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Eigen::Matrix2cd m;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) m(i, j) = Complex(g(rng), g(rng));
  Eigen::HouseholderQR<Eigen::Matrix2cd> qr(m);
  return qr.householderQ();
}

inline Eigen::Vector3d random_direction(std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Eigen::Vector3d n(g(rng), g(rng), g(rng));
  return n.normalized();
}

/// Explicit Werner matrix, independent of the library constructor.
inline Matrix4c werner_matrix(double v) {
  Matrix4c m = Matrix4c::Identity() * ((1.0 - v) / 4.0);
  m(0, 0) += v / 2.0;
  m(3, 3) += v / 2.0;
  m(0, 3) += v / 2.0;
  m(3, 0) += v / 2.0;
  return m;
}

}  // namespace testing_support

namespace testing_support {

/// Eigenvector of n.sigma with eigenvalue s, from the polar/azimuth angles.
inline qstorage::Vector2c oracle_eigenvector(const Eigen::Vector3d& n, int s) {
  const Eigen::Vector3d m = s > 0 ? n : Eigen::Vector3d(-n);
  const double theta = std::acos(std::clamp(m.z(), -1.0, 1.0));
  const double phi = std::atan2(m.y(), m.x());
  return {std::cos(theta / 2), std::polar(std::sin(theta / 2), phi)};
}

/// <psi_a psi_b| rho |psi_a psi_b> by explicit tensor contraction.
inline double oracle_joint(const Matrix4c& rho, const Eigen::Vector3d& a, int sa,
                           const Eigen::Vector3d& b, int sb) {
  const auto u = oracle_eigenvector(a, sa);
  const auto v = oracle_eigenvector(b, sb);
  Vector4c psi;
  psi << u(0) * v(0), u(0) * v(1), u(1) * v(0), u(1) * v(1);
  return (psi.adjoint() * rho * psi)(0, 0).real();
}

}  // namespace testing_support
