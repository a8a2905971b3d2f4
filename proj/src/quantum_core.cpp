#include "qstorage/quantum_core.hpp"

#include "qstorage/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace qstorage {

namespace {

Matrix4c symmetrized(const Matrix4c& m) { return (m + m.adjoint()) / 2.0; }

}  // namespace

PureState PureState::from_amplitudes(const Vector4c& amplitudes) {
  const double norm2 = amplitudes.squaredNorm();
  if (std::abs(norm2 - 1.0) > tolerance::kNormalization) {
    std::ostringstream os;
    os << "pure state amplitudes have squared norm " << norm2;
    throw ContractViolation(os.str());
  }
  return PureState(amplitudes);
}

DensityMatrix DensityMatrix::from_matrix(const Matrix4c& m) {
  const double herm_dev = (m - m.adjoint()).cwiseAbs().maxCoeff();
  if (herm_dev > tolerance::kHermitian) {
    throw ContractViolation("density matrix is not Hermitian (deviation " +
                            std::to_string(herm_dev) + ")");
  }
  const Complex tr = m.trace();
  if (std::abs(tr.real() - 1.0) > tolerance::kTrace || std::abs(tr.imag()) > tolerance::kTrace) {
    throw ContractViolation("density matrix trace is " + std::to_string(tr.real()));
  }
  Matrix4c h = symmetrized(m);
  Eigen::SelfAdjointEigenSolver<Matrix4c> es(h, Eigen::EigenvaluesOnly);
  const double min_eig = es.eigenvalues().minCoeff();
  if (min_eig < -tolerance::kPsdClip) {
    throw ContractViolation("density matrix has negative eigenvalue " + std::to_string(min_eig));
  }
  return DensityMatrix(std::move(h));
}

DensityMatrix DensityMatrix::from_pure(const PureState& psi) {
  const Vector4c& a = psi.amplitudes();
  return DensityMatrix(a * a.adjoint());
}

DensityMatrix DensityMatrix::maximally_mixed() {
  return DensityMatrix(Matrix4c::Identity() / 4.0);
}

DensityMatrix DensityMatrix::project_physical(const Matrix4c& m) {
  Eigen::SelfAdjointEigenSolver<Matrix4c> es(symmetrized(m));
  Eigen::Vector4d evals = es.eigenvalues().cwiseMax(0.0);
  const double total = evals.sum();
  if (!(total > 0.0)) {
    throw ContractViolation("cannot project a matrix without positive spectrum onto states");
  }
  evals /= total;
  const Matrix4c& v = es.eigenvectors();
  Matrix4c rho = v * evals.cast<Complex>().asDiagonal() * v.adjoint();
  return DensityMatrix(symmetrized(rho));
}

MeasurementSetting MeasurementSetting::from_bloch(const Eigen::Vector3d& n, std::string label) {
  if (std::abs(n.norm() - 1.0) > tolerance::kNormalization) {
    std::ostringstream os;
    os << "measurement setting Bloch vector has norm " << n.norm();
    throw ContractViolation(os.str());
  }
  return MeasurementSetting(n, std::move(label));
}

MeasurementSetting MeasurementSetting::from_label(const std::string& label) {
  const double r = std::numbers::sqrt2 / 2.0;
  Eigen::Vector3d n;
  if (label == "x") {
    n = {1, 0, 0};
  } else if (label == "-x") {
    n = {-1, 0, 0};
  } else if (label == "y") {
    n = {0, 1, 0};
  } else if (label == "-y") {
    n = {0, -1, 0};
  } else if (label == "z") {
    n = {0, 0, 1};
  } else if (label == "-z") {
    n = {0, 0, -1};
  } else if (label == "x+y") {
    n = {r, r, 0};
  } else if (label == "x-y") {
    n = {r, -r, 0};
  } else {
    throw SchemaError("unknown setting label '" + label + "'");
  }
  return MeasurementSetting(n, label);
}

std::string MeasurementSetting::describe() const {
  if (!label_.empty()) return label_;
  std::ostringstream os;
  os.precision(6);
  os << "[" << bloch_.x() << "," << bloch_.y() << "," << bloch_.z() << "]";
  return os.str();
}

MeasurementSetting MeasurementSetting::negated() const {
  std::string label;
  if (!label_.empty()) {
    if (label_ == "x+y" || label_ == "x-y") {
      label = "-(" + label_ + ")";
    } else if (label_.front() == '-') {
      label = label_.substr(1);
      if (label.front() == '(') label = label.substr(1, label.size() - 2);
    } else {
      label = "-" + label_;
    }
  }
  return MeasurementSetting(-bloch_, std::move(label));
}

MeasurementSetting MeasurementSetting::rotated_about_z(double angle) const {
  if (angle == 0.0) return *this;
  const double c = std::cos(angle), s = std::sin(angle);
  Eigen::Vector3d n(c * bloch_.x() - s * bloch_.y(), s * bloch_.x() + c * bloch_.y(), bloch_.z());
  return MeasurementSetting(n.normalized(), {});
}

double MeasurementSetting::polar() const { return std::acos(std::clamp(bloch_.z(), -1.0, 1.0)); }

double MeasurementSetting::azimuth() const { return std::atan2(bloch_.y(), bloch_.x()); }

Vector2c MeasurementSetting::eigenstate() const {
  const double theta = polar();
  return Vector2c(std::cos(theta / 2.0), std::polar(std::sin(theta / 2.0), azimuth()));
}

Matrix2c MeasurementSetting::observable() const {
  return bloch_.x() * pauli::x() + bloch_.y() * pauli::y() + bloch_.z() * pauli::z();
}

bool MeasurementSetting::is_pole() const {
  return std::abs(std::abs(bloch_.z()) - 1.0) <= tolerance::kNormalization;
}

namespace pauli {
Matrix2c identity() { return Matrix2c::Identity(); }
Matrix2c x() {
  Matrix2c m;
  m << 0, 1, 1, 0;
  return m;
}
Matrix2c y() {
  Matrix2c m;
  m << 0, Complex(0, -1), Complex(0, 1), 0;
  return m;
}
Matrix2c z() {
  Matrix2c m;
  m << 1, 0, 0, -1;
  return m;
}
Matrix2c by_index(int i) {
  switch (i) {
    case 0: return identity();
    case 1: return x();
    case 2: return y();
    case 3: return z();
    default: throw ContractViolation("Pauli index out of range");
  }
}
}  // namespace pauli

Matrix4c kron(const Matrix2c& a, const Matrix2c& b) {
  Matrix4c out;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) out.block<2, 2>(2 * i, 2 * j) = a(i, j) * b;
  return out;
}

PureState phi_plus() {
  const double r = std::numbers::sqrt2 / 2.0;
  return PureState::from_amplitudes(Vector4c(r, 0, 0, r));
}

Matrix2c projector(const MeasurementSetting& setting, Sign outcome) {
  return (pauli::identity() + sign_value(outcome) * setting.observable()) / 2.0;
}

double expectation(const DensityMatrix& rho, const Matrix4c& op) {
  return (rho.matrix() * op).trace().real();
}

double born_joint(const DensityMatrix& rho, const MeasurementSetting& a, Sign sa,
                  const MeasurementSetting& b, Sign sb) {
  const double p = expectation(rho, kron(projector(a, sa), projector(b, sb)));
  if (p < -tolerance::kPsdClip || p > 1.0 + tolerance::kPsdClip) {
    throw ContractViolation("Born probability " + std::to_string(p) + " outside [0,1]");
  }
  return std::clamp(p, 0.0, 1.0);
}

Matrix4c hermitian_sqrt(const Matrix4c& a) {
  Eigen::SelfAdjointEigenSolver<Matrix4c> es(symmetrized(a));
  Eigen::Vector4d evals = es.eigenvalues();
  if (evals.minCoeff() < -tolerance::kPsdClip) {
    throw ContractViolation("matrix square root of a non-PSD matrix (eigenvalue " +
                            std::to_string(evals.minCoeff()) + ")");
  }
  evals = evals.unaryExpr([](double x) { return x < tolerance::kSqrtFloor ? 0.0 : std::sqrt(x); });
  const Matrix4c& v = es.eigenvectors();
  return v * evals.cast<Complex>().asDiagonal() * v.adjoint();
}

double fidelity(const DensityMatrix& rho, const DensityMatrix& sigma) {
  const Matrix4c s = hermitian_sqrt(rho.matrix());
  const Matrix4c inner = s * sigma.matrix() * s;
  Eigen::SelfAdjointEigenSolver<Matrix4c> es(symmetrized(inner), Eigen::EigenvaluesOnly);
  double tr = 0.0;
  for (int i = 0; i < 4; ++i) {
    const double ev = es.eigenvalues()(i);
    if (ev < -tolerance::kPsdClip) {
      throw ContractViolation("fidelity: inner product matrix is not PSD");
    }
    if (ev >= tolerance::kSqrtFloor) tr += std::sqrt(ev);
  }
  return std::clamp(tr * tr, 0.0, 1.0);
}

double purity(const DensityMatrix& rho) {
  // tr(rho^2) = sum |rho_ij|^2 for Hermitian rho.
  return std::clamp(rho.matrix().squaredNorm(), 0.0, 1.0);
}

double trace_distance(const DensityMatrix& rho, const DensityMatrix& sigma) {
  Eigen::SelfAdjointEigenSolver<Matrix4c> es(symmetrized(rho.matrix() - sigma.matrix()),
                                             Eigen::EigenvaluesOnly);
  return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

DensityMatrix werner_state(double visibility) {
  if (!(visibility >= 0.0 && visibility <= 1.0)) {
    throw OutOfRange("Werner visibility must lie in [0,1]");
  }
  const Vector4c& a = phi_plus().amplitudes();
  const Matrix4c m = visibility * (a * a.adjoint()) + (1.0 - visibility) * Matrix4c::Identity() / 4.0;
  return DensityMatrix::from_matrix(m);
}

}  // namespace qstorage
