#pragma once

// Two-qubit states, qubit measurement settings and Born-rule probabilities.
//
// Basis ordering for every 4-dim object is (ee, el, le, ll): the first factor
// is the 795 nm photon, the second the 1532 nm photon, and early = |0>.

#include <Eigen/Dense>

#include <complex>
#include <optional>
#include <string>

namespace qstorage {

using Complex = std::complex<double>;
using Matrix2c = Eigen::Matrix2cd;
using Matrix4c = Eigen::Matrix4cd;
using Vector2c = Eigen::Vector2cd;
using Vector4c = Eigen::Vector4cd;

/// Outcome of a projective qubit measurement along a Bloch direction.
enum class Sign : int { Plus = 1, Minus = -1 };

constexpr double sign_value(Sign s) { return static_cast<int>(s); }
constexpr Sign flip(Sign s) { return s == Sign::Plus ? Sign::Minus : Sign::Plus; }

namespace tolerance {
inline constexpr double kNormalization = 1e-12;
inline constexpr double kHermitian = 1e-10;
inline constexpr double kTrace = 1e-10;
/// Eigenvalues in [-kPsdClip, 0) are float noise and get clipped to zero.
inline constexpr double kPsdClip = 1e-9;
/// Eigenvalues of unit-trace operators below this are rounding noise; they are
/// zeroed before square roots, where they would otherwise contribute ~1e-8.
inline constexpr double kSqrtFloor = 1e-14;
}  // namespace tolerance

class PureState {
 public:
  /// Throws ContractViolation when the squared norm differs from 1 by more
  /// than 1e-12.
  static PureState from_amplitudes(const Vector4c& amplitudes);

  const Vector4c& amplitudes() const { return amplitudes_; }
  Complex operator[](int i) const { return amplitudes_(i); }

 private:
  explicit PureState(Vector4c a) : amplitudes_(std::move(a)) {}
  Vector4c amplitudes_;
};

/// Hermitian, unit-trace, positive semidefinite 4x4 matrix.
class DensityMatrix {
 public:
  /// Validates Hermiticity (1e-10 entrywise), trace (1e-10) and eigenvalues
  /// (>= -1e-9). The stored matrix is the symmetrized input.
  static DensityMatrix from_matrix(const Matrix4c& m);
  static DensityMatrix from_pure(const PureState& psi);
  static DensityMatrix maximally_mixed();

  /// Nearest physical state in the clip-and-renormalize sense: symmetrize,
  /// clip negative eigenvalues to zero, rescale to unit trace.
  static DensityMatrix project_physical(const Matrix4c& m);

  const Matrix4c& matrix() const { return rho_; }
  Complex operator()(int i, int j) const { return rho_(i, j); }

 private:
  explicit DensityMatrix(Matrix4c m) : rho_(std::move(m)) {}
  Matrix4c rho_;
};

/// A qubit observable n.sigma given by a unit Bloch vector. For time-bin
/// qubits the eigenstate |psi> = alpha|e> + beta e^{i theta}|l> has
/// alpha = cos(polar/2), beta = sin(polar/2), theta = azimuth.
class MeasurementSetting {
 public:
  /// Norm must equal 1 within 1e-12.
  static MeasurementSetting from_bloch(const Eigen::Vector3d& n, std::string label = {});
  /// Accepts "x", "y", "z", "-z", "x+y", "x-y" (and "-x", "-y").
  /// Throws SchemaError naming the label otherwise.
  static MeasurementSetting from_label(const std::string& label);

  static MeasurementSetting x() { return from_label("x"); }
  static MeasurementSetting y() { return from_label("y"); }
  static MeasurementSetting z() { return from_label("z"); }

  const Eigen::Vector3d& bloch() const { return bloch_; }
  const std::string& label() const { return label_; }
  /// Label if present, otherwise a bracketed Bloch triple.
  std::string describe() const;

  MeasurementSetting negated() const;
  /// Rotates the setting about the z axis by `angle` radians.
  MeasurementSetting rotated_about_z(double angle) const;

  double polar() const;
  double azimuth() const;
  /// The +1 eigenstate in (early, late) amplitudes.
  Vector2c eigenstate() const;

  /// n.sigma as a 2x2 matrix.
  Matrix2c observable() const;

  /// True when the setting is +z or -z within 1e-12.
  bool is_pole() const;

 private:
  MeasurementSetting(Eigen::Vector3d n, std::string label)
      : bloch_(std::move(n)), label_(std::move(label)) {}
  Eigen::Vector3d bloch_;
  std::string label_;
};

namespace pauli {
Matrix2c identity();
Matrix2c x();
Matrix2c y();
Matrix2c z();
/// 0 = identity, 1..3 = x, y, z.
Matrix2c by_index(int i);
}  // namespace pauli

Matrix4c kron(const Matrix2c& a, const Matrix2c& b);

PureState phi_plus();

/// (I + s n.sigma) / 2.
Matrix2c projector(const MeasurementSetting& setting, Sign outcome);

/// tr[rho (P_a (x) P_b)], clipped into [0, 1] when within 1e-9 outside.
/// Throws ContractViolation when the value lies further outside.
double born_joint(const DensityMatrix& rho, const MeasurementSetting& a, Sign sa,
                  const MeasurementSetting& b, Sign sb);

/// Uhlmann fidelity (tr sqrt(sqrt(rho) sigma sqrt(rho)))^2, in [0, 1].
double fidelity(const DensityMatrix& rho, const DensityMatrix& sigma);

/// tr(rho^2).
double purity(const DensityMatrix& rho);

/// Half the trace norm of rho - sigma.
double trace_distance(const DensityMatrix& rho, const DensityMatrix& sigma);

/// Expectation tr[rho A] of a Hermitian operator; the imaginary part is
/// discarded.
double expectation(const DensityMatrix& rho, const Matrix4c& op);

/// Principal square root of a Hermitian PSD matrix via eigendecomposition of
/// (A + A^dagger)/2. Eigenvalues below -1e-9 throw ContractViolation, the rest
/// of the negative ones are clipped.
Matrix4c hermitian_sqrt(const Matrix4c& a);

/// Werner state V |phi+><phi+| + (1 - V) I/4.
DensityMatrix werner_state(double visibility);

}  // namespace qstorage
