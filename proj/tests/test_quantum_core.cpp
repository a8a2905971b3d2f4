#include "qstorage/errors.hpp"
#include "qstorage/quantum_core.hpp"
#include "test_support.hpp"

#include <doctest.h>

#include <numbers>
#include <random>

using namespace qstorage;
using testing_support::random_amplitudes;
using testing_support::random_state;

namespace {

DensityMatrix phi() { return DensityMatrix::from_pure(phi_plus()); }

DensityMatrix basis_state(int k) {
  Vector4c v = Vector4c::Zero();
  v(k) = 1.0;
  return DensityMatrix::from_pure(PureState::from_amplitudes(v));
}

MeasurementSetting s(const char* label) { return MeasurementSetting::from_label(label); }

}  // namespace

TEST_CASE("phi_plus amplitudes") {
  const auto& a = phi_plus().amplitudes();
  CHECK(std::norm(a(0)) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(std::abs(a(1)) == 0.0);
  CHECK(std::abs(a(2)) == 0.0);
  CHECK(fidelity(phi(), phi()) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("phi_plus sigma_x sigma_x expectation by hand") {
  // <phi+| X x X |phi+>: X x X swaps |ee> <-> |ll>, so the overlap is 1.
  Matrix4c xx = Matrix4c::Zero();
  xx(0, 3) = xx(3, 0) = xx(1, 2) = xx(2, 1) = 1.0;
  CHECK(expectation(phi(), xx) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK((kron(pauli::x(), pauli::x()) - xx).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("pure state normalization is enforced") {
  CHECK_THROWS_AS(PureState::from_amplitudes(Vector4c(1, 1, 0, 0)), ContractViolation);
}

TEST_CASE("density matrix validation") {
  Matrix4c m = Matrix4c::Identity() / 4.0;
  m(0, 1) = 0.1;
  CHECK_THROWS_AS(DensityMatrix::from_matrix(m), ContractViolation);
  CHECK_THROWS_AS(DensityMatrix::from_matrix(Matrix4c::Identity() / 2.0), ContractViolation);
  Matrix4c neg = Matrix4c::Zero();
  neg(0, 0) = 1.2;
  neg(1, 1) = -0.2;
  CHECK_THROWS_AS(DensityMatrix::from_matrix(neg), ContractViolation);
}

TEST_CASE("projector examples") {
  const Matrix2c pz = projector(s("z"), Sign::Plus);
  CHECK(std::abs(pz(0, 0) - 1.0) < 1e-15);
  CHECK(std::abs(pz(1, 1)) < 1e-15);
  const Matrix2c px = projector(s("x"), Sign::Plus);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) CHECK(std::abs(px(i, j) - 0.5) < 1e-15);
  // (|e> + i|l>)/sqrt2
  const Vector2c v(1.0 / std::sqrt(2.0), Complex(0, 1.0 / std::sqrt(2.0)));
  const Matrix2c py = projector(s("y"), Sign::Plus);
  CHECK((py - v * v.adjoint()).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("projector properties") {
  std::mt19937_64 rng(1);
  for (int k = 0; k < 50; ++k) {
    const auto setting = MeasurementSetting::from_bloch(testing_support::random_direction(rng));
    const Matrix2c p = projector(setting, Sign::Plus);
    const Matrix2c m = projector(setting, Sign::Minus);
    CHECK((p + m - Matrix2c::Identity()).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((p * p - p).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(std::abs(p.trace() - 1.0) < 1e-12);
    CHECK(std::abs(p.determinant()) < 1e-12);  // rank 1
  }
}

TEST_CASE("born_joint examples") {
  CHECK(born_joint(phi(), s("x"), Sign::Plus, s("x"), Sign::Plus) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(born_joint(phi(), s("z"), Sign::Plus, s("z"), Sign::Minus) == doctest::Approx(0.0));
  const auto mixed = DensityMatrix::maximally_mixed();
  CHECK(born_joint(mixed, s("x+y"), Sign::Minus, s("z"), Sign::Plus) == doctest::Approx(0.25));
}

TEST_CASE("born_joint sums to one") {
  std::mt19937_64 rng(2);
  for (int k = 0; k < 50; ++k) {
    const auto rho = random_state(rng);
    const auto a = MeasurementSetting::from_bloch(testing_support::random_direction(rng));
    const auto b = MeasurementSetting::from_bloch(testing_support::random_direction(rng));
    double total = 0.0;
    for (Sign sa : {Sign::Plus, Sign::Minus})
      for (Sign sb : {Sign::Plus, Sign::Minus}) total += born_joint(rho, a, sa, b, sb);
    CHECK(std::abs(total - 1.0) < 1e-9);
  }
}

TEST_CASE("fidelity examples") {
  std::mt19937_64 rng(3);
  const auto rho = random_state(rng);
  CHECK(fidelity(rho, rho) == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(fidelity(basis_state(0), basis_state(3)) == doctest::Approx(0.0));
  // (1 + 3V)/4
  CHECK(fidelity(werner_state(0.7667), phi()) == doctest::Approx(0.825).epsilon(1e-3));
  CHECK(fidelity(werner_state(0.7667), phi()) == doctest::Approx((1 + 3 * 0.7667) / 4).epsilon(1e-10));
}

TEST_CASE("fidelity of pure states is the squared overlap") {
  std::mt19937_64 rng(4);
  for (int k = 0; k < 100; ++k) {
    const Vector4c a = random_amplitudes(rng);
    const Vector4c b = random_amplitudes(rng);
    const double overlap = std::norm(a.dot(b));
    const auto ra = DensityMatrix::from_pure(PureState::from_amplitudes(a));
    const auto rb = DensityMatrix::from_pure(PureState::from_amplitudes(b));
    CHECK(std::abs(fidelity(ra, rb) - overlap) < 1e-8);
  }
}

TEST_CASE("fidelity is symmetric") {
  std::mt19937_64 rng(5);
  for (int k = 0; k < 30; ++k) {
    const auto a = random_state(rng);
    const auto b = random_state(rng);
    CHECK(std::abs(fidelity(a, b) - fidelity(b, a)) < 1e-8);
  }
}

TEST_CASE("purity examples and bounds") {
  CHECK(purity(phi()) == doctest::Approx(1.0));
  CHECK(purity(DensityMatrix::maximally_mixed()) == doctest::Approx(0.25));
  const double v = 0.7667;
  CHECK(purity(werner_state(v)) ==
        doctest::Approx(v * v + v * (1 - v) / 2 + (1 - v) * (1 - v) / 4).epsilon(1e-12));
  CHECK(purity(werner_state(v)) == doctest::Approx(0.6908).epsilon(2e-4));
  std::mt19937_64 rng(6);
  for (int k = 0; k < 50; ++k) {
    const double p = purity(random_state(rng));
    CHECK(p <= 1.0 + 1e-12);
    CHECK(p >= 0.25 - 1e-12);
  }
}

TEST_CASE("physical projection clips negative eigenvalues") {
  Matrix4c m = testing_support::werner_matrix(1.0);
  m(1, 1) = -0.05;
  m(0, 0) += 0.05;
  const auto rho = DensityMatrix::project_physical(m);
  Eigen::SelfAdjointEigenSolver<Matrix4c> es(rho.matrix());
  CHECK(es.eigenvalues().minCoeff() >= -1e-12);
  CHECK(std::abs(rho.matrix().trace().real() - 1.0) < 1e-12);
}

TEST_CASE("setting labels") {
  CHECK(s("x+y").bloch().isApprox(Eigen::Vector3d(1, 1, 0).normalized()));
  CHECK(s("x-y").bloch().isApprox(Eigen::Vector3d(1, -1, 0).normalized()));
  CHECK(s("-z").bloch().isApprox(Eigen::Vector3d(0, 0, -1)));
  CHECK_THROWS_WITH_AS(s("w"), doctest::Contains("'w'"), SchemaError);
  CHECK_THROWS_AS(MeasurementSetting::from_bloch(Eigen::Vector3d(1, 1, 0)), ContractViolation);
}

TEST_CASE("time-bin angles of a setting") {
  const auto y = s("y");
  CHECK(y.polar() == doctest::Approx(std::numbers::pi / 2));
  CHECK(y.azimuth() == doctest::Approx(std::numbers::pi / 2));
  const Vector2c e = y.eigenstate();
  CHECK(std::abs(e(1) - Complex(0, 1) * e(0)) < 1e-12);
}
