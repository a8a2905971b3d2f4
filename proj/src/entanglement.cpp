#include "qstorage/entanglement.hpp"

#include "qstorage/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>

namespace qstorage::ent {

double concurrence(const DensityMatrix& rho) {
  const Matrix4c yy = kron(pauli::y(), pauli::y());
  const Matrix4c& r = rho.matrix();
  const Matrix4c product = r * yy * r.conjugate() * yy;
  // Similar to a PSD matrix, but not Hermitian: use the general solver.
  Eigen::ComplexEigenSolver<Matrix4c> es(product, /*computeEigenvectors=*/false);
  if (es.info() != Eigen::Success) throw ContractViolation("concurrence eigensolver failed");
  std::array<double, 4> lambda{};
  for (int i = 0; i < 4; ++i) {
    const Complex ev = es.eigenvalues()(i);
    if (std::abs(ev.imag()) > 1e-9) {
      throw ContractViolation("spin-flip product has complex eigenvalue " +
                              std::to_string(ev.imag()));
    }
    lambda[static_cast<std::size_t>(i)] = ev.real() < 1e-12 ? 0.0 : std::sqrt(ev.real());
  }
  std::sort(lambda.begin(), lambda.end(), std::greater<>());
  return std::clamp(lambda[0] - lambda[1] - lambda[2] - lambda[3], 0.0, 1.0);
}

double binary_entropy(double x) {
  if (!(x >= 0.0 && x <= 1.0)) throw OutOfRange("binary entropy argument outside [0,1]");
  auto term = [](double p) { return p > 0.0 ? -p * std::log2(p) : 0.0; };
  return std::clamp(term(x) + term(1.0 - x), 0.0, 1.0);
}

double entanglement_of_formation_from_concurrence(double c) {
  c = std::clamp(c, 0.0, 1.0);
  return binary_entropy(0.5 + 0.5 * std::sqrt(std::max(0.0, 1.0 - c * c)));
}

double entanglement_of_formation(const DensityMatrix& rho) {
  return entanglement_of_formation_from_concurrence(concurrence(rho));
}

double s_theoretical_from_concurrence(double c) {
  c = std::clamp(c, 0.0, 1.0);
  return 2.0 * std::sqrt(1.0 + c * c);
}

double s_theoretical(const DensityMatrix& rho) { return s_theoretical_from_concurrence(concurrence(rho)); }

}  // namespace qstorage::ent
