#pragma once

#include "qstorage/quantum_core.hpp"

namespace qstorage::ent {

/// Wootters concurrence max{0, l1 - l2 - l3 - l4}, with l_i the decreasing
/// square roots of the eigenvalues of rho (sy x sy) rho* (sy x sy).
/// Eigenvalues below 1e-12 are clipped to 0; imaginary parts above 1e-9
/// throw ContractViolation.
double concurrence(const DensityMatrix& rho);

/// -x log2 x - (1-x) log2(1-x) with 0 log 0 = 0. Throws OutOfRange outside [0,1].
double binary_entropy(double x);

/// H(1/2 + sqrt(1 - C^2)/2) for a given concurrence.
double entanglement_of_formation_from_concurrence(double c);
double entanglement_of_formation(const DensityMatrix& rho);

/// 2 sqrt(1 + C^2).
double s_theoretical_from_concurrence(double c);
double s_theoretical(const DensityMatrix& rho);

}  // namespace qstorage::ent
