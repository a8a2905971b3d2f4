#pragma once

// Coincidence records, normalized joint-detection probabilities and
// maximum-likelihood reconstruction of the two-photon density matrix.

#include "qstorage/nelder_mead.hpp"
#include "qstorage/quantum_core.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace qstorage::tomo {

/// Base observables measured on photon one (a) and photon two (b).
struct SettingPair {
  MeasurementSetting a;
  MeasurementSetting b;
};

/// Index into CoincidenceRecord::counts.
enum CountIndex : std::size_t { kPlusPlus = 0, kPlusMinus = 1, kMinusPlus = 2, kMinusMinus = 3 };

/// Detected pairs C(a,b), C(a,-b), C(-a,b), C(-a,-b). Counts are stored as
/// doubles so that expected (possibly fractional) counts share the type;
/// measured and resampled counts are integral.
struct CoincidenceRecord {
  SettingPair settings;
  std::array<double, 4> counts{};

  double total() const { return counts[0] + counts[1] + counts[2] + counts[3]; }
  double plus_half() const { return counts[0] + counts[1]; }
  double minus_half() const { return counts[2] + counts[3]; }
  /// Throws ContractViolation on negative or non-finite counts.
  void validate() const;
};

/// C(a,b) / (C(a,b) + C(a,-b)). Throws InsufficientData on a zero sum.
double normalized_probability(double c_ab, double c_a_negb);

/// tr[rho (P_a x P_b)] / tr[rho (P_a x I)]. Throws DegenerateSetting when the
/// conditioning probability is at most 1e-12.
double expected_conditional(const DensityMatrix& rho, const MeasurementSetting& a, Sign sa,
                            const MeasurementSetting& b, Sign sb);

/// Two-qubit Pauli table t(i,j) = <sigma_i x sigma_j>, indices 0 = I, 1..3 =
/// x, y, z. t(0,0) is fixed at 1.
using PauliTable = Eigen::Matrix4d;

struct LinearInversionResult {
  Matrix4c rho;
  double min_eigenvalue = 0.0;
  bool non_physical = false;  ///< min eigenvalue below -1e-6
};

/// rho = 1/4 sum_ij t(i,j) sigma_i x sigma_j. Throws OutOfRange when any of
/// the 15 non-trivial entries leaves [-1, 1] by more than 1e-12.
LinearInversionResult linear_inversion(const PauliTable& expectations);
/// Same, from the 15 values in row-major order with the (I,I) entry omitted.
LinearInversionResult linear_inversion(std::span<const double, 15> expectations);

/// Pauli table estimated from records whose settings lie along coordinate
/// axes. Correlations come from full records (or the measured half of
/// one-sided records); local terms only from records with both halves.
/// Entries with no data are 0.
PauliTable estimate_pauli_expectations(std::span<const CoincidenceRecord> records);

/// Throws IncompleteData unless the measured direction pairs span all nine
/// correlation components and both local Bloch spaces.
void check_informational_completeness(std::span<const CoincidenceRecord> records);

/// Negative log-likelihood of a state given coincidence records. Each record
/// contributes the binomial splits C(a,b) vs C(a,-b) and C(-a,b) vs C(-a,-b)
/// conditioned on photon one's outcome; records whose first setting is a
/// z pole also contribute the split of photon one's outcome.
class LikelihoodModel {
 public:
  explicit LikelihoodModel(std::span<const CoincidenceRecord> records);

  double operator()(const Matrix4c& rho) const;
  double operator()(const DensityMatrix& rho) const { return (*this)(rho.matrix()); }

 private:
  struct Term {
    std::array<Matrix4c, 4> effects;  // conjugated, for tr(rho E) = sum rho .* conj(E)
    std::array<double, 4> counts;
    bool split_first = false;
  };
  std::vector<Term> terms_;
};

/// rho = T^dagger T / tr(T^dagger T) with T lower triangular: 4 real diagonal
/// entries followed by (re, im) of the 6 sub-diagonal entries, row by row.
Matrix4c state_from_cholesky_parameters(const Eigen::VectorXd& params);
/// Inverse of the above for a full-rank state; rank-deficient states are
/// mixed with 1e-6 of I/4 first.
Eigen::VectorXd cholesky_parameters_from_state(const DensityMatrix& rho);

struct MleConfig {
  /// Number of optimizer starts. Start 0 is the initializer itself, the
  /// others perturb its parameters with N(0, restart_spread) noise.
  int restarts = 5;
  double restart_spread = 0.1;
  std::uint64_t seed = 0x5eed;
  NelderMeadOptions optimizer{};
  /// Replaces the PSD-projected linear-inversion initializer.
  std::optional<DensityMatrix> initial;
};

struct TomographyResult {
  DensityMatrix rho;
  double neg_log_likelihood = 0.0;
  int iterations = 0;
  bool converged = false;
  int best_restart = 0;
  double initializer_neg_log_likelihood = 0.0;
};

/// Maximum-likelihood state. Throws IncompleteData for insufficient settings
/// and InsufficientData when no record carries counts. When the iteration
/// budget runs out the best state so far is returned with converged = false.
TomographyResult mle_reconstruct(std::span<const CoincidenceRecord> records,
                                 const MleConfig& config = {});

/// The nine (a, b) pairs with a, b in {x, y, z}.
std::vector<SettingPair> basis_setting_pairs();

}  // namespace qstorage::tomo
