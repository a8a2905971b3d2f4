#pragma once

// Correlation coefficients, CHSH S-values and their quantum predictions.

#include "qstorage/tomography.hpp"

#include <array>
#include <optional>
#include <span>
#include <string>

namespace qstorage::bell {

struct ChshSettings {
  MeasurementSetting a;
  MeasurementSetting a_prime;
  MeasurementSetting b;
  MeasurementSetting b_prime;

  /// a = y, a' = x, b = (x - y)/sqrt2, b' = (x + y)/sqrt2: reaches 2 sqrt2 on
  /// |phi+> with the sign pattern of chsh_s().
  static ChshSettings maximal_violation();
};

/// (C(a,b) - C(a,-b) - C(-a,b) + C(-a,-b)) / total. Throws InsufficientData
/// on an empty record.
double correlation_from_counts(const tomo::CoincidenceRecord& record);

/// tr[rho (a.sigma x b.sigma)].
double expected_correlation(const DensityMatrix& rho, const MeasurementSetting& a,
                            const MeasurementSetting& b);

/// |E(a,b) - E(a,b') + E(a',b) + E(a',b')|. Throws OutOfRange when an input
/// leaves [-1, 1].
double chsh_s(double e_ab, double e_abp, double e_apb, double e_apbp);

/// 2 sqrt(t1^2 + t2^2) from the two largest singular values of the 3x3
/// correlation matrix T_ij = tr[rho s_i x s_j].
double horodecki_max(const DensityMatrix& rho);

struct CorrelationEntry {
  std::string a_label;
  std::string b_label;
  double value = 0.0;
};

struct ChshResult {
  /// In chsh_s() argument order: (a,b), (a,b'), (a',b), (a',b').
  std::array<CorrelationEntry, 4> correlations;
  double s = 0.0;
};

/// Picks the records measured at the four CHSH setting pairs (within 1e-9 of
/// the Bloch directions) and evaluates S. Throws MissingInput when a pair is
/// absent. A record measured at a negated setting enters with flipped sign.
ChshResult evaluate_chsh(std::span<const tomo::CoincidenceRecord> records,
                         const ChshSettings& settings = ChshSettings::maximal_violation());

/// Predicted CHSH value of `rho` under the given settings.
double predicted_s(const DensityMatrix& rho,
                   const ChshSettings& settings = ChshSettings::maximal_violation());

}  // namespace qstorage::bell
