#pragma once

// Werner-state surrogate for the entangled-pair source and a count
// synthesizer for arbitrary analyzer settings.

#include "qstorage/tomography.hpp"

#include <array>
#include <random>
#include <vector>

namespace qstorage::source {

struct SourceConfig {
  double visibility = 1.0;
  double pairs_per_setting = 5000.0;
  /// Rotation about z applied to the settings of analyzer one and two.
  std::array<double, 2> analyzer_phase_offsets{0.0, 0.0};

  /// Throws ContractViolation unless V in [0,1], pairs > 0 and the offsets are finite.
  void validate() const;
};

/// V |phi+><phi+| + (1-V) I/4.
DensityMatrix source_state(const SourceConfig& config);

enum class CountMode { Exact, Poisson };

/// Expected counts N tr[rho (P_{+-a} x P_{+-b})] for each setting pair;
/// exact mode rounds to the nearest integer, Poisson mode samples.
std::vector<tomo::CoincidenceRecord> synthesize_counts(
    const DensityMatrix& rho, const std::vector<tomo::SettingPair>& settings,
    double pairs_per_setting, CountMode mode, std::mt19937_64* rng = nullptr,
    const std::array<double, 2>& analyzer_phase_offsets = {0.0, 0.0});

/// Settings for a full dataset: the nine basis pairs followed by the four CHSH pairs.
std::vector<tomo::SettingPair> default_simulation_settings();

}  // namespace qstorage::source
