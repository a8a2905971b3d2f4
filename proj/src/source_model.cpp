#include "qstorage/source_model.hpp"

#include "qstorage/bell_chsh.hpp"
#include "qstorage/errors.hpp"

#include <cmath>

namespace qstorage::source {

void SourceConfig::validate() const {
  if (!(visibility >= 0.0 && visibility <= 1.0)) {
    throw ContractViolation("source visibility must lie in [0,1]");
  }
  if (!(pairs_per_setting > 0.0) || !std::isfinite(pairs_per_setting)) {
    throw ContractViolation("pairs_per_setting must be positive");
  }
  for (double phi : analyzer_phase_offsets) {
    if (!std::isfinite(phi)) throw ContractViolation("analyzer phase offset is not finite");
  }
}

DensityMatrix source_state(const SourceConfig& config) {
  config.validate();
  return werner_state(config.visibility);
}

std::vector<tomo::CoincidenceRecord> synthesize_counts(
    const DensityMatrix& rho, const std::vector<tomo::SettingPair>& settings,
    double pairs_per_setting, CountMode mode, std::mt19937_64* rng,
    const std::array<double, 2>& analyzer_phase_offsets) {
  if (!(pairs_per_setting > 0.0)) throw ContractViolation("pairs_per_setting must be positive");
  if (mode == CountMode::Poisson && rng == nullptr) {
    throw ContractViolation("Poisson synthesis needs a random stream");
  }
  std::vector<tomo::CoincidenceRecord> out;
  out.reserve(settings.size());
  for (const auto& pair : settings) {
    const MeasurementSetting a = pair.a.rotated_about_z(analyzer_phase_offsets[0]);
    const MeasurementSetting b = pair.b.rotated_about_z(analyzer_phase_offsets[1]);
    tomo::CoincidenceRecord rec{pair, {}};
    std::size_t k = 0;
    for (Sign sa : {Sign::Plus, Sign::Minus}) {
      for (Sign sb : {Sign::Plus, Sign::Minus}) {
        const double mean = pairs_per_setting * born_joint(rho, a, sa, b, sb);
        if (mode == CountMode::Exact) {
          rec.counts[k] = std::round(mean);
        } else if (mean > 0.0) {
          std::poisson_distribution<long long> dist(mean);
          rec.counts[k] = static_cast<double>(dist(*rng));
        }
        ++k;
      }
    }
    out.push_back(rec);
  }
  return out;
}

std::vector<tomo::SettingPair> default_simulation_settings() {
  std::vector<tomo::SettingPair> s = tomo::basis_setting_pairs();
  const auto chsh = bell::ChshSettings::maximal_violation();
  s.push_back({chsh.a, chsh.b});
  s.push_back({chsh.a, chsh.b_prime});
  s.push_back({chsh.a_prime, chsh.b});
  s.push_back({chsh.a_prime, chsh.b_prime});
  return s;
}

}  // namespace qstorage::source
