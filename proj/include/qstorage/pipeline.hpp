#pragma once

// Command implementations shared by the CLI and the acceptance tests. Each
// returns a JSON fragment of the report document.

#include "qstorage/afc_memory.hpp"
#include "qstorage/bell_chsh.hpp"
#include "qstorage/dataset.hpp"
#include "qstorage/source_model.hpp"
#include "qstorage/uncertainty.hpp"

#include <optional>
#include <string>

#include <json.hpp>

namespace qstorage::pipeline {

inline constexpr const char* kSchemaVersion = "1";

struct PipelineConfig {
  /// trials = 0 disables Monte-Carlo uncertainties.
  mc::McConfig mc{};
  tomo::MleConfig mle{};
  /// Assumed coincidences per setting for the after-storage datasets of a
  /// report; 0 uses mc.assumed_total_per_setting.
  double assumed_total_after_storage = 0.0;

  afc::AfcComb comb{};
  afc::StoreOptions store{};
  double mode_separation = 1.4e-9;

  source::SourceConfig source{0.7667, 5000.0, {0.0, 0.0}};
  bool memory = false;
  bool exact = false;

  /// Stamped into reports; empty omits the field.
  std::string timestamp;

  nlohmann::json to_json() const;
};

/// Fidelity to |phi+>, purity, concurrence, E_F, S_th and the Horodecki bound.
struct StateMetrics {
  double fidelity_phi_plus = 0.0;
  double purity = 0.0;
  double concurrence = 0.0;
  double entanglement_of_formation = 0.0;
  double s_theoretical = 0.0;
  double horodecki_max = 0.0;
};

StateMetrics state_metrics(const DensityMatrix& rho);

/// Loads a dataset, reporting failures with the dataset path.
data::Dataset load(const std::string& path);

nlohmann::json cmd_tomo(const std::string& dataset_path, const PipelineConfig& config);
nlohmann::json cmd_bell(const std::string& dataset_path, const PipelineConfig& config);

struct AfcOutputs {
  std::string echo_csv;  ///< empty skips the trace
  std::string comb_csv;
};
nlohmann::json cmd_afc(const PipelineConfig& config, const AfcOutputs& outputs = {});

/// Count dataset for the default simulation settings, drawn from the source
/// state (optionally passed through the memory's heralded channel on photon
/// two). Poisson draws use config.mc.seed unless config.exact.
data::Dataset cmd_simulate(const PipelineConfig& config);

struct ReportInputs {
  std::string tomography_in;
  std::string tomography_out;
  std::string bell_in;
  std::string bell_out;

  /// The shipped Table S1 / S2 fixtures under `fixture_dir`.
  static ReportInputs fixtures(const std::string& fixture_dir);
};

nlohmann::json cmd_report(const ReportInputs& inputs, const PipelineConfig& config);

}  // namespace qstorage::pipeline
