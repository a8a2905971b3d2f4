#include "qstorage/errors.hpp"
#include "qstorage/pipeline.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <ctime>
#include <fstream>
#include <iostream>

namespace {

using nlohmann::json;
using qstorage::pipeline::PipelineConfig;

std::string utc_now() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream os(out_path);
  if (!os) throw qstorage::MissingInput("cannot write '" + out_path + "'");
  os << text;
}

int fail(const std::string& command, const std::string& code, const std::string& message, int status) {
  json err{{"error", {{"command", command}, {"code", code}, {"message", message}}}};
  std::cerr << err.dump() << "\n";
  return status;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Time-bin entanglement storage analysis"};
  app.require_subcommand(1);
  app.set_config("--config", "", "Key-value configuration file; flags override it");

  PipelineConfig cfg;
  std::string dataset, out_path, echo_csv, comb_csv;
  std::string fixture_dir = QSTORAGE_FIXTURE_DIR;
  std::string tomo_in, tomo_out, bell_in, bell_out;
  bool no_timestamp = false;

  app.add_option("--seed", cfg.mc.seed, "RNG seed")->capture_default_str();
  app.add_option("--trials", cfg.mc.trials, "Monte-Carlo trials (0 disables)")->capture_default_str();
  app.add_option("--assumed-n", cfg.mc.assumed_total_per_setting,
                 "Coincidences per setting assumed for probability data")->capture_default_str();
  app.add_option("--assumed-n-out", cfg.assumed_total_after_storage,
                 "Coincidences per setting for after-storage data in reports (0 = --assumed-n)")
      ->capture_default_str();
  app.add_option("--threads", cfg.mc.threads, "Monte-Carlo worker threads (0 = all cores)")->capture_default_str();
  app.add_option("--restarts", cfg.mle.restarts, "MLE optimizer starts")->capture_default_str();
  app.add_option("--out", out_path, "Output file (default stdout)");
  app.add_flag("--no-timestamp", no_timestamp, "Omit generated_at from reports");

  app.add_option("--delta", cfg.comb.delta_hz, "Comb tooth spacing [Hz]")->capture_default_str();
  app.add_option("--finesse", cfg.comb.finesse, "Comb finesse")->capture_default_str();
  app.add_option("--d1", cfg.comb.d1, "Tooth optical depth")->capture_default_str();
  app.add_option("--d0", cfg.comb.d0, "Background optical depth")->capture_default_str();
  app.add_option("--bandwidth", cfg.comb.bandwidth_hz, "Comb bandwidth [Hz]")->capture_default_str();
  app.add_option("--pulse-width", cfg.store.pulse_rms_width, "Pulse intensity RMS width [s]")->capture_default_str();
  app.add_option("--samples", cfg.store.samples, "Time-grid samples")->capture_default_str();
  app.add_option("--dt", cfg.store.dt, "Time-grid step [s] (0 = automatic)")->capture_default_str();
  app.add_option("--mode-separation", cfg.mode_separation, "Time-bin separation [s]")->capture_default_str();

  app.add_option("--visibility", cfg.source.visibility, "Werner visibility")->capture_default_str();
  app.add_option("--pairs", cfg.source.pairs_per_setting, "Pairs per setting")->capture_default_str();
  app.add_option("--phase-a", cfg.source.analyzer_phase_offsets[0], "Analyzer one phase offset [rad]");
  app.add_option("--phase-b", cfg.source.analyzer_phase_offsets[1], "Analyzer two phase offset [rad]");
  app.add_flag("--memory", cfg.memory, "Store photon two in the memory");
  app.add_flag("--exact", cfg.exact, "Rounded expected counts instead of Poisson draws");

  app.add_option("--dataset", dataset, "Dataset JSON");
  app.add_option("--echo-csv", echo_csv, "Write the output field trace");
  app.add_option("--comb-csv", comb_csv, "Write the comb absorption profile");
  app.add_option("--fixtures", fixture_dir, "Directory with the Table S1/S2 fixtures")->capture_default_str();
  app.add_option("--tomo-in", tomo_in, "Tomography dataset before storage");
  app.add_option("--tomo-out", tomo_out, "Tomography dataset after storage");
  app.add_option("--bell-in", bell_in, "CHSH dataset before storage");
  app.add_option("--bell-out", bell_out, "CHSH dataset after storage");

  auto* tomo = app.add_subcommand("tomo", "Maximum-likelihood tomography of a dataset")->fallthrough();
  auto* bell = app.add_subcommand("bell", "CHSH analysis of a dataset")->fallthrough();
  auto* afc = app.add_subcommand("afc", "AFC echo simulation")->fallthrough();
  auto* simulate = app.add_subcommand("simulate", "Synthesize a count dataset")->fallthrough();
  auto* report = app.add_subcommand("report", "Full report from the four datasets")->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail("", "usage_error", e.what(), 2);
  }

  std::string command = app.get_subcommands().front()->get_name();
  try {
    if (!no_timestamp) cfg.timestamp = utc_now();
    json result;
    if (tomo->parsed()) {
      result = qstorage::pipeline::cmd_tomo(dataset, cfg);
    } else if (bell->parsed()) {
      result = qstorage::pipeline::cmd_bell(dataset, cfg);
    } else if (afc->parsed()) {
      result = qstorage::pipeline::cmd_afc(cfg, {echo_csv, comb_csv});
    } else if (simulate->parsed()) {
      emit(qstorage::data::serialize(qstorage::pipeline::cmd_simulate(cfg)), out_path);
      return 0;
    } else if (report->parsed()) {
      auto inputs = qstorage::pipeline::ReportInputs::fixtures(fixture_dir);
      if (!tomo_in.empty()) inputs.tomography_in = tomo_in;
      if (!tomo_out.empty()) inputs.tomography_out = tomo_out;
      if (!bell_in.empty()) inputs.bell_in = bell_in;
      if (!bell_out.empty()) inputs.bell_out = bell_out;
      result = qstorage::pipeline::cmd_report(inputs, cfg);
    }
    emit(result.dump(2) + "\n", out_path);
  } catch (const qstorage::Error& e) {
    return fail(command, e.code(), e.what(), 1);
  } catch (const std::exception& e) {
    return fail(command, "internal_error", e.what(), 1);
  }
  return 0;
}
