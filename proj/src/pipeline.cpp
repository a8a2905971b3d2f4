#include "qstorage/pipeline.hpp"

#include "qstorage/entanglement.hpp"
#include "qstorage/errors.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>

namespace qstorage::pipeline {

using nlohmann::json;

json PipelineConfig::to_json() const {
  return {
      {"seed", mc.seed},
      {"trials", mc.trials},
      {"assumed_total_per_setting", mc.assumed_total_per_setting},
      {"assumed_total_after_storage", assumed_total_after_storage},
      {"mle", {{"restarts", mle.restarts},
               {"restart_spread", mle.restart_spread},
               {"seed", mle.seed},
               {"max_iterations", mle.optimizer.max_iterations}}},
      {"comb", {{"delta_hz", comb.delta_hz},
                {"finesse", comb.finesse},
                {"d1", comb.d1},
                {"d0", comb.d0},
                {"bandwidth_hz", comb.bandwidth_hz},
                {"center_detuning_hz", comb.center_detuning_hz}}},
      {"pulse", {{"rms_width_s", store.pulse_rms_width},
                 {"samples", store.samples},
                 {"dt_s", store.dt}}},
      {"mode_separation_s", mode_separation},
      {"source", {{"visibility", source.visibility},
                  {"pairs_per_setting", source.pairs_per_setting},
                  {"analyzer_phase_offsets", source.analyzer_phase_offsets}}},
      {"memory", memory},
      {"exact", exact},
  };
}

StateMetrics state_metrics(const DensityMatrix& rho) {
  StateMetrics m;
  m.fidelity_phi_plus = fidelity(rho, DensityMatrix::from_pure(phi_plus()));
  m.purity = purity(rho);
  m.concurrence = ent::concurrence(rho);
  m.entanglement_of_formation = ent::entanglement_of_formation_from_concurrence(m.concurrence);
  m.s_theoretical = ent::s_theoretical_from_concurrence(m.concurrence);
  m.horodecki_max = bell::horodecki_max(rho);
  return m;
}

namespace {

json metrics_json(const StateMetrics& m) {
  return {{"fidelity_phi_plus", m.fidelity_phi_plus},
          {"purity", m.purity},
          {"concurrence", m.concurrence},
          {"entanglement_of_formation", m.entanglement_of_formation},
          {"s_theoretical", m.s_theoretical},
          {"horodecki_max", m.horodecki_max}};
}

json input_json(const std::string& path, const data::Dataset& ds) {
  return {{"path", path},
          {"sha256", data::sha256_file(path)},
          {"format", data::to_string(ds.format)},
          {"records", ds.records.size()}};
}

json mc_json(const mc::McReport& r) {
  json metrics = json::object();
  for (const auto& m : r.metrics) metrics[m.name] = {{"mean", m.mean}, {"std", m.std}};
  return {{"trials", r.trials},
          {"seed", r.seed},
          {"failed_trials", r.failed_trials},
          {"metrics", metrics}};
}

json provenance(const PipelineConfig& config, json inputs) {
  return {{"seed", config.mc.seed},
          {"trials", config.mc.trials},
          {"assumed_total_per_setting", config.mc.assumed_total_per_setting},
          {"inputs", std::move(inputs)},
          {"config", config.to_json()}};
}

json header(const char* command, const PipelineConfig& config) {
  json j{{"schema_version", kSchemaVersion}, {"command", command}};
  if (!config.timestamp.empty()) j["generated_at"] = config.timestamp;
  return j;
}

struct TomoRun {
  tomo::TomographyResult fit;
  double linear_min_eigenvalue = 0.0;
  StateMetrics metrics;
};

TomoRun reconstruct(const mc::RecordSet& records, const tomo::MleConfig& mle) {
  const double min_eig =
      tomo::linear_inversion(tomo::estimate_pauli_expectations(records)).min_eigenvalue;
  auto fit = tomo::mle_reconstruct(records, mle);
  const StateMetrics metrics = state_metrics(fit.rho);
  return TomoRun{std::move(fit), min_eig, metrics};
}

json tomo_json(const TomoRun& run) {
  return {{"rho", data::matrix_to_json(run.fit.rho.matrix())},
          {"metrics", metrics_json(run.metrics)},
          {"diagnostics",
           {{"neg_log_likelihood", run.fit.neg_log_likelihood},
            {"initializer_neg_log_likelihood", run.fit.initializer_neg_log_likelihood},
            {"iterations", run.fit.iterations},
            {"converged", run.fit.converged},
            {"best_restart", run.fit.best_restart},
            {"linear_inversion_min_eigenvalue", run.linear_min_eigenvalue}}}};
}

/// Single-start refit seeded with the unperturbed solution.
StateMetrics trial_metrics(const mc::RecordSet& records, const DensityMatrix& seed_state,
                           const tomo::MleConfig& base) {
  tomo::MleConfig cfg = base;
  cfg.restarts = 1;
  cfg.initial = seed_state;
  return state_metrics(tomo::mle_reconstruct(records, cfg).rho);
}

void append_state(mc::Metrics& out, const std::string& prefix, const StateMetrics& m) {
  out.emplace_back(prefix + "fidelity_phi_plus", m.fidelity_phi_plus);
  out.emplace_back(prefix + "purity", m.purity);
  out.emplace_back(prefix + "entanglement_of_formation", m.entanglement_of_formation);
  out.emplace_back(prefix + "s_theoretical", m.s_theoretical);
}

json bell_json(const bell::ChshResult& r) {
  json corr = json::array();
  for (const auto& c : r.correlations) corr.push_back({{"a", c.a_label}, {"b", c.b_label}, {"E", c.value}});
  return {{"correlations", corr}, {"S", r.s}};
}

template <class F>
auto with_context(const std::string& what, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const SchemaError&) {
    throw;
  } catch (const MissingInput&) {
    throw;
  } catch (const Error& e) {
    throw AnalysisFailure(what + ": [" + e.code() + "] " + e.what());
  }
}

}  // namespace

data::Dataset load(const std::string& path) {
  if (path.empty()) throw MissingInput("no dataset given");
  return data::load_dataset(path);
}

json cmd_tomo(const std::string& dataset_path, const PipelineConfig& config) {
  const data::Dataset ds = load(dataset_path);
  const auto records = ds.to_records(config.mc.assumed_total_per_setting);
  const TomoRun run = with_context("tomography of " + dataset_path,
                                   [&] { return reconstruct(records, config.mle); });
  json out = header("tomo", config);
  out["tomography"] = tomo_json(run);
  if (config.mc.trials > 0) {
    const auto report = mc::propagate({records}, config.mc, [&](const std::vector<mc::RecordSet>& d) {
      mc::Metrics m;
      append_state(m, "", trial_metrics(d[0], run.fit.rho, config.mle));
      return m;
    });
    out["uncertainties"] = mc_json(report);
  }
  out["provenance"] = provenance(config, {{"dataset", input_json(dataset_path, ds)}});
  return out;
}

json cmd_bell(const std::string& dataset_path, const PipelineConfig& config) {
  const data::Dataset ds = load(dataset_path);
  const auto records = ds.to_records(config.mc.assumed_total_per_setting);
  const auto chsh = with_context("CHSH evaluation of " + dataset_path,
                                 [&] { return bell::evaluate_chsh(records); });
  json out = header("bell", config);
  out["bell"] = bell_json(chsh);
  bool complete = true;
  try {
    tomo::check_informational_completeness(records);
  } catch (const IncompleteData&) {
    complete = false;
  }
  if (complete) {
    const TomoRun run = reconstruct(records, config.mle);
    out["bell"]["s_theoretical"] = run.metrics.s_theoretical;
    out["bell"]["horodecki_max"] = run.metrics.horodecki_max;
    out["bell"]["predicted_S"] = bell::predicted_s(run.fit.rho);
  }
  if (config.mc.trials > 0) {
    const auto report = mc::propagate({records}, config.mc, [](const std::vector<mc::RecordSet>& d) {
      return mc::Metrics{{"S", bell::evaluate_chsh(d[0]).s}};
    });
    out["uncertainties"] = mc_json(report);
  }
  out["provenance"] = provenance(config, {{"dataset", input_json(dataset_path, ds)}});
  return out;
}

namespace {

json afc_summary(const PipelineConfig& config, const AfcOutputs& outputs) {
  const afc::AfcComb& comb = config.comb;
  comb.validate();
  afc::TimeGrid grid = afc::default_grid(comb);
  grid.samples = config.store.samples;
  if (config.store.dt > 0.0) grid.dt = config.store.dt;
  const auto input = afc::gaussian_pulse(grid, 0.0, config.store.pulse_rms_width);
  const auto output = afc::propagate(comb, input);
  const auto echo = afc::analyze_echo(comb, input, output);
  const double tau = afc::storage_time(comb);
  const double eta = afc::analytic_efficiency(comb);

  const auto ensemble = afc::DickeEnsemble::from_comb(comb, input);
  std::vector<double> times;
  for (std::size_t i = 0; i < output.size(); ++i) {
    const double t = output.time(i);
    if (t >= echo.input_centroid + 0.5 * tau && t <= echo.input_centroid + 1.5 * tau) times.push_back(t);
  }
  const double dicke_peak = times.at(afc::dicke_peak_index(ensemble, times));

  json out{{"analytic_efficiency", eta},
           {"simulated_efficiency", echo.efficiency},
           {"efficiency_relative_difference", (echo.efficiency - eta) / eta},
           {"storage_time_s", tau},
           {"echo_peak_time_s", echo.echo_peak_time},
           {"echo_delay_s", echo.echo_delay},
           {"echo_rms_width_s", echo.echo_rms_width},
           {"transmitted_peak_time_s", echo.transmitted_peak_time},
           {"dicke_peak_time_s", dicke_peak},
           {"dicke_atoms", ensemble.size()},
           {"grid", {{"samples", grid.samples}, {"dt_s", grid.dt}, {"start_s", grid.start}}},
           {"pulse_rms_width_s", config.store.pulse_rms_width}};

  if (!outputs.echo_csv.empty()) {
    std::ofstream os(outputs.echo_csv);
    if (!os) throw MissingInput("cannot write '" + outputs.echo_csv + "'");
    afc::write_echo_csv(os, output, echo.input_centroid - 0.5e-9, echo.input_centroid + tau + 0.5e-9);
    out["echo_csv"] = outputs.echo_csv;
  }
  if (!outputs.comb_csv.empty()) {
    std::ofstream os(outputs.comb_csv);
    if (!os) throw MissingInput("cannot write '" + outputs.comb_csv + "'");
    const double half = comb.bandwidth_hz / 2.0 + comb.delta_hz;
    const std::size_t n = 8001;
    std::vector<double> f(n);
    for (std::size_t i = 0; i < n; ++i)
      f[i] = comb.center_detuning_hz - half + 2.0 * half * static_cast<double>(i) / static_cast<double>(n - 1);
    afc::write_comb_csv(os, f, afc::comb_profile(comb, f));
    out["comb_csv"] = outputs.comb_csv;
  }
  return out;
}

}  // namespace

json cmd_afc(const PipelineConfig& config, const AfcOutputs& outputs) {
  json out = header("afc", config);
  out["afc"] = with_context("AFC simulation", [&] { return afc_summary(config, outputs); });
  out["provenance"] = provenance(config, json::object());
  return out;
}

data::Dataset cmd_simulate(const PipelineConfig& config) {
  return with_context("simulation", [&] {
    DensityMatrix rho = source::source_state(config.source);
    std::string description = "simulated source, visibility " + std::to_string(config.source.visibility);
    if (config.memory) {
      const auto channel = afc::memory_channel(config.comb, config.mode_separation, config.store);
      rho = afc::apply_to_second_qubit(rho, channel);
      description += ", photon two stored in the memory";
    }
    std::mt19937_64 rng(config.mc.seed);
    const auto records = source::synthesize_counts(
        rho, source::default_simulation_settings(), config.source.pairs_per_setting,
        config.exact ? source::CountMode::Exact : source::CountMode::Poisson, &rng,
        config.source.analyzer_phase_offsets);
    return data::dataset_from_counts(records, description);
  });
}

ReportInputs ReportInputs::fixtures(const std::string& dir) {
  const std::filesystem::path d(dir);
  return {(d / "table_s1_in.json").string(), (d / "table_s1_out.json").string(),
          (d / "table_s2_in.json").string(), (d / "table_s2_out.json").string()};
}

json cmd_report(const ReportInputs& inputs, const PipelineConfig& config) {
  const double n = config.mc.assumed_total_per_setting;
  const double n_after =
      config.assumed_total_after_storage > 0.0 ? config.assumed_total_after_storage : n;
  const data::Dataset ds_tin = load(inputs.tomography_in);
  const data::Dataset ds_tout = load(inputs.tomography_out);
  const data::Dataset ds_bin = load(inputs.bell_in);
  const data::Dataset ds_bout = load(inputs.bell_out);
  std::vector<mc::RecordSet> sets{ds_tin.to_records(n), ds_tout.to_records(n_after),
                                  ds_bin.to_records(n), ds_bout.to_records(n_after)};

  const TomoRun tin = with_context("tomography of " + inputs.tomography_in,
                                   [&] { return reconstruct(sets[0], config.mle); });
  const TomoRun tout = with_context("tomography of " + inputs.tomography_out,
                                    [&] { return reconstruct(sets[1], config.mle); });
  const double io_fidelity = fidelity(tin.fit.rho, tout.fit.rho);
  const auto bin = with_context("CHSH evaluation of " + inputs.bell_in,
                                [&] { return bell::evaluate_chsh(sets[2]); });
  const auto bout = with_context("CHSH evaluation of " + inputs.bell_out,
                                 [&] { return bell::evaluate_chsh(sets[3]); });

  json out = header("report", config);
  out["tomography"] = {{"in", tomo_json(tin)},
                       {"out", tomo_json(tout)},
                       {"input_output_fidelity", io_fidelity}};
  out["bell"] = {{"in", bell_json(bin)}, {"out", bell_json(bout)}};
  out["bell"]["in"]["s_theoretical"] = tin.metrics.s_theoretical;
  out["bell"]["in"]["horodecki_max"] = tin.metrics.horodecki_max;
  out["bell"]["out"]["s_theoretical"] = tout.metrics.s_theoretical;
  out["bell"]["out"]["horodecki_max"] = tout.metrics.horodecki_max;
  out["afc"] = with_context("AFC simulation", [&] { return afc_summary(config, {}); });

  std::optional<mc::McReport> unc;
  if (config.mc.trials > 0) {
    unc = mc::propagate(sets, config.mc, [&](const std::vector<mc::RecordSet>& d) {
      mc::Metrics m;
      const tomo::MleConfig single = [&] {
        tomo::MleConfig c = config.mle;
        c.restarts = 1;
        return c;
      }();
      tomo::MleConfig cin = single, cout_ = single;
      cin.initial = tin.fit.rho;
      cout_.initial = tout.fit.rho;
      const DensityMatrix rin = tomo::mle_reconstruct(d[0], cin).rho;
      const DensityMatrix rout = tomo::mle_reconstruct(d[1], cout_).rho;
      append_state(m, "in.", state_metrics(rin));
      append_state(m, "out.", state_metrics(rout));
      m.emplace_back("input_output_fidelity", fidelity(rin, rout));
      m.emplace_back("in.S", bell::evaluate_chsh(d[2]).s);
      m.emplace_back("out.S", bell::evaluate_chsh(d[3]).s);
      return m;
    });
    out["uncertainties"] = mc_json(*unc);
  }

  auto cell = [&](double value, const std::string& metric) {
    json c{{"value", value}};
    if (unc) c["std"] = unc->at(metric).std;
    return c;
  };
  auto row = [&](const char* quantity, double before, double after, const std::string& key) {
    return json{{"quantity", quantity},
                {"before_storage", cell(before, "in." + key)},
                {"after_storage", cell(after, "out." + key)}};
  };
  json table = json::array();
  table.push_back(row("Fidelity with |phi+>", tin.metrics.fidelity_phi_plus, tout.metrics.fidelity_phi_plus,
                      "fidelity_phi_plus"));
  table.push_back(row("Purity", tin.metrics.purity, tout.metrics.purity, "purity"));
  table.push_back({{"quantity", "Input/Output fidelity"}, {"both", cell(io_fidelity, "input_output_fidelity")}});
  table.push_back(row("Entanglement of formation", tin.metrics.entanglement_of_formation,
                      tout.metrics.entanglement_of_formation, "entanglement_of_formation"));
  table.push_back(row("Expected S_th", tin.metrics.s_theoretical, tout.metrics.s_theoretical, "s_theoretical"));
  table.push_back(row("Measured S", bin.s, bout.s, "S"));
  out["table1"] = table;

  out["provenance"] = provenance(config, {{"tomography_in", input_json(inputs.tomography_in, ds_tin)},
                                          {"tomography_out", input_json(inputs.tomography_out, ds_tout)},
                                          {"bell_in", input_json(inputs.bell_in, ds_bin)},
                                          {"bell_out", input_json(inputs.bell_out, ds_bout)}});
  return out;
}

}  // namespace qstorage::pipeline
