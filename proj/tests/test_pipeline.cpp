#include "qstorage/errors.hpp"
#include "qstorage/pipeline.hpp"

#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

using namespace qstorage;
using namespace qstorage::pipeline;
using nlohmann::json;

namespace {

std::string fixture(const char* name) { return std::string(QSTORAGE_FIXTURE_DIR) + "/" + name; }

PipelineConfig quick(int trials = 0) {
  PipelineConfig c;
  c.mc.trials = trials;
  return c;
}

std::string temp_path(const char* name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

}  // namespace

TEST_CASE("afc command summary") {
  const json j = cmd_afc(quick());
  CHECK(j["schema_version"] == "1");
  CHECK(j["afc"]["analytic_efficiency"].get<double>() == doctest::Approx(0.0097).epsilon(0.01));
  CHECK(std::abs(j["afc"]["echo_peak_time_s"].get<double>() - 5e-9) <= j["afc"]["grid"]["dt_s"].get<double>());
}

TEST_CASE("afc command writes traces") {
  const std::string echo = temp_path("qstorage_echo_test.csv");
  const std::string comb = temp_path("qstorage_comb_test.csv");
  cmd_afc(quick(), {echo, comb});
  std::ifstream e(echo), c(comb);
  std::string line;
  std::getline(e, line);
  CHECK(line == "t_seconds,re,im,abs2");
  std::getline(c, line);
  CHECK(line == "detuning_hz,optical_depth");
  std::remove(echo.c_str());
  std::remove(comb.c_str());
}

TEST_CASE("bell command on the fixtures") {
  CHECK(cmd_bell(fixture("table_s2_in.json"), quick())["bell"]["S"].get<double>() == doctest::Approx(2.382).epsilon(1e-9));
  CHECK(cmd_bell(fixture("table_s2_out.json"), quick())["bell"]["S"].get<double>() == doctest::Approx(2.332).epsilon(1e-9));
}

TEST_CASE("tomo command on the before-storage fixture") {
  const json j = cmd_tomo(fixture("table_s1_in.json"), quick());
  const auto& m = j["tomography"]["metrics"];
  CHECK(m["fidelity_phi_plus"].get<double>() == doctest::Approx(0.825).epsilon(0.02));
  CHECK(j["provenance"]["inputs"]["dataset"]["sha256"].get<std::string>().size() == 64);
  CHECK(j["tomography"]["rho"].size() == 4);
}

TEST_CASE("noiseless simulation loop") {
  PipelineConfig c = quick();
  c.source.visibility = 1.0;
  c.source.pairs_per_setting = 1e6;
  c.exact = true;
  const auto ds = cmd_simulate(c);
  const std::string path = temp_path("qstorage_sim_test.json");
  std::ofstream(path) << data::serialize(ds);
  const json j = cmd_tomo(path, c);
  CHECK(std::abs(j["tomography"]["metrics"]["fidelity_phi_plus"].get<double>() - 1.0) < 1e-6);
  const json b = cmd_bell(path, c);
  CHECK(b["bell"]["S"].get<double>() == doctest::Approx(2.0 * std::sqrt(2.0)).epsilon(1e-5));
  CHECK(b["bell"].contains("horodecki_max"));
  std::remove(path.c_str());
}

TEST_CASE("simulation is seeded") {
  PipelineConfig c = quick();
  c.mc.seed = 99;
  CHECK(data::to_json(cmd_simulate(c)) == data::to_json(cmd_simulate(c)));
  PipelineConfig d = c;
  d.mc.seed = 100;
  CHECK(data::to_json(cmd_simulate(c)) != data::to_json(cmd_simulate(d)));
}

TEST_CASE("errors carry command context") {
  CHECK_THROWS_AS(cmd_tomo("/nonexistent.json", quick()), MissingInput);
  CHECK_THROWS_AS(cmd_tomo("", quick()), MissingInput);
  CHECK_THROWS_WITH_AS(cmd_tomo(fixture("table_s2_in.json"), quick()), doctest::Contains("tomography of"),
                       AnalysisFailure);
  PipelineConfig bad = quick();
  bad.mode_separation = 6e-9;
  bad.memory = true;
  CHECK_THROWS_WITH_AS(cmd_simulate(bad), doctest::Contains("invalid_geometry"), AnalysisFailure);
}

TEST_CASE("reports are reproducible apart from the timestamp") {
  PipelineConfig c = quick(20);
  c.timestamp = "2026-01-01T00:00:00Z";
  json a = cmd_report(ReportInputs::fixtures(QSTORAGE_FIXTURE_DIR), c);
  c.timestamp = "2026-06-01T12:00:00Z";
  json b = cmd_report(ReportInputs::fixtures(QSTORAGE_FIXTURE_DIR), c);
  CHECK(a["generated_at"] != b["generated_at"]);
  a.erase("generated_at");
  b.erase("generated_at");
  CHECK(a.dump() == b.dump());
  CHECK(a["table1"].size() == 6);
  CHECK(a["provenance"]["inputs"].size() == 4);
  CHECK(a["uncertainties"]["metrics"].contains("input_output_fidelity"));
}
