#include "qstorage/afc_memory.hpp"
#include "qstorage/errors.hpp"
#include "test_support.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

using namespace qstorage;
using namespace qstorage::afc;

namespace {

double closed_form_efficiency(double f, double d1, double d0) {
  const double x = d1 / f;
  return x * x * std::exp(-x) * std::exp(-7.0 / (f * f)) * std::exp(-d0);
}

/// Teeth tiled far beyond the 50 ps pulse spectrum.
AfcComb flat_comb() {
  AfcComb c;
  c.bandwidth_hz = 16e9;
  return c;
}

AfcComb comb_with(double delta, double finesse = 2.0, double d1 = 1.0, double d0 = 1.0) {
  AfcComb c;
  c.delta_hz = delta;
  c.finesse = finesse;
  c.d1 = d1;
  c.d0 = d0;
  return c;
}

}  // namespace

TEST_CASE("storage time is the inverse tooth spacing") {
  CHECK(storage_time(comb_with(200e6)) == doctest::Approx(5e-9).epsilon(1e-12));
  CHECK(storage_time(comb_with(1e9)) == doctest::Approx(1e-9).epsilon(1e-12));
  CHECK(storage_time(comb_with(28.57e6)) == doctest::Approx(35e-9).epsilon(1e-4));
}

TEST_CASE("analytic efficiency examples") {
  CHECK(analytic_efficiency(comb_with(200e6, 2, 1, 1.0)) == doctest::Approx(0.00969).epsilon(1e-3));
  CHECK(analytic_efficiency(comb_with(200e6, 2, 1, 1.3)) == doctest::Approx(0.00718).epsilon(1e-3));
  CHECK(analytic_efficiency(comb_with(200e6, 2, 0, 0.5)) == 0.0);
  CHECK(analytic_efficiency(comb_with(200e6, 3.5, 2.2, 0.4)) ==
        doctest::Approx(closed_form_efficiency(3.5, 2.2, 0.4)).epsilon(1e-12));
}

TEST_CASE("analytic efficiency decreases with background depth") {
  double prev = 1.0;
  for (int i = 0; i <= 20; ++i) {
    const double eta = analytic_efficiency(comb_with(200e6, 2, 1, 0.1 * i));
    CHECK(eta < prev);
    prev = eta;
  }
}

TEST_CASE("comb validation") {
  CHECK_THROWS_AS(comb_with(0.0).validate(), ContractViolation);
  CHECK_THROWS_AS(comb_with(200e6, 0.5).validate(), ContractViolation);
  CHECK_THROWS_AS(comb_with(200e6, 2, -1).validate(), ContractViolation);
  AfcComb narrow = comb_with(200e6);
  narrow.bandwidth_hz = 100e6;
  CHECK_THROWS_AS(narrow.validate(), ContractViolation);
}

TEST_CASE("comb profile in the isolated-tooth limit") {
  const AfcComb c = comb_with(200e6, 50.0, 1.0, 0.3);
  const std::vector<double> f{0.0, 100e6, 200e6, -1.1e9};
  const auto od = comb_profile(c, f);
  CHECK(od[0] == doctest::Approx(1.3).epsilon(1e-9));
  CHECK(std::abs(od[1] - 0.3) < 1e-6);
  CHECK(od[2] == doctest::Approx(1.3).epsilon(1e-9));
  CHECK(std::abs(od[3] - 0.3) < 1e-6);
}

TEST_CASE("comb profile tooth width matches the finesse") {
  const AfcComb c = comb_with(200e6, 10.0, 1.0, 0.0);
  const double step = 1e5;
  std::vector<double> f;
  for (double x = -100e6; x <= 100e6; x += step) f.push_back(x);
  const auto od = comb_profile(c, f);
  double lo = 0, hi = 0;
  bool inside = false;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const bool above = od[i] >= 0.5 * (od[f.size() / 2]);
    if (above && !inside) lo = f[i];
    if (!above && inside) hi = f[i - 1];
    inside = above;
  }
  CHECK(std::abs((hi - lo) - c.tooth_fwhm_hz()) <= 2 * step);
}

TEST_CASE("transparent medium leaves the pulse unchanged") {
  const AfcComb c = comb_with(200e6, 2.0, 0.0, 0.0);
  TimeGrid grid = default_grid(c);
  grid.samples = std::size_t{1} << 18;
  const auto in = gaussian_pulse(grid, 0.0, 50e-12);
  const auto out = propagate(c, in);
  double dev = 0.0;
  for (std::size_t i = 0; i < in.size(); ++i) dev = std::max(dev, std::abs(out.samples[i] - in.samples[i]));
  CHECK(dev < 1e-9);
}

TEST_CASE("gaussian pulse has the requested moments") {
  const TimeGrid grid = default_grid(comb_with(200e6));
  const auto p = gaussian_pulse(grid, 0.3e-9, 50e-12);
  CHECK(p.energy() == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(p.centroid() == doctest::Approx(0.3e-9).epsilon(1e-9));
  CHECK(p.rms_width() == doctest::Approx(50e-12).epsilon(1e-6));
}

TEST_CASE("echo of a 50 ps pulse in a 200 MHz comb") {
  const AfcComb c = comb_with(200e6);
  const TimeGrid grid = default_grid(c);
  const auto in = gaussian_pulse(grid, 0.0, 50e-12);
  const auto out = propagate(c, in);
  const auto echo = analyze_echo(c, in, out);
  CHECK(std::abs(echo.echo_peak_time - 5e-9) <= grid.dt);
  CHECK(std::abs(echo.transmitted_peak_time) <= grid.dt);
  const double eta = analytic_efficiency(c);
  CHECK(std::abs(echo.efficiency - eta) / eta < 0.25);
  CHECK(echo.output_energy <= echo.input_energy + 1e-9);
}

TEST_CASE("echo delay tracks the storage time") {
  for (double delta : {100e6, 200e6, 500e6}) {
    CAPTURE(delta);
    const AfcComb c = comb_with(delta);
    const TimeGrid grid = default_grid(c);
    const auto in = gaussian_pulse(grid, 0.0, 50e-12);
    const auto echo = analyze_echo(c, in, propagate(c, in));
    CHECK(std::abs(echo.echo_delay - storage_time(c)) <= grid.dt);
  }
}

TEST_CASE("propagation never creates energy") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 3.0);
  for (int k = 0; k < 5; ++k) {
    const AfcComb c = comb_with(200e6, 1.0 + u(rng), u(rng), u(rng));
    TimeGrid grid = default_grid(c);
    grid.samples = std::size_t{1} << 18;
    const auto in = gaussian_pulse(grid, 0.0, 60e-12);
    const auto out = propagate(c, in);
    CHECK(out.energy() <= in.energy() + 1e-9);
  }
}

TEST_CASE("propagate sizing errors") {
  const AfcComb c = comb_with(200e6);
  TimeGrid short_grid = default_grid(c);
  short_grid.samples = 128;
  CHECK_THROWS_AS(propagate(c, gaussian_pulse(short_grid, 0.0, 50e-12)), SizingError);
  TimeGrid grid = default_grid(c);
  grid.samples = std::size_t{1} << 18;
  CHECK_THROWS_AS(propagate(c, gaussian_pulse(grid, 0.0, 5e-12)), SizingError);
}

TEST_CASE("dicke amplitude with aligned phases") {
  std::vector<DickeEnsemble::Atom> atoms;
  const double c = 1.0 / std::sqrt(16.0);
  for (int j = 0; j < 16; ++j) atoms.push_back({j * 200e6, c, 0.0});
  const auto ens = DickeEnsemble::from_atoms(atoms);
  CHECK(std::abs(dicke_amplitude(ens, 0.0)) == doctest::Approx(16 * c).epsilon(1e-12));
  for (double t : {0.3e-9, 1.7e-9, 2.5e-9})
    CHECK(std::abs(dicke_amplitude(ens, t)) < 16 * c);
}

TEST_CASE("dicke rephasing on a comb grid and dephasing off it") {
  const std::size_t n = 10000;
  const double delta = 200e6;
  const double c = 1.0 / std::sqrt(static_cast<double>(n));
  std::vector<DickeEnsemble::Atom> grid_atoms, random_atoms;
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(-4e9, 4e9);
  for (std::size_t j = 0; j < n; ++j) {
    grid_atoms.push_back({(static_cast<double>(j % 40) - 20.0) * delta, c, 0.0});
    random_atoms.push_back({u(rng), c, 0.0});
  }
  const auto g = DickeEnsemble::from_atoms(grid_atoms);
  const auto r = DickeEnsemble::from_atoms(random_atoms);
  const double tau = 1.0 / delta;
  CHECK(std::abs(std::abs(dicke_amplitude(g, tau)) - std::abs(dicke_amplitude(g, 0.0))) < 1e-9);
  // Brute-force reference for the revival.
  Complex ref{};
  for (const auto& a : grid_atoms) ref += a.amplitude * std::exp(Complex(0, 2 * std::numbers::pi * a.detuning_hz * tau));
  CHECK(std::abs(ref - dicke_amplitude(g, tau)) < 1e-9);
  CHECK(std::norm(dicke_amplitude(r, tau)) * 10.0 < std::norm(dicke_amplitude(g, tau)));
}

TEST_CASE("dicke ensemble normalization is enforced") {
  CHECK_THROWS_AS(DickeEnsemble::from_atoms({{0.0, 0.5, 0.0}}), ContractViolation);
}

TEST_CASE("dicke sum peaks in the echo time bin") {
  const AfcComb c = comb_with(200e6);
  const TimeGrid grid = default_grid(c);
  const auto in = gaussian_pulse(grid, 0.0, 50e-12);
  const auto out = propagate(c, in);
  const auto echo = analyze_echo(c, in, out);
  const auto ens = DickeEnsemble::from_comb(c, in);
  std::vector<double> times;
  for (std::size_t i = echo.echo_peak_index - 40; i <= echo.echo_peak_index + 40; ++i) times.push_back(out.time(i));
  CHECK(std::abs(times[dicke_peak_index(ens, times)] - echo.echo_peak_time) < 0.5 * grid.dt);
}

TEST_CASE("store_qubit single mode") {
  const auto r = store_qubit(flat_comb(), {1.0, 0.0}, 1.4e-9);
  CHECK(std::abs(r.output.early - 1.0) < 1e-6);
  CHECK(std::abs(r.output.late) < 1e-6);
  CHECK(r.efficiency > 0.0);
}

TEST_CASE("band-edge cross-talk of the 8 GHz comb stays small") {
  const auto r = store_qubit(comb_with(200e6), {1.0, 0.0}, 1.4e-9);
  CHECK(std::abs(r.output.late) > 1e-6);
  CHECK(std::abs(r.output.late) < 5e-3);
  const auto ch = memory_channel(comb_with(200e6), 1.4e-9);
  CHECK(std::abs(ch.map(0, 1) / ch.map(0, 0)) < 1e-2);
}

TEST_CASE("store_qubit equal superposition") {
  const AfcComb c = comb_with(200e6);
  const double h = 1.0 / std::sqrt(2.0);
  const auto r = store_qubit(c, {h, h}, 1.4e-9);
  CHECK(std::abs(r.output.early - h) < 1e-3);
  CHECK(std::abs(r.output.late - h) < 1e-3);
}

TEST_CASE("store_qubit preserves random Bloch vectors") {
  const AfcComb c = flat_comb();
  std::mt19937_64 rng(13);
  for (int k = 0; k < 5; ++k) {
    const Eigen::Vector3d n = testing_support::random_direction(rng);
    const auto r = store_qubit(c, TimeBinQubit::from_bloch(n), 1.4e-9);
    CHECK((r.output.bloch() - n).norm() < 1e-3);
  }
}

TEST_CASE("store_qubit geometry violations") {
  const AfcComb c = comb_with(200e6);
  CHECK_THROWS_AS(store_qubit(c, {1.0, 0.0}, 6e-9), GeometryError);
  CHECK_THROWS_AS(store_qubit(c, {1.0, 0.0}, 0.1e-9), GeometryError);
  CHECK_THROWS_AS(store_qubit(c, {1.0, 1.0}, 1.4e-9), ContractViolation);
}

TEST_CASE("memory channel acts as the identity on flat combs") {
  const AfcComb c = flat_comb();
  const auto ch = memory_channel(c, 1.4e-9);
  const Matrix2c m = ch.map / ch.map(0, 0);
  CHECK((m - Matrix2c::Identity()).cwiseAbs().maxCoeff() < 1e-3);
  const auto w = werner_state(0.7667);
  CHECK(trace_distance(apply_to_second_qubit(w, ch), w) < 1e-3);
}

TEST_CASE("csv headers") {
  std::ostringstream echo, comb;
  PulseWaveform wf{{Complex(1, 2), Complex(3, 4)}, 1e-12, 0.0};
  write_echo_csv(echo, wf, 0.0, 1.0);
  CHECK(echo.str().rfind("t_seconds,re,im,abs2\n", 0) == 0);
  const std::vector<double> f{0.0}, d{1.0};
  write_comb_csv(comb, f, d);
  CHECK(comb.str() == "detuning_hz,optical_depth\n0,1\n");
}
