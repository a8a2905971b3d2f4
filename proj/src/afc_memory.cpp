#include "qstorage/afc_memory.hpp"

#include "fft.hpp"
#include "qstorage/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <sstream>

namespace qstorage::afc {

using detail::FftDirection;
using detail::fft_inplace;

namespace {

constexpr double kFourLn2 = 4.0 * std::numbers::ln2;
// exp(-4 ln2 x^2 / w^2) drops below 1e-16 beyond x = 3.65 w.
constexpr double kToothReach = 3.7;

std::size_t index_at_or_after(const PulseWaveform& w, double t) {
  const double x = std::ceil((t - w.t0) / w.dt - 1e-9);
  return static_cast<std::size_t>(std::clamp(x, 0.0, static_cast<double>(w.size())));
}

std::size_t index_at_or_before(const PulseWaveform& w, double t) {
  const double x = std::floor((t - w.t0) / w.dt + 1e-9);
  if (x < 0.0) return 0;
  return static_cast<std::size_t>(std::min(x, static_cast<double>(w.size()) - 1.0));
}

/// Argmax of |a|^2 over sample indices [lo, hi].
std::size_t peak_in(const PulseWaveform& w, std::size_t lo, std::size_t hi) {
  std::size_t best = lo;
  double best_val = -1.0;
  for (std::size_t i = lo; i <= hi && i < w.size(); ++i) {
    const double v = std::norm(w.samples[i]);
    if (v > best_val) {
      best_val = v;
      best = i;
    }
  }
  return best;
}

bool in_band(const AfcComb& comb, double f) {
  return std::abs(f - comb.center_detuning_hz) <= comb.bandwidth_hz / 2.0;
}

}  // namespace

void AfcComb::validate() const {
  if (!(delta_hz > 0.0)) throw ContractViolation("comb spacing must be positive");
  if (!(bandwidth_hz >= delta_hz)) throw ContractViolation("comb bandwidth must be >= spacing");
  if (!(finesse >= 1.0)) throw ContractViolation("comb finesse must be >= 1");
  if (!(d1 >= 0.0) || !(d0 >= 0.0)) throw ContractViolation("optical depths must be >= 0");
}

double PulseWaveform::energy() const {
  double e = 0.0;
  for (const auto& a : samples) e += std::norm(a);
  return e * dt;
}

double PulseWaveform::centroid() const {
  double e = 0.0, m = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double p = std::norm(samples[i]);
    e += p;
    m += p * time(i);
  }
  return e > 0.0 ? m / e : t0;
}

double PulseWaveform::rms_width() const {
  const double c = centroid();
  double e = 0.0, v = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double p = std::norm(samples[i]);
    const double d = time(i) - c;
    e += p;
    v += p * d * d;
  }
  return e > 0.0 ? std::sqrt(v / e) : 0.0;
}

TimeGrid default_grid(const AfcComb& comb, double lead) {
  comb.validate();
  TimeGrid g;
  g.dt = 1.0 / (4.0 * comb.bandwidth_hz);
  g.start = -lead;
  return g;
}

PulseWaveform gaussian_pulse(const TimeGrid& grid, double center, double rms_width) {
  if (!(rms_width > 0.0) || !(grid.dt > 0.0) || grid.samples == 0) {
    throw ContractViolation("Gaussian pulse needs positive width, step and size");
  }
  PulseWaveform w;
  w.dt = grid.dt;
  w.t0 = grid.start;
  w.samples.resize(grid.samples);
  // |a|^2 is a normal density with standard deviation rms_width.
  const double norm = std::pow(2.0 * std::numbers::pi * rms_width * rms_width, -0.25);
  for (std::size_t i = 0; i < grid.samples; ++i) {
    const double d = w.time(i) - center;
    w.samples[i] = norm * std::exp(-d * d / (4.0 * rms_width * rms_width));
  }
  return w;
}

double storage_time(const AfcComb& comb) {
  comb.validate();
  return 1.0 / comb.delta_hz;
}

double analytic_efficiency(const AfcComb& comb) {
  comb.validate();
  const double dtilde = comb.d1 / comb.finesse;
  return dtilde * dtilde * std::exp(-dtilde) * std::exp(-7.0 / (comb.finesse * comb.finesse)) *
         std::exp(-comb.d0);
}

std::vector<double> comb_profile(const AfcComb& comb, std::span<const double> detunings_hz) {
  comb.validate();
  const double width = comb.tooth_fwhm_hz();
  const double half_band = comb.bandwidth_hz / 2.0;
  const auto max_tooth = static_cast<long>(std::floor(half_band / comb.delta_hz + 1e-9));
  const auto reach = static_cast<long>(std::ceil(kToothReach * width / comb.delta_hz));

  std::vector<double> od(detunings_hz.size(), comb.d0);
  if (comb.d1 == 0.0) return od;
  for (std::size_t k = 0; k < detunings_hz.size(); ++k) {
    const double rel = detunings_hz[k] - comb.center_detuning_hz;
    const auto nearest = static_cast<long>(std::lround(rel / comb.delta_hz));
    const long lo = std::max(nearest - reach, -max_tooth);
    const long hi = std::min(nearest + reach, max_tooth);
    double sum = 0.0;
    for (long m = lo; m <= hi; ++m) {
      const double x = rel - static_cast<double>(m) * comb.delta_hz;
      sum += std::exp(-kFourLn2 * x * x / (width * width));
    }
    od[k] += comb.d1 * sum;
  }
  return od;
}

std::vector<double> fft_frequencies(std::size_t n, double dt) {
  std::vector<double> f(n);
  const double df = 1.0 / (static_cast<double>(n) * dt);
  for (std::size_t k = 0; k < n; ++k) {
    const auto kk = static_cast<long long>(k);
    const auto nn = static_cast<long long>(n);
    f[k] = static_cast<double>(k < (n + 1) / 2 ? kk : kk - nn) * df;
  }
  return f;
}

std::vector<Complex> transfer_function(const AfcComb& comb, std::size_t n, double dt) {
  const std::vector<double> freqs = fft_frequencies(n, dt);
  const std::vector<double> od = comb_profile(comb, freqs);

  // Real cepstrum of ln|H| = -d/2, folded onto non-negative quefrencies,
  // gives ln H of the minimum-phase (causal) response.
  std::vector<Complex> cep(n);
  for (std::size_t k = 0; k < n; ++k) cep[k] = -0.5 * od[k];
  fft_inplace(cep, FftDirection::Backward);
  const double inv_n = 1.0 / static_cast<double>(n);
  for (auto& c : cep) c *= inv_n;
  // Quefrencies 1..(n-1)/2 doubled, the even-n Nyquist term kept once.
  const std::size_t positive_end = (n + 1) / 2;
  for (std::size_t q = 1; q < n; ++q) {
    if (q < positive_end) {
      cep[q] *= 2.0;
    } else if (!(n % 2 == 0 && q == n / 2)) {
      cep[q] = 0.0;
    }
  }
  fft_inplace(cep, FftDirection::Forward);
  for (auto& c : cep) c = std::exp(c);
  return cep;
}

PulseWaveform propagate(const AfcComb& comb, const PulseWaveform& input) {
  comb.validate();
  const std::size_t n = input.size();
  if (n < 2 || !(input.dt > 0.0)) throw SizingError("input waveform grid is empty");
  const double e_in = input.energy();
  if (!(e_in > 0.0) || !std::isfinite(e_in)) {
    throw SizingError("input waveform must carry finite, positive energy");
  }
  const double needed_end = input.centroid() + 1.5 * storage_time(comb);
  const double grid_end = input.time(n - 1);
  if (grid_end < needed_end) {
    std::ostringstream os;
    os << "time grid ends at " << grid_end << " s but the first echo needs " << needed_end << " s";
    throw SizingError(os.str());
  }

  std::vector<Complex> spectrum = input.samples;
  fft_inplace(spectrum, FftDirection::Forward);
  const std::vector<double> freqs = fft_frequencies(n, input.dt);
  double total = 0.0, outside = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double p = std::norm(spectrum[k]);
    total += p;
    if (!in_band(comb, freqs[k])) outside += p;
  }
  if (outside > kMaxOutOfBandFraction * total) {
    std::ostringstream os;
    os << "input spectrum exceeds the comb bandwidth (" << 100.0 * outside / total
       << "% of spectral energy outside)";
    throw SizingError(os.str());
  }

  const std::vector<Complex> h = transfer_function(comb, n, input.dt);
  for (std::size_t k = 0; k < n; ++k) spectrum[k] *= h[k];
  fft_inplace(spectrum, FftDirection::Backward);
  const double inv_n = 1.0 / static_cast<double>(n);
  for (auto& s : spectrum) s *= inv_n;

  PulseWaveform out;
  out.samples = std::move(spectrum);
  out.dt = input.dt;
  out.t0 = input.t0;
  return out;
}

EchoAnalysis analyze_echo(const AfcComb& comb, const PulseWaveform& input,
                          const PulseWaveform& output) {
  if (input.size() != output.size() || input.dt != output.dt || input.t0 != output.t0) {
    throw ContractViolation("echo analysis needs input and output on the same grid");
  }
  EchoAnalysis r;
  const double tau = storage_time(comb);
  r.input_energy = input.energy();
  r.output_energy = output.energy();
  r.input_centroid = input.centroid();
  r.input_rms_width = input.rms_width();
  r.window_half_width = 2.0 * r.input_rms_width;
  const double w = r.window_half_width;
  const double tc = r.input_centroid;

  const std::size_t tp = peak_in(output, index_at_or_after(output, tc - w),
                                 index_at_or_before(output, tc + w));
  r.transmitted_peak_time = output.time(tp);

  r.echo_peak_index = peak_in(output, index_at_or_after(output, tc + 0.5 * tau),
                              index_at_or_before(output, tc + 1.5 * tau));
  r.echo_peak_time = output.time(r.echo_peak_index);
  r.echo_delay = r.echo_peak_time - tc;

  const std::size_t lo = index_at_or_after(output, tc + tau - w);
  const std::size_t hi = index_at_or_before(output, tc + tau + w);
  double e = 0.0, m = 0.0;
  for (std::size_t i = lo; i <= hi && i < output.size(); ++i) {
    const double p = std::norm(output.samples[i]);
    e += p;
    m += p * output.time(i);
  }
  r.echo_energy = e * output.dt;
  r.efficiency = r.input_energy > 0.0 ? r.echo_energy / r.input_energy : 0.0;
  if (e > 0.0) {
    const double mean = m / e;
    double v = 0.0;
    for (std::size_t i = lo; i <= hi && i < output.size(); ++i) {
      const double d = output.time(i) - mean;
      v += std::norm(output.samples[i]) * d * d;
    }
    r.echo_rms_width = std::sqrt(v / e);
  }
  return r;
}

DickeEnsemble DickeEnsemble::from_atoms(std::vector<Atom> atoms) {
  double norm2 = 0.0;
  for (const auto& a : atoms) norm2 += std::norm(a.amplitude);
  if (std::abs(norm2 - 1.0) > 1e-9) {
    throw ContractViolation("Dicke amplitudes must satisfy sum |c|^2 = 1 (got " +
                            std::to_string(norm2) + ")");
  }
  return DickeEnsemble(std::move(atoms));
}

DickeEnsemble DickeEnsemble::from_comb(const AfcComb& comb, const PulseWaveform& input) {
  comb.validate();
  std::vector<Complex> spectrum = input.samples;
  fft_inplace(spectrum, FftDirection::Forward);
  const std::vector<double> freqs = fft_frequencies(input.size(), input.dt);
  const std::vector<double> od = comb_profile(comb, freqs);

  std::vector<Atom> atoms;
  double norm2 = 0.0;
  for (std::size_t k = 0; k < freqs.size(); ++k) {
    if (!in_band(comb, freqs[k])) continue;
    const double teeth = std::max(od[k] - comb.d0, 0.0);
    // Reference the spectral phase to absolute time rather than the grid origin.
    const Complex origin = std::polar(1.0, -2.0 * std::numbers::pi * freqs[k] * input.t0);
    const Complex c = spectrum[k] * origin * std::sqrt(teeth);
    if (std::norm(c) == 0.0) continue;
    atoms.push_back({freqs[k], c, 0.0});
    norm2 += std::norm(c);
  }
  if (!(norm2 > 0.0)) throw ContractViolation("comb has no absorbers under the input spectrum");
  const double scale = 1.0 / std::sqrt(norm2);
  for (auto& a : atoms) a.amplitude *= scale;
  return from_atoms(std::move(atoms));
}

Complex dicke_amplitude(const DickeEnsemble& ensemble, double t) {
  Complex sum{};
  for (const auto& a : ensemble.atoms()) {
    sum += a.amplitude * std::polar(1.0, 2.0 * std::numbers::pi * a.detuning_hz * t);
  }
  return sum;
}

std::size_t dicke_peak_index(const DickeEnsemble& ensemble, std::span<const double> times) {
  std::size_t best = 0;
  double best_val = -1.0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    const double v = std::norm(dicke_amplitude(ensemble, times[i]));
    if (v > best_val) {
      best_val = v;
      best = i;
    }
  }
  return best;
}

TimeBinQubit TimeBinQubit::from_bloch(const Eigen::Vector3d& n) {
  const auto s = MeasurementSetting::from_bloch(n.normalized());
  const Vector2c v = s.eigenstate();
  return {v(0), v(1)};
}

Eigen::Vector3d TimeBinQubit::bloch() const {
  const double n2 = std::norm(early) + std::norm(late);
  const Complex c = std::conj(early) * late;
  return Eigen::Vector3d(2.0 * c.real(), 2.0 * c.imag(), std::norm(early) - std::norm(late)) / n2;
}

namespace {

struct EchoModes {
  Complex early{};
  Complex late{};
  double efficiency = 0.0;
};

/// Overlap of `output` with the unit-energy Gaussian mode centered at `center`,
/// restricted to center +- half_width.
Complex mode_amplitude(const PulseWaveform& output, double center, double rms, double half_width) {
  const std::size_t lo = index_at_or_after(output, center - half_width);
  const std::size_t hi = index_at_or_before(output, center + half_width);
  const double norm = std::pow(2.0 * std::numbers::pi * rms * rms, -0.25);
  Complex overlap{};
  double weight = 0.0;
  for (std::size_t i = lo; i <= hi && i < output.size(); ++i) {
    const double d = output.time(i) - center;
    const double g = norm * std::exp(-d * d / (4.0 * rms * rms));
    overlap += g * output.samples[i];
    weight += g * g;
  }
  return weight > 0.0 ? overlap / weight : Complex{};
}

double window_energy(const PulseWaveform& output, double center, double half_width) {
  const std::size_t lo = index_at_or_after(output, center - half_width);
  const std::size_t hi = index_at_or_before(output, center + half_width);
  double e = 0.0;
  for (std::size_t i = lo; i <= hi && i < output.size(); ++i) e += std::norm(output.samples[i]);
  return e * output.dt;
}

EchoModes recall_modes(const AfcComb& comb, Complex early, Complex late, double separation,
                       const StoreOptions& options) {
  comb.validate();
  const double tau = storage_time(comb);
  const double rms = options.pulse_rms_width;
  if (!(rms > 0.0)) throw ContractViolation("pulse width must be positive");
  const double w = 2.0 * rms;
  if (!(separation > 0.0) || separation >= tau) {
    throw GeometryError("mode separation must lie in (0, 1/Delta)");
  }
  if (separation <= 2.0 * w) {
    throw GeometryError("early and late echo windows overlap");
  }
  if (separation + w >= tau - w) {
    throw GeometryError("late transmitted mode overlaps the early echo window");
  }

  TimeGrid grid = default_grid(comb, std::max(1e-9, 10.0 * rms));
  grid.samples = options.samples;
  if (options.dt > 0.0) grid.dt = options.dt;
  const double needed = -grid.start + separation + 1.5 * tau + 10.0 * rms;
  if (static_cast<double>(grid.samples) * grid.dt < needed) {
    throw SizingError("time grid too short for the two-mode echo");
  }

  PulseWaveform input = gaussian_pulse(grid, 0.0, rms);
  const PulseWaveform late_mode = gaussian_pulse(grid, separation, rms);
  for (std::size_t i = 0; i < input.size(); ++i) {
    input.samples[i] = early * input.samples[i] + late * late_mode.samples[i];
  }
  const PulseWaveform output = propagate(comb, input);

  EchoModes m;
  // Template reach: six amplitude widths, never past the midpoint to a neighbouring mode.
  const double reach =
      std::min({6.0 * std::numbers::sqrt2 * rms, 0.5 * separation, 0.5 * (tau - separation)});
  m.early = mode_amplitude(output, tau, rms, reach);
  m.late = mode_amplitude(output, tau + separation, rms, reach);
  const double e_in = input.energy();
  m.efficiency =
      (window_energy(output, tau, w) + window_energy(output, tau + separation, w)) / e_in;
  return m;
}

}  // namespace

StoreResult store_qubit(const AfcComb& comb, const TimeBinQubit& qubit, double mode_separation,
                        const StoreOptions& options) {
  if (std::abs(qubit.norm() - 1.0) > 1e-9) {
    throw ContractViolation("qubit amplitudes must be normalized");
  }
  const EchoModes m = recall_modes(comb, qubit.early, qubit.late, mode_separation, options);
  StoreResult r;
  r.raw_early = m.early;
  r.raw_late = m.late;
  r.efficiency = m.efficiency;
  const double n = std::sqrt(std::norm(m.early) + std::norm(m.late));
  if (!(n > 0.0)) throw AnalysisFailure("no echo recovered from the memory");
  Complex e = m.early / n, l = m.late / n;
  const Complex ref = std::abs(e) > 1e-12 ? e : l;
  const Complex phase = std::conj(ref) / std::abs(ref);
  r.output = {e * phase, l * phase};
  return r;
}

MemoryChannel memory_channel(const AfcComb& comb, double mode_separation,
                             const StoreOptions& options) {
  const EchoModes e = recall_modes(comb, 1.0, 0.0, mode_separation, options);
  const EchoModes l = recall_modes(comb, 0.0, 1.0, mode_separation, options);
  MemoryChannel ch;
  ch.map << e.early, l.early, e.late, l.late;
  ch.efficiency = 0.5 * (e.efficiency + l.efficiency);
  return ch;
}

DensityMatrix apply_to_second_qubit(const DensityMatrix& rho, const MemoryChannel& channel) {
  const Matrix4c k = kron(Matrix2c::Identity(), channel.map);
  Matrix4c out = k * rho.matrix() * k.adjoint();
  const double tr = out.trace().real();
  if (!(tr > 0.0)) throw AnalysisFailure("memory channel annihilates the state");
  out /= tr;
  return DensityMatrix::from_matrix((out + out.adjoint()) / 2.0);
}

void write_echo_csv(std::ostream& os, const PulseWaveform& waveform, double t_begin,
                    double t_end) {
  os << "t_seconds,re,im,abs2\n";
  os.precision(12);
  for (std::size_t i = 0; i < waveform.size(); ++i) {
    const double t = waveform.time(i);
    if (t < t_begin || t > t_end) continue;
    const Complex a = waveform.samples[i];
    os << t << ',' << a.real() << ',' << a.imag() << ',' << std::norm(a) << '\n';
  }
}

void write_comb_csv(std::ostream& os, std::span<const double> detunings_hz,
                    std::span<const double> optical_depth) {
  if (detunings_hz.size() != optical_depth.size()) {
    throw ContractViolation("comb CSV columns differ in length");
  }
  os << "detuning_hz,optical_depth\n";
  os.precision(12);
  for (std::size_t i = 0; i < detunings_hz.size(); ++i) {
    os << detunings_hz[i] << ',' << optical_depth[i] << '\n';
  }
}

}  // namespace qstorage::afc
