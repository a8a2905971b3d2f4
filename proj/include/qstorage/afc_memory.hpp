#pragma once

// Atomic-frequency-comb (AFC) memory model: comb absorption spectra, the
// analytic forward-recall efficiency, FFT-based pulse propagation through a
// causal absorber, and the collective (Dicke) rephasing sum.

#include "qstorage/quantum_core.hpp"

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

namespace qstorage::afc {

/// Comb of Gaussian absorption teeth on a flat background.
struct AfcComb {
  double delta_hz = 200e6;       ///< tooth spacing
  double finesse = 2.0;          ///< spacing / tooth FWHM
  double d1 = 1.0;               ///< peak optical depth above background
  double d0 = 1.0;               ///< background optical depth
  double bandwidth_hz = 8e9;     ///< full width over which teeth are tiled
  double center_detuning_hz = 0.0;

  /// Throws ContractViolation unless delta > 0, bandwidth >= delta,
  /// finesse >= 1 and both optical depths are non-negative.
  void validate() const;
  double tooth_fwhm_hz() const { return delta_hz / finesse; }
};

/// Complex field envelope sampled on a uniform time grid starting at t0.
struct PulseWaveform {
  std::vector<Complex> samples;
  double dt = 0.0;
  double t0 = 0.0;

  std::size_t size() const { return samples.size(); }
  double time(std::size_t i) const { return t0 + static_cast<double>(i) * dt; }
  /// sum |a|^2 dt
  double energy() const;
  /// Energy-weighted mean time.
  double centroid() const;
  /// RMS width of the intensity profile |a(t)|^2.
  double rms_width() const;
};

struct TimeGrid {
  std::size_t samples = std::size_t{1} << 20;
  double dt = 0.0;
  double start = 0.0;
};

/// 2^20 samples with a frequency span of four comb bandwidths, starting
/// `lead` seconds before t = 0.
TimeGrid default_grid(const AfcComb& comb, double lead = 1e-9);

/// Unit-energy Gaussian whose intensity has the given RMS width.
PulseWaveform gaussian_pulse(const TimeGrid& grid, double center, double rms_width);

double storage_time(const AfcComb& comb);

/// (d1/F)^2 e^{-d1/F} e^{-7/F^2} e^{-d0}: forward recall with Gaussian teeth.
double analytic_efficiency(const AfcComb& comb);

/// Optical depth d0 + d1 sum_m exp(-4 ln2 (f - f_m)^2 / (Delta/F)^2) with
/// tooth centers f_m tiled across +-bandwidth/2 around the comb center.
std::vector<double> comb_profile(const AfcComb& comb, std::span<const double> detunings_hz);

/// FFT bin frequencies for an n-point grid with step dt.
std::vector<double> fft_frequencies(std::size_t n, double dt);

/// Minimum-phase field transfer function exp(-d/2 + i phi) on the FFT bins,
/// with phi the causal (Hilbert) partner of -d/2.
std::vector<Complex> transfer_function(const AfcComb& comb, std::size_t n, double dt);

/// Energy outside the comb band above which propagate() refuses the input.
inline constexpr double kMaxOutOfBandFraction = 0.02;

/// Propagates a pulse through the comb. Throws SizingError when the grid
/// does not reach centroid + 1.5/Delta or more than kMaxOutOfBandFraction of
/// the input's spectral energy falls outside the comb band.
PulseWaveform propagate(const AfcComb& comb, const PulseWaveform& input);

/// Summary of a propagate() run. The echo window is centroid + 1/Delta +- w
/// with w twice the input RMS width.
struct EchoAnalysis {
  double input_energy = 0.0;
  double output_energy = 0.0;
  double input_centroid = 0.0;
  double input_rms_width = 0.0;
  double window_half_width = 0.0;
  double transmitted_peak_time = 0.0;
  double echo_peak_time = 0.0;
  std::size_t echo_peak_index = 0;
  double echo_delay = 0.0;  ///< echo peak relative to input centroid
  double echo_energy = 0.0;
  double efficiency = 0.0;  ///< echo_energy / input_energy
  double echo_rms_width = 0.0;
};

EchoAnalysis analyze_echo(const AfcComb& comb, const PulseWaveform& input,
                          const PulseWaveform& output);

/// Single-excitation collective state over N absorbers. Forward recall only;
/// positions are carried but do not enter the amplitude.
class DickeEnsemble {
 public:
  struct Atom {
    double detuning_hz = 0.0;
    Complex amplitude{};
    double position_m = 0.0;
  };

  /// Throws ContractViolation unless sum |c_j|^2 = 1 within 1e-9.
  static DickeEnsemble from_atoms(std::vector<Atom> atoms);

  /// Atoms on the FFT bins of `input` that lie inside the comb band; each
  /// amplitude is the input spectral amplitude times sqrt of the tooth depth
  /// above background, normalized.
  static DickeEnsemble from_comb(const AfcComb& comb, const PulseWaveform& input);

  const std::vector<Atom>& atoms() const { return atoms_; }
  std::size_t size() const { return atoms_.size(); }

 private:
  explicit DickeEnsemble(std::vector<Atom> atoms) : atoms_(std::move(atoms)) {}
  std::vector<Atom> atoms_;
};

/// sum_j c_j e^{i 2 pi delta_j t}.
Complex dicke_amplitude(const DickeEnsemble& ensemble, double t);

/// Index into `times` maximizing |dicke_amplitude|.
std::size_t dicke_peak_index(const DickeEnsemble& ensemble, std::span<const double> times);

/// alpha|e> + beta e^{i theta}|l>.
struct TimeBinQubit {
  Complex early{1.0, 0.0};
  Complex late{0.0, 0.0};

  static TimeBinQubit from_bloch(const Eigen::Vector3d& n);
  Eigen::Vector3d bloch() const;
  double norm() const { return std::sqrt(std::norm(early) + std::norm(late)); }
};

struct StoreOptions {
  double pulse_rms_width = 50e-12;
  std::size_t samples = std::size_t{1} << 20;
  double dt = 0.0;  ///< 0 selects the default grid step
};

struct StoreResult {
  TimeBinQubit output;         ///< heralded, renormalized, early amplitude real >= 0
  Complex raw_early{};         ///< unnormalized echo-mode amplitudes
  Complex raw_late{};
  double efficiency = 0.0;     ///< echo-window energy / input energy
};

/// Stores a time-bin qubit whose modes are `mode_separation` apart. Throws
/// GeometryError when the two echo windows overlap each other or the late
/// mode's transmitted pulse overlaps the early echo window.
StoreResult store_qubit(const AfcComb& comb, const TimeBinQubit& qubit, double mode_separation,
                        const StoreOptions& options = {});

/// Linear map on (early, late) amplitudes realized by storage and recall.
struct MemoryChannel {
  Matrix2c map = Matrix2c::Identity();
  double efficiency = 1.0;
};

MemoryChannel memory_channel(const AfcComb& comb, double mode_separation,
                             const StoreOptions& options = {});

/// Heralded action on the second qubit: (I x M) rho (I x M)^dagger / trace.
DensityMatrix apply_to_second_qubit(const DensityMatrix& rho, const MemoryChannel& channel);

/// CSV with header t_seconds,re,im,abs2 for samples with t in [t_begin, t_end].
void write_echo_csv(std::ostream& os, const PulseWaveform& waveform, double t_begin,
                    double t_end);
/// CSV with header detuning_hz,optical_depth.
void write_comb_csv(std::ostream& os, std::span<const double> detunings_hz,
                    std::span<const double> optical_depth);

}  // namespace qstorage::afc
