#pragma once

// Thin RAII wrapper over FFTW for in-place complex transforms.

#include <complex>
#include <cstddef>
#include <vector>

namespace qstorage::detail {

enum class FftDirection { Forward, Backward };

/// Unnormalized transform: forward uses e^{-2 pi i k n / N}, backward
/// e^{+2 pi i k n / N}. Callers divide by N after a round trip.
void fft_inplace(std::vector<std::complex<double>>& data, FftDirection direction);

}  // namespace qstorage::detail
