#pragma once

// Thin RAII layer over FFTW's real transforms. Internal to the library.

#include <complex>
#include <vector>

namespace mnpt::detail {

/// Unnormalised forward real FFT; returns n/2 + 1 bins.
std::vector<std::complex<double>> rfft(const std::vector<double>& x);

/// Unnormalised inverse of rfft for a length-n signal.
std::vector<double> irfft(const std::vector<std::complex<double>>& bins, std::size_t n);

}  // namespace mnpt::detail
