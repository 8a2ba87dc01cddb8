#pragma once

#include <span>

namespace growthnet::kernels {

// Log-domain convolution: out[j] = log sum_i exp(a[i] + b[j-i]).  out may be
// shorter than the full convolution support; entries may be -inf.
void log_convolve_serial(std::span<const double> a, std::span<const double> b,
                         std::span<double> out);

// OpenMP version.  Every output entry is produced by the same per-entry
// routine as the serial kernel, so results are bit-identical to the serial
// reference for any thread count.
void log_convolve_parallel(std::span<const double> a,
                           std::span<const double> b, std::span<double> out);

// Dispatches to the parallel kernel when built with OpenMP.
void log_convolve(std::span<const double> a, std::span<const double> b,
                  std::span<double> out);

bool openmp_enabled();
int max_threads();

}  // namespace growthnet::kernels
