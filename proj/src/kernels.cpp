#include "growthnet/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#if defined(_OPENMP)
#include <omp.h>
#endif

namespace growthnet::kernels {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
// exp underflows to zero below this; skipping such terms changes nothing.
constexpr double kExpFloor = -745.0;

// Shared by both kernels so parallel output is bit-identical to serial.
double convolve_entry(std::span<const double> a, std::span<const double> b,
                      std::size_t j) {
  const std::size_t lo = j >= b.size() ? j - b.size() + 1 : 0;
  const std::size_t hi = std::min(j, a.size() - 1);
  if (lo > hi) return kNegInf;
  double mx = kNegInf;
  for (std::size_t i = lo; i <= hi; ++i) {
    const double t = a[i] + b[j - i];
    if (t > mx) mx = t;
  }
  if (mx == kNegInf) return kNegInf;
  double s = 0.0;
  for (std::size_t i = lo; i <= hi; ++i) {
    const double t = a[i] + b[j - i] - mx;
    if (t > kExpFloor) s += std::exp(t);
  }
  return mx + std::log(s);
}

}  // namespace

void log_convolve_serial(std::span<const double> a, std::span<const double> b,
                         std::span<double> out) {
  for (std::size_t j = 0; j < out.size(); ++j) out[j] = convolve_entry(a, b, j);
}

void log_convolve_parallel(std::span<const double> a,
                           std::span<const double> b, std::span<double> out) {
#if defined(_OPENMP)
  const std::int64_t n = static_cast<std::int64_t>(out.size());
#pragma omp parallel for schedule(dynamic, 64)
  for (std::int64_t j = 0; j < n; ++j)
    out[static_cast<std::size_t>(j)] =
        convolve_entry(a, b, static_cast<std::size_t>(j));
#else
  log_convolve_serial(a, b, out);
#endif
}

void log_convolve(std::span<const double> a, std::span<const double> b,
                  std::span<double> out) {
  if (openmp_enabled() && out.size() >= 256)
    log_convolve_parallel(a, b, out);
  else
    log_convolve_serial(a, b, out);
}

bool openmp_enabled() {
#if defined(_OPENMP)
  return true;
#else
  return false;
#endif
}

int max_threads() {
#if defined(_OPENMP)
  return omp_get_max_threads();
#else
  return 1;
#endif
}

}  // namespace growthnet::kernels
