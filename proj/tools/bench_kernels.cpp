// Times the serial and OpenMP log-convolution kernels side by side, then a
// full marginal computation, and verifies the two kernels agree bitwise.

#include <chrono>
#include <cstdio>
#include <cstring>
#include <random>
#include <vector>

#include "growthnet/exact.hpp"
#include "growthnet/kernels.hpp"
#include "growthnet/model.hpp"

using namespace growthnet;

namespace {

std::vector<double> random_log_weights(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 eng(seed);
  std::uniform_real_distribution<double> u(-10.0, 0.0);
  std::vector<double> v(n);
  for (auto& x : v) x = u(eng);
  return v;
}

template <typename F>
double time_ms(F&& fn, int reps) {
  auto t0 = std::chrono::steady_clock::now();
  for (int r = 0; r < reps; ++r) fn();
  auto t1 = std::chrono::steady_clock::now();
  return std::chrono::duration<double, std::milli>(t1 - t0).count() / reps;
}

}  // namespace

int main() {
  std::printf("openmp: %s, threads: %d\n",
              kernels::openmp_enabled() ? "yes" : "no", kernels::max_threads());
  std::printf("%8s %6s %12s %12s %8s %6s\n", "size", "reps", "serial_ms",
              "parallel_ms", "speedup", "equal");

  for (std::size_t n : {1000u, 2000u, 4000u, 8000u}) {
    auto a = random_log_weights(n, 1);
    auto b = random_log_weights(n, 2);
    std::vector<double> s(n), p(n);  // truncated output, as the engine uses it
    int reps = n <= 2000 ? 20 : 5;
    double ts = time_ms([&] { kernels::log_convolve_serial(a, b, s); }, reps);
    double tp = time_ms([&] { kernels::log_convolve_parallel(a, b, p); }, reps);
    bool equal = std::memcmp(s.data(), p.data(), n * sizeof(double)) == 0;
    std::printf("%8zu %6d %12.3f %12.3f %7.2fx %6s\n", n, reps, ts, tp,
                ts / tp, equal ? "yes" : "NO");
    if (!equal) return 1;
  }

  auto model = build_model(4000, {{4000.0, 2000}, {8000.0, 100}});
  auto t0 = std::chrono::steady_clock::now();
  auto ex = exact_marginals(model);
  auto t1 = std::chrono::steady_clock::now();
  std::printf("exact_marginals m=4000 (2 classes): %.1f ms, E[M] = %.4f\n",
              std::chrono::duration<double, std::milli>(t1 - t0).count(),
              ex.free_pool.mean());
  return 0;
}
