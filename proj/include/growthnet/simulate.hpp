#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "growthnet/model.hpp"

namespace growthnet {

struct SimConfig {
  std::uint64_t seed = 1;
  std::int64_t events = 1'000'000;        // counted after burn-in
  std::int64_t burnin_events = 100'000;   // discarded transient
  double lambda_scale = 1.0;  // per-filament attach rate; mu_i = kappa_i * this
};

struct SimEstimate {
  std::vector<double> free_pool_pmf;               // time-weighted, sums to 1
  std::vector<std::vector<double>> filament_pmf;   // per class, pooled
  double total_sim_time = 0.0;
  std::int64_t events_used = 0;
  std::uint64_t seed = 0;
  std::string rng_name;
};

// Event-driven continuous-time simulation of the closed network: each
// filament gains monomers at rate lambda * M and loses them at rate mu when
// nonempty.  Deterministic for a fixed (model, config).
SimEstimate gillespie_run(const NetworkModel& model, const SimConfig& config);

struct DistanceResult {
  double tv = 0.0;
  double max_abs = 0.0;
};

// Total variation and sup distance between two pmfs over the union support.
// Both inputs must sum to 1 within 1e-8.
DistanceResult compare_distributions(std::span<const double> a,
                                     std::span<const double> b);

}  // namespace growthnet
