#pragma once

#include <cstdint>
#include <optional>

#include "growthnet/exact.hpp"
#include "growthnet/logpmf.hpp"

namespace growthnet {

// Fleet dimensioning: vehicles shared by `locations` single-server stations
// with total route load route_load (mean vehicles absent in the open system).
// alpha is the probability a station has a vehicle ready.

struct FleetProblem {
  double route_load = 0.0;
  std::int64_t locations = 1;
  double target_alpha = 0.9;
};

struct FleetSizing {
  std::int64_t m = 0;            // recommended fleet size (the larger rule)
  std::int64_t m_quadratic = 0;  // from the finite-m service-level quadratic
  std::optional<std::int64_t> m_exponential;  // deep-availability rule, alpha >= 0.95
};

FleetSizing fleet_min_customers(const FleetProblem& problem);

struct ServiceLevel {
  double alpha = 0.0;
  double psi = 0.0;  // smaller root of the finite-m quadratic
  bool degenerate_no_transit = false;  // route_load 0: every station served
};

ServiceLevel fleet_service_level(std::int64_t m, double route_load,
                                 std::int64_t locations);

// Single bottleneck fed by independent Poisson sources and geometric
// stations, all competing for m circulating units.
struct BottleneckSystem {
  std::int64_t m = 0;
  std::vector<double> poisson_means;      // one per source, each >= 0
  std::vector<double> geo_utilizations;   // rho per station, each in (0,1)
};

// Stationary queue-length law of station node_index (0-based into
// geo_utilizations), normalized on {0..m}.
LogPmf bottleneck_marginal(const BottleneckSystem& system, int node_index,
                           const ExactCaps& caps = {});

}  // namespace growthnet
