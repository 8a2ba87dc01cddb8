#include "growthnet/applications.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "growthnet/asymptotic.hpp"
#include "growthnet/common.hpp"
#include "growthnet/kernels.hpp"

namespace growthnet {
namespace {

// Ceiling that forgives sub-1e-9 floating noise, so analytically integral
// expressions like 90 + 9*10 do not round up an extra unit.
std::int64_t ceil_with_tolerance(double x) {
  const double r = std::round(x);
  if (std::abs(x - r) < 1e-9 * std::max(1.0, std::abs(x)))
    return static_cast<std::int64_t>(r);
  return static_cast<std::int64_t>(std::ceil(x));
}

}  // namespace

FleetSizing fleet_min_customers(const FleetProblem& problem) {
  if (!(problem.target_alpha > 0.0) || !(problem.target_alpha < 1.0))
    throw ValidationError("target service level must lie in (0, 1)");
  if (!(problem.route_load >= 0.0) || !std::isfinite(problem.route_load))
    throw ValidationError("route load must be nonnegative and finite");
  if (problem.locations < 1)
    throw ValidationError("at least one location required");

  const double a = problem.target_alpha;
  const double em = problem.route_load;
  const double fl = static_cast<double>(problem.locations);

  FleetSizing sizing;
  sizing.m_quadratic =
      std::max<std::int64_t>(1, ceil_with_tolerance(a * em + a / (1.0 - a) * fl));
  sizing.m = sizing.m_quadratic;
  if (a >= 0.95) {
    // near-perfect availability: the exponential-regime rule dominates
    sizing.m_exponential = ceil_with_tolerance(em + fl / (1.0 - a));
    sizing.m = std::max(sizing.m, *sizing.m_exponential);
  }
  return sizing;
}

ServiceLevel fleet_service_level(std::int64_t m, double route_load,
                                 std::int64_t locations) {
  if (m < 1) throw ValidationError("fleet size must be positive");
  if (!(route_load >= 0.0) || !std::isfinite(route_load))
    throw ValidationError("route load must be nonnegative and finite");
  if (locations < 1) throw ValidationError("at least one location required");

  ServiceLevel out;
  if (route_load == 0.0) {
    out.alpha = 1.0;
    out.psi = 0.0;
    out.degenerate_no_transit = true;
    return out;
  }
  const double md = static_cast<double>(m);
  out.psi = homogeneous_psi(route_load / md, static_cast<double>(locations) / md);
  out.alpha = std::clamp(md * out.psi / route_load, 0.0, 1.0);
  return out;
}

LogPmf bottleneck_marginal(const BottleneckSystem& system, int node_index,
                           const ExactCaps& caps) {
  if (system.m < 1) throw ValidationError("unit count m must be positive");
  if (system.geo_utilizations.empty())
    throw ValidationError("at least one geometric station required");
  if (node_index < 0 ||
      node_index >= static_cast<int>(system.geo_utilizations.size()))
    throw ValidationError("station index out of range");
  for (double th : system.poisson_means)
    if (!(th >= 0.0) || !std::isfinite(th))
      throw ValidationError("source means must be nonnegative and finite");
  for (double rho : system.geo_utilizations)
    if (!(rho > 0.0) || !(rho < 1.0))
      throw ValidationError("station utilizations must lie in (0, 1)");

  const std::int64_t m = system.m;
  {
    const std::int64_t cells =
        (m + 1) *
        static_cast<std::int64_t>(system.geo_utilizations.size() + 2);
    if (cells > caps.max_pmf_cells) {
      std::ostringstream os;
      os << "bottleneck evaluation needs " << cells << " cells, cap is "
         << caps.max_pmf_cells;
      throw CapacityError(os.str());
    }
  }
  double pois_mean = 0.0;
  for (double th : system.poisson_means) pois_mean += th;

  // Law of the units absent from the bottleneck, with and without station
  // node_index.  Each station contributes one geometric term.
  auto compose = [&](int skip) {
    std::vector<double> acc = poisson_pmf(pois_mean, m).log_p;
    for (int k = 0; k < static_cast<int>(system.geo_utilizations.size()); ++k) {
      if (k == skip) continue;
      const auto geo = negative_binomial_pmf(
          1, system.geo_utilizations[static_cast<std::size_t>(k)], m);
      std::vector<double> out(static_cast<std::size_t>(m) + 1);
      kernels::log_convolve(acc, geo.log_p, out);
      acc = std::move(out);
    }
    return log_cumsum_exp(acc);
  };
  const auto cdf_all = compose(-1);
  const auto cdf_without = compose(node_index);

  const double rho = system.geo_utilizations[static_cast<std::size_t>(node_index)];
  const double lrho = std::log(rho);
  const double l1m = std::log1p(-rho);
  LogPmf out;
  out.log_p.resize(static_cast<std::size_t>(m) + 1);
  for (std::int64_t l = 0; l <= m; ++l)
    out.log_p[static_cast<std::size_t>(l)] =
        static_cast<double>(l) * lrho + l1m +
        cdf_without[static_cast<std::size_t>(m - l)] -
        cdf_all[static_cast<std::size_t>(m)];
  normalize(out);
  return out;
}

}  // namespace growthnet
