#include "growthnet/asymptotic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "growthnet/common.hpp"
#include "growthnet/ratefns.hpp"

namespace growthnet {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void require_params(const ScaledParams& params) {
  if (params.fbar.empty() || params.fbar.size() != params.varrho.size())
    throw ValidationError("malformed scaled parameters");
}

}  // namespace

double solve_psi_linear(const ScaledParams& params) {
  require_params(params);
  const double fbar1 = params.fbar.front();
  if (!(fbar1 > 0.0))
    throw RegimeError("linear solver needs a bottleneck class of positive density");
  const RateFamily fam = rate_family_from(params);
  if (fam.mean == 0.0) return 0.0;

  // psi + Lambda'(log((fbar1 + 1 - psi)/(1 - psi))) = 0 has exactly one root
  // in (0, min(mean, 1)); the left side is negative at 0+ and positive at the
  // right endpoint.
  auto F = [&](double psi) {
    const double theta = std::log((fbar1 + 1.0 - psi) / (1.0 - psi));
    return psi + fam.lambda_prime(theta);
  };
  const double eps = 1e-14;
  double lo = eps;
  double hi = std::min(fam.mean, 1.0) - eps;
  if (!(lo < hi)) return 0.5 * std::min(fam.mean, 1.0);
  if (!(F(lo) < 0.0) || !(F(hi) > 0.0))
    throw std::logic_error("lost the sign change while solving for psi");
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    (F(mid) < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

RegimeResult marginals_linear(const ScaledParams& params, double psi) {
  require_params(params);
  if (!(psi >= 0.0) || !(psi < 1.0))
    throw ValidationError("psi must lie in [0, 1)");
  const double fbar1 = params.fbar.front();
  if (!(fbar1 > 0.0))
    throw RegimeError("linear marginals need a bottleneck class of positive density");

  RegimeResult r;
  r.regime = RegimeTag::LinearBottleneck;
  r.psi = psi;
  const double w = (1.0 - psi) / (fbar1 + 1.0 - psi);
  for (std::size_t i = 0; i < params.varrho.size(); ++i)
    r.per_class.push_back({LawKind::Geometric, params.varrho[i] * w, 0.0});
  r.pool_fraction = params.kbar1 * w;

  double pool = 0.0;
  if (psi > 0.0) {
    const RateFamily fam = rate_family_from(params);
    pool = params.kbar1 * std::exp(ell_sum(fam, psi).derivative);
  }
  r.allocation.pool = pool;
  r.allocation.class1 = 1.0 - psi;
  r.allocation.rest = std::max(0.0, psi - pool);
  return r;
}

RegimeResult solve_overloaded(const ScaledParams& params) {
  require_params(params);
  const RateFamily fam = rate_family_from(params);
  if (!(fam.mean > 1.0))
    throw RegimeError("overloaded limit needs kbar1 + sbar > 1");
  const double theta1 = solve_theta(fam, 1.0);
  const double w = std::exp(-theta1);

  RegimeResult r;
  r.regime = RegimeTag::SublinearOverloaded;
  r.psi = kNaN;
  for (std::size_t i = 0; i < params.varrho.size(); ++i)
    r.per_class.push_back({LawKind::Geometric, params.varrho[i] * w, 0.0});
  r.pool_fraction = params.kbar1 * w;

  double rest = 0.0;
  for (const auto& t : fam.class_terms)
    rest += t.fbar * t.varrho * w / (1.0 - t.varrho * w);
  // The tilt at 1 spends the whole supply on pool plus non-bottleneck
  // classes; the bottleneck's O(1) filaments hold a vanishing fraction.
  r.allocation.pool = r.pool_fraction;
  r.allocation.rest = rest;
  r.allocation.class1 = std::max(0.0, 1.0 - r.pool_fraction - rest);
  return r;
}

RegimeResult solve_underloaded(const ScaledParams& params, std::int64_t m,
                               std::int64_t f1, double ems,
                               const RegimeThresholds& thresholds) {
  require_params(params);
  const double mean = params.kbar1 + params.sbar;
  if (!(mean < 1.0))
    throw RegimeError("underloaded limit needs kbar1 + sbar < 1");
  if (f1 < 1 || m < 1) throw ValidationError("m and f1 must be positive");
  if (!(ems >= 0.0) || !(ems < static_cast<double>(m)))
    throw RegimeError("auxiliary mean must lie below m");

  RegimeResult r;
  r.regime = RegimeTag::SublinearUnderloaded;
  r.psi = kNaN;
  if (f1 < thresholds.min_f1)
    r.note += "bottleneck count below the many-filaments threshold; ";
  if (params.fbar.front() > thresholds.linear_fbar1)
    r.note += "bottleneck density above the sublinear threshold; ";

  const double scale = (static_cast<double>(m) - ems) / static_cast<double>(f1);
  r.per_class.push_back({LawKind::ScaledExponential, 0.0, scale});
  for (std::size_t i = 1; i < params.varrho.size(); ++i)
    r.per_class.push_back({LawKind::Geometric, params.varrho[i], 0.0});
  r.pool_fraction = params.kbar1;
  r.allocation.pool = params.kbar1;
  r.allocation.rest = params.sbar;
  r.allocation.class1 = std::max(0.0, 1.0 - mean);
  return r;
}

double homogeneous_psi(double kbar, double fbar) {
  if (!(fbar > 0.0) || !std::isfinite(fbar))
    throw ValidationError("fbar must be positive and finite");
  if (!(kbar >= 0.0) || !std::isfinite(kbar))
    throw ValidationError("kbar must be nonnegative and finite");
  if (kbar == 0.0) return 0.0;
  // smaller root of psi^2 - psi (1 + fbar + kbar) + kbar, in (0, min(kbar, 1))
  const double b = 1.0 + fbar + kbar;
  return 2.0 * kbar / (b + std::sqrt(b * b - 4.0 * kbar));
}

double two_type_psi(double fbar1, double fbar2, double rho_f) {
  if (!(fbar1 > 0.0) || !(fbar2 >= 0.0))
    throw ValidationError("class densities must be positive (bottleneck) and nonnegative");
  if (!(rho_f > 0.0) || !(rho_f < 1.0))
    throw ValidationError("the fast-class utilization must lie in (0, 1)");
  const double c = fbar2 * rho_f / (1.0 - rho_f);
  if (c == 0.0) return 0.0;
  const double b = 1.0 + fbar1 / (1.0 - rho_f) + c;
  return 2.0 * c / (b + std::sqrt(b * b - 4.0 * c));
}

}  // namespace growthnet
