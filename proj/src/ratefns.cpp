#include "growthnet/ratefns.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "growthnet/common.hpp"
#include "growthnet/logpmf.hpp"

namespace growthnet {
namespace {

void require_finite_nonneg(double x, const char* what) {
  if (!std::isfinite(x) || x < 0.0) {
    std::ostringstream os;
    os << what << " must be finite and nonnegative, got " << x;
    throw ValidationError(os.str());
  }
}

void require_varrho(double varrho) {
  if (!(varrho > 0.0) || !(varrho < 1.0))
    throw ValidationError("class utilization must lie in (0, 1)");
}

}  // namespace

double lambda_M(double theta, double kbar1) {
  require_finite_nonneg(kbar1, "kbar1");
  return -kbar1 * (-std::expm1(-theta));
}

double lambda_S_class(double theta, double fbar, double varrho) {
  require_finite_nonneg(fbar, "fbar");
  require_varrho(varrho);
  if (fbar == 0.0) return 0.0;
  // log((1 - varrho)/(1 - varrho e^-theta)), kept accurate for small theta.
  return fbar * (std::log1p(-varrho) - std::log1p(-varrho * std::exp(-theta)));
}

double ell_M(double x, double kbar1) {
  require_finite_nonneg(kbar1, "kbar1");
  if (x < 0.0) throw ValidationError("ell argument must be nonnegative");
  if (kbar1 == 0.0 || x >= kbar1) return 0.0;
  if (x == 0.0) return kbar1;
  return kbar1 - x + x * std::log(x / kbar1);
}

double ell_S_class(double x, double fbar, double varrho) {
  require_finite_nonneg(fbar, "fbar");
  require_varrho(varrho);
  if (x < 0.0) throw ValidationError("ell argument must be nonnegative");
  if (fbar == 0.0) {
    if (x > 0.0) throw ValidationError("degenerate class: fbar = 0 with x > 0");
    return 0.0;
  }
  const double mean = fbar * varrho / (1.0 - varrho);
  if (x >= mean) return 0.0;
  if (x == 0.0) return -fbar * std::log1p(-varrho);
  return x * std::log(x / (varrho * (fbar + x))) +
         fbar * std::log(fbar / ((1.0 - varrho) * (fbar + x)));
}

double log_falling_factorial(std::int64_t n, std::int64_t k) {
  if (k < 0 || n < k)
    throw ValidationError("falling factorial needs 0 <= k <= n");
  return std::lgamma(static_cast<double>(n) + 1.0) -
         std::lgamma(static_cast<double>(n - k) + 1.0);
}

double RateFamily::lambda(double theta) const {
  double v = lambda_M(theta, kbar1);
  for (const auto& t : class_terms) v += lambda_S_class(theta, t.fbar, t.varrho);
  return v;
}

double RateFamily::lambda_prime(double theta) const {
  const double w = std::exp(-theta);
  double v = -kbar1 * w;
  for (const auto& t : class_terms)
    v -= t.fbar * t.varrho * w / (1.0 - t.varrho * w);
  return v;
}

RateFamily rate_family_from(const ScaledParams& params) {
  RateFamily fam;
  fam.kbar1 = params.kbar1;
  fam.mean = params.kbar1;
  for (std::size_t i = 1; i < params.fbar.size(); ++i) {
    require_varrho(params.varrho[i]);
    fam.class_terms.push_back({params.fbar[i], params.varrho[i]});
    fam.mean += params.fbar[i] * params.varrho[i] / (1.0 - params.varrho[i]);
  }
  return fam;
}

double solve_theta(const RateFamily& family, double x) {
  if (!(family.mean > 0.0)) throw ValidationError("family mean must be positive");
  if (!(x > 0.0) || !(x < family.mean))
    throw ValidationError("solve_theta needs 0 < x < mean");
  // g(theta) = x + Lambda'(theta) is strictly increasing, negative at 0,
  // tending to x > 0; bracket by doubling, then bisect.
  auto g = [&](double theta) { return x + family.lambda_prime(theta); };
  double lo = 0.0, hi = 1.0;
  int guard = 0;
  while (g(hi) < 0.0) {
    lo = hi;
    hi *= 2.0;
    if (++guard > 80) throw std::logic_error("tilt bracket failed to close");
  }
  for (int it = 0; it < 200 && hi - lo > 1e-12; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    (g(mid) < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

EllValue ell_sum(const RateFamily& family, double x) {
  if (x < 0.0) throw ValidationError("ell argument must be nonnegative");
  if (x >= family.mean) return {0.0, 0.0};
  if (x == 0.0) {
    double v = family.kbar1;
    for (const auto& t : family.class_terms) v -= t.fbar * std::log1p(-t.varrho);
    return {v, kNegInf};
  }
  const double theta = solve_theta(family, x);
  const double value = -theta * x - family.lambda(theta);
  // roundoff can push the value a hair below zero near the mean
  return {value < 0.0 ? 0.0 : value, -theta};
}

}  // namespace growthnet
