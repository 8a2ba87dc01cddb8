#pragma once

#include <cstdint>
#include <vector>

#include "growthnet/model.hpp"

namespace growthnet {

// Large-deviations machinery for the scaled free-pool representation: a
// Poisson(kbar1) variable plus independent negative-binomial class sums.
// Lambda denotes the limiting log-mgf evaluated at -theta, ell the matching
// lower-tail Cramer rate function; both vanish at and beyond the mean.

// Lambda for the Poisson part: -kbar1 (1 - exp(-theta)).
double lambda_M(double theta, double kbar1);

// Lambda for one negative-binomial class: fbar log((1-varrho)/(1-varrho e^-theta)).
double lambda_S_class(double theta, double fbar, double varrho);

// ell for the Poisson part: kbar1 - x + x log(x/kbar1) for x <= kbar1.
double ell_M(double x, double kbar1);

// ell for one class sum, zero at and beyond the class mean fbar varrho/(1-varrho).
double ell_S_class(double x, double fbar, double varrho);

// log (n)_k = log(n (n-1) ... (n-k+1)) via lgamma differences.
double log_falling_factorial(std::int64_t n, std::int64_t k);

// Aggregated family: Poisson(kbar1) plus the class terms of a scaled model.
struct RateFamily {
  struct ClassTerm {
    double fbar;
    double varrho;
  };
  double kbar1 = 0.0;
  std::vector<ClassTerm> class_terms;
  double mean = 0.0;  // kbar1 + sum fbar varrho/(1-varrho)

  double lambda(double theta) const;
  double lambda_prime(double theta) const;
};

RateFamily rate_family_from(const ScaledParams& params);

// Unique root of x + Lambda'(theta) = 0 for 0 < x < mean; the tilt that
// makes x the mean of the family.
double solve_theta(const RateFamily& family, double x);

struct EllValue {
  double value;
  double derivative;  // -theta_x; -inf at x = 0
};

// Rate function of the whole family by Legendre duality:
// ell(x) = -x theta_x - Lambda(theta_x).  (0, 0) at and beyond the mean.
EllValue ell_sum(const RateFamily& family, double x);

}  // namespace growthnet
