#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "growthnet/model.hpp"

namespace growthnet {

// Limiting per-class length laws as m grows, one solver per regime.

enum class LawKind { Geometric, ScaledExponential };

struct ClassLaw {
  LawKind kind = LawKind::Geometric;
  double q = 0.0;      // P[L >= l] = q^l for a geometric law
  double scale = 0.0;  // mean of the exponential law, in monomers
};

// Fractions of the monomer supply held by the free pool, the bottleneck
// class, and everything else.  Components are nonnegative and sum to 1.
struct Allocation {
  double pool = 0.0;
  double class1 = 0.0;
  double rest = 0.0;
};

struct RegimeResult {
  RegimeTag regime = RegimeTag::Exact;
  double psi = 0.0;  // NaN unless the linear solver produced it
  std::vector<ClassLaw> per_class;
  double pool_fraction = 0.0;  // lim E[M]/m
  Allocation allocation;
  std::string note;  // soft warnings, empty when clean
};

// Root of psi + Lambda'(log((fbar1 + 1 - psi)/(1 - psi))) = 0 on
// (0, min(mean, 1)); 0 when the family mean is 0.
double solve_psi_linear(const ScaledParams& params);

// Linear-bottleneck limit laws: geometric tails scaled by psi.
RegimeResult marginals_linear(const ScaledParams& params, double psi);

// Overloaded limit (few bottleneck filaments, mean > 1): geometric laws
// tilted so the whole supply is consumed.
RegimeResult solve_overloaded(const ScaledParams& params);

// Underloaded limit (few bottleneck filaments, mean < 1): bottleneck lengths
// are exponential on scale (m - ems)/f1 where ems is the finite-m mean of
// the auxiliary total; other classes keep their open-network geometric law.
RegimeResult solve_underloaded(const ScaledParams& params, std::int64_t m,
                               std::int64_t f1, double ems,
                               const RegimeThresholds& thresholds = {});

// Closed forms for the linear-regime root.
double homogeneous_psi(double kbar, double fbar);
double two_type_psi(double fbar1, double fbar2, double rho_f);

}  // namespace growthnet
