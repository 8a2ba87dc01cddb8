#pragma once

#include <cstdint>
#include <optional>

#include "growthnet/logpmf.hpp"
#include "growthnet/model.hpp"

namespace growthnet {

// Exact stationary marginals of the closed network at finite m.  Every
// marginal is a ratio of truncated factorial moments of an auxiliary free
// family: one Poisson(kappa_1) variable plus an independent negative-binomial
// sum per non-bottleneck class.  The representation only ever reads values
// with total at most m, so truncating the auxiliary pmfs at m keeps the
// results exact.  All arithmetic stays in log domain.

struct ExactCaps {
  std::int64_t max_pmf_cells = 10'000'000;
  std::int64_t max_joint_states = 2'000'000;
};

// Truncated Poisson log-pmf on {0..upto}; mean 0 gives a point mass at 0.
LogPmf poisson_pmf(double mean, std::int64_t upto);

// Negative binomial (count successes, failure weight rho) log-pmf on {0..upto}:
// P[j] = C(j+count-1, count-1) rho^j (1-rho)^count.
LogPmf negative_binomial_pmf(std::int64_t count, double rho, std::int64_t upto);

// Law of the auxiliary total on {0..upto}, optionally with one filament of
// class exclude_one_of_class (0-based, >= 1) removed from its class sum.
// Always truncated; carries a Chernoff bound on the dropped tail.
LogPmf pmf_M_plus_S(const NetworkModel& model, std::int64_t upto,
                    std::optional<int> exclude_one_of_class = {},
                    const ExactCaps& caps = {});

// log E[(n + k - Z)_k 1{Z <= n}] for Z distributed per pmf.
double weighted_truncated_moment(std::int64_t n, std::int64_t k,
                                 const LogPmf& pmf);

// log of the normalizing constant of the stationary product-form law.
double partition_function(const NetworkModel& model, const ExactCaps& caps = {});

// Stationary law of the free monomer count, normalized on {0..m}.
LogPmf marginal_free_pool(const NetworkModel& model, const ExactCaps& caps = {});

// Stationary law of one filament's length in the given class (0-based).
LogPmf marginal_filament(const NetworkModel& model, int class_index,
                         const ExactCaps& caps = {});

struct ExactMarginals {
  LogPmf free_pool;
  std::vector<LogPmf> filament;  // one per class
  double log_partition = 0.0;
};

ExactMarginals exact_marginals(const NetworkModel& model,
                               const ExactCaps& caps = {});

// Independent oracle: enumerates every state (l_1..l_f), sum l_i <= m, and
// accumulates marginals from the unnormalized product-form weights directly.
// Exponential in f; guarded by caps.max_joint_states.
struct BruteForceJoint {
  double log_normalizer = 0.0;  // log of the partition sum
  LogPmf free_pool;
  std::vector<LogPmf> filament;  // one per filament, in class order
};

BruteForceJoint brute_force_joint(const NetworkModel& model,
                                  const ExactCaps& caps = {});

}  // namespace growthnet
