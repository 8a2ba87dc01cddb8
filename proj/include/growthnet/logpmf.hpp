#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <vector>

namespace growthnet {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// log(exp(a) + exp(b)), tolerant of -inf operands.
double log_add(double a, double b);

// log sum_i exp(v[i]) via a max shift; -inf for an empty or all -inf input.
double log_sum_exp(std::span<const double> v);

// out[j] = log sum_{i<=j} exp(v[i]); running normalizing sums for cdfs.
std::vector<double> log_cumsum_exp(std::span<const double> v);

// Probability mass function on {0, ..., support_max()} stored as
// log-probabilities; -inf entries are allowed.  A truncated pmf has mass
// beyond support_max() dropped, and log_tail_bound then bounds
// log P[value > support_max()].
struct LogPmf {
  std::vector<double> log_p;
  bool truncated = false;
  double log_tail_bound = kNegInf;
  // |log total| observed before the producer renormalized; a numerical
  // quality metric, 0 for pmfs that were never renormalized.
  double renorm_residual = 0.0;

  std::int64_t support_max() const {
    return static_cast<std::int64_t>(log_p.size()) - 1;
  }
  double log_total() const;
  bool is_normalized(double tol = 1e-12) const;
  double prob(std::int64_t j) const;
  std::vector<double> linear() const;
  double mean() const;
  double prob_positive() const;  // P[value > 0]
};

LogPmf make_point_mass(std::int64_t at);

// Shifts log_p so the total becomes 1 and records the residual.
void normalize(LogPmf& pmf);

}  // namespace growthnet
