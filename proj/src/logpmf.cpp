#include "growthnet/logpmf.hpp"

#include <cmath>
#include <stdexcept>

namespace growthnet {

double log_add(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  if (a < b) std::swap(a, b);
  return a + std::log1p(std::exp(b - a));
}

double log_sum_exp(std::span<const double> v) {
  double mx = kNegInf;
  for (double x : v)
    if (x > mx) mx = x;
  if (mx == kNegInf) return kNegInf;
  double s = 0.0;
  for (double x : v) s += std::exp(x - mx);
  return mx + std::log(s);
}

std::vector<double> log_cumsum_exp(std::span<const double> v) {
  std::vector<double> out(v.size());
  double acc = kNegInf;
  for (std::size_t i = 0; i < v.size(); ++i) {
    acc = log_add(acc, v[i]);
    out[i] = acc;
  }
  return out;
}

double LogPmf::log_total() const { return log_sum_exp(log_p); }

bool LogPmf::is_normalized(double tol) const {
  return std::abs(log_total()) <= tol;
}

double LogPmf::prob(std::int64_t j) const {
  if (j < 0 || j > support_max()) return 0.0;
  return std::exp(log_p[static_cast<std::size_t>(j)]);
}

std::vector<double> LogPmf::linear() const {
  std::vector<double> out(log_p.size());
  for (std::size_t i = 0; i < log_p.size(); ++i) out[i] = std::exp(log_p[i]);
  return out;
}

double LogPmf::mean() const {
  double s = 0.0;
  for (std::size_t i = 1; i < log_p.size(); ++i)
    s += static_cast<double>(i) * std::exp(log_p[i]);
  return s;
}

double LogPmf::prob_positive() const {
  if (log_p.empty()) return 0.0;
  return -std::expm1(log_p[0]);
}

LogPmf make_point_mass(std::int64_t at) {
  if (at < 0) throw std::invalid_argument("point mass below 0");
  LogPmf pmf;
  pmf.log_p.assign(static_cast<std::size_t>(at) + 1, kNegInf);
  pmf.log_p.back() = 0.0;
  return pmf;
}

void normalize(LogPmf& pmf) {
  const double lt = pmf.log_total();
  if (lt == kNegInf) throw std::logic_error("normalizing an all-zero pmf");
  for (double& e : pmf.log_p) e -= lt;
  pmf.renorm_residual = std::abs(lt);
}

}  // namespace growthnet
