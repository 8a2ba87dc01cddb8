#include "growthnet/exact.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "growthnet/common.hpp"
#include "growthnet/kernels.hpp"

namespace growthnet {
namespace {

double lg(std::int64_t x) { return std::lgamma(static_cast<double>(x) + 1.0); }

// w[t] = log((t + order)_order), the factorial weight attached to t unused
// monomer slots.  order = 0 gives the all-zero array.
std::vector<double> occupancy_weights(std::int64_t upto, std::int64_t order) {
  std::vector<double> w(static_cast<std::size_t>(upto) + 1);
  for (std::int64_t t = 0; t <= upto; ++t)
    w[static_cast<std::size_t>(t)] = lg(t + order) - lg(t);
  return w;
}

std::vector<double> poisson_logp(double mean, std::int64_t upto) {
  std::vector<double> lp(static_cast<std::size_t>(upto) + 1, kNegInf);
  if (mean == 0.0) {
    lp[0] = 0.0;
    return lp;
  }
  lp[0] = -mean;
  const double lmean = std::log(mean);
  for (std::int64_t j = 1; j <= upto; ++j)
    lp[static_cast<std::size_t>(j)] =
        lp[static_cast<std::size_t>(j - 1)] + lmean - std::log(static_cast<double>(j));
  return lp;
}

std::vector<double> negative_binomial_logp(std::int64_t count, double rho,
                                           std::int64_t upto) {
  std::vector<double> lp(static_cast<std::size_t>(upto) + 1);
  lp[0] = static_cast<double>(count) * std::log1p(-rho);
  const double lrho = std::log(rho);
  for (std::int64_t j = 1; j <= upto; ++j)
    lp[static_cast<std::size_t>(j)] =
        lp[static_cast<std::size_t>(j - 1)] + lrho +
        std::log(static_cast<double>(count - 1 + j) / static_cast<double>(j));
  return lp;
}

struct GeoComponent {
  std::int64_t count;
  double rho;
};

std::vector<GeoComponent> geo_components(const NetworkModel& model,
                                         std::optional<int> exclude) {
  std::vector<GeoComponent> out;
  const double kappa1 = model.classes.front().kappa;
  for (int i = 1; i < model.num_classes(); ++i) {
    std::int64_t count = model.classes[static_cast<std::size_t>(i)].count;
    if (exclude && *exclude == i) --count;
    if (count == 0) continue;
    out.push_back({count, kappa1 / model.classes[static_cast<std::size_t>(i)].kappa});
  }
  return out;
}

// Chernoff bound on log P[Z > upto] for Z = Poisson(pois_mean) + sum of
// negative binomials.  Only reported as pmf metadata; the marginal formulas
// never read past the truncation point.
double chernoff_log_tail(double pois_mean, const std::vector<GeoComponent>& geo,
                         std::int64_t upto) {
  const double u = static_cast<double>(upto) + 1.0;
  double mean = pois_mean;
  for (const auto& g : geo)
    mean += static_cast<double>(g.count) * g.rho / (1.0 - g.rho);
  if (mean == 0.0) return kNegInf;
  if (u <= mean) return 0.0;
  auto deriv = [&](double th) {
    const double e = std::exp(th);
    double v = -u + pois_mean * e;
    for (const auto& g : geo)
      v += static_cast<double>(g.count) * g.rho * e / (1.0 - g.rho * e);
    return v;
  };
  double hi;
  if (geo.empty()) {
    hi = std::log(u / pois_mean);  // exact minimizer for the pure Poisson case
  } else {
    double th_max = std::numeric_limits<double>::infinity();
    for (const auto& g : geo) th_max = std::min(th_max, -std::log(g.rho));
    hi = th_max * (1.0 - 1e-12);
    double lo = 0.0;
    for (int it = 0; it < 100; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (mid == lo || mid == hi) break;
      (deriv(mid) < 0.0 ? lo : hi) = mid;
    }
  }
  double bound = -hi * u + pois_mean * std::expm1(hi);
  for (const auto& g : geo)
    bound += static_cast<double>(g.count) *
             (std::log1p(-g.rho) - std::log1p(-g.rho * std::exp(hi)));
  return std::min(bound, 0.0);
}

void check_cells(std::int64_t upto, std::size_t components,
                 const ExactCaps& caps) {
  const std::int64_t cells =
      (upto + 1) * static_cast<std::int64_t>(components + 2);
  if (cells > caps.max_pmf_cells) {
    std::ostringstream os;
    os << "pmf evaluation needs " << cells << " cells, cap is "
       << caps.max_pmf_cells;
    throw CapacityError(os.str());
  }
}

// Law of Poisson(pois_mean) plus the given class sums on {0..upto}.
LogPmf compose_total(double pois_mean, const std::vector<GeoComponent>& geo,
                     std::int64_t upto, const ExactCaps& caps,
                     bool with_poisson) {
  check_cells(upto, geo.size() + (with_poisson ? 1 : 0), caps);
  std::vector<double> acc;
  bool have = false;
  if (with_poisson) {
    acc = poisson_logp(pois_mean, upto);
    have = true;
  }
  for (const auto& g : geo) {
    auto nb = negative_binomial_logp(g.count, g.rho, upto);
    if (!have) {
      acc = std::move(nb);
      have = true;
      continue;
    }
    std::vector<double> out(static_cast<std::size_t>(upto) + 1);
    kernels::log_convolve(acc, nb, out);
    acc = std::move(out);
  }
  LogPmf pmf;
  if (!have) {
    pmf.log_p.assign(static_cast<std::size_t>(upto) + 1, kNegInf);
    pmf.log_p[0] = 0.0;
    return pmf;  // empty sum: point mass at 0, complete
  }
  pmf.log_p = std::move(acc);
  pmf.truncated = true;
  pmf.log_tail_bound =
      chernoff_log_tail(with_poisson ? pois_mean : 0.0, geo, upto);
  return pmf;
}

void validate_model(const NetworkModel& model) {
  if (model.m < 0) throw ValidationError("negative monomer count");
  if (model.classes.empty()) throw ValidationError("model has no classes");
  for (const auto& c : model.classes) {
    if (!(c.kappa > 0.0) || !std::isfinite(c.kappa))
      throw ValidationError("dissociation constants must be positive and finite");
    if (c.count < 1) throw ValidationError("class counts must be positive");
  }
  for (std::size_t i = 1; i < model.classes.size(); ++i)
    if (!(model.classes[i - 1].kappa < model.classes[i].kappa))
      throw ValidationError("classes must have strictly increasing kappa");
}

// num[u] = log E[(u + order - Z)_order 1{Z <= u}] for u = 0..m, computed for
// all u at once: a convolution of the occupancy weights with the pmf, except
// that order = 0 degenerates to the running cdf.
std::vector<double> truncated_moment_profile(const std::vector<double>& log_pz,
                                             std::int64_t m,
                                             std::int64_t order) {
  if (order == 0) return log_cumsum_exp(log_pz);
  const auto weights = occupancy_weights(m, order);
  std::vector<double> num(static_cast<std::size_t>(m) + 1);
  kernels::log_convolve(weights, log_pz, num);
  return num;
}

}  // namespace

LogPmf poisson_pmf(double mean, std::int64_t upto) {
  if (!(mean >= 0.0) || !std::isfinite(mean))
    throw ValidationError("Poisson mean must be nonnegative and finite");
  if (upto < 0) throw ValidationError("upto must be nonnegative");
  LogPmf pmf;
  pmf.log_p = poisson_logp(mean, upto);
  if (mean > 0.0) {
    pmf.truncated = true;
    pmf.log_tail_bound = chernoff_log_tail(mean, {}, upto);
  }
  return pmf;
}

LogPmf negative_binomial_pmf(std::int64_t count, double rho, std::int64_t upto) {
  if (count < 1) throw ValidationError("negative binomial count must be positive");
  if (!(rho > 0.0) || !(rho < 1.0))
    throw ValidationError("negative binomial weight must lie in (0, 1)");
  if (upto < 0) throw ValidationError("upto must be nonnegative");
  LogPmf pmf;
  pmf.log_p = negative_binomial_logp(count, rho, upto);
  pmf.truncated = true;
  pmf.log_tail_bound = chernoff_log_tail(0.0, {{count, rho}}, upto);
  return pmf;
}

LogPmf pmf_M_plus_S(const NetworkModel& model, std::int64_t upto,
                    std::optional<int> exclude_one_of_class,
                    const ExactCaps& caps) {
  validate_model(model);
  if (upto < 0) throw ValidationError("upto must be nonnegative");
  if (exclude_one_of_class &&
      (*exclude_one_of_class < 1 || *exclude_one_of_class >= model.num_classes()))
    throw ValidationError("excluded class index must name a non-bottleneck class");
  return compose_total(model.classes.front().kappa,
                       geo_components(model, exclude_one_of_class), upto, caps,
                       true);
}

double weighted_truncated_moment(std::int64_t n, std::int64_t k,
                                 const LogPmf& pmf) {
  if (n < 0 || k < 0) throw ValidationError("moment arguments must be nonnegative");
  if (pmf.support_max() < n)
    throw ValidationError("pmf support is shorter than the truncation point");
  double mx = kNegInf;
  std::vector<double> terms(static_cast<std::size_t>(n) + 1);
  for (std::int64_t j = 0; j <= n; ++j) {
    const double t = lg(n + k - j) - lg(n - j) + pmf.log_p[static_cast<std::size_t>(j)];
    terms[static_cast<std::size_t>(j)] = t;
    if (t > mx) mx = t;
  }
  if (mx == kNegInf) return kNegInf;
  double s = 0.0;
  for (double t : terms) s += std::exp(t - mx);
  return mx + std::log(s);
}

double partition_function(const NetworkModel& model, const ExactCaps& caps) {
  validate_model(model);
  const std::int64_t m = model.m;
  const std::int64_t f1 = model.classes.front().count;
  const double kappa1 = model.classes.front().kappa;
  const LogPmf z = pmf_M_plus_S(model, m, {}, caps);
  const double moment = weighted_truncated_moment(m, f1 - 1, z);
  const double log_pois_at_m =
      -kappa1 + static_cast<double>(m) * std::log(kappa1) - lg(m);
  double log_s0 = 0.0;
  for (const auto& g : geo_components(model, {}))
    log_s0 += static_cast<double>(g.count) * std::log1p(-g.rho);
  return moment - lg(f1 - 1) - log_pois_at_m - log_s0;
}

LogPmf marginal_free_pool(const NetworkModel& model, const ExactCaps& caps) {
  validate_model(model);
  const std::int64_t m = model.m;
  const std::int64_t f1 = model.classes.front().count;
  const double kappa1 = model.classes.front().kappa;
  const auto geo = geo_components(model, {});

  const LogPmf z = compose_total(kappa1, geo, m, caps, true);
  const double den = weighted_truncated_moment(m, f1 - 1, z);
  const LogPmf s = compose_total(0.0, geo, m, caps, false);
  const auto num = truncated_moment_profile(s.log_p, m, f1 - 1);
  const auto pois = poisson_logp(kappa1, m);

  LogPmf out;
  out.log_p.resize(static_cast<std::size_t>(m) + 1);
  for (std::int64_t n = 0; n <= m; ++n)
    out.log_p[static_cast<std::size_t>(n)] =
        pois[static_cast<std::size_t>(n)] +
        num[static_cast<std::size_t>(m - n)] - den;
  normalize(out);
  return out;
}

LogPmf marginal_filament(const NetworkModel& model, int class_index,
                         const ExactCaps& caps) {
  validate_model(model);
  if (class_index < 0 || class_index >= model.num_classes())
    throw ValidationError("filament class index out of range");
  const std::int64_t m = model.m;
  const std::int64_t f1 = model.classes.front().count;
  const LogPmf z = pmf_M_plus_S(model, m, {}, caps);

  LogPmf out;
  out.log_p.resize(static_cast<std::size_t>(m) + 1);
  if (class_index == 0 && f1 == 1) {
    // Lone bottleneck filament: its length mirrors the auxiliary total.
    const auto cdf = log_cumsum_exp(z.log_p);
    for (std::int64_t l = 0; l <= m; ++l)
      out.log_p[static_cast<std::size_t>(l)] =
          z.log_p[static_cast<std::size_t>(m - l)] - cdf[static_cast<std::size_t>(m)];
  } else if (class_index == 0) {
    const double den = weighted_truncated_moment(m, f1 - 1, z);
    const auto num = truncated_moment_profile(z.log_p, m, f1 - 2);
    const double pref = std::log(static_cast<double>(f1 - 1));
    for (std::int64_t l = 0; l <= m; ++l)
      out.log_p[static_cast<std::size_t>(l)] =
          pref + num[static_cast<std::size_t>(m - l)] - den;
  } else {
    const double den = weighted_truncated_moment(m, f1 - 1, z);
    const LogPmf z_minus = pmf_M_plus_S(model, m, class_index, caps);
    const auto num = truncated_moment_profile(z_minus.log_p, m, f1 - 1);
    const double rho = model.classes.front().kappa /
                       model.classes[static_cast<std::size_t>(class_index)].kappa;
    const double lrho = std::log(rho);
    const double l1m = std::log1p(-rho);
    for (std::int64_t l = 0; l <= m; ++l)
      out.log_p[static_cast<std::size_t>(l)] =
          static_cast<double>(l) * lrho + l1m +
          num[static_cast<std::size_t>(m - l)] - den;
  }
  normalize(out);
  return out;
}

ExactMarginals exact_marginals(const NetworkModel& model, const ExactCaps& caps) {
  validate_model(model);
  const std::int64_t m = model.m;
  const std::int64_t f1 = model.classes.front().count;
  const double kappa1 = model.classes.front().kappa;
  const auto geo = geo_components(model, {});

  const LogPmf z = compose_total(kappa1, geo, m, caps, true);
  const double den = weighted_truncated_moment(m, f1 - 1, z);

  ExactMarginals result;
  {
    const double log_pois_at_m =
        -kappa1 + static_cast<double>(m) * std::log(kappa1) - lg(m);
    double log_s0 = 0.0;
    for (const auto& g : geo)
      log_s0 += static_cast<double>(g.count) * std::log1p(-g.rho);
    result.log_partition = den - lg(f1 - 1) - log_pois_at_m - log_s0;
  }
  {
    const LogPmf s = compose_total(0.0, geo, m, caps, false);
    const auto num = truncated_moment_profile(s.log_p, m, f1 - 1);
    const auto pois = poisson_logp(kappa1, m);
    LogPmf pool;
    pool.log_p.resize(static_cast<std::size_t>(m) + 1);
    for (std::int64_t n = 0; n <= m; ++n)
      pool.log_p[static_cast<std::size_t>(n)] =
          pois[static_cast<std::size_t>(n)] +
          num[static_cast<std::size_t>(m - n)] - den;
    normalize(pool);
    result.free_pool = std::move(pool);
  }
  for (int ci = 0; ci < model.num_classes(); ++ci) {
    LogPmf fil;
    fil.log_p.resize(static_cast<std::size_t>(m) + 1);
    if (ci == 0 && f1 == 1) {
      const auto cdf = log_cumsum_exp(z.log_p);
      for (std::int64_t l = 0; l <= m; ++l)
        fil.log_p[static_cast<std::size_t>(l)] =
            z.log_p[static_cast<std::size_t>(m - l)] -
            cdf[static_cast<std::size_t>(m)];
    } else if (ci == 0) {
      const auto num = truncated_moment_profile(z.log_p, m, f1 - 2);
      const double pref = std::log(static_cast<double>(f1 - 1));
      for (std::int64_t l = 0; l <= m; ++l)
        fil.log_p[static_cast<std::size_t>(l)] =
            pref + num[static_cast<std::size_t>(m - l)] - den;
    } else {
      const LogPmf z_minus = pmf_M_plus_S(model, m, ci, caps);
      const auto num = truncated_moment_profile(z_minus.log_p, m, f1 - 1);
      const double rho =
          kappa1 / model.classes[static_cast<std::size_t>(ci)].kappa;
      const double lrho = std::log(rho);
      const double l1m = std::log1p(-rho);
      for (std::int64_t l = 0; l <= m; ++l)
        fil.log_p[static_cast<std::size_t>(l)] =
            static_cast<double>(l) * lrho + l1m +
            num[static_cast<std::size_t>(m - l)] - den;
    }
    normalize(fil);
    result.filament.push_back(std::move(fil));
  }
  return result;
}

BruteForceJoint brute_force_joint(const NetworkModel& model,
                                  const ExactCaps& caps) {
  validate_model(model);
  const std::int64_t m = model.m;
  const std::int64_t f = model.total_filaments();
  {
    const double log_states = lg(m + f) - lg(m) - lg(f);
    if (log_states > std::log(static_cast<double>(caps.max_joint_states))) {
      std::ostringstream os;
      os << "joint enumeration needs about exp(" << log_states
         << ") states, cap is " << caps.max_joint_states;
      throw CapacityError(os.str());
    }
  }
  std::vector<double> log_kappa;
  for (const auto& c : model.classes)
    for (std::int64_t i = 0; i < c.count; ++i)
      log_kappa.push_back(std::log(c.kappa));

  BruteForceJoint joint;
  joint.log_normalizer = kNegInf;
  joint.free_pool.log_p.assign(static_cast<std::size_t>(m) + 1, kNegInf);
  joint.filament.resize(static_cast<std::size_t>(f));
  for (auto& fil : joint.filament)
    fil.log_p.assign(static_cast<std::size_t>(m) + 1, kNegInf);

  std::vector<std::int64_t> lens(static_cast<std::size_t>(f), 0);
  const double log_m_fact = lg(m);

  // Depth-first enumeration of all length vectors with sum <= m; the weight
  // of a state is m! / (m - sum)! * prod kappa_i^{-l_i}.
  auto recurse = [&](auto&& self, std::size_t idx, std::int64_t used,
                     double partial) -> void {
    if (idx == lens.size()) {
      const double lw = log_m_fact - lg(m - used) + partial;
      joint.log_normalizer = log_add(joint.log_normalizer, lw);
      auto& pool = joint.free_pool.log_p[static_cast<std::size_t>(m - used)];
      pool = log_add(pool, lw);
      for (std::size_t i = 0; i < lens.size(); ++i) {
        auto& cell = joint.filament[i].log_p[static_cast<std::size_t>(lens[i])];
        cell = log_add(cell, lw);
      }
      return;
    }
    for (std::int64_t li = 0; li <= m - used; ++li) {
      lens[idx] = li;
      self(self, idx + 1, used + li,
           partial - static_cast<double>(li) * log_kappa[idx]);
    }
    lens[idx] = 0;
  };
  recurse(recurse, 0, 0, 0.0);

  for (double& e : joint.free_pool.log_p) e -= joint.log_normalizer;
  for (auto& fil : joint.filament)
    for (double& e : fil.log_p) e -= joint.log_normalizer;
  return joint;
}

}  // namespace growthnet
