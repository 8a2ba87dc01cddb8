// Release gate for the growthnet library.
//
// Runs ten numbered checks covering every module against independent
// oracles (brute-force enumeration, closed forms, limiting laws) and
// prints exactly one PASS/FAIL line per check plus a summary.  Exits
// nonzero if any check fails.  Checks with a pinned wall-clock budget
// include the elapsed time in their pass condition.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <functional>
#include <string>
#include <vector>

#include "growthnet/applications.hpp"
#include "growthnet/asymptotic.hpp"
#include "growthnet/exact.hpp"
#include "growthnet/logpmf.hpp"
#include "growthnet/model.hpp"
#include "growthnet/ratefns.hpp"
#include "growthnet/simulate.hpp"

using namespace growthnet;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, ...) {
  va_list args;
  va_start(args, f);
  char buf[512];
  std::vsnprintf(buf, sizeof buf, f, args);
  va_end(args);
  return buf;
}

// Total variation between two sub-pmfs given on possibly different
// finite supports; mass beyond either support counts in full.
double tv_linear(const std::vector<double>& a, const std::vector<double>& b) {
  std::size_t n = std::max(a.size(), b.size());
  double s = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    double pa = j < a.size() ? a[j] : 0.0;
    double pb = j < b.size() ? b[j] : 0.0;
    s += std::abs(pa - pb);
  }
  return 0.5 * s;
}

// Total variation between a finitely supported pmf and the untruncated
// Geometric(q) law on {0,1,...}; the geometric tail beyond the finite
// support enters in full.
double tv_vs_geometric(const LogPmf& pm, double q) {
  double s = 0.0;
  for (std::int64_t l = 0; l <= pm.support_max(); ++l)
    s += std::abs(pm.prob(l) - (1.0 - q) * std::pow(q, double(l)));
  s += std::pow(q, double(pm.support_max() + 1));
  return 0.5 * s;
}

// The shared model grid for checks 1 and 2: 69 small networks spanning
// 1 to 3 classes, m up to 12, at most 4 filaments, dissociation
// constants from {0.5, 1, 2, 8}.  Includes the hand-enumerated
// two-filament case m=2, kappa=1.
std::vector<NetworkModel> small_grid() {
  const double ks[] = {0.5, 1.0, 2.0, 8.0};
  std::vector<NetworkModel> grid;
  for (std::int64_t m : {1, 5, 12})
    for (double k : ks)
      for (std::int64_t f : {1, 2, 4}) grid.push_back(build_model(m, {{k, f}}));
  const std::pair<double, double> pairs[] = {
      {0.5, 1.0}, {1.0, 2.0}, {2.0, 8.0}, {0.5, 8.0}};
  const std::pair<std::int64_t, std::int64_t> pair_counts[] = {
      {1, 1}, {2, 2}, {1, 3}};
  for (auto [k1, k2] : pairs)
    for (auto [f1, f2] : pair_counts)
      for (std::int64_t m : {6, 12})
        grid.push_back(build_model(m, {{k1, f1}, {k2, f2}}));
  const std::array<double, 3> triples[] = {{0.5, 1.0, 2.0}, {1.0, 2.0, 8.0}};
  const std::array<std::int64_t, 3> triple_counts[] = {{1, 1, 1}, {2, 1, 1}};
  for (const auto& kt : triples)
    for (const auto& ft : triple_counts)
      for (std::int64_t m : {8, 12})
        grid.push_back(
            build_model(m, {{kt[0], ft[0]}, {kt[1], ft[1]}, {kt[2], ft[2]}}));
  grid.push_back(build_model(2, {{1.0, 2}}));  // hand-enumerated case
  return grid;
}

// Check 1: exact marginals vs direct enumeration of the joint law over
// the whole grid, plus the hand-computed free-pool values for the
// two-filament model.  Budget: under 60 seconds.
Outcome check_exact_vs_enumeration() {
  auto t0 = std::chrono::steady_clock::now();
  auto grid = small_grid();
  double worst = 0.0;
  for (const auto& model : grid) {
    auto ex = exact_marginals(model);
    auto bf = brute_force_joint(model);
    for (std::int64_t v = 0; v <= model.m; ++v)
      worst = std::max(worst,
                       std::abs(ex.free_pool.prob(v) - bf.free_pool.prob(v)));
    std::size_t fil = 0;
    for (std::size_t c = 0; c < model.classes.size(); ++c)
      for (std::int64_t rep = 0; rep < model.classes[c].count; ++rep, ++fil)
        for (std::int64_t v = 0; v <= model.m; ++v)
          worst = std::max(worst, std::abs(ex.filament[c].prob(v) -
                                           bf.filament[fil].prob(v)));
  }
  auto hand = exact_marginals(build_model(2, {{1.0, 2}}));
  double hand_err = std::max({std::abs(hand.free_pool.prob(0) - 6.0 / 11.0),
                              std::abs(hand.free_pool.prob(1) - 4.0 / 11.0),
                              std::abs(hand.free_pool.prob(2) - 1.0 / 11.0)});
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  bool pass = worst <= 1e-10 && hand_err <= 1e-12 && secs < 60.0;
  return {pass, fmt("%zu models, worst |err| %.2e, hand case %.2e (%.1fs of 60s)",
                    grid.size(), worst, hand_err, secs)};
}

// Check 2: monomer conservation count1*E[L1]+...+E[M] = m and flow
// balance kappa_i*P[L_i>0] = E[M] for every class, on the full grid
// and on linear-regime models up to m = 2000.  Relative 1e-8.
Outcome check_conservation() {
  auto grid = small_grid();
  grid.push_back(build_model(500, {{500.0, 250}}));
  grid.push_back(build_model(1000, {{1000.0, 500}}));
  grid.push_back(build_model(2000, {{2000.0, 1000}}));
  grid.push_back(build_model(2000, {{2000.0, 600}, {4000.0, 300}}));
  double worst = 0.0;
  for (const auto& model : grid) {
    auto ex = exact_marginals(model);
    double em = ex.free_pool.mean();
    double total = em;
    for (std::size_t c = 0; c < model.classes.size(); ++c)
      total += double(model.classes[c].count) * ex.filament[c].mean();
    worst = std::max(worst, std::abs(total - double(model.m)) / double(model.m));
    for (std::size_t c = 0; c < model.classes.size(); ++c) {
      double flow = model.classes[c].kappa * ex.filament[c].prob_positive();
      worst = std::max(worst, std::abs(flow - em) / em);
    }
  }
  return {worst <= 1e-8, fmt("%zu models, worst rel err %.2e", grid.size(), worst)};
}

// Check 3: in the linear regime with kbar=1, fbar=0.5 the filament
// marginal converges to Geometric((1-psi)/(fbar+1-psi)); TV must fall
// monotonically over m in {200, 800, 3200} and end below 0.01.
// Budget: under 120 seconds.
Outcome check_linear_limit() {
  auto t0 = std::chrono::steady_clock::now();
  double psi = homogeneous_psi(1.0, 0.5);
  double q = (1.0 - psi) / (0.5 + 1.0 - psi);
  std::vector<double> tvs;
  for (std::int64_t m : {200, 800, 3200}) {
    auto ex = exact_marginals(build_model(m, {{double(m), m / 2}}));
    tvs.push_back(tv_vs_geometric(ex.filament[0], q));
  }
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  bool monotone = tvs[0] > tvs[1] && tvs[1] > tvs[2];
  bool pass = monotone && tvs[2] < 0.01 && secs < 120.0;
  return {pass, fmt("TV %.4f > %.4f > %.4f, final < 0.01 %s (%.1fs of 120s)",
                    tvs[0], tvs[1], tvs[2], tvs[2] < 0.01 ? "yes" : "NO", secs)};
}

// Check 4: overloaded sub-linear regime at m=4000, kappa=2m, 64
// filaments: filament marginal within TV 0.01 of Geometric(1/2) and
// the free pool holds m within 2%.
Outcome check_overloaded_limit() {
  const std::int64_t m = 4000;
  auto ex = exact_marginals(build_model(m, {{2.0 * double(m), 64}}));
  double tv = tv_vs_geometric(ex.filament[0], 0.5);
  double pool_ratio = ex.free_pool.mean() / double(m);
  bool pass = tv < 0.01 && std::abs(pool_ratio - 1.0) <= 0.02;
  return {pass, fmt("TV vs Geometric(0.5) %.4f, E[pool]/m = %.4f", tv, pool_ratio)};
}

// Check 5: underloaded sub-linear regime at m=10000 with 100 slow
// filaments: the slow-class marginal scaled by f1/(m - auxiliary mean)
// is within KS 0.05 of the unit exponential, and the fast class is
// within TV 0.01 of Geometric(1/2).
Outcome check_underloaded_limit() {
  const std::int64_t m = 10000;
  auto model = build_model(m, {{0.1 * double(m), 100}, {0.2 * double(m), 1000}});
  auto ex = exact_marginals(model);
  double ems = 0.1 * double(m) + 1000.0 * 0.5 / 0.5;  // Poisson + geometric means
  double s = 100.0 / (double(m) - ems);
  const auto& slow = ex.filament[0];
  double cdf = 0.0, ks = 0.0;
  for (std::int64_t l = 0; l <= slow.support_max(); ++l) {
    double fc = 1.0 - std::exp(-s * double(l));
    ks = std::max(ks, std::abs(cdf - fc));  // left limit at the jump
    cdf += slow.prob(l);
    ks = std::max(ks, std::abs(cdf - fc));  // value at the jump
  }
  ks = std::max(ks, std::exp(-s * double(slow.support_max())));
  double tv = tv_vs_geometric(ex.filament[1], 0.5);
  bool pass = ks < 0.05 && tv < 0.01;
  return {pass, fmt("KS vs unit exponential %.4f, fast-class TV %.4f", ks, tv)};
}

// Check 6: the closed-form fixed points.  Single-type: psi(1,1) =
// (3-sqrt(5))/2.  Two-type with no external pool drive:
// psi(0.5,0.5,0.5) = (2.5-sqrt(4.25))/2.  Both to 1e-12, and both must
// agree with the general solver on matching scaled parameters to 1e-10.
Outcome check_quadratic_fast_paths() {
  double h = homogeneous_psi(1.0, 1.0);
  double h_err = std::abs(h - (3.0 - std::sqrt(5.0)) / 2.0);
  double t = two_type_psi(0.5, 0.5, 0.5);
  double t_err = std::abs(t - (2.5 - std::sqrt(4.25)) / 2.0);
  ScaledParams ph{1.0, {1.0}, {1.0}, 0.0};
  double h_gap = std::abs(h - solve_psi_linear(ph));
  ScaledParams pt{0.0, {0.5, 0.5}, {1.0, 0.5}, 0.5};
  double t_gap = std::abs(t - solve_psi_linear(pt));
  bool pass = h_err <= 1e-12 && t_err <= 1e-12 && h_gap <= 1e-10 && t_gap <= 1e-10;
  return {pass, fmt("closed-form errs %.1e / %.1e, solver gaps %.1e / %.1e",
                    h_err, t_err, h_gap, t_gap)};
}

// Check 7: rate-function machinery.  (a) derivative of the optimized
// rate vs central differences, rel 1e-6; (b) the optimized value
// equals the best grid-searched split between pool and class parts to
// 1e-8; (c) pmf step ratio at m=2000 matches exp(derivative) within
// 0.01; (d) the falling-factorial ratio (n)_k/(n-k)_k at n=1e6,
// k=1000 is within 1e-2 of e.
Outcome check_rate_functions() {
  RateFamily fam;
  fam.kbar1 = 0.5;
  fam.class_terms = {{0.4, 0.5}};
  fam.mean = 0.5 + 0.4 * 0.5 / 0.5;
  double worst_rel = 0.0;
  for (double x = 0.1; x < 0.85; x += 0.1) {
    double h = 1e-5 * std::max(1.0, std::abs(x));
    double num = (ell_sum(fam, x + h).value - ell_sum(fam, x - h).value) / (2.0 * h);
    double an = ell_sum(fam, x).derivative;
    worst_rel = std::max(worst_rel, std::abs(num - an) / std::abs(an));
  }
  double worst_split = 0.0;
  for (double x : {0.15, 0.4, 0.7}) {
    double joint = ell_sum(fam, x).value;
    auto split = [&](double y) {
      return ell_M(y, fam.kbar1) + ell_S_class(x - y, 0.4, 0.5);
    };
    double lo = 0.0, hi = x, best = split(0.0);
    for (int j = 1; j <= 2000; ++j) best = std::min(best, split(x * j / 2000.0));
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo, b = hi;
    for (int it = 0; it < 200; ++it) {
      double c1 = b - gr * (b - a), c2 = a + gr * (b - a);
      if (split(c1) < split(c2)) b = c2; else a = c1;
    }
    best = std::min(best, split(0.5 * (a + b)));
    worst_split = std::max(worst_split, std::abs(joint - best));
  }
  auto model = build_model(2000, {{1000.0, 1}, {2000.0, 1000}});
  auto z = pmf_M_plus_S(model, 2000);
  auto famm = rate_family_from(scale(model));
  double ratio = std::exp(z.log_p[1199] - z.log_p[1200]);
  double target = std::exp(ell_sum(famm, 0.6).derivative);
  double step_err = std::abs(ratio - target);
  double ff = std::exp(log_falling_factorial(1000000, 1000) -
                       log_falling_factorial(999000, 1000));
  double ff_err = std::abs(ff - std::exp(1.0));
  bool pass = worst_rel <= 1e-6 && worst_split <= 1e-8 && step_err <= 0.01 &&
              ff_err <= 1e-2;
  return {pass, fmt("deriv rel %.1e, split gap %.1e, step ratio err %.4f, "
                    "factorial ratio err %.4f", worst_rel, worst_split,
                    step_err, ff_err)};
}

// Check 8: event-driven simulation vs exact laws.  Two-filament model
// at 1e7 events within TV 0.01 of the enumerated law; the linear
// m=500 model at 1e8 events within TV 0.02 of the exact marginals.
// Budget: under 300 seconds total.
Outcome check_simulation_oracle() {
  auto t0 = std::chrono::steady_clock::now();
  double tv_small = 0.0;
  {
    auto model = build_model(2, {{1.0, 2}});
    auto bf = brute_force_joint(model);
    SimConfig cfg;
    cfg.seed = 20260816;
    cfg.events = 10'000'000;
    auto est = gillespie_run(model, cfg);
    auto pool = bf.free_pool.linear();
    tv_small = compare_distributions(est.free_pool_pmf, pool).tv;
    auto fil = bf.filament[0].linear();
    tv_small = std::max(tv_small,
                        compare_distributions(est.filament_pmf[0], fil).tv);
  }
  double tv_large = 0.0;
  {
    auto model = build_model(500, {{250.0, 250}});
    auto ex = exact_marginals(model);
    SimConfig cfg;
    cfg.seed = 20260816;
    cfg.events = 100'000'000;
    auto est = gillespie_run(model, cfg);
    auto pool = ex.free_pool.linear();
    tv_large = compare_distributions(est.free_pool_pmf, pool).tv;
    auto fil = ex.filament[0].linear();
    tv_large = std::max(tv_large,
                        compare_distributions(est.filament_pmf[0], fil).tv);
  }
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  bool pass = tv_small < 0.01 && tv_large < 0.02 && secs < 300.0;
  return {pass, fmt("TV %.4f at 1e7 events (m=2), %.4f at 1e8 events (m=500) "
                    "(%.1fs of 300s)", tv_small, tv_large, secs)};
}

// Check 9: fleet dimensioning round trip over alpha in {0.5,0.8,0.9},
// route load in {50,100}, locations in {5,20}: the achieved service
// level of the recommended fleet, and the exact P[location busy] on
// the equivalent single-class network, are both within 0.03 of the
// target.
Outcome check_fleet_round_trip() {
  double worst = 0.0;
  int combos = 0;
  for (double alpha : {0.5, 0.8, 0.9})
    for (double load : {50.0, 100.0})
      for (std::int64_t f : {std::int64_t(5), std::int64_t(20)}) {
        FleetProblem prob;
        prob.route_load = load;
        prob.locations = f;
        prob.target_alpha = alpha;
        auto sz = fleet_min_customers(prob);
        double achieved = fleet_service_level(sz.m, load, f).alpha;
        worst = std::max(worst, std::abs(achieved - alpha));
        auto ex = exact_marginals(build_model(sz.m, {{load, f}}));
        worst = std::max(worst, std::abs(ex.filament[0].prob_positive() - alpha));
        ++combos;
      }
  return {worst <= 0.03, fmt("%d combinations, worst |achieved-target| %.4f",
                             combos, worst)};
}

// Check 10: single-bottleneck systems.  The station marginal computed
// from truncated-cdf ratios must equal the growth-network marginal on
// the translated model (sources as one class, each station as a
// single-filament class) to 1e-10 for up to 2 sources, 2 stations and
// m up to 200; for no sources it must match direct enumeration.  In
// the lightly loaded regime (m = 10x the unconstrained mean) each
// station marginal is within TV 1e-3 of its untruncated geometric law.
Outcome check_bottleneck() {
  double worst_tr = 0.0;
  const std::vector<std::vector<double>> sources = {{2.0}, {2.0, 1.0}};
  const std::vector<std::vector<double>> stations = {{0.6}, {0.3, 0.6}};
  for (const auto& th : sources)
    for (const auto& rho : stations)
      for (std::int64_t m : {20, 200}) {
        BottleneckSystem sys{m, th, rho};
        double total = 0.0;
        for (double v : th) total += v;
        std::vector<std::pair<double, std::int64_t>> classes = {{total, 1}};
        for (double r : rho) classes.push_back({total / r, 1});
        auto model = build_model(m, classes);
        for (int node = 0; node < int(rho.size()); ++node) {
          auto bp = bottleneck_marginal(sys, node);
          double kappa = total / rho[node];
          int cls = -1;
          for (std::size_t c = 0; c < model.classes.size(); ++c)
            if (std::abs(model.classes[c].kappa - kappa) < 1e-12 * kappa)
              cls = int(c);
          auto ep = marginal_filament(model, cls);
          for (std::int64_t v = 0; v <= m; ++v)
            worst_tr = std::max(worst_tr, std::abs(bp.prob(v) - ep.prob(v)));
        }
      }
  // No-source systems against direct enumeration of the station joint.
  double worst_h0 = 0.0;
  for (std::int64_t m : {20, 200}) {
    BottleneckSystem sys{m, {}, {0.3, 0.6}};
    for (int node = 0; node < 2; ++node) {
      auto bp = bottleneck_marginal(sys, node);
      std::vector<double> mass(m + 1, 0.0);
      double norm = 0.0;
      for (std::int64_t n1 = 0; n1 <= m; ++n1)
        for (std::int64_t n2 = 0; n1 + n2 <= m; ++n2) {
          double w = std::pow(0.3, double(n1)) * std::pow(0.6, double(n2));
          mass[node == 0 ? n1 : n2] += w;
          norm += w;
        }
      for (std::int64_t v = 0; v <= m; ++v)
        worst_h0 = std::max(worst_h0, std::abs(bp.prob(v) - mass[v] / norm));
    }
  }
  // Lightly loaded: unconstrained mean 15 (m=150) and 20 (m=200).
  double worst_tv = 0.0;
  {
    BottleneckSystem sys{150, {4.0, 10.0}, {0.4, 0.25}};
    worst_tv = std::max(worst_tv, tv_vs_geometric(bottleneck_marginal(sys, 0), 0.4));
    worst_tv = std::max(worst_tv, tv_vs_geometric(bottleneck_marginal(sys, 1), 0.25));
  }
  {
    BottleneckSystem sys{200, {19.0}, {0.5}};
    worst_tv = std::max(worst_tv, tv_vs_geometric(bottleneck_marginal(sys, 0), 0.5));
  }
  bool pass = worst_tr <= 1e-10 && worst_h0 <= 1e-10 && worst_tv < 1e-3;
  return {pass, fmt("translation |err| %.1e, no-source |err| %.1e, "
                    "light-load TV %.1e", worst_tr, worst_h0, worst_tv)};
}

}  // namespace

int main() {
  struct Entry {
    const char* name;
    std::function<Outcome()> run;
  };
  const Entry entries[] = {
      {"exact marginals vs enumeration", check_exact_vs_enumeration},
      {"conservation identities", check_conservation},
      {"linear-regime geometric limit", check_linear_limit},
      {"overloaded-regime geometric limit", check_overloaded_limit},
      {"underloaded-regime exponential limit", check_underloaded_limit},
      {"quadratic fixed-point fast paths", check_quadratic_fast_paths},
      {"rate-function suite", check_rate_functions},
      {"simulation vs exact oracles", check_simulation_oracle},
      {"fleet sizing round trip", check_fleet_round_trip},
      {"bottleneck station marginals", check_bottleneck},
  };
  int failed = 0, idx = 0;
  for (const auto& e : entries) {
    ++idx;
    Outcome out;
    try {
      out = e.run();
    } catch (const std::exception& ex) {
      out = {false, fmt("exception: %s", ex.what())};
    }
    if (!out.pass) ++failed;
    std::printf("[%2d] %s  %s: %s\n", idx, out.pass ? "PASS" : "FAIL", e.name,
                out.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/10 checks passed\n", 10 - failed);
  return failed == 0 ? 0 : 1;
}
