#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numeric>

#include "growthnet/common.hpp"
#include "growthnet/exact.hpp"
#include "growthnet/simulate.hpp"

using namespace growthnet;

namespace {

double tv_against_exact(const std::vector<double>& sim, const LogPmf& exact) {
  auto lin = exact.linear();
  return compare_distributions(sim, lin).tv;
}

}  // namespace

TEST_CASE("same seed reproduces the run bit for bit") {
  auto model = build_model(5, {{1.0, 2}, {2.0, 1}});
  SimConfig cfg;
  cfg.seed = 42;
  cfg.events = 50'000;
  cfg.burnin_events = 5'000;
  auto a = gillespie_run(model, cfg);
  auto b = gillespie_run(model, cfg);
  CHECK(a.total_sim_time == b.total_sim_time);
  REQUIRE(a.free_pool_pmf.size() == b.free_pool_pmf.size());
  for (std::size_t i = 0; i < a.free_pool_pmf.size(); ++i)
    CHECK(a.free_pool_pmf[i] == b.free_pool_pmf[i]);
  REQUIRE(a.filament_pmf.size() == b.filament_pmf.size());
  for (std::size_t c = 0; c < a.filament_pmf.size(); ++c)
    for (std::size_t l = 0; l < a.filament_pmf[c].size(); ++l)
      CHECK(a.filament_pmf[c][l] == b.filament_pmf[c][l]);
  CHECK(a.seed == 42);
  CHECK(a.rng_name == "mt19937_64");
  CHECK(a.events_used == 50'000);

  cfg.seed = 43;
  auto c = gillespie_run(model, cfg);
  CHECK(c.total_sim_time != a.total_sim_time);
}

TEST_CASE("estimates are proper distributions") {
  auto model = build_model(6, {{1.5, 2}, {3.0, 2}});
  SimConfig cfg;
  cfg.events = 100'000;
  cfg.burnin_events = 10'000;
  auto est = gillespie_run(model, cfg);
  double s = std::accumulate(est.free_pool_pmf.begin(), est.free_pool_pmf.end(), 0.0);
  CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
  for (const auto& pmf : est.filament_pmf) {
    double t = std::accumulate(pmf.begin(), pmf.end(), 0.0);
    CHECK(t == doctest::Approx(1.0).epsilon(1e-12));
    for (double x : pmf) CHECK(x >= 0.0);
  }
  CHECK(est.total_sim_time > 0.0);
}

TEST_CASE("time-average conservation holds exactly") {
  // E[M] + sum_c f_c E[L_c] integrates m over every sample path, so the
  // identity holds to rounding even for short runs
  auto model = build_model(9, {{1.0, 2}, {4.0, 1}});
  SimConfig cfg;
  cfg.events = 30'000;
  cfg.burnin_events = 2'000;
  cfg.seed = 7;
  auto est = gillespie_run(model, cfg);
  double total = 0.0;
  for (std::size_t j = 0; j < est.free_pool_pmf.size(); ++j)
    total += static_cast<double>(j) * est.free_pool_pmf[j];
  for (std::size_t c = 0; c < est.filament_pmf.size(); ++c) {
    double mean = 0.0;
    for (std::size_t l = 0; l < est.filament_pmf[c].size(); ++l)
      mean += static_cast<double>(l) * est.filament_pmf[c][l];
    total += static_cast<double>(model.classes[c].count) * mean;
  }
  CHECK(std::abs(total - 9.0) < 1e-9 * 9.0);
}

TEST_CASE("lambda_scale leaves the stationary law unchanged") {
  // speeding up the clock rescales time but not occupancy fractions
  auto model = build_model(4, {{2.0, 2}});
  SimConfig slow, fast;
  slow.events = fast.events = 200'000;
  slow.burnin_events = fast.burnin_events = 20'000;
  slow.seed = fast.seed = 5;
  fast.lambda_scale = 10.0;
  auto a = gillespie_run(model, slow);
  auto b = gillespie_run(model, fast);
  // identical event skeleton, scaled holding times
  CHECK(a.total_sim_time == doctest::Approx(b.total_sim_time * 10.0).epsilon(1e-12));
  for (std::size_t i = 0; i < a.free_pool_pmf.size(); ++i)
    CHECK(a.free_pool_pmf[i] == doctest::Approx(b.free_pool_pmf[i]).epsilon(1e-12));
}

TEST_CASE("small model converges to the exact law") {
  auto model = build_model(1, {{1.0, 1}});
  SimConfig cfg;
  cfg.events = 200'000;
  cfg.burnin_events = 10'000;
  auto est = gillespie_run(model, cfg);
  auto ex = exact_marginals(model);
  CHECK(tv_against_exact(est.free_pool_pmf, ex.free_pool) < 0.02);
  CHECK(tv_against_exact(est.filament_pmf[0], ex.filament[0]) < 0.02);
}

TEST_CASE("two-filament model converges to the exact law") {
  auto model = build_model(2, {{1.0, 2}});
  SimConfig cfg;
  cfg.events = 1'000'000;
  cfg.burnin_events = 50'000;
  auto est = gillespie_run(model, cfg);
  auto ex = exact_marginals(model);
  CHECK(tv_against_exact(est.free_pool_pmf, ex.free_pool) < 0.02);
  CHECK(tv_against_exact(est.filament_pmf[0], ex.filament[0]) < 0.02);
}

TEST_CASE("mixed model converges to the exact law per class") {
  auto model = build_model(8, {{1.0, 1}, {3.0, 2}});
  SimConfig cfg;
  cfg.events = 2'000'000;
  cfg.burnin_events = 100'000;
  auto est = gillespie_run(model, cfg);
  auto ex = exact_marginals(model);
  CHECK(tv_against_exact(est.free_pool_pmf, ex.free_pool) < 0.02);
  CHECK(tv_against_exact(est.filament_pmf[0], ex.filament[0]) < 0.02);
  CHECK(tv_against_exact(est.filament_pmf[1], ex.filament[1]) < 0.02);
}

TEST_CASE("simulation config validation") {
  auto model = build_model(2, {{1.0, 1}});
  SimConfig bad;
  bad.events = 0;
  CHECK_THROWS_AS(gillespie_run(model, bad), ValidationError);
  bad.events = 100;
  bad.burnin_events = -1;
  CHECK_THROWS_AS(gillespie_run(model, bad), ValidationError);
  bad.burnin_events = 0;
  bad.lambda_scale = 0.0;
  CHECK_THROWS_AS(gillespie_run(model, bad), ValidationError);
}

TEST_CASE("compare_distributions hand values") {
  std::vector<double> a{0.5, 0.5};
  std::vector<double> b{0.25, 0.5, 0.25};
  auto d = compare_distributions(a, b);
  // union support padding: |0.5-0.25| + |0.5-0.5| + |0-0.25| = 0.5 -> tv 0.25
  CHECK(d.tv == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(d.max_abs == doctest::Approx(0.25).epsilon(1e-14));
  auto zero = compare_distributions(a, a);
  CHECK(zero.tv == 0.0);
  CHECK(zero.max_abs == 0.0);

  std::vector<double> unnorm{0.5, 0.4};
  CHECK_THROWS_AS(compare_distributions(a, unnorm), ValidationError);
  std::vector<double> neg{1.5, -0.5};
  CHECK_THROWS_AS(compare_distributions(a, neg), ValidationError);
}
