#include "growthnet/simulate.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <random>

#include "growthnet/common.hpp"

namespace growthnet {
namespace {

// mt19937_64 with explicit scalar transforms, so draws do not depend on
// standard-library distribution internals.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}
  double uniform() {  // [0, 1), 53 bits
    return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
  }
  double exponential(double rate) { return -std::log1p(-uniform()) / rate; }

 private:
  std::mt19937_64 eng_;
};

struct ClassState {
  double mu = 0.0;  // detach rate per nonempty filament
  std::int64_t first = 0;
  std::int64_t count = 0;
  std::vector<std::int32_t> nonempty;
  std::vector<std::int64_t> length_count;
  std::vector<double> occupancy;
  std::vector<double> last_touch;
};

}  // namespace

SimEstimate gillespie_run(const NetworkModel& model, const SimConfig& config) {
  if (model.m < 1) throw ValidationError("simulation needs at least one monomer");
  if (model.classes.empty()) throw ValidationError("model has no classes");
  if (config.events < 1) throw ValidationError("event count must be positive");
  if (config.burnin_events < 0)
    throw ValidationError("burn-in event count must be nonnegative");
  if (!(config.lambda_scale > 0.0) || !std::isfinite(config.lambda_scale))
    throw ValidationError("lambda_scale must be positive and finite");

  const std::int64_t m = model.m;
  const int K = model.num_classes();
  const std::int64_t f = model.total_filaments();
  const double lam = config.lambda_scale;

  std::vector<ClassState> cls(static_cast<std::size_t>(K));
  std::vector<std::int32_t> pos(static_cast<std::size_t>(f), -1);
  std::vector<std::int64_t> len(static_cast<std::size_t>(f), 0);
  std::vector<std::int32_t> class_of(static_cast<std::size_t>(f), 0);
  {
    std::int64_t off = 0;
    for (int c = 0; c < K; ++c) {
      auto& s = cls[static_cast<std::size_t>(c)];
      s.mu = lam * model.classes[static_cast<std::size_t>(c)].kappa;
      s.first = off;
      s.count = model.classes[static_cast<std::size_t>(c)].count;
      s.length_count.assign(static_cast<std::size_t>(m) + 1, 0);
      s.length_count[0] = s.count;
      s.occupancy.assign(static_cast<std::size_t>(m) + 1, 0.0);
      s.last_touch.assign(static_cast<std::size_t>(m) + 1, 0.0);
      for (std::int64_t i = 0; i < s.count; ++i)
        class_of[static_cast<std::size_t>(off + i)] = c;
      off += s.count;
    }
  }

  std::int64_t M = m;
  std::vector<double> pool_occupancy(static_cast<std::size_t>(m) + 1, 0.0);
  double pool_last = 0.0;
  double t = 0.0;
  double t_record = 0.0;
  bool recording = false;
  Rng rng(config.seed);

  auto touch_length = [&](ClassState& s, std::int64_t l) {
    if (recording) {
      auto& occ = s.occupancy[static_cast<std::size_t>(l)];
      occ += static_cast<double>(s.length_count[static_cast<std::size_t>(l)]) *
             (t - s.last_touch[static_cast<std::size_t>(l)]);
    }
    s.last_touch[static_cast<std::size_t>(l)] = t;
  };

  const std::int64_t total_events = config.burnin_events + config.events;
  for (std::int64_t ev = 0; ev < total_events; ++ev) {
    if (ev == config.burnin_events) {
      recording = true;
      t_record = t;
      pool_last = t;
      for (auto& s : cls)
        std::fill(s.last_touch.begin(), s.last_touch.end(), t);
    }

    const double attach_total = static_cast<double>(M) * lam * static_cast<double>(f);
    double rate_total = attach_total;
    for (const auto& s : cls)
      rate_total += s.mu * static_cast<double>(s.nonempty.size());

    t += rng.exponential(rate_total);
    double r = rng.uniform() * rate_total;

    if (r < attach_total) {
      // every filament attaches at the same rate lambda * M
      const std::int64_t i = std::min<std::int64_t>(
          f - 1, static_cast<std::int64_t>(rng.uniform() * static_cast<double>(f)));
      auto& s = cls[static_cast<std::size_t>(class_of[static_cast<std::size_t>(i)])];
      const std::int64_t l = len[static_cast<std::size_t>(i)];
      touch_length(s, l);
      touch_length(s, l + 1);
      --s.length_count[static_cast<std::size_t>(l)];
      ++s.length_count[static_cast<std::size_t>(l + 1)];
      if (l == 0) {
        pos[static_cast<std::size_t>(i)] =
            static_cast<std::int32_t>(s.nonempty.size());
        s.nonempty.push_back(static_cast<std::int32_t>(i));
      }
      ++len[static_cast<std::size_t>(i)];
      if (recording) pool_occupancy[static_cast<std::size_t>(M)] += t - pool_last;
      pool_last = t;
      --M;
    } else {
      r -= attach_total;
      int c = -1;
      for (int k = 0; k < K; ++k) {
        const double w = cls[static_cast<std::size_t>(k)].mu *
                         static_cast<double>(cls[static_cast<std::size_t>(k)].nonempty.size());
        if (r < w) {
          c = k;
          break;
        }
        r -= w;
      }
      if (c < 0) {  // rounding pushed r past the last block
        for (int k = K - 1; k >= 0; --k)
          if (!cls[static_cast<std::size_t>(k)].nonempty.empty()) {
            c = k;
            break;
          }
      }
      auto& s = cls[static_cast<std::size_t>(c)];
      const std::int64_t pick = std::min<std::int64_t>(
          static_cast<std::int64_t>(s.nonempty.size()) - 1,
          static_cast<std::int64_t>(rng.uniform() *
                                    static_cast<double>(s.nonempty.size())));
      const std::int32_t i = s.nonempty[static_cast<std::size_t>(pick)];
      const std::int64_t l = len[static_cast<std::size_t>(i)];
      touch_length(s, l);
      touch_length(s, l - 1);
      --s.length_count[static_cast<std::size_t>(l)];
      ++s.length_count[static_cast<std::size_t>(l - 1)];
      --len[static_cast<std::size_t>(i)];
      if (l == 1) {
        const std::int32_t back = s.nonempty.back();
        s.nonempty[static_cast<std::size_t>(pick)] = back;
        pos[static_cast<std::size_t>(back)] = static_cast<std::int32_t>(pick);
        s.nonempty.pop_back();
        pos[static_cast<std::size_t>(i)] = -1;
      }
      if (recording) pool_occupancy[static_cast<std::size_t>(M)] += t - pool_last;
      pool_last = t;
      ++M;
    }
    assert(M >= 0 && M <= m);
  }

  // close every open occupancy interval at the final time
  pool_occupancy[static_cast<std::size_t>(M)] += t - pool_last;
  for (auto& s : cls)
    for (std::int64_t l = 0; l <= m; ++l) {
      s.occupancy[static_cast<std::size_t>(l)] +=
          static_cast<double>(s.length_count[static_cast<std::size_t>(l)]) *
          (t - s.last_touch[static_cast<std::size_t>(l)]);
      s.last_touch[static_cast<std::size_t>(l)] = t;
    }

  const double elapsed = t - t_record;
  SimEstimate est;
  est.total_sim_time = elapsed;
  est.events_used = config.events;
  est.seed = config.seed;
  est.rng_name = "mt19937_64";

  auto normalized = [](std::vector<double> v) {
    double sum = 0.0;
    for (double x : v) sum += x;
    for (double& x : v) x /= sum;
    return v;
  };
  est.free_pool_pmf = normalized(std::move(pool_occupancy));
  for (auto& s : cls)
    est.filament_pmf.push_back(normalized(std::move(s.occupancy)));
  return est;
}

DistanceResult compare_distributions(std::span<const double> a,
                                     std::span<const double> b) {
  auto check = [](std::span<const double> v) {
    double sum = 0.0;
    for (double x : v) {
      if (!(x >= 0.0) || !std::isfinite(x))
        throw ValidationError("pmf entries must be finite and nonnegative");
      sum += x;
    }
    if (std::abs(sum - 1.0) > 1e-8)
      throw ValidationError("pmf does not sum to 1");
  };
  check(a);
  check(b);
  DistanceResult r;
  const std::size_t n = std::max(a.size(), b.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = std::abs((i < a.size() ? a[i] : 0.0) -
                              (i < b.size() ? b[i] : 0.0));
    acc += d;
    if (d > r.max_abs) r.max_abs = d;
  }
  r.tv = 0.5 * acc;
  return r;
}

}  // namespace growthnet
