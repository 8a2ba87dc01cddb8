#pragma once

#include <cstdint>
#include <utility>
#include <vector>

namespace growthnet {

// A class of filaments sharing one dissociation constant kappa = mu/lambda.
struct FilamentClass {
  double kappa;
  std::int64_t count;
};

// Closed network: m monomers shared by f = sum(count) filaments, classes
// sorted by strictly increasing kappa.  Class 0 is the bottleneck.
struct NetworkModel {
  std::int64_t m = 0;
  std::vector<FilamentClass> classes;

  std::int64_t total_filaments() const;
  int num_classes() const { return static_cast<int>(classes.size()); }
};

// Validates, merges duplicate kappas, sorts ascending.
NetworkModel build_model(std::int64_t m,
                         std::vector<std::pair<double, std::int64_t>> specs);

// Parameters of the m -> infinity scaling: kbar1 = kappa_1/m,
// fbar[i] = f_i/m, varrho[i] = kappa_1/kappa_i (so varrho[0] = 1), and
// sbar = sum_{i>=1} fbar[i] varrho[i]/(1 - varrho[i]).
struct ScaledParams {
  double kbar1 = 0.0;
  std::vector<double> fbar;
  std::vector<double> varrho;
  double sbar = 0.0;
};

ScaledParams scale(const NetworkModel& model);

enum class RegimeTag {
  LinearBottleneck,      // bottleneck class holds a positive fraction of f
  SublinearOverloaded,   // few bottleneck filaments, kbar1 + sbar > 1
  SublinearUnderloaded,  // few bottleneck filaments, kbar1 + sbar < 1
  Exact,                 // no asymptotic law applies; use the exact engine
};

const char* to_string(RegimeTag tag);

struct RegimeThresholds {
  double linear_fbar1 = 0.05;  // fbar[0] at or above this counts as linear
  std::int64_t min_f1 = 10;    // underloaded law needs at least this many
};

// f1 is the bottleneck filament count (not recoverable from ScaledParams).
RegimeTag classify_regime(const ScaledParams& params, std::int64_t f1,
                          const RegimeThresholds& thresholds = {});

}  // namespace growthnet
