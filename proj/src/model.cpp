#include "growthnet/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "growthnet/common.hpp"

namespace growthnet {

std::int64_t NetworkModel::total_filaments() const {
  std::int64_t f = 0;
  for (const auto& c : classes) f += c.count;
  return f;
}

NetworkModel build_model(std::int64_t m,
                         std::vector<std::pair<double, std::int64_t>> specs) {
  if (m < 1) throw ValidationError("monomer count m must be at least 1");
  if (specs.empty()) throw ValidationError("at least one filament class required");
  for (const auto& [kappa, count] : specs) {
    if (!std::isfinite(kappa) || kappa <= 0.0) {
      std::ostringstream os;
      os << "dissociation constant must be positive and finite, got " << kappa;
      throw ValidationError(os.str());
    }
    if (count < 1) throw ValidationError("class filament count must be at least 1");
  }
  std::sort(specs.begin(), specs.end());
  NetworkModel model;
  model.m = m;
  for (const auto& [kappa, count] : specs) {
    if (!model.classes.empty() && model.classes.back().kappa == kappa)
      model.classes.back().count += count;
    else
      model.classes.push_back({kappa, count});
  }
  return model;
}

ScaledParams scale(const NetworkModel& model) {
  ScaledParams p;
  const double m = static_cast<double>(model.m);
  const double kappa1 = model.classes.front().kappa;
  p.kbar1 = kappa1 / m;
  for (const auto& c : model.classes) {
    p.fbar.push_back(static_cast<double>(c.count) / m);
    p.varrho.push_back(kappa1 / c.kappa);
  }
  p.varrho.front() = 1.0;
  for (std::size_t i = 1; i < p.varrho.size(); ++i)
    p.sbar += p.fbar[i] * p.varrho[i] / (1.0 - p.varrho[i]);
  return p;
}

const char* to_string(RegimeTag tag) {
  switch (tag) {
    case RegimeTag::LinearBottleneck: return "linear";
    case RegimeTag::SublinearOverloaded: return "overloaded";
    case RegimeTag::SublinearUnderloaded: return "underloaded";
    case RegimeTag::Exact: return "exact";
  }
  return "unknown";
}

RegimeTag classify_regime(const ScaledParams& params, std::int64_t f1,
                          const RegimeThresholds& thresholds) {
  const double mean = params.kbar1 + params.sbar;
  if (params.fbar.front() >= thresholds.linear_fbar1)
    return RegimeTag::LinearBottleneck;
  if (mean > 1.0) return RegimeTag::SublinearOverloaded;
  if (mean < 1.0 && f1 >= thresholds.min_f1)
    return RegimeTag::SublinearUnderloaded;
  // mean == 1 sits on the boundary between the sublinear laws; too few
  // bottleneck filaments invalidate the exponential limit.  Either way the
  // finite-m engine is the honest answer.
  return RegimeTag::Exact;
}

}  // namespace growthnet
