// Command-line front end: model assembly from flags or a config file,
// method dispatch, and JSON/CSV artifact output.

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <ctime>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "growthnet/applications.hpp"
#include "growthnet/asymptotic.hpp"
#include "growthnet/common.hpp"
#include "growthnet/exact.hpp"
#include "growthnet/model.hpp"
#include "growthnet/ratefns.hpp"
#include "growthnet/simulate.hpp"

using nlohmann::ordered_json;
using namespace growthnet;

namespace {

// ---------------------------------------------------------------- utilities

std::string utc_now() {
  std::time_t tt = std::chrono::system_clock::to_time_t(
      std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&tt, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& raw, const std::string& what) {
  const std::string s = trim(raw);
  try {
    std::size_t used = 0;
    double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw ValidationError("cannot parse number for " + what + ": '" + raw + "'");
  }
}

std::int64_t parse_int(const std::string& raw, const std::string& what) {
  const std::string s = trim(raw);
  try {
    std::size_t used = 0;
    long long v = std::stoll(s, &used);
    if (used != s.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw ValidationError("cannot parse integer for " + what + ": '" + raw + "'");
  }
}

std::uint64_t parse_uint(const std::string& raw, const std::string& what) {
  const std::string s = trim(raw);
  try {
    std::size_t used = 0;
    unsigned long long v = std::stoull(s, &used);
    if (used != s.size() || s.front() == '-')
      throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw ValidationError("cannot parse unsigned integer for " + what + ": '" +
                          raw + "'");
  }
}

std::pair<double, std::int64_t> parse_class_spec(const std::string& spec) {
  auto colon = spec.find(':');
  if (colon == std::string::npos)
    throw ValidationError("class spec must be kappa:count, got '" + spec + "'");
  double kappa = parse_double(spec.substr(0, colon), "class kappa");
  std::int64_t count = parse_int(spec.substr(colon + 1), "class count");
  return {kappa, count};
}

std::vector<std::string> split_commas(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

// --------------------------------------------------------- config file

// Key/value file with optional [section] headers.  '#' starts a comment.
// List-valued keys (class, poisson_mean, utilization) accept repeated keys
// and comma-separated values.
struct FileConfig {
  std::optional<std::int64_t> m;
  std::vector<std::string> class_specs;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> format;
  std::optional<std::string> out;
  std::optional<std::string> regime;

  std::optional<std::int64_t> events;
  std::optional<std::int64_t> burnin;
  std::optional<double> lambda_scale;

  std::optional<std::int64_t> max_pmf_cells;
  std::optional<std::int64_t> max_joint_states;

  std::optional<double> linear_fbar1;
  std::optional<std::int64_t> min_f1;

  std::optional<double> alpha;
  std::optional<double> route_load;
  std::optional<std::int64_t> locations;
  std::optional<std::int64_t> fleet_m;

  std::optional<std::int64_t> bkd_m;
  std::vector<std::string> poisson_means;
  std::vector<std::string> utilizations;
  std::optional<std::int64_t> node;
};

FileConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config file: " + path);
  FileConfig cfg;
  std::string section;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::string where = path + ":" + std::to_string(lineno);
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ValidationError("unterminated section header at " + where);
      section = trim(line.substr(1, line.size() - 2));
      if (section != "simulate" && section != "caps" && section != "thresholds" &&
          section != "fleet" && section != "bottleneck")
        throw ValidationError("unknown config section [" + section + "] at " + where);
      continue;
    }
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ValidationError("expected key = value at " + where);
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty())
      throw ValidationError("empty key or value at " + where);

    auto unknown = [&]() -> ValidationError {
      return ValidationError("unknown config key '" + key + "' in section [" +
                             section + "] at " + where);
    };
    if (section.empty()) {
      if (key == "m") cfg.m = parse_int(value, key);
      else if (key == "class") {
        for (auto& item : split_commas(value)) cfg.class_specs.push_back(item);
      } else if (key == "seed") cfg.seed = parse_uint(value, key);
      else if (key == "format") cfg.format = value;
      else if (key == "out") cfg.out = value;
      else if (key == "regime") cfg.regime = value;
      else throw unknown();
    } else if (section == "simulate") {
      if (key == "events") cfg.events = parse_int(value, key);
      else if (key == "burnin") cfg.burnin = parse_int(value, key);
      else if (key == "lambda_scale") cfg.lambda_scale = parse_double(value, key);
      else throw unknown();
    } else if (section == "caps") {
      if (key == "max_pmf_cells") cfg.max_pmf_cells = parse_int(value, key);
      else if (key == "max_joint_states") cfg.max_joint_states = parse_int(value, key);
      else throw unknown();
    } else if (section == "thresholds") {
      if (key == "linear_fbar1") cfg.linear_fbar1 = parse_double(value, key);
      else if (key == "min_f1") cfg.min_f1 = parse_int(value, key);
      else throw unknown();
    } else if (section == "fleet") {
      if (key == "alpha") cfg.alpha = parse_double(value, key);
      else if (key == "route_load") cfg.route_load = parse_double(value, key);
      else if (key == "locations") cfg.locations = parse_int(value, key);
      else if (key == "m") cfg.fleet_m = parse_int(value, key);
      else throw unknown();
    } else if (section == "bottleneck") {
      if (key == "m") cfg.bkd_m = parse_int(value, key);
      else if (key == "poisson_mean") {
        for (auto& item : split_commas(value)) cfg.poisson_means.push_back(item);
      } else if (key == "utilization") {
        for (auto& item : split_commas(value)) cfg.utilizations.push_back(item);
      } else if (key == "node") cfg.node = parse_int(value, key);
      else throw unknown();
    }
  }
  return cfg;
}

// ------------------------------------------------------------- run config

struct RunConfig {
  std::string method;
  std::optional<std::int64_t> m;
  std::vector<std::pair<double, std::int64_t>> classes;
  std::uint64_t seed = 1;
  std::string format = "json";
  std::optional<std::string> out;
  std::string regime = "auto";

  SimConfig sim;
  ExactCaps caps;
  RegimeThresholds thresholds;

  std::optional<double> alpha;
  std::optional<double> route_load;
  std::optional<std::int64_t> locations;
  std::optional<std::int64_t> fleet_m;

  std::optional<std::int64_t> bkd_m;
  std::vector<double> poisson_means;
  std::vector<double> utilizations;
  std::optional<std::int64_t> node;
};

NetworkModel require_model(const RunConfig& rc) {
  if (!rc.m.has_value())
    throw ValidationError("this method needs --m (or m in the config file)");
  if (rc.classes.empty())
    throw ValidationError(
        "this method needs at least one --class kappa:count "
        "(or class entries in the config file)");
  return build_model(*rc.m, rc.classes);
}

// mean of the auxiliary total M + S at finite m, for the underloaded scale
double auxiliary_mean(const NetworkModel& model) {
  double ems = model.classes.front().kappa;
  for (std::size_t i = 1; i < model.classes.size(); ++i) {
    double rho = model.classes.front().kappa / model.classes[i].kappa;
    ems += static_cast<double>(model.classes[i].count) * rho / (1.0 - rho);
  }
  return ems;
}

// ------------------------------------------------------------- json pieces

ordered_json finite_or_null(double x) {
  if (std::isfinite(x)) return x;
  return nullptr;
}

ordered_json json_log_pmf(const LogPmf& pmf) {
  ordered_json probs = ordered_json::array();
  ordered_json logs = ordered_json::array();
  for (double lp : pmf.log_p) {
    probs.push_back(std::exp(lp));
    logs.push_back(finite_or_null(lp));
  }
  ordered_json j;
  j["probability"] = std::move(probs);
  j["log_probability"] = std::move(logs);
  return j;
}

ordered_json json_linear_pmf(const std::vector<double>& pmf) {
  ordered_json probs = ordered_json::array();
  ordered_json logs = ordered_json::array();
  for (double p : pmf) {
    probs.push_back(p);
    logs.push_back(p > 0.0 ? ordered_json(std::log(p)) : ordered_json(nullptr));
  }
  ordered_json j;
  j["probability"] = std::move(probs);
  j["log_probability"] = std::move(logs);
  return j;
}

ordered_json json_model(const NetworkModel& model) {
  ordered_json classes = ordered_json::array();
  for (const auto& c : model.classes)
    classes.push_back({{"kappa", c.kappa}, {"count", c.count}});
  return ordered_json{{"m", model.m}, {"classes", std::move(classes)}};
}

ordered_json envelope(const std::string& method) {
  ordered_json j;
  j["schema_version"] = 1;
  j["library"] = {{"name", kLibraryName}, {"version", kLibraryVersion}};
  j["generated_at_utc"] = utc_now();
  j["method"] = method;
  return j;
}

ordered_json json_class_law(int class_index, const ClassLaw& law) {
  ordered_json j;
  j["class"] = class_index + 1;
  if (law.kind == LawKind::Geometric) {
    j["law"] = "geometric";
    j["q"] = law.q;
    j["mean_length"] = law.q / (1.0 - law.q);
  } else {
    j["law"] = "scaled_exponential";
    j["scale_monomers"] = law.scale;
    j["mean_length"] = law.scale;
  }
  return j;
}

// ------------------------------------------------------------- csv pieces

void write_text_file(const std::string& path, const std::string& body) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write output file: " + path);
  out << body;
  if (!out) throw ValidationError("write failed for output file: " + path);
}

std::string csv_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string pmf_csv(const std::vector<double>& log_p) {
  std::string body = "value,probability,log_probability\n";
  for (std::size_t j = 0; j < log_p.size(); ++j) {
    body += std::to_string(j);
    body += ',';
    body += csv_double(std::exp(log_p[j]));
    body += ',';
    body += csv_double(log_p[j]);
    body += '\n';
  }
  return body;
}

std::string csv_base(const std::string& out_path) {
  const std::string suffix = ".csv";
  if (out_path.size() > suffix.size() &&
      out_path.compare(out_path.size() - suffix.size(), suffix.size(), suffix) == 0)
    return out_path.substr(0, out_path.size() - suffix.size());
  return out_path;
}

std::vector<double> to_log(const std::vector<double>& linear) {
  std::vector<double> out(linear.size());
  for (std::size_t i = 0; i < linear.size(); ++i)
    out[i] = linear[i] > 0.0 ? std::log(linear[i]) : kNegInf;
  return out;
}

// one pmf file per series, named {base}_{series}.csv
void write_series_csv(const std::string& out_path, const std::string& series,
                      const std::vector<double>& log_p,
                      std::vector<std::string>& written) {
  std::string path = csv_base(out_path) + "_" + series + ".csv";
  write_text_file(path, pmf_csv(log_p));
  written.push_back(path);
}

// --------------------------------------------------------------- methods

void emit(const RunConfig& rc, const ordered_json& doc) {
  if (rc.out.has_value()) {
    write_text_file(*rc.out, doc.dump(2) + "\n");
  } else {
    std::cout << doc.dump(2) << "\n";
  }
}

int run_exact(const RunConfig& rc) {
  auto model = require_model(rc);
  auto ex = exact_marginals(model, rc.caps);

  if (rc.format == "csv") {
    if (!rc.out.has_value())
      throw ValidationError("csv output needs --out to derive file names");
    std::vector<std::string> written;
    write_series_csv(*rc.out, "free_pool", ex.free_pool.log_p, written);
    for (std::size_t c = 0; c < ex.filament.size(); ++c)
      write_series_csv(*rc.out, "class_" + std::to_string(c + 1),
                       ex.filament[c].log_p, written);
    return 0;
  }

  ordered_json doc = envelope("exact");
  doc["config"] = {{"model", json_model(model)},
                   {"caps",
                    {{"max_pmf_cells", rc.caps.max_pmf_cells},
                     {"max_joint_states", rc.caps.max_joint_states}}}};
  ordered_json result;
  result["log_partition"] = ex.log_partition;
  result["free_pool"] = json_log_pmf(ex.free_pool);
  result["free_pool"]["mean"] = ex.free_pool.mean();
  ordered_json classes = ordered_json::array();
  for (std::size_t c = 0; c < ex.filament.size(); ++c) {
    ordered_json jc;
    jc["class"] = c + 1;
    jc["kappa"] = model.classes[c].kappa;
    jc["count"] = model.classes[c].count;
    jc["mean_length"] = ex.filament[c].mean();
    jc["p_positive"] = ex.filament[c].prob_positive();
    jc["pmf"] = json_log_pmf(ex.filament[c]);
    classes.push_back(std::move(jc));
  }
  result["classes"] = std::move(classes);
  doc["result"] = std::move(result);
  emit(rc, doc);
  return 0;
}

struct AsymptoticRun {
  RegimeResult res;
  ordered_json diagnostics;
};

AsymptoticRun run_asymptotic_core(const NetworkModel& model,
                                  const RunConfig& rc) {
  auto params = scale(model);
  const std::int64_t f1 = model.classes.front().count;

  std::string regime = rc.regime;
  if (regime == "auto") {
    auto tag = classify_regime(params, f1, rc.thresholds);
    if (tag == RegimeTag::Exact)
      throw RegimeError(
          "no asymptotic regime applies (boundary or small system); "
          "use the exact method instead");
    regime = to_string(tag);
  }

  AsymptoticRun run;
  auto fam = rate_family_from(params);
  if (regime == "linear") {
    double psi = solve_psi_linear(params);
    run.res = marginals_linear(params, psi);
    double w = (1.0 - psi) / (params.fbar.front() + 1.0 - psi);
    double lambda_resid = psi + fam.lambda_prime(std::log(1.0 / w));
    double theta = psi > 0.0 && psi < fam.mean
                       ? -ell_sum(fam, psi).derivative
                       : std::numeric_limits<double>::quiet_NaN();
    double ell_resid = std::isnan(theta) ? 0.0 : std::exp(-theta) - w;
    run.diagnostics = {{"psi", psi},
                       {"theta_at_psi", finite_or_null(theta)},
                       {"psi_equation_residual_lambda_form", lambda_resid},
                       {"psi_equation_residual_ell_form", ell_resid}};
  } else if (regime == "overloaded") {
    run.res = solve_overloaded(params);
    double theta1 = solve_theta(fam, 1.0);
    run.diagnostics = {{"theta_at_one", theta1},
                       {"ell_prime_at_one", -theta1},
                       {"tilt_residual", 1.0 + fam.lambda_prime(theta1)}};
  } else if (regime == "underloaded") {
    double ems = auxiliary_mean(model);
    run.res = solve_underloaded(params, model.m, f1, ems, rc.thresholds);
    run.diagnostics = {{"auxiliary_mean", ems},
                       {"scale_monomers", run.res.per_class.front().scale}};
  } else {
    throw ValidationError("unknown regime '" + regime +
                          "' (want auto, linear, overloaded, or underloaded)");
  }
  return run;
}

int run_asymptotic(const RunConfig& rc) {
  auto model = require_model(rc);
  if (rc.format == "csv")
    throw ValidationError(
        "asymptotic results are nested, not a flat pmf table; use json");
  auto run = run_asymptotic_core(model, rc);

  ordered_json doc = envelope("asymptotic");
  doc["config"] = {{"model", json_model(model)},
                   {"regime_requested", rc.regime},
                   {"thresholds",
                    {{"linear_fbar1", rc.thresholds.linear_fbar1},
                     {"min_f1", rc.thresholds.min_f1}}}};
  ordered_json result;
  result["regime"] = to_string(run.res.regime);
  result["psi"] = finite_or_null(run.res.psi);
  result["pool_fraction"] = run.res.pool_fraction;
  ordered_json laws = ordered_json::array();
  for (std::size_t c = 0; c < run.res.per_class.size(); ++c)
    laws.push_back(json_class_law(static_cast<int>(c), run.res.per_class[c]));
  result["per_class"] = std::move(laws);
  result["allocation"] = {{"pool", run.res.allocation.pool},
                          {"class1", run.res.allocation.class1},
                          {"rest", run.res.allocation.rest}};
  if (!run.res.note.empty()) result["note"] = run.res.note;
  result["diagnostics"] = std::move(run.diagnostics);
  doc["result"] = std::move(result);
  emit(rc, doc);
  return 0;
}

int run_simulate(const RunConfig& rc) {
  auto model = require_model(rc);
  SimConfig sim = rc.sim;
  sim.seed = rc.seed;
  auto est = gillespie_run(model, sim);

  if (rc.format == "csv") {
    if (!rc.out.has_value())
      throw ValidationError("csv output needs --out to derive file names");
    std::vector<std::string> written;
    write_series_csv(*rc.out, "free_pool", to_log(est.free_pool_pmf), written);
    for (std::size_t c = 0; c < est.filament_pmf.size(); ++c)
      write_series_csv(*rc.out, "class_" + std::to_string(c + 1),
                       to_log(est.filament_pmf[c]), written);
    return 0;
  }

  ordered_json doc = envelope("simulate");
  doc["config"] = {{"model", json_model(model)},
                   {"seed", est.seed},
                   {"events", sim.events},
                   {"burnin", sim.burnin_events},
                   {"lambda_scale", sim.lambda_scale}};
  ordered_json result;
  result["rng"] = est.rng_name;
  result["events_used"] = est.events_used;
  result["total_sim_time"] = est.total_sim_time;
  result["free_pool"] = json_linear_pmf(est.free_pool_pmf);
  ordered_json classes = ordered_json::array();
  for (std::size_t c = 0; c < est.filament_pmf.size(); ++c) {
    ordered_json jc;
    jc["class"] = c + 1;
    jc["pmf"] = json_linear_pmf(est.filament_pmf[c]);
    classes.push_back(std::move(jc));
  }
  result["classes"] = std::move(classes);
  doc["result"] = std::move(result);
  emit(rc, doc);
  return 0;
}

// geometric law materialized on {0..m} and renormalized, for comparisons
std::vector<double> geometric_pmf(double q, std::int64_t m) {
  std::vector<double> out(static_cast<std::size_t>(m) + 1);
  double total = 1.0 - std::pow(q, static_cast<double>(m) + 1.0);
  double p = (1.0 - q) / total;
  for (auto& x : out) {
    x = p;
    p *= q;
  }
  return out;
}

struct CompareRow {
  std::string series;
  std::string method;
  double mean = 0.0;
  double p_positive = 0.0;
  std::optional<double> tv;
  std::optional<double> max_abs;
};

int run_compare(const RunConfig& rc) {
  auto model = require_model(rc);
  std::vector<CompareRow> rows;
  std::vector<std::string> notes;

  // exact leg: the baseline every other method is measured against
  std::optional<ExactMarginals> exact;
  try {
    exact = exact_marginals(model, rc.caps);
  } catch (const CapacityError& e) {
    notes.push_back(std::string("exact method skipped: ") + e.what());
  }
  std::vector<std::vector<double>> exact_linear;
  if (exact.has_value()) {
    exact_linear.push_back(exact->free_pool.linear());
    for (const auto& f : exact->filament) exact_linear.push_back(f.linear());
    for (std::size_t s = 0; s < exact_linear.size(); ++s) {
      CompareRow row;
      row.series = s == 0 ? "free_pool" : "class_" + std::to_string(s);
      row.method = "exact";
      const LogPmf& pmf = s == 0 ? exact->free_pool : exact->filament[s - 1];
      row.mean = pmf.mean();
      row.p_positive = pmf.prob_positive();
      row.tv = 0.0;
      row.max_abs = 0.0;
      rows.push_back(std::move(row));
    }
  }

  auto against_exact = [&](std::size_t series_idx, const std::vector<double>& pmf,
                           CompareRow& row) {
    if (!exact.has_value()) return;
    auto d = compare_distributions(pmf, exact_linear[series_idx]);
    row.tv = d.tv;
    row.max_abs = d.max_abs;
  };

  // asymptotic leg: only when a regime applies
  try {
    auto run = run_asymptotic_core(model, rc);
    {
      CompareRow row;
      row.series = "free_pool";
      row.method = "asymptotic";
      row.mean = run.res.pool_fraction * static_cast<double>(model.m);
      row.p_positive = 1.0;
      rows.push_back(std::move(row));
    }
    for (std::size_t c = 0; c < run.res.per_class.size(); ++c) {
      CompareRow row;
      row.series = "class_" + std::to_string(c + 1);
      row.method = "asymptotic";
      const auto& law = run.res.per_class[c];
      if (law.kind == LawKind::Geometric) {
        row.mean = law.q / (1.0 - law.q);
        row.p_positive = law.q;
        against_exact(c + 1, geometric_pmf(law.q, model.m), row);
      } else {
        // continuous limit law: no lattice pmf to compare entrywise
        row.mean = law.scale;
        row.p_positive = 1.0;
      }
      rows.push_back(std::move(row));
    }
    if (!run.res.note.empty()) notes.push_back(run.res.note);
  } catch (const RegimeError& e) {
    notes.push_back(std::string("asymptotic method skipped: ") + e.what());
  }

  // simulation leg
  {
    SimConfig sim = rc.sim;
    sim.seed = rc.seed;
    auto est = gillespie_run(model, sim);
    auto series_mean = [](const std::vector<double>& pmf) {
      double mean = 0.0;
      for (std::size_t j = 0; j < pmf.size(); ++j)
        mean += static_cast<double>(j) * pmf[j];
      return mean;
    };
    {
      CompareRow row;
      row.series = "free_pool";
      row.method = "simulate";
      row.mean = series_mean(est.free_pool_pmf);
      row.p_positive = est.free_pool_pmf.empty()
                           ? 0.0
                           : 1.0 - est.free_pool_pmf.front();
      against_exact(0, est.free_pool_pmf, row);
      rows.push_back(std::move(row));
    }
    for (std::size_t c = 0; c < est.filament_pmf.size(); ++c) {
      CompareRow row;
      row.series = "class_" + std::to_string(c + 1);
      row.method = "simulate";
      row.mean = series_mean(est.filament_pmf[c]);
      row.p_positive = est.filament_pmf[c].empty()
                           ? 0.0
                           : 1.0 - est.filament_pmf[c].front();
      against_exact(c + 1, est.filament_pmf[c], row);
      rows.push_back(std::move(row));
    }
  }

  if (rc.format == "csv") {
    if (!rc.out.has_value())
      throw ValidationError("csv output needs --out to derive file names");
    std::string body = "series,method,mean,p_positive,tv_vs_exact,max_abs_vs_exact\n";
    for (const auto& row : rows) {
      body += row.series + ',' + row.method + ',' + csv_double(row.mean) + ',' +
              csv_double(row.p_positive) + ',';
      body += row.tv.has_value() ? csv_double(*row.tv) : std::string();
      body += ',';
      body += row.max_abs.has_value() ? csv_double(*row.max_abs) : std::string();
      body += '\n';
    }
    write_text_file(*rc.out, body);
    return 0;
  }

  ordered_json doc = envelope("compare");
  doc["config"] = {{"model", json_model(model)},
                   {"seed", rc.seed},
                   {"events", rc.sim.events},
                   {"burnin", rc.sim.burnin_events},
                   {"regime_requested", rc.regime}};
  ordered_json jrows = ordered_json::array();
  for (const auto& row : rows) {
    ordered_json j;
    j["series"] = row.series;
    j["method"] = row.method;
    j["mean"] = row.mean;
    j["p_positive"] = row.p_positive;
    j["tv_vs_exact"] = row.tv.has_value() ? ordered_json(*row.tv) : nullptr;
    j["max_abs_vs_exact"] =
        row.max_abs.has_value() ? ordered_json(*row.max_abs) : nullptr;
    jrows.push_back(std::move(j));
  }
  ordered_json result;
  result["rows"] = std::move(jrows);
  result["notes"] = notes;
  doc["result"] = std::move(result);
  emit(rc, doc);
  return 0;
}

int run_fleet(const RunConfig& rc) {
  if (rc.format == "csv")
    throw ValidationError("fleet results are nested, not a flat pmf table; use json");
  if (!rc.route_load.has_value() || !rc.locations.has_value())
    throw ValidationError("fleet needs --route-load and --locations");

  ordered_json doc = envelope("fleet");
  ordered_json cfg;
  cfg["route_load"] = *rc.route_load;
  cfg["locations"] = *rc.locations;
  ordered_json result;

  if (rc.fleet_m.has_value()) {
    cfg["m"] = *rc.fleet_m;
    auto s = fleet_service_level(*rc.fleet_m, *rc.route_load, *rc.locations);
    result["mode"] = "service_level";
    result["alpha"] = s.alpha;
    result["psi"] = s.psi;
    result["degenerate_no_transit"] = s.degenerate_no_transit;
  } else {
    if (!rc.alpha.has_value())
      throw ValidationError("fleet needs --alpha (target) or --fleet-m (evaluate)");
    cfg["target_alpha"] = *rc.alpha;
    auto sizing = fleet_min_customers({*rc.route_load, *rc.locations, *rc.alpha});
    result["mode"] = "sizing";
    result["m"] = sizing.m;
    result["m_quadratic"] = sizing.m_quadratic;
    result["m_exponential"] = sizing.m_exponential.has_value()
                                  ? ordered_json(*sizing.m_exponential)
                                  : nullptr;
    auto achieved = fleet_service_level(sizing.m, *rc.route_load, *rc.locations);
    result["achieved_alpha"] = achieved.alpha;
  }
  doc["config"] = std::move(cfg);
  doc["result"] = std::move(result);
  emit(rc, doc);
  return 0;
}

int run_bottleneck(const RunConfig& rc) {
  if (!rc.bkd_m.has_value())
    throw ValidationError("bottleneck needs --m (or m in [bottleneck])");
  if (rc.utilizations.empty())
    throw ValidationError("bottleneck needs at least one --utilization");
  std::int64_t node = rc.node.value_or(1);
  if (node < 1 || node > static_cast<std::int64_t>(rc.utilizations.size()))
    throw ValidationError("--node is 1-based into the utilization list");

  BottleneckSystem sys{*rc.bkd_m, rc.poisson_means, rc.utilizations};
  auto pmf = bottleneck_marginal(sys, static_cast<int>(node - 1), rc.caps);

  if (rc.format == "csv") {
    if (!rc.out.has_value())
      throw ValidationError("csv output needs --out to derive file names");
    write_text_file(*rc.out, pmf_csv(pmf.log_p));
    return 0;
  }

  ordered_json doc = envelope("bottleneck");
  doc["config"] = {{"m", *rc.bkd_m},
                   {"poisson_means", rc.poisson_means},
                   {"utilizations", rc.utilizations},
                   {"node", node}};
  ordered_json result;
  result["mean"] = pmf.mean();
  result["p_positive"] = pmf.prob_positive();
  result["pmf"] = json_log_pmf(pmf);
  doc["result"] = std::move(result);
  emit(rc, doc);
  return 0;
}

int dispatch(const RunConfig& rc) {
  if (rc.method == "exact") return run_exact(rc);
  if (rc.method == "asymptotic") return run_asymptotic(rc);
  if (rc.method == "simulate") return run_simulate(rc);
  if (rc.method == "compare") return run_compare(rc);
  if (rc.method == "fleet") return run_fleet(rc);
  if (rc.method == "bottleneck") return run_bottleneck(rc);
  throw std::logic_error("unreachable: unknown method");
}

int fail(int code, const std::string& kind, const std::string& message,
         const std::optional<std::string>& out_path) {
  std::cerr << "error (" << kind << "): " << message << "\n";
  if (out_path.has_value()) {
    ordered_json doc;
    doc["schema_version"] = 1;
    doc["library"] = {{"name", kLibraryName}, {"version", kLibraryVersion}};
    doc["generated_at_utc"] = utc_now();
    doc["error"] = {{"kind", kind}, {"message", message}};
    std::ofstream out(*out_path);
    if (out) out << doc.dump(2) << "\n";
  }
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"stationary length distributions of closed growth networks"};
  app.require_subcommand(1);
  app.fallthrough(true);

  std::string config_path;
  std::int64_t m = 0;
  std::vector<std::string> class_specs;
  std::string out_path;
  std::string format = "json";
  std::uint64_t seed = 1;
  std::string regime = "auto";
  std::int64_t events = 0, burnin = -1;
  double lambda_scale = 0.0;
  std::int64_t max_pmf_cells = 0, max_joint_states = 0;
  double th_linear = -1.0;
  std::int64_t th_count = -1;
  double alpha = 0.0, route_load = 0.0;
  std::int64_t locations = 0, fleet_m = 0;
  std::vector<double> poisson_means, utilizations;
  std::int64_t node = 0;

  auto* o_config = app.add_option("--config", config_path, "config file path");
  auto* o_m = app.add_option("--m", m, "total monomer count (population size)");
  auto* o_class = app.add_option("--class", class_specs,
                                 "filament class as kappa:count (repeatable)");
  auto* o_out = app.add_option("--out", out_path, "output file path");
  auto* o_format =
      app.add_option("--format", format, "output format: json or csv")
          ->check(CLI::IsMember({"json", "csv"}));
  auto* o_seed = app.add_option("--seed", seed, "simulation seed");
  auto* o_regime =
      app.add_option("--regime", regime,
                     "asymptotic regime: auto, linear, overloaded, underloaded")
          ->check(CLI::IsMember({"auto", "linear", "overloaded", "underloaded"}));
  auto* o_events = app.add_option("--events", events, "simulation events after burn-in");
  auto* o_burnin = app.add_option("--burnin", burnin, "simulation burn-in events");
  auto* o_lscale =
      app.add_option("--lambda-scale", lambda_scale, "attach rate per filament");
  auto* o_cells = app.add_option("--max-pmf-cells", max_pmf_cells,
                                 "cap on exact-engine table cells");
  auto* o_states = app.add_option("--max-joint-states", max_joint_states,
                                  "cap on brute-force joint states");
  auto* o_thlin = app.add_option("--threshold-linear", th_linear,
                                 "min bottleneck density for the linear regime");
  auto* o_thcnt = app.add_option("--threshold-count", th_count,
                                 "min bottleneck filament count for sublinear regimes");
  auto* o_alpha = app.add_option("--alpha", alpha, "fleet target service level");
  auto* o_load = app.add_option("--route-load", route_load, "fleet mean vehicles in transit");
  auto* o_loc = app.add_option("--locations", locations, "fleet station count");
  auto* o_fleetm = app.add_option("--fleet-m", fleet_m, "evaluate service level at this fleet size");
  auto* o_pois = app.add_option("--poisson-mean", poisson_means,
                                "bottleneck source mean (repeatable)")
                     ->delimiter(',');
  auto* o_util = app.add_option("--utilization", utilizations,
                                "bottleneck station utilization in (0,1) (repeatable)")
                     ->delimiter(',');
  auto* o_node = app.add_option("--node", node, "bottleneck station to report, 1-based");

  for (const char* verb : {"exact", "asymptotic", "simulate", "compare", "fleet",
                           "bottleneck"})
    app.add_subcommand(verb, "");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  // config file first, then command-line overrides
  FileConfig file;
  if (o_config->count() > 0) {
    try {
      file = parse_config_file(config_path);
    } catch (const ValidationError& e) {
      // a config file that fails to parse produces no output artifact
      std::cerr << "error (validation): " << e.what() << "\n";
      return 2;
    }
  }

  RunConfig rc;
  rc.method = app.get_subcommands().front()->get_name();

  std::optional<std::string> out;
  if (o_out->count() > 0) out = out_path;
  else if (file.out.has_value()) out = *file.out;
  rc.out = out;

  try {
    if (o_format->count() > 0) rc.format = format;
    else if (file.format.has_value()) {
      if (*file.format != "json" && *file.format != "csv")
        throw ValidationError("config format must be json or csv, got '" +
                              *file.format + "'");
      rc.format = *file.format;
    }
    if (o_regime->count() > 0) rc.regime = regime;
    else if (file.regime.has_value()) {
      static const char* allowed[] = {"auto", "linear", "overloaded", "underloaded"};
      if (std::find(std::begin(allowed), std::end(allowed), *file.regime) ==
          std::end(allowed))
        throw ValidationError("config regime must be auto, linear, overloaded, "
                              "or underloaded, got '" + *file.regime + "'");
      rc.regime = *file.regime;
    }
    if (o_seed->count() > 0) rc.seed = seed;
    else if (file.seed.has_value()) rc.seed = *file.seed;

    if (o_m->count() > 0) rc.m = m;
    else if (file.m.has_value()) rc.m = *file.m;

    const auto& specs = o_class->count() > 0 ? class_specs : file.class_specs;
    for (const auto& spec : specs)
      for (const auto& item : split_commas(spec))
        rc.classes.push_back(parse_class_spec(item));

    if (o_events->count() > 0) rc.sim.events = events;
    else if (file.events.has_value()) rc.sim.events = *file.events;
    if (o_burnin->count() > 0) rc.sim.burnin_events = burnin;
    else if (file.burnin.has_value()) rc.sim.burnin_events = *file.burnin;
    if (o_lscale->count() > 0) rc.sim.lambda_scale = lambda_scale;
    else if (file.lambda_scale.has_value()) rc.sim.lambda_scale = *file.lambda_scale;

    if (o_cells->count() > 0) rc.caps.max_pmf_cells = max_pmf_cells;
    else if (file.max_pmf_cells.has_value())
      rc.caps.max_pmf_cells = *file.max_pmf_cells;
    if (o_states->count() > 0) rc.caps.max_joint_states = max_joint_states;
    else if (file.max_joint_states.has_value())
      rc.caps.max_joint_states = *file.max_joint_states;

    if (o_thlin->count() > 0) rc.thresholds.linear_fbar1 = th_linear;
    else if (file.linear_fbar1.has_value())
      rc.thresholds.linear_fbar1 = *file.linear_fbar1;
    if (o_thcnt->count() > 0) rc.thresholds.min_f1 = th_count;
    else if (file.min_f1.has_value()) rc.thresholds.min_f1 = *file.min_f1;

    if (o_alpha->count() > 0) rc.alpha = alpha;
    else if (file.alpha.has_value()) rc.alpha = *file.alpha;
    if (o_load->count() > 0) rc.route_load = route_load;
    else if (file.route_load.has_value()) rc.route_load = *file.route_load;
    if (o_loc->count() > 0) rc.locations = locations;
    else if (file.locations.has_value()) rc.locations = *file.locations;
    if (o_fleetm->count() > 0) rc.fleet_m = fleet_m;
    else if (file.fleet_m.has_value()) rc.fleet_m = *file.fleet_m;

    // the bottleneck verb reads --m as its population when no [bottleneck] m
    if (rc.method == "bottleneck") {
      if (file.bkd_m.has_value()) rc.bkd_m = *file.bkd_m;
      if (o_m->count() > 0) rc.bkd_m = m;
      else if (!rc.bkd_m.has_value() && file.m.has_value()) rc.bkd_m = *file.m;
    }
    if (o_pois->count() > 0) rc.poisson_means = poisson_means;
    else
      for (const auto& s : file.poisson_means)
        rc.poisson_means.push_back(parse_double(s, "poisson_mean"));
    if (o_util->count() > 0) rc.utilizations = utilizations;
    else
      for (const auto& s : file.utilizations)
        rc.utilizations.push_back(parse_double(s, "utilization"));
    if (o_node->count() > 0) rc.node = node;
    else if (file.node.has_value()) rc.node = *file.node;

    return dispatch(rc);
  } catch (const ValidationError& e) {
    return fail(2, "validation", e.what(), out);
  } catch (const CapacityError& e) {
    return fail(3, "capacity", e.what(), out);
  } catch (const RegimeError& e) {
    return fail(4, "regime", e.what(), out);
  } catch (const std::exception& e) {
    return fail(1, "internal", e.what(), out);
  }
}
