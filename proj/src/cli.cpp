#include "dynbit/cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <set>
#include <vector>

#include "dynbit/energy.hpp"
#include "dynbit/errors.hpp"
#include "dynbit/estimators.hpp"
#include "dynbit/numeric.hpp"
#include "dynbit/parity.hpp"
#include "dynbit/process.hpp"
#include "dynbit/report.hpp"
#include "dynbit/rng.hpp"
#include "dynbit/runs.hpp"
#include "dynbit/timeset.hpp"

namespace dynbit::cli {

namespace {

using nlohmann::json;

struct FieldSpec {
  std::set<std::string> required;
  std::set<std::string> optional;
};

const std::map<std::string, FieldSpec>& schema() {
  static const std::map<std::string, FieldSpec> s = {
      {"simulate", {{"command", "k", "p", "horizon", "seed"}, {}}},
      {"capacity",
       {{"command", "set", "eps_hi", "eps_lo"}, {"per_decade", "seed"}}},
      {"dimprofile",
       {{"command", "set", "s", "r_hi", "r_lo"},
        {"per_decade", "grid_cap", "seed"}}},
      {"hitprob", {{"command", "set", "k", "ell", "p", "trials", "seed"}, {}}},
      {"verify",
       {{"command", "target"},
        {"set", "p", "ell", "ells", "k_grid", "t_grid", "trials", "seed",
         "grid_points"}}},
      {"runs",
       {{"command", "mode"},
        {"set", "n", "p", "ell", "horizon", "seeds", "seed", "theta",
         "theta_lo", "theta_hi", "theta_step", "n_max", "s_max"}}},
      {"parity",
       {{"command", "mode", "scheme"},
        {"n", "n_blocks", "trials", "seed", "lambda_hi", "lambda_lo",
         "per_decade", "diameter", "atoms"}}},
  };
  return s;
}

const std::set<std::string> kStochasticCommands = {"simulate", "hitprob"};

const std::set<std::string> kCommonOptional = {"out", "format"};

void require_field(const json& config, const std::string& key) {
  if (!config.contains(key))
    throw ConfigError("missing required config field: " + key);
}

std::uint64_t seed_of(const json& config) {
  if (!config.contains("seed"))
    throw ConfigError("seed is mandatory for stochastic commands");
  if (!config.at("seed").is_number_unsigned() &&
      !config.at("seed").is_number_integer())
    throw ConfigError("seed must be an unsigned integer");
  return config.at("seed").get<std::uint64_t>();
}

std::vector<std::int64_t> int_grid(const json& j) {
  auto grid = j.get<std::vector<std::int64_t>>();
  if (grid.empty()) throw ConfigError("k_grid must be nonempty");
  return grid;
}

timeset::TimeSet set_of(const json& config) {
  try {
    return timeset::TimeSet::from_json(config.at("set"));
  } catch (const std::exception& e) {
    throw ConfigError(std::string("bad time set spec: ") + e.what());
  }
}

// ---------------------------------------------------------------------------
// Command handlers. Each returns the `results` object.
// ---------------------------------------------------------------------------

json run_simulate(const json& config) {
  const auto traj = process::simulate_trajectory(
      config.at("k").get<std::int64_t>(), config.at("p").get<double>(),
      config.at("horizon").get<double>(), seed_of(config));
  json res;
  res["trajectory"] = traj.to_json();
  res["initial_sum"] = traj.initial_sum();
  res["event_count"] = traj.events.size();
  return res;
}

json run_capacity(const json& config) {
  const auto F = set_of(config);
  const auto grid = geometric_grid(config.at("eps_hi").get<double>(),
                                   config.at("eps_lo").get<double>(),
                                   config.value("per_decade", 8));
  const auto prof = timeset::capacity_profile(F, grid);
  json rows = json::array();
  for (std::size_t i = 0; i < prof.epsilons.size(); ++i)
    rows.push_back({{"eps", prof.epsilons[i]},
                    {"capacity", prof.capacities[i]}});
  return {{"profile", rows},
          {"alpha", prof.alpha},
          {"beta", prof.beta},
          {"doubling_max_ratio", prof.doubling_max_ratio}};
}

json run_dimprofile(const json& config) {
  const auto F = set_of(config);
  const auto grid = geometric_grid(config.at("r_hi").get<double>(),
                                   config.at("r_lo").get<double>(),
                                   config.value("per_decade", 6));
  const auto prof = energy::box_dim_profile(F, config.at("s").get<double>(),
                                            grid,
                                            config.value("grid_cap", 2000));
  json rows = json::array();
  for (std::size_t i = 0; i < prof.r_grid.size(); ++i)
    rows.push_back({{"r", prof.r_grid[i]},
                    {"packing", prof.packing_values[i]},
                    {"min_energy", prof.energy_values[i]}});
  return {{"profile", rows}, {"gamma", prof.gamma}, {"delta", prof.delta}};
}

json run_hitprob(const json& config, int threads) {
  const auto F = set_of(config);
  const auto k = config.at("k").get<std::int64_t>();
  const auto ell = config.at("ell").get<std::int64_t>();
  const double p = config.at("p").get<double>();
  const auto est = estimators::mc_hit_prob(
      k, ell, p, F, config.at("trials").get<std::int64_t>(), seed_of(config),
      threads);
  json res;
  res["estimate"] = est.to_json();

  // Oracle comparison where the exact chain is tractable.
  if (k <= 200) {
    if (F.kind() == timeset::TimeSet::Kind::Points &&
        F.components().size() <= 4096) {
      std::vector<double> times;
      for (const auto& iv : F.components()) times.push_back(iv.lo);
      const double exact = estimators::exact_hit_prob_finite(k, k - ell, p, times);
      res["oracle"] = {{"kind", "exact"}, {"value", exact}};
      const double halfwidth = 0.5 * (est.ci_hi - est.ci_lo);
      res["oracle"]["within_4_halfwidths"] =
          std::abs(est.p_hat - exact) <= 4.0 * std::max(halfwidth, 1e-12);
    } else {
      // Monotone grid refinement brackets the interval probability.
      auto grid_times = [&](int per_comp) {
        std::vector<double> times;
        for (const auto& iv : F.components()) {
          if (iv.hi == iv.lo) {
            times.push_back(iv.lo);
            continue;
          }
          for (int i = 0; i < per_comp; ++i)
            times.push_back(iv.lo + (iv.hi - iv.lo) * i / (per_comp - 1.0));
        }
        std::sort(times.begin(), times.end());
        times.erase(std::unique(times.begin(), times.end()), times.end());
        return times;
      };
      const auto comps = static_cast<int>(F.components().size());
      const int coarse = std::max(2, 64 / comps);
      const int fine = std::max(4, 1024 / comps);
      const double lo = estimators::exact_hit_prob_finite(k, k - ell, p,
                                                          grid_times(coarse));
      const double hi_grid = estimators::exact_hit_prob_finite(k, k - ell, p,
                                                               grid_times(fine));
      res["oracle"] = {{"kind", "bracket"},
                       {"grid_lower", lo},
                       {"grid_finer", hi_grid},
                       {"bracket_gap", hi_grid - lo}};
    }
  }
  return res;
}

json run_verify(const json& config, int threads) {
  require_field(config, "target");
  const auto target = config.at("target").get<std::string>();
  if (target == "thm1") {
    for (const char* f : {"set", "p", "ell", "k_grid", "trials"})
      require_field(config, f);
    const auto rep = estimators::verify_thm1(
        set_of(config), config.at("p").get<double>(),
        config.at("ell").get<std::int64_t>(), int_grid(config.at("k_grid")),
        config.at("trials").get<std::int64_t>(), seed_of(config), threads);
    return rep.to_json();
  }
  if (target == "thm3") {
    for (const char* f : {"set", "k_grid", "trials"})
      require_field(config, f);
    const auto rep = estimators::verify_thm3(
        set_of(config), int_grid(config.at("k_grid")),
        config.at("trials").get<std::int64_t>(), seed_of(config), threads);
    return rep.to_json();
  }
  if (target == "return") {
    require_field(config, "k_grid");
    std::vector<double> t_grid;
    if (config.contains("t_grid"))
      t_grid = config.at("t_grid").get<std::vector<double>>();
    const auto rep = estimators::verify_return_asymptotics(
        int_grid(config.at("k_grid")), t_grid);
    return rep.to_json();
  }
  if (target == "corrlen") {
    for (const char* f : {"p", "k_grid"}) require_field(config, f);
    const double p = config.at("p").get<double>();
    std::vector<std::int64_t> ells = {0, 1, 2};
    if (config.contains("ells"))
      ells = config.at("ells").get<std::vector<std::int64_t>>();
    const int points = config.value("grid_points", 64);
    json rows = json::array();
    for (std::int64_t ell : ells) {
      double lo_ratio = std::numeric_limits<double>::infinity();
      double hi_ratio = 0.0;
      for (std::int64_t k : int_grid(config.at("k_grid"))) {
        std::vector<double> times;
        for (int i = 0; i < points; ++i)
          times.push_back((1.0 / static_cast<double>(k)) * i / (points - 1.0));
        const double prob =
            estimators::exact_hit_prob_finite(k, k - ell, p, times);
        const double theory = std::exp(
            static_cast<double>(ell) * std::log(static_cast<double>(k)) +
            static_cast<double>(k) * std::log(p));
        const double ratio = prob / theory;
        rows.push_back(
            {{"k", k}, {"ell", ell}, {"prob", prob}, {"ratio", ratio}});
        lo_ratio = std::min(lo_ratio, ratio);
        hi_ratio = std::max(hi_ratio, ratio);
      }
      rows.push_back({{"ell", ell},
                      {"band_lo", lo_ratio},
                      {"band_hi", hi_ratio},
                      {"band_factor", hi_ratio / lo_ratio}});
    }
    return {{"target", "corrlen"}, {"entries", rows}};
  }
  throw ConfigError("unknown verify target: " + target);
}

json run_runs(const json& config, int threads) {
  (void)threads;
  require_field(config, "mode");
  const auto mode = config.at("mode").get<std::string>();
  if (mode == "er") {
    for (const char* f : {"n", "p", "ell", "seeds"}) require_field(config, f);
    const auto n = config.at("n").get<std::int64_t>();
    const double p = config.at("p").get<double>();
    const auto ell = config.at("ell").get<std::int64_t>();
    const auto seeds = config.at("seeds").get<int>();
    const auto master = seed_of(config);
    json rows = json::array();
    for (int s = 0; s < seeds; ++s) {
      const auto r = runs::erdos_renyi_check(
          n, p, ell,
          dynbit::derive_stream(master, static_cast<std::uint64_t>(s)));
      rows.push_back(json{{"seed_index", s},
                          {"max_run", r.max_run},
                          {"ratio", r.ratio},
                          {"truncated", r.truncated}});
    }
    return {{"mode", "er"}, {"entries", rows}};
  }
  if (mode == "dynsup") {
    for (const char* f : {"n", "p", "ell", "horizon"}) require_field(config, f);
    const auto r = runs::dynamical_run_sup(
        config.at("n").get<std::int64_t>(), config.at("p").get<double>(),
        config.at("ell").get<std::int64_t>(),
        config.at("horizon").get<double>(), seed_of(config));
    return {{"mode", "dynsup"},
            {"sup_value", r.sup_value},
            {"static_value", r.static_value},
            {"ticks", r.ticks},
            {"truncated", r.truncated}};
  }
  if (mode == "series") {
    for (const char* f : {"set", "p", "ell"}) require_field(config, f);
    const auto F = set_of(config);
    const double p = config.at("p").get<double>();
    const auto ell = config.at("ell").get<std::int64_t>();
    const auto n_max = config.value<std::int64_t>("n_max", 1000000);
    const double s_max = config.value("s_max", 1e5);
    json res;
    res["mode"] = "series";
    if (config.contains("theta")) {
      res["diagnostic"] =
          runs::series_diagnostic(F, config.at("theta").get<double>(), p, ell,
                                  n_max, s_max)
              .to_json();
    }
    if (config.contains("theta_lo") && config.contains("theta_hi")) {
      res["crossover_theta"] = runs::series_crossover_theta(
          F, p, ell, config.at("theta_lo").get<double>(),
          config.at("theta_hi").get<double>(),
          config.value("theta_step", 0.05), s_max);
    }
    if (!res.contains("diagnostic") && !res.contains("crossover_theta"))
      throw ConfigError("series mode needs theta or a theta range");
    return res;
  }
  throw ConfigError("unknown runs mode: " + mode);
}

json run_parity(const json& config, int threads) {
  require_field(config, "mode");
  const auto mode = config.at("mode").get<std::string>();
  const auto scheme = parity::BlockScheme::from_json(config.at("scheme"));
  if (mode == "kernels") {
    const auto grid = geometric_grid(config.value("lambda_hi", 1.0),
                                     config.value("lambda_lo", 1e-3),
                                     config.value("per_decade", 8));
    const auto n = config.value<std::int64_t>("n", parity::kInfiniteProduct);
    json rows = json::array();
    for (double lam : grid) {
      rows.push_back({{"lambda", lam},
                      {"f_n", parity::f_n(scheme, n, lam)},
                      {"product_kernel", parity::riesz_product(scheme, n, lam)},
                      {"one_plus_laplace", 1.0 + parity::laplace_g(scheme, lam)}});
    }
    return {{"mode", "kernels"}, {"entries", rows}};
  }
  if (mode == "sandwich") {
    const double D = config.value("diameter", 1.0);
    const double C = parity::sandwich_C(scheme, D);
    const auto grid =
        geometric_grid(D, config.value("lambda_lo", 1e-3),
                       config.value("per_decade", 8));
    bool upper_ok = true, lower_ok = true;
    double min_upper_margin = std::numeric_limits<double>::infinity();
    double min_lower_margin = std::numeric_limits<double>::infinity();
    for (double lam : grid) {
      const double kern = parity::riesz_product(scheme, parity::kInfiniteProduct, lam);
      const double lg = parity::laplace_g(scheme, lam);
      upper_ok = upper_ok && kern <= (1.0 + lg) * (1.0 + 1e-9);
      lower_ok =
          lower_ok && kern >= (1.0 + lg) / (4.0 * (1.0 + C)) * (1.0 - 1e-9);
      min_upper_margin = std::min(min_upper_margin, (1.0 + lg) - kern);
      min_lower_margin =
          std::min(min_lower_margin, kern - (1.0 + lg) / (4.0 * (1.0 + C)));
    }
    // Quadratic-form check on a uniform measure.
    const int atoms = config.value("atoms", 256);
    energy::DiscreteMeasure mu;
    for (int i = 0; i < atoms; ++i) {
      mu.atoms.push_back(D * i / (atoms - 1.0));
      mu.weights.push_back(1.0 / atoms);
    }
    const auto ij = parity::energy_I_J(scheme, mu);
    const double subprob_mass = 1.0 - ij.diagonal_mass;
    const bool quad_upper = ij.I_offdiag <= subprob_mass + ij.J_offdiag + 1e-9;
    const bool quad_lower =
        ij.I_offdiag >=
        (subprob_mass + ij.J_offdiag) / (4.0 * (1.0 + C)) - 1e-9;
    return {{"mode", "sandwich"},
            {"C", C},
            {"pointwise_upper_ok", upper_ok},
            {"pointwise_lower_ok", lower_ok},
            {"min_upper_margin", min_upper_margin},
            {"min_lower_margin", min_lower_margin},
            {"I_offdiag", ij.I_offdiag},
            {"J_offdiag", ij.J_offdiag},
            {"quadratic_upper_ok", quad_upper},
            {"quadratic_lower_ok", quad_lower}};
  }
  if (mode == "tm") {
    for (const char* f : {"n_blocks", "trials"}) require_field(config, f);
    const auto est = parity::simulate_T_m(
        scheme, config.at("n_blocks").get<int>(),
        config.at("trials").get<std::int64_t>(), seed_of(config), threads);
    return {{"mode", "tm"}, {"estimate", est.to_json()}};
  }
  throw ConfigError("unknown parity mode: " + mode);
}

}  // namespace

void validate_config(const json& config) {
  if (!config.is_object()) throw ConfigError("config must be a JSON object");
  require_field(config, "command");
  const auto command = config.at("command").get<std::string>();
  const auto it = schema().find(command);
  if (it == schema().end()) throw ConfigError("unknown command: " + command);

  for (const auto& key : it->second.required) require_field(config, key);
  for (const auto& [key, value] : config.items()) {
    (void)value;
    if (!it->second.required.count(key) && !it->second.optional.count(key) &&
        !kCommonOptional.count(key))
      throw ConfigError("unknown config field: " + key);
  }
  if (kStochasticCommands.count(command)) (void)seed_of(config);
  if (config.contains("format")) {
    const auto fmt = config.at("format").get<std::string>();
    if (fmt != "json" && fmt != "csv")
      throw ConfigError("format must be json or csv");
  }
}

json run_config(const json& config, int threads) {
  validate_config(config);
  const auto command = config.at("command").get<std::string>();

  json results;
  if (command == "simulate") results = run_simulate(config);
  else if (command == "capacity") results = run_capacity(config);
  else if (command == "dimprofile") results = run_dimprofile(config);
  else if (command == "hitprob") results = run_hitprob(config, threads);
  else if (command == "verify") results = run_verify(config, threads);
  else if (command == "runs") results = run_runs(config, threads);
  else if (command == "parity") results = run_parity(config, threads);
  else throw ConfigError("unknown command: " + command);

  json document;
  document["config"] = config;
  document["config_hash"] = report::config_hash(config);
  if (config.contains("seed"))
    document["seed"] = config.at("seed").get<std::uint64_t>();
  document["command"] = command;
  document["results"] = results;
  return document;
}

std::string render_csv(const json& document) {
  report::CsvTable table;
  table.comments.push_back("config_hash=" +
                           document.at("config_hash").get<std::string>());
  if (document.contains("seed"))
    table.comments.push_back("seed=" +
                             std::to_string(document.at("seed").get<std::uint64_t>()));
  table.comments.push_back("command=" +
                           document.at("command").get<std::string>());

  const auto& results = document.at("results");
  // Find the main table: the first array-of-objects field.
  const json* rows = nullptr;
  for (const auto& key : {"profile", "entries"}) {
    if (results.contains(key) && results.at(key).is_array()) {
      rows = &results.at(key);
      break;
    }
  }
  if (rows == nullptr || rows->empty()) {
    // No tabular payload: emit flat key/value pairs.
    table.columns = {"key", "value"};
    for (const auto& [key, value] : results.items())
      if (value.is_primitive())
        table.rows.push_back({key, value.dump()});
    return table.render();
  }

  std::set<std::string> cols;
  for (const auto& row : *rows)
    for (const auto& [key, value] : row.items()) {
      (void)value;
      cols.insert(key);
    }
  table.columns.assign(cols.begin(), cols.end());
  for (const auto& row : *rows) {
    std::vector<std::string> cells;
    for (const auto& col : table.columns) {
      if (!row.contains(col)) {
        cells.push_back("");
      } else if (row.at(col).is_number_float()) {
        cells.push_back(report::format_double(row.at(col).get<double>()));
      } else {
        cells.push_back(row.at(col).dump());
      }
    }
    table.rows.push_back(std::move(cells));
  }
  return table.render();
}

int run(const CliOptions& options) {
  try {
    std::ifstream in(options.config_path);
    if (!in) throw ConfigError("cannot open config: " + options.config_path);
    json config;
    try {
      config = json::parse(in);
    } catch (const std::exception& e) {
      throw ConfigError(std::string("config parse error: ") + e.what());
    }
    if (options.seed_override) config["seed"] = *options.seed_override;
    if (options.out_override) config["out"] = *options.out_override;
    if (options.format_override) config["format"] = *options.format_override;

    const auto document = run_config(config, options.threads);

    const std::string format = config.value("format", "json");
    const std::string payload =
        format == "csv" ? render_csv(document) : document.dump(2) + "\n";
    if (config.contains("out")) {
      report::write_text_file(config.at("out").get<std::string>(), payload);
    } else {
      std::cout << payload;
    }
    return kExitOk;
  } catch (const ConfigError& e) {
    std::cerr << json{{"error", {{"code", kExitConfig},
                                 {"type", "config"},
                                 {"message", e.what()}}}}
                     .dump()
              << "\n";
    return kExitConfig;
  } catch (const BudgetError& e) {
    std::cerr << json{{"error", {{"code", kExitBudget},
                                 {"type", "budget"},
                                 {"message", e.what()}}}}
                     .dump()
              << "\n";
    return kExitBudget;
  } catch (const std::exception& e) {
    std::cerr << json{{"error", {{"code", kExitNumeric},
                                 {"type", "numeric"},
                                 {"message", e.what()}}}}
                     .dump()
              << "\n";
    return kExitNumeric;
  }
}

}  // namespace dynbit::cli
