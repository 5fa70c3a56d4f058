// biphoton: scenario runner for two-photon correlation simulations.
//
// Exit codes: 0 success, 2 configuration error, 3 physics/geometry error,
// 4 sampling violation (the message names the admissible grid).

#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "biphoton/scenarios.hpp"
#include "biphoton/table.hpp"
#include "biphoton/units.hpp"
#include "biphoton/version.hpp"

namespace {

using biphoton::scenarios::ScenarioResult;
using json = nlohmann::ordered_json;

double parse_time_fs(const std::string& text) {
  std::size_t pos = 0;
  double v;
  try {
    v = std::stod(text, &pos);
  } catch (...) {
    throw biphoton::ConfigError("bad time value for --DL: " + text);
  }
  std::string unit = text.substr(pos);
  if (unit.empty() || unit == "fs") return v;
  if (unit == "ps") return v * 1e3;
  if (unit == "ns") return v * 1e6;
  throw biphoton::ConfigError("unknown time unit in --DL: " + unit);
}

void apply_set(json& params, const std::string& kv) {
  const auto eq = kv.find('=');
  if (eq == std::string::npos) throw biphoton::ConfigError("--set expects key=value, got " + kv);
  const std::string key = kv.substr(0, eq);
  const std::string val = kv.substr(eq + 1);
  if (val == "true" || val == "false") {
    params[key] = (val == "true");
    return;
  }
  try {
    std::size_t pos = 0;
    const double d = std::stod(val, &pos);
    if (pos == val.size()) {
      params[key] = d;
      return;
    }
  } catch (...) {
  }
  params[key] = val;
}

biphoton::io::OutputTable result_table(const ScenarioResult& r, const std::string& hash,
                                       std::uint64_t seed) {
  biphoton::io::OutputTable t;
  t.tool_version = biphoton::version_string;
  t.config_hash = hash;
  t.seed = seed;
  if (!r.has_map()) {
    for (const auto& [k, v] : r.table) {
      t.columns.push_back(k);
      if (t.rows.empty()) t.rows.emplace_back();
      t.rows[0].push_back(v);
    }
    return t;
  }
  const auto& map = r.primary;
  const bool temporal = map.mode == biphoton::CorrelationMap::Mode::temporal;
  const double unit = temporal ? biphoton::units::fs : biphoton::units::mm;
  const std::size_t na = map.axis_a.size();
  if (map.axis_b.empty()) {
    t.columns = {temporal ? "tau_fs" : "y_mm", "g2"};
    for (const auto& [name, col] : r.extra_columns) t.columns.push_back(name);
    for (std::size_t i = 0; i < na; ++i) {
      std::vector<double> row = {map.axis_a[i] / unit, map.values[i]};
      for (const auto& [name, col] : r.extra_columns) row.push_back(col[i]);
      t.rows.push_back(std::move(row));
    }
  } else {
    t.columns = {"x_mm", "y_mm", "g2"};
    for (std::size_t ib = 0; ib < map.axis_b.size(); ++ib)
      for (std::size_t ia = 0; ia < na; ++ia)
        t.rows.push_back({map.axis_a[ia] / biphoton::units::mm,
                          map.axis_b[ib] / biphoton::units::mm, map.values[ib * na + ia]});
  }
  return t;
}

int run_command(const std::string& scenario_name, const std::string& config_path,
                const std::string& out_dir, std::uint64_t seed, const json& overrides) {
  std::string name = scenario_name;
  json params;
  if (!config_path.empty()) {
    std::ifstream in(config_path);
    if (!in) throw biphoton::ConfigError("cannot open config file: " + config_path);
    json cfg;
    try {
      in >> cfg;
    } catch (const std::exception& e) {
      throw biphoton::ConfigError(std::string("config parse failure: ") + e.what());
    }
    if (cfg.contains("scenario")) {
      const std::string cfg_name = cfg["scenario"].get<std::string>();
      if (!name.empty() && name != cfg_name)
        throw biphoton::ConfigError("scenario name differs between command line and config");
      name = cfg_name;
    }
    if (cfg.contains("params")) params = cfg["params"];
    if (cfg.contains("seed")) seed = cfg["seed"].get<std::uint64_t>();
  }
  if (name.empty()) throw biphoton::ConfigError("missing scenario name");

  const auto& info = biphoton::scenarios::find_scenario(name);
  json merged = info.defaults();
  for (auto& [k, v] : params.items()) {
    if (!merged.contains(k)) throw biphoton::ConfigError("unknown parameter: " + k);
    merged[k] = v;
  }
  for (auto& [k, v] : overrides.items()) {
    if (!merged.contains(k)) throw biphoton::ConfigError("unknown parameter: " + k);
    merged[k] = v;
  }

  const std::string hash = biphoton::io::fnv1a_hex(name + "\n" + merged.dump());
  const ScenarioResult result = info.run(merged, seed);

  std::filesystem::create_directories(out_dir);
  const std::filesystem::path base = std::filesystem::path(out_dir) / name;
  const biphoton::io::OutputTable table = result_table(result, hash, seed);
  biphoton::io::write_csv(table, base.string() + ".csv");
  biphoton::io::write_gp(table, base.string() + ".gp.dat");

  json summary;
  summary["scenario"] = name;
  summary["version"] = biphoton::version_string;
  summary["config_hash"] = hash;
  summary["seed"] = seed;
  summary["params"] = merged;
  json stats;
  for (const auto& [k, v] : result.summary) stats[k] = v;
  summary["summary"] = stats;
  std::ofstream js(base.string() + "-summary.json", std::ios::binary);
  js << summary.dump(2) << "\n";

  std::cout << name << ": wrote " << base.string() << ".csv";
  for (const auto& [k, v] : result.summary) std::cout << "\n  " << k << " = " << v;
  std::cout << std::endl;
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-photon correlation simulations (Fresnel propagation of SPDC pairs)"};
  app.require_subcommand(1);

  auto* list = app.add_subcommand("list", "List available scenarios");

  auto* run = app.add_subcommand("run", "Run a scenario and write CSV/JSON/plot files");
  std::string scenario_name;
  run->add_option("scenario", scenario_name, "Scenario identifier (see `list`)");
  std::string config_path, out_dir = ".", grid, object_path, slit_b, dl_text;
  std::uint64_t seed = 0;
  std::vector<std::string> sets;
  double slit_a_mm = 0, slit_b_mm = 0, lambda_nm = 0, f_mm = 0, so_mm = 0, si_mm = 0;
  run->add_option("--config", config_path, "JSON config file");
  run->add_option("--out", out_dir, "Output directory");
  run->add_option("--seed", seed, "Random seed for sampled scenarios");
  run->add_option("--grid", grid, "Grid preset: coarse|standard|fine or N:spacing_um");
  run->add_option("--object", object_path, "Object bitmap (PBM/PGM)");
  run->add_option("--slit-a-mm", slit_a_mm, "Slit A width, mm");
  run->add_option("--slit-b", slit_b, "Slit B: width in mm, or 'open'");
  run->add_option("--slit-b-mm", slit_b_mm, "Slit B width, mm");
  run->add_option("--DL", dl_text, "Group-delay product D*L, e.g. 1ps or 1500fs");
  run->add_option("--lambda-nm", lambda_nm, "Wavelength, nm");
  run->add_option("--f-mm", f_mm, "Lens focal length, mm");
  run->add_option("--so-mm", so_mm, "Object distance, mm");
  run->add_option("--si-mm", si_mm, "Image distance, mm");
  run->add_option("--set", sets, "Override any parameter: key=value (repeatable)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (list->parsed()) {
      for (const auto& s : biphoton::scenarios::registry())
        std::cout << s.name << "  -  " << s.description << "\n";
      return 0;
    }

    json overrides;
    if (run->count("--grid")) overrides["grid"] = grid;
    if (run->count("--object")) overrides["object"] = object_path;
    if (run->count("--slit-a-mm")) overrides["slit_a_mm"] = slit_a_mm;
    if (run->count("--slit-b")) {
      if (slit_b == "open") {
        overrides["slit_b_open"] = true;
      } else {
        overrides["slit_b_open"] = false;
        overrides["slit_b_mm"] = std::stod(slit_b);
      }
    }
    if (run->count("--slit-b-mm")) {
      overrides["slit_b_open"] = false;
      overrides["slit_b_mm"] = slit_b_mm;
    }
    if (run->count("--DL")) overrides["DL_fs"] = parse_time_fs(dl_text);
    if (run->count("--lambda-nm")) overrides["lambda_nm"] = lambda_nm;
    if (run->count("--f-mm")) overrides["f_mm"] = f_mm;
    if (run->count("--so-mm")) overrides["so_mm"] = so_mm;
    if (run->count("--si-mm")) overrides["si_mm"] = si_mm;
    for (const auto& kv : sets) apply_set(overrides, kv);
    return run_command(scenario_name, config_path, out_dir, seed, overrides);
  } catch (const biphoton::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const biphoton::SamplingViolation& e) {
    std::cerr << "sampling violation: " << e.what() << "\n";
    return 4;
  } catch (const biphoton::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
