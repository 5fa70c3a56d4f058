#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "biphoton/correlator.hpp"
#include "biphoton/pbm.hpp"

namespace biphoton::scenarios {

using json = nlohmann::ordered_json;

/// One canned experiment run: parameter snapshot, primary output (a
/// correlation map or a key-value table) and summary statistics, all
/// recomputable from the stored primary output.
struct ScenarioResult {
  std::string name;
  json params;
  CorrelationMap primary;                              // empty if table-shaped
  std::vector<std::pair<std::string, std::vector<double>>> extra_columns; // same axis
  std::vector<std::pair<std::string, double>> table;   // key-value alternative
  std::map<std::string, double> summary;

  bool has_map() const { return !primary.axis_a.empty(); }
};

struct ScenarioInfo {
  std::string name;
  std::string description;
  std::function<json()> defaults;
  std::function<ScenarioResult(const json& params, std::uint64_t seed)> run;
};

/// Stable public identifiers, in listing order.
const std::vector<ScenarioInfo>& registry();
const ScenarioInfo& find_scenario(const std::string& name);

/// The shipped two-letter object mask (1 = transmitting), 28 x 56 cells.
io::Bitmap builtin_letters();

// --- individual scenario entry points (parameters in lab units) ---

ScenarioResult classical_image(const json& params);
ScenarioResult lithography_fourier(const json& params);
ScenarioResult lithography_image(const json& params);
ScenarioResult ghost_image(const json& params);
ScenarioResult popper_run(const json& params);
ScenarioResult fourier_spectroscopy_notch(const json& params);
ScenarioResult entropy_scenario(const json& params);
ScenarioResult temporal_g2_scenario(const json& params);
ScenarioResult mixed_g2_scenario(const json& params);
ScenarioResult epr_stats_scenario(const json& params, std::uint64_t seed);

/// Shannon/Von Neumann entropy of a diagonal weight array, in nats.
double subsystem_entropy(const std::vector<double>& weights);

} // namespace biphoton::scenarios
