#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "qmqfc/dlcz.hpp"
#include "qmqfc/event_sim.hpp"
#include "qmqfc/params.hpp"
#include "qmqfc/qfc.hpp"

namespace qmqfc {

/// [simulation] section.
struct SimulationSection {
  double storage_time = 0.0;  ///< s
  std::uint64_t trials = 1'000'000;
  std::uint64_t seed = 1;
  bool converted = true;
  double pump_power = 0.29;  ///< W
  double write_collection = 0.6;
  PairStatistics statistics = PairStatistics::thermal;

  bool operator==(const SimulationSection&) const = default;
};

/// [sweep] section: grids used by the reproduction commands.
struct SweepSection {
  std::vector<double> pump_powers;    ///< W
  bool include_optimum = true;        ///< add the P_opt row to pump_powers
  double mu_in = 1.0;                 ///< photons per pulse at the converter input
  std::vector<double> mu_values;      ///< snr-curve grid
  double snr_pump_power = 0.287;      ///< W
  std::vector<double> write_powers;   ///< W
  std::vector<double> storage_times;  ///< s
  std::string table1_mode = "published";  ///< published | simulated

  bool operator==(const SweepSection&) const = default;
};

/// [link] section.
struct LinkSection {
  double atten_telecom = 0.2;  ///< dB/km
  double atten_near = 3.5;     ///< dB/km
  double eta_dev = 0.10;       ///< device efficiency used for the crossover
  std::vector<double> eta_devs;       ///< equivalent-length table
  std::vector<double> storage_times;  ///< s

  bool operator==(const LinkSection&) const = default;
};

/// Everything a run needs; every field has a default.
struct RunConfig {
  PhysicalConstants constants;
  ExperimentParams experiment = default_paper_params();
  WritePowerMap power_map;
  DephasingModel dephasing = default_dephasing();
  ConversionDevice device = default_paper_device();
  SimulationSection simulation;
  SweepSection sweep;
  LinkSection link;

  bool operator==(const RunConfig&) const = default;
};

RunConfig default_run_config();

/// Parses INI text. Keys may appear in any order; unknown sections or keys,
/// malformed numbers and invalid parameter sets throw ConfigError.
RunConfig parse_config(std::string_view text);

/// Reads and parses a file. Missing or unreadable files throw ConfigError.
RunConfig load_config(const std::filesystem::path& path);

/// INI text that parses back to an equal RunConfig.
std::string serialize_config(const RunConfig& config);

/// SimulationConfig for one run of the event simulator.
SimulationConfig make_simulation_config(const RunConfig& config, unsigned workers = 1);

/// Names of all recognised keys, "section.key".
std::vector<std::string> known_config_keys();

}  // namespace qmqfc
