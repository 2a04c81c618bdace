#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "qmqfc/config.hpp"
#include "qmqfc/csv.hpp"

namespace qmqfc::repro {

inline constexpr const char* kToolVersion = "0.3.0";

enum ExitCode : int {
  kSuccess = 0,
  kUsageError = 1,
  kConfigError = 2,
  kNumericalError = 3,
  kIoError = 4,
};

/// One file produced by a subcommand, relative to the output directory.
struct Output {
  std::string filename;
  std::string content;
};

/// Provenance record written next to every set of outputs.
struct RunManifest {
  std::string subcommand;
  std::string config_path;  ///< empty when running on built-in defaults
  std::uint64_t seed = 0;
  std::string out_dir;
  std::string tool_version = kToolVersion;
  std::string config_hash;  ///< FNV-1a of the config file bytes, 16 hex digits
  std::optional<std::uint64_t> trials;  ///< --trials override, if any

  bool operator==(const RunManifest&) const = default;
};

std::string manifest_json(const RunManifest& manifest);
RunManifest parse_manifest(const std::string& json_text);  ///< throws ConfigError

std::string hash_hex(std::uint64_t hash);

/// Seed for the index-th simulation of a sweep.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index, std::uint64_t tag);

/// Pump-power grid of qfc-curve: sweep.pump_powers plus P_opt when enabled.
std::vector<double> pump_grid(const RunConfig& config);

CsvTable qfc_curve(const RunConfig& config);

struct SnrCurve {
  CsvTable table;
  FitResult slope_fit;
};
SnrCurve snr_curve(const RunConfig& config, unsigned workers);

CsvTable correlations(const RunConfig& config, unsigned workers);

/// A fit is absent when fewer than four simulated points carry coincidences
/// or the solver fails; the matching note says why.
struct StorageDecay {
  CsvTable table;
  std::optional<FitResult> eta_ret_fit;
  std::optional<FitResult> g2_fit;
  std::string eta_ret_note;
  std::string g2_note;
  double tau_consistency = 0.0;  ///< |tau_eta - tau_g2| / combined sigma; nan without both fits
};
StorageDecay storage_decay(const RunConfig& config, unsigned workers);

CsvTable table1(const RunConfig& config, unsigned workers);

struct LinkBudget {
  CsvTable equivalent_lengths;
  CsvTable storage_distances;
  std::optional<double> crossover_km;
  std::string summary;
};
LinkBudget link_budget(const RunConfig& config);

struct SimulateResult {
  std::string counts_csv;
  CsvTable estimates;
};
SimulateResult simulate_once(const RunConfig& config, unsigned workers);

const std::vector<std::string>& subcommands();

/// Files a subcommand writes, in write order (manifest excluded).
std::vector<Output> run_subcommand(const std::string& subcommand, const RunConfig& config,
                                   unsigned workers);

struct Invocation {
  std::string subcommand;
  std::optional<std::filesystem::path> config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> trials;
  std::filesystem::path out_dir = "out";
  unsigned workers = 1;
};

/// Loads the config, writes manifest.json and then every output file.
/// Returns an ExitCode; diagnostics go to `err`.
int execute(const Invocation& inv, std::ostream& err);

/// Re-runs the invocation recorded in a manifest. A config file whose bytes no
/// longer match the recorded hash is a config error.
int replay(const std::filesystem::path& manifest_path,
           const std::optional<std::filesystem::path>& out_override, unsigned workers,
           std::ostream& err);

}  // namespace qmqfc::repro
