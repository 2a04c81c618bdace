#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qmqfc/dlcz.hpp"
#include "qmqfc/qfc.hpp"
#include "qmqfc/rng.hpp"

namespace qmqfc {

/// Photon-number statistics of the pair source. Thermal is the physical DLCZ
/// case; the others exist to test estimators.
enum class PairStatistics { thermal, poisson, single };

std::string to_string(PairStatistics stats);
PairStatistics parse_pair_statistics(const std::string& name);

/// Tallies of one 50/50-split (Hanbury Brown-Twiss) arm.
struct SplitTallies {
  std::uint64_t n_trials = 0;
  std::uint64_t clicks_a = 0;
  std::uint64_t clicks_b = 0;
  std::uint64_t coincidences_ab = 0;

  bool operator==(const SplitTallies&) const = default;
};

struct TrialCounts {
  std::uint64_t n_trials = 0;
  std::uint64_t clicks_w = 0;
  std::uint64_t clicks_r = 0;
  std::uint64_t coincidences_wr = 0;
  std::uint64_t clicks_w_split_a = 0;
  std::uint64_t clicks_w_split_b = 0;
  std::uint64_t coinc_w_ab = 0;
  std::uint64_t clicks_r_split_a = 0;
  std::uint64_t clicks_r_split_b = 0;
  std::uint64_t coinc_r_ab = 0;
  std::uint32_t clamp_events = 0;  ///< probabilities clamped into [0, 1] during setup

  SplitTallies write_split() const;
  SplitTallies read_split() const;

  /// Adds another block's tallies; n_trials and clamp_events are left alone.
  TrialCounts& merge_tallies(const TrialCounts& other);

  bool operator==(const TrialCounts&) const = default;
};

/// One Monte Carlo run of the combined memory + converter experiment.
struct SimulationConfig {
  ExperimentParams params = default_paper_params();
  ConversionDevice device = default_paper_device();
  DephasingModel deph = default_dephasing();
  double storage_time = 0.0;  ///< s
  std::uint64_t n_trials = 1'000'000;
  std::uint64_t seed = 1;
  /// true: write photon goes through the converter (efficiency
  /// write_collection x eta_dev(P) x eta_d, noise p_N(P)); false: reference
  /// filter cavity (efficiency eta_cw, noise p_Nw).
  bool converted = true;
  double pump_power = 0.29;       ///< W
  double write_collection = 0.6;  ///< write-mode fiber coupling ahead of the converter
  PairStatistics statistics = PairStatistics::thermal;
  unsigned workers = 1;
};

/// Per-trial event probabilities a configuration resolves to.
struct TrialProbabilities {
  double pair_mean = 0.0;
  double write_efficiency = 0.0;
  double write_noise = 0.0;
  double read_directional = 0.0;  ///< per stored excitation: eta_I(t) eta_r
  double read_random = 0.0;       ///< random emission into the mode, thinned by eta_r
  double read_noise = 0.0;
  std::uint32_t clamp_events = 0;
};

/// Throws DomainError when any component of the configuration is invalid.
void require_valid(const SimulationConfig& config);

TrialProbabilities trial_probabilities(const SimulationConfig& config);

/// Draws the number of pairs created in one trial with mean p_mean.
/// Thermal: P(n) = p^n / (1 + p)^(n+1). Throws DomainError for p_mean >= 1.
std::uint32_t sample_pair_number(double p_mean, CounterStream& stream,
                                 PairStatistics stats = PairStatistics::thermal);

/// Runs config.n_trials independent trials. Bit-identical for fixed
/// (config, seed) regardless of config.workers.
TrialCounts simulate(const SimulationConfig& config);

/// Click pattern of one trial.
struct TrialRecord {
  enum : std::uint8_t {
    kWrite = 1u << 0,
    kRead = 1u << 1,
    kWriteA = 1u << 2,
    kWriteB = 1u << 3,
    kReadA = 1u << 4,
    kReadB = 1u << 5,
  };
  std::uint8_t bits = 0;
};

/// Per-trial click records of the same trials simulate() would tally.
std::vector<TrialRecord> simulate_records(const SimulationConfig& config);

TrialCounts tally(const std::vector<TrialRecord>& records);

struct EmpiricalProbabilities {
  double p_cw = 0.0;
  double p_r = 0.0;
  double p_cwr = 0.0;
  /// Write-arm autocorrelation probability normalised so that
  /// p_cwcw / p_cw^2 = p_AB / (p_A p_B); likewise p_rr.
  double p_cwcw = 0.0;
  double p_rr = 0.0;
};

EmpiricalProbabilities empirical_probabilities(const TrialCounts& counts);

/// Converter characterization: weak coherent pulses (or a blocked input) at a
/// fixed pump power, threshold detection after the device.
struct ConversionRun {
  ConversionDevice device = default_paper_device();
  double pump_power = 0.287;
  double mu_in = 1.0;
  std::uint64_t n_trials = 1'000'000;
  std::uint64_t seed = 1;
  unsigned workers = 1;
};

struct ConversionCounts {
  std::uint64_t n_trials = 0;
  std::uint64_t clicks = 0;

  bool operator==(const ConversionCounts&) const = default;
};

ConversionCounts simulate_conversion(const ConversionRun& run);

std::string trial_counts_csv_header();
std::string trial_counts_csv_row(const TrialCounts& counts, std::uint64_t config_hash,
                                 std::uint64_t seed);

}  // namespace qmqfc
