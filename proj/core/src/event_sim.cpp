#include "qmqfc/event_sim.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "parallel.hpp"
#include "qmqfc/errors.hpp"

namespace qmqfc {

namespace {

constexpr std::uint64_t kTrialDomain = 0x747269616C730000ULL;       // "trials"
constexpr std::uint64_t kConversionDomain = 0x71666364657600ULL;    // "qfcdev"
constexpr std::uint32_t kMaxPhotons = 1u << 20;

double clamp_probability(double raw, std::uint32_t& clamp_events) {
  const double v = std::clamp(raw, 0.0, 1.0);
  if (v != raw) ++clamp_events;
  return v;
}

std::uint32_t sample_poisson(double mean, CounterStream& stream) {
  if (mean <= 0.0) return 0;
  const double u = stream.uniform_open_closed();
  double prob = std::exp(-mean);
  double cdf = prob;
  std::uint32_t k = 0;
  while (u > cdf && k < kMaxPhotons) {
    ++k;
    prob *= mean / k;
    cdf += prob;
    if (prob == 0.0 && cdf < u) break;  // u lies in rounding slack above the last term
  }
  return k;
}

// Threshold form of one configuration, shared by simulate() and
// simulate_records() so both see identical trials.
struct TrialKernel {
  double pair_mean;
  PairStatistics stats;
  std::uint64_t write_eff;
  std::uint64_t write_noise;
  std::uint64_t read_dir;
  std::uint64_t read_random;
  std::uint64_t read_noise;
  std::uint64_t seed;

  explicit TrialKernel(const SimulationConfig& config) {
    const auto probs = trial_probabilities(config);
    pair_mean = probs.pair_mean;
    stats = config.statistics;
    write_eff = bernoulli_threshold(probs.write_efficiency);
    write_noise = bernoulli_threshold(probs.write_noise);
    read_dir = bernoulli_threshold(probs.read_directional);
    read_random = bernoulli_threshold(probs.read_random);
    read_noise = bernoulli_threshold(probs.read_noise);
    seed = config.seed;
  }

  std::uint8_t operator()(std::uint64_t trial) const {
    CounterStream stream(seed, trial, kTrialDomain);
    const std::uint32_t n = sample_pair_number(pair_mean, stream, stats);

    std::uint32_t write_photons = 0;
    for (std::uint32_t j = 0; j < n; ++j) write_photons += stream.bernoulli(write_eff);
    write_photons += stream.bernoulli(write_noise);

    std::uint32_t read_photons = 0;
    for (std::uint32_t j = 0; j < n; ++j) read_photons += stream.bernoulli(read_dir);
    read_photons += stream.bernoulli(read_random);
    read_photons += stream.bernoulli(read_noise);

    std::uint8_t bits = 0;
    if (write_photons > 0) {
      bits |= TrialRecord::kWrite;
      bits |= route(write_photons, stream, TrialRecord::kWriteA, TrialRecord::kWriteB);
    }
    if (read_photons > 0) {
      bits |= TrialRecord::kRead;
      bits |= route(read_photons, stream, TrialRecord::kReadA, TrialRecord::kReadB);
    }
    return bits;
  }

  // 50/50 beam splitter ahead of two threshold detectors.
  static std::uint8_t route(std::uint32_t photons, CounterStream& stream, std::uint8_t a,
                            std::uint8_t b) {
    std::uint8_t bits = 0;
    for (std::uint32_t j = 0; j < photons && bits != (a | b); ++j) {
      bits |= (stream() >> 63) ? a : b;
    }
    return bits;
  }
};

void accumulate(TrialCounts& counts, std::uint8_t bits) {
  const bool w = bits & TrialRecord::kWrite;
  const bool r = bits & TrialRecord::kRead;
  const bool wa = bits & TrialRecord::kWriteA;
  const bool wb = bits & TrialRecord::kWriteB;
  const bool ra = bits & TrialRecord::kReadA;
  const bool rb = bits & TrialRecord::kReadB;
  counts.clicks_w += w;
  counts.clicks_r += r;
  counts.coincidences_wr += w && r;
  counts.clicks_w_split_a += wa;
  counts.clicks_w_split_b += wb;
  counts.coinc_w_ab += wa && wb;
  counts.clicks_r_split_a += ra;
  counts.clicks_r_split_b += rb;
  counts.coinc_r_ab += ra && rb;
}

}  // namespace

std::string to_string(PairStatistics stats) {
  switch (stats) {
    case PairStatistics::thermal:
      return "thermal";
    case PairStatistics::poisson:
      return "poisson";
    case PairStatistics::single:
      return "single";
  }
  return "thermal";
}

PairStatistics parse_pair_statistics(const std::string& name) {
  if (name == "thermal") return PairStatistics::thermal;
  if (name == "poisson") return PairStatistics::poisson;
  if (name == "single") return PairStatistics::single;
  throw DomainError("unknown pair statistics '" + name + "'");
}

SplitTallies TrialCounts::write_split() const {
  return {n_trials, clicks_w_split_a, clicks_w_split_b, coinc_w_ab};
}

SplitTallies TrialCounts::read_split() const {
  return {n_trials, clicks_r_split_a, clicks_r_split_b, coinc_r_ab};
}

TrialCounts& TrialCounts::merge_tallies(const TrialCounts& other) {
  clicks_w += other.clicks_w;
  clicks_r += other.clicks_r;
  coincidences_wr += other.coincidences_wr;
  clicks_w_split_a += other.clicks_w_split_a;
  clicks_w_split_b += other.clicks_w_split_b;
  coinc_w_ab += other.coinc_w_ab;
  clicks_r_split_a += other.clicks_r_split_a;
  clicks_r_split_b += other.clicks_r_split_b;
  coinc_r_ab += other.coinc_r_ab;
  return *this;
}

void require_valid(const SimulationConfig& config) {
  require_valid(config.params);
  if (config.n_trials < 1) throw DomainError("simulation needs n_trials >= 1");
  if (!(config.storage_time >= 0.0)) throw DomainError("storage time must be non-negative");
  if (config.converted) {
    require_valid(config.device);
    if (!(config.pump_power >= 0.0)) throw DomainError("pump power must be non-negative");
    if (!(config.write_collection >= 0.0 && config.write_collection <= 1.0)) {
      throw DomainError("write_collection must lie in [0, 1]");
    }
  }
}

TrialProbabilities trial_probabilities(const SimulationConfig& config) {
  require_valid(config);
  const auto& params = config.params;
  TrialProbabilities out;
  out.pair_mean = params.p;
  if (config.converted) {
    out.write_efficiency = clamp_probability(
        config.write_collection * eta_device(config.pump_power, config.device) *
            config.device.detector_eff,
        out.clamp_events);
    const auto noise = noise_probability(config.pump_power, config.device);
    out.write_noise = noise.value;
    out.clamp_events += noise.clamped;
  } else {
    out.write_efficiency = params.eta_cw;
    out.write_noise = params.p_noise_w;
  }
  const double eta_i =
      intrinsic_retrieval(config.storage_time, params.eta_ret_intrinsic, config.deph.tau());
  out.read_directional = eta_i * params.eta_r;
  out.read_random =
      clamp_probability(params.random_emission_weight() * (1.0 - eta_i), out.clamp_events) *
      params.eta_r;
  out.read_noise = params.p_noise_r;
  return out;
}

std::uint32_t sample_pair_number(double p_mean, CounterStream& stream, PairStatistics stats) {
  if (!(p_mean >= 0.0)) throw DomainError("mean pair number must be non-negative");
  switch (stats) {
    case PairStatistics::thermal: {
      if (p_mean >= 1.0) throw DomainError("thermal pair model needs p_mean < 1");
      const double q = p_mean / (1.0 + p_mean);  // P(n >= k) = q^k
      const double u = stream.uniform_open_closed();
      if (u > q) return 0;
      const double n = std::floor(std::log(u) / std::log(q));
      return static_cast<std::uint32_t>(std::min<double>(n, kMaxPhotons));
    }
    case PairStatistics::poisson:
      return sample_poisson(p_mean, stream);
    case PairStatistics::single:
      if (p_mean > 1.0) throw DomainError("single-photon source needs p_mean <= 1");
      return stream.uniform_open_closed() <= p_mean ? 1u : 0u;
  }
  return 0;
}

TrialCounts simulate(const SimulationConfig& config) {
  const TrialKernel kernel(config);
  const auto workers = std::max(1u, config.workers);
  std::vector<TrialCounts> partial(workers);
  detail::parallel_blocks(config.n_trials, workers,
                          [&](std::uint64_t begin, std::uint64_t end, unsigned block) {
                            TrialCounts local;
                            for (std::uint64_t i = begin; i < end; ++i) {
                              accumulate(local, kernel(i));
                            }
                            partial[block] = local;
                          });
  TrialCounts counts;
  counts.n_trials = config.n_trials;
  counts.clamp_events = trial_probabilities(config).clamp_events;
  for (const auto& p : partial) counts.merge_tallies(p);
  return counts;
}

std::vector<TrialRecord> simulate_records(const SimulationConfig& config) {
  const TrialKernel kernel(config);
  std::vector<TrialRecord> records(config.n_trials);
  detail::parallel_blocks(config.n_trials, config.workers,
                          [&](std::uint64_t begin, std::uint64_t end, unsigned) {
                            for (std::uint64_t i = begin; i < end; ++i) {
                              records[i].bits = kernel(i);
                            }
                          });
  return records;
}

TrialCounts tally(const std::vector<TrialRecord>& records) {
  TrialCounts counts;
  counts.n_trials = records.size();
  for (const auto& r : records) accumulate(counts, r.bits);
  return counts;
}

EmpiricalProbabilities empirical_probabilities(const TrialCounts& counts) {
  if (counts.n_trials == 0) throw DomainError("empirical probabilities need n_trials >= 1");
  const double n = static_cast<double>(counts.n_trials);
  EmpiricalProbabilities out;
  out.p_cw = static_cast<double>(counts.clicks_w) / n;
  out.p_r = static_cast<double>(counts.clicks_r) / n;
  out.p_cwr = static_cast<double>(counts.coincidences_wr) / n;

  const auto split_normalised = [n](const SplitTallies& s, double p_single) {
    if (s.clicks_a == 0 || s.clicks_b == 0) return 0.0;
    // p_AB / (p_A p_B) rescaled onto the unsplit single rate
    const double ratio = static_cast<double>(s.coincidences_ab) * n /
                         (static_cast<double>(s.clicks_a) * static_cast<double>(s.clicks_b));
    return ratio * p_single * p_single;
  };
  out.p_cwcw = split_normalised(counts.write_split(), out.p_cw);
  out.p_rr = split_normalised(counts.read_split(), out.p_r);
  return out;
}

ConversionCounts simulate_conversion(const ConversionRun& run) {
  require_valid(run.device);
  if (!(run.mu_in >= 0.0)) throw DomainError("mean photon number must be non-negative");
  if (run.n_trials < 1) throw DomainError("conversion run needs n_trials >= 1");
  const auto detect = bernoulli_threshold(eta_device(run.pump_power, run.device) *
                                          run.device.detector_eff);
  const auto noise = bernoulli_threshold(noise_probability(run.pump_power, run.device).value);
  const auto workers = std::max(1u, run.workers);
  std::vector<std::uint64_t> partial(workers, 0);
  detail::parallel_blocks(
      run.n_trials, workers, [&](std::uint64_t begin, std::uint64_t end, unsigned block) {
        std::uint64_t clicks = 0;
        for (std::uint64_t i = begin; i < end; ++i) {
          CounterStream stream(run.seed, i, kConversionDomain);
          const std::uint32_t photons = sample_poisson(run.mu_in, stream);
          std::uint32_t detected = 0;
          for (std::uint32_t j = 0; j < photons; ++j) detected += stream.bernoulli(detect);
          detected += stream.bernoulli(noise);
          clicks += detected > 0;
        }
        partial[block] = clicks;
      });
  ConversionCounts counts;
  counts.n_trials = run.n_trials;
  for (auto c : partial) counts.clicks += c;
  return counts;
}

std::string trial_counts_csv_header() {
  return "config_hash,seed,n_trials,clicks_w,clicks_r,coincidences_wr,clicks_w_split_a,"
         "clicks_w_split_b,coinc_w_ab,clicks_r_split_a,clicks_r_split_b,coinc_r_ab,"
         "clamp_events";
}

std::string trial_counts_csv_row(const TrialCounts& c, std::uint64_t config_hash,
                                 std::uint64_t seed) {
  return fmt::format("{:016x},{},{},{},{},{},{},{},{},{},{},{},{}", config_hash, seed,
                     c.n_trials, c.clicks_w, c.clicks_r, c.coincidences_wr, c.clicks_w_split_a,
                     c.clicks_w_split_b, c.coinc_w_ab, c.clicks_r_split_a, c.clicks_r_split_b,
                     c.coinc_r_ab, c.clamp_events);
}

}  // namespace qmqfc
