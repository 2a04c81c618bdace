#include "qmqfc/qfc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "qmqfc/errors.hpp"

namespace qmqfc {

namespace {

void check_fraction(double value, const char* name) {
  if (!(value >= 0.0 && value <= 1.0)) {
    throw DomainError(std::string("device field ") + name + " must lie in [0, 1]");
  }
}

void check_power(double pump_power) {
  if (!(pump_power >= 0.0)) throw DomainError("pump power must be non-negative");
}

}  // namespace

FilterChain paper_filter_chain() {
  return FilterChain{{
      {"bandpass", 100.0, 0.80},
      {"fbg", 44.0, 0.75},
      {"etalon", 11.0, 0.60},
  }};
}

ChainSummary chain_extinction(const FilterChain& chain) {
  if (chain.elements.empty()) throw DomainError("filter chain is empty");
  ChainSummary summary;
  for (const auto& e : chain.elements) {
    if (!(e.extinction_db >= 0.0)) {
      throw DomainError("filter '" + e.name + "' has negative extinction");
    }
    if (!(e.transmission > 0.0 && e.transmission <= 1.0)) {
      throw DomainError("filter '" + e.name + "' transmission must lie in (0, 1]");
    }
    summary.extinction_db += e.extinction_db;
    summary.transmission *= e.transmission;
  }
  return summary;
}

double ConversionDevice::eta_loss() const {
  return eta_coupling * chain_extinction(filters).transmission * eta_surfaces * eta_fiber;
}

void require_valid(const ConversionDevice& dev) {
  if (!(dev.eta_n > 0.0)) throw DomainError("device eta_n must be positive");
  if (!(dev.length > 0.0)) throw DomainError("device length must be positive");
  check_fraction(dev.eta_int_max, "eta_int_max");
  check_fraction(dev.eta_coupling, "eta_coupling");
  check_fraction(dev.eta_surfaces, "eta_surfaces");
  check_fraction(dev.eta_fiber, "eta_fiber");
  check_fraction(dev.detector_eff, "detector_eff");
  chain_extinction(dev.filters);
  if (!(dev.noise_coeff >= 0.0)) throw DomainError("noise_coeff must be non-negative");
  if (!(dev.dark_rate >= 0.0)) throw DomainError("dark_rate must be non-negative");
  if (!(dev.gate > 0.0)) throw DomainError("gate must be positive");
}

ConversionDevice default_paper_device() {
  ConversionDevice dev;
  dev.noise_coeff = calibrate_noise_coeff(dev, 452.0, 1.0, 0.287);
  return dev;
}

double optimal_pump_power(const ConversionDevice& dev) {
  const double x = std::numbers::pi / (2.0 * dev.length);
  return x * x / dev.eta_n;
}

double eta_internal(double pump_power, const ConversionDevice& dev) {
  check_power(pump_power);
  const double s = std::sin(dev.length * std::sqrt(dev.eta_n * pump_power));
  return std::min(dev.eta_int_max * s * s, dev.eta_int_max);
}

double eta_device(double pump_power, const ConversionDevice& dev) {
  return eta_internal(pump_power, dev) * dev.eta_loss();
}

ClampedProbability noise_probability(double pump_power, const ConversionDevice& dev) {
  check_power(pump_power);
  const double raw = (dev.noise_coeff * pump_power + dev.dark_rate) * dev.gate;
  ClampedProbability out;
  out.value = std::clamp(raw, 0.0, 1.0);
  out.clamped = out.value != raw;
  return out;
}

double snr(double mu_in, double pump_power, const ConversionDevice& dev) {
  if (!(mu_in >= 0.0)) throw DomainError("mean photon number must be non-negative");
  const double signal = mu_in * eta_device(pump_power, dev) * dev.detector_eff;
  const double noise = noise_probability(pump_power, dev).value;
  if (signal == 0.0) return 0.0;
  if (noise == 0.0) return std::numeric_limits<double>::infinity();
  return signal / noise;
}

double calibrate_noise_coeff(const ConversionDevice& dev, double target_snr, double mu_in,
                             double pump_power) {
  if (!(target_snr > 0.0)) throw DomainError("target SNR must be positive");
  if (!(pump_power > 0.0)) throw DomainError("calibration pump power must be positive");
  const double signal = mu_in * eta_device(pump_power, dev) * dev.detector_eff;
  const double rate = signal / target_snr / dev.gate;
  const double coeff = (rate - dev.dark_rate) / pump_power;
  if (!(coeff >= 0.0)) {
    throw DomainError("dark counts alone exceed the noise implied by the SNR anchor");
  }
  return coeff;
}

double compose_g2_with_noise(double g2_wr, double snr_value) {
  if (!(g2_wr >= 0.0)) throw DomainError("g2 must be non-negative");
  if (!(snr_value > 0.0)) throw DomainError("SNR must be positive");
  const double inv = 1.0 / snr_value;
  return (g2_wr + inv) / (1.0 + inv);
}

DetectionProbabilities add_independent_noise(const DetectionProbabilities& probs,
                                             double p_noise_w, double p_noise_r) {
  check_fraction(p_noise_w, "p_noise_w");
  check_fraction(p_noise_r, "p_noise_r");
  const double quiet_w = (1.0 - probs.p_cw) * (1.0 - p_noise_w);
  const double quiet_r = (1.0 - probs.p_r) * (1.0 - p_noise_r);
  const double quiet_both = (1.0 - probs.p_cw - probs.p_r + probs.p_cwr) *
                            (1.0 - p_noise_w) * (1.0 - p_noise_r);
  DetectionProbabilities out;
  out.p_cw = 1.0 - quiet_w;
  out.p_r = 1.0 - quiet_r;
  out.p_cwr = 1.0 - quiet_w - quiet_r + quiet_both;
  return out;
}

double equivalent_fiber_length(double eta_dev, double atten_db_per_km) {
  if (!(eta_dev > 0.0 && eta_dev <= 1.0)) throw DomainError("eta_dev must lie in (0, 1]");
  if (!(atten_db_per_km > 0.0)) throw DomainError("attenuation must be positive");
  const double loss_db = -10.0 * std::log10(eta_dev) + 0.0;  // +0.0 folds -0 to 0
  return loss_db / atten_db_per_km;
}

std::optional<double> crossover_distance(double eta_dev, double atten_near_db_per_km,
                                         double atten_telecom_db_per_km) {
  if (!(eta_dev > 0.0 && eta_dev <= 1.0)) throw DomainError("eta_dev must lie in (0, 1]");
  if (!(atten_telecom_db_per_km > 0.0)) throw DomainError("attenuation must be positive");
  if (!(atten_near_db_per_km > atten_telecom_db_per_km)) return std::nullopt;
  const double loss_db = -10.0 * std::log10(eta_dev) + 0.0;
  return loss_db / (atten_near_db_per_km - atten_telecom_db_per_km);
}

double storage_to_fiber_length(double t, double group_velocity) {
  if (!(t >= 0.0)) throw DomainError("storage time must be non-negative");
  if (!(group_velocity > 0.0)) throw DomainError("group velocity must be positive");
  return group_velocity * t / 1000.0;
}

}  // namespace qmqfc
