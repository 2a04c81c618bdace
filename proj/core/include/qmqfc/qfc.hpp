#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qmqfc/dlcz.hpp"

namespace qmqfc {

struct FilterElement {
  std::string name;
  double extinction_db = 0.0;  ///< at the pump wavelength
  double transmission = 1.0;   ///< at the signal wavelength

  bool operator==(const FilterElement&) const = default;
};

/// Ordered filter stages after the waveguide.
struct FilterChain {
  std::vector<FilterElement> elements;

  bool operator==(const FilterChain&) const = default;
};

/// Two bandpass filters (100 dB), FBG (44 dB) and etalon (11 dB); signal
/// transmissions multiply to 36 %.
FilterChain paper_filter_chain();

struct ChainSummary {
  double extinction_db = 0.0;
  double transmission = 1.0;
};

/// Total pump extinction (dB, additive) and signal transmission (product).
/// Throws DomainError on an empty chain or out-of-range element.
ChainSummary chain_extinction(const FilterChain& chain);

/// Waveguide frequency converter with its passive loss chain and noise model.
struct ConversionDevice {
  double eta_n = 0.61;        ///< normalized efficiency, 1/(W cm^2)
  double length = 3.0;        ///< waveguide length, cm
  double eta_int_max = 0.72;  ///< saturation internal efficiency
  double eta_coupling = 0.74;
  FilterChain filters = paper_filter_chain();
  double eta_surfaces = 0.70;
  double eta_fiber = 0.75;
  double noise_coeff = 0.0;   ///< pump-induced noise, counts/(s W)
  double dark_rate = 10.0;    ///< counts/s
  double detector_eff = 0.10;
  double gate = 40e-9;        ///< s

  /// Passive transmission: coupling x filters x surfaces x fiber.
  double eta_loss() const;

  bool operator==(const ConversionDevice&) const = default;
};

/// Device with the reference constants and noise_coeff calibrated so that
/// snr(1, 0.287 W) = 452.
ConversionDevice default_paper_device();

/// Throws DomainError naming the first out-of-range field.
void require_valid(const ConversionDevice& dev);

/// Pump power at the first maximum of the sin^2 model, (pi / (2 L))^2 / eta_n.
double optimal_pump_power(const ConversionDevice& dev);

/// eta_int_max sin^2(L sqrt(eta_n P)).
double eta_internal(double pump_power, const ConversionDevice& dev);

/// eta_internal x eta_loss.
double eta_device(double pump_power, const ConversionDevice& dev);

struct ClampedProbability {
  double value = 0.0;
  bool clamped = false;  ///< raw value fell outside [0, 1]
};

/// (noise_coeff P + dark_rate) gate, clamped to [0, 1].
ClampedProbability noise_probability(double pump_power, const ConversionDevice& dev);

/// Detection-referred SNR = mu_in eta_dev eta_d / p_N. Returns +infinity when
/// p_N = 0 and the signal is non-zero, and 0 for zero signal.
double snr(double mu_in, double pump_power, const ConversionDevice& dev);

/// noise_coeff giving snr(mu_in, pump_power) == target_snr. Throws when the
/// dark counts alone already exceed the implied noise budget.
double calibrate_noise_coeff(const ConversionDevice& dev, double target_snr, double mu_in,
                             double pump_power);

/// Cross-correlation after adding uncorrelated noise to the heralding arm,
/// (g2_wr + 1/SNR) / (1 + 1/SNR).
double compose_g2_with_noise(double g2_wr, double snr);

/// Exact threshold-detector probabilities after OR-ing independent noise clicks
/// into each arm.
DetectionProbabilities add_independent_noise(const DetectionProbabilities& probs,
                                             double p_noise_w, double p_noise_r);

/// Fiber length (km) with the same loss as a device of efficiency eta_dev.
double equivalent_fiber_length(double eta_dev, double atten_db_per_km);

/// Distance (km) beyond which converting and sending over telecom fiber loses
/// less than sending unconverted; nullopt when the near-infrared fiber is not
/// lossier than the telecom one.
std::optional<double> crossover_distance(double eta_dev, double atten_near_db_per_km,
                                         double atten_telecom_db_per_km);

/// Fiber distance (km) travelled during storage time t.
double storage_to_fiber_length(double t, double group_velocity);

}  // namespace qmqfc
