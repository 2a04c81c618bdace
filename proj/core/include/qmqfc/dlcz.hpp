#pragma once

#include <cstdint>

#include "qmqfc/params.hpp"

namespace qmqfc {

/// Motional dephasing of the stored spin-wave.
///
/// The coherence time satisfies tau = sqrt(m / (k_B T dk^2)) exactly among the
/// stored fields; construction rejects T <= 0 and dk <= 0.
class DephasingModel {
 public:
  static DephasingModel from_temperature(double atomic_mass, double temperature, double delta_k,
                                         const PhysicalConstants& constants = {});
  static DephasingModel from_coherence_time(double atomic_mass, double tau, double delta_k,
                                            const PhysicalConstants& constants = {});

  double atomic_mass() const { return atomic_mass_; }
  double temperature() const { return temperature_; }
  double delta_k() const { return delta_k_; }
  double tau() const { return tau_; }
  double boltzmann_k() const { return boltzmann_k_; }

  /// Standard deviation of one velocity component, sqrt(k_B T / m).
  double velocity_spread() const;

  bool operator==(const DephasingModel&) const = default;

 private:
  DephasingModel(double mass, double temperature, double delta_k, double boltzmann_k);

  double atomic_mass_;
  double temperature_;
  double delta_k_;
  double boltzmann_k_;
  double tau_;
};

/// 87Rb, 780 nm write pulse and photon 3 degrees apart, tau = 23.6 us.
DephasingModel default_dephasing();

/// |k_W - k_w| for plane waves of the given wavelengths separated by `angle`.
double delta_k_from_geometry(double lambda_write_pulse, double lambda_write_photon, double angle);

double coherence_time(double atomic_mass, double temperature, double delta_k,
                      const PhysicalConstants& constants = {});
double temperature_from_tau(double atomic_mass, double tau, double delta_k,
                            const PhysicalConstants& constants = {});

/// eta0 exp(-t^2 / tau^2).
double intrinsic_retrieval(double t, double eta0, double tau);

struct DetectionProbabilities {
  double p_cw = 0.0;   ///< write (heralding) click
  double p_r = 0.0;    ///< read click
  double p_cwr = 0.0;  ///< coincidence
};

/// Noise-free detection probabilities after storage time t.
DetectionProbabilities detection_probabilities(double t, const ExperimentParams& params,
                                               const DephasingModel& deph);

/// eta_ret = p_cwr / p_cw in closed form.
double retrieval_efficiency_closed(double t, const ExperimentParams& params,
                                   const DephasingModel& deph);

/// g2_cw,r = p_cwr / (p_cw p_r) in closed form. Throws DomainError for p = 0.
double g2_cross_closed(double t, const ExperimentParams& params, const DephasingModel& deph);

struct McEstimate {
  double mean = 0.0;
  double stderr_mean = 0.0;
};

/// Brute-force spin-wave overlap |1/N sum_j exp(i dk v_j t)|^2 averaged over
/// independent velocity draws. Deterministic for fixed (seed, n_atoms,
/// realizations) irrespective of `workers`.
McEstimate dephasing_overlap_mc(std::uint64_t n_atoms, const DephasingModel& deph, double t,
                                std::uint64_t realizations, std::uint64_t seed,
                                unsigned workers = 1);

/// Expectation of dephasing_overlap_mc for finite N: (1 - 1/N) e^{-t^2/tau^2} + 1/N.
double expected_overlap(std::uint64_t n_atoms, double t, double tau);

}  // namespace qmqfc
