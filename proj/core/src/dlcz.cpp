#include "qmqfc/dlcz.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <vector>

#include "parallel.hpp"
#include "qmqfc/errors.hpp"
#include "qmqfc/rng.hpp"

namespace qmqfc {

namespace {

constexpr std::uint64_t kOverlapDomain = 0x6465706861736500ULL;  // "dephase"

void require_positive(double value, const char* what) {
  if (!(value > 0.0)) throw DomainError(std::string(what) + " must be strictly positive");
}

void require_time(double t) {
  if (!(t >= 0.0)) throw DomainError("storage time must be non-negative");
}

}  // namespace

DephasingModel::DephasingModel(double mass, double temperature, double delta_k,
                               double boltzmann_k)
    : atomic_mass_(mass),
      temperature_(temperature),
      delta_k_(delta_k),
      boltzmann_k_(boltzmann_k),
      tau_(std::sqrt(mass / (boltzmann_k * temperature * delta_k * delta_k))) {}

DephasingModel DephasingModel::from_temperature(double atomic_mass, double temperature,
                                                double delta_k,
                                                const PhysicalConstants& constants) {
  require_positive(atomic_mass, "atomic mass");
  require_positive(temperature, "temperature");
  require_positive(delta_k, "delta_k");
  return DephasingModel(atomic_mass, temperature, delta_k, constants.boltzmann_k());
}

DephasingModel DephasingModel::from_coherence_time(double atomic_mass, double tau,
                                                   double delta_k,
                                                   const PhysicalConstants& constants) {
  return from_temperature(atomic_mass, temperature_from_tau(atomic_mass, tau, delta_k, constants),
                          delta_k, constants);
}

double DephasingModel::velocity_spread() const {
  return std::sqrt(boltzmann_k_ * temperature_ / atomic_mass_);
}

DephasingModel default_dephasing() {
  const PhysicalConstants constants;
  const double dk = delta_k_from_geometry(780e-9, 780e-9, 3.0 * std::numbers::pi / 180.0);
  return DephasingModel::from_coherence_time(constants.rb87_mass(), 23.6e-6, dk, constants);
}

double delta_k_from_geometry(double lambda_write_pulse, double lambda_write_photon,
                             double angle) {
  require_positive(lambda_write_pulse, "write pulse wavelength");
  require_positive(lambda_write_photon, "write photon wavelength");
  if (!(angle >= 0.0 && angle <= std::numbers::pi)) {
    throw DomainError("angle must lie in [0, pi]");
  }
  const double k_pulse = 2.0 * std::numbers::pi / lambda_write_pulse;
  const double k_photon = 2.0 * std::numbers::pi / lambda_write_photon;
  // The law-of-cosines form cancels catastrophically at small angles.
  const double diff = k_pulse - k_photon;
  const double half = std::sin(0.5 * angle);
  return std::sqrt(diff * diff + 4.0 * k_pulse * k_photon * half * half);
}

double coherence_time(double atomic_mass, double temperature, double delta_k,
                      const PhysicalConstants& constants) {
  require_positive(atomic_mass, "atomic mass");
  require_positive(temperature, "temperature");
  require_positive(delta_k, "delta_k");
  return std::sqrt(atomic_mass / (constants.boltzmann_k() * temperature * delta_k * delta_k));
}

double temperature_from_tau(double atomic_mass, double tau, double delta_k,
                            const PhysicalConstants& constants) {
  require_positive(atomic_mass, "atomic mass");
  require_positive(tau, "tau");
  require_positive(delta_k, "delta_k");
  return atomic_mass / (constants.boltzmann_k() * tau * tau * delta_k * delta_k);
}

double intrinsic_retrieval(double t, double eta0, double tau) {
  require_time(t);
  if (!(eta0 >= 0.0 && eta0 <= 1.0)) throw DomainError("eta0 must lie in [0, 1]");
  require_positive(tau, "tau");
  const double x = t / tau;
  return eta0 * std::exp(-x * x);
}

DetectionProbabilities detection_probabilities(double t, const ExperimentParams& params,
                                               const DephasingModel& deph) {
  require_valid(params);
  const double eta_i = intrinsic_retrieval(t, params.eta_ret_intrinsic, deph.tau());
  const double random_r =
      params.excited_atoms() * (1.0 - eta_i) * (params.solid_angle_r / kFourPi) * params.xi_g;

  DetectionProbabilities out;
  out.p_cw = params.p * params.eta_cw;
  out.p_r = params.p * eta_i * params.eta_r + random_r * params.eta_r;
  out.p_cwr = params.p * eta_i * params.eta_cw * params.eta_r +
              params.p * params.eta_cw * random_r * params.eta_r;
  return out;
}

double retrieval_efficiency_closed(double t, const ExperimentParams& params,
                                   const DephasingModel& deph) {
  require_valid(params);
  const double eta_i = intrinsic_retrieval(t, params.eta_ret_intrinsic, deph.tau());
  const double floor = params.random_emission_weight();  // p xi_g for equal solid angles
  return params.eta_r * (eta_i * (1.0 - floor) + floor);
}

double g2_cross_closed(double t, const ExperimentParams& params, const DephasingModel& deph) {
  require_valid(params);
  if (!(params.p > 0.0)) throw DomainError("g2 is undefined without pairs (p = 0)");
  const double eta_i = intrinsic_retrieval(t, params.eta_ret_intrinsic, deph.tau());
  // rho xi_g with rho = dOmega_r / dOmega_w; rho = 1 recovers the textbook form.
  const double branching = params.random_emission_weight() / params.p;
  const double read_weight = eta_i * (1.0 - branching) + branching;
  if (!(read_weight > 0.0)) throw DomainError("g2 is undefined without read photons");
  return 1.0 + eta_i * (1.0 - params.p) /
                   (params.p * (eta_i * (1.0 - branching) + branching));
}

McEstimate dephasing_overlap_mc(std::uint64_t n_atoms, const DephasingModel& deph, double t,
                                std::uint64_t realizations, std::uint64_t seed,
                                unsigned workers) {
  if (n_atoms < 2) throw DomainError("dephasing oracle needs at least two atoms");
  if (realizations < 1) throw DomainError("dephasing oracle needs at least one realization");
  require_time(t);

  const double phase_scale = deph.delta_k() * deph.velocity_spread() * t;
  std::vector<double> overlaps(realizations);

  detail::parallel_blocks(realizations, workers,
                          [&](std::uint64_t begin, std::uint64_t end, unsigned) {
                            std::normal_distribution<double> normal(0.0, 1.0);
                            for (std::uint64_t r = begin; r < end; ++r) {
                              CounterStream stream(seed, r, kOverlapDomain);
                              normal.reset();
                              double re = 0.0;
                              double im = 0.0;
                              for (std::uint64_t j = 0; j < n_atoms; ++j) {
                                const double phase = phase_scale * normal(stream);
                                re += std::cos(phase);
                                im += std::sin(phase);
                              }
                              const double n = static_cast<double>(n_atoms);
                              overlaps[r] = (re * re + im * im) / (n * n);
                            }
                          });

  double sum = 0.0;
  for (double v : overlaps) sum += v;
  const double mean = sum / static_cast<double>(realizations);
  double ss = 0.0;
  for (double v : overlaps) ss += (v - mean) * (v - mean);
  McEstimate est;
  est.mean = mean;
  est.stderr_mean =
      realizations > 1
          ? std::sqrt(ss / static_cast<double>(realizations - 1) / static_cast<double>(realizations))
          : 0.0;
  return est;
}

double expected_overlap(std::uint64_t n_atoms, double t, double tau) {
  if (n_atoms < 1) throw DomainError("n_atoms must be positive");
  const double inv_n = 1.0 / static_cast<double>(n_atoms);
  return (1.0 - inv_n) * intrinsic_retrieval(t, 1.0, tau) + inv_n;
}

}  // namespace qmqfc
