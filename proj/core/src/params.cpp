#include "qmqfc/params.hpp"

#include <cmath>
#include <sstream>

#include "qmqfc/errors.hpp"

namespace qmqfc {

namespace {

constexpr double kBoltzmann = 1.380649e-23;           // J/K, exact (SI 2019)
constexpr double kAtomicMassUnit = 1.66053906660e-27;  // kg
constexpr double kRb87MassU = 86.909180527;
constexpr double kSpeedOfLight = 299792458.0;
constexpr double kFiberGroupVelocity = 2.0e8;

void check_unit_interval(ValidationReport& report, const char* field, double value) {
  if (!(value >= 0.0 && value <= 1.0)) {
    std::ostringstream os;
    os << "must lie in [0, 1], got " << value;
    report.push_back({field, os.str()});
  }
}

void check_solid_angle(ValidationReport& report, const char* field, double value) {
  if (!(value > 0.0 && value <= kFourPi)) {
    std::ostringstream os;
    os << "must lie in (0, 4pi], got " << value;
    report.push_back({field, os.str()});
  }
}

}  // namespace

PhysicalConstants::PhysicalConstants()
    : PhysicalConstants(kBoltzmann, kRb87MassU * kAtomicMassUnit, kSpeedOfLight,
                        kFiberGroupVelocity) {}

PhysicalConstants::PhysicalConstants(double boltzmann_k, double rb87_mass, double speed_of_light,
                                     double fiber_group_velocity)
    : boltzmann_k_(boltzmann_k),
      rb87_mass_(rb87_mass),
      speed_of_light_(speed_of_light),
      fiber_group_velocity_(fiber_group_velocity) {
  if (!(boltzmann_k > 0 && rb87_mass > 0 && speed_of_light > 0 && fiber_group_velocity > 0) ||
      !std::isfinite(boltzmann_k * rb87_mass * speed_of_light * fiber_group_velocity)) {
    throw DomainError("physical constants must be finite and strictly positive");
  }
}

ExperimentParams default_paper_params() { return ExperimentParams{}; }

ExperimentParams storage_decay_params() {
  ExperimentParams params;
  params.p = WritePowerMap{}.pair_probability(0.18e-3);
  params.eta_ret_intrinsic = 0.08;
  return params;
}

ValidationReport validate(const ExperimentParams& params) {
  ValidationReport report;
  check_unit_interval(report, "p", params.p);
  if (params.p >= 1.0) {
    report.push_back({"p", "thermal pair statistics need p < 1"});
  }
  check_unit_interval(report, "eta_cw", params.eta_cw);
  check_unit_interval(report, "eta_r", params.eta_r);
  check_unit_interval(report, "eta_ret_intrinsic", params.eta_ret_intrinsic);
  check_unit_interval(report, "xi_g", params.xi_g);
  check_unit_interval(report, "p_noise_w", params.p_noise_w);
  check_unit_interval(report, "p_noise_r", params.p_noise_r);
  check_solid_angle(report, "solid_angle_w", params.solid_angle_w);
  check_solid_angle(report, "solid_angle_r", params.solid_angle_r);

  const bool angles_ok = params.solid_angle_w > 0.0 && params.solid_angle_r > 0.0 &&
                         params.solid_angle_w <= kFourPi && params.solid_angle_r <= kFourPi;
  if (angles_ok && params.p >= 0.0) {
    const double ns = params.excited_atoms();
    if (!std::isfinite(ns) || ns < params.p) {
      report.push_back({"solid_angle_w", "N_s = p 4pi / dOmega_w must be finite and >= p"});
    }
    const double random_weight = params.random_emission_weight();
    if (!(random_weight <= 1.0)) {
      std::ostringstream os;
      os << "random-emission probability N_s dOmega_r/4pi xi_g = " << random_weight
         << " exceeds 1";
      report.push_back({"solid_angle_r", os.str()});
    }
  }
  return report;
}

void require_valid(const ExperimentParams& params) {
  const auto report = validate(params);
  if (!report.empty()) {
    throw DomainError("invalid experiment parameters: " + to_string(report));
  }
}

std::string to_string(const ValidationReport& report) {
  std::ostringstream os;
  for (std::size_t i = 0; i < report.size(); ++i) {
    if (i > 0) os << "; ";
    os << report[i].field << ": " << report[i].message;
  }
  return os.str();
}

double WritePowerMap::pair_probability(double write_power) const {
  if (!(write_power >= 0.0)) throw DomainError("write power must be non-negative");
  return kappa * write_power;
}

double WritePowerMap::write_power(double pair_probability) const {
  if (!(kappa > 0.0)) throw DomainError("write power map needs kappa > 0");
  return pair_probability / kappa;
}

}  // namespace qmqfc
