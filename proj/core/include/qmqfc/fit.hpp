#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qmqfc/dlcz.hpp"

namespace qmqfc {

struct DataPoint {
  double x = 0.0;
  double y = 0.0;
  double sigma = 1.0;  ///< standard deviation of y, > 0
};

struct FitParameter {
  std::string name;
  double value = 0.0;
  double sigma = 0.0;
};

struct FitResult {
  std::vector<FitParameter> parameters;
  double chi2 = 0.0;
  std::size_t dof = 0;
  bool converged = false;
  std::size_t iterations = 0;
  std::string diagnostics;

  const FitParameter& at(std::string_view name) const;
  double value(std::string_view name) const { return at(name).value; }
  double sigma(std::string_view name) const { return at(name).sigma; }
  double reduced_chi2() const { return dof > 0 ? chi2 / static_cast<double>(dof) : 0.0; }
};

/// Parametric model y = f(x; theta). `gradient` is optional; without it the
/// engine differentiates numerically with steps 1e-6 max(|theta_i|, scale_i).
struct Model {
  std::vector<std::string> names;
  std::function<double(double, std::span<const double>)> value;
  std::function<void(double, std::span<const double>, std::span<double>)> gradient;
  std::vector<double> scales;
};

struct SolverOptions {
  double step_tolerance = 1e-8;  ///< relative parameter step declaring convergence
  std::size_t max_iterations = 200;
  double initial_damping = 1e-3;
};

double chi_squared(std::span<const DataPoint> points, const Model& model,
                   std::span<const double> theta);

/// Damped Gauss-Newton (Levenberg-Marquardt) on weighted residuals.
///
/// Damping is multiplied by 10 after a rejected step and divided by 10 after an
/// accepted one. Parameter sigmas come from the inverse normal matrix at the
/// optimum, scaled by sqrt(chi2/dof) when that exceeds one. Points are sorted
/// before fitting so results do not depend on input order. Throws
/// SingularFitError when the normal matrix is singular at the optimum.
FitResult least_squares(std::span<const DataPoint> points, const Model& model,
                        std::vector<double> initial, const SolverOptions& options = {});

Model linear_origin_model();
Model gaussian_decay_model();         ///< amplitude exp(-t^2/tau^2) + floor
Model saturation_model(double length_cm);  ///< eta_int_max sin^2(L sqrt(eta_n P))

/// Weighted slope through the origin, closed form.
FitResult fit_linear_origin(std::span<const DataPoint> points);

struct DecayGuess {
  double amplitude = 0.0;
  double tau = 0.0;
  double floor = 0.0;
};

/// Floor from the latest point, amplitude from the earliest, tau where the
/// data first fall to floor + amplitude/e (linear interpolation).
DecayGuess auto_decay_guess(std::span<const DataPoint> points);

FitResult fit_gaussian_decay(std::span<const DataPoint> points,
                             std::optional<DecayGuess> guess = std::nullopt,
                             const SolverOptions& options = {});

enum class StorageObservable { retrieval_efficiency, g2_cross };

/// Full-model storage-time fit: the closed-form eta_ret(t) or g2(t) with
/// (p, eta_ret_intrinsic, tau) free and the remaining fields held at `start`.
FitResult fit_storage_model(std::span<const DataPoint> points, StorageObservable observable,
                            const ExperimentParams& start, const DephasingModel& deph_start,
                            const SolverOptions& options = {});

/// eta_int_max sin^2(L sqrt(eta_n P)) with (eta_int_max, eta_n) free.
FitResult fit_saturation(std::span<const DataPoint> points, double length_cm,
                         const SolverOptions& options = {});

}  // namespace qmqfc
