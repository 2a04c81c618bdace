#include "qmqfc/fit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include <Eigen/Dense>

#include "qmqfc/errors.hpp"

namespace qmqfc {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

constexpr double kMaxDamping = 1e20;

std::vector<DataPoint> canonical_order(std::span<const DataPoint> points) {
  std::vector<DataPoint> sorted(points.begin(), points.end());
  std::sort(sorted.begin(), sorted.end(), [](const DataPoint& a, const DataPoint& b) {
    if (a.x != b.x) return a.x < b.x;
    if (a.y != b.y) return a.y < b.y;
    return a.sigma < b.sigma;
  });
  return sorted;
}

void check_points(std::span<const DataPoint> points, std::size_t n_params) {
  if (points.size() <= n_params) {
    throw DomainError("fit needs more points than free parameters");
  }
  for (const auto& p : points) {
    if (!(p.sigma > 0.0) || !std::isfinite(p.x) || !std::isfinite(p.y)) {
      throw DomainError("fit points need finite x, y and sigma > 0");
    }
  }
}

void model_gradient(const Model& model, double x, const std::vector<double>& theta,
                    std::span<double> grad) {
  if (model.gradient) {
    model.gradient(x, theta, grad);
    return;
  }
  std::vector<double> probe = theta;
  for (std::size_t i = 0; i < theta.size(); ++i) {
    const double scale = i < model.scales.size() ? model.scales[i] : 0.0;
    const double h = 1e-6 * std::max({std::abs(theta[i]), scale, 1e-300});
    probe[i] = theta[i] + h;
    const double up = model.value(x, probe);
    probe[i] = theta[i] - h;
    const double down = model.value(x, probe);
    probe[i] = theta[i];
    grad[i] = (up - down) / (2.0 * h);
  }
}

struct Linearization {
  MatrixXd jacobian;  // weighted: d f / d theta / sigma
  VectorXd residual;  // weighted: (y - f) / sigma
  double chi2 = 0.0;
};

Linearization linearize(const std::vector<DataPoint>& points, const Model& model,
                        const std::vector<double>& theta) {
  const auto n = static_cast<Eigen::Index>(points.size());
  const auto k = static_cast<Eigen::Index>(theta.size());
  Linearization lin;
  lin.jacobian.resize(n, k);
  lin.residual.resize(n);
  std::vector<double> grad(theta.size());
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& p = points[static_cast<std::size_t>(i)];
    lin.residual(i) = (p.y - model.value(p.x, theta)) / p.sigma;
    model_gradient(model, p.x, theta, grad);
    for (Eigen::Index j = 0; j < k; ++j) lin.jacobian(i, j) = grad[static_cast<std::size_t>(j)] / p.sigma;
  }
  lin.chi2 = lin.residual.squaredNorm();
  return lin;
}

double relative_step(const VectorXd& step, const std::vector<double>& theta) {
  double worst = 0.0;
  for (Eigen::Index i = 0; i < step.size(); ++i) {
    const double ref = std::max(std::abs(theta[static_cast<std::size_t>(i)]), 1e-300);
    worst = std::max(worst, std::abs(step(i)) / ref);
  }
  return worst;
}

// Inverse of the normal matrix; throws when any direction has (relative) zero
// curvature.
MatrixXd covariance(const MatrixXd& normal, const std::vector<std::string>& names) {
  const auto k = normal.rows();
  VectorXd d(k);
  for (Eigen::Index i = 0; i < k; ++i) {
    if (!(normal(i, i) > 0.0) || !std::isfinite(normal(i, i))) {
      throw SingularFitError("parameter '" + names[static_cast<std::size_t>(i)] +
                             "' has zero curvature; not identifiable from the data");
    }
    d(i) = 1.0 / std::sqrt(normal(i, i));
  }
  const MatrixXd scaled = d.asDiagonal() * normal * d.asDiagonal();
  Eigen::SelfAdjointEigenSolver<MatrixXd> eig(scaled);
  if (eig.info() != Eigen::Success || eig.eigenvalues().minCoeff() < 1e-12) {
    throw SingularFitError("normal matrix is singular at the optimum");
  }
  const MatrixXd inv_scaled = eig.eigenvectors() *
                              eig.eigenvalues().cwiseInverse().asDiagonal() *
                              eig.eigenvectors().transpose();
  return d.asDiagonal() * inv_scaled * d.asDiagonal();
}

FitResult package(const std::vector<std::string>& names, const std::vector<double>& theta,
                  const MatrixXd& cov, double chi2, std::size_t dof) {
  FitResult result;
  result.chi2 = chi2;
  result.dof = dof;
  const double reduced = chi2 / static_cast<double>(dof);
  const double inflate = reduced > 1.0 ? std::sqrt(reduced) : 1.0;
  for (std::size_t i = 0; i < theta.size(); ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    result.parameters.push_back({names[i], theta[i], std::sqrt(cov(ii, ii)) * inflate});
  }
  return result;
}

}  // namespace

const FitParameter& FitResult::at(std::string_view name) const {
  for (const auto& p : parameters) {
    if (p.name == name) return p;
  }
  throw std::out_of_range("no fit parameter named '" + std::string(name) + "'");
}

double chi_squared(std::span<const DataPoint> points, const Model& model,
                   std::span<const double> theta) {
  double chi2 = 0.0;
  for (const auto& p : points) {
    const double r = (p.y - model.value(p.x, theta)) / p.sigma;
    chi2 += r * r;
  }
  return chi2;
}

FitResult least_squares(std::span<const DataPoint> input, const Model& model,
                        std::vector<double> theta, const SolverOptions& options) {
  const std::size_t k = model.names.size();
  if (theta.size() != k) throw DomainError("initial guess size does not match the model");
  check_points(input, k);
  const auto points = canonical_order(input);

  Linearization lin = linearize(points, model, theta);
  if (!std::isfinite(lin.chi2)) throw NumericalError("model is not finite at the initial guess");

  double damping = options.initial_damping;
  bool converged = false;
  std::size_t iteration = 0;
  std::ostringstream notes;

  while (iteration < options.max_iterations && !converged) {
    ++iteration;
    const MatrixXd normal = lin.jacobian.transpose() * lin.jacobian;
    const VectorXd gradient = lin.jacobian.transpose() * lin.residual;
    const double diag_floor = 1e-12 * std::max(normal.diagonal().maxCoeff(), 1e-300);

    bool accepted = false;
    while (!accepted) {
      MatrixXd damped = normal;
      for (Eigen::Index i = 0; i < damped.rows(); ++i) {
        damped(i, i) += damping * std::max(normal(i, i), diag_floor);
      }
      const VectorXd step = damped.ldlt().solve(gradient);
      std::vector<double> candidate = theta;
      bool finite = step.allFinite();
      for (std::size_t i = 0; i < k && finite; ++i) {
        candidate[i] += step(static_cast<Eigen::Index>(i));
      }
      const double chi2_new = finite ? chi_squared(points, model, candidate)
                                     : std::numeric_limits<double>::quiet_NaN();
      if (chi2_new <= lin.chi2) {
        const double rel = relative_step(step, theta);
        theta = std::move(candidate);
        lin = linearize(points, model, theta);
        damping = std::max(damping / 10.0, 1e-15);
        accepted = true;
        converged = rel < options.step_tolerance;
      } else {
        damping *= 10.0;
        if (damping > kMaxDamping) {
          // No descent direction left: the current point is a minimum to
          // working precision iff the attempted step was already negligible.
          converged = finite && relative_step(step, theta) < options.step_tolerance;
          if (!converged) notes << "damping exhausted without a downhill step; ";
          break;
        }
      }
    }
    if (!accepted) break;
  }
  if (!converged && iteration >= options.max_iterations) {
    notes << "iteration cap " << options.max_iterations << " reached; ";
  }

  const MatrixXd cov = covariance(lin.jacobian.transpose() * lin.jacobian, model.names);
  FitResult result = package(model.names, theta, cov, lin.chi2, points.size() - k);
  result.converged = converged;
  result.iterations = iteration;
  result.diagnostics = notes.str();
  return result;
}

Model linear_origin_model() {
  Model m;
  m.names = {"slope"};
  m.value = [](double x, std::span<const double> t) { return t[0] * x; };
  m.gradient = [](double x, std::span<const double>, std::span<double> g) { g[0] = x; };
  return m;
}

Model gaussian_decay_model() {
  Model m;
  m.names = {"amplitude", "tau", "floor"};
  m.value = [](double t, std::span<const double> th) {
    const double u = t / th[1];
    return th[0] * std::exp(-u * u) + th[2];
  };
  m.gradient = [](double t, std::span<const double> th, std::span<double> g) {
    const double u = t / th[1];
    const double e = std::exp(-u * u);
    g[0] = e;
    g[1] = th[0] * e * 2.0 * u * u / th[1];
    g[2] = 1.0;
  };
  return m;
}

Model saturation_model(double length_cm) {
  Model m;
  m.names = {"eta_int_max", "eta_n"};
  m.value = [length_cm](double power, std::span<const double> th) {
    const double s = std::sin(length_cm * std::sqrt(std::max(th[1] * power, 0.0)));
    return th[0] * s * s;
  };
  m.gradient = [length_cm](double power, std::span<const double> th, std::span<double> g) {
    const double arg = length_cm * std::sqrt(std::max(th[1] * power, 0.0));
    const double s = std::sin(arg);
    g[0] = s * s;
    g[1] = th[1] > 0.0 ? th[0] * s * std::cos(arg) * length_cm * std::sqrt(power / th[1]) : 0.0;
  };
  return m;
}

FitResult fit_linear_origin(std::span<const DataPoint> points) {
  check_points(points, 1);
  const auto sorted = canonical_order(points);
  double sxx = 0.0;
  double sxy = 0.0;
  for (const auto& p : sorted) {
    const double w = 1.0 / (p.sigma * p.sigma);
    sxx += w * p.x * p.x;
    sxy += w * p.x * p.y;
  }
  if (!(sxx > 0.0)) throw SingularFitError("all abscissae are zero; slope undefined");
  const double slope = sxy / sxx;
  double chi2 = 0.0;
  for (const auto& p : sorted) {
    const double r = (p.y - slope * p.x) / p.sigma;
    chi2 += r * r;
  }
  MatrixXd cov(1, 1);
  cov(0, 0) = 1.0 / sxx;
  FitResult result = package({"slope"}, {slope}, cov, chi2, sorted.size() - 1);
  result.converged = true;
  return result;
}

DecayGuess auto_decay_guess(std::span<const DataPoint> input) {
  if (input.size() < 2) throw DomainError("decay guess needs at least two points");
  const auto points = canonical_order(input);
  DecayGuess guess;
  guess.floor = points.back().y;
  guess.amplitude = points.front().y - guess.floor;
  const double target = guess.floor + guess.amplitude / std::exp(1.0);
  guess.tau = points.back().x;
  for (std::size_t i = 1; i < points.size(); ++i) {
    const auto& a = points[i - 1];
    const auto& b = points[i];
    if ((a.y - target) * (b.y - target) <= 0.0 && a.y != b.y) {
      guess.tau = a.x + (target - a.y) * (b.x - a.x) / (b.y - a.y);
      break;
    }
  }
  if (!(guess.tau > 0.0)) guess.tau = std::max(points.back().x, 1e-300);
  return guess;
}

FitResult fit_gaussian_decay(std::span<const DataPoint> points, std::optional<DecayGuess> guess,
                             const SolverOptions& options) {
  if (points.size() < 4) throw DomainError("Gaussian decay fit needs at least four points");
  const DecayGuess g = guess.value_or(auto_decay_guess(points));
  Model model = gaussian_decay_model();
  auto result = least_squares(points, model, {g.amplitude, g.tau, g.floor}, options);
  double t_max = 0.0;
  for (const auto& p : points) t_max = std::max(t_max, p.x);
  if (t_max < result.value("tau")) {
    result.diagnostics += "data span less than one e-folding time; ";
  }
  return result;
}

FitResult fit_storage_model(std::span<const DataPoint> points, StorageObservable observable,
                            const ExperimentParams& start, const DephasingModel& deph_start,
                            const SolverOptions& options) {
  if (points.size() < 4) throw DomainError("storage-model fit needs at least four points");
  require_valid(start);
  Model model;
  model.names = {"p", "eta_ret_intrinsic", "tau"};
  model.scales = {1e-3, 1e-3, deph_start.tau()};
  model.value = [start, deph_start, observable](double t, std::span<const double> th) {
    ExperimentParams params = start;
    params.p = th[0];
    params.eta_ret_intrinsic = th[1];
    try {
      const auto deph = DephasingModel::from_coherence_time(deph_start.atomic_mass(), th[2],
                                                            deph_start.delta_k());
      return observable == StorageObservable::retrieval_efficiency
                 ? retrieval_efficiency_closed(t, params, deph)
                 : g2_cross_closed(t, params, deph);
    } catch (const DomainError&) {
      return std::numeric_limits<double>::quiet_NaN();
    }
  };
  return least_squares(points, model, {start.p, start.eta_ret_intrinsic, deph_start.tau()},
                       options);
}

FitResult fit_saturation(std::span<const DataPoint> points, double length_cm,
                         const SolverOptions& options) {
  if (points.size() < 4) throw DomainError("saturation fit needs at least four points");
  if (!(length_cm > 0.0)) throw DomainError("waveguide length must be positive");
  check_points(points, 2);
  bool any_power = false;
  for (const auto& p : points) any_power = any_power || p.x > 0.0;
  if (!any_power) throw SingularFitError("all pump powers are zero; saturation undefined");

  // eta_int_max enters linearly, so scan eta_n and solve for it exactly.
  double best_chi2 = std::numeric_limits<double>::infinity();
  double best_n = 1.0;
  double best_max = 0.0;
  for (double eta_n = 1e-3; eta_n < 1e3; eta_n *= 1.02) {
    double swy = 0.0;
    double sww = 0.0;
    for (const auto& p : points) {
      const double s = std::sin(length_cm * std::sqrt(eta_n * std::max(p.x, 0.0)));
      const double w = 1.0 / (p.sigma * p.sigma);
      swy += w * p.y * s * s;
      sww += w * s * s * s * s;
    }
    if (!(sww > 0.0)) continue;
    const double amp = swy / sww;
    double chi2 = 0.0;
    for (const auto& p : points) {
      const double s = std::sin(length_cm * std::sqrt(eta_n * std::max(p.x, 0.0)));
      const double r = (p.y - amp * s * s) / p.sigma;
      chi2 += r * r;
    }
    if (chi2 < best_chi2) {
      best_chi2 = chi2;
      best_n = eta_n;
      best_max = amp;
    }
  }
  auto result = least_squares(points, saturation_model(length_cm), {best_max, best_n}, options);
  const double eta_n = result.value("eta_n");
  const double p_opt = std::pow(std::numbers::pi / (2.0 * length_cm), 2) / eta_n;
  double p_max = 0.0;
  for (const auto& p : points) p_max = std::max(p_max, p.x);
  if (p_max < 0.5 * p_opt) {
    result.diagnostics += "pump powers cover less than half of [0, P_opt]; ";
  }
  return result;
}

}  // namespace qmqfc
