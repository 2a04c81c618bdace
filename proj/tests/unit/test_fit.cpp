#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "qmqfc/errors.hpp"
#include "qmqfc/fit.hpp"

using namespace qmqfc;

namespace {

constexpr double kTau = 23.6e-6;

std::vector<DataPoint> decay_data(std::uint64_t seed, double rel_noise, std::size_t n = 12) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  std::vector<DataPoint> pts;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = 60e-6 * static_cast<double>(i) / static_cast<double>(n - 1);
    const double y = 0.2 * std::exp(-(t / kTau) * (t / kTau)) + 0.01;
    const double sigma = rel_noise > 0.0 ? rel_noise * y : 1e-3 * y;
    pts.push_back({t, y + (rel_noise > 0.0 ? sigma * noise(rng) : 0.0), sigma});
  }
  return pts;
}

}  // namespace

TEST(LeastSquares, RecoversExactLine) {
  Model line;
  line.names = {"a", "b"};
  line.value = [](double x, std::span<const double> t) { return t[0] + t[1] * x; };
  std::vector<DataPoint> pts;
  for (int i = 0; i < 8; ++i) pts.push_back({double(i), 2.0 - 0.5 * i, 0.1});
  const auto fit = least_squares(pts, line, {0.0, 0.0});
  EXPECT_TRUE(fit.converged);
  EXPECT_NEAR(fit.value("a"), 2.0, 1e-9);
  EXPECT_NEAR(fit.value("b"), -0.5, 1e-9);
  EXPECT_LT(fit.chi2, 1e-15);
  EXPECT_EQ(fit.dof, 6u);
}

TEST(LeastSquares, LinearSigmasMatchAnalyticCovariance) {
  Model line;
  line.names = {"a", "b"};
  line.value = [](double x, std::span<const double> t) { return t[0] + t[1] * x; };
  std::vector<DataPoint> pts;
  std::mt19937_64 rng(4);
  std::normal_distribution<double> n(0.0, 0.2);
  for (int i = 0; i < 10; ++i) pts.push_back({double(i), 1.0 + 0.3 * i + n(rng), 0.2});
  const auto fit = least_squares(pts, line, {0.0, 0.0});
  double s = 0, sx = 0, sxx = 0;
  for (const auto& p : pts) {
    const double w = 1.0 / (p.sigma * p.sigma);
    s += w;
    sx += w * p.x;
    sxx += w * p.x * p.x;
  }
  const double det = s * sxx - sx * sx;
  const double scale = std::max(1.0, std::sqrt(fit.reduced_chi2()));
  EXPECT_NEAR(fit.sigma("a"), std::sqrt(sxx / det) * scale, 1e-6);
  EXPECT_NEAR(fit.sigma("b"), std::sqrt(s / det) * scale, 1e-6);
}

TEST(LeastSquares, OrderInvariant) {
  auto pts = decay_data(3, 0.05);
  const auto a = fit_gaussian_decay(pts);
  std::mt19937_64 rng(8);
  std::shuffle(pts.begin(), pts.end(), rng);
  const auto b = fit_gaussian_decay(pts);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(a.parameters[i].value, b.parameters[i].value);
    EXPECT_EQ(a.parameters[i].sigma, b.parameters[i].sigma);
  }
}

TEST(LeastSquares, Errors) {
  const auto model = gaussian_decay_model();
  std::vector<DataPoint> few = {{0, 1, 1}, {1, 1, 1}, {2, 1, 1}};
  EXPECT_THROW(least_squares(few, model, {1, 1, 0}), DomainError);
  auto pts = decay_data(1, 0.0);
  pts[2].sigma = 0.0;
  EXPECT_THROW(least_squares(pts, model, {0.2, kTau, 0.0}), DomainError);
  EXPECT_THROW(least_squares(decay_data(1, 0.0), model, {0.2, kTau}), DomainError);
}

TEST(LeastSquares, SingularWhenParameterUnidentifiable) {
  std::vector<DataPoint> pts;
  for (int i = 0; i < 6; ++i) pts.push_back({0.0, 1.0 + 0.01 * i, 0.1});
  EXPECT_THROW(least_squares(pts, gaussian_decay_model(), {0.5, 1.0, 0.5}), SingularFitError);
}

TEST(GaussianDecay, ExactDataRecovered) {
  const auto fit = fit_gaussian_decay(decay_data(0, 0.0));
  EXPECT_TRUE(fit.converged);
  EXPECT_NEAR(fit.value("tau"), kTau, 1e-6 * kTau);
  EXPECT_NEAR(fit.value("amplitude"), 0.2, 1e-6);
  EXPECT_NEAR(fit.value("floor"), 0.01, 1e-6);
}

TEST(GaussianDecay, AutoGuessNearTruth) {
  const auto g = auto_decay_guess(decay_data(0, 0.0));
  EXPECT_NEAR(g.tau, kTau, 0.1 * kTau);
  EXPECT_NEAR(g.floor, 0.01, 0.005);
  EXPECT_THROW(auto_decay_guess(std::vector<DataPoint>{{0, 1, 1}}), DomainError);
}

TEST(GaussianDecay, ShortSpanIsDiagnosed) {
  std::vector<DataPoint> pts;
  for (int i = 0; i < 6; ++i) {
    const double t = 2e-6 * i;
    pts.push_back({t, std::exp(-(t / kTau) * (t / kTau)) + 0.01, 1e-3});
  }
  const auto fit = fit_gaussian_decay(pts, DecayGuess{1.0, kTau, 0.01});
  EXPECT_NE(fit.diagnostics.find("e-folding"), std::string::npos);
}

TEST(GaussianDecay, CoverageOverSeeds) {
  int covered = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto fit = fit_gaussian_decay(decay_data(1000 + seed, 0.05));
    ASSERT_TRUE(fit.converged) << seed;
    covered += std::abs(fit.value("tau") - kTau) <= fit.sigma("tau");
  }
  EXPECT_GE(covered, 53);
  EXPECT_LE(covered, 83);
}

TEST(GaussianDecay, GradientVanishesAtOptimum) {
  const auto pts = decay_data(77, 0.05);
  const auto fit = fit_gaussian_decay(pts);
  const auto model = gaussian_decay_model();
  std::vector<double> theta;
  for (const auto& p : fit.parameters) theta.push_back(p.value);
  for (std::size_t i = 0; i < theta.size(); ++i) {
    const double h = 1e-6 * std::abs(theta[i]);
    auto up = theta, down = theta;
    up[i] += h;
    down[i] -= h;
    const double c_up = chi_squared(pts, model, up);
    const double c_down = chi_squared(pts, model, down);
    const double c0 = chi_squared(pts, model, theta);
    const double grad = (c_up - c_down) / (2.0 * h);
    const double curvature = (c_up - 2.0 * c0 + c_down) / (h * h);
    ASSERT_GT(curvature, 0.0);
    EXPECT_LT(std::abs(grad) / std::sqrt(curvature), 1e-4) << fit.parameters[i].name;
  }
}

TEST(LinearOrigin, ClosedForm) {
  std::vector<DataPoint> pts = {{1, 2.1, 0.1}, {2, 3.9, 0.1}, {3, 6.2, 0.2}};
  const auto fit = fit_linear_origin(pts);
  double sxx = 0, sxy = 0;
  for (const auto& p : pts) {
    sxx += p.x * p.x / (p.sigma * p.sigma);
    sxy += p.x * p.y / (p.sigma * p.sigma);
  }
  EXPECT_NEAR(fit.value("slope"), sxy / sxx, 1e-14);
  EXPECT_GE(fit.sigma("slope"), 1.0 / std::sqrt(sxx) - 1e-15);
  EXPECT_TRUE(fit.converged);
}

TEST(LinearOrigin, AgreesWithIterativeSolver) {
  std::vector<DataPoint> pts;
  std::mt19937_64 rng(6);
  std::normal_distribution<double> n(0.0, 1.0);
  for (int i = 1; i <= 9; ++i) pts.push_back({0.1 * i, 452.0 * 0.1 * i + 3.0 * n(rng), 3.0});
  const auto closed = fit_linear_origin(pts);
  const auto iterative = least_squares(pts, linear_origin_model(), {1.0});
  EXPECT_NEAR(closed.value("slope"), iterative.value("slope"), 1e-8);
  EXPECT_NEAR(closed.sigma("slope"), iterative.sigma("slope"), 1e-8);
}

TEST(LinearOrigin, ZeroAbscissaeSingular) {
  std::vector<DataPoint> pts = {{0, 1, 1}, {0, 2, 1}};
  EXPECT_THROW(fit_linear_origin(pts), SingularFitError);
}

TEST(Saturation, RecoversDeviceConstants) {
  std::vector<DataPoint> pts;
  for (int i = 1; i <= 10; ++i) {
    const double p = 0.06 * i;
    const double s = std::sin(3.0 * std::sqrt(0.61 * p));
    pts.push_back({p, 0.72 * s * s, 0.005});
  }
  const auto fit = fit_saturation(pts, 3.0);
  EXPECT_TRUE(fit.converged);
  EXPECT_NEAR(fit.value("eta_int_max"), 0.72, 1e-6);
  EXPECT_NEAR(fit.value("eta_n"), 0.61, 1e-6);
}

TEST(Saturation, Errors) {
  std::vector<DataPoint> zeros(5, DataPoint{0.0, 0.0, 0.01});
  EXPECT_THROW(fit_saturation(zeros, 3.0), SingularFitError);
  std::vector<DataPoint> pts = {{0.1, 0.1, 0.01}, {0.2, 0.2, 0.01}, {0.3, 0.3, 0.01},
                                {0.4, 0.4, 0.01}};
  EXPECT_THROW(fit_saturation(pts, 0.0), DomainError);
  EXPECT_THROW(fit_saturation(std::span(pts).first(3), 3.0), DomainError);
}

TEST(Saturation, LowPowerOnlyIsDiagnosed) {
  std::vector<DataPoint> pts;
  for (int i = 1; i <= 6; ++i) {
    const double p = 0.02 * i;
    const double s = std::sin(3.0 * std::sqrt(0.61 * p));
    pts.push_back({p, 0.72 * s * s * (1.0 + 0.01 * ((i % 2) ? 1 : -1)), 0.005});
  }
  try {
    const auto fit = fit_saturation(pts, 3.0);
    EXPECT_NE(fit.diagnostics.find("P_opt"), std::string::npos);
  } catch (const SingularFitError&) {
    SUCCEED();
  }
}

TEST(StorageModel, RetrievalEfficiencyClosedLoop) {
  auto truth = default_paper_params();
  truth.p = 0.02;
  truth.eta_ret_intrinsic = 0.25;
  const auto deph = default_dephasing();
  std::vector<DataPoint> pts;
  for (int i = 0; i < 12; ++i) {
    const double t = 5e-6 * i;
    const double y = retrieval_efficiency_closed(t, truth, deph);
    pts.push_back({t, y, 1e-3 * y});
  }
  auto start = truth;
  start.p = 0.01;
  start.eta_ret_intrinsic = 0.3;
  const auto start_deph =
      DephasingModel::from_coherence_time(deph.atomic_mass(), 30e-6, deph.delta_k());
  const auto fit = fit_storage_model(pts, StorageObservable::retrieval_efficiency, start,
                                     start_deph);
  EXPECT_TRUE(fit.converged);
  EXPECT_NEAR(fit.value("tau"), deph.tau(), 1e-6 * deph.tau());
  EXPECT_NEAR(fit.value("eta_ret_intrinsic"), 0.25, 1e-6);
  EXPECT_NEAR(fit.value("p"), 0.02, 1e-5);
}

TEST(StorageModel, G2ClosedLoop) {
  const auto truth = default_paper_params();
  const auto deph = default_dephasing();
  std::vector<DataPoint> pts;
  for (int i = 0; i < 12; ++i) {
    const double t = 5e-6 * i;
    const double y = g2_cross_closed(t, truth, deph);
    pts.push_back({t, y, 0.01 * y});
  }
  auto start = truth;
  start.p = 0.015;
  start.eta_ret_intrinsic = 0.2;
  const auto start_deph =
      DephasingModel::from_coherence_time(deph.atomic_mass(), 20e-6, deph.delta_k());
  const auto fit = fit_storage_model(pts, StorageObservable::g2_cross, start, start_deph);
  EXPECT_NEAR(fit.value("tau"), deph.tau(), 1e-4 * deph.tau());
}

TEST(FitResult, UnknownParameterThrows) {
  const auto fit = fit_gaussian_decay(decay_data(0, 0.0));
  EXPECT_THROW(fit.at("gamma"), std::out_of_range);
}
