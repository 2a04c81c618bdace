#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "qmqfc/dlcz.hpp"
#include "qmqfc/errors.hpp"

using namespace qmqfc;

namespace {

constexpr double kPi = std::numbers::pi;

ExperimentParams random_params(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  ExperimentParams p;
  p.p = 1e-4 + 0.2 * unit(rng);
  p.eta_cw = 0.001 + 0.5 * unit(rng);
  p.eta_r = 0.001 + 0.5 * unit(rng);
  p.eta_ret_intrinsic = unit(rng);
  p.xi_g = unit(rng);
  p.solid_angle_w = kFourPi * std::pow(10.0, -6.0 + 3.0 * unit(rng));
  p.solid_angle_r = p.solid_angle_w * (0.5 + unit(rng));
  return p;
}

}  // namespace

TEST(Geometry, DeltaKMatchesLawOfCosines) {
  const double k = 2.0 * kPi / 780e-9;
  const long double angle = 3.0L * std::numbers::pi_v<long double> / 180.0L;
  const long double expected =
      std::sqrt(2.0L * k * k * (1.0L - std::cos(angle)));
  EXPECT_NEAR(delta_k_from_geometry(780e-9, 780e-9, 3.0 * kPi / 180.0),
              static_cast<double>(expected), 1e-9 * static_cast<double>(expected));
}

TEST(Geometry, CollinearDifferentWavelengths) {
  const double dk = delta_k_from_geometry(780e-9, 795e-9, 0.0);
  EXPECT_NEAR(dk, 2.0 * kPi * (1.0 / 780e-9 - 1.0 / 795e-9), 1e-6);
  EXPECT_EQ(delta_k_from_geometry(780e-9, 780e-9, 0.0), 0.0);
}

TEST(Geometry, Errors) {
  EXPECT_THROW(delta_k_from_geometry(0.0, 780e-9, 0.1), DomainError);
  EXPECT_THROW(delta_k_from_geometry(780e-9, -1.0, 0.1), DomainError);
  EXPECT_THROW(delta_k_from_geometry(780e-9, 780e-9, 4.0), DomainError);
}

TEST(Dephasing, DefaultTemperatureNear105MicroKelvin) {
  const auto deph = default_dephasing();
  EXPECT_DOUBLE_EQ(deph.tau(), 23.6e-6);
  EXPECT_NEAR(deph.temperature(), 105e-6, 2e-6);
}

TEST(Dephasing, VelocitySpreadTimesDeltaKTimesTauIsOne) {
  const auto deph = default_dephasing();
  EXPECT_NEAR(deph.velocity_spread() * deph.delta_k() * deph.tau(), 1.0, 1e-12);
}

TEST(Dephasing, TemperatureRoundTrip) {
  const PhysicalConstants c;
  const double dk = delta_k_from_geometry(780e-9, 780e-9, 3.0 * kPi / 180.0);
  for (double tau : {1e-6, 23.6e-6, 1e-3}) {
    const double t = temperature_from_tau(c.rb87_mass(), tau, dk);
    EXPECT_NEAR(coherence_time(c.rb87_mass(), t, dk), tau, 1e-10 * tau);
  }
}

TEST(Dephasing, HotterCloudDephasesFaster) {
  const PhysicalConstants c;
  EXPECT_GT(coherence_time(c.rb87_mass(), 50e-6, 4e5), coherence_time(c.rb87_mass(), 200e-6, 4e5));
}

TEST(Dephasing, ConstructionErrors) {
  const PhysicalConstants c;
  EXPECT_THROW(DephasingModel::from_temperature(c.rb87_mass(), 0.0, 4e5), DomainError);
  EXPECT_THROW(DephasingModel::from_temperature(c.rb87_mass(), 1e-4, 0.0), DomainError);
  EXPECT_THROW(DephasingModel::from_coherence_time(c.rb87_mass(), -1.0, 4e5), DomainError);
  EXPECT_THROW(coherence_time(-1.0, 1e-4, 4e5), DomainError);
}

TEST(IntrinsicRetrieval, GaussianDecay) {
  EXPECT_DOUBLE_EQ(intrinsic_retrieval(0.0, 0.3, 20e-6), 0.3);
  EXPECT_NEAR(intrinsic_retrieval(20e-6, 0.3, 20e-6), 0.3 / std::exp(1.0), 1e-15);
  EXPECT_THROW(intrinsic_retrieval(-1e-6, 0.3, 20e-6), DomainError);
  EXPECT_THROW(intrinsic_retrieval(0.0, 1.2, 20e-6), DomainError);
}

TEST(DetectionProbabilities, HandComputedDefaults) {
  const auto params = default_paper_params();
  const auto deph = default_dephasing();
  const auto d = detection_probabilities(0.0, params, deph);
  const double rand = 0.01 * (1.0 - 0.3) / 6.0;  // N_s dOmega/4pi = p
  EXPECT_NEAR(d.p_cw, 1e-4, 1e-18);
  EXPECT_NEAR(d.p_r, 0.01 * 0.3 * 0.08 + rand * 0.08, 1e-16);
  EXPECT_NEAR(d.p_cwr, 0.01 * 0.3 * 0.01 * 0.08 + 0.01 * 0.01 * rand * 0.08, 1e-18);
}

TEST(ClosedForms, RetrievalIsRatio) {
  std::mt19937_64 rng(11);
  const auto deph = default_dephasing();
  for (int i = 0; i < 500; ++i) {
    const auto params = random_params(rng);
    for (double t : {0.0, 10e-6, 40e-6}) {
      const auto d = detection_probabilities(t, params, deph);
      const double closed = retrieval_efficiency_closed(t, params, deph);
      EXPECT_NEAR(closed, d.p_cwr / d.p_cw, 1e-12 * closed);
    }
  }
}

TEST(ClosedForms, G2IsRatio) {
  std::mt19937_64 rng(12);
  const auto deph = default_dephasing();
  for (int i = 0; i < 500; ++i) {
    const auto params = random_params(rng);
    for (double t : {0.0, 23.6e-6, 80e-6}) {
      const auto d = detection_probabilities(t, params, deph);
      const double closed = g2_cross_closed(t, params, deph);
      EXPECT_NEAR(closed, d.p_cwr / (d.p_cw * d.p_r), 1e-12 * closed);
    }
  }
}

TEST(ClosedForms, TextbookFormForEqualSolidAngles) {
  const auto params = default_paper_params();
  const auto deph = default_dephasing();
  const double eta_i = 0.3 * std::exp(-1.0);
  const double p = 0.01, xi = 1.0 / 6.0;
  const double expected = 1.0 + eta_i * (1.0 - p) / (p * (eta_i * (1.0 - xi) + xi));
  EXPECT_NEAR(g2_cross_closed(deph.tau(), params, deph), expected, 1e-12 * expected);
  EXPECT_NEAR(retrieval_efficiency_closed(deph.tau(), params, deph),
              0.08 * (eta_i * (1.0 - p * xi) + p * xi), 1e-15);
}

TEST(ClosedForms, FullDephasingLeavesNoCorrelation) {
  const auto params = default_paper_params();
  const auto deph = default_dephasing();
  EXPECT_NEAR(g2_cross_closed(50.0 * deph.tau(), params, deph), 1.0, 1e-12);
}

TEST(ClosedForms, G2DecreasesWithP) {
  auto params = default_paper_params();
  const auto deph = default_dephasing();
  double last = 1e300;
  for (double p : {1e-4, 1e-3, 1e-2, 1e-1}) {
    params.p = p;
    const double g = g2_cross_closed(0.0, params, deph);
    EXPECT_LT(g, last);
    last = g;
  }
}

TEST(ClosedForms, Errors) {
  auto params = default_paper_params();
  const auto deph = default_dephasing();
  params.p = 0.0;
  EXPECT_THROW(g2_cross_closed(0.0, params, deph), DomainError);
  params = default_paper_params();
  params.eta_ret_intrinsic = 0.0;
  params.xi_g = 0.0;
  EXPECT_THROW(g2_cross_closed(0.0, params, deph), DomainError);
  params.eta_cw = 3.0;
  EXPECT_THROW(detection_probabilities(0.0, params, deph), DomainError);
}

TEST(DephasingOracle, MatchesFiniteNExpectation) {
  const auto deph = default_dephasing();
  for (double x : {0.0, 0.7, 1.5}) {
    const auto est = dephasing_overlap_mc(200, deph, x * deph.tau(), 2000, 5);
    const double expected = expected_overlap(200, x * deph.tau(), deph.tau());
    const double tol = x == 0.0 ? 1e-12 : 4.0 * est.stderr_mean;
    EXPECT_NEAR(est.mean, expected, tol) << "t/tau = " << x;
  }
}

TEST(DephasingOracle, WorkerCountDoesNotChangeResult) {
  const auto deph = default_dephasing();
  const auto a = dephasing_overlap_mc(300, deph, deph.tau(), 257, 9, 1);
  const auto b = dephasing_overlap_mc(300, deph, deph.tau(), 257, 9, 4);
  EXPECT_EQ(a.mean, b.mean);
  EXPECT_EQ(a.stderr_mean, b.stderr_mean);
}

TEST(DephasingOracle, SeedChangesResult) {
  const auto deph = default_dephasing();
  EXPECT_NE(dephasing_overlap_mc(100, deph, deph.tau(), 50, 1).mean,
            dephasing_overlap_mc(100, deph, deph.tau(), 50, 2).mean);
}

TEST(DephasingOracle, Errors) {
  const auto deph = default_dephasing();
  EXPECT_THROW(dephasing_overlap_mc(1, deph, 0.0, 10, 1), DomainError);
  EXPECT_THROW(dephasing_overlap_mc(10, deph, 0.0, 0, 1), DomainError);
  EXPECT_THROW(dephasing_overlap_mc(10, deph, -1.0, 10, 1), DomainError);
  EXPECT_THROW(expected_overlap(0, 0.0, 1.0), DomainError);
}
